#pragma once

#include <stdexcept>
#include <string>

namespace aztec {

// Bad input: the CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure (non-convergence, pole hit): exit code 1.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelParams {
    double a = 1.0;
    double alpha = 1.0;

    void validate() const;
};

ModelParams make_params(double a, double alpha);

// Root in (0,1) of a2*al^2 + (a2-1)*al + a2 = 0, i.e. a^2 = al/(1+al+al^2).
double order6_alpha(double a2);

// Parameters of the order-six family with the given alpha.
ModelParams order6_params(double alpha);

// The smooth-phase reference point: a^2 = 1/3 - 1/100 with the order-six alpha.
ModelParams reference_smooth_params();

}  // namespace aztec
