#include "aztec/params.hpp"

#include <algorithm>
#include <cmath>

namespace aztec {

void ModelParams::validate() const {
    if (!(a > 0.0 && a <= 1.0) || !std::isfinite(a))
        throw ValidationError("parameter a must lie in (0,1], got " + std::to_string(a));
    if (!(alpha > 0.0 && alpha <= 1.0) || !std::isfinite(alpha))
        throw ValidationError("parameter alpha must lie in (0,1], got " + std::to_string(alpha));
}

ModelParams make_params(double a, double alpha) {
    ModelParams p{a, alpha};
    p.validate();
    return p;
}

double order6_alpha(double a2) {
    if (!(a2 > 0.0 && a2 <= 1.0 / 3.0 + 1e-15))
        throw ValidationError("order-six relation needs 0 < a^2 <= 1/3");
    // a2*al^2 + (a2-1)*al + a2 = 0, smaller root
    double b = a2 - 1.0;
    double disc = std::max(0.0, b * b - 4.0 * a2 * a2);
    double q = -0.5 * (b - std::sqrt(disc));
    double r1 = q / a2, r2 = a2 / q;
    return std::min({r1, r2, 1.0});
}

ModelParams order6_params(double alpha) {
    double a2 = alpha / (1.0 + alpha + alpha * alpha);
    return make_params(std::sqrt(a2), alpha);
}

ModelParams reference_smooth_params() {
    double a2 = 1.0 / 3.0 - 1.0 / 100.0;
    return make_params(std::sqrt(a2), order6_alpha(a2));
}

}  // namespace aztec
