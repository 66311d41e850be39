#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace aztec {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline Mat2 mat2(cplx a, cplx b, cplx c, cplx d) {
    Mat2 m;
    m << a, b, c, d;
    return m;
}

inline double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

// A 2x2 matrix stored as mantissa * exp(log_scale); keeps long products finite.
struct ScaledMat {
    Mat2 m = Mat2::Identity();
    double log_scale = 0.0;

    void normalize();
    ScaledMat& operator*=(const Mat2& rhs);
    ScaledMat& operator*=(const ScaledMat& rhs);
    ScaledMat inverse() const;
    Mat2 value() const;
};

ScaledMat scaled_power(const Mat2& base, int k);

// Integer power with repeated squaring; negative exponents invert.
Mat2 mat_pow(const Mat2& base, int k);

// Thread count from AZTEC_THREADS, capped by hardware concurrency.
unsigned worker_count();

// Runs f(i) for i in [0,n) across worker_count() threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

// Real polynomials, coefficients lowest degree first.
using Poly = std::vector<double>;
Poly poly_mul(const Poly& p, const Poly& q);
Poly poly_add(const Poly& p, const Poly& q);
Poly poly_scale(const Poly& p, double s);
// Divides by (z - r); remainder returned through rem.
Poly poly_deflate(const Poly& p, double r, double* rem);
double poly_eval(const Poly& p, double x);
cplx poly_eval(const Poly& p, cplx x);
// All complex roots via the companion matrix.
std::vector<cplx> poly_roots(const Poly& p);

}  // namespace aztec
