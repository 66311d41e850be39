#pragma once

#include "aztec/curve.hpp"
#include "aztec/linalg.hpp"

#include <array>
#include <functional>
#include <utility>
#include <vector>

namespace aztec {

// [[a11, a12 + b12 z], [a21 + b21/z, a22]]
struct LaurentMatrix {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0, b12 = 0, b21 = 0;

    Mat2 eval(cplx z) const;
    void validate() const;
    // det as c[0]/z + c[1] + c[2] z
    std::array<double, 3> det_coeffs() const;
    double trace() const { return a11 + a22; }
};

// diag(aQ,1) [[1,1],[z1/z,1]] diag(bQ,1)
struct MinusFactor {
    double aQ = 0, bQ = 0, z1 = 0;
    Mat2 eval(cplx z) const;
};

// diag(1,cQ) [[1,z/z2],[1,1]] diag(1,dQ)
struct PlusFactor {
    double cQ = 0, dQ = 0, z2 = 0;
    Mat2 eval(cplx z) const;
};

struct SymbolPair {
    std::function<Mat2(cplx)> Ao;
    std::function<Mat2(cplx)> Ae;
    std::function<Mat2(cplx)> Ae_inv;
};

LaurentMatrix model_P(const ModelParams& p);
CurveParams class_params(const LaurentMatrix& P);
LaurentMatrix pi_map(double u, const CurvePoint& pt, const CurveParams& c);
std::pair<double, CurvePoint> pi_inverse(const LaurentMatrix& P);
std::pair<MinusFactor, PlusFactor> factorize_QQ(const LaurentMatrix& P);
LaurentMatrix s_map(const LaurentMatrix& P);
// Same maps with the class parameters supplied; z1 = z2 is ill-conditioned to recover.
std::pair<MinusFactor, PlusFactor> factorize_QQ(const LaurentMatrix& P, const CurveParams& c);
LaurentMatrix s_map(const LaurentMatrix& P, const CurveParams& c);

struct FlowValues {
    double aval, bval, dval;
};
FlowValues abd(const CurvePoint& pt, const ModelParams& p);

// a, b, d along the orbit sigma^j(x0,y0), j = 0..n-1.
struct FlowFactors {
    ModelParams params;
    std::vector<FlowValues> v;
};
FlowFactors flow_factors(const ModelParams& p, int n);

ScaledMat pminus_scaled(const FlowFactors& f, int N, cplx z);
ScaledMat pplus_scaled(const FlowFactors& f, int N, cplx z);
Mat2 product_Pminus(const ModelParams& p, int N, cplx z);
Mat2 product_Pplus(const ModelParams& p, int N, cplx z);

// Symbols used by the kernel; Ao is the first factor of P.
SymbolPair symbols(const ModelParams& p);
Mat2 ao_matrix(const ModelParams& p, cplx z);
// Ao with the off-diagonal entries as printed in the symbol definition.
Mat2 ao_printed(const ModelParams& p, cplx z);
// [[1, a],[a/z, 1]] = Ao^{-1} P
Mat2 ao_inv_P(const ModelParams& p, cplx z);

}  // namespace aztec
