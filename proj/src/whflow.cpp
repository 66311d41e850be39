#include "aztec/whflow.hpp"

#include <cmath>

namespace aztec {

Mat2 LaurentMatrix::eval(cplx z) const {
    return mat2(a11, a12 + b12 * z, a21 + b21 / z, a22);
}

void LaurentMatrix::validate() const {
    for (double v : {a11, a12, a21, a22, b12, b21})
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError("Laurent matrix coefficients must be strictly positive");
    // a = 1 sits on the boundary det P(1) = 0
    double rhs = (a12 + b12) * (a21 + b21);
    if (!(a11 * a22 >= rhs * (1.0 - 1e-12)))
        throw ValidationError("Laurent matrix needs det P(1) > 0");
}

std::array<double, 3> LaurentMatrix::det_coeffs() const {
    return {-a12 * b21, a11 * a22 - a12 * a21 - b12 * b21, -b12 * a21};
}

Mat2 MinusFactor::eval(cplx z) const { return mat2(aQ * bQ, aQ, bQ * z1 / z, 1.0); }

Mat2 PlusFactor::eval(cplx z) const { return mat2(1.0, dQ * z / z2, cQ, cQ * dQ); }

LaurentMatrix model_P(const ModelParams& p) {
    p.validate();
    double a = p.a, al = p.alpha, a2 = a * a;
    return {al * (1.0 + a2), a * al, a / al, (1.0 + a2) / al, a * al, a / al};
}

CurveParams class_params(const LaurentMatrix& P) {
    P.validate();
    CurveParams c;
    c.c1 = 0.5 * (P.a11 + P.a22);
    c.c2 = P.a21 * P.b12;
    double prod = P.a12 * P.b21 / (P.a21 * P.b12);
    double sum = (P.a11 * P.a22 - (P.a21 * P.a12 + P.b12 * P.b21)) / c.c2;
    double disc = sum * sum - 4.0 * prod;
    if (disc < -1e-12 * sum * sum) throw ValidationError("class parameters: no real zeros of det P");
    disc = std::max(disc, 0.0);
    double q = 0.5 * (sum + std::sqrt(disc));
    c.z2 = q;
    c.z1 = prod / q;
    double tol = 1e-12;
    if (!(c.z1 > 0.0 && c.z1 <= 1.0 + tol && c.z2 >= 1.0 - tol))
        throw ValidationError("class parameters: zeros of det P not in 0 < z1 <= 1 <= z2");
    return c;
}

LaurentMatrix pi_map(double u, const CurvePoint& pt, const CurveParams& c) {
    if (pt.infinity || !(pt.x < 0.0)) throw ValidationError("pi_map: point not on E-");
    if (!(u > 0.0)) throw ValidationError("pi_map: u must be positive");
    double x = pt.x, y = pt.y;
    LaurentMatrix P;
    P.a11 = c.c1 * (1.0 - y / x);
    P.a12 = -u * x;
    P.b12 = u;
    P.a21 = c.c2 / u;
    P.b21 = -c.c2 * c.z1 * c.z2 / (u * x);
    P.a22 = c.c1 * (1.0 + y / x);
    return P;
}

std::pair<double, CurvePoint> pi_inverse(const LaurentMatrix& P) {
    P.validate();
    double u = P.b12;
    double r = P.a12 / P.b12;
    return {u, CurvePoint::at(-r, r * (P.a11 - P.a22) / (P.a11 + P.a22))};
}

std::pair<MinusFactor, PlusFactor> factorize_QQ(const LaurentMatrix& P) {
    return factorize_QQ(P, class_params(P));
}

std::pair<MinusFactor, PlusFactor> factorize_QQ(const LaurentMatrix& P, const CurveParams& c) {
    P.validate();
    double den = P.a21 * c.z1 + P.b21;
    MinusFactor m{P.a11 * c.z1 / den, P.b21 / c.z1, c.z1};
    PlusFactor pl{P.a21, P.a12 * den / (P.a11 * P.a21 * c.z1), c.z2};
    return {m, pl};
}

LaurentMatrix s_map(const LaurentMatrix& P) { return s_map(P, class_params(P)); }

LaurentMatrix s_map(const LaurentMatrix& P, const CurveParams& cp) {
    auto [qm, qp] = factorize_QQ(P, cp);
    double a = qm.aQ, b = qm.bQ, c = qp.cQ, d = qp.dQ;
    double z1 = cp.z1, z2 = cp.z2;
    LaurentMatrix S;
    S.a11 = a * b + b * d * z1 / z2;
    S.a12 = a * a * b;
    S.b12 = a * b * d / z2;
    S.a21 = c;
    S.b21 = c * d * z1 / a;
    S.a22 = a * c + c * d;
    return S;
}

FlowValues abd(const CurvePoint& pt, const ModelParams& p) {
    if (pt.infinity || !(pt.x < 0.0)) throw ValidationError("abd: point not on E-");
    double a = p.a, al = p.alpha, a2 = a * a, x = pt.x, y = pt.y;
    FlowValues v;
    v.aval = a * (a2 + 1.0) * (al * al + 1.0) * (y - x) / (2.0 * (1.0 - a2 * x));
    v.bval = -1.0 / (al * a * x);
    v.dval = 2.0 * a * al * x * (x - 1.0 / a2) / ((a2 + 1.0) * (al + 1.0 / al) * (y - x));
    if (!(v.aval > 0.0 && v.bval > 0.0 && v.dval > 0.0))
        throw ValidationError("abd: point not on E- (non-positive flow values)");
    return v;
}

FlowFactors flow_factors(const ModelParams& p, int n) {
    FlowFactors f{p, {}};
    if (n <= 0) return f;
    auto orbit = flow_orbit(p, n - 1);
    f.v.reserve(orbit.size());
    for (const auto& pt : orbit) f.v.push_back(abd(pt, p));
    return f;
}

ScaledMat pminus_scaled(const FlowFactors& f, int N, cplx z) {
    if (N > static_cast<int>(f.v.size())) throw ValidationError("pminus: orbit too short");
    double a2 = f.params.a * f.params.a;
    ScaledMat acc;
    for (int j = 0; j < N; ++j) {
        double aj = f.v[j].aval, bj = f.v[j].bval;
        acc *= mat2(bj * aj, bj * aj * aj, bj * a2 / z, bj * aj);
    }
    return acc;
}

ScaledMat pplus_scaled(const FlowFactors& f, int N, cplx z) {
    if (N > static_cast<int>(f.v.size())) throw ValidationError("pplus: orbit too short");
    double a2 = f.params.a * f.params.a, al2 = f.params.alpha * f.params.alpha;
    ScaledMat acc;
    for (int j = 0; j < N; ++j) {
        double dj = f.v[N - 1 - j].dval;
        double e = a2 / al2 * dj;
        acc *= mat2(1.0, a2 * z * dj, e, e * dj);
    }
    return acc;
}

Mat2 product_Pminus(const ModelParams& p, int N, cplx z) {
    if (z == 0.0) throw ValidationError("product_Pminus: z = 0");
    return pminus_scaled(flow_factors(p, N), N, z).value();
}

Mat2 product_Pplus(const ModelParams& p, int N, cplx z) {
    return pplus_scaled(flow_factors(p, N), N, z).value();
}

Mat2 ao_matrix(const ModelParams& p, cplx z) {
    return mat2(p.alpha, p.a * p.alpha * z, p.a / p.alpha, 1.0 / p.alpha);
}

Mat2 ao_printed(const ModelParams& p, cplx z) {
    return mat2(p.alpha, p.a / p.alpha * z, p.alpha * p.a, 1.0 / p.alpha);
}

Mat2 ao_inv_P(const ModelParams& p, cplx z) { return mat2(1.0, p.a, p.a / z, 1.0); }

SymbolPair symbols(const ModelParams& p) {
    p.validate();
    SymbolPair s;
    s.Ao = [p](cplx z) { return ao_matrix(p, z); };
    s.Ae = [p](cplx z) {
        cplx den = 1.0 - p.a * p.a / z;
        if (std::abs(den) < 1e-14) throw NumericError("Ae: pole at z = a^2");
        return Mat2(ao_inv_P(p, z) / den);
    };
    s.Ae_inv = [p](cplx z) { return mat2(1.0, -p.a, -p.a / z, 1.0); };
    return s;
}

}  // namespace aztec
