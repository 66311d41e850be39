#include "aztec/phase.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace aztec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct QuarticParts {
    Poly L, Rt, zR;
};

template <class T>
std::vector<T> tmul(const std::vector<T>& p, const std::vector<T>& q) {
    std::vector<T> r(p.size() + q.size() - 1, T(0));
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
}

template <class T>
std::vector<T> tadd(std::vector<T> p, const std::vector<T>& q, T s = T(1)) {
    if (p.size() < q.size()) p.resize(q.size(), T(0));
    for (std::size_t i = 0; i < q.size(); ++i) p[i] += s * q[i];
    return p;
}

template <class T>
std::vector<T> tdeflate(const std::vector<T>& p, T r, T* rem) {
    std::size_t n = p.size() - 1;
    std::vector<T> q(n, T(0));
    T carry = p[n];
    for (std::size_t k = n; k-- > 0;) {
        q[k] = carry;
        carry = p[k] + carry * r;
    }
    *rem = carry;
    return q;
}

template <class T>
struct TParts {
    std::vector<T> L, Rt, zR;
};

template <class T>
TParts<T> tparts(const PhasePoint& pp, const PhaseContext& ctx) {
    const T a = ctx.params.a, al = ctx.params.alpha;
    const T a2 = a * a, ia2 = T(1) / a2, t = pp.tau, xi = pp.xi;
    const T g1 = ctx.g.g1, g2 = ctx.g.g2, g3 = ctx.g.g3;
    const T s = al + T(1) / al;
    const T beta = s * s * (T(1) + a2) * (T(1) + a2);
    using V = std::vector<T>;
    V zm{-a2, T(1)}, zp{-ia2, T(1)}, z{T(0), T(1)};
    TParts<T> out;
    out.L = tadd(tmul(V{(1 - t) * a2 * g2, (1 - t) * a2 * g1}, zp), tmul(V{g1, g2}, zm), -t);
    V r{zp[0] * (1 - t) * a2 * g3, zp[1] * (1 - t) * a2 * g3};
    r = tadd(r, tmul(zm, z), -t * g3);
    r = tadd(r, tmul(zm, zp), 1 - t + xi);
    r = tadd(r, tmul(z, zp), -(1 - t));
    out.Rt = r;
    out.zR = {4 * a2, beta - 4 - 4 * a2 * a2, 4 * a2};
    return out;
}

// Quartic coefficients lowest first, plus the two division remainders.
template <class T>
std::vector<T> tquartic(const PhasePoint& pp, const PhaseContext& ctx, T* rem0, T* rem1) {
    auto P = tparts<T>(pp, ctx);
    using V = std::vector<T>;
    V sext = tadd(tmul(V{T(0), T(1)}, tmul(P.L, P.L)), tmul(tmul(P.Rt, P.Rt), P.zR), T(-1));
    sext.resize(7, T(0));
    const T a = ctx.params.a;
    const T a2 = a * a;
    V q = tdeflate(sext, a2, rem0);
    q = tdeflate(q, T(1) / a2, rem1);
    q.resize(5, T(0));
    return q;
}

template <class T>
T tdisc(T a, T b, T c, T d, T e) {
    return 256 * a * a * a * e * e * e - 192 * a * a * b * d * e * e - 128 * a * a * c * c * e * e +
           144 * a * a * c * d * d * e - 27 * a * a * d * d * d * d + 144 * a * b * b * c * e * e -
           6 * a * b * b * d * d * e - 80 * a * b * c * c * d * e + 18 * a * b * c * d * d * d +
           16 * a * c * c * c * c * e - 4 * a * c * c * c * d * d - 27 * b * b * b * b * e * e +
           18 * b * b * b * c * d * e - 4 * b * b * b * d * d * d - 4 * b * b * c * c * c * e +
           b * b * c * c * d * d;
}

QuarticParts quartic_parts(const PhasePoint& pp, const PhaseContext& ctx) {
    auto P = tparts<double>(pp, ctx);
    return {P.L, P.Rt, P.zR};
}

Poly poly_derivative(const Poly& p) {
    if (p.size() < 2) return {0.0};
    Poly d(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * static_cast<double>(k);
    return d;
}

bool on_cut(cplx z, const PhaseContext& ctx) {
    if (z.imag() != 0.0) return false;
    double x = z.real();
    return x < ctx.x1 || (x > ctx.x2 && x < 0.0);
}

cplx adjust(cplx z, Side side) {
    if (z.imag() != 0.0) return z;
    if (side == Side::Plus) return {z.real(), +0.0};
    if (side == Side::Minus) return {z.real(), -0.0};
    return z;
}

cplx sheet_sqrtR(cplx z, int sheet, Side side, const PhaseContext& ctx) {
    return phase_sqrtR({z, sheet, side}, ctx);
}

double rel_close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

void check_pole(cplx z, const PhaseContext& ctx) {
    const double a2 = ctx.params.a * ctx.params.a;
    const std::pair<double, const char*> poles[] = {
        {0.0, "0"}, {a2, "a^2"}, {1.0 / a2, "a^-2"}, {ctx.x1, "x1"}, {ctx.x2, "x2"}};
    for (auto [p, name] : poles)
        if (rel_close(z, p, 1e-12)) throw NumericError(std::string("phi_prime: pole at z = ") + name);
}

std::string dump_roots(const std::vector<cplx>& r) {
    std::ostringstream os;
    os.precision(10);
    for (auto z : r) os << " (" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
    return os.str();
}

}  // namespace

void PhasePoint::validate() const {
    if (!std::isfinite(tau) || !std::isfinite(xi)) throw ValidationError("phase point must be finite");
    if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("tau must lie in (0,1)");
    double s = xi - 0.5 * tau;
    if (!(s > -0.5 && s < 0.0)) throw ValidationError("xi must satisfy -1/2 < xi - tau/2 < 0");
}

PhasePoint PhasePoint::from_qv(double q, double v) { return {(q + v + 1.0) / 2.0, q / 2.0}; }

bool PhasePoint::inside() const {
    double s = xi - 0.5 * tau;
    return tau > 0.0 && tau < 1.0 && s > -0.5 && s < 0.0;
}

GammaConstants gamma_constants(const ModelParams& p, int d) {
    p.validate();
    if (d < 1) throw ValidationError("gamma_constants: d must be >= 1");
    auto per = flow_period(p, d);
    if (!per || d % *per != 0) throw ValidationError("gamma_constants: flow is not periodic with period dividing d");
    FlowFactors f = flow_factors(p, d);
    double s = 0.0, si = 0.0;
    for (const auto& v : f.v) {
        s += v.aval;
        si += 1.0 / v.aval;
    }
    s /= d;
    si /= d;
    double a2 = p.a * p.a;
    GammaConstants g;
    g.g1 = -std::sqrt(s * si);
    g.g2 = -0.5 * (a2 + 1.0) * (p.alpha + 1.0 / p.alpha) - a2 * g.g1;
    g.g3 = 0.5;
    return g;
}

double gamma1_integral(const ModelParams& p) {
    p.validate();
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw ValidationError("gamma1_integral requires 0 < alpha < 1");
    auto [x1, x2] = branch_points(p);
    const double a = p.a, ia2 = 1.0 / (a * a);
    // x = x1 + (x2 - x1) sin^2 t turns dx / sqrt(R) into sqrt(-x)/a dt
    auto weight = [&](double t) {
        double s = std::sin(t);
        double x = x1 + (x2 - x1) * s * s;
        return std::pair{x, std::sqrt(-x) / (a * (x - ia2))};
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double e0 = 0.0, e1 = 0.0;
    double I0 = GK::integrate([&](double t) { return weight(t).second; }, 0.0, M_PI / 2, 15, 1e-15, &e0);
    double I1 = GK::integrate([&](double t) {
        auto [x, w] = weight(t);
        return w / x;
    }, 0.0, M_PI / 2, 15, 1e-15, &e1);
    if (!(e0 <= 1e-10 * std::abs(I0)) || !(e1 <= 1e-10 * std::abs(I1)))
        throw NumericError("gamma1_integral: quadrature did not converge");
    double a2 = a * a;
    double C = 0.5 * (a2 + 1.0) * (p.alpha + 1.0 / p.alpha);
    return C * I0 / (I1 - a2 * I0);
}

PhaseContext PhaseContext::make(const ModelParams& p, int d) {
    PhaseContext ctx;
    ctx.params = p;
    ctx.d = d;
    ctx.g = gamma_constants(p, d);
    double a2 = p.a * p.a, s = p.alpha + 1.0 / p.alpha;
    ctx.beta = s * s * (1.0 + a2) * (1.0 + a2);
    if (p.alpha < 1.0) {
        auto [x1, x2] = branch_points(p);
        ctx.x1 = x1;
        ctx.x2 = x2;
    } else {
        ctx.degenerate = true;
    }
    return ctx;
}

cplx phase_sqrtR(const SheetPoint& sp, const PhaseContext& ctx) {
    if (sp.sheet != 1 && sp.sheet != 2) throw ValidationError("sheet must be 1 or 2");
    if (std::abs(sp.z) == 0.0) throw NumericError("sqrtR: pole at z = 0");
    if (sp.side == Side::None && on_cut(sp.z, ctx)) {
        std::ostringstream os;
        os << "sqrtR: z = " << sp.z.real() << " lies on a cut; a side is required";
        throw ValidationError(os.str());
    }
    cplx w = adjust(sp.z, sp.side);
    cplx s = 2.0 * ctx.params.a * std::sqrt(w - ctx.x1) * std::sqrt(w - ctx.x2) / std::sqrt(w);
    return sp.sheet == 1 ? s : -s;
}

std::array<cplx, 3> phi_prime_parts(const SheetPoint& sp, const PhaseContext& ctx) {
    check_pole(sp.z, ctx);
    const double a2 = ctx.params.a * ctx.params.a;
    const auto& g = ctx.g;
    cplx z = adjust(sp.z, sp.side);
    cplx S = phase_sqrtR(sp, ctx);
    cplx U = a2 * (z * g.g1 + g.g2 + g.g3 * S) / ((z - a2) * z * S);
    cplx V = (g.g1 + g.g2 * z + g.g3 * z * S) / ((z - 1.0 / a2) * z * S);
    cplx A0 = U + 1.0 / z - 1.0 / (z - a2);
    cplx A1 = -U - V - 1.0 / z + 1.0 / (z - a2);
    return {A0, A1, 1.0 / z};
}

cplx phi_prime(const SheetPoint& sp, const PhasePoint& pp, const PhaseContext& ctx) {
    auto A = phi_prime_parts(sp, ctx);
    return static_cast<double>(ctx.d) * (A[0] + pp.tau * A[1] + pp.xi * A[2]);
}

SaddleQuartic saddle_quartic(const PhasePoint& pp, const PhaseContext& ctx) {
    pp.validate();
    long double r0 = 0, r1 = 0;
    auto q = tquartic<long double>(pp, ctx, &r0, &r1);
    SaddleQuartic out;
    out.remainders = {static_cast<double>(r0), static_cast<double>(r1)};
    double scale = 0.0;
    for (int k = 0; k < 5; ++k) {
        out.coeffs[k] = static_cast<double>(q[4 - k]);
        scale = std::max(scale, std::abs(out.coeffs[k]));
    }
    out.degree_drop = std::abs(out.coeffs[0]) <= 1e-12 * scale;
    return out;
}

cplx saddle_residual(const SheetPoint& sp, const PhasePoint& pp, const PhaseContext& ctx) {
    auto P = quartic_parts(pp, ctx);
    cplx S = phase_sqrtR(sp, ctx);
    return poly_eval(P.L, sp.z) + S * poly_eval(P.Rt, sp.z);
}

SaddleSet saddles(const PhasePoint& pp, const PhaseContext& ctx) {
    auto Q = saddle_quartic(pp, ctx);
    if (Q.degree_drop) throw NumericError("saddles: the saddle quartic drops degree at this point");
    Poly c(Q.coeffs.rbegin(), Q.coeffs.rend());
    std::vector<cplx> roots;
    try {
        roots = poly_roots(c);
    } catch (const std::exception& e) {
        throw NumericError(std::string("saddles: root finder failed: ") + e.what());
    }
    if (roots.size() != 4) throw NumericError("saddles: expected four roots");

    auto P = quartic_parts(pp, ctx);
    Poly dL = poly_derivative(P.L), dRt = poly_derivative(P.Rt);
    const double a2 = ctx.params.a * ctx.params.a;
    auto Rfun = [&](cplx z) { return ctx.beta - 4.0 * (1.0 - a2 * z) * (1.0 - a2 / z); };
    auto dR = [&](cplx z) { return 4.0 * a2 * (1.0 - a2 / z) - 4.0 * (1.0 - a2 * z) * a2 / (z * z); };
    auto G = [&](cplx z, int sheet) {
        return poly_eval(P.L, z) + sheet_sqrtR(z, sheet, Side::Plus, ctx) * poly_eval(P.Rt, z);
    };

    SaddleSet out;
    for (int k = 0; k < 4; ++k) {
        cplx z = roots[k];
        if (std::abs(z.imag()) <= 1e-7 * std::max(1.0, std::abs(z))) z = z.real();
        bool near_branch = rel_close(z, ctx.x1, 1e-6) || rel_close(z, ctx.x2, 1e-6);
        int sheet = 1;
        if (!near_branch) {
            sheet = std::abs(G(z, 1)) <= std::abs(G(z, 2)) ? 1 : 2;
            for (int it = 0; it < 60; ++it) {
                cplx S = sheet_sqrtR(z, sheet, Side::Plus, ctx);
                cplx g = poly_eval(P.L, z) + S * poly_eval(P.Rt, z);
                cplx dS = S * dR(z) / (2.0 * Rfun(z));
                cplx dg = poly_eval(dL, z) + dS * poly_eval(P.Rt, z) + S * poly_eval(dRt, z);
                if (dg == 0.0) break;
                cplx step = g / dg;
                cplx zn = z - step;
                if (z.imag() == 0.0) zn = zn.real();
                if (!(std::abs(G(zn, sheet)) <= std::abs(g))) break;
                z = zn;
                if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
            }
        }
        Side side = on_cut(z, ctx) ? Side::Plus : Side::None;
        out.s[k].point = {z, sheet, side};
        out.s[k].residual = near_branch ? 0.0 : std::abs(G(z, sheet));
    }
    for (int k = 0; k < 4; ++k) {
        int m = 0;
        for (int l = 0; l < 4; ++l)
            if (rel_close(out.s[l].point.z, out.s[k].point.z, kCoalesceTol)) ++m;
        out.s[k].multiplicity = m;
    }
    return out;
}

std::string to_string(PhaseClass c) {
    switch (c) {
        case PhaseClass::Frozen: return "Frozen";
        case PhaseClass::Rough: return "Rough";
        case PhaseClass::Smooth: return "Smooth";
        case PhaseClass::RoughSmoothBoundary: return "RoughSmoothBoundary";
        case PhaseClass::RoughFrozenBoundary: return "RoughFrozenBoundary";
    }
    return "unknown";
}

PhaseClass classify_roots(const std::vector<cplx>& roots_in, const PhaseContext& ctx, double tol) {
    std::vector<cplx> r = roots_in;
    if (ctx.degenerate) {
        // x1 = x2 = -1 is a permanent double root
        for (int k = 0; k < 2 && !r.empty(); ++k) {
            auto it = std::min_element(r.begin(), r.end(),
                                       [](cplx a, cplx b) { return std::abs(a + 1.0) < std::abs(b + 1.0); });
            r.erase(it);
        }
    }
    for (auto z : r)
        if (std::abs(z.imag()) > tol * std::max(1.0, std::abs(z))) return PhaseClass::Rough;
    std::vector<double> x;
    for (auto z : r) x.push_back(z.real());
    std::sort(x.begin(), x.end());
    for (std::size_t k = 0; k + 1 < x.size(); ++k)
        if (std::abs(x[k + 1] - x[k]) <= tol * std::max(1.0, std::abs(x[k])))
            return x[k] > 0.0 ? PhaseClass::RoughFrozenBoundary : PhaseClass::RoughSmoothBoundary;
    int c1 = 0, c2 = 0;
    for (double v : x) {
        if (v >= ctx.x1 - tol && v <= ctx.x2 + tol && v < 0.0) ++c1;
        if (v > 0.0) ++c2;
    }
    if (!ctx.degenerate && c1 == 4) return PhaseClass::Smooth;
    if (c2 == 2) return PhaseClass::Frozen;
    throw NumericError("classify: unrecognised saddle pattern; roots" + dump_roots(roots_in));
}

PhaseClass classify(const PhasePoint& pp, const PhaseContext& ctx) {
    auto Q = saddle_quartic(pp, ctx);
    if (Q.degree_drop) throw NumericError("classify: the saddle quartic drops degree at this point");
    Poly c(Q.coeffs.rbegin(), Q.coeffs.rend());
    return classify_roots(poly_roots(c), ctx);
}

double quartic_discriminant(const std::array<double, 5>& q) { return tdisc(q[0], q[1], q[2], q[3], q[4]); }

namespace {

long double degenerate_disc(const PhasePoint& pp, const PhaseContext& ctx) {
    long double r0 = 0, r1 = 0;
    auto q = tquartic<long double>(pp, ctx, &r0, &r1);
    q = tdeflate(tdeflate(q, -1.0L, &r0), -1.0L, &r1);
    return q[1] * q[1] - 4 * q[2] * q[0];
}

}  // namespace

double arctic_implicit(const PhasePoint& pp, const PhaseContext& ctx) {
    pp.validate();
    if (!ctx.degenerate) {
        long double r0 = 0, r1 = 0;
        auto q = tquartic<long double>(pp, ctx, &r0, &r1);
        return static_cast<double>(tdisc(q[4], q[3], q[2], q[1], q[0]));
    }
    // x1 = x2 = -1 is a permanent double root, and the remaining discriminant carries (q + a^2 v)^2
    const double a2 = ctx.params.a * ctx.params.a;
    const double q = pp.q(), v = pp.v();
    auto reduced = [&](double vv) {
        long double l = q + a2 * vv;
        return degenerate_disc(PhasePoint::from_qv(q, vv), ctx) / (l * l);
    };
    if (std::abs(q + a2 * v) > 1e-3) return static_cast<double>(reduced(v));
    // the quotient is quadratic in v: interpolate from nodes v - s, v + s, v + 2s
    const double s = 3e-3 / a2;
    return static_cast<double>(reduced(v - s) / 3 + reduced(v + s) - reduced(v + 2 * s) / 3);
}

std::optional<PhasePoint> arctic_parametric(double z, int sheet, const PhaseContext& ctx) {
    bool onC1 = !ctx.degenerate && z > ctx.x1 && z < ctx.x2;
    if (!(onC1 || z > 0.0)) throw ValidationError("arctic_parametric: z must lie on (x1,x2) or (0,inf)");
    auto A = phi_prime_parts({z, sheet, Side::None}, ctx);
    // complex step: the parts are real on both cycles
    const double h = 1e-20 * std::max(1.0, std::abs(z));
    auto B = phi_prime_parts({cplx(z, h), sheet, Side::None}, ctx);
    double a0 = A[0].real(), a1 = A[1].real(), a2 = A[2].real();
    double b0 = B[0].imag() / h, b1 = B[1].imag() / h, b2 = B[2].imag() / h;
    double det = a1 * b2 - a2 * b1;
    double scale = std::max({std::abs(a1 * b2), std::abs(a2 * b1), 1e-300});
    if (std::abs(det) <= 1e-13 * scale) throw NumericError("arctic_parametric: singular linear system");
    PhasePoint pp{(-a0 * b2 + a2 * b0) / det, (-a1 * b0 + a0 * b1) / det};
    if (!pp.inside()) return std::nullopt;
    return pp;
}

std::vector<ArcticPoint> arctic_curve(const PhaseContext& ctx, int resolution) {
    if (resolution < 16) throw ValidationError("arctic_curve: resolution must be >= 16");
    const int n = resolution;
    auto coord = [&](int i) { return -1.0 + 2.0 * i / n; };
    auto f = [&](double q, double v) {
        PhasePoint pp = PhasePoint::from_qv(q, v);
        if (std::abs(q) + std::abs(v) >= 1.0 - 1e-9 || !pp.inside()) return kNaN;
        return arctic_implicit(pp, ctx);
    };
    std::vector<double> F((n + 1) * (n + 1));
    parallel_for(static_cast<std::size_t>(n + 1), [&](std::size_t i) {
        for (int j = 0; j <= n; ++j) F[i * (n + 1) + j] = f(coord(static_cast<int>(i)), coord(j));
    });
    auto at = [&](int i, int j) { return F[i * (n + 1) + j]; };
    std::vector<ArcticPoint> out;
    auto refine = [&](double q0, double v0, double q1, double v1, double f0, double f1) {
        auto g = [&](double s) { return f(q0 + s * (q1 - q0), v0 + s * (v1 - v0)); };
        std::uintmax_t it = 100;
        auto r = boost::math::tools::toms748_solve(g, 0.0, 1.0, f0, f1,
                                                   boost::math::tools::eps_tolerance<double>(50), it);
        double s = 0.5 * (r.first + r.second);
        out.push_back({q0 + s * (q1 - q0), v0 + s * (v1 - v0)});
    };
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            double f0 = at(i, j);
            if (!std::isfinite(f0)) continue;
            if (i < n && std::isfinite(at(i + 1, j)) && f0 * at(i + 1, j) < 0.0)
                refine(coord(i), coord(j), coord(i + 1), coord(j), f0, at(i + 1, j));
            if (j < n && std::isfinite(at(i, j + 1)) && f0 * at(i, j + 1) < 0.0)
                refine(coord(i), coord(j), coord(i), coord(j + 1), f0, at(i, j + 1));
        }
    return out;
}

std::vector<ArcticPoint> arctic_trace(const PhaseContext& ctx, int samples) {
    if (samples < 16) throw ValidationError("arctic_trace: samples must be >= 16");
    const double a2 = ctx.params.a * ctx.params.a;
    std::vector<double> zs;
    for (int k = 0; k < samples; ++k) zs.push_back(std::exp(-8.0 + 16.0 * (k + 0.5) / samples));
    if (!ctx.degenerate)
        for (int k = 0; k < samples; ++k) {
            double t = std::sin(0.5 * M_PI * (k + 0.5) / samples);
            zs.push_back(ctx.x1 + (ctx.x2 - ctx.x1) * t * t);
        }
    std::vector<ArcticPoint> out;
    for (double z : zs) {
        if (std::abs(z - a2) < 1e-9 * a2 || std::abs(z - 1.0 / a2) < 1e-9 / a2) continue;
        for (int sheet : {1, 2}) {
            try {
                if (auto pp = arctic_parametric(z, sheet, ctx)) out.push_back({pp->q(), pp->v()});
            } catch (const NumericError&) {
            }
        }
    }
    return out;
}

namespace {

struct Term {
    double c;
    int ea, eq, ev;
};

// clang-format off
const Term kOrder6Boundary[] = {
    {16, 0, 0, 0}, {-336, 4, 0, 0}, {1440, 8, 0, 0}, {7776, 12, 0, 0}, {-34992, 16, 0, 0}, {-104976, 20, 0, 0},
    {-288, 0, 2, 0}, {6336, 4, 2, 0}, {-45504, 8, 2, 0}, {124416, 12, 2, 0}, {-209952, 16, 2, 0}, {419904, 20, 2, 0},
    {1296, 0, 4, 0}, {-32400, 4, 4, 0}, {242352, 8, 4, 0}, {-587088, 12, 4, 0}, {839808, 16, 4, 0}, {-629856, 20, 4, 0},
    {23328, 4, 6, 0}, {-303264, 8, 6, 0}, {769824, 12, 6, 0}, {-909792, 16, 6, 0}, {419904, 20, 6, 0},
    {104976, 8, 8, 0}, {-314928, 12, 8, 0}, {314928, 16, 8, 0}, {-104976, 20, 8, 0},
    {-72, 0, 0, 2}, {1152, 4, 0, 2}, {-1224, 8, 0, 2}, {-43200, 12, 0, 2}, {75816, 16, 0, 2}, {419904, 20, 0, 2}, {-157464, 24, 0, 2},
    {1296, 0, 2, 2}, {-20088, 4, 2, 2}, {119880, 8, 2, 2}, {-527472, 12, 2, 2}, {1283040, 16, 2, 2}, {-997272, 20, 2, 2}, {472392, 24, 2, 2},
    {-5832, 0, 4, 2}, {81648, 4, 4, 2}, {-367416, 8, 4, 2}, {863136, 12, 4, 2}, {-833976, 16, 4, 2}, {734832, 20, 4, 2}, {-472392, 24, 4, 2},
    {52488, 4, 6, 2}, {-472392, 8, 6, 2}, {944784, 12, 6, 2}, {-524880, 16, 6, 2}, {-157464, 20, 6, 2}, {157464, 24, 6, 2},
    {81, 0, 0, 4}, {-1215, 4, 0, 4}, {-3483, 8, 0, 4}, {79461, 12, 0, 4}, {-2349, 16, 0, 4}, {-750141, 20, 0, 4}, {570807, 24, 0, 4}, {-59049, 28, 0, 4},
    {-1458, 0, 2, 4}, {21870, 4, 2, 4}, {-158922, 8, 2, 4}, {867510, 12, 2, 4}, {-1963926, 16, 2, 4}, {1418634, 20, 2, 4}, {-301806, 24, 2, 4}, {118098, 28, 2, 4},
    {6561, 0, 4, 4}, {-98415, 4, 4, 4}, {452709, 8, 4, 4}, {-387099, 12, 4, 4}, {-610173, 16, 4, 4}, {964467, 20, 4, 4}, {-269001, 24, 4, 4}, {-59049, 28, 4, 4},
    {5832, 8, 0, 6}, {-52488, 12, 0, 6}, {-128304, 16, 0, 6}, {734832, 20, 0, 6}, {-717336, 24, 0, 6}, {157464, 28, 0, 6},
    {52488, 8, 2, 6}, {-472392, 12, 2, 6}, {944784, 16, 2, 6}, {-524880, 20, 2, 6}, {-157464, 24, 2, 6}, {157464, 28, 2, 6},
    {104976, 16, 0, 8}, {-314928, 20, 0, 8}, {314928, 24, 0, 8}, {-104976, 28, 0, 8},
};
// clang-format on

}  // namespace

double order6_boundary(double a, double q, double v) {
    double s = 0.0;
    for (const auto& t : kOrder6Boundary) s += t.c * std::pow(a, t.ea) * std::pow(q, t.eq) * std::pow(v, t.ev);
    return s;
}

PhaseGrid phase_grid(const PhaseContext& ctx, int resolution) {
    if (resolution < 16) throw ValidationError("phase_grid: resolution must be >= 16");
    const int n = resolution;
    PhaseGrid g;
    g.n = n;
    g.points.resize(static_cast<std::size_t>(n) * n);
    g.cls.resize(g.points.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double tau = (i + 0.5) / n;
            g.points[i * n + j] = {tau, 0.5 * (tau - 1.0) + (j + 0.5) / (2.0 * n)};
        }
    parallel_for(g.points.size(), [&](std::size_t k) { g.cls[k] = classify(g.points[k], ctx); });
    return g;
}

std::vector<FieldSample> phi_field(const PhaseContext& ctx, const PhasePoint& pp, const FieldSpec& spec) {
    pp.validate();
    if (spec.nx < 2 || spec.ny < 2) throw ValidationError("phi_field: need at least 2 samples per axis");
    if (spec.sheet != 1 && spec.sheet != 2) throw ValidationError("phi_field: sheet must be 1 or 2");
    std::vector<FieldSample> out;
    out.reserve(static_cast<std::size_t>(spec.nx) * spec.ny);
    for (int i = 0; i < spec.nx; ++i)
        for (int j = 0; j < spec.ny; ++j) {
            double x = spec.re_min + (spec.re_max - spec.re_min) * i / (spec.nx - 1);
            double y = spec.im_min + (spec.im_max - spec.im_min) * j / (spec.ny - 1);
            FieldSample s{x, y, kNaN, kNaN, kNaN, kNaN};
            try {
                cplx f = phi_prime({cplx(x, y), spec.sheet, y == 0.0 ? Side::Plus : Side::None}, pp, ctx);
                double m = std::abs(f);
                s.re = f.real();
                s.im = f.imag();
                if (m > 0.0 && std::isfinite(m)) {
                    s.ux = f.real() / m;
                    s.uy = -f.imag() / m;
                }
            } catch (const NumericError&) {
            }
            out.push_back(s);
        }
    return out;
}

}  // namespace aztec
