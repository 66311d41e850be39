#include "aztec/curve.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <functional>
#include <map>

namespace aztec {

void CurveParams::validate() const {
    if (!(c1 > 0.0 && c2 > 0.0)) throw ValidationError("curve needs c1 > 0 and c2 > 0");
    if (!(z1 > 0.0 && z1 <= 1.0 && z2 >= 1.0)) throw ValidationError("curve needs 0 < z1 <= 1 <= z2");
}

CurveParams curve_from_model(const ModelParams& p) {
    p.validate();
    double a2 = p.a * p.a;
    return {0.5 * (a2 + 1.0) * (p.alpha + 1.0 / p.alpha), a2, a2, 1.0 / a2};
}

double curve_residual(const CurveParams& c, const CurvePoint& pt) {
    if (pt.infinity) throw ValidationError("identity has no residual");
    double c12 = c.c1 * c.c1;
    return c12 * (pt.y * pt.y - pt.x * pt.x) - c.c2 * pt.x * (pt.x - c.z1) * (pt.x - c.z2);
}

double curve_residual_rel(const CurveParams& c, const CurvePoint& pt) {
    double c12 = c.c1 * c.c1;
    double scale = c12 * (pt.y * pt.y + pt.x * pt.x) +
                   std::abs(c.c2 * pt.x * (pt.x - c.z1) * (pt.x - c.z2));
    return std::abs(curve_residual(c, pt)) / std::max(scale, 1e-300);
}

bool on_curve(const CurveParams& c, const CurvePoint& pt, double tol) {
    return pt.infinity || curve_residual_rel(c, pt) <= tol;
}

bool on_left_oval(const CurveParams& c, const CurvePoint& pt, double tol) {
    return !pt.infinity && pt.x < 0.0 && std::abs(pt.y) <= std::abs(pt.x) * (1.0 + tol) &&
           on_curve(c, pt, tol);
}

CurvePoint negate(const CurvePoint& p) { return p.infinity ? p : CurvePoint::at(p.x, -p.y); }

CurvePoint add_points(const CurveParams& c, const CurvePoint& p, const CurvePoint& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    if (!on_curve(c, p) || !on_curve(c, q))
        throw ValidationError("add_points: input point is not on the curve");
    // y^2 = k x^3 + B x^2 + C x
    double k = c.c2 / (c.c1 * c.c1);
    double B = 1.0 - k * (c.z1 + c.z2);
    double C = k * c.z1 * c.z2;
    double scale = std::max({1.0, std::abs(p.x), std::abs(q.x)});
    double lam;
    if (std::abs(p.x - q.x) > 1e-12 * scale) {
        lam = (q.y - p.y) / (q.x - p.x);
    } else {
        double yscale = std::max({1e-300, std::abs(p.y), std::abs(q.y)});
        if (std::abs(p.y + q.y) <= 1e-12 * yscale || std::abs(p.y) < 1e-300)
            return CurvePoint::identity();
        lam = (3.0 * k * p.x * p.x + 2.0 * B * p.x + C) / (2.0 * p.y);
    }
    double nu = p.y - lam * p.x;
    double x3 = (lam * lam - B) / k - p.x - q.x;
    double y3 = -(lam * x3 + nu);
    return CurvePoint::at(x3, y3);
}

CurvePoint sigma(const CurveParams& c, const CurvePoint& pt) {
    if (pt.infinity) return pt;
    double x = pt.x, y = pt.y;
    double s = x + y;
    if (std::abs(s) <= 1e-12 * std::max(1.0, std::abs(x)))
        return add_points(c, pt, CurvePoint::at(c.z2, c.z2));
    double xm = x - c.z2;
    double nx = c.z2 * (x - c.z1) * (y - x) / (xm * s);
    double ny = c.z2 * (y - x) * (x * x + y * (c.z1 - c.z2) - c.z1 * c.z2) / (xm * xm * s);
    return CurvePoint::at(nx, ny);
}

CurvePoint initial_point(const ModelParams& p) {
    double al2 = p.alpha * p.alpha;
    return CurvePoint::at(-1.0, -(1.0 - al2) / (1.0 + al2));
}

std::vector<CurvePoint> flow_orbit(const ModelParams& p, int n) {
    if (n < 0) throw ValidationError("flow_orbit needs n >= 0");
    CurveParams c = curve_from_model(p);
    std::vector<CurvePoint> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(initial_point(p));
    for (int i = 0; i < n; ++i) out.push_back(sigma(c, out.back()));
    return out;
}

std::optional<int> flow_period(const ModelParams& p, int max_p, double tol) {
    if (max_p < 1) throw ValidationError("flow_period needs max_p >= 1");
    CurveParams c = curve_from_model(p);
    CurvePoint p0 = initial_point(p), pt = p0;
    double scale = std::max(1.0, std::abs(p0.x) + std::abs(p0.y));
    for (int k = 1; k <= max_p; ++k) {
        pt = sigma(c, pt);
        if (std::abs(pt.x - p0.x) + std::abs(pt.y - p0.y) < tol * scale) return k;
    }
    return std::nullopt;
}

double weierstrass_a2(const ModelParams& p) {
    double a2 = p.a * p.a;
    double s = (p.a + 1.0 / p.a) * (p.alpha + 1.0 / p.alpha);
    return -a2 - 1.0 / a2 + 0.25 * s * s;
}

WeierstrassPoint to_weierstrass(const ModelParams& p, const CurvePoint& pt) {
    double s = 0.5 * (p.a + 1.0 / p.a) * (p.alpha + 1.0 / p.alpha);
    return {pt.x, s * pt.y};
}

namespace {

// With mag=true every subtraction becomes an addition of magnitudes, giving the
// rounding scale of the signed evaluation.
double psi_eval(int m, double a2w, double X, double Y, bool mag) {
    double b2 = 4.0 * a2w, b4 = 2.0, b8 = -1.0;
    auto f = [mag](double v) { return mag ? std::abs(v) : v; };
    std::map<int, double> ps;
    ps[0] = 0.0;
    ps[1] = 1.0;
    ps[2] = f(2.0 * Y);
    double X2 = X * X, X3 = X2 * X, X4 = X3 * X;
    ps[3] = f(3.0 * X4) + f(b2 * X3) + f(3.0 * b4 * X2) + f(b8);
    ps[4] = ps[2] * (f(2.0 * X4 * X2) + f(b2 * X4 * X) + f(5.0 * b4 * X4) + f(10.0 * b8 * X2) +
                     f(b2 * b8 * X) + f(b4 * b8));
    double sgn = mag ? 1.0 : -1.0;
    std::function<double(int)> P = [&](int k) -> double {
        auto it = ps.find(k);
        if (it != ps.end()) return it->second;
        int h = k / 2;
        double v;
        if (k % 2) {
            v = P(h + 2) * std::pow(P(h), 3) + sgn * P(h - 1) * std::pow(P(h + 1), 3);
        } else {
            double pm1 = P(h - 1), pp1 = P(h + 1);
            v = P(h) * (P(h + 2) * pm1 * pm1 + sgn * P(h - 2) * pp1 * pp1) / ps[2];
        }
        ps[k] = v;
        return v;
    };
    return P(m);
}

}  // namespace

double division_psi(int m, const ModelParams& p, double X, double Y) {
    if (m < 1) throw ValidationError("division_psi needs m >= 1");
    return psi_eval(m, weierstrass_a2(p), X, Y, false);
}

static WeierstrassPoint translation_point(const ModelParams& p) {
    double z2 = 1.0 / (p.a * p.a);
    return to_weierstrass(p, CurvePoint::at(z2, z2));
}

double torsion_residual(int m, const ModelParams& p) {
    if (m < 2) throw ValidationError("torsion_residual needs m >= 2");
    WeierstrassPoint w = translation_point(p);
    return division_psi(m, p, w.X, w.Y);
}

static double torsion_scale(int m, const ModelParams& p) {
    WeierstrassPoint w = translation_point(p);
    return psi_eval(m, weierstrass_a2(p), w.X, w.Y, true);
}

double torsion_residual_rel(int m, const ModelParams& p) {
    return std::abs(torsion_residual(m, p)) / torsion_scale(m, p);
}

TorsionRoots solve_torsion_alpha(int m, double a) {
    if (m < 4 || m > 8) throw ValidationError("solve_torsion_alpha supports m in 4..8");
    if (!(a > 0.0 && a <= 1.0)) throw ValidationError("a must lie in (0,1]");
    const int n = 4000;
    const double lo = 1e-4, hi = 1.0 - 1e-9;
    std::vector<double> g(n + 1), v(n + 1);
    bool all_zero = true;
    for (int i = 0; i <= n; ++i) {
        g[i] = lo + (hi - lo) * i / n;
        ModelParams p{a, g[i]};
        v[i] = torsion_residual(m, p);
        if (std::abs(v[i]) > 1e-9 * torsion_scale(m, p)) all_zero = false;
    }
    TorsionRoots out;
    if (all_zero) {
        out.all_alpha = true;
        return out;
    }
    auto fn = [&](double al) { return torsion_residual(m, ModelParams{a, al}); };
    for (int i = 0; i < n; ++i) {
        if (v[i] == 0.0 || (v[i] > 0.0) == (v[i + 1] > 0.0)) continue;
        std::uintmax_t iters = 200;
        auto tol = boost::math::tools::eps_tolerance<double>(52);
        auto br = boost::math::tools::toms748_solve(fn, g[i], g[i + 1], v[i], v[i + 1], tol, iters);
        double r = 0.5 * (br.first + br.second);
        // Newton polish with a central-difference slope
        for (int it = 0; it < 3; ++it) {
            double h = 1e-7 * std::max(r, 1e-3);
            double d = (fn(r + h) - fn(r - h)) / (2.0 * h);
            if (d == 0.0 || !std::isfinite(d)) break;
            double step = fn(r) / d;
            if (std::abs(step) > 1e-10) break;
            r -= step;
        }
        auto per = flow_period(ModelParams{a, r}, m);
        if (per && *per == m) out.alphas.push_back(r);
    }
    return out;
}

}  // namespace aztec
