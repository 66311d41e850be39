#include "doctest.h"

#include "aztec/phase.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

using namespace aztec;

namespace {

const double kPi = std::acos(-1.0);

PhaseContext ref_ctx() { return PhaseContext::make(reference_smooth_params(), 6); }

ModelParams order6_at(double a) { return {a, order6_alpha(a * a)}; }

std::vector<PhasePoint> random_points(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    std::vector<PhasePoint> out;
    for (int k = 0; k < n; ++k) {
        double tau = U(rng);
        out.push_back({tau, 0.5 * (tau - 1.0) + 0.5 * U(rng)});
    }
    return out;
}

// Oracle for the cycle integral: (x1, x2) on sheet 1 and back on sheet 2, with x = x1 + (x2-x1) sin^2 t.
double cycle_integral(const PhasePoint& pp, const PhaseContext& ctx) {
    auto f = [&](double t) {
        double s = std::sin(t), c = std::cos(t);
        double x = ctx.x1 + (ctx.x2 - ctx.x1) * s * s;
        cplx d = phi_prime({x, 1}, pp, ctx) - phi_prime({x, 2}, pp, ctx);
        return d.real() * 2.0 * (ctx.x2 - ctx.x1) * s * c;
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, kPi / 2, 5, 1e-14);
}

}  // namespace

TEST_SUITE("phase") {

TEST_CASE("phase point bounds") {
    CHECK_NOTHROW((PhasePoint{0.5, 0.0}.validate()));
    CHECK_THROWS_AS((PhasePoint{0.0, 0.0}.validate()), ValidationError);
    CHECK_THROWS_AS((PhasePoint{0.5, 0.25}.validate()), ValidationError);
    CHECK_THROWS_AS((PhasePoint{0.5, -0.25}.validate()), ValidationError);
    auto pp = PhasePoint::from_qv(0.2, -0.3);
    CHECK(pp.q() == doctest::Approx(0.2));
    CHECK(pp.v() == doctest::Approx(-0.3));
    CHECK(pp.tau == doctest::Approx(0.45));
}

TEST_CASE("gamma constants: order-six closed form and the linear relation") {
    for (double al : {0.5, 0.3, 0.8}) {
        ModelParams p = order6_params(al);
        double a2 = p.a * p.a;
        auto g = gamma_constants(p, 6);
        CHECK(g.g1 == doctest::Approx(-1.0 / (6 * a2 * a2) + 0.5).epsilon(1e-10));
        CHECK(g.g2 == doctest::Approx(-1.0 / (3 * a2)).epsilon(1e-10));
        CHECK(g.g3 == 0.5);
        CHECK(std::abs(g.g2 + a2 * g.g1 + 0.5 * (a2 + 1) * (al + 1 / al)) < 1e-12);
    }
    ModelParams flat{0.6, 1.0};
    CHECK(gamma_constants(flat, 1).g1 == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(gamma_constants({0.7, 0.6}, 6), ValidationError);
}

TEST_CASE("gamma1 from the cycle integrals matches the orbit averages") {
    std::vector<std::pair<ModelParams, int>> cases{
        {order6_params(0.5), 6}, {order6_params(0.3), 6}, {{1.0, 0.5}, 4}, {{1.0, 0.3}, 4}};
    for (auto& [p, d] : cases) {
        double gi = gamma1_integral(p);
        CHECK(gi < 0.0);
        CHECK(std::abs(gi - gamma_constants(p, d).g1) < 1e-8);
    }
    CHECK_THROWS_AS(gamma1_integral({0.6, 1.0}), ValidationError);
}

TEST_CASE("saddle points at the smooth reference point") {
    auto ctx = ref_ctx();
    CHECK(std::abs(ctx.x1 - -2.01885) < 5e-6);
    CHECK(std::abs(ctx.x2 - -0.495331) < 5e-6);
    auto S = saddles({0.5, 0.0}, ctx);
    std::vector<std::pair<double, int>> want{{-1.97156, 1}, {-0.833032, 1}, {-0.507212, 2}, {-1.20043, 2}};
    for (auto [z, sheet] : want) {
        int hits = 0;
        for (const auto& s : S.s)
            if (std::abs(s.point.z - z) < 5e-6 && s.point.sheet == sheet) ++hits;
        CHECK(hits == 1);
    }
    for (const auto& s : S.s) {
        CHECK(s.point.z.imag() == 0.0);
        CHECK(s.point.z.real() > ctx.x1);
        CHECK(s.point.z.real() < ctx.x2);
        CHECK(s.multiplicity == 1);
        // closed under z -> 1/z at the symmetric point
        double best = 1e9;
        for (const auto& t : S.s) best = std::min(best, std::abs(1.0 / s.point.z - t.point.z));
        CHECK(best < 1e-9);
    }
    CHECK(classify({0.5, 0.0}, ctx) == PhaseClass::Smooth);
}

TEST_CASE("saddle quartic remainders and residuals") {
    auto ctx = ref_ctx();
    const double a2 = ctx.params.a * ctx.params.a;
    for (const auto& pp : random_points(30, 7)) {
        auto Q = saddle_quartic(pp, ctx);
        double scale = 0.0;
        for (double c : Q.coeffs) scale = std::max(scale, std::abs(c));
        CHECK(std::abs(Q.remainders[0]) < 1e-10 * scale);
        CHECK(std::abs(Q.remainders[1]) < 1e-10 * scale);
        auto S = saddles(pp, ctx);
        int count = 0;
        for (const auto& s : S.s) {
            count += 1;
            const double tol = 1e-10 * std::max(1.0, std::norm(s.point.z));
            CHECK(s.residual < tol);
            CHECK(std::abs(saddle_residual(s.point, pp, ctx)) < tol);
            CHECK(std::abs(s.point.z - a2) > 1e-6);
            CHECK(std::abs(s.point.z - 1.0 / a2) > 1e-6);
        }
        CHECK(count == 4);
    }
}

TEST_CASE("near the rough region a conjugate pair leaves the real axis") {
    auto ctx = ref_ctx();
    PhasePoint pp{0.5, 0.2};
    auto S = saddles(pp, ctx);
    int off = 0;
    for (const auto& s : S.s)
        if (std::abs(s.point.z.imag()) > 1e-6) ++off;
    CHECK(off == 2);
    CHECK(classify(pp, ctx) == PhaseClass::Rough);
    CHECK(arctic_implicit(pp, ctx) < 0.0);
}

TEST_CASE("phi_prime: finite differences of log mu and log nu") {
    ModelParams p = reference_smooth_params();
    auto ctx = PhaseContext::make(p, 6);
    auto sc = SpectralContext::make(p, 6);
    const double a2 = p.a * p.a, h = 1e-5;
    for (const auto& pp : random_points(5, 11))
        for (cplx z : {cplx(-1.0, 0.3), cplx(0.7, 0.4), cplx(-3.0, -1.0), cplx(2.0, 1.5)})
            for (int sheet : {1, 2}) {
                auto logs = [&](cplx w) {
                    auto [m, n] = mu_nu_of({w, sheet}, sc);
                    return std::pair{std::log(m), std::log(n)};
                };
                auto [m1, n1] = logs(z + h);
                auto [m0, n0] = logs(z - h);
                cplx fd = (1 - pp.tau) * (m1 - m0) / (2 * h) - pp.tau * (n1 - n0) / (2 * h) +
                          6.0 * (1 - pp.tau + pp.xi) / z - 6.0 * (1 - pp.tau) / (z - a2);
                CHECK(std::abs(phi_prime({z, sheet}, pp, ctx) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
            }
}

TEST_CASE("phi_prime poles") {
    auto ctx = ref_ctx();
    const double a2 = ctx.params.a * ctx.params.a;
    PhasePoint pp{0.4, -0.05};
    auto residue = [&](cplx p, int sheet, double eps) {
        cplx z = p + eps * cplx(0.6, 0.8);
        return (z - p) * phi_prime({z, sheet}, pp, ctx);
    };
    for (auto [p, sheet] : {std::pair{cplx(0.0), 1}, std::pair{cplx(0.0), 2}, std::pair{cplx(a2), 1},
                            std::pair{cplx(1.0 / a2), 2}}) {
        // corrections near 0 are O(eps^1/2)
        cplx r1 = residue(p, sheet, 1e-9), r2 = residue(p, sheet, 1e-11);
        CHECK(std::abs(r1) > 1e-3);
        CHECK(std::abs(r1 - r2) < 1e-3 * std::abs(r2));
    }
    // removable on the other sheet
    CHECK(std::abs(residue(a2, 2, 1e-7)) < 1e-5);
    CHECK(std::abs(residue(1.0 / a2, 1, 1e-7)) < 1e-5);
    for (int sheet : {1, 2}) {
        // z Phi' -> d (xi - tau/2), with an O(|z|^-1/2) correction
        const double lim = ctx.d * (pp.xi - pp.tau / 2);
        for (double r : {1e6, 1e10}) {
            cplx z(0.6 * r, 0.8 * r);
            CHECK(std::abs(z * phi_prime({z, sheet}, pp, ctx) - lim) < 20.0 / std::sqrt(r));
        }
    }
    CHECK_THROWS_AS(phi_prime({a2, 1}, pp, ctx), NumericError);
    CHECK_THROWS_AS(phi_prime({0.0, 2}, pp, ctx), NumericError);
    CHECK_THROWS_AS(phi_prime({-0.3, 1}, pp, ctx), ValidationError);
    CHECK_NOTHROW(phi_prime({-0.3, 1, Side::Plus}, pp, ctx));
}

TEST_CASE("cycle condition on C1") {
    for (double al : {0.7382753787, 0.5}) {
        auto ctx = PhaseContext::make(order6_params(al), 6);
        for (const auto& pp : random_points(20, 3)) CHECK(std::abs(cycle_integral(pp, ctx)) < 1e-8);
    }
    auto ctx4 = PhaseContext::make({1.0, 0.5}, 4);
    for (const auto& pp : random_points(5, 5)) CHECK(std::abs(cycle_integral(pp, ctx4)) < 1e-8);
}

TEST_CASE("classification from constructed roots") {
    auto ctx = ref_ctx();
    CHECK(classify_roots({-1.5, -1.5 + 1e-9, -0.8, -0.6}, ctx) == PhaseClass::RoughSmoothBoundary);
    CHECK(classify_roots({0.5, 0.5 + 1e-9, -1.0, -1.3}, ctx) == PhaseClass::RoughFrozenBoundary);
    CHECK(classify_roots({cplx(-1.0, 1e-3), cplx(-1.0, -1e-3), -0.8, -0.6}, ctx) == PhaseClass::Rough);
    CHECK(classify_roots({-1.9, -1.5, -0.8, -0.6}, ctx) == PhaseClass::Smooth);
    CHECK(classify_roots({0.3, 2.0, -1.5, -0.8}, ctx) == PhaseClass::Frozen);
    CHECK_THROWS_AS(classify_roots({-5.0, -6.0, -0.8, -0.6}, ctx), NumericError);
}

TEST_CASE("printed order-six boundary: reductions") {
    const double a3 = 1.0 / std::sqrt(3.0);
    for (auto [q, v] : {std::pair{0.1, 0.3}, std::pair{-0.4, 0.2}, std::pair{0.25, -0.6}}) {
        double want = 2048.0 / 729.0 * std::pow(3 * q * q + v * v, 3) * (12 * q * q + 4 * v * v - 3);
        CHECK(order6_boundary(a3, q, v) == doctest::Approx(want).epsilon(1e-9));
        double rect = std::pow(1 - 9 * q * q, 2) * std::pow(4 - 9 * v * v, 2);
        CHECK(order6_boundary(0.0, q, v) == doctest::Approx(rect).epsilon(1e-12));
    }
}

TEST_CASE("traced boundary agrees with the printed degree-eight curve") {
    for (double a : {0.3, 0.4, 0.55, std::sqrt(1.0 / 3 - 1.0 / 100)}) {
        auto ctx = PhaseContext::make(order6_at(a), 6);
        auto pts = arctic_trace(ctx, 200);
        CHECK(pts.size() >= 200);
        double worst = 0.0;
        for (const auto& p : pts) worst = std::max(worst, std::abs(order6_boundary(a, p.q, p.v)));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("marching squares lands near the printed degree-eight curve") {
    for (double a : {0.4, 0.55}) {
        auto ctx = PhaseContext::make(order6_at(a), 6);
        auto pts = arctic_curve(ctx, 96);
        CHECK(pts.size() >= 200);
        int close = 0;
        double worst = 0.0;
        for (const auto& p : pts) {
            const double h = 1e-6;
            double gq = (order6_boundary(a, p.q + h, p.v) - order6_boundary(a, p.q - h, p.v)) / (2 * h);
            double gv = (order6_boundary(a, p.q, p.v + h) - order6_boundary(a, p.q, p.v - h)) / (2 * h);
            double dist = std::abs(order6_boundary(a, p.q, p.v)) / std::max(std::hypot(gq, gv), 1e-3);
            worst = std::max(worst, dist);
            if (dist < 1e-6) ++close;
        }
        CHECK(close >= 0.9 * pts.size());
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("classification follows the sign of the printed curve") {
    const double a = 0.4;
    auto ctx = PhaseContext::make(order6_at(a), 6);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    int sgn = 0, n = 0;
    while (n < 100) {
        double q = U(rng), v = U(rng);
        if (std::abs(q) + std::abs(v) > 0.95) continue;
        PhasePoint pp = PhasePoint::from_qv(q, v);
        double disc = arctic_implicit(pp, ctx), pr = order6_boundary(a, q, v);
        if (std::abs(pr) < 1e-6) continue;
        int s = (disc > 0) == (pr > 0) ? 1 : -1;
        if (sgn == 0) sgn = s;
        CHECK(s == sgn);
        CHECK((classify(pp, ctx) == PhaseClass::Rough) == (disc < 0));
        ++n;
    }
    PhasePoint corner = PhasePoint::from_qv(0.32, 0.65);
    auto c = classify(corner, ctx);
    CHECK((c == PhaseClass::Frozen || c == PhaseClass::Rough));
    bool rough_side = (order6_boundary(a, 0.32, 0.65) > 0) == (sgn * arctic_implicit(corner, ctx) > 0) &&
                      arctic_implicit(corner, ctx) < 0;
    CHECK((c == PhaseClass::Rough) == rough_side);
}

TEST_CASE("alpha = 1: the boundary is the ellipse") {
    auto ctx = PhaseContext::make(order6_params(1.0), 6);
    CHECK(ctx.degenerate);
    auto on_ellipse = [](const ArcticPoint& p) {
        return std::abs(12 * p.q * p.q + 4 * p.v * p.v - 3) / std::hypot(24 * p.q, 8 * p.v);
    };
    auto pts = arctic_curve(ctx, 96);
    CHECK(pts.size() >= 150);
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, on_ellipse(p));
    CHECK(worst < 1e-6);
    auto traced = arctic_trace(ctx, 200);
    CHECK(traced.size() > 100);
    worst = 0.0;
    for (const auto& p : traced) worst = std::max(worst, on_ellipse(p));
    CHECK(worst < 1e-9);
}

TEST_CASE("alpha -> 0: the boundary approaches the rectangle") {
    double al = 0.01;
    ModelParams p = order6_params(al);
    auto ctx = PhaseContext::make(p, 6);
    auto pts = arctic_curve(ctx, 48);
    CHECK(pts.size() > 20);
    for (const auto& pt : pts) {
        double d = std::min(std::abs(std::abs(pt.q) - 1.0 / 3), std::abs(std::abs(pt.v) - 2.0 / 3));
        CHECK(d < 0.02);
    }
}

TEST_CASE("parametric boundary lies on the implicit curve and is symmetric") {
    auto ctx = ref_ctx();
    int used = 0;
    for (int k = 1; k < 40; ++k) {
        double z = ctx.x1 + (ctx.x2 - ctx.x1) * k / 40.0;
        for (int sheet : {1, 2}) {
            auto pp = arctic_parametric(z, sheet, ctx);
            if (!pp) continue;
            ++used;
            CHECK(std::abs(arctic_implicit(*pp, ctx)) < 1e-10);
            auto mirror = arctic_parametric(1.0 / z, 3 - sheet, ctx);
            REQUIRE(mirror.has_value());
            CHECK(std::abs(mirror->q() + pp->q()) < 1e-9);
            CHECK(std::abs(mirror->v() + pp->v()) < 1e-9);
        }
    }
    for (double z : {0.2, 0.8, 1.7, 2.6}) {
        auto pp = arctic_parametric(z, 1, ctx);
        if (pp) CHECK(std::abs(arctic_implicit(*pp, ctx)) < 1e-10);
    }
    CHECK(used > 40);
    CHECK_THROWS_AS(arctic_parametric(-0.2, 1, ctx), ValidationError);
}

TEST_CASE("phase grid") {
    auto ctx = ref_ctx();
    const int n = 16;
    auto g = phase_grid(ctx, n);
    REQUIRE(g.cls.size() == static_cast<std::size_t>(n * n));
    auto at = [&](int i, int j) { return g.cls[i * n + j]; };
    CHECK(at(n / 2, n / 2) == PhaseClass::Smooth);
    CHECK(at(n / 2 - 1, n / 2 - 1) == PhaseClass::Smooth);
    for (auto [i, j] : {std::pair{0, 0}, std::pair{0, n - 1}, std::pair{n - 1, 0}, std::pair{n - 1, n - 1}})
        CHECK(at(i, j) == PhaseClass::Frozen);
    // (tau, xi) -> (1 - tau, -xi)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK(at(i, j) == at(n - 1 - i, n - 1 - j));
    // a class change between neighbours crosses the discriminant zero set
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (auto [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
                if (i + di >= n || j + dj >= n || at(i, j) == at(i + di, j + dj)) continue;
                double f0 = arctic_implicit(g.points[i * n + j], ctx);
                double f1 = arctic_implicit(g.points[(i + di) * n + j + dj], ctx);
                CHECK(f0 * f1 < 0.0);
            }
    CHECK_THROWS_AS(phase_grid(ctx, 8), ValidationError);
}

TEST_CASE("phi field samples") {
    auto ctx = ref_ctx();
    FieldSpec spec;
    spec.nx = 21;
    spec.ny = 11;
    auto f = phi_field(ctx, {0.5, 0.0}, spec);
    CHECK(f.size() == 231u);
    int finite = 0;
    for (const auto& s : f)
        if (std::isfinite(s.ux)) {
            ++finite;
            CHECK(std::hypot(s.ux, s.uy) == doctest::Approx(1.0));
            CHECK(s.ux * s.re - s.uy * s.im > 0.0);
        }
    CHECK(finite > 200);
}

}  // TEST_SUITE
