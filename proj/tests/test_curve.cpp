#include "doctest.h"

#include "aztec/curve.hpp"

#include <cmath>
#include <random>

using namespace aztec;

namespace {

double dist(const CurvePoint& p, double x, double y) { return std::hypot(p.x - x, p.y - y); }

// Root in (0,1) of A al^2 + B al + C = 0 by the quadratic formula.
double small_root(double A, double B, double C) {
    double disc = B * B - 4 * A * C;
    double r1 = (-B - std::sqrt(disc)) / (2 * A), r2 = (-B + std::sqrt(disc)) / (2 * A);
    return (r1 > 0 && r1 < 1) ? r1 : r2;
}

}  // namespace

TEST_SUITE("curve") {

TEST_CASE("curve_from_model examples") {
    auto c = curve_from_model({1.0, 1.0});
    CHECK(c.c1 == doctest::Approx(2.0));
    CHECK(c.c2 == doctest::Approx(1.0));
    CHECK(c.z1 == doctest::Approx(1.0));
    CHECK(c.z2 == doctest::Approx(1.0));

    c = curve_from_model({1.0, 0.5});
    CHECK(c.c1 == doctest::Approx(2.5));

    // a^2 = 1/3 forces alpha^2 - 2 alpha + 1 = 0, alpha = 1
    double al = small_root(1.0 / 3, 1.0 / 3 - 1, 1.0 / 3);
    CHECK(al == doctest::Approx(1.0).epsilon(1e-6));
    c = curve_from_model({std::sqrt(1.0 / 3), 1.0});
    CHECK(c.c2 == doctest::Approx(1.0 / 3));
    CHECK(c.z1 == doctest::Approx(1.0 / 3));
    CHECK(c.z2 == doctest::Approx(3.0));
    CHECK(c.c1 == doctest::Approx(4.0 / 3));
}

TEST_CASE("residual vanishes at the named points") {
    for (double a : {0.3, 0.7, 1.0})
        for (double al : {0.2, 0.6, 1.0}) {
            ModelParams p{a, al};
            auto c = curve_from_model(p);
            CHECK(curve_residual_rel(c, initial_point(p)) < 1e-14);
            CHECK(curve_residual(c, CurvePoint::at(0, 0)) == 0.0);
            double z2 = 1 / (a * a);
            CHECK(curve_residual_rel(c, CurvePoint::at(z2, z2)) < 1e-14);
        }
    CHECK_THROWS_AS(curve_residual(curve_from_model({0.5, 0.5}), CurvePoint::identity()),
                    ValidationError);
}

TEST_CASE("group law examples") {
    ModelParams p{0.6, 0.4};
    auto c = curve_from_model(p);
    auto q = initial_point(p);
    auto r = add_points(c, q, CurvePoint::identity());
    CHECK(dist(r, q.x, q.y) == 0.0);
    CHECK(add_points(c, q, negate(q)).infinity);

    double a2 = p.a * p.a;
    auto s = add_points(c, CurvePoint::at(a2, a2), CurvePoint::at(1 / a2, 1 / a2));
    CHECK(dist(s, 0, 0) < 1e-12);

    auto c1 = curve_from_model({1.0, 0.5});
    auto d = add_points(c1, CurvePoint::at(1, 1), CurvePoint::at(1, 1));
    CHECK(dist(d, 0, 0) < 1e-12);

    CHECK_THROWS_AS(add_points(c, CurvePoint::at(-1, 0.9), q), ValidationError);
}

TEST_CASE("sigma examples") {
    for (double al : {0.3, 0.5, 0.9}) {
        double s = (1 - al * al) / (1 + al * al);
        auto c = curve_from_model({1.0, al});
        CHECK(dist(sigma(c, CurvePoint::at(-1, -s)), -al * al, 0) < 1e-13);

        auto p6 = order6_params(al);
        auto c6 = curve_from_model(p6);
        auto r = sigma(c6, CurvePoint::at(-1, -s));
        CHECK(dist(r, -al * al, (-al * al + al * al * al) / (1 + al)) < 1e-12);
    }
    auto c = curve_from_model({0.7, 1.0});
    CHECK(dist(sigma(c, CurvePoint::at(-1, 0)), -1, 0) < 1e-14);
}

TEST_CASE("order-4 and order-6 orbits") {
    for (double al : {0.25, 0.5, 0.8}) {
        double s = (1 - al * al) / (1 + al * al);
        auto o = flow_orbit({1.0, al}, 4);
        REQUIRE(o.size() == 5);
        CHECK(dist(o[1], -al * al, 0) < 1e-12);
        CHECK(dist(o[2], -1, s) < 1e-12);
        CHECK(dist(o[3], -1 / (al * al), 0) < 1e-12);
        CHECK(dist(o[4], -1, -s) < 1e-12);

        auto o6 = flow_orbit(order6_params(al), 6);
        double t = (al * al - al * al * al) / (1 + al);
        double u = (1 - al) / (al * al + al * al * al);
        CHECK(dist(o6[1], -al * al, -t) < 1e-11);
        CHECK(dist(o6[2], -al * al, t) < 1e-11);
        CHECK(dist(o6[3], -1, s) < 1e-11);
        CHECK(dist(o6[4], -1 / (al * al), u) < 1e-10);
        CHECK(dist(o6[5], -1 / (al * al), -u) < 1e-10);
        CHECK(dist(o6[6], -1, -s) < 1e-10);
    }
    auto o = flow_orbit({0.4, 1.0}, 3);
    for (auto& q : o) CHECK(dist(q, -1, 0) < 1e-14);
}

TEST_CASE("flow_period") {
    CHECK(flow_period({1.0, 0.5}, 20).value() == 4);
    CHECK(flow_period(order6_params(0.5), 20).value() == 6);
    CHECK(flow_period({0.6, 1.0}, 20).value() == 1);
    CHECK_FALSE(flow_period({0.55, 0.5}, 30).has_value());
}

TEST_CASE("division polynomial examples") {
    ModelParams p{0.5, 0.4};
    CHECK(division_psi(1, p, 0.3, 0.7) == 1.0);
    CHECK(division_psi(2, p, 0.3, 0.7) == doctest::Approx(1.4));
    CHECK_THROWS_AS(division_psi(0, p, 0.3, 0.7), ValidationError);
    for (double al : {0.2, 0.5, 0.8}) {
        CHECK(torsion_residual_rel(6, order6_params(al)) < 1e-12);
        CHECK(torsion_residual_rel(4, {1.0, al}) < 1e-12);
    }
    // m = 8 relation a - al + a^2 al + a al^2 = 0
    double a = 0.3;
    double al8 = small_root(a, a * a - 1, a);
    CHECK(torsion_residual_rel(8, {a, al8}) < 1e-10);
    // no order-3 points anywhere in the open square
    for (int i = 1; i < 40; ++i)
        for (int j = 1; j < 40; ++j) CHECK(torsion_residual_rel(3, {i / 40.0, j / 40.0}) > 1e-6);
}

TEST_CASE("solve_torsion_alpha") {
    auto r6 = solve_torsion_alpha(6, std::sqrt(0.3));
    REQUIRE(r6.alphas.size() == 1);
    CHECK(r6.alphas[0] == doctest::Approx(small_root(0.3, -0.7, 0.3)).epsilon(1e-12));

    CHECK(solve_torsion_alpha(4, 1.0).all_alpha);

    auto r8 = solve_torsion_alpha(8, 0.3);
    REQUIRE(r8.alphas.size() == 1);
    CHECK(r8.alphas[0] == doctest::Approx(small_root(0.3, 0.09 - 1, 0.3)).epsilon(1e-10));
    // the m = 8 relation has no real root once a > sqrt(2) - 1
    CHECK(solve_torsion_alpha(8, 0.5).alphas.empty());

    // printed m = 5 relation (sign of the a^2 al^4 term corrected) and m = 7 relation
    auto rel5 = [](double a, double al) {
        double a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
        return -a4 + al - a2 * al + al * al - 2 * a2 * al * al - 2 * a4 * al * al +
               std::pow(al, 3) * (1 + a2 - 3 * a4 + a6) + std::pow(al, 4) * (1 - 2 * a2 - 2 * a4) +
               std::pow(al, 5) * (1 - a2) - a4 * std::pow(al, 6);
    };
    auto rel7 = [](double a, double l) {
        auto P = [](double v, int k) { return std::pow(v, k); };
        return P(a,4) + P(a,4)*l - P(a,6)*l + P(a,8)*l - P(a,10)*l + 5*P(a,4)*P(l,2) + 2*P(a,6)*P(l,2) - P(a,8)*P(l,2) - P(l,3) + 3*P(a,2)*P(l,3) - P(a,4)*P(l,3) + 5*P(a,6)*P(l,3) - 4*P(a,8)*P(l,3) - 2*P(a,10)*P(l,3) - P(l,4) + 4*P(a,2)*P(l,4) + 5*P(a,4)*P(l,4) + 12*P(a,6)*P(l,4) - 5*P(a,8)*P(l,4) - P(l,5) - P(a,2)*P(l,5) + 12*P(a,4)*P(l,5) - 7*P(a,8)*P(l,5) - 3*P(a,10)*P(l,5) - P(l,6) + 2*P(a,2)*P(l,6) + 17*P(a,4)*P(l,6) + 7*P(a,8)*P(l,6) - 6*P(a,10)*P(l,6) + P(a,12)*P(l,6) - P(l,7) - P(a,2)*P(l,7) + 12*P(a,4)*P(l,7) - 7*P(a,8)*P(l,7) - 3*P(a,10)*P(l,7) - P(l,8) + 4*P(a,2)*P(l,8) + 5*P(a,4)*P(l,8) + 12*P(a,6)*P(l,8) - 5*P(a,8)*P(l,8) - P(l,9) + 3*P(a,2)*P(l,9) - P(a,4)*P(l,9) + 5*P(a,6)*P(l,9) - 4*P(a,8)*P(l,9) - 2*P(a,10)*P(l,9) + 5*P(a,4)*P(l,10) + 2*P(a,6)*P(l,10) - P(a,8)*P(l,10) + P(a,4)*P(l,11) - P(a,6)*P(l,11) + P(a,8)*P(l,11) - P(a,10)*P(l,11) + P(a,4)*P(l,12);
    };
    for (double a : {0.3, 0.5, 0.7}) {
        auto r5 = solve_torsion_alpha(5, a);
        REQUIRE_FALSE(r5.alphas.empty());
        for (double al : r5.alphas) CHECK(std::abs(rel5(a, al)) < 1e-10);
        auto r7 = solve_torsion_alpha(7, a);
        for (double al : r7.alphas) CHECK(std::abs(rel7(a, al)) < 1e-9);
    }
}

TEST_CASE("property: flowed points stay on the curve and on the left oval") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.05, 1.0);
    int count = 0;
    while (count < 1000) {
        ModelParams p{U(rng), U(rng)};
        auto c = curve_from_model(p);
        auto orbit = flow_orbit(p, 100);
        for (auto& q : orbit) {
            CHECK(curve_residual_rel(c, q) < 1e-9);
            CHECK(on_left_oval(c, q));
        }
        count += 100;
    }
}

TEST_CASE("property: sigma equals translation by (z2,z2)") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.1, 0.95);
    for (int t = 0; t < 40; ++t) {
        ModelParams p{U(rng), U(rng)};
        auto c = curve_from_model(p);
        auto orbit = flow_orbit(p, 10);
        CurvePoint T = CurvePoint::at(c.z2, c.z2);
        for (auto& q : orbit) {
            auto s1 = sigma(c, q), s2 = add_points(c, q, T);
            CHECK(dist(s1, s2.x, s2.y) < 1e-10 * std::max(1.0, std::abs(s1.x)));
        }
    }
}

TEST_CASE("property: commutativity and associativity on orbit triples") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.2, 0.9);
    for (int t = 0; t < 20; ++t) {
        ModelParams p{U(rng), U(rng)};
        auto c = curve_from_model(p);
        auto o = flow_orbit(p, 6);
        for (int i = 0; i + 2 < 7; ++i) {
            auto P = o[i], Q = o[i + 1], R = o[i + 2];
            auto pq = add_points(c, P, Q), qp = add_points(c, Q, P);
            CHECK(dist(pq, qp.x, qp.y) < 1e-10 * std::max(1.0, std::abs(pq.x)));
            auto l = add_points(c, pq, R), r = add_points(c, P, add_points(c, Q, R));
            double sc = std::max(1.0, std::abs(l.x) + std::abs(l.y));
            CHECK(dist(l, r.x, r.y) < 1e-8 * sc);
        }
    }
}

TEST_CASE("property: flow period equals first vanishing division polynomial") {
    for (double al : {0.2, 0.45, 0.7}) {
        ModelParams p4{1.0, al};
        CHECK(flow_period(p4, 12).value() == 4);
        for (int m = 2; m < 4; ++m) CHECK(torsion_residual_rel(m, p4) > 1e-6);
        CHECK(torsion_residual_rel(4, p4) < 1e-12);

        auto p6 = order6_params(al);
        CHECK(flow_period(p6, 12).value() == 6);
        for (int m = 2; m < 6; ++m) CHECK(torsion_residual_rel(m, p6) > 1e-6);
        CHECK(torsion_residual_rel(6, p6) < 1e-12);
    }
}

}
