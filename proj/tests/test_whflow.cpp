#include "doctest.h"

#include "aztec/whflow.hpp"

#include <cmath>
#include <random>

using namespace aztec;

namespace {

const double kPi = std::acos(-1.0);

cplx unit(int k, int n) { return std::polar(1.0, 2 * kPi * (k + 0.5) / n); }

double coeff_gap(const LaurentMatrix& A, const LaurentMatrix& B) {
    double g = 0;
    for (auto [x, y] : {std::pair{A.a11, B.a11}, {A.a12, B.a12}, {A.a21, B.a21}, {A.a22, B.a22},
                        {A.b12, B.b12}, {A.b21, B.b21}})
        g = std::max(g, std::abs(x - y) / std::max(1.0, std::abs(y)));
    return g;
}

// Two-factor product from the first step of the factorization scheme.
Mat2 two_factor_P(double a, double al, cplx z) {
    Mat2 f1 = mat2(al, a * al * z, a / al, 1 / al);
    Mat2 f2 = mat2(1, a, a / z, 1);
    return f1 * f2;
}

}  // namespace

TEST_SUITE("whflow") {

TEST_CASE("model_P examples") {
    auto P = model_P({1.0, 0.5});
    CHECK(P.a11 == doctest::Approx(1.0));
    CHECK(P.a22 == doctest::Approx(4.0));
    CHECK(P.a12 == doctest::Approx(0.5));
    CHECK(P.b12 == doctest::Approx(0.5));
    CHECK(P.a21 == doctest::Approx(2.0));
    CHECK(P.b21 == doctest::Approx(2.0));

    auto S = model_P({0.6, 1.0});
    CHECK(S.a12 == doctest::Approx(0.6));
    CHECK(S.a21 == doctest::Approx(0.6));
    CHECK(S.a11 == doctest::Approx(S.a22));

    for (double a : {0.3, 0.8})
        for (double al : {0.4, 0.9}) {
            auto Q = model_P({a, al});
            CHECK(Q.trace() == doctest::Approx(2 * curve_from_model({a, al}).c1));
            for (int k = 0; k < 8; ++k) {
                cplx z = unit(k, 8) * 1.3;
                CHECK((Q.eval(z) - two_factor_P(a, al, z)).norm() < 1e-14);
            }
        }
}

TEST_CASE("class_params") {
    for (double a : {0.3, 0.8})
        for (double al : {0.4, 1.0}) {
            auto c = class_params(model_P({a, al}));
            auto r = curve_from_model({a, al});
            CHECK(c.c1 == doctest::Approx(r.c1));
            CHECK(c.c2 == doctest::Approx(r.c2));
            CHECK(c.z1 == doctest::Approx(r.z1));
            CHECK(c.z2 == doctest::Approx(r.z2));
            CHECK(std::abs(model_P({a, al}).eval(c.z1).determinant()) < 1e-13);
        }
    auto c = class_params(model_P({0.5, 1.0}));
    CHECK(c.z1 * c.z2 == doctest::Approx(1.0));
    LaurentMatrix bad{1, 1, 1, 1, 1, 1};
    CHECK_THROWS_AS(class_params(bad), ValidationError);
}

TEST_CASE("pi_map and pi_inverse") {
    for (double a : {0.4, 0.9})
        for (double al : {0.3, 0.7}) {
            ModelParams p{a, al};
            auto c = curve_from_model(p);
            auto P = pi_map(a * al, initial_point(p), c);
            CHECK(coeff_gap(P, model_P(p)) < 1e-12);
            auto [u, pt] = pi_inverse(model_P(p));
            CHECK(u == doctest::Approx(a * al));
            CHECK(pt.x == doctest::Approx(-1.0));
            CHECK(pt.y == doctest::Approx(-(1 - al * al) / (1 + al * al)));
            CHECK(curve_residual_rel(class_params(P), pt) < 1e-12);
        }
    auto c = curve_from_model({0.5, 1.0});
    auto S = pi_map(0.7, CurvePoint::at(-1, 0), c);
    CHECK(S.a11 == doctest::Approx(c.c1));
    CHECK(S.a22 == doctest::Approx(c.c1));
    CHECK(pi_inverse(S).second.y == doctest::Approx(0.0));
    CHECK_THROWS_AS(pi_map(1.0, CurvePoint::at(0.5, 0.1), c), ValidationError);
}

TEST_CASE("factorize_QQ") {
    for (double a : {0.35, 0.75})
        for (double al : {0.5, 1.0}) {
            ModelParams p{a, al};
            auto P = model_P(p);
            auto [qm, qp] = factorize_QQ(P);
            for (int k = 0; k < 64; ++k) {
                cplx z = unit(k, 64);
                CHECK((P.eval(z) - qm.eval(z) * qp.eval(z)).norm() < 1e-12 * P.eval(z).norm());
            }
            // the a-parameter equals a(x0, y0)
            CHECK(qm.aQ == doctest::Approx(abd(initial_point(p), p).aval).epsilon(1e-13));
            if (al == 1.0) {
                cplx z(0.3, 1.1);
                CHECK((qm.eval(z) * qp.eval(z) - qp.eval(z) * qm.eval(z)).norm() < 1e-12);
            }
        }
}

TEST_CASE("s_map examples") {
    ModelParams p{1.0, 0.4};
    auto P = model_P(p);
    LaurentMatrix Q = P, R = P;
    for (int k = 0; k < 4; ++k) {
        Q = s_map(Q, curve_from_model(p));
        R = s_map(R);
    }
    CHECK(coeff_gap(Q, P) < 1e-13);
    // recovering the double zero z1 = z2 = 1 from coefficients costs half the digits
    CHECK(coeff_gap(R, P) < 1e-7);

    ModelParams g{0.55, 0.35};
    auto G = model_P(g), S = s_map(G);
    CHECK(S.trace() == doctest::Approx(G.trace()));
    auto d1 = G.det_coeffs(), d2 = S.det_coeffs();
    for (int k = 0; k < 3; ++k) CHECK(d2[k] == doctest::Approx(d1[k]));
}

TEST_CASE("abd examples") {
    ModelParams p{0.6, 1.0};
    auto v = abd(CurvePoint::at(-1, 0), p);
    CHECK(v.aval == doctest::Approx(0.6));
    CHECK(v.bval == doctest::Approx(1 / 0.6));
    ModelParams q{0.5, 0.3};
    auto w = abd(initial_point(q), q);
    CHECK(w.bval == doctest::Approx(1 / (0.3 * 0.5)));
    // a(x,y) d(x,y) = a^2 alpha^2 x (x - a^-2)/(1 - a^2 x)
    auto pt = flow_orbit(q, 3)[2];
    double expect = 0.25 * 0.09 * pt.x * (pt.x - 4.0) / (1 - 0.25 * pt.x);
    CHECK(abd(pt, q).aval * abd(pt, q).dval == doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(abd(CurvePoint::at(0.5, 0.0), q), ValidationError);
}

TEST_CASE("factor products") {
    ModelParams p{0.45, 0.6};
    auto [qm, qp] = factorize_QQ(model_P(p));
    double ab = qm.aQ * qm.bQ;
    cplx z(0.2, 0.9);
    Mat2 D = mat2(1, 0, 0, ab);
    CHECK((product_Pminus(p, 1, z) - qm.eval(z) * D).norm() < 1e-13);
    CHECK((product_Pplus(p, 1, z) - D.inverse() * qp.eval(z)).norm() < 1e-13);

    auto p6 = order6_params(0.5);
    double a2 = p6.a * p6.a, a4 = a2 * a2, a6 = a4 * a2, a8 = a4 * a4;
    for (int k = 0; k < 16; ++k) {
        cplx w = unit(k, 16) * 0.8;
        Mat2 Pp = product_Pplus(p6, 6, w);
        cplx tr = 2.0 + (1 - 6 * a4 + 3 * a8) * w / a6 + 2 * (2 - 3 * a4) * w * w + 2 * a6 * w * w * w;
        CHECK(std::abs(Pp.trace() - tr) < 1e-11 * std::abs(tr));
        cplx dt = std::pow(a2 * w - 1.0, 6);
        CHECK(std::abs(Pp.determinant() - dt) < 1e-11 * std::abs(dt));
        Mat2 Pm = product_Pminus(p6, 6, w);
        cplx dm = std::pow(w - a2, 6) / std::pow(w, 6);
        CHECK(std::abs(Pm.determinant() - dm) < 1e-11 * std::abs(dm));
    }
    // rank one at z = a^2
    Mat2 R = product_Pminus(p6, 6, a2);
    CHECK(std::abs(R.determinant()) < 1e-12 * R.squaredNorm());
}

TEST_CASE("symbols") {
    ModelParams p{0.7, 0.4};
    auto s = symbols(p);
    for (int k = 0; k < 16; ++k) {
        cplx z = unit(k, 16);
        CHECK(std::abs(s.Ao(z).determinant() - (1.0 - 0.49 * z)) < 1e-14);
        CHECK(std::abs(ao_printed(p, z).determinant() - (1.0 - 0.49 * z)) < 1e-14);
        CHECK((s.Ae(z) * s.Ae_inv(z) - Mat2::Identity()).norm() < 1e-13);
        CHECK(std::abs(s.Ae(z).determinant() - 1.0 / (1.0 - 0.49 / z)) < 1e-12);
        CHECK((s.Ao(z) * ao_inv_P(p, z) - model_P(p).eval(z)).norm() < 1e-13);
    }
    CHECK_THROWS_AS(s.Ae(0.49), NumericError);
    CHECK(std::isfinite(std::abs(s.Ae_inv(0.49)(1, 0))));
}

TEST_CASE("property: flow equivalence pi(u, sigma(pt)) = s(pi(u, pt))") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.15, 0.95);
    for (int t = 0; t < 100; ++t) {
        ModelParams p{U(rng), U(rng)};
        auto c = curve_from_model(p);
        int steps = static_cast<int>(U(rng) * 10);
        auto pt = flow_orbit(p, steps).back();
        double u = U(rng) * 3;
        auto [u2, pt2] = pi_inverse(s_map(pi_map(u, pt, c)));
        auto expect = sigma(c, pt);
        CHECK(std::abs(u2 - u) < 1e-9 * u);
        CHECK(std::abs(pt2.x - expect.x) < 1e-9 * std::max(1.0, std::abs(expect.x)));
        CHECK(std::abs(pt2.y - expect.y) < 1e-9 * std::max(1.0, std::abs(expect.x)));
    }
}

TEST_CASE("property: class invariance under iterated s") {
    for (auto p : {ModelParams{0.5, 0.3}, ModelParams{0.8, 0.7}, order6_params(0.4)}) {
        auto P = model_P(p);
        auto d0 = P.det_coeffs();
        LaurentMatrix Q = P;
        for (int k = 1; k <= 12; ++k) {
            Q = s_map(Q);
            CHECK(Q.trace() == doctest::Approx(P.trace()).epsilon(1e-11));
            auto d = Q.det_coeffs();
            for (int i = 0; i < 3; ++i) CHECK(d[i] == doctest::Approx(d0[i]).epsilon(1e-10));
            for (double v : {Q.a11, Q.a12, Q.a21, Q.a22, Q.b12, Q.b21}) CHECK(v > 0);
        }
    }
}

TEST_CASE("property: Wiener-Hopf assembly") {
    for (auto p : {ModelParams{1.0, 0.5}, order6_params(0.5), ModelParams{0.6, 0.4}}) {
        auto P = model_P(p);
        for (int N = 1; N <= 6; ++N)
            for (int k = 0; k < 64; ++k) {
                cplx z = unit(k, 64);
                Mat2 PN = mat_pow(P.eval(z), N);
                Mat2 WH = product_Pminus(p, N, z) * product_Pplus(p, N, z);
                CHECK((PN - WH).norm() / PN.norm() < 1e-9);
            }
        auto f = flow_factors(p, 24);
        for (auto& v : f.v) CHECK((v.aval > 0 && v.bval > 0 && v.dval > 0));
    }
}

}
