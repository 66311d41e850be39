#pragma once

#include "aztec/params.hpp"

#include <optional>
#include <vector>

namespace aztec {

// c1^2 (y^2 - x^2) = c2 x (x - z1)(x - z2)
struct CurveParams {
    double c1 = 0.0;
    double c2 = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;

    void validate() const;
};

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
    bool infinity = false;

    static CurvePoint at(double x, double y) { return {x, y, false}; }
    static CurvePoint identity() { return {0.0, 0.0, true}; }
};

inline constexpr double kCurveTol = 1e-9;

CurveParams curve_from_model(const ModelParams& p);

double curve_residual(const CurveParams& c, const CurvePoint& pt);
// Residual divided by the size of the terms that cancel in it.
double curve_residual_rel(const CurveParams& c, const CurvePoint& pt);
bool on_curve(const CurveParams& c, const CurvePoint& pt, double tol = kCurveTol);
// Left oval: x < 0 and |y| < |x|.
bool on_left_oval(const CurveParams& c, const CurvePoint& pt, double tol = kCurveTol);

CurvePoint add_points(const CurveParams& c, const CurvePoint& p, const CurvePoint& q);
CurvePoint negate(const CurvePoint& p);
CurvePoint sigma(const CurveParams& c, const CurvePoint& pt);

CurvePoint initial_point(const ModelParams& p);
std::vector<CurvePoint> flow_orbit(const ModelParams& p, int n);
std::optional<int> flow_period(const ModelParams& p, int max_p, double tol = kCurveTol);

// Point of the curve in the coordinates Y^2 = X^3 + a2 X^2 + X.
struct WeierstrassPoint {
    double X;
    double Y;
};
double weierstrass_a2(const ModelParams& p);
WeierstrassPoint to_weierstrass(const ModelParams& p, const CurvePoint& pt);

double division_psi(int m, const ModelParams& p, double X, double Y);
double torsion_residual(int m, const ModelParams& p);
// |psi_m| relative to the magnitude of the terms it is built from.
double torsion_residual_rel(int m, const ModelParams& p);

struct TorsionRoots {
    bool all_alpha = false;
    std::vector<double> alphas;
};
TorsionRoots solve_torsion_alpha(int m, double a);

}  // namespace aztec
