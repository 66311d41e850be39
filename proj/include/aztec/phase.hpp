#pragma once

#include "aztec/spectral.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace aztec {

// Macroscopic position; (tau, xi) = ((q + v + 1)/2, q/2).
struct PhasePoint {
    double tau = 0.5;
    double xi = 0.0;

    void validate() const;
    double q() const { return 2.0 * xi; }
    double v() const { return 2.0 * tau - 1.0 - 2.0 * xi; }
    static PhasePoint from_qv(double q, double v);
    bool inside() const;
};

struct GammaConstants {
    double g1 = 0.0, g2 = 0.0, g3 = 0.5;
};

GammaConstants gamma_constants(const ModelParams& p, int d);
double gamma1_integral(const ModelParams& p);

// Everything the phase computations share; alpha = 1 (x1 = x2 = -1) is allowed.
struct PhaseContext {
    ModelParams params;
    int d = 1;
    GammaConstants g;
    double beta = 0.0;
    double x1 = -1.0, x2 = -1.0;
    bool degenerate = false;

    static PhaseContext make(const ModelParams& p, int d);
};

// Sheet-1 branch of R^{1/2}, 2a sqrt(z - x1) sqrt(z - x2) / sqrt(z).
cplx phase_sqrtR(const SheetPoint& sp, const PhaseContext& ctx);

cplx phi_prime(const SheetPoint& sp, const PhasePoint& pp, const PhaseContext& ctx);

// Phi'/d = A0 + tau A1 + xi A2.
std::array<cplx, 3> phi_prime_parts(const SheetPoint& sp, const PhaseContext& ctx);

struct SaddleQuartic {
    std::array<double, 5> coeffs{};  // highest degree first
    std::array<double, 2> remainders{};  // after dividing by z - a^2, z - a^-2
    bool degree_drop = false;
};

SaddleQuartic saddle_quartic(const PhasePoint& pp, const PhaseContext& ctx);

// Left side minus right side of the unsquared saddle equation on the given sheet.
cplx saddle_residual(const SheetPoint& sp, const PhasePoint& pp, const PhaseContext& ctx);

struct Saddle {
    SheetPoint point;
    int multiplicity = 1;
    double residual = 0.0;
};

struct SaddleSet {
    std::array<Saddle, 4> s;
};

SaddleSet saddles(const PhasePoint& pp, const PhaseContext& ctx);

enum class PhaseClass { Frozen, Rough, Smooth, RoughSmoothBoundary, RoughFrozenBoundary };

std::string to_string(PhaseClass c);

constexpr double kCoalesceTol = 1e-6;

PhaseClass classify_roots(const std::vector<cplx>& roots, const PhaseContext& ctx, double tol = kCoalesceTol);
PhaseClass classify(const PhasePoint& pp, const PhaseContext& ctx);

double quartic_discriminant(const std::array<double, 5>& c);

// Discriminant of the saddle quartic. At alpha = 1 the permanent double root at -1 is divided out first,
// and the squared linear factor (q + a^2 v)^2 is removed from the result.
double arctic_implicit(const PhasePoint& pp, const PhaseContext& ctx);

// Solves Phi' = Phi'' = 0 at a real z on C1 or C2; empty if the solution leaves the parallelogram.
std::optional<PhasePoint> arctic_parametric(double z, int sheet, const PhaseContext& ctx);

struct ArcticPoint {
    double q, v;
};

// Zero set of arctic_implicit inside the (q,v) square by marching squares with edge refinement.
std::vector<ArcticPoint> arctic_curve(const PhaseContext& ctx, int resolution);

// Arctic boundary traced through arctic_parametric over a log-spaced sweep of both real cycles.
std::vector<ArcticPoint> arctic_trace(const PhaseContext& ctx, int samples);

// The printed order-six boundary polynomial in (q, v).
double order6_boundary(double a, double q, double v);

struct PhaseGrid {
    int n = 0;
    std::vector<PhasePoint> points;  // row-major, tau index outer
    std::vector<PhaseClass> cls;
};

// Cell centres over the parallelogram: tau = (i+1/2)/n, xi = (tau-1)/2 + (j+1/2)/(2n).
PhaseGrid phase_grid(const PhaseContext& ctx, int resolution);

struct FieldSpec {
    double re_min = -3, re_max = 3, im_min = -2, im_max = 2;
    int nx = 61, ny = 41;
    int sheet = 1;
};

struct FieldSample {
    double x, y;
    double re, im;  // Phi'
    double ux, uy;  // unit vector along (Re Phi', -Im Phi')
};

std::vector<FieldSample> phi_field(const PhaseContext& ctx, const PhasePoint& pp, const FieldSpec& spec);

}  // namespace aztec
