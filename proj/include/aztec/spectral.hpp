#pragma once

#include "aztec/whflow.hpp"

#include <array>
#include <utility>

namespace aztec {

// Boundary side used only for points lying exactly on a cut.
enum class Side { None, Plus, Minus };

struct SheetPoint {
    cplx z;
    int sheet = 1;
    Side side = Side::None;
};

struct SpectralContext {
    ModelParams params;
    int d = 1;
    double x1 = 0.0, x2 = 0.0;
    double c = 0.0;     // (alpha + 1/alpha)(1 + a^2)/2, half the trace of P
    double beta = 0.0;  // (alpha + 1/alpha)^2 (1 + a^2)^2
    FlowFactors flow;

    // Checks that the flow has period dividing d.
    static SpectralContext make(const ModelParams& p, int d);
};

// Eigen-data of P(z) on both sheets; index 0 is sheet 1.
struct SheetData {
    cplx z;
    cplx sqrtR;  // sheet-1 value
    std::array<cplx, 2> lambda;
    std::array<Mat2, 2> F;
    std::array<cplx, 2> mu;
    std::array<cplx, 2> nu;
};

cplx R_of(cplx z, const ModelParams& p);
std::pair<double, double> branch_points(const ModelParams& p);

cplx sqrtR(const SheetPoint& sp, const SpectralContext& ctx);
cplx lambda_of(const SheetPoint& sp, const SpectralContext& ctx);
std::pair<cplx, cplx> mu_nu_of(const SheetPoint& sp, const SpectralContext& ctx);
Mat2 E_of(cplx z, const SpectralContext& ctx);
Mat2 F_of(const SheetPoint& sp, const SpectralContext& ctx);

SheetData spectral_data(cplx z, const SpectralContext& ctx, Side side = Side::None);

}  // namespace aztec
