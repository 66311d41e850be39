#include "aztec/spectral.hpp"

#include <cmath>
#include <sstream>

namespace aztec {

namespace {

constexpr double kBranchGuard = 1e-8;

cplx side_adjusted(cplx z, Side side) {
    if (side == Side::Plus) return {z.real(), +0.0};
    if (side == Side::Minus) return {z.real(), -0.0};
    return z;
}

bool on_cut(cplx z, const SpectralContext& ctx) {
    if (z.imag() != 0.0) return false;
    double x = z.real();
    return x < ctx.x1 || (x > ctx.x2 && x < 0.0);
}

cplx sqrtR_sheet1(cplx z, Side side, const SpectralContext& ctx) {
    if (std::abs(z) == 0.0) throw NumericError("sqrtR: pole at z = 0");
    if (std::abs(z - ctx.x1) < kBranchGuard || std::abs(z - ctx.x2) < kBranchGuard)
        throw NumericError("sqrtR: too close to a branch point");
    if (side == Side::None && on_cut(z, ctx)) {
        std::ostringstream os;
        os << "sqrtR: z = " << z.real() << " lies on a cut; a side is required";
        throw ValidationError(os.str());
    }
    cplx w = side_adjusted(z, side);
    double a = ctx.params.a;
    return 2.0 * a * std::sqrt(w - ctx.x1) * std::sqrt(w - ctx.x2) / std::sqrt(w);
}

void check_sheet(int sheet) {
    if (sheet != 1 && sheet != 2) throw ValidationError("sheet must be 1 or 2");
}

}  // namespace

SpectralContext SpectralContext::make(const ModelParams& p, int d) {
    p.validate();
    if (d < 1) throw ValidationError("torsion order d must be >= 1");
    auto per = flow_period(p, d);
    if (!per || d % *per != 0) {
        std::ostringstream os;
        os << "flow is not periodic with period dividing d = " << d;
        throw ValidationError(os.str());
    }
    SpectralContext ctx;
    ctx.params = p;
    ctx.d = d;
    auto [x1, x2] = branch_points(p);
    ctx.x1 = x1;
    ctx.x2 = x2;
    double a2 = p.a * p.a, s = p.alpha + 1.0 / p.alpha;
    ctx.c = 0.5 * s * (1.0 + a2);
    ctx.beta = s * s * (1.0 + a2) * (1.0 + a2);
    ctx.flow = flow_factors(p, d);
    return ctx;
}

cplx R_of(cplx z, const ModelParams& p) {
    if (std::abs(z) == 0.0) throw NumericError("R: pole at z = 0");
    double a2 = p.a * p.a, s = p.alpha + 1.0 / p.alpha;
    return s * s * (1.0 + a2) * (1.0 + a2) - 4.0 * (1.0 - a2 * z) * (1.0 - a2 / z);
}

std::pair<double, double> branch_points(const ModelParams& p) {
    p.validate();
    if (p.alpha >= 1.0)
        throw ValidationError("branch points degenerate at alpha = 1 (x1 = x2 = -1)");
    double a2 = p.a * p.a, s = p.alpha + 1.0 / p.alpha;
    double beta = s * s * (1.0 + a2) * (1.0 + a2);
    // 4a^2 z^2 + (beta - 4 - 4a^4) z + 4a^2 = 0
    double A = 4.0 * a2, B = beta - 4.0 - 4.0 * a2 * a2;
    double disc = B * B - 4.0 * A * A;
    if (disc <= 0.0) throw NumericError("branch points: non-real discriminant roots");
    double q = -0.5 * (B + std::sqrt(disc));
    double r1 = q / A, r2 = A / q;
    return {std::min(r1, r2), std::max(r1, r2)};
}

cplx sqrtR(const SheetPoint& sp, const SpectralContext& ctx) {
    check_sheet(sp.sheet);
    cplx s = sqrtR_sheet1(sp.z, sp.side, ctx);
    return sp.sheet == 1 ? s : -s;
}

cplx lambda_of(const SheetPoint& sp, const SpectralContext& ctx) {
    return ctx.c + 0.5 * sqrtR(sp, ctx);
}

SheetData spectral_data(cplx z, const SpectralContext& ctx, Side side) {
    SheetData out;
    out.z = z;
    out.sqrtR = sqrtR_sheet1(z, side, ctx);
    cplx zz = side_adjusted(z, side);
    double a2 = ctx.params.a * ctx.params.a;
    // the smaller root of each pair comes from the product to avoid cancellation
    cplx lprod = (1.0 - a2 * zz) * (1.0 - a2 / zz);
    cplx lp = ctx.c + 0.5 * out.sqrtR, lm = ctx.c - 0.5 * out.sqrtR;
    if (std::abs(lp) >= std::abs(lm))
        out.lambda = {lp, lprod / lp};
    else
        out.lambda = {lprod / lm, lm};
    Mat2 P = model_P(ctx.params).eval(zz);
    cplx diff = out.lambda[0] - out.lambda[1];
    out.F[0] = (P - out.lambda[1] * Mat2::Identity()) / diff;
    out.F[1] = (P - out.lambda[0] * Mat2::Identity()) / (-diff);
    Mat2 Pm = pminus_scaled(ctx.flow, ctx.d, zz).value();
    Mat2 Pp = pplus_scaled(ctx.flow, ctx.d, zz).value();
    // determinants from the factors: b^2 a^2 (1 - a^2/z) and e d (1 - a^2 z)
    cplx det_m = 1.0, det_p = 1.0;
    double al2 = ctx.params.alpha * ctx.params.alpha;
    for (const auto& v : ctx.flow.v) {
        det_m *= v.bval * v.bval * v.aval * v.aval * (1.0 - a2 / zz);
        det_p *= a2 / al2 * v.dval * v.dval * (1.0 - a2 * zz);
    }
    auto split = [&](const Mat2& M, cplx det, std::array<cplx, 2>& dst) {
        cplx t0 = (out.F[0] * M).trace(), t1 = (out.F[1] * M).trace();
        if (std::abs(t0) >= std::abs(t1))
            dst = {t0, det / t0};
        else
            dst = {det / t1, t1};
    };
    split(Pm, det_m, out.mu);
    split(Pp, det_p, out.nu);
    return out;
}

std::pair<cplx, cplx> mu_nu_of(const SheetPoint& sp, const SpectralContext& ctx) {
    check_sheet(sp.sheet);
    SheetData sd = spectral_data(sp.z, ctx, sp.side);
    int k = sp.sheet - 1;
    return {sd.mu[k], sd.nu[k]};
}

Mat2 E_of(cplx z, const SpectralContext& ctx) {
    SheetData sd = spectral_data(z, ctx);
    double a = ctx.params.a, al = ctx.params.alpha;
    cplx top = a * al * (1.0 + z);
    double d0 = al * (1.0 + a * a);
    Mat2 E = mat2(top, top, sd.lambda[0] - d0, sd.lambda[1] - d0);
    double scale = std::max(1.0, max_abs(E));
    if (std::abs(E.determinant()) < 1e-12 * scale * scale)
        throw NumericError("E is singular at this point");
    return E;
}

Mat2 F_of(const SheetPoint& sp, const SpectralContext& ctx) {
    check_sheet(sp.sheet);
    return spectral_data(sp.z, ctx, sp.side).F[sp.sheet - 1];
}

}  // namespace aztec
