#include "aztec/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

namespace aztec {

namespace {

constexpr double kPi = std::numbers::pi;

struct Circle {
    cplx c;
    double r;
};

Circle shifted_circle(double L, double R) { return {cplx(0.5 * (L + R), 0.0), 0.5 * (R - L)}; }

// Trapezoid nodes with weights dz/(2 pi i); offset by half a step off the real axis.
struct QNodes {
    std::vector<cplx> z, wt;
};

QNodes circle_nodes(const Circle& C, int n) {
    QNodes q;
    q.z.resize(n);
    q.wt.resize(n);
    for (int k = 0; k < n; ++k) {
        cplx e = std::polar(1.0, 2.0 * kPi * (k + 0.5) / n);
        q.z[k] = C.c + C.r * e;
        q.wt[k] = C.r * e / static_cast<double>(n);
    }
    return q;
}

cplx ipow(cplx z, int k) {
    if (k < 0) return 1.0 / ipow(z, -k);
    cplx r = 1.0;
    while (k) {
        if (k & 1) r *= z;
        z *= z;
        k >>= 1;
    }
    return r;
}

struct Triple {
    int m, eps, x;
    auto operator<=>(const Triple&) const = default;
};

Triple triple_of(const KernelIndex& k) { return {k.m, k.eps, k.x}; }

bool before(const Triple& f, const Triple& g) { return 2 * f.m + f.eps < 2 * g.m + g.eps; }

// Printed orientation: T[f][g] with f the primed index and g the unprimed one.
using Table = std::vector<std::vector<Mat2>>;

Table zero_table(std::size_t n) { return Table(n, std::vector<Mat2>(n, Mat2::Zero())); }

double table_scale(const Table& t) {
    double s = 0.0;
    for (const auto& row : t)
        for (const auto& m : row) s = std::max(s, max_abs(m));
    return s;
}

double table_diff(const Table& a, const Table& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) s = std::max(s, max_abs(a[i][j] - b[i][j]));
    return s;
}

bool table_finite(const Table& t) {
    for (const auto& row : t)
        for (const auto& m : row)
            if (!m.allFinite()) return false;
    return true;
}

// Runs eval at node multipliers 1, 2, 4, ... until two successive results agree.
struct Converged {
    Table t;
    double err;
    int nodes;
};

Converged converge(const std::function<Table(int)>& eval, int base_nodes, const QuadratureConfig& q) {
    Table prev = eval(1);
    double last = std::numeric_limits<double>::infinity();
    for (int f = 2; base_nodes * f <= q.max_nodes; f *= 2) {
        Table cur = eval(f);
        if (!table_finite(cur)) throw NumericError("kernel quadrature produced non-finite values");
        last = table_diff(cur, prev);
        if (last <= q.rel_tol * std::max(1.0, table_scale(cur))) return {cur, last, base_nodes * f};
        prev = std::move(cur);
    }
    std::ostringstream os;
    os << "kernel quadrature did not converge within " << q.max_nodes
       << " nodes; last change between the two finest estimates " << last;
    throw NumericError(os.str());
}

// ---------------- direct and periodic forms ----------------

// Integrands of the double integral for every index at one node: F for the w
// variable (primed index), G for the z variable.
using NodeEval = std::function<void(cplx, const std::vector<Triple>&, std::vector<Mat2>&)>;

struct DirectSetup {
    ModelParams p;
    int Nt = 0;
    NodeEval f_all, g_all;
    std::vector<double> avoid_radii;
};

Table direct_table(const DirectSetup& S, const std::vector<Triple>& idx, const Circle& cw, int nw,
                   const Circle& cz, int nz, const Circle& cs, int ns) {
    const ModelParams& p = S.p;
    const double a2 = p.a * p.a;
    const std::size_t n = idx.size();
    LaurentMatrix Pm = model_P(p);
    Table out = zero_table(n);

    QNodes W = circle_nodes(cw, nw), Z = circle_nodes(cz, nz);
    std::vector<std::vector<Mat2>> Fw(n, std::vector<Mat2>(nw));
    std::vector<Mat2> buf;
    for (int i = 0; i < nw; ++i) {
        S.f_all(W.z[i], idx, buf);
        for (std::size_t f = 0; f < n; ++f) Fw[f][i] = W.wt[i] * buf[f];
    }
    Eigen::MatrixXcd G(nz, 4 * n);
    for (int k = 0; k < nz; ++k) {
        S.g_all(Z.z[k], idx, buf);
        for (std::size_t g = 0; g < n; ++g)
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) G(k, 4 * g + 2 * r + c) = Z.wt[k] * buf[g](r, c);
    }
    Eigen::MatrixXcd C(nw, nz);
    for (int i = 0; i < nw; ++i)
        for (int k = 0; k < nz; ++k) C(i, k) = 1.0 / (Z.z[k] - W.z[i]);
    Eigen::MatrixXcd H = C * G;
    for (int i = 0; i < nw; ++i)
        for (std::size_t g = 0; g < n; ++g) {
            Mat2 Hg = mat2(H(i, 4 * g), H(i, 4 * g + 1), H(i, 4 * g + 2), H(i, 4 * g + 3));
            for (std::size_t f = 0; f < n; ++f) out[f][g] += Fw[f][i] * Hg;
        }

    int emax = 0;
    for (const auto& f : idx)
        for (const auto& g : idx)
            if (before(f, g)) emax = std::max(emax, g.m - f.m);
    QNodes Sn = circle_nodes(cs, ns);
    for (int k = 0; k < ns; ++k) {
        cplx z = Sn.z[k];
        std::vector<Mat2> pz(emax + 1, Mat2::Identity());
        for (int e = 1; e <= emax; ++e) pz[e] = pz[e - 1] * Pm.eval(z);
        Mat2 B = ao_inv_P(p, z), Ao = ao_matrix(p, z);
        cplx wt = Sn.wt[k] / z;
        for (std::size_t f = 0; f < n; ++f)
            for (std::size_t g = 0; g < n; ++g) {
                if (!before(idx[f], idx[g])) continue;
                int e = idx[g].m - idx[f].m;
                Mat2 M = idx[f].eps ? Mat2(B * pz[e - 1]) : pz[e];
                if (idx[g].eps) M = M * Ao;
                out[f][g] -= wt * ipow(z, e - idx[g].x + idx[f].x) / ipow(z - a2, e) * M;
            }
    }
    return out;
}

Mat2 adjugate(const Mat2& m) { return mat2(m(1, 1), -m(0, 1), -m(1, 0), m(0, 0)); }

// Inverses through the adjugate and the factorized determinants; LU on the product
// loses the small singular direction.
cplx logdet_minus(const FlowFactors& ff, int n, cplx z) {
    const double a2 = ff.params.a * ff.params.a;
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += std::log(ff.v[j].bval * ff.v[j].bval * ff.v[j].aval * ff.v[j].aval);
    return s + double(n) * std::log(1.0 - a2 / z);
}

cplx logdet_plus(const FlowFactors& ff, int n, cplx z) {
    const double a2 = ff.params.a * ff.params.a, al2 = ff.params.alpha * ff.params.alpha;
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += std::log(a2 / al2 * ff.v[j].dval * ff.v[j].dval);
    return s + double(n) * std::log(1.0 - a2 * z);
}

Mat2 inverse_from(const ScaledMat& m, cplx logdet) { return adjugate(m.m) * std::exp(m.log_scale - logdet); }

std::vector<Mat2> matrix_powers(const Mat2& P, int n) {
    std::vector<Mat2> pw(n + 1);
    pw[0] = Mat2::Identity();
    for (int k = 1; k <= n; ++k) pw[k] = pw[k - 1] * P;
    return pw;
}

DirectSetup direct_setup(const ModelParams& p, int Nt) {
    auto ff = std::make_shared<FlowFactors>(flow_factors(p, Nt));
    DirectSetup S;
    S.p = p;
    S.Nt = Nt;
    const double a2 = p.a * p.a;
    S.f_all = [ff, p, Nt, a2](cplx w, const std::vector<Triple>& idx, std::vector<Mat2>& out) {
        out.resize(idx.size());
        auto pw = matrix_powers(model_P(p).eval(w), Nt);
        Mat2 B = ao_inv_P(p, w);
        Mat2 ppi = inverse_from(pplus_scaled(*ff, Nt, w), logdet_plus(*ff, Nt, w));
        for (std::size_t f = 0; f < idx.size(); ++f) {
            int k = Nt - idx[f].m;
            Mat2 L = idx[f].eps ? Mat2(B * pw[k - 1]) : pw[k];
            out[f] = ipow(w, idx[f].x + k) / ipow(w - a2, k) * L * ppi;
        }
    };
    S.g_all = [ff, p, Nt, a2](cplx z, const std::vector<Triple>& idx, std::vector<Mat2>& out) {
        out.resize(idx.size());
        auto pz = matrix_powers(model_P(p).eval(z), Nt);
        Mat2 Ao = ao_matrix(p, z);
        Mat2 pmi = inverse_from(pminus_scaled(*ff, Nt, z), logdet_minus(*ff, Nt, z));
        for (std::size_t g = 0; g < idx.size(); ++g) {
            const Triple& t = idx[g];
            Mat2 M = pmi * pz[t.m];
            if (t.eps) M = M * Ao;
            out[g] = ipow(z - a2, Nt - t.m) / ipow(z, t.x + Nt - t.m + 1) * M;
        }
    };
    return S;
}

// Periodic products commute with P, so the integrands split over the two eigenprojectors;
// this avoids forming P^k and the inverse products separately, which cancel badly.
DirectSetup periodic_setup(const ModelParams& p, int d, int N) {
    auto ctx = std::make_shared<SpectralContext>(SpectralContext::make(p, d));
    DirectSetup S;
    S.p = p;
    S.Nt = d * N;
    S.avoid_radii = {-ctx->x1, -ctx->x2};
    const int Nt = S.Nt;
    const double a2 = p.a * p.a;
    S.f_all = [ctx, p, Nt, N, a2](cplx w, const std::vector<Triple>& idx, std::vector<Mat2>& out) {
        out.resize(idx.size());
        SheetData sd = spectral_data(w, *ctx);
        Mat2 B = ao_inv_P(p, w);
        for (std::size_t f = 0; f < idx.size(); ++f) {
            int k = Nt - idx[f].m;
            int kk = idx[f].eps ? k - 1 : k;
            Mat2 acc = Mat2::Zero();
            for (int i = 0; i < 2; ++i) {
                cplx ls = double(kk) * std::log(sd.lambda[i]) - double(N) * std::log(sd.nu[i]);
                acc += std::exp(ls) * sd.F[i];
            }
            if (idx[f].eps) acc = B * acc;
            out[f] = ipow(w, idx[f].x + k) / ipow(w - a2, k) * acc;
        }
    };
    S.g_all = [ctx, p, Nt, N, a2](cplx z, const std::vector<Triple>& idx, std::vector<Mat2>& out) {
        out.resize(idx.size());
        SheetData sd = spectral_data(z, *ctx);
        Mat2 Ao = ao_matrix(p, z);
        for (std::size_t g = 0; g < idx.size(); ++g) {
            const Triple& t = idx[g];
            Mat2 acc = Mat2::Zero();
            for (int k = 0; k < 2; ++k) {
                cplx ls = double(t.m) * std::log(sd.lambda[k]) - double(N) * std::log(sd.mu[k]);
                acc += std::exp(ls) * sd.F[k];
            }
            if (t.eps) acc = acc * Ao;
            out[g] = ipow(z - a2, Nt - t.m) / ipow(z, t.x + Nt - t.m + 1) * acc;
        }
    };
    return S;
}

// Centered radii a^{2(1-2t)} on a grid in t, picking the pair with the smallest
// product of integrand maxima; large sizes are badly conditioned at the default radii.
std::pair<double, double> auto_radii(const DirectSetup& S, const std::vector<Triple>& idx) {
    const double a = S.p.a;
    std::vector<double> ts, vw, vz;
    for (int k = 2; k <= 18; ++k) ts.push_back(0.05 * k);
    for (double t : ts) {
        double r = std::pow(a, 2.0 * (1.0 - 2.0 * t));
        bool near = false;
        for (double v : S.avoid_radii) near = near || std::abs(r - v) < 0.05;
        if (near) {
            vw.push_back(std::numeric_limits<double>::infinity());
            vz.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        QNodes q = circle_nodes({0.0, r}, 64);
        double mw = 0.0, mz = 0.0;
        std::vector<Mat2> buf;
        for (cplx z : q.z) {
            S.f_all(z, idx, buf);
            for (const auto& m : buf) mw = std::max(mw, max_abs(m));
            S.g_all(z, idx, buf);
            for (const auto& m : buf) mz = std::max(mz, max_abs(m));
        }
        vw.push_back(std::log(mw));
        vz.push_back(std::log(mz));
    }
    double best = std::numeric_limits<double>::infinity();
    std::pair<double, double> out{std::pow(a, 4.0 / 3.0), std::pow(a, -4.0 / 3.0)};
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = i + 2; j < ts.size(); ++j)
            if (vw[i] + vz[j] < best) {
                best = vw[i] + vz[j];
                out = {std::pow(a, 2.0 * (1.0 - 2.0 * ts[i])), std::pow(a, 2.0 * (1.0 - 2.0 * ts[j]))};
            }
    return out;
}

int pow2_at_least(double v) {
    int n = 1;
    while (n < v) n *= 2;
    return n;
}

Converged direct_converged(const DirectSetup& S, const std::vector<Triple>& idx, const QuadratureConfig& q) {
    Circle cw{0.0, q.r1(S.p)}, cz{0.0, q.r2(S.p)}, cs{0.0, 1.0};
    int n0 = q.n_nodes;
    return converge([&](int f) { return direct_table(S, idx, cw, n0 * f, cz, n0 * f, cs, n0 * f); }, n0, q);
}

cplx neville_at_zero(const std::vector<double>& x, std::vector<cplx> y) {
    const std::size_t n = x.size();
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t i = 0; i + k < n; ++i)
            y[i] = (-x[i + k] * y[i] + x[i] * y[i + 1]) / (x[i] - x[i + k]);
    return y[0];
}

// a = 1: the contours pinch between a^2 and a^-2, so the kernel is evaluated at
// a = 1 - s*h for s = 1..k and extrapolated polynomially to h = 0.
Converged direct_limit(const ModelParams& p, int Nt, const std::vector<Triple>& idx, const QuadratureConfig& q) {
    // cancellation near the pinch grows like h^{-2Nt}, so larger sizes use larger steps
    const int kPoints = Nt <= 2 ? 7 : 9;
    const double h0 = Nt <= 2 ? 0.01 : 0.02;
    std::vector<Converged> res(kPoints);
    parallel_for(kPoints, [&](std::size_t s) {
        double h = h0 * (s + 1);
        ModelParams ph{1.0 - h, p.alpha};
        double a2 = ph.a * ph.a;
        DirectSetup S = direct_setup(ph, Nt);
        Circle cw = shifted_circle(-0.5, 0.5 * (a2 + 1.0 / a2));
        Circle cz{0.0, 2.0}, cs{0.0, 2.0};
        int nw = pow2_at_least(16.0 / h), nz = 128;
        QuadratureConfig qq = q;
        qq.max_nodes = std::max(q.max_nodes, 4 * nw);
        if (Nt > 2) qq.rel_tol = std::max(q.rel_tol, 1e-8);
        res[s] = converge([&](int f) { return direct_table(S, idx, cw, nw * f, cz, nz * f, cs, nz * f); }, nw,
                          qq);
    });
    std::vector<double> xs(kPoints);
    for (int s = 0; s < kPoints; ++s) xs[s] = h0 * (s + 1);
    const std::size_t n = idx.size();
    Converged out{zero_table(n), 0.0, 0};
    double qerr = 0.0;
    for (const auto& r : res) {
        qerr = std::max(qerr, r.err);
        out.nodes = std::max(out.nodes, r.nodes);
    }
    double xerr = 0.0;
    for (std::size_t f = 0; f < n; ++f)
        for (std::size_t g = 0; g < n; ++g)
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) {
                    std::vector<cplx> ys(kPoints);
                    for (int s = 0; s < kPoints; ++s) ys[s] = res[s].t[f][g](r, c);
                    cplx full = neville_at_zero(xs, ys);
                    cplx less = neville_at_zero({xs.begin(), xs.end() - 1}, {ys.begin(), ys.end() - 1});
                    out.t[f][g](r, c) = full;
                    xerr = std::max(xerr, std::abs(full - less));
                }
    out.err = qerr + xerr;
    return out;
}

void check_index(const KernelIndex& k) {
    if ((k.eps != 0 && k.eps != 1) || (k.j != 0 && k.j != 1))
        throw ValidationError("kernel index: eps and j must be 0 or 1");
}

void check_direct_index(const KernelIndex& k, int Nt) {
    check_index(k);
    int col = 2 * k.m + k.eps;
    if (col < 0 || col > 2 * Nt) throw ValidationError("kernel index: column 2m+eps outside [0, 2N]");
}

std::vector<Triple> index_set(const KernelIndex& i1, const KernelIndex& i2) {
    std::vector<Triple> v{triple_of(i1)};
    if (triple_of(i2) != v[0]) v.push_back(triple_of(i2));
    return v;
}

KernelBlock block_from(const Converged& c, const std::vector<Triple>& idx, const KernelIndex& i1,
                       const KernelIndex& i2) {
    auto pos = [&](const KernelIndex& k) {
        return static_cast<std::size_t>(std::find(idx.begin(), idx.end(), triple_of(k)) - idx.begin());
    };
    KernelBlock b;
    b.value = c.t[pos(i2)][pos(i1)].transpose();
    b.est_error = c.err;
    b.nodes = c.nodes;
    return b;
}

Converged direct_any(const ModelParams& p, int Nt, const std::vector<Triple>& idx, const QuadratureConfig& q) {
    if (p.a == 1.0) return direct_limit(p, Nt, idx, q);
    q.validate(p);
    return direct_converged(direct_setup(p, Nt), idx, q);
}

void check_period(const ModelParams& p, int d) {
    if (d < 1) throw ValidationError("torsion order d must be >= 1");
    auto per = flow_period(p, d);
    if (!per || d % *per != 0) throw ValidationError("flow is not periodic with period dividing d");
}

// ---------------- spectral form ----------------

struct SheetCircle {
    double L, R;
};

struct SheetContours {
    SheetCircle w[2], z[2];
    bool w_outside[2];
};

// log|mu^{N-T} nu^{-T} w^{X+D} / (w-a^2)^D| along a circle: (max, min).
std::pair<double, double> profile(const SpectralContext& ctx, int N, int T, int X, const SheetCircle& c, int sheet) {
    const int D = ctx.d * (N - T);
    const double a2 = ctx.params.a * ctx.params.a;
    QNodes q = circle_nodes(shifted_circle(c.L, c.R), 64);
    double hi = -std::numeric_limits<double>::infinity(), lo = -hi;
    for (cplx w : q.z) {
        SheetData sd = spectral_data(w, ctx);
        double v = (N - T) * std::log(std::abs(sd.mu[sheet])) - T * std::log(std::abs(sd.nu[sheet])) +
                   (X + D) * std::log(std::abs(w)) - D * std::log(std::abs(w - a2));
        hi = std::max(hi, v);
        lo = std::min(lo, v);
    }
    return {hi, lo};
}

// Circles through the gap (x1, x2) on the left. On each sheet the w and z circles are
// nested; circles on opposite sheets are kept apart as well. Among admissible choices the
// one with the smallest largest integrand magnitude wins.
SheetContours choose_contours(const SpectralContext& ctx, int N, int T, int X) {
    const double a2 = ctx.params.a * ctx.params.a;
    std::vector<double> Ls;
    for (int k = 1; k <= 12; ++k) Ls.push_back(ctx.x1 + (ctx.x2 - ctx.x1) * k / 13.0);
    const double Rs[] = {0.15, 0.25, 0.45, 0.6, 0.8, 1.0, 1.4, 2.0, 2.8};
    constexpr double margin = 0.08;
    auto nested = [](const SheetCircle& in, const SheetCircle& out) {
        return out.L < in.L - 0.02 && in.R < out.R - 0.05;
    };
    auto apart = [&](const SheetCircle& u, const SheetCircle& v) { return nested(u, v) || nested(v, u); };
    struct Cand {
        SheetCircle c;
        double vw, vz;
        bool w_ok;
    };
    struct Pair {
        SheetCircle w, z;
        double vw, vz;
        bool outside;
    };
    std::vector<Pair> pairs[2];
    for (int i = 0; i < 2; ++i) {
        std::vector<Cand> cands;
        for (double L : Ls)
            for (double R : Rs) {
                if (std::abs(R - a2) < margin) continue;
                auto [hi, lo] = profile(ctx, N, T, X, {L, R}, i);
                bool w_ok = i == 0 ? R > a2 + margin : R < 1.0 / a2 - margin;
                cands.push_back({{L, R}, hi, -lo, w_ok});
            }
        for (const auto& cw : cands) {
            if (!cw.w_ok) continue;
            for (const auto& cz : cands)
                if (apart(cw.c, cz.c)) pairs[i].push_back({cw.c, cz.c, cw.vw, cz.vz, nested(cz.c, cw.c)});
        }
        if (pairs[i].empty()) throw NumericError("spectral kernel: no admissible contour pair");
        std::sort(pairs[i].begin(), pairs[i].end(),
                  [](const Pair& x, const Pair& y) { return x.vw + x.vz < y.vw + y.vz; });
        if (pairs[i].size() > 200) pairs[i].resize(200);
    }
    double best = std::numeric_limits<double>::infinity();
    const Pair* pick[2] = {nullptr, nullptr};
    for (const auto& p0 : pairs[0])
        for (const auto& p1 : pairs[1]) {
            if (!apart(p0.w, p1.z) || !apart(p1.w, p0.z)) continue;
            double v = std::max({p0.vw + p0.vz, p1.vw + p1.vz, p0.vw + p1.vz, p1.vw + p0.vz});
            if (v < best) {
                best = v;
                pick[0] = &p0;
                pick[1] = &p1;
            }
        }
    if (!pick[0]) throw NumericError("spectral kernel: no admissible contour set");
    SheetContours out{};
    for (int i = 0; i < 2; ++i) {
        out.w[i] = pick[i]->w;
        out.z[i] = pick[i]->z;
        out.w_outside[i] = pick[i]->outside;
    }
    return out;
}

Table spectral_table(const SpectralContext& ctx, int N, int T, int X, const std::vector<Triple>& idx,
                     const SheetContours& sc, int n) {
    const ModelParams& p = ctx.params;
    const double a2 = p.a * p.a;
    const int D = ctx.d * (N - T);
    const std::size_t ni = idx.size();
    Table out = zero_table(ni);

    // integer powers only, so products of logs need no branch bookkeeping
    auto fval = [&](const SheetData& sd, int i, const Triple& t, cplx w) {
        cplx ls = -double(t.m) * std::log(sd.lambda[i]) + double(N - T) * std::log(sd.mu[i]) -
                  double(T) * std::log(sd.nu[i]) + double(X + t.x + D - t.m) * std::log(w) -
                  double(D - t.m) * std::log(w - a2);
        Mat2 M = sd.F[i];
        // Ao^{-1} F = B P^{-1} F = B F / lambda
        if (t.eps) {
            M = ao_inv_P(p, w) * M;
            ls -= std::log(sd.lambda[i]);
        }
        return Mat2(std::exp(ls) * M);
    };
    auto gval = [&](const SheetData& sd, int k, const Triple& t, cplx z) {
        cplx ls = double(t.m) * std::log(sd.lambda[k]) - double(N - T) * std::log(sd.mu[k]) +
                  double(T) * std::log(sd.nu[k]) + double(D - t.m) * std::log(z - a2) -
                  double(X + t.x + D - t.m + 1) * std::log(z);
        Mat2 M = sd.F[k];
        if (t.eps) M = M * ao_matrix(p, z);
        return Mat2(std::exp(ls) * M);
    };

    QNodes W[2], Z[2];
    std::vector<std::vector<Mat2>> Fw[2], Gz[2], Fz[2];
    for (int i = 0; i < 2; ++i) {
        W[i] = circle_nodes(shifted_circle(sc.w[i].L, sc.w[i].R), n);
        Z[i] = circle_nodes(shifted_circle(sc.z[i].L, sc.z[i].R), n);
        Fw[i].assign(ni, std::vector<Mat2>(n));
        Gz[i].assign(ni, std::vector<Mat2>(n));
        Fz[i].assign(ni, std::vector<Mat2>(n));
        for (int s = 0; s < n; ++s) {
            SheetData sw = spectral_data(W[i].z[s], ctx);
            SheetData sz = spectral_data(Z[i].z[s], ctx);
            for (std::size_t f = 0; f < ni; ++f) {
                Fw[i][f][s] = W[i].wt[s] * fval(sw, i, idx[f], W[i].z[s]);
                Gz[i][f][s] = Z[i].wt[s] * gval(sz, i, idx[f], Z[i].z[s]);
                if (sc.w_outside[i]) Fz[i][f][s] = fval(sz, i, idx[f], Z[i].z[s]);
            }
        }
    }
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            Eigen::MatrixXcd G(n, 4 * ni);
            for (int s = 0; s < n; ++s)
                for (std::size_t g = 0; g < ni; ++g)
                    for (int r = 0; r < 2; ++r)
                        for (int c = 0; c < 2; ++c) G(s, 4 * g + 2 * r + c) = Gz[k][g][s](r, c);
            Eigen::MatrixXcd C(n, n);
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t) C(s, t) = 1.0 / (Z[k].z[t] - W[i].z[s]);
            Eigen::MatrixXcd H = C * G;
            for (int s = 0; s < n; ++s)
                for (std::size_t g = 0; g < ni; ++g) {
                    Mat2 Hg = mat2(H(s, 4 * g), H(s, 4 * g + 1), H(s, 4 * g + 2), H(s, 4 * g + 3));
                    for (std::size_t f = 0; f < ni; ++f) out[f][g] += Fw[i][f][s] * Hg;
                }
        }
    for (int i = 0; i < 2; ++i) {
        if (!sc.w_outside[i]) continue;
        for (int s = 0; s < n; ++s)
            for (std::size_t f = 0; f < ni; ++f)
                for (std::size_t g = 0; g < ni; ++g) out[f][g] += Fz[i][f][s] * Gz[i][g][s];
    }

    // summed over both sheets the single integrand is the matrix power P^{m-m'}
    LaurentMatrix Pm = model_P(p);
    QNodes U = circle_nodes({0.0, p.a < 1.0 ? 1.0 : 2.0}, n);
    for (int s = 0; s < n; ++s) {
        cplx z = U.z[s];
        Mat2 P = Pm.eval(z), B = ao_inv_P(p, z), Ao = ao_matrix(p, z);
        cplx wt = U.wt[s] / z;
        for (std::size_t f = 0; f < ni; ++f)
            for (std::size_t g = 0; g < ni; ++g) {
                if (!before(idx[f], idx[g])) continue;
                int e = idx[g].m - idx[f].m;
                Mat2 M = idx[f].eps ? Mat2(B * mat_pow(P, e - 1)) : mat_pow(P, e);
                if (idx[g].eps) M = M * Ao;
                out[f][g] -= wt * ipow(z, e - idx[g].x + idx[f].x) / ipow(z - a2, e) * M;
            }
    }
    return out;
}

Converged spectral_converged(const ModelParams& p, int d, int N, int T, int X, const std::vector<Triple>& idx,
                             const QuadratureConfig& q) {
    if (T < 0 || T >= N) throw ValidationError("spectral kernel requires 0 < T < N");
    SpectralContext ctx = SpectralContext::make(p, d);
    SheetContours sc = choose_contours(ctx, N, T, X);
    return converge([&](int f) { return spectral_table(ctx, N, T, X, idx, sc, q.n_nodes * f); }, q.n_nodes, q);
}

}  // namespace

KernelIndex site_index(const Site& s) {
    KernelIndex k;
    k.m = s.col >= 0 ? s.col / 2 : -((-s.col + 1) / 2);
    k.eps = s.col - 2 * k.m;
    int v = s.u + 1;
    k.x = (v >= 0 ? v / 2 : -((-v + 1) / 2)) - 1;
    k.j = ((-s.u) % 2 + 2) % 2;
    return k;
}

Site index_site(const KernelIndex& k) { return {2 * k.m + k.eps, 2 * k.x + 2 - k.j}; }

double QuadratureConfig::r1(const ModelParams& p) const { return rho1 > 0.0 ? rho1 : std::pow(p.a, 4.0 / 3.0); }
double QuadratureConfig::r2(const ModelParams& p) const { return rho2 > 0.0 ? rho2 : std::pow(p.a, -4.0 / 3.0); }

void QuadratureConfig::validate(const ModelParams& p) const {
    if (n_nodes < 2 || (n_nodes & (n_nodes - 1)) != 0) throw ValidationError("n_nodes must be a power of two");
    if (max_nodes < n_nodes) throw ValidationError("max_nodes must be >= n_nodes");
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");
    if (p.a < 1.0) {
        double a2 = p.a * p.a, x = r1(p), y = r2(p);
        if (!(a2 < x && x < y && y < 1.0 / a2))
            throw ValidationError("radii must satisfy a^2 < rho1 < rho2 < 1/a^2");
    }
}

KernelBlock kernel_direct(const ModelParams& p, int N, const KernelIndex& i1, const KernelIndex& i2,
                          const QuadratureConfig& q) {
    p.validate();
    if (N < 1 || N > 12) throw ValidationError("kernel_direct: N must be in [1, 12]");
    check_direct_index(i1, N);
    check_direct_index(i2, N);
    auto idx = index_set(i1, i2);
    return block_from(direct_any(p, N, idx, q), idx, i1, i2);
}

KernelBlock kernel_periodic(const ModelParams& p, int d, int N, const KernelIndex& i1, const KernelIndex& i2,
                            const QuadratureConfig& q) {
    p.validate();
    check_period(p, d);
    if (N < 1) throw ValidationError("kernel_periodic: N must be >= 1");
    const int Nt = d * N;
    check_direct_index(i1, Nt);
    check_direct_index(i2, Nt);
    auto idx = index_set(i1, i2);
    if (p.a == 1.0) {
        // a^2 and a^-2 merge; split per sheet each contour only has to avoid one of them
        if (p.alpha < 1.0) return block_from(spectral_converged(p, d, N, 0, 0, idx, q), idx, i1, i2);
        return block_from(direct_limit(p, Nt, idx, q), idx, i1, i2);
    }
    q.validate(p);
    DirectSetup S = periodic_setup(p, d, N);
    QuadratureConfig qq = q;
    if (q.rho1 <= 0.0 && q.rho2 <= 0.0) std::tie(qq.rho1, qq.rho2) = auto_radii(S, idx);
    return block_from(direct_converged(S, idx, qq), idx, i1, i2);
}

std::vector<std::vector<KernelBlock>> kernel_spectral_blocks(const ModelParams& p, int d, int N, int T, int X,
                                                             const std::vector<KernelIndex>& idx,
                                                             const QuadratureConfig& q) {
    p.validate();
    if (T <= 0 || T >= N) throw ValidationError("spectral kernel requires 0 < T < N");
    std::vector<Triple> tr;
    for (const auto& k : idx) {
        check_index(k);
        if (std::find(tr.begin(), tr.end(), triple_of(k)) == tr.end()) tr.push_back(triple_of(k));
    }
    Converged c = spectral_converged(p, d, N, T, X, tr, q);
    std::vector<std::vector<KernelBlock>> out(idx.size(), std::vector<KernelBlock>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) out[a][b] = block_from(c, tr, idx[a], idx[b]);
    return out;
}

KernelBlock kernel_spectral(const ModelParams& p, int d, int N, int T, int X, const KernelIndex& i1,
                            const KernelIndex& i2, const QuadratureConfig& q) {
    return kernel_spectral_blocks(p, d, N, T, X, {i1, i2}, q)[0][1];
}

KernelBlock gas_kernel(const ModelParams& p, int d, const KernelIndex& i1, const KernelIndex& i2,
                       const QuadratureConfig& q) {
    p.validate();
    check_index(i1);
    check_index(i2);
    if (!(p.a < 1.0)) throw ValidationError("gas kernel requires a < 1");
    SpectralContext ctx = SpectralContext::make(p, d);
    const double a2 = p.a * p.a;
    const Triple g = triple_of(i1), f = triple_of(i2);
    const bool lt = before(f, g);
    const int sheet = lt ? 1 : 0;
    const double sign = lt ? -1.0 : 1.0;
    const int e = g.m - f.m;
    auto eval = [&](int mult) {
        int n = q.n_nodes * mult;
        QNodes U = circle_nodes({0.0, 1.0}, n);
        Mat2 acc = Mat2::Zero();
        for (int s = 0; s < n; ++s) {
            cplx z = U.z[s];
            SheetData sd = spectral_data(z, ctx);
            Mat2 M = sd.F[sheet];
            if (f.eps) M = ao_matrix(p, z).inverse() * M;
            if (g.eps) M = M * ao_matrix(p, z);
            acc += sign * U.wt[s] / z * ipow(sd.lambda[sheet], e) * ipow(z, e - g.x + f.x) / ipow(z - a2, e) * M;
        }
        return Table{{acc}};
    };
    Converged c = converge(eval, q.n_nodes, q);
    KernelBlock b;
    b.value = c.t[0][0].transpose();
    b.est_error = c.err;
    b.nodes = c.nodes;
    return b;
}

KernelMatrix kernel_matrix_direct(const ModelParams& p, int N, const std::vector<Site>& sites,
                                  const QuadratureConfig& q) {
    p.validate();
    if (N < 1 || N > 12) throw ValidationError("kernel_direct: N must be in [1, 12]");
    std::vector<Triple> tr;
    std::vector<KernelIndex> ki;
    for (const auto& s : sites) {
        KernelIndex k = site_index(s);
        check_direct_index(k, N);
        ki.push_back(k);
        if (std::find(tr.begin(), tr.end(), triple_of(k)) == tr.end()) tr.push_back(triple_of(k));
    }
    Converged c = direct_any(p, N, tr, q);
    KernelMatrix out;
    out.K.resize(sites.size(), sites.size());
    out.est_error = c.err;
    for (std::size_t s = 0; s < sites.size(); ++s)
        for (std::size_t t = 0; t < sites.size(); ++t)
            out.K(s, t) = block_from(c, tr, ki[s], ki[t]).value(ki[s].j, ki[t].j).real();
    return out;
}

double kernel_entry(const KernelBlock& b, const KernelIndex& i1, const KernelIndex& i2) {
    return b.value(i1.j, i2.j).real();
}

double correlation(const KernelFn& K, const std::vector<Site>& pts) {
    const std::size_t n = pts.size();
    if (n == 0) return 1.0;
    Eigen::MatrixXd M(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(i, j) = K(pts[i], pts[j]);
    return M.determinant();
}

std::vector<WeightedTiling> enumerate_measure(const ModelParams& p, int N) {
    p.validate();
    if (N < 1 || N > 3) throw ValidationError("enumerate_measure: N must be in [1, 3]");
    std::vector<std::pair<int, int>> blacks;
    for (int j = 0; j < N; ++j)
        for (int k = 0; k <= N; ++k) blacks.emplace_back(j, k);
    std::set<std::pair<int, int>> used;
    std::vector<Domino> cur;
    std::vector<WeightedTiling> out;
    const DominoType types[] = {DominoType::N, DominoType::E, DominoType::S, DominoType::W};
    std::function<void(std::size_t)> rec = [&](std::size_t b) {
        if (b == blacks.size()) {
            WeightedTiling wt;
            wt.tiling = {N, cur};
            wt.prob = tiling_weight(p, wt.tiling);
            out.push_back(std::move(wt));
            return;
        }
        auto [j, k] = blacks[b];
        for (DominoType t : types) {
            auto w = partner_white(t, j, k);
            if (!white_exists(N, w.first, w.second) || used.count(w)) continue;
            used.insert(w);
            cur.push_back({t, j, k, w.first, w.second});
            rec(b + 1);
            cur.pop_back();
            used.erase(w);
        }
    };
    rec(0);
    double Z = 0.0;
    for (const auto& w : out) Z += w.prob;
    for (auto& w : out) {
        w.prob /= Z;
        w.particles = tiling_particles(w.tiling);
        std::sort(w.particles.begin(), w.particles.end());
    }
    return out;
}

double bruteforce_correlation(const std::vector<WeightedTiling>& measure, int N, const std::vector<Site>& pts) {
    std::set<Site> uniq(pts.begin(), pts.end());
    if (uniq.size() != pts.size()) return 0.0;
    double s = 0.0;
    for (const auto& w : measure) {
        bool ok = true;
        for (const auto& pt : pts) {
            if (pt.u <= -N) continue;
            if (!std::binary_search(w.particles.begin(), w.particles.end(), pt)) {
                ok = false;
                break;
            }
        }
        if (ok) s += w.prob;
    }
    return s;
}

double bruteforce_correlation(const ModelParams& p, int N, const std::vector<Site>& pts) {
    return bruteforce_correlation(enumerate_measure(p, N), N, pts);
}

}  // namespace aztec
