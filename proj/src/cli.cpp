#include "aztec/cli.hpp"

#include "CLI11.hpp"
#include "aztec/json_out.hpp"
#include "aztec/kernel.hpp"
#include "aztec/phase.hpp"
#include "aztec/sampler.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace aztec {

namespace {

struct Options {
    double a = 0.0, alpha = 0.0;
    bool order6 = false;
    int steps = 8, m = 3, N = 1, d = 1, T = 0, X = 0, sheet = 1;
    std::string z = "1,0", side = "none", i1 = "0,0,0,0", i2 = "0,0,0,0", form = "direct";
    int nodes = 256, max_nodes = 16384;
    double rel_tol = 1e-10, rho1 = 0.0, rho2 = 0.0;
    double tau = 0.5, xi = 0.0;
    int resolution = 128, grid = 0;
    std::string method = "implicit";
    double re_min = -3, re_max = 3, im_min = -2, im_max = 2;
    int nx = 61, ny = 41;
    std::uint64_t seed = 1;
    std::string out, stats, window;
    bool json = false;
};

std::vector<double> split_numbers(const std::string& s, std::size_t want, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError(std::string(what) + ": cannot parse '" + s + "'");
        }
    }
    if (want && v.size() != want)
        throw ValidationError(std::string(what) + ": expected " + std::to_string(want) + " comma-separated numbers");
    return v;
}

cplx parse_complex(const std::string& s) {
    auto v = split_numbers(s, 0, "--z");
    if (v.size() == 1) return v[0];
    if (v.size() == 2) return {v[0], v[1]};
    throw ValidationError("--z: expected re or re,im");
}

KernelIndex parse_index(const std::string& s, const char* flag) {
    auto v = split_numbers(s, 4, flag);
    for (double x : v)
        if (x != std::floor(x)) throw ValidationError(std::string(flag) + ": indices must be integers");
    return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]), static_cast<int>(v[3])};
}

Side parse_side(const std::string& s) {
    if (s == "none") return Side::None;
    if (s == "plus") return Side::Plus;
    if (s == "minus") return Side::Minus;
    throw ValidationError("--side must be none, plus or minus");
}

ModelParams model(const Options& o) {
    ModelParams p{o.a, o.order6 ? order6_alpha(o.a * o.a) : o.alpha};
    p.validate();
    return p;
}

Json cjson(cplx z) { return Json::array({z.real(), z.imag()}); }

Json mjson(const Mat2& m) {
    Json re = Json::array(), im = Json::array();
    for (int r = 0; r < 2; ++r) {
        re.push_back(Json::array({m(r, 0).real(), m(r, 1).real()}));
        im.push_back(Json::array({m(r, 0).imag(), m(r, 1).imag()}));
    }
    return {{"re", re}, {"im", im}};
}

Json meta(const std::string& cmd, const ModelParams& p, Json options, Json tol = Json::object()) {
    return {{"version", kVersion},
            {"command", cmd},
            {"params", {{"a", p.a}, {"alpha", p.alpha}}},
            {"options", std::move(options)},
            {"tolerances", std::move(tol)}};
}

std::string csv_meta(const Json& m) {
    std::ostringstream os;
    os << "# " << dump_json(m, -1) << '\n';
    return os.str();
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open output file " + path);
    f << body;
    if (!f) throw NumericError("failed writing " + path);
}

// Writes body to --out, or to stdout when no path was given.
void emit_file(const Options& o, std::ostream& out, const std::string& body, const Json& m, std::size_t rows) {
    if (o.out.empty()) {
        out << body;
        return;
    }
    write_file(o.out, body);
    Json s = {{"meta", m}, {"out", o.out}, {"rows", rows}};
    out << dump_json(s);
}

QuadratureConfig quad(const Options& o) {
    QuadratureConfig q;
    q.n_nodes = o.nodes;
    q.max_nodes = o.max_nodes;
    q.rel_tol = o.rel_tol;
    q.rho1 = o.rho1;
    q.rho2 = o.rho2;
    return q;
}

Json quad_json(const QuadratureConfig& q) {
    return {{"rel_tol", q.rel_tol}, {"nodes", q.n_nodes}, {"max_nodes", q.max_nodes}, {"rho1", q.rho1}, {"rho2", q.rho2}};
}

void run_flow(const Options& o, std::ostream& out) {
    ModelParams p = model(o);
    if (o.steps < 0) throw ValidationError("--steps must be >= 0");
    auto orbit = flow_orbit(p, o.steps);
    auto per = flow_period(p, std::max(o.steps, 1));
    if (!o.json) {
        for (const auto& pt : orbit) {
            if (pt.infinity)
                out << "inf inf\n";
            else
                out << fmt17(pt.x) << ' ' << fmt17(pt.y) << '\n';
        }
        out << "period " << (per ? std::to_string(*per) : std::string("none")) << '\n';
        return;
    }
    Json pts = Json::array();
    for (const auto& pt : orbit)
        pts.push_back(pt.infinity ? Json::array({nullptr, nullptr}) : Json::array({pt.x, pt.y}));
    Json j = {{"orbit", pts}, {"period", per ? Json(*per) : Json(nullptr)},
              {"meta", meta("flow", p, {{"steps", o.steps}}, {{"period_tol", kCurveTol}})}};
    out << dump_json(j);
}

void run_torsion(const Options& o, std::ostream& out) {
    if (!(o.a > 0.0 && o.a <= 1.0)) throw ValidationError("--a must lie in (0,1]");
    if (o.m < 2) throw ValidationError("--m must be >= 2");
    auto r = solve_torsion_alpha(o.m, o.a);
    Json j = {{"m", o.m}, {"a", o.a}, {"all_alpha", r.all_alpha}, {"alphas", r.alphas},
              {"meta", meta("torsion", {o.a, 1.0}, {{"m", o.m}})}};
    out << dump_json(j);
}

void run_factorize(const Options& o, std::ostream& out) {
    ModelParams p = model(o);
    if (o.N < 1) throw ValidationError("--N must be >= 1");
    cplx z = parse_complex(o.z);
    if (std::abs(z) == 0.0) throw ValidationError("--z must be nonzero");
    Mat2 Pm = product_Pminus(p, o.N, z), Pp = product_Pplus(p, o.N, z);
    Mat2 PN = mat_pow(model_P(p).eval(z), o.N);
    double res = (PN - Pm * Pp).norm() / PN.norm();
    Json j = {{"P_minus", mjson(Pm)}, {"P_plus", mjson(Pp)}, {"residual", res},
              {"meta", meta("factorize", p, {{"N", o.N}, {"z", cjson(z)}})}};
    out << dump_json(j);
}

void run_spectral(const Options& o, std::ostream& out) {
    ModelParams p = model(o);
    cplx z = parse_complex(o.z);
    if (o.sheet != 1 && o.sheet != 2) throw ValidationError("--sheet must be 1 or 2");
    auto ctx = SpectralContext::make(p, o.d);
    SheetPoint sp{z, o.sheet, parse_side(o.side)};
    auto [mu, nu] = mu_nu_of(sp, ctx);
    Json j = {{"lambda", cjson(lambda_of(sp, ctx))}, {"mu", cjson(mu)}, {"nu", cjson(nu)},
              {"F", mjson(F_of(sp, ctx))}, {"branch_points", {ctx.x1, ctx.x2}},
              {"meta", meta("spectral", p, {{"d", o.d}, {"z", cjson(z)}, {"sheet", o.sheet}, {"side", o.side}})}};
    out << dump_json(j);
}

void run_kernel(const Options& o, std::ostream& out) {
    ModelParams p = model(o);
    KernelIndex i1 = parse_index(o.i1, "--i1"), i2 = parse_index(o.i2, "--i2");
    QuadratureConfig q = quad(o);
    KernelBlock b;
    if (o.form == "direct")
        b = kernel_direct(p, o.N, i1, i2, q);
    else if (o.form == "periodic")
        b = kernel_periodic(p, o.d, o.N, i1, i2, q);
    else if (o.form == "spectral")
        b = kernel_spectral(p, o.d, o.N, o.T, o.X, i1, i2, q);
    else if (o.form == "gas")
        b = gas_kernel(p, o.d, i1, i2, q);
    else
        throw ValidationError("--form must be direct, periodic, spectral or gas");
    cplx v = b.value(i1.j, i2.j);
    Json opts = {{"form", o.form}, {"N", o.N}, {"d", o.d}, {"T", o.T}, {"X", o.X},
                 {"i1", {i1.m, i1.x, i1.eps, i1.j}}, {"i2", {i2.m, i2.x, i2.eps, i2.j}}};
    Json j = {{"re", v.real()}, {"im", v.imag()}, {"est_error", b.est_error}, {"nodes", b.nodes},
              {"meta", meta("kernel", p, opts, quad_json(q))}};
    out << dump_json(j);
}

void run_oracle(const Options& o, std::ostream& out) {
    ModelParams p = model(o);
    auto meas = enumerate_measure(p, o.N);
    std::ostringstream os;
    Json m = meta("oracle", p, {{"N", o.N}});
    os << csv_meta(m) << "index,prob,dominoes,particles\n";
    for (std::size_t i = 0; i < meas.size(); ++i) {
        os << i << ',' << fmt17(meas[i].prob) << ',';
        bool first = true;
        for (const auto& d : meas[i].tiling.dominoes) {
            os << (first ? "" : " ") << domino_name(d.type) << ':' << d.bj << ':' << d.bk;
            first = false;
        }
        os << ',';
        first = true;
        for (const auto& s : meas[i].particles) {
            os << (first ? "" : " ") << s.col << ':' << s.u;
            first = false;
        }
        os << '\n';
    }
    emit_file(o, out, os.str(), m, meas.size());
}

void run_phase(const Options& o, std::ostream& out) {
    ModelParams p = model(o);
    auto ctx = PhaseContext::make(p, o.d);
    Json m = meta("phase", p, {{"d", o.d}, {"tau", o.tau}, {"xi", o.xi}}, {{"coalesce", kCoalesceTol}});
    if (o.grid > 0) {
        auto g = phase_grid(ctx, o.grid);
        std::ostringstream os;
        os << csv_meta(m) << "tau,xi,q,v,class\n";
        for (std::size_t k = 0; k < g.points.size(); ++k) {
            const auto& pp = g.points[k];
            os << fmt17(pp.tau) << ',' << fmt17(pp.xi) << ',' << fmt17(pp.q()) << ',' << fmt17(pp.v()) << ','
               << to_string(g.cls[k]) << '\n';
        }
        emit_file(o, out, os.str(), m, g.points.size());
        return;
    }
    PhasePoint pp{o.tau, o.xi};
    pp.validate();
    auto S = saddles(pp, ctx);
    Json sad = Json::array();
    for (const auto& s : S.s)
        sad.push_back({{"z", cjson(s.point.z)}, {"sheet", s.point.sheet}, {"multiplicity", s.multiplicity},
                       {"residual", s.residual}});
    Json j = {{"class", to_string(classify(pp, ctx))},
              {"saddles", sad},
              {"gamma", {ctx.g.g1, ctx.g.g2, ctx.g.g3}},
              {"branch_points", {ctx.x1, ctx.x2}},
              {"meta", m}};
    out << dump_json(j);
}

void run_arctic(const Options& o, std::ostream& out) {
    ModelParams p = model(o);
    auto ctx = PhaseContext::make(p, o.d);
    std::vector<ArcticPoint> pts;
    if (o.method == "implicit")
        pts = arctic_curve(ctx, o.resolution);
    else if (o.method == "trace")
        pts = arctic_trace(ctx, o.resolution);
    else
        throw ValidationError("--method must be implicit or trace");
    Json m = meta("arctic", p, {{"d", o.d}, {"method", o.method}, {"resolution", o.resolution}});
    std::ostringstream os;
    os << csv_meta(m) << "q,v,tau,xi\n";
    for (const auto& pt : pts) {
        auto pp = PhasePoint::from_qv(pt.q, pt.v);
        os << fmt17(pt.q) << ',' << fmt17(pt.v) << ',' << fmt17(pp.tau) << ',' << fmt17(pp.xi) << '\n';
    }
    emit_file(o, out, os.str(), m, pts.size());
}

void run_field(const Options& o, std::ostream& out) {
    ModelParams p = o.a == 0.0 ? reference_smooth_params() : model(o);
    const int d = o.a == 0.0 ? 6 : o.d;
    auto ctx = PhaseContext::make(p, d);
    FieldSpec spec{o.re_min, o.re_max, o.im_min, o.im_max, o.nx, o.ny, o.sheet};
    auto f = phi_field(ctx, {o.tau, o.xi}, spec);
    Json m = meta("field", p,
                  {{"d", d}, {"tau", o.tau}, {"xi", o.xi}, {"sheet", o.sheet},
                   {"re", {o.re_min, o.re_max}}, {"im", {o.im_min, o.im_max}}, {"nx", o.nx}, {"ny", o.ny}});
    std::ostringstream os;
    os << csv_meta(m) << "x,y,re,im,ux,uy\n";
    for (const auto& s : f)
        os << fmt17(s.x) << ',' << fmt17(s.y) << ',' << fmt17(s.re) << ',' << fmt17(s.im) << ',' << fmt17(s.ux) << ','
           << fmt17(s.uy) << '\n';
    emit_file(o, out, os.str(), m, f.size());
}

Json density_json(const std::array<double, 4>& f) {
    Json j = Json::object();
    for (DominoType t : {DominoType::N, DominoType::E, DominoType::S, DominoType::W})
        j[domino_name(t)] = f[static_cast<int>(t)];
    return j;
}

void run_sample(const Options& o, std::ostream& out) {
    ModelParams p = model(o);
    if (o.N < 1) throw ValidationError("--N must be >= 1");
    Tiling t = shuffle_sample(p, o.N, o.seed);
    Json m = meta("sample", p, {{"N", o.N}, {"seed", o.seed}});
    std::string svg = render_svg(t);
    if (!o.stats.empty()) {
        Json s = {{"N", o.N}, {"seed", o.seed}, {"whole", density_json(empirical_density(t))}};
        if (!o.window.empty()) {
            auto w = split_numbers(o.window, 4, "--window");
            s["window"] = {{"bounds", w}, {"density", density_json(empirical_density(t, {w[0], w[1], w[2], w[3]}))}};
        }
        s["meta"] = m;
        write_file(o.stats, dump_json(s));
    }
    emit_file(o, out, svg, m, t.dominoes.size());
}

void add_model(CLI::App* c, Options& o, bool required = true) {
    auto* a = c->add_option("--a", o.a, "bias parameter a in (0,1]");
    if (required) a->required();
    auto* al = c->add_option("--alpha", o.alpha, "periodicity parameter alpha in (0,1]");
    auto* o6 = c->add_flag("--order6", o.order6, "take alpha from the order-six relation with a");
    al->excludes(o6);
    if (required) c->callback([c, al, o6] {
            if (al->count() == 0 && o6->count() == 0) throw CLI::RequiredError("--alpha or --order6");
        });
}

void add_quadrature(CLI::App* c, Options& o) {
    c->add_option("--nodes", o.nodes, "initial trapezoid nodes per contour");
    c->add_option("--max-nodes", o.max_nodes, "node cap");
    c->add_option("--rel-tol", o.rel_tol, "relative tolerance between node doublings");
    c->add_option("--rho1", o.rho1, "inner radius (0 = default)");
    c->add_option("--rho2", o.rho2, "outer radius (0 = default)");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Biased 2x2-periodic Aztec diamond toolkit", "aztec"};
    app.require_subcommand(1, 1);

    auto* flow = app.add_subcommand("flow", "orbit of the translation flow");
    add_model(flow, o);
    flow->add_option("--steps", o.steps, "number of flow steps");
    flow->add_flag("--json", o.json, "JSON output");

    auto* tor = app.add_subcommand("torsion", "alpha values making the flow m-periodic");
    tor->add_option("--m", o.m, "order")->required();
    tor->add_option("--a", o.a, "bias parameter a")->required();

    auto* fac = app.add_subcommand("factorize", "Wiener-Hopf factors of P(z)^N");
    add_model(fac, o);
    fac->add_option("--N", o.N, "power")->required();
    fac->add_option("--z", o.z, "re,im");

    auto* spec = app.add_subcommand("spectral", "eigen-data on the spectral curve");
    add_model(spec, o);
    spec->add_option("--d", o.d, "period d")->required();
    spec->add_option("--z", o.z, "re,im");
    spec->add_option("--sheet", o.sheet, "1 or 2");
    spec->add_option("--side", o.side, "none, plus or minus (points on a cut)");

    auto* ker = app.add_subcommand("kernel", "one kernel entry");
    add_model(ker, o);
    ker->add_option("--N", o.N, "size")->required();
    ker->add_option("--d", o.d, "period d");
    ker->add_option("--T", o.T, "spectral column cell");
    ker->add_option("--X", o.X, "spectral height cell");
    ker->add_option("--i1", o.i1, "m,x,eps,j")->required();
    ker->add_option("--i2", o.i2, "m,x,eps,j")->required();
    ker->add_option("--form", o.form, "direct, periodic, spectral or gas");
    add_quadrature(ker, o);

    auto* ora = app.add_subcommand("oracle", "enumerated measure as CSV");
    add_model(ora, o);
    ora->add_option("--N", o.N, "size (1..3)")->required();
    ora->add_option("--out", o.out, "CSV path (stdout if absent)");

    auto* ph = app.add_subcommand("phase", "classification of a macroscopic point");
    add_model(ph, o);
    ph->add_option("--d", o.d, "period d")->required();
    ph->add_option("--tau", o.tau, "tau");
    ph->add_option("--xi", o.xi, "xi");
    ph->add_option("--grid", o.grid, "classify a grid of this resolution instead (CSV)");
    ph->add_option("--out", o.out, "CSV path for --grid");

    auto* arc = app.add_subcommand("arctic", "arctic curve as CSV");
    add_model(arc, o);
    arc->add_option("--d", o.d, "period d")->required();
    arc->add_option("--resolution", o.resolution, "grid resolution or trace samples");
    arc->add_option("--method", o.method, "implicit or trace");
    arc->add_option("--out", o.out, "CSV path (stdout if absent)");

    auto* fld = app.add_subcommand("field", "Phi' on a grid as CSV");
    add_model(fld, o, false);
    fld->add_option("--d", o.d, "period d");
    fld->add_option("--tau", o.tau, "tau");
    fld->add_option("--xi", o.xi, "xi");
    fld->add_option("--sheet", o.sheet, "1 or 2");
    fld->add_option("--re-min", o.re_min);
    fld->add_option("--re-max", o.re_max);
    fld->add_option("--im-min", o.im_min);
    fld->add_option("--im-max", o.im_max);
    fld->add_option("--nx", o.nx);
    fld->add_option("--ny", o.ny);
    fld->add_option("--out", o.out, "CSV path (stdout if absent)");

    auto* smp = app.add_subcommand("sample", "random tiling as SVG");
    add_model(smp, o);
    smp->add_option("--N", o.N, "order")->required();
    smp->add_option("--seed", o.seed, "RNG seed");
    smp->add_option("--out", o.out, "SVG path (stdout if absent)");
    smp->add_option("--stats", o.stats, "JSON path for domino densities");
    smp->add_option("--window", o.window, "x0,x1,y0,y1 window for --stats");

    std::vector<std::string> argv_s{"aztec"};
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_s) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return 2;
    }

    try {
        if (flow->parsed()) run_flow(o, out);
        else if (tor->parsed()) run_torsion(o, out);
        else if (fac->parsed()) run_factorize(o, out);
        else if (spec->parsed()) run_spectral(o, out);
        else if (ker->parsed()) run_kernel(o, out);
        else if (ora->parsed()) run_oracle(o, out);
        else if (ph->parsed()) run_phase(o, out);
        else if (arc->parsed()) run_arctic(o, out);
        else if (fld->parsed()) run_field(o, out);
        else if (smp->parsed()) run_sample(o, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace aztec
