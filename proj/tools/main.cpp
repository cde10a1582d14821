// Command-line front end: every solver and reduction with stable JSON I/O.
// Inputs are JSON (from --input FILE, --json STRING, or stdin); all numbers are
// exact strings. Exit codes: 0 success, 2 contract violation or malformed
// input, 3 dimension-guard refusal.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "torusdist/acceptance.hpp"
#include "torusdist/json_io.hpp"

using namespace torusdist;

namespace {

struct CommonOpts {
    std::string input_path;
    std::string inline_json;
    long bits = 96;
    std::string sep_eps;
    std::string backend = "h";
    std::size_t max_enum_dim = kDefaultEnumGuard;
};

Json read_input(const CommonOpts& opts) {
    std::string text;
    if (!opts.inline_json.empty()) {
        text = opts.inline_json;
    } else if (!opts.input_path.empty()) {
        std::ifstream in(opts.input_path);
        if (!in) throw ContractError("cannot open input file: " + opts.input_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    } else {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    }
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ContractError(std::string("malformed JSON input: ") + e.what());
    }
}

SldpBackend backend_of(const std::string& name) {
    if (name == "exact") return SldpBackend::exact;
    if (name == "h" || name == "h_based") return SldpBackend::h_based;
    if (name == "lll") return SldpBackend::lll;
    throw ContractError("unknown backend '" + name + "' (expected exact|h|lll)");
}

std::size_t enum_guard(const CommonOpts& opts) {
    std::size_t guard = opts.max_enum_dim;
    if (const char* env = std::getenv("TORUSDIST_MAX_ENUM_DIM")) {
        long v = std::atol(env);
        if (v > 0) guard = static_cast<std::size_t>(v);
    }
    return guard;
}

// SepBound from the flag, or the documented default with a warning.
std::pair<SepBound, Json> sep_bound_of(const CommonOpts& opts, std::size_t d, std::size_t n,
                                       std::size_t B, std::size_t b) {
    Json warnings = Json::array();
    if (!opts.sep_eps.empty()) return {SepBound(rat_from_json(Json(opts.sep_eps))), warnings};
    warnings.push_back(
        "sep-eps defaulted to 2^-64(d+n+B+b); the result is conditional on the separation "
        "hypothesis holding at that scale");
    return {default_sep_bound(d, n, B, b), warnings};
}

std::size_t bitlen_of(const GaussVector& v) {
    std::size_t b = 1;
    for (const auto& c : v) {
        b = std::max(b, bit_length(num(c.re)));
        b = std::max(b, bit_length(den(c.re)));
        b = std::max(b, bit_length(num(c.im)));
        b = std::max(b, bit_length(den(c.im)));
    }
    return b;
}

void emit(const Json& out) { std::cout << out.dump(2) << std::endl; }

int cmd_orbit_eq(const CommonOpts& opts) {
    Json in = read_input(opts);
    TorusAction action(int_matrix_from_json(in.at("M")));
    GaussVector v = gauss_vector_from_json(in.at("v"));
    GaussVector w = gauss_vector_from_json(in.at("w"));
    emit(Json{{"T_equal", orbit_equal_T(action, v, w)}, {"K_equal", orbit_equal_K(action, v, w)}});
    return 0;
}

int cmd_orbit_dist(const CommonOpts& opts, const std::string& group, const std::string& metric) {
    Json in = read_input(opts);
    TorusAction action(int_matrix_from_json(in.at("M")));
    SldpBackend backend = backend_of(opts.backend);
    Json warnings = Json::array();
    Json out;
    if (metric == "delta") {
        Group g = group == "T" ? Group::T : Group::K;
        QuotientPoint p = quotient_point_from_json(in.at("p"));
        QuotientPoint q = quotient_point_from_json(in.at("q"));
        OrbitDistance od = rop_delta(action, p, q, g, backend, opts.bits);
        out = to_json(od.estimate);
    } else {
        GaussVector v = gauss_vector_from_json(in.at("v"));
        GaussVector w = gauss_vector_from_json(in.at("w"));
        std::size_t b = bitlen_of(v) + bitlen_of(w);
        auto [sep, warn] = sep_bound_of(opts, action.d(), action.n(), action.M.max_bit_length(), b);
        warnings = warn;
        DistanceEstimate e;
        if (metric == "log") {
            if (group != "T") throw ContractError("metric 'log' requires --group T");
            e = rop_logdist_T(action, v, w, sep, backend, opts.bits);
        } else if (metric == "euclid") {
            if (group != "K") throw ContractError("metric 'euclid' requires --group K");
            e = rop_dist_K(action, v, w, sep, backend, opts.bits);
        } else {
            throw ContractError("unknown metric '" + metric + "'");
        }
        out = to_json(e);
    }
    out["warnings"] = warnings;
    emit(out);
    return 0;
}

int cmd_sldp(const CommonOpts& opts) {
    Json in = read_input(opts);
    SldpInstance inst = sldp_instance_from_json(in);
    SldpBackend backend = backend_of(opts.backend);
    SldpResult r;
    switch (backend) {
        case SldpBackend::exact: r = sldp_exact(inst, enum_guard(opts)); break;
        case SldpBackend::h_based: r = sldp_h_based(inst); break;
        case SldpBackend::lll: r = sldp_lll(inst); break;
    }
    Json out = to_json(r.estimate);
    out["witness"] = Json{{"alpha", to_json(r.witness.alpha)},
                          {"u", to_json(r.witness.u)},
                          {"residual_squared", to_json(r.witness.residual2)}};
    emit(out);
    return 0;
}

int cmd_cvp(const CommonOpts& opts) {
    Json in = read_input(opts);
    CvpInstance inst = cvp_instance_from_json(in);
    auto [point, d2] = cvp_exact(inst, enum_guard(opts));
    emit(Json{{"alpha", to_json(point.point)},
              {"coeffs", to_json(point.coeffs)},
              {"dist_squared", to_json(d2)}});
    return 0;
}

int cmd_lift(const CommonOpts& opts) {
    Json in = read_input(opts);
    IntMatrix G = int_matrix_from_json(in.at("G"));
    LiftResult l = lift_lattice(G);
    emit(to_json(l));
    return 0;
}

int cmd_reduce_cvp_to_sldp(const CommonOpts& opts) {
    Json in = read_input(opts);
    CvpInstance inst = cvp_instance_from_json(in);
    auto out = cvp_to_sldp(inst);
    const auto& red = std::get<CvpToSldp>(out);
    emit(Json{{"s_total", to_json(red.s_total)}, {"sldp", to_json(red.instance)}});
    return 0;
}

Json rop_instance_json(const SldpToRop& red) {
    Json out{{"M", to_json(red.action.M)},
             {"group", red.group == Group::T ? "T" : "K"},
             {"metric", red.metric == RopMetric::delta
                            ? "delta"
                            : (red.metric == RopMetric::logdist ? "log" : "euclid")},
             {"back_factor", to_json(red.back_factor)},
             {"sep_hint", to_json(red.sep_hint)},
             {"equal_orbits", red.equal_orbits}};
    if (red.metric == RopMetric::delta) {
        out["p"] = to_json(red.p);
        out["q"] = to_json(red.q);
    } else {
        out["v"] = to_json(red.v);
        out["w"] = to_json(red.w);
    }
    return out;
}

int cmd_reduce_sldp_to_rop(const CommonOpts& opts, const std::string& group,
                           const std::string& metric) {
    Json in = read_input(opts);
    SldpInstance inst = sldp_instance_from_json(in);
    Group g = group == "T" ? Group::T : Group::K;
    RopMetric m =
        metric == "delta" ? RopMetric::delta : (metric == "log" ? RopMetric::logdist : RopMetric::euclid);
    SldpToRop red = reduce_sldp_to_rop(inst, g, m, opts.bits);
    emit(rop_instance_json(red));
    return 0;
}

int cmd_reduce_cvp_to_rop(const CommonOpts& opts, const std::string& group,
                          const std::string& metric) {
    Json in = read_input(opts);
    CvpInstance inst = cvp_instance_from_json(in);
    Group g = group == "T" ? Group::T : Group::K;
    RopMetric m =
        metric == "delta" ? RopMetric::delta : (metric == "log" ? RopMetric::logdist : RopMetric::euclid);
    auto out = cvp_to_rop_pipeline(inst, g, m);
    const auto& pipe = std::get<CvpToRop>(out);
    Json j = rop_instance_json(pipe.rop);
    emit(Json{{"s_total", to_json(pipe.s_total)},
              {"composed_back_factor", to_json(Rat(pipe.s_total) * pipe.rop.back_factor)},
              {"rop", j}});
    return 0;
}

int cmd_kn_solve(const CommonOpts& opts, const std::string& tol_str) {
    Json in = read_input(opts);
    IntMatrix M = int_matrix_from_json(in.at("M"));
    KnProblem prob = in.contains("q") ? KnProblem(M, rat_vector_from_json(in.at("q")))
                                      : KnProblem::from_vector(M, gauss_vector_from_json(in.at("v")));
    Rat tol = tol_str.empty() ? pow2(-40) : rat_from_json(Json(tol_str));
    KnSolution s = kn_minimize(prob, tol);
    emit(Json{{"x", to_json(s.x)},
              {"grad_norm", to_json(s.grad_norm)},
              {"f_value", to_json(s.f_value)},
              {"iterations", s.iterations}});
    return 0;
}

int cmd_kn_orbit_eq(const CommonOpts& opts) {
    Json in = read_input(opts);
    TorusAction action(int_matrix_from_json(in.at("M")));
    GaussVector v = gauss_vector_from_json(in.at("v"));
    GaussVector w = gauss_vector_from_json(in.at("w"));
    std::size_t b = bitlen_of(v) + bitlen_of(w);
    auto [sep, warnings] = sep_bound_of(opts, action.d(), action.n(), action.M.max_bit_length(), b);
    auto r = kn_orbit_equal(action, v, w, sep, backend_of(opts.backend), opts.bits);
    Json warn = warnings;
    warn.push_back("minimizer accuracy is inferred from the local Hessian (heuristic)");
    emit(Json{{"equal", r.equal},
              {"D", to_json(r.D)},
              {"threshold", to_json(r.threshold)},
              {"warnings", warn}});
    return 0;
}

int cmd_kn_example63(const CommonOpts&, long N) {
    GaussVector v = {GaussianRational(1), GaussianRational(1), GaussianRational(1),
                     GaussianRational(1)};
    GaussVector w = {GaussianRational(1), GaussianRational(1), GaussianRational(Rat(2), Rat(0)),
                     GaussianRational(Rat(2), Rat(0))};
    auto rep = example_6_3(N, v, w);
    emit(Json{{"N", rep.N},
              {"x", to_json(rep.x)},
              {"y", to_json(rep.y)},
              {"bracket_ok", rep.bracket_ok},
              {"x2_small", rep.x2_small},
              {"gap_ok", rep.gap_ok},
              {"gap_upper", to_json(rep.gap_value)},
              {"unit_distance_ok", rep.unit_distance_ok},
              {"euclid_upper_ok", rep.euclid_upper_ok},
              {"euclid_dist_upper", to_json(rep.euclid_dist_hi)},
              {"log_lower_ok", rep.log_lower_ok}});
    return 0;
}

int cmd_abc_lambda(const CommonOpts& opts) {
    Json in = read_input(opts);
    GaussVector v = gauss_vector_from_json(in.at("v"));
    IntVector e = int_vector_from_json(in.at("e"));
    CertifiedComplex lam = linear_form_in_logs(v, e, pow2(-opts.bits));
    emit(Json{{"re", to_json(lam.re.value)},
              {"re_err", to_json(lam.re.err)},
              {"im", to_json(lam.im.value)},
              {"im_err", to_json(lam.im.err)}});
    return 0;
}

int cmd_verify(unsigned seed) {
    auto results = acceptance::run_all(seed, &std::cerr);
    Json arr = Json::array();
    bool all = true;
    for (const auto& r : results) {
        arr.push_back(Json{{"criterion", r.index},
                           {"name", r.name},
                           {"passed", r.passed},
                           {"detail", r.detail},
                           {"seconds", r.seconds}});
        all = all && r.passed;
    }
    emit(Json{{"all_passed", all}, {"criteria", arr}});
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact solvers for robust orbit problems of torus actions"};
    app.require_subcommand(1);
    CommonOpts opts;

    auto add_common = [&](CLI::App* cmd, bool with_backend = true) {
        cmd->add_option("-i,--input", opts.input_path, "input JSON file (default: stdin)");
        cmd->add_option("--json", opts.inline_json, "inline JSON input");
        cmd->add_option("--bits", opts.bits, "working precision, eps = 2^-bits");
        if (with_backend)
            cmd->add_option("--backend", opts.backend, "SLDP backend: exact|h|lll");
        cmd->add_option("--max-enum-dim", opts.max_enum_dim,
                        "exact enumeration dimension guard (env TORUSDIST_MAX_ENUM_DIM)");
        cmd->add_option("--sep-eps", opts.sep_eps, "separation lower bound as p/q");
    };

    auto* orbit_eq = app.add_subcommand("orbit-eq", "exact T- and K-orbit equality");
    add_common(orbit_eq, false);

    auto* orbit_dist = app.add_subcommand("orbit-dist", "orbit distance approximation");
    std::string group = "T", metric = "log";
    orbit_dist->add_option("--group", group, "T or K")->check(CLI::IsMember({"T", "K"}));
    orbit_dist->add_option("--metric", metric, "delta|log|euclid")
        ->check(CLI::IsMember({"delta", "log", "euclid"}));
    add_common(orbit_dist);

    auto* sldp = app.add_subcommand("sldp", "subspace-to-cubic-lattice distance");
    add_common(sldp);

    auto* cvp = app.add_subcommand("cvp", "exact closest vector (enumeration)");
    add_common(cvp, false);

    auto* lift = app.add_subcommand("lift", "lattice lifting: G as a scaled projection of Z^n");
    add_common(lift, false);

    auto* reduce = app.add_subcommand("reduce", "constructive reductions");
    reduce->require_subcommand(1);
    auto* r1 = reduce->add_subcommand("cvp-to-sldp", "CVP instance to SLDP instance");
    add_common(r1, false);
    auto* r2 = reduce->add_subcommand("sldp-to-rop", "SLDP instance to ROP instance");
    std::string rgroup = "K", rmetric = "delta";
    r2->add_option("--group", rgroup, "T or K")->check(CLI::IsMember({"T", "K"}));
    r2->add_option("--metric", rmetric, "delta|log|euclid")
        ->check(CLI::IsMember({"delta", "log", "euclid"}));
    add_common(r2, false);
    auto* r3 = reduce->add_subcommand("cvp-to-rop", "composed CVP to ROP reduction");
    std::string cgroup = "K", cmetric = "delta";
    r3->add_option("--group", cgroup, "T or K")->check(CLI::IsMember({"T", "K"}));
    r3->add_option("--metric", cmetric, "delta|log|euclid")
        ->check(CLI::IsMember({"delta", "log", "euclid"}));
    add_common(r3, false);

    auto* kn = app.add_subcommand("kempf-ness", "log-sum-exp minimization and orbit equality");
    kn->require_subcommand(1);
    auto* kns = kn->add_subcommand("solve", "minimize the Kempf-Ness function");
    std::string tol;
    kns->add_option("--tol", tol, "gradient-norm tolerance as p/q");
    add_common(kns, false);
    auto* kne = kn->add_subcommand("orbit-eq", "orbit equality via Kempf-Ness minimization");
    add_common(kne);
    auto* kn63 = kn->add_subcommand("example63", "the stress family report");
    long N = 9;
    kn63->add_option("--N", N, "family parameter (N > 2)")->required();

    auto* abc = app.add_subcommand("abc-lambda", "linear form in logarithms");
    add_common(abc, false);

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    unsigned seed = 20240817;
    verify->add_option("--seed", seed, "deterministic seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(orbit_eq)) return cmd_orbit_eq(opts);
        if (app.got_subcommand(orbit_dist)) return cmd_orbit_dist(opts, group, metric);
        if (app.got_subcommand(sldp)) return cmd_sldp(opts);
        if (app.got_subcommand(cvp)) return cmd_cvp(opts);
        if (app.got_subcommand(lift)) return cmd_lift(opts);
        if (app.got_subcommand(reduce)) {
            if (reduce->got_subcommand(r1)) return cmd_reduce_cvp_to_sldp(opts);
            if (reduce->got_subcommand(r2)) return cmd_reduce_sldp_to_rop(opts, rgroup, rmetric);
            return cmd_reduce_cvp_to_rop(opts, cgroup, cmetric);
        }
        if (app.got_subcommand(kn)) {
            if (kn->got_subcommand(kns)) return cmd_kn_solve(opts, tol);
            if (kn->got_subcommand(kne)) return cmd_kn_orbit_eq(opts);
            return cmd_kn_example63(opts, N);
        }
        if (app.got_subcommand(abc)) return cmd_abc_lambda(opts);
        if (app.got_subcommand(verify)) return cmd_verify(seed);
    } catch (const DimensionGuardError& e) {
        std::cout << Json{{"error", e.what()}, {"kind", "dimension-guard"}}.dump(2) << std::endl;
        return 3;
    } catch (const ContractError& e) {
        std::cout << Json{{"error", e.what()}, {"kind", "contract"}}.dump(2) << std::endl;
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cout << Json{{"error", e.what()}, {"kind", "malformed-input"}}.dump(2) << std::endl;
        return 2;
    }
    return 0;
}
