#include "qrep/cli.hpp"

#include "qrep/rates.hpp"
#include "qrep/serialize.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace qrep {

namespace {

using nlohmann::json;

constexpr std::uint64_t default_seed = 42;

struct Common {
    std::string out_path;
    double tol = -1.0;  // negative: use the per-command default
    std::uint64_t seed = default_seed;
    int jobs = 1;

    double tol_or(double fallback) const { return tol >= 0.0 ? tol : fallback; }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out_path, "write the output to this file instead of stdout");
    cmd->add_option("--tol", c.tol, "override the pass/fail tolerance");
    cmd->add_option("--seed", c.seed, "seed for randomized verification batteries");
    cmd->add_option("--jobs", c.jobs, "worker threads for grid scans")
        ->check(CLI::PositiveNumber);
}

struct CodeChoice {
    std::string name;
    std::string file;

    CodeSpec resolve() const {
        if (!file.empty()) return load_custom_code(file);
        if (!name.empty()) return builtin_code(name);
        throw std::invalid_argument("one of --code or --code-file is required");
    }

    std::string label() const { return file.empty() ? name : file; }
};

void add_code_choice(CLI::App* cmd, CodeChoice& choice) {
    auto* by_name =
        cmd->add_option("--code", choice.name, "built-in code name (single-mode, two-mode, three-mode)");
    cmd->add_option("--code-file", choice.file, "JSON file with a custom code")->excludes(by_name);
}

GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ':')) parts.push_back(item);
    if (parts.size() != 3)
        throw std::invalid_argument("malformed range '" + text + "' (expected lo:hi:step)");
    GridSpec g;
    try {
        std::size_t used = 0;
        g.lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("");
        g.hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("");
        g.step = std::stod(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed range '" + text + "' (expected lo:hi:step)");
    }
    g.values();  // validates lo <= hi, step > 0
    return g;
}

// Runs `writer` against stdout or --out; returns 0, or 2 when the file
// cannot be written.
int emit(const Common& c, std::ostream& out, std::ostream& err,
         const std::function<void(std::ostream&)>& writer) {
    if (c.out_path.empty()) {
        writer(out);
        return 0;
    }
    std::ofstream file(c.out_path, std::ios::binary);
    if (!file) {
        err << "cannot open output file '" << c.out_path << "'\n";
        return 2;
    }
    writer(file);
    file.flush();
    if (!file.good()) {
        err << "failed while writing '" << c.out_path << "'\n";
        return 2;
    }
    return 0;
}

int finish(int emit_rc, bool pass) { return emit_rc != 0 ? emit_rc : (pass ? 0 : 1); }

// ---- channel compare ----

struct ChannelArgs {
    Common common;
    double eta = 0.0;
    int modes = 1;
    int cutoff = 3;
    int states = 20;
};

int run_channel_compare(const ChannelArgs& a, std::ostream& out, std::ostream& err) {
    const FockBasis basis(a.modes, a.cutoff);
    const ChannelAgreement rep =
        representation_equivalence_report(basis, a.eta, a.states, a.common.seed);
    const double tol_stine = a.common.tol_or(1e-10);
    const double tol_lind = a.common.tol_or(1e-6);
    const bool pass = rep.kraus_vs_stinespring <= tol_stine &&
                      rep.kraus_vs_lindblad <= tol_lind && rep.completeness <= tol_stine;
    const json j{{"command", "channel compare"},
                 {"version", artifact_version},
                 {"eta", a.eta},
                 {"modes", a.modes},
                 {"cutoff", a.cutoff},
                 {"states", a.states},
                 {"seed", rep.seed},
                 {"completeness_residual", rep.completeness},
                 {"kraus_vs_stinespring", rep.kraus_vs_stinespring},
                 {"kraus_vs_lindblad", rep.kraus_vs_lindblad},
                 {"tolerance_stinespring", tol_stine},
                 {"tolerance_lindblad", tol_lind},
                 {"pass", pass}};
    return finish(emit(a.common, out, err, [&](std::ostream& os) { os << j.dump(2) << "\n"; }),
                  pass);
}

// ---- codes validate ----

struct ValidateArgs {
    Common common;
    CodeChoice code;
    double eta = 0.9;
    bool include_no_loss = false;
};

int run_codes_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
    const CodeSpec code = a.code.resolve();
    const double tol = a.common.tol_or(1e-10);
    const KLReport rep = kl_check(code, a.eta, a.include_no_loss, tol);
    const auto photon = number_eigenspace_photon(code);
    json j{{"command", "codes validate"},
           {"version", artifact_version},
           {"code", code.name},
           {"modes", code.basis.modes},
           {"cutoff", code.basis.cutoff},
           {"eta", rep.eta},
           {"include_no_loss", rep.include_no_loss},
           {"tolerance", tol},
           {"eq_residual", rep.eq_residual},
           {"structural_residual", rep.structural_residual},
           {"no_loss_residual", rep.no_loss_residual},
           {"scalars", rep.scalars},
           {"error_probabilities", error_probabilities(code, a.eta)},
           {"pass", rep.pass}};
    j["photon_number"] = photon ? json(*photon) : json(nullptr);
    return finish(emit(a.common, out, err, [&](std::ostream& os) { os << j.dump(2) << "\n"; }),
                  rep.pass);
}

// ---- repeater build ----

struct RepeaterArgs {
    Common common;
    CodeChoice code;
    std::string kind;
    int ancilla_k = 1;
    int trials = 100;
};

json joint_operator_json(const Mat& m, const FockBasis& system, std::size_t ancilla_dim) {
    json entries = json::array();
    for (const cxd& v : m.a) entries.push_back(json::array({v.real(), v.imag()}));
    return {{"kind", "joint_operator"},
            {"system_basis", basis_to_json(system)},
            {"ancilla_dim", ancilla_dim},
            {"entries", std::move(entries)}};
}

int run_repeater_build(const RepeaterArgs& a, std::ostream& out, std::ostream& err) {
    const CodeSpec code = a.code.resolve();
    const bool direct = a.kind == "direct";
    const RepeaterSpec spec = direct ? build_direct(code, a.ancilla_k) : build_swap(code);
    const double idem = max_abs_diff(mul(spec.hamiltonian, spec.hamiltonian), spec.hamiltonian);
    const double unit = max_abs_diff(mul(dagger(spec.unitary), spec.unitary),
                                     Mat::identity(spec.unitary.n));
    const double action = direct ? verify_transfer_action(spec, a.trials, a.common.seed)
                                 : verify_swap_action(spec, a.trials, a.common.seed);
    const RecoveryChannel rec = recovery_channel(code);
    const double completeness = rec.completeness_residual();
    const int consistency_trials = 20;
    const double consistency =
        direct ? recovery_direct_consistency(spec, rec, consistency_trials, a.common.seed)
               : recovery_swap_consistency(spec, rec, consistency_trials, a.common.seed);
    const double tol = a.common.tol_or(1e-10);
    const bool pass = idem <= tol && unit <= tol && action <= tol && completeness <= tol &&
                      consistency <= tol;
    json j{{"command", "repeater build"},
           {"version", artifact_version},
           {"code", code.name},
           {"kind", a.kind},
           {"ancilla_k", direct ? a.ancilla_k : 1},
           {"system_dim", code.basis.dim},
           {"ancilla_dim", spec.ancilla.dim},
           {"joint_dim", spec.hamiltonian.n},
           {"projector_rank", spec.projector_rank},
           {"idempotency_residual", idem},
           {"unitarity_residual", unit},
           {"action_residual", action},
           {"action_trials", a.trials},
           {"recovery_completeness_residual", completeness},
           {"recovery_consistency_residual", consistency},
           {"recovery_consistency_trials", consistency_trials},
           {"seed", a.common.seed},
           {"tolerance", tol},
           {"pass", pass}};
    if (!a.common.out_path.empty()) {
        j["hamiltonian"] = joint_operator_json(spec.hamiltonian, code.basis, spec.ancilla.dim);
        j["unitary"] = joint_operator_json(spec.unitary, code.basis, spec.ancilla.dim);
    }
    return finish(emit(a.common, out, err, [&](std::ostream& os) { os << j.dump(2) << "\n"; }),
                  pass);
}

// ---- scan region ----

struct ScanArgs {
    Common common;
    CodeChoice code;
    std::string eta_c_range = "0.85:1.0:0.001";
    std::string sep_range = "0.5:30:0.1";
    double alpha = 0.2;
    int n_max = 10000;
};

int run_scan_region(const ScanArgs& a, std::ostream& out, std::ostream& err) {
    const CodeSpec code = a.code.resolve();
    const GridSpec eg = parse_grid(a.eta_c_range);
    const GridSpec sg = parse_grid(a.sep_range);
    RegionOptions opts;
    opts.alpha = a.alpha;
    opts.n_ceiling = a.n_max;
    opts.jobs = a.common.jobs;
    const RegionResult res = region_scan(code, eg, sg, opts);
    auto writer = [&](std::ostream& os) {
        os << "# command=\"scan region\" version=" << artifact_version << " code=" << code.name
           << " eta_c=" << a.eta_c_range << " sep=" << a.sep_range
           << " alpha=" << format_double(a.alpha) << " n_max=" << a.n_max
           << " jobs=" << a.common.jobs << " seed=" << a.common.seed
           << " max_coupling_loss=" << format_double(res.max_coupling_loss)
           << " min_threshold_eta_c=" << format_double(res.min_threshold_eta_c)
           << " best_sep_km=" << format_double(res.best_sep_km)
           << " monotone=" << (res.monotone_in_eta_c ? 1 : 0) << " empty=" << (res.empty ? 1 : 0)
           << "\n";
        os << "eta_c,L_km,beats,boundary\n";
        for (std::size_t ie = 0; ie < res.eta_c.size(); ++ie)
            for (std::size_t il = 0; il < res.sep_km.size(); ++il)
                os << format_double(res.eta_c[ie]) << "," << format_double(res.sep_km[il]) << ","
                   << int(res.beats[res.index(ie, il)]) << ","
                   << int(res.boundary[res.index(ie, il)]) << "\n";
    };
    return emit(a.common, out, err, writer);
}

// ---- rate curve ----

struct CurveArgs {
    Common common;
    CodeChoice code;
    double eta_c = 0.0;
    double sep = 0.0;
    bool optimize = false;
    bool sep_given = false;
    double max_km = 0.0;
    double alpha = 0.2;
    bool total = false;
};

int run_rate_curve(const CurveArgs& a, std::ostream& out, std::ostream& err) {
    if (a.optimize == a.sep_given)
        throw std::invalid_argument("rate curve needs exactly one of --sep or --optimize-sep");
    const CodeSpec code = a.code.resolve();
    SeparationPolicy policy;
    policy.optimize = a.optimize;
    policy.fixed_km = a.sep;
    const RateCurve curve =
        rate_vs_distance(code, a.eta_c, a.alpha, a.max_km, policy, !a.total);
    const auto beat = first_beat_distance(curve);
    auto writer = [&](std::ostream& os) {
        os << "# command=\"rate curve\" version=" << artifact_version << " code=" << code.name
           << " eta_c=" << format_double(a.eta_c) << " alpha=" << format_double(a.alpha)
           << " max_km=" << format_double(a.max_km)
           << " sep=" << (a.optimize ? std::string("optimized") : format_double(a.sep))
           << " sep_km=" << format_double(curve.sep_km) << " per_mode=" << (a.total ? 0 : 1)
           << " seed=" << a.common.seed
           << " crossover_km=" << (beat ? format_double(*beat) : std::string("none")) << "\n";
        os << "x_km,n,L_km,rate_per_mode,plob_bound\n";
        for (const RatePoint& p : curve.points)
            os << format_double(p.x_km) << "," << p.n << "," << format_double(p.sep_km) << ","
               << format_double(p.rate) << "," << format_double(p.bound) << "\n";
    };
    return emit(a.common, out, err, writer);
}

// ---- chain simulate ----

struct ChainArgs {
    Common common;
    CodeChoice code;
    double eta_c = 0.0;
    double sep = 0.0;
    double alpha = 0.2;
    int segments = 0;
    bool total = false;
};

int run_chain_simulate(const ChainArgs& a, std::ostream& out, std::ostream& err) {
    const CodeSpec code = a.code.resolve();
    SegmentModel model{code, a.eta_c, a.sep, a.alpha};
    model.validate();
    const SegmentChannel seg = segment_channel(model);
    ChainState state = initial_chain_state(code);
    const double m = a.total ? 1.0 : code.basis.modes;

    struct Row {
        int n;
        double p_in, rate6, per_mode;
    };
    std::vector<Row> rows;
    bool trace_ok = true;
    for (int n = 0; n <= a.segments; ++n) {
        if (n > 0) advance_chain(state, seg);
        const ConditionedState cond = condition_on_code(state, code);
        rows.push_back({n, cond.p_in, six_state_rate(cond.two_qubit),
                        cond.p_in * six_state_rate(cond.two_qubit) / m});
        if (std::abs(trace(state.joint).real() - 1.0) > 1e-9) trace_ok = false;
    }
    auto writer = [&](std::ostream& os) {
        os << "# command=\"chain simulate\" version=" << artifact_version << " code=" << code.name
           << " eta_c=" << format_double(a.eta_c) << " sep=" << format_double(a.sep)
           << " alpha=" << format_double(a.alpha) << " segments=" << a.segments
           << " per_mode=" << (a.total ? 0 : 1) << " seed=" << a.common.seed
           << " eta=" << format_double(model.eta()) << " trace_ok=" << (trace_ok ? 1 : 0) << "\n";
        os << "n,in_code_weight,six_state_rate,rate_per_mode\n";
        for (const Row& r : rows)
            os << r.n << "," << format_double(r.p_in) << "," << format_double(r.rate6) << ","
               << format_double(r.per_mode) << "\n";
    };
    return finish(emit(a.common, out, err, writer), trace_ok);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"truncated-Fock-space loss channels, bosonic code validation, repeater "
                 "synthesis and key-rate analysis"};
    app.name("qrep");
    app.require_subcommand(1);
    int exit_code = 0;

    // channel compare
    auto* channel = app.add_subcommand("channel", "loss-channel representations");
    channel->require_subcommand(1);
    ChannelArgs ch;
    auto* compare = channel->add_subcommand(
        "compare", "compare Kraus, beamsplitter-dilation and master-equation outputs");
    compare->add_option("--eta", ch.eta, "transmissivity in (0, 1]")->required();
    compare->add_option("--modes", ch.modes, "number of modes")->check(CLI::PositiveNumber);
    compare->add_option("--cutoff", ch.cutoff, "photon cutoff per mode")
        ->check(CLI::PositiveNumber);
    compare->add_option("--states", ch.states, "random probe states")->check(CLI::PositiveNumber);
    add_common(compare, ch.common);
    compare->callback([&] { exit_code = run_channel_compare(ch, out, err); });

    // codes validate
    auto* codes = app.add_subcommand("codes", "bosonic code validation");
    codes->require_subcommand(1);
    ValidateArgs va;
    auto* validate = codes->add_subcommand(
        "validate", "check correctability of a code against single-photon loss");
    add_code_choice(validate, va.code);
    validate->add_option("--eta", va.eta, "transmissivity used for the error family");
    validate->add_flag("--include-no-loss", va.include_no_loss,
                       "also require scalar action of the no-loss element");
    add_common(validate, va.common);
    validate->callback([&] { exit_code = run_codes_validate(va, out, err); });

    // repeater build
    auto* repeater = app.add_subcommand("repeater", "repeater synthesis");
    repeater->require_subcommand(1);
    RepeaterArgs ra;
    auto* build = repeater->add_subcommand(
        "build", "synthesize a repeater Hamiltonian and verify its action");
    add_code_choice(build, ra.code);
    build->add_option("--kind", ra.kind, "architecture")
        ->required()
        ->check(CLI::IsMember({"direct", "swap"}));
    build->add_option("--ancilla-k", ra.ancilla_k, "ancilla states K (direct only)")
        ->check(CLI::PositiveNumber);
    build->add_option("--trials", ra.trials, "random action-verification trials")
        ->check(CLI::PositiveNumber);
    add_common(build, ra.common);
    build->callback([&] { exit_code = run_repeater_build(ra, out, err); });

    // scan region
    auto* scan = app.add_subcommand("scan", "parameter-region scans");
    scan->require_subcommand(1);
    ScanArgs sa;
    auto* region = scan->add_subcommand(
        "region", "map where the repeater chain beats the repeaterless bound");
    add_code_choice(region, sa.code);
    region->add_option("--eta-c", sa.eta_c_range, "coupling-efficiency grid lo:hi:step");
    region->add_option("--sep", sa.sep_range, "repeater-separation grid lo:hi:step (km)");
    region->add_option("--alpha", sa.alpha, "fibre attenuation (dB/km)");
    region->add_option("--n-max", sa.n_max, "segment-count ceiling for the non-asymptotic search")
        ->check(CLI::PositiveNumber);
    add_common(region, sa.common);
    region->callback([&] { exit_code = run_scan_region(sa, out, err); });

    // rate curve
    auto* rate = app.add_subcommand("rate", "key-rate curves");
    rate->require_subcommand(1);
    CurveArgs ca;
    auto* curve = rate->add_subcommand("curve", "chain rate and repeaterless bound vs distance");
    add_code_choice(curve, ca.code);
    curve->add_option("--eta-c", ca.eta_c, "coupling efficiency")->required();
    auto* sep_opt = curve->add_option("--sep", ca.sep, "fixed repeater separation (km)");
    curve->add_flag("--optimize-sep", ca.optimize,
                    "choose the separation maximizing the per-segment advantage");
    curve->add_option("--max-km", ca.max_km, "largest total distance")->required();
    curve->add_option("--alpha", ca.alpha, "fibre attenuation (dB/km)");
    curve->add_flag("--total", ca.total, "report total rate instead of per mode");
    add_common(curve, ca.common);
    curve->callback([&] {
        ca.sep_given = sep_opt->count() > 0;
        exit_code = run_rate_curve(ca, out, err);
    });

    // chain simulate
    auto* chain = app.add_subcommand("chain", "repeater-chain simulation");
    chain->require_subcommand(1);
    ChainArgs cha;
    auto* simulate = chain->add_subcommand(
        "simulate", "propagate the entangled pair through loss + recovery segments");
    add_code_choice(simulate, cha.code);
    simulate->add_option("--eta-c", cha.eta_c, "coupling efficiency")->required();
    simulate->add_option("--sep", cha.sep, "repeater separation (km)")->required();
    simulate->add_option("--segments", cha.segments, "number of segments")
        ->required()
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--alpha", cha.alpha, "fibre attenuation (dB/km)");
    simulate->add_flag("--total", cha.total, "report total rate instead of per mode");
    add_common(simulate, cha.common);
    simulate->callback([&] { exit_code = run_chain_simulate(cha, out, err); });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("qrep");
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}

}  // namespace qrep
