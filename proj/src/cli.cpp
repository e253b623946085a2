#include "cdolab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "cdolab/config.hpp"
#include "cdolab/errors.hpp"
#include "cdolab/io.hpp"
#include "cdolab/path_runner.hpp"
#include "cdolab/verify.hpp"

namespace cdolab::cli {

namespace {

using nlohmann::json;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool force = false;
    bool no_drift = false;
    std::string drift_convention;
    std::optional<double> z_min, z_max;
    std::optional<std::size_t> z_count;
};

ScenarioConfig resolve(const Flags& f) {
    if (f.config.empty()) throw ConfigError("--config is required");
    ScenarioConfig c = load_config(f.config);
    if (f.seed) c.seed = *f.seed;
    if (!c.seed) throw ConfigError("a seed is required (config field 'seed' or --seed)");
    if (!f.out.empty()) c.output_dir = f.out;
    if (f.no_drift) c.no_drift = true;
    if (!f.drift_convention.empty()) c.drift_convention = parse_drift_convention(f.drift_convention);
    return c;
}

void write_metadata(const ScenarioConfig& c, const std::string& command, int exit_code) {
    json j{{"command", command}, {"exit_code", exit_code}, {"config", config_to_json(c)}};
    write_json(c.output_dir / "run_metadata.json", j);
}

// All checkers, then the verdicts of the requested ones.
struct CheckOutcome {
    CertificationReport cert;
    MomentReport moments;
    json requested = json::array();
    Verdict verdict = Verdict::Pass;
};

CheckOutcome certify(const ScenarioConfig& c) {
    CheckOutcome o;
    const auto& spec = c.volatility;
    o.cert = check_P1_P2(spec, c.triplet, c.boxes);
    o.cert.merge(check_M1_M2(spec, c.triplet, c.boxes));
    o.cert.merge(check_derivative_conditions(spec, c.triplet, c.boxes));
    o.cert.merge(check_example_conditions(spec, c.triplet, c.boxes));
    o.cert.merge(estimate_regularity_constants(spec, c.boxes, c.geometry.gamma));
    std::optional<double> exp_constant;
    if (auto it = o.cert.constants.find("K"); it != o.cert.constants.end() && std::isfinite(it->second)) {
        exp_constant = it->second / std::sqrt(c.geometry.gamma);
    }
    o.moments = check_moment_conditions(c.triplet, exp_constant);

    for (const auto& req : c.checks) {
        for (const auto& name : expand_check(req)) {
            Verdict v = Verdict::Indeterminate;
            std::string note;
            if (const auto* r = o.cert.find(name)) {
                v = r->verdict;
                note = r->note;
            } else if (const auto* m = o.moments.find(name)) {
                v = m->verdict;
                note = m->note;
            } else if (const auto* fam = o.cert.find("example_family"); fam && req == "example") {
                v = fam->verdict;
                note = fam->note;
            } else {
                note = "not evaluated for this configuration";
            }
            json j{{"check", req}, {"condition", name}, {"verdict", std::string(to_string(v))}};
            if (!note.empty()) j["note"] = note;
            o.requested.push_back(std::move(j));
            o.verdict = combine(o.verdict, v);
        }
    }
    return o;
}

int exit_for(Verdict v) {
    switch (v) {
        case Verdict::Pass: return kPass;
        case Verdict::Fail: return kFail;
        case Verdict::Indeterminate: return kIndeterminate;
    }
    return kFail;
}

void print_failures(const CheckOutcome& o, std::ostream& out) {
    for (const auto& r : o.requested) {
        if (r["verdict"] == "pass") continue;
        out << "  " << r["condition"].get<std::string>() << ": " << r["verdict"].get<std::string>();
        if (const auto* c = o.cert.find(r["condition"].get<std::string>()); c && c->witness) {
            const Witness& w = *c->witness;
            out << " at t=" << fmt(w.t) << " z=" << fmt(w.z) << " l=" << fmt(w.l) << " i=" << (w.i + 1)
                << " u=" << fmt(w.u) << " r=(";
            for (std::size_t k = 0; k < w.r.size(); ++k) out << (k ? "," : "") << fmt(w.r[k]);
            out << ") violation=" << fmt(w.violation);
        }
        out << '\n';
    }
}

int cmd_check(const ScenarioConfig& c, std::ostream& out) {
    const CheckOutcome o = certify(c);
    const int code = exit_for(o.verdict);
    json rep{{"verdict", std::string(to_string(o.verdict))},
             {"requested", o.requested},
             {"certification", to_json(o.cert)},
             {"moments", to_json(o.moments)}};
    write_json(c.output_dir / "check_report.json", rep);
    write_metadata(c, "check", code);
    out << "check: " << to_string(o.verdict) << '\n';
    print_failures(o, out);
    return code;
}

// Gate for simulate/verify: the requested checks must pass unless forced.
int gate(const ScenarioConfig& c, bool force, std::ostream& out) {
    if (force) return kPass;
    const CheckOutcome o = certify(c);
    if (o.verdict == Verdict::Pass) return kPass;
    out << "configuration is not certified (" << to_string(o.verdict) << "); pass --force to run anyway\n";
    print_failures(o, out);
    return exit_for(o.verdict);
}

BatchOptions batch_options(const ScenarioConfig& c) {
    BatchOptions b;
    b.n_paths = c.n_paths;
    b.seed = *c.seed;
    b.coupled_loss = c.coupled_loss;
    b.path.horizon = c.horizon;
    b.path.maturities = c.maturities;
    return b;
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    return buf;
}

int cmd_simulate(const ScenarioConfig& c, bool force, std::ostream& out) {
    if (int g = gate(c, force, out); g != kPass) {
        write_metadata(c, "simulate", g);
        return g;
    }
    const HjmmModel model = build_model(c);
    BatchOptions b = batch_options(c);
    b.path.snapshot_times = c.snapshots;
    b.path.price_times = c.snapshots;
    const auto batch = run_batch(model, c.r0, b);
    for (std::size_t p = 0; p < batch.size(); ++p) {
        char name[32];
        std::snprintf(name, sizeof name, "path_%04zu", p);
        const auto dir = c.output_dir / name;
        const auto& r = batch[p];
        for (const auto& snap : r.snapshots) write_surface_csv(dir / ("surface_t" + time_tag(snap.t) + ".csv"), snap.surface);
        write_short_end_csv(dir / "short_end.csv", r);
        write_loss_csv(dir / "loss_path.csv", r.loss);
        for (const auto& g : r.prices) write_prices_csv(dir / ("prices_t" + time_tag(g.t) + ".csv"), g, c.geometry.ladder);
    }
    write_metadata(c, "simulate", kPass);
    out << "simulate: " << batch.size() << " paths written to " << c.output_dir.string() << '\n';
    return kPass;
}

int cmd_verify(const ScenarioConfig& c, bool force, std::ostream& out) {
    if (int g = gate(c, force, out); g != kPass) {
        write_metadata(c, "verify", g);
        return g;
    }
    const HjmmModel model = build_model(c);
    BatchOptions b = batch_options(c);
    b.path.price_times = checkpoint_times(c.horizon, c.checkpoints);
    const auto batch = run_batch(model, c.r0, b);

    json rep = json::object();
    Verdict v = Verdict::Pass;
    bool insufficient = false;
    auto has = [&](const char* a) { return std::find(c.audits.begin(), c.audits.end(), a) != c.audits.end(); };

    if (c.martingale) {
        const MartingaleReport m = martingale_from_batch(batch, c.threshold);
        rep["martingale"] = to_json(m);
        write_text(c.output_dir / "martingale_means.csv", martingale_means_csv(m));
        v = combine(v, m.verdict);
        insufficient = m.insufficient_paths;
        out << "martingale: " << to_string(m.verdict) << " (max normalized drift " << fmt(m.max_normalized) << ")\n";
    }
    const AuditReport a = audit_positivity_monotonicity(batch, c.audit_rel_tol);
    rep["audit"] = to_json(a);
    if (has("positivity")) {
        v = combine(v, a.positivity);
        out << "positivity: " << to_string(a.positivity) << " (min r " << fmt(a.min_r.value) << ")\n";
    }
    if (has("ordering")) {
        const Verdict o = combine(a.ordering, a.short_end);
        v = combine(v, o);
        out << "ordering: " << to_string(o) << " (min difference " << fmt(a.min_diff.value) << " at path "
            << a.min_diff.path << " t=" << fmt(a.min_diff.t) << " z=" << fmt(a.min_diff.z) << " i="
            << (a.min_diff.i + 1) << ")\n";
    }
    if (has("prices")) {
        const PriceAuditReport pa = price_monotonicity_audit(batch);
        rep["prices"] = to_json(pa);
        v = combine(v, pa.verdict);
        out << "prices: " << to_string(pa.verdict) << '\n';
    }
    if (has("compensator") && c.coupled_loss) {
        const CompensatorReport cr = compensator_test(batch, c.geometry.ladder, c.checkpoints, c.threshold);
        rep["compensator"] = to_json(cr);
        v = combine(v, cr.verdict);
        out << "compensator: " << to_string(cr.verdict) << '\n';
    }
    bool consistent = true;
    for (const auto& r : batch) consistent = consistent && r.intensity_consistent;
    rep["intensity_consistent"] = consistent;

    int code = exit_for(v);
    if (code == kPass && insufficient) {
        code = kIndeterminate;
        out << "too few paths: a standard error exceeds 10% of the initial price\n";
    }
    rep["verdict"] = std::string(to_string(v));
    rep["insufficient_paths"] = insufficient;
    rep["exit_code"] = code;
    write_json(c.output_dir / "verify_report.json", rep);
    write_metadata(c, "verify", code);
    return code;
}

int cmd_laplace(const ScenarioConfig& c, const Flags& f, std::ostream& out) {
    const double lo = f.z_min.value_or(c.laplace_z_min);
    const double hi = f.z_max.value_or(c.laplace_z_max);
    const std::size_t n = f.z_count.value_or(c.laplace_points);
    if (n == 0 || !(hi >= lo)) throw ConfigError("laplace range needs z_min <= z_max and at least one point");
    std::ostringstream csv;
    csv << "z,J,J1,J2,status\n";
    std::size_t bad = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double z = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
        double J = NAN, J1 = NAN, J2 = NAN;
        std::string status = "ok";
        try {
            J = laplace_exponent(c.triplet, z);
            if (!std::isfinite(J)) {
                status = "outside_domain";
            } else {
                J1 = laplace_derivative(c.triplet, z, 1);
                J2 = laplace_derivative(c.triplet, z, 2);
            }
        } catch (const IndeterminateError&) {
            status = "indeterminate";
        } catch (const DomainError&) {
            status = "outside_domain";
        }
        if (status != "ok") ++bad;
        csv << fmt(z) << ',' << fmt(J) << ',' << fmt(J1) << ',' << fmt(J2) << ',' << status << '\n';
    }
    write_text(c.output_dir / "laplace.csv", csv.str());
    write_metadata(c, "laplace", kPass);
    out << "laplace: " << n << " points, " << bad << " flagged\n";
    return kPass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Levy-driven forward rate and loss simulator"};
    app.require_subcommand(1);
    Flags f;
    std::uint64_t seed = 0;
    double z_min = 0, z_max = 0;
    std::size_t z_count = 0;
    app.add_option("--config", f.config, "Scenario config (JSON)");
    auto* seed_opt = app.add_option("--seed", seed, "Base seed");
    app.add_option("--out", f.out, "Output directory");
    app.add_flag("--force", f.force, "Run even when certification fails");
    app.add_flag("--no-drift", f.no_drift, "Drop the drift term (falsification runs)");
    app.add_option("--drift-convention", f.drift_convention, "Where J' is evaluated")
        ->check(CLI::IsMember({"eq16", "eq34", "bare", "shifted"}));

    auto* check = app.add_subcommand("check", "Certify the volatility family and the jump measure");
    auto* simulate = app.add_subcommand("simulate", "Simulate scenarios and write CSV output");
    auto* verify = app.add_subcommand("verify", "Martingale test and audits over a batch");
    auto* laplace = app.add_subcommand("laplace", "Tabulate J, J' and J'' over a z range");
    auto* zmin_opt = laplace->add_option("--z-min", z_min);
    auto* zmax_opt = laplace->add_option("--z-max", z_max);
    auto* zcount_opt = laplace->add_option("--z-count", z_count);
    for (auto* s : {check, simulate, verify, laplace}) s->fallthrough();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfig;
    }
    if (*seed_opt) f.seed = seed;
    if (*zmin_opt) f.z_min = z_min;
    if (*zmax_opt) f.z_max = z_max;
    if (*zcount_opt) f.z_count = z_count;

    try {
        const ScenarioConfig c = resolve(f);
        if (check->parsed()) return cmd_check(c, out);
        if (simulate->parsed()) return cmd_simulate(c, f.force, out);
        if (verify->parsed()) return cmd_verify(c, f.force, out);
        return cmd_laplace(c, f, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const SimulationError& e) {
        err << "simulation error: " << e.what() << " (t=" << fmt(e.time()) << " z=" << fmt(e.z())
            << " rating=" << (e.rating() + 1) << ")\n";
        return kSimulation;
    } catch (const IndeterminateError& e) {
        err << "indeterminate: " << e.what() << '\n';
        return kIndeterminate;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kSimulation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kSimulation;
    }
}

}  // namespace cdolab::cli
