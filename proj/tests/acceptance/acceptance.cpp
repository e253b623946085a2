// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cdolab/certify.hpp"
#include "cdolab/cli.hpp"
#include "cdolab/config.hpp"
#include "cdolab/errors.hpp"
#include "cdolab/path_runner.hpp"
#include "cdolab/verify.hpp"

using namespace cdolab;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = FIXTURE_DIR;
fs::path g_out = "acceptance_out";
int g_failed = 0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

void report(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++g_failed;
    std::printf("[%s] %2d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct LaplaceRow {
    double z, J, J1, J2;
    std::string status;
};

std::vector<LaplaceRow> run_laplace(const fs::path& cfg, const fs::path& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{"laplace", "--config", cfg.string(), "--out", out.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    std::ostringstream so, se;
    if (cli::run(args, so, se) != 0) throw Error("laplace command failed: " + se.str());
    std::ifstream in(out / "laplace.csv");
    std::string line;
    std::getline(in, line);
    std::vector<LaplaceRow> rows;
    while (std::getline(in, line)) {
        LaplaceRow r;
        char status[32];
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%31s", &r.z, &r.J, &r.J1, &r.J2, status) != 5) {
            throw Error("bad laplace row: " + line);
        }
        r.status = status;
        rows.push_back(r);
    }
    return rows;
}

// Independent closed form for finite atom measures.
double atom_sum_J(double a, const std::vector<Atom>& atoms, double z) {
    double s = -a * z;
    for (const auto& at : atoms) {
        const double comp = std::abs(at.location) < 1.0 ? z * at.location : 0.0;
        s += at.mass * (std::expm1(-z * at.location) + comp);
    }
    return s;
}

double rel_err(double got, double ref) {
    if (ref == 0.0) return std::abs(got);
    return std::abs(got - ref) / std::abs(ref);
}

std::vector<ScenarioResult> batch_for(const ScenarioConfig& c, std::size_t n_paths,
                                      const std::vector<double>& price_times = {}) {
    const HjmmModel model = build_model(c);
    BatchOptions b;
    b.n_paths = n_paths;
    b.seed = *c.seed;
    b.coupled_loss = c.coupled_loss;
    b.path.horizon = c.horizon;
    b.path.maturities = c.maturities;
    b.path.price_times = price_times;
    return run_batch(model, c.r0, b);
}

Outcome criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = load_config(kFixtures / "atoms_laplace.cfg");
    const auto rows = run_laplace(kFixtures / "atoms_laplace.cfg", g_out / "laplace_atoms");
    double worst_atoms = 0.0;
    bool all_ok = true;
    for (const auto& r : rows) {
        all_ok = all_ok && r.status == "ok";
        worst_atoms = std::max(worst_atoms, rel_err(r.J, atom_sum_J(cfg.triplet.a(), cfg.triplet.nu().atoms(), r.z)));
    }
    const auto wrows = run_laplace(kFixtures / "wiener_martingale.cfg", g_out / "laplace_wiener",
                                   {"--z-min", "0", "--z-max", "5", "--z-count", "201"});
    double worst_w = 0.0;
    for (const auto& r : wrows) {
        all_ok = all_ok && r.status == "ok";
        worst_w = std::max(worst_w, rel_err(r.J, 0.5 * r.z * r.z));
    }
    const double secs = seconds_since(t0);
    const bool pass = all_ok && rows.size() == 201 && rows.front().z == 0.0 && rows.back().z == 5.0 &&
                      worst_atoms < 1e-9 && worst_w < 1e-12 && secs < 1.0;
    return {pass, fmt("atoms max rel err %.2e (< 1e-9), Wiener max rel err %.2e (< 1e-12), %.3fs", worst_atoms,
                      worst_w, secs)};
}

Outcome criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::pair<LevyTriplet, double>> cases{
        {LevyTriplet(-1.0, 0.0, LevyMeasure({{0.5, 1.0}, {1.5, 0.3}, {-0.4, 0.7}}, std::nullopt)), 0.0},
        {LevyTriplet(0.0, 0.0, LevyMeasure({{0.3, 2.0}, {0.8, 0.5}}, std::nullopt)), 0.025}};
    double worst1 = 0.0, worst2 = 0.0;
    std::size_t points = 0;
    for (const auto& [t, z_lo] : cases) {
        for (int k = 0; k < 100; ++k) {
            const double z = z_lo + (5.0 - z_lo) * k / 99.0;
            const double h1 = 1e-5, h2 = 1e-4;
            const double fd1 = (laplace_exponent(t, z + h1) - laplace_exponent(t, z - h1)) / (2 * h1);
            const double fd2 =
                (laplace_exponent(t, z + h2) - 2 * laplace_exponent(t, z) + laplace_exponent(t, z - h2)) / (h2 * h2);
            worst1 = std::max(worst1, rel_err(laplace_derivative(t, z, 1), fd1));
            worst2 = std::max(worst2, rel_err(laplace_derivative(t, z, 2), fd2));
            ++points;
        }
    }
    const double secs = seconds_since(t0);
    return {worst1 < 1e-5 && worst2 < 1e-5 && points == 200 && secs < 1.0,
            fmt("200 points, J' max rel err %.2e, J'' max rel err %.2e, %.3fs", worst1, worst2, secs)};
}

Outcome criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    const double sigma = 0.1;
    const Geometry g{1e-2, 1001, 1.0, RatingLadder({0.3, 0.6, 1.0})};
    const HjmmModel m(LevyTriplet::wiener(), VolatilitySpec::constant(3, sigma), g);
    const auto r0 = ForwardSurface::from_function(g.dz, g.n_z, g.gamma, g.ladder,
                                                  [](double z, std::size_t i) { return 0.05 - 0.01 * i + 0.001 * z; });
    const auto F = m.drift(0.0, 0.0, r0);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.n_z; ++k) {
        for (std::size_t i = 0; i < 3; ++i) worst = std::max(worst, rel_err(F.at(k, i), sigma * sigma * F.z(k)));
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-3 && secs < 1.0, fmt("max rel err %.2e on 1001 x 3 nodes, %.3fs", worst, secs)};
}

Outcome criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    const double sigma = 0.1, dt = 1e-2, z_max = 10.0;
    const Geometry g{dt, 1001, 1.0, RatingLadder({0.5, 1.0})};
    const HjmmModel m(LevyTriplet::wiener(), VolatilitySpec::constant(2, sigma), g);
    auto r0fn = [](double z, std::size_t i) { return 0.04 - 0.01 * i + 0.003 * z - 0.0001 * z * z; };
    const auto r0 = ForwardSurface::from_function(g.dz, g.n_z, g.gamma, g.ladder, r0fn);
    PathOptions o;
    o.horizon = 1.0;
    o.snapshot_times = {1.0};
    const std::uint64_t seed = 20240917;
    const auto res = simulate_path(m, r0, o, seed);
    // Rebuild W(1) from the same increment stream.
    Engine rng(stream_seed(seed, 0));
    LevyIncrement inc;
    double W = 0.0;
    for (int k = 0; k < 100; ++k) {
        m.increments().draw(rng, inc);
        W += inc.continuous;
    }
    const auto& s = res.snapshots.at(0).surface;
    const double t = 1.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < g.n_z; ++k) {
        const double z = s.z(k);
        if (z + t > z_max + 1e-9) break;  // r0(z + t) needs the retained part of the grid
        for (std::size_t i = 0; i < 2; ++i) {
            const double ref = r0fn(z + t, i) + sigma * sigma * (z * t + 0.5 * t * t) + sigma * W;
            worst = std::max(worst, std::abs(s.at(k, i) - ref));
        }
    }
    const double bound = 5 * dt * sigma * sigma * (1 + z_max);
    const double secs = seconds_since(t0);
    return {worst <= bound && secs < 5.0, fmt("max error %.2e <= %.2e, %.3fs", worst, bound, secs)};
}

MartingaleReport wiener_martingale(bool no_drift) {
    auto c = load_config(kFixtures / "wiener_martingale.cfg");
    c.no_drift = no_drift;
    MartingaleOptions o;
    o.n_paths = c.n_paths;
    o.horizon = c.horizon;
    o.maturities = c.maturities;
    o.checkpoints = c.checkpoints;
    o.threshold = c.threshold;
    o.seed = *c.seed;
    return martingale_test(build_model(c), c.r0, o);
}

Outcome criterion_5() {
    const auto rep = wiener_martingale(false);
    const bool pass = rep.n_paths == 10000 && rep.series.size() == 3 && rep.series[0].times.size() == 10 &&
                      rep.max_normalized <= 3.0 && !rep.insufficient_paths;
    return {pass, fmt("max normalized drift %.3f <= 3 over 3 ratings x 10 checkpoints, %.0f paths", rep.max_normalized,
                      static_cast<double>(rep.n_paths))};
}

Outcome criterion_6() {
    const auto rep = wiener_martingale(true);
    double at_horizon = 0.0;
    for (const auto& s : rep.series) at_horizon = std::max(at_horizon, s.normalized.back());
    return {at_horizon > 3.0 && rep.verdict == Verdict::Fail,
            fmt("without the drift: normalized drift %.3f at t = 1 (must exceed 3)", at_horizon)};
}

Outcome criterion_7(const std::vector<ScenarioResult>& batch, const ScenarioConfig& c) {
    const auto cert = check_P1_P2(c.volatility, c.triplet, c.boxes);
    double r0_min = 1e300;
    for (double v : c.r0.values()) r0_min = std::min(r0_min, v);
    const auto a = audit_positivity_monotonicity(batch, 1e-6);
    const bool pass = cert.verdict("P1") == Verdict::Pass && cert.verdict("P2") == Verdict::Pass &&
                      c.triplet.is_subordinator() && r0_min >= 0.0 && batch.size() == 100 &&
                      a.min_r.value >= -1e-6 * a.max_abs_r;
    return {pass, fmt("min r %.4e vs -%.2e (100 paths, P1/P2 certified, subordinator)", a.min_r.value,
                      1e-6 * a.max_abs_r)};
}

Outcome criterion_8(const std::vector<ScenarioResult>& batch, const ScenarioConfig& c) {
    const auto cert = check_M1_M2(c.volatility, c.triplet, c.boxes);
    bool ordered = true;
    for (std::size_t k = 0; k < c.r0.n_z(); ++k) {
        for (std::size_t i = 0; i + 1 < c.r0.n_ratings(); ++i) ordered = ordered && c.r0.at(k, i) >= c.r0.at(k, i + 1);
    }
    const auto a = audit_positivity_monotonicity(batch, 1e-6);
    const double tol = 1e-6 * a.max_abs_r;
    const bool pass = cert.verdict("M1") == Verdict::Pass && cert.verdict("M2") == Verdict::Pass && ordered &&
                      a.min_diff.value >= -tol && a.min_short_diff.value >= -tol;
    return {pass, fmt("min ordered difference %.4e, short end %.4e, tolerance -%.2e", a.min_diff.value,
                      a.min_short_diff.value, tol)};
}

Outcome criterion_9() {
    const auto c = load_config(kFixtures / "m2_violating.cfg");
    const auto cert = check_M1_M2(c.volatility, c.triplet, c.boxes);
    const auto batch = batch_for(c, 100);
    const auto a = audit_positivity_monotonicity(batch, 1e-6);
    const double tol = 1e-6 * a.max_abs_r;
    const bool pass = cert.verdict("M2") == Verdict::Fail && a.min_diff.value < -10 * tol;
    return {pass, fmt("min ordered difference %.4e < -%.2e (path %.0f)", a.min_diff.value, 10 * tol,
                      static_cast<double>(a.min_diff.path))};
}

Outcome criterion_10() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto ef = load_config(kFixtures / "example_family.cfg");
    auto rep = check_P1_P2(ef.volatility, ef.triplet, ef.boxes);
    rep.merge(check_M1_M2(ef.volatility, ef.triplet, ef.boxes));
    rep.merge(check_derivative_conditions(ef.volatility, ef.triplet, ef.boxes));
    bool ef_ok = true;
    for (const auto& cond : rep.conditions) ef_ok = ef_ok && cond.verdict == Verdict::Pass;

    const auto sd = load_config(kFixtures / "separable_distinct.cfg");
    const auto sd_rep = check_M1_M2(sd.volatility, sd.triplet, sd.boxes);
    const auto* m1 = sd_rep.find("M1");
    const bool sd_ok = m1 && m1->verdict == Verdict::Fail && m1->witness;

    const auto nj = load_config(kFixtures / "negative_jump.cfg");
    const auto nj_rep = check_P1_P2(nj.volatility, nj.triplet, nj.boxes);
    const auto* p2 = nj_rep.find("P2");
    const bool nj_ok = p2 && p2->verdict == Verdict::Fail && p2->witness;

    const double secs = seconds_since(t0);
    std::string detail = std::string("example family ") + (ef_ok ? "passes all " : "does not pass all ") +
                         std::to_string(rep.conditions.size()) + " conditions; separable M1 " +
                         (sd_ok ? "fails with witness" : "NOT failing") + "; negative jump P2 " +
                         (nj_ok ? "fails with witness" : "NOT failing") + fmt("; %.2fs", secs);
    return {ef_ok && sd_ok && nj_ok && secs < 10.0, detail};
}

Outcome criterion_11() {
    const auto c = load_config(kFixtures / "two_rating_loss.cfg");
    const double lambda = c.r0.at(0, 0) - c.r0.at(0, 1);
    const auto batch = batch_for(c, c.n_paths);
    std::size_t survived = 0;
    for (const auto& r : batch) survived += r.loss.level_at(c.horizon) <= c.geometry.ladder[0] ? 1 : 0;
    const double n = static_cast<double>(batch.size());
    const double p_hat = survived / n;
    const double p = std::exp(-lambda * c.horizon);
    const double se = std::sqrt(p * (1 - p) / n);
    const auto comp = compensator_test(batch, c.geometry.ladder, c.checkpoints, 3.0);
    const bool pass = batch.size() == 10000 && std::abs(p_hat - p) <= 3 * se && comp.max_normalized <= 3.0;
    return {pass, fmt("survival %.4f vs exp(-cT) = %.4f (%.2f standard errors)", p_hat, p, std::abs(p_hat - p) / se) +
                      fmt("; compensated indicator max normalized mean %.3f", comp.max_normalized)};
}

Outcome criterion_12() {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> n01;
    std::size_t passed = 0;
    double min_margin = 1e300;
    const int trials = 1000;
    for (int trial = 0; trial < trials; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(uni(rng) * 4);
        std::vector<double> xs;
        for (std::size_t i = 1; i <= n; ++i) xs.push_back(static_cast<double>(i) / static_cast<double>(n));
        const double gamma = 0.1 + 1.9 * uni(rng);
        const double dz = 0.01;
        const std::size_t nz = 1001;
        const double width = 0.05 + 0.5 * uni(rng);  // smoothing length
        const double scale = std::pow(10.0, -3.0 + 4.0 * uni(rng));
        const double decay = trial % 2 ? 20.0 * uni(rng) : 0.0;  // half the profiles hug z = 0
        ForwardSurface s(dz, nz, gamma, RatingLadder(xs));
        const auto half = static_cast<int>(3 * width / dz);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> noise(nz + 2 * half);
            for (auto& v : noise) v = n01(rng);
            const double level = n01(rng);
            for (std::size_t k = 0; k < nz; ++k) {
                double acc = 0.0, wsum = 0.0;
                for (int j = -half; j <= half; ++j) {
                    const double w = std::exp(-0.5 * (j * dz / width) * (j * dz / width));
                    acc += w * noise[k + half + j];
                    wsum += w;
                }
                s.at(k, i) = scale * std::exp(-decay * s.z(k)) * (level + acc / std::sqrt(wsum));
            }
        }
        const auto rep = sup_embedding_check(s);
        if (rep.pass) ++passed;
        min_margin = std::min(min_margin, rep.margin / std::max(rep.sup_norm, 1e-300));
    }
    return {passed == static_cast<std::size_t>(trials),
            fmt("%.0f / 1000 surfaces pass, smallest relative margin %.3f", static_cast<double>(passed), min_margin)};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_out = argv[1];
    fs::create_directories(g_out);

    report(1, "Laplace exponent oracle", criterion_1);
    report(2, "Derivative consistency", criterion_2);
    report(3, "Classical Gaussian drift", criterion_3);
    report(4, "Constant-volatility closed form", criterion_4);
    report(5, "Martingale acceptance", criterion_5);
    report(6, "Martingale falsification", criterion_6);

    const auto ef = load_config(kFixtures / "example_family.cfg");
    const auto ef_batch = batch_for(ef, 100);
    report(7, "Positivity", [&] { return criterion_7(ef_batch, ef); });
    report(8, "Monotonicity", [&] { return criterion_8(ef_batch, ef); });
    report(9, "Monotonicity falsification", criterion_9);
    report(10, "Condition-certifier fixtures", criterion_10);
    report(11, "Loss-process oracles", criterion_11);
    report(12, "Embedding inequality", criterion_12);

    std::printf("%d of 12 criteria failed\n", g_failed);
    return g_failed == 0 ? 0 : 1;
}
