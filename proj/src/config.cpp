#include "cdolab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cdolab/errors.hpp"
#include "cdolab/io.hpp"
#include "cdolab/verify.hpp"

namespace cdolab {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    return j.at(key);
}

double as_extended(const json& v) {
    if (v.is_null()) return kInf;
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
        throw ConfigError("bad support endpoint '" + s + "'");
    }
    return v.get<double>();
}

std::vector<double> doubles(const json& j, const char* what) {
    try {
        return j.get<std::vector<double>>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(what) + " must be a list of numbers");
    }
}

ScalarFunction parse_function(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object {name, params}");
    const auto name = get_or<std::string>(j, "name", "");
    std::optional<double> bound;
    if (j.contains("bound") && !j.at("bound").is_null()) bound = j.at("bound").get<double>();
    const auto params = j.contains("params") ? doubles(j.at("params"), (where + ".params").c_str()) : std::vector<double>{};
    try {
        return ScalarFunction(name, params, bound);
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

json function_json(const ScalarFunction& f) {
    json j{{"name", f.name()}, {"params", f.params()}, {"bound", f.bound()}};
    return j;
}

}  // namespace

std::string to_string(DriftConvention c) { return c == DriftConvention::Bare ? "eq16" : "eq34"; }

DriftConvention parse_drift_convention(const std::string& s) {
    if (s == "eq16" || s == "bare") return DriftConvention::Bare;
    if (s == "eq34" || s == "shifted") return DriftConvention::Shifted;
    throw ConfigError("drift_convention must be bare (eq16) or shifted (eq34), got '" + s + "'");
}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names{
        "P1", "P2", "M1", "M2", "derivative", "example", "LC", "B1", "B2", "LGC", "B3",
        "levy_integrability", "second_moment_tail", "third_moment_tail", "support_above_minus_one",
        "exponential_moment", "subordinator_l2", "subordinator_h1", "subordinator"};
    return names;
}

std::vector<std::string> expand_check(const std::string& name) {
    if (name == "derivative") {
        return {"nonnegativity", "support_lower_bound", "sufficient_growth", "diagonal_derivative_ri",
                "diagonal_derivative_ri1", "m2_clause"};
    }
    if (name == "example") {
        return {"factor_bounds", "h_vanishes_at_zero", "h_i_decreasing", "support_bound_positivity",
                "h_derivative_and_concavity", "support_bound_monotonicity"};
    }
    return {name};
}

LevyTriplet parse_triplet(const json& j) {
    if (!j.is_object()) throw ConfigError("triplet must be an object");
    const double a = get_or<double>(j, "a", 0.0);
    const double q = get_or<double>(j, "q", 0.0);
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
        for (const auto& at : j.at("atoms")) {
            if (!at.is_array() || at.size() != 2) throw ConfigError("each atom must be [location, mass]");
            atoms.push_back({at[0].get<double>(), at[1].get<double>()});
        }
    }
    std::optional<Density> density;
    if (j.contains("density") && !j.at("density").is_null()) {
        const json& d = j.at("density");
        const auto name = get_or<std::string>(d, "name", "");
        const auto params = d.contains("params") ? doubles(d.at("params"), "density.params") : std::vector<double>{};
        double lo = 0.0, hi = kInf;
        if (d.contains("support")) {
            const json& s = d.at("support");
            if (!s.is_array() || s.size() != 2) throw ConfigError("density.support must be [lo, hi]");
            lo = as_extended(s[0]);
            hi = as_extended(s[1]);
        }
        if (name == "exp_tilted") {
            if (params.size() != 2) throw ConfigError("exp_tilted needs params [c, rate]");
            density = Density::exp_tilted(params[0], params[1], lo, hi);
        } else if (name == "uniform") {
            if (params.size() != 1) throw ConfigError("uniform needs params [mass]");
            density = Density::uniform(params[0], lo, hi);
        } else {
            throw ConfigError("unknown density '" + name + "'");
        }
        if (d.contains("nodes")) density->node_budget = d.at("nodes").get<std::size_t>();
    }
    return LevyTriplet(a, q, LevyMeasure(std::move(atoms), std::move(density)));
}

VolatilitySpec parse_volatility(const json& j, std::size_t n_ratings) {
    if (!j.is_object()) throw ConfigError("volatility must be an object");
    const auto kind = get_or<std::string>(j, "kind", "multiplicative");
    const auto one = ScalarFunction::constant(1.0);
    auto factor = [&](const char* key) {
        return j.contains(key) ? parse_function(j.at(key), std::string("volatility.") + key) : one;
    };
    auto list = [&](const char* key) {
        const json& arr = require(j, key);
        if (!arr.is_array()) throw ConfigError(std::string("volatility.") + key + " must be a list");
        std::vector<ScalarFunction> out;
        for (std::size_t k = 0; k < arr.size(); ++k) {
            out.push_back(parse_function(arr[k], std::string("volatility.") + key + "[" + std::to_string(k) + "]"));
        }
        if (out.size() != n_ratings) {
            throw ConfigError(std::string("volatility.") + key + " needs one entry per rating (" +
                              std::to_string(n_ratings) + ")");
        }
        return out;
    };
    if (kind == "constant") {
        return VolatilitySpec::constant(n_ratings, get_or<double>(j, "sigma", 0.0));
    }
    if (kind == "multiplicative") {
        std::optional<double> hp;
        if (j.contains("h_prime_bound")) hp = j.at("h_prime_bound").get<double>();
        return VolatilitySpec::multiplicative(factor("f1"), factor("f2"), factor("f3"), list("h_list"),
                                              parse_function(require(j, "h"), "volatility.h"), hp);
    }
    if (kind == "separable") {
        return VolatilitySpec::separable(factor("f1"), factor("f2"), factor("f3"), list("s_list"));
    }
    throw ConfigError("volatility.kind must be multiplicative, separable or constant (custom is code-level only)");
}

namespace {

ForwardSurface parse_r0(const json& j, const Geometry& g, const std::filesystem::path& base) {
    const auto family = get_or<std::string>(j, "family", "");
    const std::size_t n = g.ladder.size();
    if (family == "flat") {
        const auto v = doubles(require(j, "values"), "r0.values");
        if (v.size() != n) throw ConfigError("r0.values needs one entry per rating");
        return ForwardSurface::from_function(g.dz, g.n_z, g.gamma, g.ladder, [&](double, std::size_t i) { return v[i]; });
    }
    if (family == "nelson_siegel") {
        const auto b0 = doubles(require(j, "beta0"), "r0.beta0");
        const auto b1 = doubles(require(j, "beta1"), "r0.beta1");
        const auto b2 = doubles(require(j, "beta2"), "r0.beta2");
        const double tau = get_or<double>(j, "tau", 1.0);
        if (b0.size() != n || b1.size() != n || b2.size() != n) {
            throw ConfigError("nelson_siegel betas need one entry per rating");
        }
        if (!(tau > 0.0)) throw ConfigError("nelson_siegel tau must be positive");
        return ForwardSurface::from_function(g.dz, g.n_z, g.gamma, g.ladder, [&](double z, std::size_t i) {
            const double e = std::exp(-z / tau);
            return b0[i] + b1[i] * e + b2[i] * (z / tau) * e;
        });
    }
    if (family == "csv") {
        std::filesystem::path p = require(j, "path").get<std::string>();
        if (p.is_relative()) p = base / p;
        if (!std::filesystem::exists(p)) throw ConfigError("r0 file " + p.string() + " does not exist");
        ForwardSurface s = read_surface_csv(p, g.gamma, g.ladder);
        if (s.n_z() != g.n_z || std::abs(s.dz() - g.dz) > 1e-12 * g.dz) {
            throw ConfigError("r0 file grid does not match the configured grid");
        }
        return s;
    }
    throw ConfigError("r0.family must be flat, nelson_siegel or csv");
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        ScenarioConfig c;
        if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();

        c.triplet_json = require(j, "triplet");
        c.triplet = parse_triplet(c.triplet_json);

        c.geometry.ladder = RatingLadder(doubles(require(j, "ladder"), "ladder"));
        const json& grid = require(j, "grid");
        c.geometry.dz = get_or<double>(grid, "dz", 0.01);
        c.geometry.gamma = get_or<double>(grid, "gamma", 1.0);
        if (grid.contains("n_z")) {
            c.geometry.n_z = grid.at("n_z").get<std::size_t>();
        } else {
            const double zmax = get_or<double>(grid, "z_max", 10.0);
            c.geometry.n_z = static_cast<std::size_t>(std::llround(zmax / c.geometry.dz)) + 1;
        }
        if (!(c.geometry.dz > 0.0)) throw ConfigError("grid.dz must be positive");
        if (c.geometry.n_z < 3) throw ConfigError("grid needs at least three points");
        if (!(c.geometry.gamma > 0.0)) throw ConfigError("grid.gamma must be positive");
        if (j.contains("dt") && std::abs(j.at("dt").get<double>() - c.geometry.dz) > 1e-12 * c.geometry.dz) {
            throw ConfigError("dt must equal grid.dz");
        }

        c.volatility_json = require(j, "volatility");
        c.volatility = parse_volatility(c.volatility_json, c.geometry.ladder.size());
        c.eps = get_or<double>(j, "eps", 1e-3);
        if (!(c.eps > 0.0)) throw ConfigError("eps must be positive");

        c.r0_json = require(j, "r0");
        c.r0 = parse_r0(c.r0_json, c.geometry, base_dir);

        c.horizon = get_or<double>(j, "horizon", 1.0);
        if (!(c.horizon > 0.0)) throw ConfigError("horizon must be positive");
        grid_index(c.horizon, c.geometry.dz);
        c.n_paths = get_or<std::size_t>(j, "n_paths", 100);
        if (c.n_paths == 0) throw ConfigError("n_paths must be positive");
        c.drift_convention = parse_drift_convention(get_or<std::string>(j, "drift_convention", "eq16"));
        c.no_drift = get_or<bool>(j, "no_drift", false);
        c.maturities = j.contains("maturities") ? doubles(j.at("maturities"), "maturities") : std::vector<double>{c.horizon};
        for (double T : c.maturities) {
            if (!(T >= c.horizon)) throw ConfigError("maturities must not precede the horizon");
        }
        c.snapshots = j.contains("snapshots") ? doubles(j.at("snapshots"), "snapshots") : std::vector<double>{0.0, c.horizon};
        for (double t : c.snapshots) {
            if (t < 0.0 || t > c.horizon * (1 + 1e-12)) throw ConfigError("snapshot times must lie in [0, horizon]");
            grid_index(t, c.geometry.dz);
        }
        c.checkpoints = get_or<std::size_t>(j, "checkpoints", 10);
        if (c.checkpoints == 0) throw ConfigError("checkpoints must be positive");
        for (double t : checkpoint_times(c.horizon, c.checkpoints)) grid_index(t, c.geometry.dz);
        c.threshold = get_or<double>(j, "threshold", 3.0);
        c.audit_rel_tol = get_or<double>(j, "audit_rel_tol", 1e-6);
        const auto loss = get_or<std::string>(j, "loss", "coupled");
        if (loss != "coupled" && loss != "none") throw ConfigError("loss must be coupled or none");
        c.coupled_loss = loss == "coupled";
        c.martingale = get_or<bool>(j, "martingale", true);

        if (j.contains("checks")) {
            c.checks = j.at("checks").get<std::vector<std::string>>();
        }
        for (const auto& name : c.checks) {
            const auto& known = known_checks();
            if (std::find(known.begin(), known.end(), name) == known.end()) {
                throw ConfigError("unknown check '" + name + "'");
            }
        }
        auto requested = [&](const char* a) { return std::find(c.checks.begin(), c.checks.end(), a) != c.checks.end(); };
        if (j.contains("audits")) {
            c.audits = j.at("audits").get<std::vector<std::string>>();
            for (const auto& a : c.audits) {
                if (a != "positivity" && a != "ordering" && a != "prices" && a != "compensator") throw ConfigError("unknown audit '" + a + "'");
            }
        } else {
            const bool pos = requested("P1") || requested("P2");
            const bool mono = requested("M1") || requested("M2");
            if (pos) c.audits.push_back("positivity");
            if (mono) c.audits.push_back("ordering");
            if (pos && mono) c.audits.push_back("prices");
        }

        const json cert = j.contains("certification") ? j.at("certification") : json::object();
        c.boxes.t_max = get_or<double>(cert, "t_max", (c.geometry.n_z - 1) * c.geometry.dz);
        c.boxes.z_max = get_or<double>(cert, "z_max", (c.geometry.n_z - 1) * c.geometry.dz);
        c.boxes.r_max = get_or<double>(cert, "r_max", 5.0);
        c.boxes.points_per_axis = get_or<std::size_t>(cert, "points_per_axis", 9);
        c.boxes.lhs_points = get_or<std::size_t>(cert, "lhs_points", 1000);
        c.boxes.seed = get_or<std::uint64_t>(cert, "seed", 0x5eed);
        c.boxes.l_values = {0.0};
        for (double x : c.geometry.ladder.values()) c.boxes.l_values.push_back(x);

        const json lap = j.contains("laplace") ? j.at("laplace") : json::object();
        c.laplace_z_min = get_or<double>(lap, "z_min", 0.0);
        c.laplace_z_max = get_or<double>(lap, "z_max", 5.0);
        c.laplace_points = get_or<std::size_t>(lap, "points", 101);

        std::filesystem::path out = get_or<std::string>(j, "output_dir", "cdolab_out");
        if (out.is_relative()) out = base_dir / out;
        c.output_dir = out;
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

HjmmModel build_model(const ScenarioConfig& cfg) {
    return HjmmModel(cfg.triplet, cfg.volatility, cfg.geometry, cfg.eps, cfg.drift_convention, cfg.no_drift);
}

json config_to_json(const ScenarioConfig& c) {
    json vol = c.volatility_json;
    json j;
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    j["triplet"] = c.triplet_json;
    j["volatility"] = vol;
    j["volatility_resolved"] = {{"kind", c.volatility.kind() == VolKind::Multiplicative ? "multiplicative" : "separable"},
                                {"f1", function_json(c.volatility.f1())},
                                {"f2", function_json(c.volatility.f2())},
                                {"f3", function_json(c.volatility.f3())}};
    j["ladder"] = c.geometry.ladder.values();
    j["grid"] = {{"dz", c.geometry.dz}, {"n_z", c.geometry.n_z}, {"gamma", c.geometry.gamma},
                 {"z_max", c.geometry.dz * static_cast<double>(c.geometry.n_z - 1)}};
    j["dt"] = c.geometry.dz;
    j["eps"] = c.eps;
    j["r0"] = c.r0_json;
    j["horizon"] = c.horizon;
    j["n_paths"] = c.n_paths;
    j["drift_convention"] = to_string(c.drift_convention);
    j["no_drift"] = c.no_drift;
    j["maturities"] = c.maturities;
    j["snapshots"] = c.snapshots;
    j["checkpoints"] = c.checkpoints;
    j["threshold"] = c.threshold;
    j["audit_rel_tol"] = c.audit_rel_tol;
    j["loss"] = c.coupled_loss ? "coupled" : "none";
    j["martingale"] = c.martingale;
    j["checks"] = c.checks;
    j["audits"] = c.audits;
    j["certification"] = {{"t_max", c.boxes.t_max},
                          {"z_max", c.boxes.z_max},
                          {"r_max", c.boxes.r_max},
                          {"points_per_axis", c.boxes.points_per_axis},
                          {"lhs_points", c.boxes.lhs_points},
                          {"max_r_tensor", c.boxes.max_r_tensor},
                          {"seed", c.boxes.seed},
                          {"l_values", c.boxes.l_values},
                          {"tolerance", "1e-10 * (1 + scale)"}};
    j["laplace"] = {{"z_min", c.laplace_z_min}, {"z_max", c.laplace_z_max}, {"points", c.laplace_points}};
    j["numerics"] = {{"quadrature_rel_tol", default_quadrature().rel_tol},
                     {"quadrature_node_budget", default_quadrature().max_evals},
                     {"shift_boundary", "flat extrapolation of the last grid value"},
                     {"derivative_scheme", "central inside, first order at the ends"},
                     {"seed_rule", "splitmix64(seed ^ splitmix64(path_index))"},
                     {"discount", "left Riemann sum of r(s,0,1)"}};
    j["output_dir"] = c.output_dir.string();
    return j;
}

}  // namespace cdolab
