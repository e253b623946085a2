#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdolab/certify.hpp"
#include "cdolab/hjmm.hpp"
#include "cdolab/levy.hpp"
#include "cdolab/statespace.hpp"
#include "cdolab/volatility.hpp"

#include "json.hpp"

namespace cdolab {

/// Everything a run needs, with every default filled in.
struct ScenarioConfig {
    nlohmann::json triplet_json;
    nlohmann::json volatility_json;
    LevyTriplet triplet;
    VolatilitySpec volatility = VolatilitySpec::constant(1, 0.0);
    Geometry geometry;
    double eps = 1e-3;
    nlohmann::json r0_json;
    ForwardSurface r0;
    double horizon = 1.0;
    std::size_t n_paths = 100;
    std::optional<std::uint64_t> seed;
    DriftConvention drift_convention = DriftConvention::Bare;
    bool no_drift = false;
    std::vector<double> maturities;
    std::vector<double> snapshots;
    std::size_t checkpoints = 10;
    double threshold = 3.0;
    double audit_rel_tol = 1e-6;
    bool coupled_loss = true;
    bool martingale = true;
    std::vector<std::string> checks{"P1", "P2", "M1", "M2"};
    std::vector<std::string> audits;  // positivity, ordering, prices, compensator
    SamplingBoxes boxes;
    double laplace_z_min = 0.0;
    double laplace_z_max = 5.0;
    std::size_t laplace_points = 101;
    std::filesystem::path output_dir = "cdolab_out";
};

/// Parses the JSON config text; relative file references resolve against `base_dir`.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ScenarioConfig load_config(const std::filesystem::path& path);

LevyTriplet parse_triplet(const nlohmann::json& j);
VolatilitySpec parse_volatility(const nlohmann::json& j, std::size_t n_ratings);

HjmmModel build_model(const ScenarioConfig& cfg);

/// The resolved config as JSON, defaults included.
nlohmann::json config_to_json(const ScenarioConfig& cfg);

/// Names accepted in "checks".
const std::vector<std::string>& known_checks();
/// Condition names covered by a requested check name.
std::vector<std::string> expand_check(const std::string& name);

std::string to_string(DriftConvention c);
DriftConvention parse_drift_convention(const std::string& s);

}  // namespace cdolab
