#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cdolab/certify.hpp"
#include "cdolab/hjmm.hpp"
#include "cdolab/levy.hpp"
#include "cdolab/market.hpp"
#include "cdolab/statespace.hpp"
#include "cdolab/verify.hpp"

#include "json.hpp"

namespace cdolab {

/// Shortest text that reads back to the same double.
std::string fmt(double v);

/// Header z,x_1,...,x_n; one row per grid point.
void write_surface_csv(const std::filesystem::path& path, const ForwardSurface& s);
ForwardSurface read_surface_csv(const std::filesystem::path& path, double gamma, const RatingLadder& ladder);

/// Header t,r0_x1,...,r0_xn.
void write_short_end_csv(const std::filesystem::path& path, const ScenarioResult& r);
/// Header jump_time,new_level.
void write_loss_csv(const std::filesystem::path& path, const LossPath& loss);
/// Header T,x,price,discounted_price.
void write_prices_csv(const std::filesystem::path& path, const PriceGrid& g, const RatingLadder& ladder);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

nlohmann::json to_json(const Witness& w);
nlohmann::json to_json(const CertificationReport& r);
nlohmann::json to_json(const MomentReport& r);
nlohmann::json to_json(const MartingaleReport& r);
nlohmann::json to_json(const AuditReport& r);
nlohmann::json to_json(const PriceAuditReport& r);
nlohmann::json to_json(const CompensatorReport& r);

/// t,maturity,rating,mean,std_error,normalized rows for plotting.
std::string martingale_means_csv(const MartingaleReport& r);

}  // namespace cdolab
