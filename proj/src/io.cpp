#include "cdolab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cdolab/errors.hpp"

namespace cdolab {

using nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

// JSON has no inf/nan; those go out as strings.
json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

json mean_series(const MeanSeries& s) {
    json j{{"maturity_index", s.maturity}, {"rating", s.rating}, {"initial", num(s.initial)},
           {"max_normalized", num(s.max_normalized)}};
    json pts = json::array();
    for (std::size_t c = 0; c < s.times.size(); ++c) {
        pts.push_back({{"t", s.times[c]}, {"mean", num(s.means[c])}, {"std_error", num(s.std_errors[c])},
                       {"normalized", num(s.normalized[c])}});
    }
    j["checkpoints"] = pts;
    return j;
}

json audit_point(const AuditPoint& a) {
    return {{"value", num(a.value)}, {"t", a.t}, {"z", a.z}, {"rating", a.i}, {"path", a.path}};
}

}  // namespace

void write_surface_csv(const std::filesystem::path& path, const ForwardSurface& s) {
    auto out = open_out(path);
    out << "z";
    for (std::size_t i = 0; i < s.n_ratings(); ++i) out << ",x_" << (i + 1);
    out << '\n';
    for (std::size_t k = 0; k < s.n_z(); ++k) {
        out << fmt(s.z(k));
        for (std::size_t i = 0; i < s.n_ratings(); ++i) out << ',' << fmt(s.at(k, i));
        out << '\n';
    }
}

ForwardSurface read_surface_csv(const std::filesystem::path& path, double gamma, const RatingLadder& ladder) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path.string() + " is empty");
    std::vector<double> zs;
    std::vector<double> vals;
    const std::size_t n = ladder.size();
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": not a number");
            }
        }
        if (row.size() != n + 1) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(n + 1) +
                              " columns");
        }
        zs.push_back(row[0]);
        vals.insert(vals.end(), row.begin() + 1, row.end());
    }
    if (zs.size() < 3) throw ConfigError(path.string() + " needs at least three rows");
    const double dz = zs[1] - zs[0];
    if (std::abs(zs[0]) > 1e-12 || !(dz > 0.0)) throw ConfigError(path.string() + ": grid must start at 0 and increase");
    for (std::size_t k = 0; k < zs.size(); ++k) {
        if (std::abs(zs[k] - dz * static_cast<double>(k)) > 1e-9 * (1.0 + zs[k])) {
            throw ConfigError(path.string() + ": z column is not uniform");
        }
    }
    ForwardSurface s(dz, zs.size(), gamma, ladder);
    s.values() = std::move(vals);
    return s;
}

void write_short_end_csv(const std::filesystem::path& path, const ScenarioResult& r) {
    auto out = open_out(path);
    const std::size_t n = r.short_end.empty() ? 0 : r.short_end.front().size();
    out << "t";
    for (std::size_t i = 0; i < n; ++i) out << ",r0_x" << (i + 1);
    out << '\n';
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        out << fmt(r.times[k]);
        for (double v : r.short_end[k]) out << ',' << fmt(v);
        out << '\n';
    }
}

void write_loss_csv(const std::filesystem::path& path, const LossPath& loss) {
    auto out = open_out(path);
    out << "jump_time,new_level\n";
    for (std::size_t k = 0; k < loss.jump_times.size(); ++k) {
        out << fmt(loss.jump_times[k]) << ',' << fmt(loss.levels[k]) << '\n';
    }
}

void write_prices_csv(const std::filesystem::path& path, const PriceGrid& g, const RatingLadder& ladder) {
    auto out = open_out(path);
    out << "T,x,price,discounted_price\n";
    for (std::size_t m = 0; m < g.maturities.size(); ++m) {
        for (std::size_t i = 0; i < g.n; ++i) {
            out << fmt(g.maturities[m]) << ',' << fmt(ladder[i]) << ',' << fmt(g.price(m, i)) << ','
                << fmt(g.discounted_price(m, i)) << '\n';
        }
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
}

json to_json(const Witness& w) {
    json r = json::array();
    for (double v : w.r) r.push_back(num(v));
    return {{"t", w.t}, {"z", w.z}, {"l", w.l}, {"r", r}, {"u", num(w.u)}, {"rating", w.i},
            {"violation", num(w.violation)}};
}

json to_json(const CertificationReport& rep) {
    json conds = json::array();
    for (const auto& c : rep.conditions) {
        json j{{"name", c.name}, {"verdict", std::string(to_string(c.verdict))}, {"worst", num(c.worst)},
               {"points", c.points}};
        if (!c.note.empty()) j["note"] = c.note;
        j["witness"] = c.witness ? to_json(*c.witness) : json(nullptr);
        conds.push_back(std::move(j));
    }
    json consts = json::object();
    for (const auto& [k, v] : rep.constants) consts[k] = num(v);
    return {{"conditions", conds},
            {"constants", consts},
            {"flags", rep.flags},
            {"jump_samples", {{"lo", num(rep.u_lo)}, {"hi", num(rep.u_hi)}, {"count", rep.u_count}}},
            {"overall", std::string(to_string(rep.overall()))}};
}

json to_json(const MomentReport& rep) {
    json arr = json::array();
    for (const auto& c : rep.checks) {
        json j{{"name", c.name}, {"verdict", std::string(to_string(c.verdict))}, {"value", num(c.value)}};
        if (!c.note.empty()) j["note"] = c.note;
        arr.push_back(std::move(j));
    }
    return arr;
}

json to_json(const MartingaleReport& r) {
    json series = json::array();
    for (const auto& s : r.series) series.push_back(mean_series(s));
    return {{"verdict", std::string(to_string(r.verdict))},
            {"max_normalized", num(r.max_normalized)},
            {"threshold", r.threshold},
            {"n_paths", r.n_paths},
            {"insufficient_paths", r.insufficient_paths},
            {"maturities", r.maturities},
            {"series", series}};
}

json to_json(const AuditReport& r) {
    return {{"positivity", std::string(to_string(r.positivity))},
            {"ordering", std::string(to_string(r.ordering))},
            {"short_end_ordering", std::string(to_string(r.short_end))},
            {"tolerance", r.tolerance},
            {"max_abs_r", r.max_abs_r},
            {"min_r", audit_point(r.min_r)},
            {"min_ordered_difference", audit_point(r.min_diff)},
            {"min_short_end_difference", audit_point(r.min_short_diff)}};
}

json to_json(const PriceAuditReport& r) {
    auto v = [](const PriceViolation& p) {
        return json{{"amount", num(p.amount)}, {"path", p.path}, {"t", p.t}, {"maturity_index", p.maturity},
                    {"rating", p.rating}};
    };
    return {{"verdict", std::string(to_string(r.verdict))},
            {"tolerance", r.tolerance},
            {"maturity_violation", v(r.maturity)},
            {"rating_violation", v(r.rating)}};
}

json to_json(const CompensatorReport& r) {
    json series = json::array();
    for (const auto& s : r.series) series.push_back(mean_series(s));
    return {{"verdict", std::string(to_string(r.verdict))},
            {"max_normalized", num(r.max_normalized)},
            {"threshold", r.threshold},
            {"series", series}};
}

std::string martingale_means_csv(const MartingaleReport& r) {
    std::ostringstream out;
    out << "t,T,rating,mean,std_error,normalized\n";
    for (const auto& s : r.series) {
        for (std::size_t c = 0; c < s.times.size(); ++c) {
            out << fmt(s.times[c]) << ',' << fmt(r.maturities[s.maturity]) << ',' << (s.rating + 1) << ','
                << fmt(s.means[c]) << ',' << fmt(s.std_errors[c]) << ',' << fmt(s.normalized[c]) << '\n';
        }
    }
    return out.str();
}

}  // namespace cdolab
