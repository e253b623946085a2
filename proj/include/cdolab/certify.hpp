#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdolab/levy.hpp"
#include "cdolab/report.hpp"
#include "cdolab/volatility.hpp"

namespace cdolab {

struct Witness {
    double t = 0.0;
    double z = 0.0;
    double l = 0.0;
    std::vector<double> r;
    double u = 0.0;
    std::size_t i = 0;
    double violation = 0.0;  // amount by which the inequality is broken
};

struct ConditionResult {
    std::string name;
    Verdict verdict = Verdict::Pass;
    std::optional<Witness> witness;
    double worst = 0.0;  // largest signed violation seen (<= 0 when it holds everywhere)
    std::size_t points = 0;
    std::string note;
};

struct CertificationReport {
    std::vector<ConditionResult> conditions;
    std::map<std::string, double> constants;
    std::vector<std::string> flags;
    double u_lo = 0.0;
    double u_hi = 0.0;
    std::size_t u_count = 0;

    const ConditionResult* find(const std::string& name) const;
    Verdict verdict(const std::string& name) const;
    Verdict overall() const;
    void merge(const CertificationReport& other);
};

/// Where the "for all" quantifiers are sampled.
struct SamplingBoxes {
    double t_max = 10.0;
    double z_max = 10.0;
    std::vector<double> l_values{0.0};
    double r_max = 5.0;
    std::size_t points_per_axis = 9;
    std::size_t lhs_points = 1000;
    std::size_t max_r_tensor = 4096;  // beyond this the r-tensor is subsampled
    std::uint64_t seed = 0x5eed;
    /// Points re-tested on top of the grid (e.g. witnesses from a coarser run).
    std::vector<Witness> extra;
};

struct SamplePoint {
    double t, z, l;
    std::vector<double> r;
};

/// Tensor grid over (t, z, l, r) plus Latin-hypercube points plus `extra`.
std::vector<SamplePoint> sample_points(const SamplingBoxes& boxes, std::size_t n);

/// Jump sizes standing in for supp(nu): atoms, 64 density quantiles and the
/// finite support endpoints.
std::vector<double> jump_samples(const LevyTriplet& t);

CertificationReport check_P1_P2(const VolatilitySpec& spec, const LevyTriplet& t, const SamplingBoxes& boxes);
CertificationReport check_M1_M2(const VolatilitySpec& spec, const LevyTriplet& t, const SamplingBoxes& boxes);
CertificationReport check_derivative_conditions(const VolatilitySpec& spec, const LevyTriplet& t,
                                                const SamplingBoxes& boxes);
/// constants: C_LC, K (needs gamma), g_hat, C_LGC, C_B3, grad_max.
CertificationReport estimate_regularity_constants(const VolatilitySpec& spec, const SamplingBoxes& boxes,
                                                  double gamma);
/// The six sufficient conditions of the multiplicative example family,
/// checked on declared bounds and sampled factor functions.
CertificationReport check_example_conditions(const VolatilitySpec& spec, const LevyTriplet& t,
                                             const SamplingBoxes& boxes);

/// Relative floating-point slack used by every inequality.
inline double slack(double scale) { return 1e-10 * (1.0 + scale); }

}  // namespace cdolab
