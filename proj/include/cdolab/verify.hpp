#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cdolab/hjmm.hpp"
#include "cdolab/path_runner.hpp"
#include "cdolab/report.hpp"

namespace cdolab {

/// Batch means of one discounted price process over the checkpoints.
struct MeanSeries {
    std::size_t maturity = 0;  // index into the maturities (unused for compensators)
    std::size_t rating = 0;
    double initial = 0.0;
    std::vector<double> times;
    std::vector<double> means;
    std::vector<double> std_errors;
    std::vector<double> normalized;  // |mean - initial| / std_error
    double max_normalized = 0.0;
};

struct MartingaleReport {
    std::vector<double> maturities;
    std::vector<MeanSeries> series;
    double max_normalized = 0.0;
    double threshold = 3.0;
    std::size_t n_paths = 0;
    bool insufficient_paths = false;  // some standard error above 10% of the initial price
    Verdict verdict = Verdict::Pass;
};

struct MartingaleOptions {
    std::size_t n_paths = 10000;
    double horizon = 1.0;
    std::vector<double> maturities;
    std::size_t checkpoints = 10;
    double threshold = 3.0;
    std::uint64_t seed = 0;
    bool parallel = true;
};

/// Valuation times 0, h/c, 2h/c, ..., h.
std::vector<double> checkpoint_times(double horizon, std::size_t checkpoints);

/// Reduces a batch whose price grids sit at checkpoint_times(...).
MartingaleReport martingale_from_batch(const std::vector<ScenarioResult>& batch, double threshold);
MartingaleReport martingale_test(const HjmmModel& model, const ForwardSurface& r0, const MartingaleOptions& opts);

struct AuditReport {
    AuditPoint min_r;
    AuditPoint min_diff;
    AuditPoint min_short_diff;
    double max_abs_r = 0.0;
    double tolerance = 0.0;  // rel_tol * max|r|
    Verdict positivity = Verdict::Pass;
    Verdict ordering = Verdict::Pass;
    Verdict short_end = Verdict::Pass;
};

AuditReport audit_positivity_monotonicity(const std::vector<ScenarioResult>& batch, double rel_tol = 1e-6);

struct PriceViolation {
    double amount = 0.0;  // largest positive violation
    std::size_t path = 0;
    double t = 0.0;
    std::size_t maturity = 0;
    std::size_t rating = 0;
};

struct PriceAuditReport {
    PriceViolation maturity;  // P increasing in T
    PriceViolation rating;    // P decreasing in x
    double tolerance = 1e-12;
    Verdict verdict = Verdict::Pass;
};

PriceAuditReport price_monotonicity_audit(const std::vector<ScenarioResult>& batch, double tolerance = 1e-12);

/// 1{L_t <= x_i} + int_0^t 1{L_s <= x_i} lambda(s, x_i) ds, batch means of
/// its increments from 0 at each checkpoint.
struct CompensatorReport {
    std::vector<MeanSeries> series;  // one per rating
    double max_normalized = 0.0;
    double threshold = 3.0;
    Verdict verdict = Verdict::Pass;
};

CompensatorReport compensator_test(const std::vector<ScenarioResult>& batch, const RatingLadder& ladder,
                                   std::size_t checkpoints = 10, double threshold = 3.0);

}  // namespace cdolab
