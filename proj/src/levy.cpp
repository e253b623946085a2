#include "cdolab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "cdolab/errors.hpp"

namespace cdolab {
namespace {

using quad::TailStatus;

MeasureIntegral merge(MeasureIntegral a, const MeasureIntegral& b) {
    if (a.status == TailStatus::Divergent || b.status == TailStatus::Divergent) {
        return {kInf, TailStatus::Divergent};
    }
    a.value += b.value;
    if (b.status == TailStatus::Indeterminate) a.status = TailStatus::Indeterminate;
    return a;
}

MeasureIntegral finite_piece(const quad::Integrand& g, double a, double b, const quad::Options& opts) {
    if (!(b > a)) return {};
    const quad::Result r = quad::integrate(g, a, b, opts);
    if (!std::isfinite(r.value)) return {kInf, TailStatus::Divergent};
    return {r.value, r.converged ? TailStatus::Finite : TailStatus::Indeterminate};
}

// Integral of g over [lo, hi] on the positive half line (hi may be infinite).
MeasureIntegral half_line(const quad::Integrand& g, double lo, double hi, const quad::Options& opts) {
    if (!(hi > lo)) return {};
    MeasureIntegral out;
    if (std::isfinite(hi)) {
        if (lo < 1.0 && hi > 1.0) {
            out = merge(finite_piece(g, lo, 1.0, opts), finite_piece(g, 1.0, hi, opts));
        } else {
            out = finite_piece(g, lo, hi, opts);
        }
        return out;
    }
    const double start = std::max(lo, 1.0);
    out = finite_piece(g, lo, start, opts);
    const quad::TailResult tail = quad::integrate_to_infinity(g, start, opts);
    MeasureIntegral t{tail.value, tail.status};
    if (tail.status == TailStatus::Divergent) t.value = kInf;
    return merge(out, t);
}

double j_integrand(double z, double y) {
    const double w = z * y;
    if (std::abs(y) < 1.0) {
        if (std::abs(w) < 1e-4) return w * w * (0.5 - w / 6.0);
        return std::expm1(-w) + w;
    }
    return std::expm1(-w);
}

double j1_integrand(double z, double y) {
    if (std::abs(y) < 1.0) return -y * std::expm1(-z * y);
    return -y * std::exp(-z * y);
}

double jk_integrand(double z, double y, int order) {
    const double e = std::exp(-z * y);
    return order == 2 ? y * y * e : -y * y * y * e;
}

}  // namespace

// ---------------------------------------------------------------------------

Density Density::exp_tilted(double c, double rate, double lo, double hi) {
    if (!(c > 0.0)) throw ConfigError("exp_tilted density needs c > 0");
    if (!(lo < hi)) throw ConfigError("exp_tilted density needs lo < hi");
    Density d;
    d.name = "exp_tilted";
    d.params = {c, rate};
    d.fn = [c, rate](double y) { return c * std::exp(-rate * y); };
    d.lo = lo;
    d.hi = hi;
    return d;
}

Density Density::uniform(double mass, double lo, double hi) {
    if (!(mass > 0.0)) throw ConfigError("uniform density needs positive mass");
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
        throw ConfigError("uniform density needs a finite interval lo < hi");
    }
    Density d;
    d.name = "uniform";
    d.params = {mass};
    const double height = mass / (hi - lo);
    d.fn = [height](double) { return height; };
    d.lo = lo;
    d.hi = hi;
    return d;
}

LevyMeasure::LevyMeasure(std::vector<Atom> atoms, std::optional<Density> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
    bool first = true;
    for (const Atom& at : atoms_) {
        if (!(at.mass > 0.0) || !std::isfinite(at.mass)) throw ConfigError("atom mass must be positive");
        if (at.location == 0.0 || !std::isfinite(at.location)) {
            throw ConfigError("atom location must be finite and nonzero");
        }
        support_lo_ = first ? at.location : std::min(support_lo_, at.location);
        support_hi_ = first ? at.location : std::max(support_hi_, at.location);
        first = false;
    }
    if (density_) {
        if (!density_->fn) throw ConfigError("density has no function");
        if (!(density_->lo < density_->hi)) throw ConfigError("density support must satisfy lo < hi");
        support_lo_ = first ? density_->lo : std::min(support_lo_, density_->lo);
        support_hi_ = first ? density_->hi : std::max(support_hi_, density_->hi);
    }
}

LevyTriplet::LevyTriplet(double a, double q, LevyMeasure nu) : a_(a), q_(q), nu_(std::move(nu)) {
    if (!std::isfinite(a_)) throw ConfigError("drift a must be finite");
    if (!(q_ >= 0.0) || !std::isfinite(q_)) throw ConfigError("Gaussian coefficient q must be >= 0");
}

bool LevyTriplet::is_subordinator() const {
    if (q_ != 0.0) return false;
    if (nu_.empty()) return a_ >= 0.0;
    if (nu_.support_lo() < 0.0) return false;
    const MeasureIntegral small =
        integrate_measure(nu_, [](double y) { return y; }, AbsBand{0.0, 1.0, false, false});
    if (small.status != TailStatus::Finite) return false;
    return a_ - small.value >= 0.0;
}

quad::Options default_quadrature() { return quad::Options{}; }

bool AbsBand::contains(double y) const {
    const double m = std::abs(y);
    const bool above = lo_closed ? m >= lo : m > lo;
    const bool below = hi_closed ? m <= hi : m < hi;
    return above && below;
}

MeasureIntegral integrate_measure(const LevyMeasure& nu, const std::function<double(double)>& phi,
                                  const AbsBand& band, const quad::Options& opts) {
    MeasureIntegral out;
    for (const Atom& at : nu.atoms()) {
        if (!band.contains(at.location)) continue;
        const double v = at.mass * phi(at.location);
        if (!std::isfinite(v)) return {kInf, TailStatus::Divergent};
        out.value += v;
    }
    if (!nu.density()) return out;

    const Density& d = *nu.density();
    quad::Options o = opts;
    o.max_evals = std::min(opts.max_evals, d.node_budget);
    // Positive jumps.
    {
        const double lo = std::max({band.lo, d.lo, 0.0});
        const double hi = std::min(band.hi, d.hi);
        auto g = [&](double y) { return phi(y) * d.fn(y); };
        out = merge(out, half_line(g, lo, hi, o));
    }
    // Negative jumps, mirrored onto the positive half line.
    {
        const double lo = std::max({band.lo, -d.hi, 0.0});
        const double hi = std::min(band.hi, -d.lo);
        auto g = [&](double w) { return phi(-w) * d.fn(-w); };
        out = merge(out, half_line(g, lo, hi, o));
    }
    return out;
}

// ---------------------------------------------------------------------------

MeasureIntegral big_jump_exponential_moment(const LevyTriplet& t, double z, const quad::Options& opts) {
    return integrate_measure(t.nu(), [z](double y) { return std::exp(-z * y); }, AbsBand{1.0, kInf, true, false},
                             opts);
}

bool in_domain(const LevyTriplet& t, double z, const quad::Options& opts) {
    if (z == 0.0) return true;
    const MeasureIntegral m = big_jump_exponential_moment(t, z, opts);
    if (m.status == TailStatus::Indeterminate) {
        throw IndeterminateError("cannot decide whether z = " + std::to_string(z) + " lies in the domain");
    }
    return m.status == TailStatus::Finite;
}

double laplace_exponent(const LevyTriplet& t, double z, const quad::Options& opts) {
    if (z == 0.0) return 0.0;
    if (!in_domain(t, z, opts)) return kInf;
    const double base = -t.a() * z + 0.5 * t.q() * z * z;
    const MeasureIntegral jumps =
        integrate_measure(t.nu(), [z](double y) { return j_integrand(z, y); }, AbsBand{}, opts);
    if (jumps.status == TailStatus::Divergent) return kInf;
    if (jumps.status == TailStatus::Indeterminate) {
        throw IndeterminateError("Laplace exponent quadrature did not converge at z = " + std::to_string(z));
    }
    return base + jumps.value;
}

double laplace_derivative(const LevyTriplet& t, double z, int order, const quad::Options& opts) {
    if (order < 1 || order > 3) throw ConfigError("Laplace exponent derivative order must be 1, 2 or 3");
    double base = 0.0;
    std::function<double(double)> phi;
    switch (order) {
        case 1:
            base = -t.a() + t.q() * z;
            phi = [z](double y) { return j1_integrand(z, y); };
            break;
        case 2:
            base = t.q();
            phi = [z](double y) { return jk_integrand(z, y, 2); };
            break;
        default:
            phi = [z](double y) { return jk_integrand(z, y, 3); };
            break;
    }
    const MeasureIntegral jumps = integrate_measure(t.nu(), phi, AbsBand{}, opts);
    if (jumps.status == TailStatus::Divergent || !std::isfinite(jumps.value)) {
        throw DomainError("z = " + std::to_string(z) + " is outside the domain of J^(" + std::to_string(order) +
                          ")");
    }
    if (jumps.status == TailStatus::Indeterminate) {
        throw IndeterminateError("J^(" + std::to_string(order) + ") quadrature did not converge at z = " +
                                 std::to_string(z));
    }
    return base + jumps.value;
}

// ---------------------------------------------------------------------------

LaplaceEvaluator::LaplaceEvaluator(LevyTriplet t, quad::Options opts) : triplet_(std::move(t)), opts_(opts) {}

double LaplaceEvaluator::density_part(double x) const {
    if (!triplet_.nu().density()) return 0.0;
    const LevyMeasure only_density({}, triplet_.nu().density());
    const MeasureIntegral m =
        integrate_measure(only_density, [x](double y) { return j1_integrand(x, y); }, AbsBand{}, opts_);
    if (m.status == TailStatus::Divergent || !std::isfinite(m.value)) {
        throw DomainError("x = " + std::to_string(x) + " is outside the domain of J'");
    }
    if (m.status == TailStatus::Indeterminate) {
        throw IndeterminateError("J' quadrature did not converge at x = " + std::to_string(x));
    }
    return m.value;
}

void LaplaceEvaluator::tabulate(double lo, double hi) {
    nodes_.clear();
    slopes_.clear();
    valid_.clear();
    if (!triplet_.nu().density() || !(hi > lo)) return;

    const LevyMeasure only_density({}, triplet_.nu().density());
    auto slope_at = [&](double x) {
        const MeasureIntegral m = integrate_measure(
            only_density, [x](double y) { return jk_integrand(x, y, 2); }, AbsBand{}, opts_);
        if (m.status != TailStatus::Finite) throw DomainError("J'' unavailable");
        return m.value;
    };

    for (std::size_t n = 257;; n = 2 * n - 1) {
        const double h = (hi - lo) / static_cast<double>(n - 1);
        std::vector<double> v(n), s(n);
        std::vector<char> ok(n, 1);
        for (std::size_t k = 0; k < n; ++k) {
            const double x = lo + h * static_cast<double>(k);
            try {
                v[k] = density_part(x);
                s[k] = slope_at(x);
            } catch (const Error&) {
                ok[k] = 0;
            }
        }
        table_lo_ = lo;
        table_step_ = h;
        nodes_ = std::move(v);
        slopes_ = std::move(s);
        valid_ = std::move(ok);

        // Check the interpolant at a spread of cell midpoints.
        double worst = 0.0;
        const std::size_t stride = std::max<std::size_t>(1, (n - 1) / 64);
        for (std::size_t k = 0; k + 1 < n; k += stride) {
            if (!valid_[k] || !valid_[k + 1]) continue;
            const double x = lo + h * (static_cast<double>(k) + 0.5);
            try {
                const double exact = density_part(x);
                const double approx = 0.5 * (nodes_[k] + nodes_[k + 1]) + 0.125 * h * (slopes_[k] - slopes_[k + 1]);
                worst = std::max(worst, std::abs(exact - approx) / (1.0 + std::abs(exact)));
            } catch (const Error&) {
            }
        }
        if (worst <= 1e-9 || n > 16384) return;
    }
}

double LaplaceEvaluator::first_derivative(double x) const {
    double value = -triplet_.a() + triplet_.q() * x;
    for (const Atom& at : triplet_.nu().atoms()) value += at.mass * j1_integrand(x, at.location);
    if (!std::isfinite(value)) throw DomainError("x = " + std::to_string(x) + " is outside the domain of J'");
    if (!triplet_.nu().density()) return value;

    if (!nodes_.empty()) {
        const double pos = (x - table_lo_) / table_step_;
        const auto last = static_cast<double>(nodes_.size() - 1);
        if (pos >= 0.0 && pos <= last) {
            auto k = static_cast<std::size_t>(std::floor(pos));
            if (k + 1 >= nodes_.size()) k = nodes_.size() - 2;
            if (valid_[k] && valid_[k + 1]) {
                const double s = pos - static_cast<double>(k);
                const double h = table_step_;
                const double s2 = s * s;
                const double s3 = s2 * s;
                return value + (2 * s3 - 3 * s2 + 1) * nodes_[k] + (s3 - 2 * s2 + s) * h * slopes_[k] +
                       (-2 * s3 + 3 * s2) * nodes_[k + 1] + (s3 - s2) * h * slopes_[k + 1];
            }
        }
    }
    return value + density_part(x);
}

// ---------------------------------------------------------------------------

const MomentCheck* MomentReport::find(const std::string& name) const {
    for (const MomentCheck& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

Verdict MomentReport::verdict(const std::string& name) const {
    const MomentCheck* c = find(name);
    return c ? c->verdict : Verdict::Indeterminate;
}

namespace {

MomentCheck finiteness(std::string name, const MeasureIntegral& m) {
    MomentCheck c{std::move(name), Verdict::Pass, m.value, ""};
    if (m.status == TailStatus::Divergent) {
        c.verdict = Verdict::Fail;
        c.note = "integral diverges";
    } else if (m.status == TailStatus::Indeterminate) {
        c.verdict = Verdict::Indeterminate;
        c.note = "quadrature budget exhausted";
    }
    return c;
}

}  // namespace

MomentReport check_moment_conditions(const LevyTriplet& t, std::optional<double> exp_constant,
                                     const quad::Options& opts) {
    MomentReport rep;
    const LevyMeasure& nu = t.nu();
    const AbsBand all{};
    const AbsBand big{1.0, kInf, true, false};

    rep.checks.push_back(finiteness(
        "levy_integrability", integrate_measure(nu, [](double y) { return std::min(y * y, 1.0); }, all, opts)));
    rep.checks.push_back(
        finiteness("second_moment_tail", integrate_measure(nu, [](double y) { return y * y; }, big, opts)));
    const MomentCheck third =
        finiteness("third_moment_tail", integrate_measure(nu, [](double y) { return std::abs(y * y * y); }, big, opts));
    rep.checks.push_back(third);

    const double lo = nu.empty() ? 0.0 : nu.support_lo();
    rep.checks.push_back({"support_above_minus_one", lo >= -1.0 ? Verdict::Pass : Verdict::Fail, lo,
                          lo >= -1.0 ? "" : "support reaches below -1"});

    if (exp_constant) {
        const double c = *exp_constant;
        MomentCheck e = finiteness(
            "exponential_moment", integrate_measure(nu, [c](double y) { return y * y * std::exp(c * y); }, big, opts));
        e.note += (e.note.empty() ? "" : "; ") + std::string("exponent constant ") + std::to_string(c);
        rep.checks.push_back(std::move(e));
    }

    const bool nonneg_support = nu.empty() || nu.support_lo() >= 0.0;
    auto subordinator_check = [&](std::string name, int power) {
        const MeasureIntegral m = integrate_measure(
            nu, [power](double y) { return std::max(std::abs(y), std::pow(std::abs(y), power)); }, all, opts);
        MomentCheck c = finiteness(std::move(name), m);
        if (t.q() != 0.0) {
            c.verdict = Verdict::Fail;
            c.note = "Gaussian part present";
        } else if (!nonneg_support) {
            c.verdict = Verdict::Fail;
            c.note = "negative jumps in support";
        }
        return c;
    };
    rep.checks.push_back(subordinator_check("subordinator_l2", 2));
    rep.checks.push_back(subordinator_check("subordinator_h1", 3));

    const bool sub = t.is_subordinator();
    rep.checks.push_back({"subordinator", sub ? Verdict::Pass : Verdict::Fail, sub ? 1.0 : 0.0,
                          sub ? "" : "not a subordinator (q > 0, negative jumps or negative net drift)"});
    return rep;
}

// ---------------------------------------------------------------------------

double LevyIncrement::total() const {
    double s = continuous;
    for (double j : jumps) s += j;
    return s;
}

JumpSizeSampler::JumpSizeSampler(const LevyMeasure& nu, double cutoff, const quad::Options& opts) {
    for (const Atom& at : nu.atoms()) {
        if (std::abs(at.location) <= cutoff) continue;
        atoms_.push_back(at);
        atom_mass_ += at.mass;
        atom_cdf_.push_back(atom_mass_);
    }
    if (!nu.density()) return;
    const Density& d = *nu.density();

    constexpr std::size_t kCells = 2048;
    // Cells on one half line [a, b]; `sign` maps them back to jump sizes.
    auto build_side = [&](double a, double b, double sign) {
        if (!(b > a)) return;
        auto g = [&](double w) { return d.fn(sign * w); };
        quad::Options cell_opts = opts;
        cell_opts.max_evals = 400;
        if (!std::isfinite(b)) {
            // Truncate where the remaining mass is negligible.
            double lo = std::max(a, 1.0);
            double mass = quad::integrate(g, a, lo, cell_opts).value;
            for (int k = 0; k < 200; ++k) {
                const double panel = quad::integrate(g, lo, 2.0 * lo, cell_opts).value;
                mass += panel;
                lo *= 2.0;
                if (panel <= 1e-15 * mass) break;
            }
            b = lo;
        }
        std::vector<double> edges(kCells + 1);
        const bool geometric = a > 0.0 && b / a > 10.0;
        for (std::size_t k = 0; k <= kCells; ++k) {
            const double s = static_cast<double>(k) / kCells;
            edges[k] = geometric ? a * std::pow(b / a, s) : a + (b - a) * s;
        }
        std::vector<std::pair<double, double>> side;
        std::vector<double> masses;
        for (std::size_t k = 0; k < kCells; ++k) {
            const double m = quad::integrate(g, edges[k], edges[k + 1], cell_opts).value;
            side.emplace_back(sign * edges[k], sign * edges[k + 1]);
            masses.push_back(std::max(m, 0.0));
        }
        if (sign < 0.0) {
            std::reverse(side.begin(), side.end());
            std::reverse(masses.begin(), masses.end());
        }
        for (std::size_t k = 0; k < side.size(); ++k) {
            const auto [l, r] = side[k];
            cells_.push_back(std::min(l, r));
            cells_.push_back(std::max(l, r));
            density_mass_ += masses[k];
            cell_cdf_.push_back(density_mass_);
        }
    };
    // Negative side first so cells stay ordered by location.
    build_side(std::max({cutoff, -d.hi, 0.0}), -d.lo, -1.0);
    build_side(std::max({cutoff, d.lo, 0.0}), d.hi, 1.0);
}

double JumpSizeSampler::sample_density(double u) const {
    const auto it = std::upper_bound(cell_cdf_.begin(), cell_cdf_.end(), u);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cell_cdf_.begin()), cell_cdf_.size() - 1);
    const double prev = k == 0 ? 0.0 : cell_cdf_[k - 1];
    const double width = cell_cdf_[k] - prev;
    const double frac = width > 0.0 ? std::clamp((u - prev) / width, 0.0, 1.0) : 0.5;
    return cells_[2 * k] + frac * (cells_[2 * k + 1] - cells_[2 * k]);
}

double JumpSizeSampler::sample(Engine& rng) const {
    std::uniform_real_distribution<double> uni(0.0, total_mass());
    const double v = uni(rng);
    if (v < atom_mass_ || cell_cdf_.empty()) {
        const auto it = std::upper_bound(atom_cdf_.begin(), atom_cdf_.end(), v);
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - atom_cdf_.begin()), atoms_.size() - 1);
        return atoms_[k].location;
    }
    return sample_density(v - atom_mass_);
}

std::vector<double> JumpSizeSampler::density_quantiles(std::size_t count) const {
    std::vector<double> out;
    if (cell_cdf_.empty() || density_mass_ <= 0.0) return out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(sample_density((static_cast<double>(k) + 0.5) / static_cast<double>(count) * density_mass_));
    }
    return out;
}

IncrementSampler::IncrementSampler(const LevyTriplet& t, double dt, double eps, const quad::Options& opts)
    : dt_(dt), eps_(eps) {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (!(eps > 0.0)) throw ConfigError("small-jump cutoff eps must be positive");
    const LevyMeasure& nu = t.nu();
    if (!nu.empty()) {
        const MeasureIntegral m = integrate_measure(nu, [](double y) { return y; }, AbsBand{eps, 1.0, false, false}, opts);
        if (m.status != quad::TailStatus::Finite) throw IndeterminateError("compensator m_eps did not converge");
        m_eps_ = m.value;
        const MeasureIntegral v =
            integrate_measure(nu, [](double y) { return y * y; }, AbsBand{0.0, eps, false, true}, opts);
        dropped_variance_ = v.status == quad::TailStatus::Finite ? v.value : kInf;
        jumps_ = JumpSizeSampler(nu, eps, opts);
    }
    pure_diffusion_ = jumps_.total_mass() <= 0.0;
    drift_ = (t.a() - m_eps_) * dt_;
    diffusion_ = std::sqrt(t.q() * dt_);
}

void IncrementSampler::draw(Engine& rng, LevyIncrement& out) const {
    out.continuous = drift_;
    out.jumps.clear();
    if (diffusion_ > 0.0) {
        std::normal_distribution<double> normal(0.0, 1.0);
        out.continuous += diffusion_ * normal(rng);
    }
    const double mean = jumps_.total_mass() * dt_;
    if (mean > 0.0) {
        std::poisson_distribution<long> count(mean);
        const long n = count(rng);
        for (long k = 0; k < n; ++k) out.jumps.push_back(jumps_.sample(rng));
    }
}

IncrementSeries simulate_increments(const LevyTriplet& t, double dt, std::size_t n_steps, double eps,
                                    std::uint64_t seed) {
    const IncrementSampler sampler(t, dt, eps);
    Engine rng(seed);
    IncrementSeries out;
    out.values.reserve(n_steps);
    out.pure_diffusion = sampler.pure_diffusion();
    out.dropped_variance = sampler.dropped_variance();
    LevyIncrement inc;
    for (std::size_t k = 0; k < n_steps; ++k) {
        sampler.draw(rng, inc);
        out.jump_count += inc.jumps.size();
        out.values.push_back(inc.total());
    }
    return out;
}

}  // namespace cdolab
