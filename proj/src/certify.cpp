#include "cdolab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "cdolab/errors.hpp"

namespace cdolab {

const ConditionResult* CertificationReport::find(const std::string& name) const {
    for (const auto& c : conditions) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

Verdict CertificationReport::verdict(const std::string& name) const {
    const ConditionResult* c = find(name);
    return c ? c->verdict : Verdict::Indeterminate;
}

Verdict CertificationReport::overall() const {
    Verdict v = Verdict::Pass;
    for (const auto& c : conditions) v = combine(v, c.verdict);
    return v;
}

void CertificationReport::merge(const CertificationReport& other) {
    conditions.insert(conditions.end(), other.conditions.begin(), other.conditions.end());
    for (const auto& [k, v] : other.constants) constants[k] = v;
    flags.insert(flags.end(), other.flags.begin(), other.flags.end());
    if (other.u_count > 0) {
        u_lo = other.u_lo;
        u_hi = other.u_hi;
        u_count = other.u_count;
    }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t m) {
    std::vector<double> v(m);
    for (std::size_t k = 0; k < m; ++k) {
        v[k] = m == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1);
    }
    return v;
}

}  // namespace

std::vector<SamplePoint> sample_points(const SamplingBoxes& boxes, std::size_t n) {
    if (boxes.l_values.empty()) throw ConfigError("sampling boxes need at least one loss level");
    const std::size_t m = std::max<std::size_t>(boxes.points_per_axis, 2);
    const auto ts = linspace(0.0, boxes.t_max, m);
    const auto zs = linspace(0.0, boxes.z_max, m);
    const auto rs = linspace(0.0, boxes.r_max, m);

    // r-tensor, subsampled with a fixed seed when too large.
    std::vector<std::vector<double>> r_grid;
    double full = std::pow(static_cast<double>(m), static_cast<double>(n));
    if (full <= static_cast<double>(boxes.max_r_tensor)) {
        const auto total = static_cast<std::size_t>(full);
        for (std::size_t c = 0; c < total; ++c) {
            std::vector<double> r(n);
            std::size_t rem = c;
            for (std::size_t j = 0; j < n; ++j) {
                r[j] = rs[rem % m];
                rem /= m;
            }
            r_grid.push_back(std::move(r));
        }
    } else {
        Engine rng(splitmix64(boxes.seed ^ 0x7e45));
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        r_grid.push_back(std::vector<double>(n, 0.0));
        r_grid.push_back(std::vector<double>(n, boxes.r_max));
        while (r_grid.size() < boxes.max_r_tensor) {
            std::vector<double> r(n);
            for (auto& x : r) x = rs[pick(rng)];
            r_grid.push_back(std::move(r));
        }
    }

    std::vector<SamplePoint> pts;
    pts.reserve(m * m * boxes.l_values.size() * r_grid.size() + boxes.lhs_points + boxes.extra.size());
    for (double t : ts) {
        for (double z : zs) {
            for (double l : boxes.l_values) {
                for (const auto& r : r_grid) pts.push_back({t, z, l, r});
            }
        }
    }

    // Latin hypercube over (t, z, l, r_1..r_n).
    const std::size_t N = boxes.lhs_points;
    if (N > 0) {
        Engine rng(boxes.seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const std::size_t dims = 3 + n;
        std::vector<std::vector<std::size_t>> perm(dims, std::vector<std::size_t>(N));
        for (auto& p : perm) {
            std::iota(p.begin(), p.end(), std::size_t{0});
            std::shuffle(p.begin(), p.end(), rng);
        }
        auto coord = [&](std::size_t d, std::size_t k) {
            return (static_cast<double>(perm[d][k]) + uni(rng)) / static_cast<double>(N);
        };
        for (std::size_t k = 0; k < N; ++k) {
            SamplePoint p;
            p.t = coord(0, k) * boxes.t_max;
            p.z = coord(1, k) * boxes.z_max;
            const auto li = std::min(static_cast<std::size_t>(coord(2, k) * boxes.l_values.size()),
                                     boxes.l_values.size() - 1);
            p.l = boxes.l_values[li];
            p.r.resize(n);
            for (std::size_t j = 0; j < n; ++j) p.r[j] = coord(3 + j, k) * boxes.r_max;
            pts.push_back(std::move(p));
        }
    }
    for (const Witness& w : boxes.extra) {
        if (w.r.size() == n) pts.push_back({w.t, w.z, w.l, w.r});
    }
    return pts;
}

std::vector<double> jump_samples(const LevyTriplet& t) {
    const LevyMeasure& nu = t.nu();
    std::vector<double> u;
    for (const Atom& a : nu.atoms()) u.push_back(a.location);
    if (nu.density()) {
        const LevyMeasure dens({}, nu.density());
        const JumpSizeSampler sampler(dens, 1e-3);
        const auto q = sampler.density_quantiles(64);
        u.insert(u.end(), q.begin(), q.end());
        if (std::isfinite(nu.density()->lo)) u.push_back(nu.density()->lo);
        if (std::isfinite(nu.density()->hi)) u.push_back(nu.density()->hi);
    }
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

// ---------------------------------------------------------------------------

namespace {

struct Candidate {
    double excess = -std::numeric_limits<double>::infinity();  // raw amount the inequality is broken by
    double tol = 0.0;
    Witness w;
    bool unstable = false;

    double score() const { return excess - tol; }
    void offer(double ex, double tl, const SamplePoint& p, const std::vector<double>& r, double u, std::size_t i) {
        if (ex - tl > score()) {
            excess = ex;
            tol = tl;
            w = Witness{p.t, p.z, p.l, r, u, i, ex};
        }
    }
};

// Evaluates `body` at every point in parallel, then reduces serially: the
// worst score wins and ties go to the lowest index.
ConditionResult scan(const std::string& name, const std::vector<SamplePoint>& pts,
                     const std::function<void(const SamplePoint&, Candidate&)>& body) {
    std::vector<Candidate> cand(pts.size());
    const auto n = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t k = 0; k < n; ++k) body(pts[static_cast<std::size_t>(k)], cand[static_cast<std::size_t>(k)]);

    ConditionResult res;
    res.name = name;
    res.points = pts.size();
    const Candidate* best = nullptr;
    bool unstable = false;
    for (const Candidate& c : cand) {
        unstable = unstable || c.unstable;
        if (!std::isfinite(c.excess) && c.excess < 0) continue;
        if (!best || c.score() > best->score()) best = &c;
    }
    if (best) {
        res.worst = best->excess;
        if (best->score() > 0.0) {
            res.verdict = Verdict::Fail;
            res.witness = best->w;
        }
    }
    if (unstable && res.verdict != Verdict::Fail) {
        res.verdict = Verdict::Indeterminate;
        res.note = "derivative estimates disagree across step sizes";
    }
    return res;
}

std::vector<double> sorted_desc(std::vector<double> r) {
    std::sort(r.begin(), r.end(), std::greater<>());
    return r;
}

double g_at(const VolatilitySpec& s, std::size_t i, const SamplePoint& p, const std::vector<double>& r) {
    return s.eval(i, p.t, p.z, p.l, r);
}

struct Derivative {
    double value = 0.0;
    bool stable = true;
};

// One-sided second-order difference of f along `dir` (+1 forward, -1 backward),
// checked at steps h, 2h, 4h.
Derivative one_sided(const std::function<double(double)>& f, double x, double dir) {
    const double h = 1e-6 * (1.0 + std::abs(x));
    const double f0 = f(x);
    auto d = [&](double s) {
        const double step = dir * s;
        return (-3.0 * f0 + 4.0 * f(x + step) - f(x + 2.0 * step)) / (2.0 * step);
    };
    const double d1 = d(h);
    const double d2 = d(2.0 * h);
    const double d4 = d(4.0 * h);
    const double roundoff = 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f0)) / h;
    const double tol = 1e-4 * (1.0 + std::abs(d1)) + roundoff;
    return {d1, std::abs(d1 - d2) <= tol && std::abs(d2 - d4) <= tol};
}

// d g(i, r) / d r_j, one-sided in direction dir.
Derivative partial(std::size_t i, std::vector<double> r, std::size_t j, double dir,
                   const std::function<double(std::size_t, const std::vector<double>&)>& g) {
    const double base = r[j];
    return one_sided(
        [&](double x) {
            r[j] = x;
            return g(i, r);
        },
        base, dir);
}

}  // namespace

// ---------------------------------------------------------------------------

CertificationReport check_P1_P2(const VolatilitySpec& spec, const LevyTriplet& t, const SamplingBoxes& boxes) {
    const std::size_t n = spec.n();
    const auto pts = sample_points(boxes, n);
    const auto us = jump_samples(t);
    CertificationReport rep;
    rep.u_count = us.size();
    if (!us.empty()) {
        rep.u_lo = us.front();
        rep.u_hi = us.back();
    }

    if (spec.kind() == VolKind::Custom) {
        ConditionResult det{"deterministic", Verdict::Pass, std::nullopt, 0.0, 0, ""};
        for (std::size_t k = 0; k < std::min<std::size_t>(16, pts.size()); ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const double a = g_at(spec, i, pts[k], pts[k].r);
                const double b = g_at(spec, i, pts[k], pts[k].r);
                ++det.points;
                if (!(a == b) && det.verdict == Verdict::Pass) {
                    det.verdict = Verdict::Fail;
                    det.witness = Witness{pts[k].t, pts[k].z, pts[k].l, pts[k].r, 0.0, i, std::abs(a - b)};
                }
            }
        }
        rep.conditions.push_back(det);
    }

    rep.conditions.push_back(scan("P1", pts, [&](const SamplePoint& p, Candidate& c) {
        std::vector<double> r = p.r;
        double rmax = 0.0;
        for (double x : r) rmax = std::max(rmax, std::abs(x));
        for (std::size_t i = 0; i < n; ++i) {
            const double keep = r[i];
            r[i] = 0.0;
            const double g = g_at(spec, i, p, r);
            c.offer(std::abs(g), slack(rmax), p, r, 0.0, i);
            r[i] = keep;
        }
    }));

    if (us.empty()) {
        rep.conditions.push_back({"P2", Verdict::Pass, std::nullopt, 0.0, pts.size(), "vacuous: no jumps"});
        rep.flags.push_back("empty jump support: P2 holds vacuously");
        return rep;
    }
    rep.conditions.push_back(scan("P2", pts, [&](const SamplePoint& p, Candidate& c) {
        for (std::size_t i = 0; i < n; ++i) {
            const double g = g_at(spec, i, p, p.r);
            for (double u : us) {
                const double v = p.r[i] + g * u;
                c.offer(-v, slack(std::abs(p.r[i]) + std::abs(g * u)), p, p.r, u, i);
            }
        }
    }));
    return rep;
}

CertificationReport check_M1_M2(const VolatilitySpec& spec, const LevyTriplet& t, const SamplingBoxes& boxes) {
    const std::size_t n = spec.n();
    const auto pts = sample_points(boxes, n);
    const auto us = jump_samples(t);
    CertificationReport rep;
    rep.u_count = us.size();
    if (!us.empty()) {
        rep.u_lo = us.front();
        rep.u_hi = us.back();
    }
    if (n < 2) {
        rep.conditions.push_back({"M1", Verdict::Pass, std::nullopt, 0.0, 0, "vacuous: single rating"});
        rep.conditions.push_back({"M2", Verdict::Pass, std::nullopt, 0.0, 0, "vacuous: single rating"});
        return rep;
    }

    rep.conditions.push_back(scan("M1", pts, [&](const SamplePoint& p, Candidate& c) {
        const std::vector<double> base = sorted_desc(p.r);
        std::vector<double> gs(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (int variant = 0; variant < 2; ++variant) {
                std::vector<double> r = base;
                if (variant == 0) r[i + 1] = r[i];
                else r[i] = r[i + 1];
                const double gi = g_at(spec, i, p, r);
                const double gj = g_at(spec, i + 1, p, r);
                c.offer(std::abs(gi - gj), slack(std::abs(gi) + std::abs(gj)), p, r, 0.0, i);
            }
        }
    }));

    if (us.empty()) {
        rep.conditions.push_back({"M2", Verdict::Pass, std::nullopt, 0.0, pts.size(), "vacuous: no jumps"});
        rep.flags.push_back("empty jump support: M2 holds vacuously");
        return rep;
    }
    rep.conditions.push_back(scan("M2", pts, [&](const SamplePoint& p, Candidate& c) {
        const std::vector<double> base = sorted_desc(p.r);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (int variant = 0; variant < 2; ++variant) {
                std::vector<double> r = base;
                if (variant == 1) r[i + 1] = r[i];
                const double gi = g_at(spec, i, p, r);
                const double gj = g_at(spec, i + 1, p, r);
                for (double u : us) {
                    const double ex = (gj - gi) * u - (r[i] - r[i + 1]);
                    const double sc = std::abs(gj * u) + std::abs(gi * u) + std::abs(r[i]) + std::abs(r[i + 1]);
                    c.offer(ex, slack(sc), p, r, u, i);
                }
            }
        }
    }));
    return rep;
}

// ---------------------------------------------------------------------------

CertificationReport check_derivative_conditions(const VolatilitySpec& spec, const LevyTriplet& t,
                                                const SamplingBoxes& boxes) {
    const std::size_t n = spec.n();
    const auto pts = sample_points(boxes, n);
    const auto us = jump_samples(t);
    const LevyMeasure& nu = t.nu();
    CertificationReport rep;
    rep.u_count = us.size();
    if (!us.empty()) {
        rep.u_lo = us.front();
        rep.u_hi = us.back();
    }

    rep.conditions.push_back(scan("nonnegativity", pts, [&](const SamplePoint& p, Candidate& c) {
        for (std::size_t i = 0; i < n; ++i) {
            const double g = g_at(spec, i, p, p.r);
            c.offer(-g, slack(std::abs(g)), p, p.r, 0.0, i);
        }
    }));

    // sup over the samples of d g_i / d r_i at 1_i(r), forward in r_i.
    struct DerivSample {
        double d = -std::numeric_limits<double>::infinity();
        bool stable = true;
        Witness w;
    };
    std::vector<DerivSample> sup_d(pts.size());
    const auto np = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t k = 0; k < np; ++k) {
        const SamplePoint& p = pts[static_cast<std::size_t>(k)];
        auto g = [&](std::size_t i, const std::vector<double>& r) { return g_at(spec, i, p, r); };
        DerivSample& out = sup_d[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> r = p.r;
            r[i] = 0.0;
            const Derivative d = partial(i, r, i, 1.0, g);
            out.stable = out.stable && d.stable;
            if (d.value > out.d) {
                out.d = d.value;
                out.w = Witness{p.t, p.z, p.l, r, 0.0, i, 0.0};
            }
        }
    }
    double S = -std::numeric_limits<double>::infinity();
    Witness s_w;
    bool s_stable = true;
    for (const auto& ds : sup_d) {
        s_stable = s_stable && ds.stable;
        if (ds.d > S) {
            S = ds.d;
            s_w = ds.w;
        }
    }
    rep.constants["sup_dg_dr_at_zero"] = S;
    {
        ConditionResult c{"support_lower_bound", Verdict::Pass, std::nullopt, 0.0, pts.size(), ""};
        if (nu.empty()) {
            c.note = "vacuous: no jumps";
        } else if (S > 0.0) {
            const double bound = -1.0 / S;
            const double lo = nu.support_lo();
            c.worst = bound - lo;
            if (lo < bound - slack(std::abs(bound))) {
                c.verdict = Verdict::Fail;
                s_w.u = lo;
                s_w.violation = bound - lo;
                c.witness = s_w;
            }
            c.note = "support must start at or above " + std::to_string(bound);
        } else {
            c.note = "derivative at zero is not positive; bound is -infinity";
        }
        if (!s_stable && c.verdict != Verdict::Fail) {
            c.verdict = Verdict::Indeterminate;
            c.note += "; derivative estimates disagree across step sizes";
        }
        rep.conditions.push_back(c);
    }

    rep.conditions.push_back(scan("sufficient_growth", pts, [&](const SamplePoint& p, Candidate& c) {
        auto g = [&](std::size_t i, const std::vector<double>& r) { return g_at(spec, i, p, r); };
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> r0 = p.r;
            r0[i] = 0.0;
            const Derivative d = partial(i, r0, i, 1.0, g);
            c.unstable = c.unstable || !d.stable;
            const double gi = g(i, p.r);
            c.offer(gi - d.value * p.r[i], slack(std::abs(gi) + std::abs(d.value * p.r[i])), p, p.r, 0.0, i);
            c.offer(-d.value, slack(std::abs(d.value)), p, r0, 0.0, i);
        }
    }));

    if (n < 2) {
        rep.conditions.push_back({"diagonal_derivative_ri", Verdict::Pass, std::nullopt, 0.0, 0, "vacuous"});
        rep.conditions.push_back({"diagonal_derivative_ri1", Verdict::Pass, std::nullopt, 0.0, 0, "vacuous"});
        rep.conditions.push_back({"m2_clause", Verdict::Pass, std::nullopt, 0.0, 0, "vacuous: single rating"});
        return rep;
    }

    // d/dr_i and d/dr_{i+1} of g_{i+1} - g_i on the diagonal r_i = r_{i+1}.
    auto diagonal = [&](const std::string& name, bool wrt_next) {
        return scan(name, pts, [&, wrt_next](const SamplePoint& p, Candidate& c) {
            auto diff = [&](std::size_t i, const std::vector<double>& r) {
                return g_at(spec, i + 1, p, r) - g_at(spec, i, p, r);
            };
            std::vector<double> r = sorted_desc(p.r);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                std::vector<double> rd = r;
                rd[i + 1] = rd[i];
                const Derivative d = wrt_next ? partial(i, rd, i + 1, -1.0, diff)
                                              : partial(i, rd, i, 1.0, diff);
                c.unstable = c.unstable || !d.stable;
                for (double u : us) c.offer(d.value * u - 1.0, slack(std::abs(d.value * u)), p, rd, u, i);
            }
        });
    };
    rep.conditions.push_back(diagonal("diagonal_derivative_ri", false));
    rep.conditions.push_back(diagonal("diagonal_derivative_ri1", true));

    // Second differences of g_{i+1} - g_i in r_i over the ordered region.
    const double delta = boxes.r_max / 16.0;
    struct Shape {
        double max_sd = -std::numeric_limits<double>::infinity();  // > 0 breaks concavity
        double min_sd = std::numeric_limits<double>::infinity();   // < 0 breaks convexity
        double max_diff = -std::numeric_limits<double>::infinity();
        double min_diff = std::numeric_limits<double>::infinity();
        double scale = 0.0;
    };
    std::vector<Shape> shapes(pts.size());
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t k = 0; k < np; ++k) {
        const SamplePoint& p = pts[static_cast<std::size_t>(k)];
        Shape& sh = shapes[static_cast<std::size_t>(k)];
        const std::vector<double> r = sorted_desc(p.r);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            auto phi = [&](double x) {
                std::vector<double> rr = r;
                rr[i] = x;
                return g_at(spec, i + 1, p, rr) - g_at(spec, i, p, rr);
            };
            const double f0 = phi(r[i]);
            sh.max_diff = std::max(sh.max_diff, f0);
            sh.min_diff = std::min(sh.min_diff, f0);
            sh.scale = std::max(sh.scale, std::abs(f0));
            const bool room_below = r[i] - delta >= r[i + 1];
            const bool room_above = i == 0 || r[i] + delta <= r[i - 1];
            if (!room_below || !room_above) continue;
            const double fp = phi(r[i] + delta);
            const double fm = phi(r[i] - delta);
            const double sd = fp + fm - 2.0 * f0;
            sh.max_sd = std::max(sh.max_sd, sd);
            sh.min_sd = std::min(sh.min_sd, sd);
            sh.scale = std::max({sh.scale, std::abs(fp), std::abs(fm)});
        }
    }
    Shape all;
    for (const auto& sh : shapes) {
        all.max_sd = std::max(all.max_sd, sh.max_sd);
        all.min_sd = std::min(all.min_sd, sh.min_sd);
        all.max_diff = std::max(all.max_diff, sh.max_diff);
        all.min_diff = std::min(all.min_diff, sh.min_diff);
        all.scale = std::max(all.scale, sh.scale);
    }
    const double tol = slack(all.scale);
    const bool concave = !(all.max_sd > tol);
    const bool convex = !(all.min_sd < -tol);
    const bool pos_support = !nu.empty() && nu.support_lo() >= 0.0;
    const bool neg_support = !nu.empty() && nu.support_hi() <= 0.0;
    const bool clauses[4] = {concave && pos_support, convex && neg_support, concave && all.min_diff >= -tol,
                             convex && all.max_diff <= tol};
    const char* labels[4] = {"i", "ii", "iii", "iv"};
    std::string which;
    for (int c = 0; c < 4; ++c) {
        rep.constants[std::string("clause_") + labels[c] + "_holds"] = clauses[c] ? 1.0 : 0.0;
        if (clauses[c]) which += (which.empty() ? "" : ",") + std::string(labels[c]);
    }
    ConditionResult m2c{"m2_clause", Verdict::Pass, std::nullopt, 0.0, pts.size(), ""};
    if (nu.empty()) {
        m2c.note = "vacuous: no jumps";
    } else if (which.empty()) {
        m2c.verdict = Verdict::Fail;
        m2c.note = "none of the concavity/convexity clauses holds on the samples";
    } else {
        m2c.note = "certified by clause(s) " + which;
    }
    rep.conditions.push_back(m2c);
    return rep;
}

// ---------------------------------------------------------------------------

CertificationReport estimate_regularity_constants(const VolatilitySpec& spec, const SamplingBoxes& boxes,
                                                  double gamma) {
    const std::size_t n = spec.n();
    SamplingBoxes lhs_only = boxes;
    lhs_only.points_per_axis = 3;
    const auto pts = sample_points(lhs_only, n);
    CertificationReport rep;

    // Lipschitz constant from forward-difference gradients at two resolutions.
    auto lipschitz = [&](double delta, double& grad_sup) {
        std::vector<double> lc(pts.size(), 0.0), gs(pts.size(), 0.0);
        const auto np = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < np; ++k) {
            const SamplePoint& p = pts[static_cast<std::size_t>(k)];
            std::vector<double> r = p.r;
            for (std::size_t i = 0; i < n; ++i) {
                const double g0 = g_at(spec, i, p, r);
                double sq = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    r[j] += delta;
                    const double q = (g_at(spec, i, p, r) - g0) / delta;
                    r[j] -= delta;
                    sq += q * q;
                    gs[static_cast<std::size_t>(k)] = std::max(gs[static_cast<std::size_t>(k)], std::abs(q));
                }
                lc[static_cast<std::size_t>(k)] = std::max(lc[static_cast<std::size_t>(k)], std::sqrt(sq));
            }
        }
        grad_sup = *std::max_element(gs.begin(), gs.end());
        return *std::max_element(lc.begin(), lc.end());
    };
    double grad_coarse = 0.0, grad_fine = 0.0;
    const double d0 = boxes.r_max / 64.0;
    const double c_coarse = lipschitz(d0, grad_coarse);
    const double c_fine = lipschitz(d0 / 8.0, grad_fine);
    rep.constants["C_LC"] = c_fine;
    rep.constants["grad_max"] = grad_fine;
    {
        ConditionResult c{"LC", Verdict::Pass, std::nullopt, c_fine, pts.size(), ""};
        if (c_fine > 2.0 * c_coarse + slack(c_coarse)) {
            c.verdict = Verdict::Fail;
            c.note = "difference quotients grow under refinement";
        }
        rep.conditions.push_back(c);
    }

    // g_bar(z) = sup over (t, l, r) of |g_i|, on a fine z grid.
    const std::size_t nz = 129;
    const auto zs = linspace(0.0, boxes.z_max, nz);
    std::vector<double> gbar(nz, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(nz); ++k) {
        double m = 0.0;
        std::vector<double> out(n);
        for (const SamplePoint& p : pts) {
            spec.eval_all(p.t, zs[static_cast<std::size_t>(k)], p.l, p.r.data(), out.data());
            for (double g : out) m = std::max(m, std::abs(g));
        }
        gbar[static_cast<std::size_t>(k)] = m;
    }
    auto weighted = [&](std::size_t upto) {
        double s = 0.0;
        const double h = zs[1] - zs[0];
        for (std::size_t k = 0; k <= upto; ++k) {
            const double w = (k == 0 || k == upto) ? 0.5 : 1.0;
            s += w * gbar[k] * gbar[k] * std::exp(gamma * zs[k]);
        }
        return s * h;
    };
    const double K2 = weighted(nz - 1);
    const double K2_half = weighted((nz - 1) / 2);
    const double g_hat = *std::max_element(gbar.begin(), gbar.end());
    rep.constants["K"] = std::sqrt(K2);
    rep.constants["g_hat"] = g_hat;
    {
        ConditionResult c{"B1", Verdict::Pass, std::nullopt, std::sqrt(K2), nz, ""};
        if (K2 > 2.0 * K2_half + slack(K2_half)) {
            c.verdict = Verdict::Fail;
            c.note = "weighted norm of the volatility bound keeps growing with the truncation";
        }
        rep.conditions.push_back(c);
    }
    if (auto declared = spec.declared_sup()) {
        rep.constants["g_hat_declared"] = *declared;
        ConditionResult c{"B2", Verdict::Pass, std::nullopt, g_hat - *declared, nz, ""};
        if (g_hat > *declared + slack(*declared)) {
            c.verdict = Verdict::Fail;
            c.note = "sampled sup exceeds the declared bound";
        }
        rep.conditions.push_back(c);
    }

    // Growth constants, with r pulled toward 0 to expose blow-up.
    auto growth = [&](double scale, double power) {
        double m = 0.0;
        for (const SamplePoint& p : pts) {
            std::vector<double> r = p.r;
            double norm = 0.0;
            for (auto& x : r) {
                x *= scale;
                norm += x * x;
            }
            norm = std::sqrt(norm);
            if (norm <= 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(g_at(spec, i, p, r)) / std::pow(norm, power));
        }
        return m;
    };
    auto growth_condition = [&](const std::string& name, const std::string& key, double power) {
        const double c1 = growth(1.0, power);
        const double c16 = growth(1.0 / 16.0, power);
        const double c256 = growth(1.0 / 256.0, power);
        const double c = std::max({c1, c16, c256});
        rep.constants[key] = c;
        ConditionResult res{name, Verdict::Pass, std::nullopt, c, pts.size(), ""};
        if (c256 > 2.0 * c16 + slack(c16)) {
            res.verdict = Verdict::Fail;
            res.note = "ratio grows as r -> 0";
        }
        rep.conditions.push_back(res);
    };
    growth_condition("LGC", "C_LGC", 1.0);
    growth_condition("B3", "C_B3", 0.5);
    return rep;
}

// ---------------------------------------------------------------------------

CertificationReport check_example_conditions(const VolatilitySpec& spec, const LevyTriplet& t,
                                             const SamplingBoxes& boxes) {
    CertificationReport rep;
    if (spec.kind() != VolKind::Multiplicative) {
        rep.conditions.push_back({"example_family", Verdict::Indeterminate, std::nullopt, 0.0, 0,
                                  "only defined for the multiplicative kind"});
        return rep;
    }
    const std::size_t n = spec.n();
    const std::size_t m = 257;
    const auto ts = linspace(0.0, boxes.t_max, m);
    const auto zs = linspace(0.0, boxes.z_max, m);
    auto ls = linspace(0.0, 1.0, m);
    ls.insert(ls.end(), boxes.l_values.begin(), boxes.l_values.end());
    const auto rs = linspace(0.0, boxes.r_max, m);
    const double step = rs[1] - rs[0];

    auto bounds_check = [](const ScalarFunction& f, const std::vector<double>& xs, double& worst) {
        for (double x : xs) {
            const double v = f(x);
            worst = std::max({worst, -v - slack(std::abs(v)), v - f.bound() - slack(f.bound())});
        }
    };
    {
        double worst = -std::numeric_limits<double>::infinity();
        bounds_check(spec.f1(), ts, worst);
        bounds_check(spec.f2(), zs, worst);
        bounds_check(spec.f3(), ls, worst);
        for (const auto& f : spec.h_list()) bounds_check(f, rs, worst);
        bounds_check(spec.h(), rs, worst);
        rep.conditions.push_back({"factor_bounds", worst > 0.0 ? Verdict::Fail : Verdict::Pass, std::nullopt, worst,
                                  m * (n + 4), worst > 0.0 ? "a factor is negative or exceeds its bound" : ""});
    }

    const ScalarFunction& h = spec.h();
    const Derivative hp0 = one_sided([&](double x) { return h(x); }, 0.0, 1.0);
    rep.constants["h_prime_at_zero"] = hp0.value;
    {
        double worst = std::abs(h(0.0)) - slack(0.0);
        worst = std::max(worst, -hp0.value - slack(std::abs(hp0.value)));
        for (double x : rs) worst = std::max(worst, h(x) - hp0.value * x - slack(std::abs(h(x))));
        Verdict v = worst > 0.0 ? Verdict::Fail : Verdict::Pass;
        if (!hp0.stable && v != Verdict::Fail) v = Verdict::Indeterminate;
        rep.conditions.push_back({"h_vanishes_at_zero", v, std::nullopt, worst, m, ""});
    }
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& f : spec.h_list()) {
            for (std::size_t k = 0; k + 1 < m; ++k) {
                worst = std::max(worst, f(rs[k + 1]) - f(rs[k]) - slack(std::abs(f(rs[k]))));
            }
        }
        rep.conditions.push_back({"h_i_decreasing", worst > 0.0 ? Verdict::Fail : Verdict::Pass, std::nullopt, worst,
                                  m * n, ""});
    }

    const double fbar = spec.f1().bound() * spec.f2().bound() * spec.f3().bound();
    const LevyMeasure& nu = t.nu();
    auto support_condition = [&](const std::string& name, double a) {
        rep.constants[name + "_constant"] = a;
        ConditionResult c{name, Verdict::Pass, std::nullopt, 0.0, 1, ""};
        if (nu.empty() || !(a > 0.0)) {
            c.note = "bound is -infinity";
            return c;
        }
        const double bound = -1.0 / a;
        c.worst = bound - nu.support_lo();
        c.note = "support must start at or above " + std::to_string(bound);
        if (nu.support_lo() < bound - slack(std::abs(bound))) c.verdict = Verdict::Fail;
        return c;
    };
    {
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double prod = fbar * spec.h_list()[i](0.0) * hp0.value;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) prod *= spec.h_list()[j].bound();
            }
            a = std::max(a, prod);
        }
        rep.conditions.push_back(support_condition("support_bound_positivity", a));
    }

    // h' on the sampled range, from central differences between grid points.
    double hp_max = 0.0;
    double hp_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const double d = (h(rs[k + 1]) - h(rs[k])) / step;
        hp_max = std::max(hp_max, d);
        hp_min = std::min(hp_min, d);
    }
    hp_max = std::max(hp_max, hp0.value);
    const double hp_bar = spec.h_prime_bound().value_or(hp_max);
    rep.constants["h_prime_bound"] = hp_bar;
    {
        double worst = std::max(-hp_min, hp_max - hp_bar) - slack(hp_bar);
        auto concavity = [&](const ScalarFunction& f) {
            for (std::size_t k = 1; k + 1 < m; ++k) {
                const double sd = f(rs[k + 1]) + f(rs[k - 1]) - 2.0 * f(rs[k]);
                worst = std::max(worst, sd - slack(std::abs(f(rs[k]))));
            }
        };
        concavity(h);
        for (const auto& f : spec.h_list()) concavity(f);
        rep.conditions.push_back({"h_derivative_and_concavity", worst > 0.0 ? Verdict::Fail : Verdict::Pass,
                                  std::nullopt, worst, m * (n + 1), ""});
    }
    {
        double b = fbar * hp_bar;
        for (const auto& f : spec.h_list()) b *= f.bound();
        rep.conditions.push_back(support_condition("support_bound_monotonicity", b));
    }
    return rep;
}

}  // namespace cdolab
