#include "cdolab/volatility.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cdolab/errors.hpp"

namespace cdolab {

ScalarFunction::ScalarFunction(std::string name, std::vector<double> params, std::optional<double> declared_bound)
    : name_(std::move(name)), params_(std::move(params)), declared_(declared_bound) {
    auto need = [&](std::size_t k) {
        if (params_.size() != k) {
            throw ConfigError("function '" + name_ + "' expects " + std::to_string(k) + " parameters, got " +
                              std::to_string(params_.size()));
        }
        for (double p : params_) {
            if (!std::isfinite(p)) throw ConfigError("function '" + name_ + "' has a non-finite parameter");
        }
    };
    if (name_ == "constant") {
        kind_ = Kind::Constant;
        need(1);
    } else if (name_ == "linear_capped") {
        kind_ = Kind::LinearCapped;
        need(3);
        if (params_[2] < 0.0) throw ConfigError("linear_capped cap must be >= 0");
    } else if (name_ == "exp_decay") {
        kind_ = Kind::ExpDecay;
        need(2);
        if (params_[1] < 0.0) throw ConfigError("exp_decay rate must be >= 0");
    } else if (name_ == "logistic_concave") {
        kind_ = Kind::Logistic;
        need(2);
        if (params_[1] < 0.0) throw ConfigError("logistic_concave steepness must be >= 0");
    } else {
        throw ConfigError("unknown function '" + name_ + "'");
    }
    if (declared_ && !(*declared_ >= 0.0)) throw ConfigError("declared bound must be >= 0");
}

double ScalarFunction::operator()(double x) const {
    const auto& p = params_;
    switch (kind_) {
        case Kind::Constant: return p[0];
        case Kind::LinearCapped: return std::clamp(p[0] + p[1] * x, 0.0, p[2]);
        case Kind::ExpDecay: return p[0] * std::exp(-p[1] * x);
        case Kind::Logistic: return p[0] * std::tanh(0.5 * p[1] * x);
    }
    return 0.0;
}

double ScalarFunction::bound() const {
    if (declared_) return *declared_;
    const auto& p = params_;
    switch (kind_) {
        case Kind::Constant: return std::abs(p[0]);
        case Kind::LinearCapped: return p[2];
        case Kind::ExpDecay: return std::abs(p[0]);
        case Kind::Logistic: return std::abs(p[0]);
    }
    return 0.0;
}

VolatilitySpec VolatilitySpec::multiplicative(ScalarFunction f1, ScalarFunction f2, ScalarFunction f3,
                                              std::vector<ScalarFunction> h_list, ScalarFunction h,
                                              std::optional<double> h_prime_bound) {
    if (h_list.empty()) throw ConfigError("multiplicative volatility needs one h_j per rating");
    VolatilitySpec s;
    s.kind_ = VolKind::Multiplicative;
    s.n_ = h_list.size();
    s.f1_ = std::move(f1);
    s.f2_ = std::move(f2);
    s.f3_ = std::move(f3);
    s.h_list_ = std::move(h_list);
    s.h_ = std::move(h);
    s.h_prime_bound_ = h_prime_bound;
    return s;
}

VolatilitySpec VolatilitySpec::separable(ScalarFunction f1, ScalarFunction f2, ScalarFunction f3,
                                         std::vector<ScalarFunction> s_list) {
    if (s_list.empty()) throw ConfigError("separable volatility needs one s_i per rating");
    VolatilitySpec s;
    s.kind_ = VolKind::Separable;
    s.n_ = s_list.size();
    s.f1_ = std::move(f1);
    s.f2_ = std::move(f2);
    s.f3_ = std::move(f3);
    s.s_list_ = std::move(s_list);
    return s;
}

VolatilitySpec VolatilitySpec::custom(std::size_t n, VolatilityCallback fn) {
    if (n == 0) throw ConfigError("custom volatility needs n >= 1");
    if (!fn) throw ConfigError("custom volatility needs a callback");
    VolatilitySpec s;
    s.kind_ = VolKind::Custom;
    s.n_ = n;
    s.custom_ = std::move(fn);
    return s;
}

VolatilitySpec VolatilitySpec::constant(std::size_t n, double sigma) {
    const auto one = ScalarFunction::constant(1.0);
    return multiplicative(ScalarFunction::constant(sigma), one, one, std::vector<ScalarFunction>(n, one), one);
}

double VolatilitySpec::eval(std::size_t i, double t, double z, double l, std::span<const double> r) const {
    if (i >= n_) throw ConfigError("rating index " + std::to_string(i) + " out of range");
    if (r.size() != n_) throw ConfigError("state vector has the wrong length");
    switch (kind_) {
        case VolKind::Multiplicative: {
            double prod = f1_(t) * f2_(z) * f3_(l) * h_(r[i]);
            for (std::size_t j = 0; j < n_; ++j) prod *= h_list_[j](r[j]);
            return prod;
        }
        case VolKind::Separable: return f1_(t) * f2_(z) * f3_(l) * s_list_[i](r[i]);
        case VolKind::Custom: return custom_(i, t, z, l, r);
    }
    return 0.0;
}

void VolatilitySpec::eval_all(double t, double z, double l, const double* r, double* out) const {
    switch (kind_) {
        case VolKind::Multiplicative: {
            double common = f1_(t) * f2_(z) * f3_(l);
            for (std::size_t j = 0; j < n_; ++j) common *= h_list_[j](r[j]);
            for (std::size_t i = 0; i < n_; ++i) out[i] = common * h_(r[i]);
            return;
        }
        case VolKind::Separable: {
            const double common = f1_(t) * f2_(z) * f3_(l);
            for (std::size_t i = 0; i < n_; ++i) out[i] = common * s_list_[i](r[i]);
            return;
        }
        case VolKind::Custom: {
            const std::span<const double> rs(r, n_);
            for (std::size_t i = 0; i < n_; ++i) out[i] = custom_(i, t, z, l, rs);
            return;
        }
    }
}

std::optional<double> VolatilitySpec::declared_sup() const {
    switch (kind_) {
        case VolKind::Multiplicative: {
            double b = f1_.bound() * f2_.bound() * f3_.bound() * h_.bound();
            for (const auto& f : h_list_) b *= f.bound();
            return b;
        }
        case VolKind::Separable: {
            double m = 0.0;
            for (const auto& f : s_list_) m = std::max(m, f.bound());
            return f1_.bound() * f2_.bound() * f3_.bound() * m;
        }
        case VolKind::Custom: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace cdolab
