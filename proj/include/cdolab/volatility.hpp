#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cdolab {

/// Named scalar function from the config library:
///   constant(c)                         c
///   linear_capped(b, s, cap)            clamp(b + s x, 0, cap)
///   exp_decay(c, k)                     c e^{-k x}
///   logistic_concave(c, k)              c (2 / (1 + e^{-k x}) - 1)
class ScalarFunction {
public:
    ScalarFunction() : ScalarFunction("constant", {0.0}) {}
    ScalarFunction(std::string name, std::vector<double> params, std::optional<double> declared_bound = {});

    static ScalarFunction constant(double c) { return {"constant", {c}}; }
    static ScalarFunction linear_capped(double b, double s, double cap) { return {"linear_capped", {b, s, cap}}; }
    static ScalarFunction exp_decay(double c, double k) { return {"exp_decay", {c, k}}; }
    static ScalarFunction logistic_concave(double c, double k) { return {"logistic_concave", {c, k}}; }

    double operator()(double x) const;
    /// Declared upper bound on [0, inf) when given, otherwise the library's own.
    double bound() const;
    bool has_declared_bound() const { return declared_.has_value(); }

    const std::string& name() const { return name_; }
    const std::vector<double>& params() const { return params_; }

private:
    enum class Kind { Constant, LinearCapped, ExpDecay, Logistic };

    std::string name_;
    std::vector<double> params_;
    std::optional<double> declared_;
    Kind kind_ = Kind::Constant;
};

using VolatilityCallback =
    std::function<double(std::size_t i, double t, double z, double l, std::span<const double> r)>;

enum class VolKind { Multiplicative, Separable, Custom };

/// The family {g_i}. Multiplicative: f1(t) f2(z) f3(l) h_1(r_1)...h_n(r_n) h(r_i).
/// Separable: f1(t) f2(z) f3(l) s_i(r_i). Custom: a callback.
class VolatilitySpec {
public:
    static VolatilitySpec multiplicative(ScalarFunction f1, ScalarFunction f2, ScalarFunction f3,
                                         std::vector<ScalarFunction> h_list, ScalarFunction h,
                                         std::optional<double> h_prime_bound = {});
    static VolatilitySpec separable(ScalarFunction f1, ScalarFunction f2, ScalarFunction f3,
                                    std::vector<ScalarFunction> s_list);
    static VolatilitySpec custom(std::size_t n, VolatilityCallback fn);
    /// g_i = sigma for every i: the multiplicative family with constant factors
    /// and h = constant(1).
    static VolatilitySpec constant(std::size_t n, double sigma);

    VolKind kind() const { return kind_; }
    std::size_t n() const { return n_; }

    double eval(std::size_t i, double t, double z, double l, std::span<const double> r) const;
    /// All g_i at once; out has n entries.
    void eval_all(double t, double z, double l, const double* r, double* out) const;
    /// Upper bound of |g_i| over z >= 0 for fixed (t, l) and any r, when the
    /// kind allows one from declared bounds; used to size the J' table.
    std::optional<double> declared_sup() const;

    const ScalarFunction& f1() const { return f1_; }
    const ScalarFunction& f2() const { return f2_; }
    const ScalarFunction& f3() const { return f3_; }
    const std::vector<ScalarFunction>& h_list() const { return h_list_; }
    const ScalarFunction& h() const { return h_; }
    const std::vector<ScalarFunction>& s_list() const { return s_list_; }
    std::optional<double> h_prime_bound() const { return h_prime_bound_; }

private:
    VolKind kind_ = VolKind::Multiplicative;
    std::size_t n_ = 1;
    ScalarFunction f1_, f2_, f3_, h_;
    std::vector<ScalarFunction> h_list_;
    std::vector<ScalarFunction> s_list_;
    std::optional<double> h_prime_bound_;
    VolatilityCallback custom_;
};

}  // namespace cdolab
