#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cdolab {

/// Rating levels 0 <= x_1 < ... < x_n = 1.
class RatingLadder {
public:
    RatingLadder() : xs_{1.0} {}
    explicit RatingLadder(std::vector<double> xs);

    std::size_t size() const { return xs_.size(); }
    double operator[](std::size_t i) const { return xs_[i]; }
    const std::vector<double>& values() const { return xs_; }
    /// Index of x on the ladder (exact match up to 1e-12), or size() when absent.
    std::size_t index_of(double x) const;

private:
    std::vector<double> xs_;
};

/// r(z_k, x_i) on the uniform grid z_k = k dz, k = 0..n_z-1.
class ForwardSurface {
public:
    ForwardSurface() = default;
    ForwardSurface(double dz, std::size_t n_z, double gamma, RatingLadder ladder, double fill = 0.0);

    static ForwardSurface from_function(double dz, std::size_t n_z, double gamma, RatingLadder ladder,
                                        const std::function<double(double z, std::size_t i)>& fn);

    double dz() const { return dz_; }
    std::size_t n_z() const { return n_z_; }
    std::size_t n_ratings() const { return ladder_.size(); }
    double z(std::size_t k) const { return dz_ * static_cast<double>(k); }
    double z_max() const { return dz_ * static_cast<double>(n_z_ - 1); }
    double gamma() const { return gamma_; }
    const RatingLadder& ladder() const { return ladder_; }

    double& at(std::size_t k, std::size_t i) { return values_[k * ladder_.size() + i]; }
    double at(std::size_t k, std::size_t i) const { return values_[k * ladder_.size() + i]; }
    const double* row(std::size_t k) const { return values_.data() + k * ladder_.size(); }
    double* row(std::size_t k) { return values_.data() + k * ladder_.size(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    /// |h(z_max)|^2 e^{gamma z_max} dz for rating i: how much weight the
    /// truncated tail would still carry.
    double tail_weight(std::size_t i) const;
    bool tail_ok(double bound) const;

private:
    double dz_ = 1.0;
    std::size_t n_z_ = 0;
    double gamma_ = 1.0;
    RatingLadder ladder_;
    std::vector<double> values_;
};

double norm_L2gamma(const ForwardSurface& s, std::size_t i);
double norm_H1gamma(const ForwardSurface& s, std::size_t i);

/// dh/dz for rating i: central differences inside, first order at the ends.
std::vector<double> z_derivative(const ForwardSurface& s, std::size_t i);

/// values'[k] = values[k + steps]; the vacated tail repeats the last value.
ForwardSurface shift(const ForwardSurface& s, std::size_t steps);

struct EmbeddingReport {
    double sup_norm = 0.0;  // max_k |values[k][.]|
    double bound = 0.0;     // (2/sqrt(gamma)) * sqrt(sum_i H1_i^2)
    double allowance = 0.0; // 2 dz max|h'|
    double margin = 0.0;    // bound + allowance - sup_norm
    bool pass = true;
};

EmbeddingReport sup_embedding_check(const ForwardSurface& s);

}  // namespace cdolab
