#pragma once

// Stochastic encoding with sigmoid likelihoods, decoding, and the mean
// Euclidean reconstruction objective with its analytic gradients.
//
//   Q(y|x)  = 1 / (1 + exp(-(w(y).x + b(y))))
//   Pr(y|x) = Q(y|x) / sum_y' Q(y'|x)
//   D       = (2/N) sum_x sum_y Pr(y|x) |x - x'(y)|^2

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "svq/codebook.hpp"

namespace svq {

class Rng;

// Likelihoods below this are clamped before normalising, so the posterior is
// defined even when every sigmoid underflows.
inline constexpr double kLikelihoodFloor = 1e-30;

// N points of dimension d, row-major. The empirical prior is uniform over rows.
class Dataset {
public:
    Dataset(std::size_t dim, std::vector<double> values);
    explicit Dataset(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
    bool empty() const noexcept { return values_.empty(); }

    std::span<const double> point(std::size_t i) const {
        return std::span<const double>(values_).subspan(i * dim_, dim_);
    }
    void push_back(std::span<const double> x);
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t dim_;
    std::vector<double> values_;
};

struct PosteriorVector {
    std::vector<double> probs;        // Pr(y|x)
    std::vector<double> likelihoods;  // Q(y|x), unfloored
};

double likelihood(const Codebook& cb, std::span<const double> x, std::size_t y);

PosteriorVector posterior(const Codebook& cb, std::span<const double> x);

// n independent draws (with replacement) from Pr(.|x).
std::vector<std::size_t> encode_sample(const Codebook& cb, std::span<const double> x, std::size_t n, Rng& rng);

std::span<const double> decode(const Codebook& cb, std::size_t y);

// sum_y Pr(y|x) x'(y)
std::vector<double> decode_expected(const Codebook& cb, std::span<const double> x);

double objective(const Codebook& cb, const Dataset& data);

// Gradients of the objective with respect to the free parameters of `cb` as it
// is currently constrained:
//
//   weight       dD/dw(y), including the chain through b(y) = -theta|w(y)| in
//                thresholded mode and through x'(y) = s(y) w_hat(y) while the
//                parallel constraint is active
//   bias         dD/db(y) treating b(y) as free (the trainable bias in affine mode)
//   recon        dD/dx'(y) treating x'(y) as free
//   recon_scale  dD/ds(y); zero unless the parallel constraint is active
struct Gradients {
    std::size_t size = 0;
    std::size_t dim = 0;
    double objective = 0.0;
    std::vector<double> weight;
    std::vector<double> bias;
    std::vector<double> recon;
    std::vector<double> recon_scale;

    std::span<const double> weight_row(std::size_t y) const {
        return std::span<const double>(weight).subspan(y * dim, dim);
    }
    std::span<const double> recon_row(std::size_t y) const {
        return std::span<const double>(recon).subspan(y * dim, dim);
    }
};

Gradients objective_gradients(const Codebook& cb, const Dataset& data);

// Objective and gradients over a subset of rows, averaged over the subset.
Gradients objective_gradients(const Codebook& cb, const Dataset& data, std::span<const std::size_t> rows);

// Reusable per-point evaluation state. Not thread-safe; use one per thread.
// Biases are cached: call refresh() after mutating the codebook.
class EncoderWorkspace {
public:
    explicit EncoderWorkspace(const Codebook& cb);

    void refresh();

    // Fills likelihoods, floored likelihoods and the posterior for x.
    void evaluate(std::span<const double> x);

    std::span<const double> z() const noexcept { return z_; }
    std::span<const double> likelihoods() const noexcept { return q_; }
    std::span<const double> probs() const noexcept { return p_; }
    // 1 - Q(y|x), evaluated without cancellation.
    std::span<const double> complements() const noexcept { return one_minus_q_; }
    // dQ/dz / Q: zero where the floor is active.
    std::span<const double> log_slope() const noexcept { return log_slope_; }

    const Codebook& codebook() const noexcept { return *cb_; }

private:
    const Codebook* cb_;
    std::vector<double> bias_;
    std::vector<double> z_;
    std::vector<double> q_;
    std::vector<double> one_minus_q_;
    std::vector<double> log_slope_;
    std::vector<double> p_;
};

}  // namespace svq
