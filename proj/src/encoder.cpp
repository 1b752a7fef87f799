#include "svq/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "svq/error.hpp"
#include "svq/kernels.hpp"
#include "svq/random.hpp"

namespace svq {

Dataset::Dataset(std::size_t dim, std::vector<double> values) : dim_(dim), values_(std::move(values)) {
    if (dim_ == 0) throw ContractError("dataset dimension must be positive");
    if (values_.size() % dim_ != 0) throw DimensionMismatch("dataset values are not a whole number of rows");
}

void Dataset::push_back(std::span<const double> x) {
    if (x.size() != dim_) throw DimensionMismatch("point dimension does not match dataset");
    values_.insert(values_.end(), x.begin(), x.end());
}

namespace {

void check_input(const Codebook& cb, std::span<const double> x) {
    if (x.size() != cb.dim()) {
        throw DimensionMismatch("input of dimension " + std::to_string(x.size()) + " for codebook of dimension " +
                                std::to_string(cb.dim()));
    }
}

void check_dataset(const Codebook& cb, const Dataset& data) {
    if (data.empty()) throw ContractError("dataset is empty");
    if (data.dim() != cb.dim()) throw DimensionMismatch("dataset dimension does not match codebook");
}

double effective_bias(const Codebook& cb, std::size_t y) {
    if (cb.mode() == EncoderMode::thresholded && cb.weight_norm(y) == 0.0) {
        throw DegenerateCodebookError("zero-norm weight at index " + std::to_string(y) + " in thresholded mode");
    }
    return cb.bias(y);
}

}  // namespace

EncoderWorkspace::EncoderWorkspace(const Codebook& cb)
    : cb_(&cb),
      bias_(cb.size()),
      z_(cb.size()),
      q_(cb.size()),
      one_minus_q_(cb.size()),
      log_slope_(cb.size()),
      p_(cb.size()) {
    refresh();
}

void EncoderWorkspace::refresh() {
    for (std::size_t y = 0; y < cb_->size(); ++y) bias_[y] = effective_bias(*cb_, y);
}

void EncoderWorkspace::evaluate(std::span<const double> x) {
    const std::size_t m = cb_->size();
    const std::size_t d = cb_->dim();
    const auto w = cb_->weights();
    double total = 0.0;
    for (std::size_t y = 0; y < m; ++y) {
        const double z = kernels::dot(w.subspan(y * d, d), x) + bias_[y];
        z_[y] = z;
        q_[y] = 1.0 / (1.0 + std::exp(-z));
        one_minus_q_[y] = 1.0 / (1.0 + std::exp(z));
        if (q_[y] >= kLikelihoodFloor) {
            p_[y] = q_[y];
            log_slope_[y] = one_minus_q_[y];
        } else {
            p_[y] = kLikelihoodFloor;
            log_slope_[y] = 0.0;
        }
        total += p_[y];
    }
    for (double& p : p_) p /= total;
}

double likelihood(const Codebook& cb, std::span<const double> x, std::size_t y) {
    check_input(cb, x);
    const double z = kernels::dot(cb.weight(y), x) + effective_bias(cb, y);
    return 1.0 / (1.0 + std::exp(-z));
}

PosteriorVector posterior(const Codebook& cb, std::span<const double> x) {
    check_input(cb, x);
    EncoderWorkspace ws(cb);
    ws.evaluate(x);
    return {std::vector<double>(ws.probs().begin(), ws.probs().end()),
            std::vector<double>(ws.likelihoods().begin(), ws.likelihoods().end())};
}

std::vector<std::size_t> encode_sample(const Codebook& cb, std::span<const double> x, std::size_t n, Rng& rng) {
    if (n == 0) throw ContractError("sample count must be positive");
    const auto post = posterior(cb, x);
    std::vector<double> cdf(post.probs.size());
    std::partial_sum(post.probs.begin(), post.probs.end(), cdf.begin());
    std::vector<std::size_t> out(n);
    for (auto& y : out) {
        const double u = rng.uniform01() * cdf.back();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        y = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    }
    return out;
}

std::span<const double> decode(const Codebook& cb, std::size_t y) { return cb.recon(y); }

std::vector<double> decode_expected(const Codebook& cb, std::span<const double> x) {
    const auto post = posterior(cb, x);
    std::vector<double> out(cb.dim(), 0.0);
    for (std::size_t y = 0; y < cb.size(); ++y) kernels::axpy(post.probs[y], cb.recon(y), out);
    return out;
}

double objective(const Codebook& cb, const Dataset& data) {
    check_dataset(cb, data);
    EncoderWorkspace ws(cb);
    const std::size_t m = cb.size();
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto x = data.point(i);
        ws.evaluate(x);
        double ebar = 0.0;
        for (std::size_t y = 0; y < m; ++y) ebar += ws.probs()[y] * kernels::squared_distance(x, cb.recon(y));
        total += ebar;
    }
    // Same association as the gradient pass, so both report identical D.
    return (2.0 / static_cast<double>(data.size())) * total;
}

namespace {

Gradients accumulate(const Codebook& cb, const Dataset& data, std::size_t count,
                     auto&& row_at) {
    const std::size_t m = cb.size();
    const std::size_t d = cb.dim();
    Gradients g;
    g.size = m;
    g.dim = d;
    g.weight.assign(m * d, 0.0);
    g.bias.assign(m, 0.0);
    g.recon.assign(m * d, 0.0);
    g.recon_scale.assign(m, 0.0);

    // Per point, with c = 2/N and e_y = |x - x'(y)|^2, ebar = sum_y Pr(y|x) e_y:
    //   dD/dz_k    = c Pr(k|x) (1 - Q_k) (e_k - ebar)
    //   dD/dx'(k)  = -2c Pr(k|x) (x - x'(k))
    const double c = 2.0 / static_cast<double>(count);
    EncoderWorkspace ws(cb);
    std::vector<double> err(m);
    std::vector<double> mass(m, 0.0);  // sum_x Pr(k|x)
    double total = 0.0;
    for (std::size_t n = 0; n < count; ++n) {
        const auto x = data.point(row_at(n));
        ws.evaluate(x);
        const auto p = ws.probs();
        double ebar = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            err[k] = kernels::squared_distance(x, cb.recon(k));
            ebar += p[k] * err[k];
        }
        total += ebar;
        for (std::size_t k = 0; k < m; ++k) {
            const double dz = c * p[k] * ws.log_slope()[k] * (err[k] - ebar);
            g.bias[k] += dz;
            auto gw = std::span<double>(g.weight).subspan(k * d, d);
            kernels::axpy(dz, x, gw);
            auto gr = std::span<double>(g.recon).subspan(k * d, d);
            kernels::axpy(-2.0 * c * p[k], x, gr);
            mass[k] += p[k];
        }
    }
    g.objective = c * total;

    for (std::size_t k = 0; k < m; ++k) {
        auto gr = std::span<double>(g.recon).subspan(k * d, d);
        kernels::axpy(2.0 * c * mass[k], cb.recon(k), gr);
    }

    const bool tied = cb.mode() == EncoderMode::thresholded;
    if (tied || cb.parallel()) {
        for (std::size_t k = 0; k < m; ++k) {
            const auto w = cb.weight(k);
            const double norm = cb.weight_norm(k);
            auto gw = std::span<double>(g.weight).subspan(k * d, d);
            if (tied) {
                // b = -theta |w|  =>  db/dw = -theta w_hat
                kernels::axpy(-cb.theta() * g.bias[k] / norm, w, gw);
            }
            if (cb.parallel()) {
                // x' = s w/|w|  =>  dD/ds = gr.w_hat,  dD/dw += (s/|w|)(gr - (gr.w_hat) w_hat)
                const auto gr = g.recon_row(k);
                const double along = kernels::dot(gr, w) / norm;
                g.recon_scale[k] = along;
                const double k_scale = cb.recon_scale(k) / norm;
                kernels::axpy(k_scale, gr, gw);
                kernels::axpy(-k_scale * along / norm, w, gw);
            }
        }
    }
    return g;
}

}  // namespace

Gradients objective_gradients(const Codebook& cb, const Dataset& data) {
    check_dataset(cb, data);
    return accumulate(cb, data, data.size(), [](std::size_t n) { return n; });
}

Gradients objective_gradients(const Codebook& cb, const Dataset& data, std::span<const std::size_t> rows) {
    check_dataset(cb, data);
    if (rows.empty()) throw ContractError("gradient batch is empty");
    for (const std::size_t r : rows) {
        if (r >= data.size()) throw ContractError("batch row out of range");
    }
    return accumulate(cb, data, rows.size(), [rows](std::size_t n) { return rows[n]; });
}

}  // namespace svq
