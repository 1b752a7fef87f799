#include "svq/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "svq/error.hpp"
#include "svq/kernels.hpp"

namespace svq {

Codebook::Codebook(std::size_t size, std::size_t dim)
    : size_(size),
      dim_(dim),
      weights_(size * dim, 0.0),
      biases_(size, 0.0),
      recons_(size * dim, 0.0),
      recon_scales_(size, 0.0) {
    if (size == 0 || dim == 0) throw ContractError("codebook size and dimension must be positive");
}

void Codebook::check_index(std::size_t y) const {
    if (y >= size_) {
        throw ContractError("code index " + std::to_string(y) + " out of range [0, " + std::to_string(size_) + ")");
    }
}

void Codebook::set_affine() {
    if (mode_ == EncoderMode::thresholded) {
        for (std::size_t y = 0; y < size_; ++y) biases_[y] = bias(y);
    }
    mode_ = EncoderMode::affine;
    theta_ = 0.0;
}

void Codebook::set_thresholded(double theta) {
    if (!std::isfinite(theta)) throw ContractError("theta must be finite");
    mode_ = EncoderMode::thresholded;
    theta_ = theta;
    std::fill(biases_.begin(), biases_.end(), 0.0);
}

void Codebook::set_norm_target(double w0) {
    if (!(w0 >= 0.0) || !std::isfinite(w0)) throw ContractError("weight-norm target must be finite and >= 0");
    norm_target_ = w0;
    if (w0 > 0.0) {
        for (std::size_t y = 0; y < size_; ++y) rescale_to_target(y);
    }
}

void Codebook::restore_norm_target(double w0) {
    if (!(w0 >= 0.0) || !std::isfinite(w0)) throw ContractError("weight-norm target must be finite and >= 0");
    norm_target_ = w0;
}

void Codebook::set_parallel(bool active) {
    parallel_ = active;
    if (active) {
        for (std::size_t y = 0; y < size_; ++y) refresh_recon(y);
    }
}

std::span<const double> Codebook::weight(std::size_t y) const {
    check_index(y);
    return std::span<const double>(weights_).subspan(y * dim_, dim_);
}

void Codebook::set_weight(std::size_t y, std::span<const double> w) {
    check_index(y);
    if (w.size() != dim_) throw DimensionMismatch("weight length does not match codebook dimension");
    std::copy(w.begin(), w.end(), weights_.begin() + static_cast<std::ptrdiff_t>(y * dim_));
    if (norm_target_ > 0.0) rescale_to_target(y);
    if (parallel_) refresh_recon(y);
}

double Codebook::weight_norm(std::size_t y) const {
    const auto w = weight(y);
    return std::sqrt(kernels::dot(w, w));
}

double Codebook::bias(std::size_t y) const {
    check_index(y);
    if (mode_ == EncoderMode::thresholded) return -theta_ * weight_norm(y);
    return biases_[y];
}

void Codebook::set_bias(std::size_t y, double b) {
    check_index(y);
    if (mode_ == EncoderMode::thresholded) {
        throw ContractError("bias is derived from theta in thresholded mode and cannot be set");
    }
    biases_[y] = b;
}

std::span<const double> Codebook::recon(std::size_t y) const {
    check_index(y);
    return std::span<const double>(recons_).subspan(y * dim_, dim_);
}

void Codebook::set_recon(std::size_t y, std::span<const double> r) {
    check_index(y);
    if (r.size() != dim_) throw DimensionMismatch("recon length does not match codebook dimension");
    if (parallel_) throw ContractError("recon is derived from recon_scale while the parallel constraint is active");
    std::copy(r.begin(), r.end(), recons_.begin() + static_cast<std::ptrdiff_t>(y * dim_));
}

double Codebook::recon_scale(std::size_t y) const {
    check_index(y);
    return recon_scales_[y];
}

void Codebook::set_recon_scale(std::size_t y, double s) {
    check_index(y);
    recon_scales_[y] = s;
    if (parallel_) refresh_recon(y);
}

void Codebook::refresh_recon(std::size_t y) {
    const double n = weight_norm(y);
    if (n == 0.0) throw DegenerateCodebookError("parallel constraint needs a nonzero weight");
    const double k = recon_scales_[y] / n;
    const auto w = std::span<const double>(weights_).subspan(y * dim_, dim_);
    auto r = std::span<double>(recons_).subspan(y * dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i) r[i] = k * w[i];
}

void Codebook::rescale_to_target(std::size_t y) {
    const double n = weight_norm(y);
    if (n == 0.0) throw DegenerateCodebookError("norm constraint needs a nonzero weight");
    const double k = norm_target_ / n;
    auto w = std::span<double>(weights_).subspan(y * dim_, dim_);
    for (double& v : w) v *= k;
}

bool operator==(const Codebook& a, const Codebook& b) {
    if (a.size_ != b.size_ || a.dim_ != b.dim_ || a.mode_ != b.mode_) return false;
    if (a.theta_ != b.theta_ || a.norm_target_ != b.norm_target_) return false;
    for (std::size_t y = 0; y < a.size_; ++y) {
        if (a.bias(y) != b.bias(y)) return false;
    }
    return a.weights_ == b.weights_ && a.recons_ == b.recons_ && a.recon_scales_ == b.recon_scales_;
}

}  // namespace svq
