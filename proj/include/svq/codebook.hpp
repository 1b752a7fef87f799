#pragma once

// Encoder parameters of a scalar-index stochastic vector quantiser.
//
// Code indices are 0-based throughout the library (0 .. size()-1).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace svq {

enum class EncoderMode : std::uint8_t {
    affine = 0,       // b(y) is a free parameter
    thresholded = 1,  // b(y) = -theta * |w(y)|, half activation at w_hat(y).x == theta
};

class Codebook {
public:
    Codebook(std::size_t size, std::size_t dim);

    std::size_t size() const noexcept { return size_; }
    std::size_t dim() const noexcept { return dim_; }

    EncoderMode mode() const noexcept { return mode_; }
    double theta() const noexcept { return theta_; }
    void set_affine();
    // Switches to the tied-bias form; stored affine biases are discarded.
    void set_thresholded(double theta);

    // Weight-norm target w0; 0 means the norm constraint is inactive.
    double norm_target() const noexcept { return norm_target_; }
    // Activating the constraint rescales every weight to the target norm.
    void set_norm_target(double w0);
    // Records the target without touching the weights (deserialisation).
    void restore_norm_target(double w0);

    // While active, recon(y) == recon_scale(y) * w(y) / |w(y)| is maintained on
    // every weight or scale update and recon cannot be written directly.
    bool parallel() const noexcept { return parallel_; }
    void set_parallel(bool active);

    std::span<const double> weight(std::size_t y) const;
    void set_weight(std::size_t y, std::span<const double> w);
    double weight_norm(std::size_t y) const;

    // Derived from theta and |w(y)| in thresholded mode.
    double bias(std::size_t y) const;
    void set_bias(std::size_t y, double b);

    std::span<const double> recon(std::size_t y) const;
    void set_recon(std::size_t y, std::span<const double> r);

    double recon_scale(std::size_t y) const;
    void set_recon_scale(std::size_t y, double s);

    // Row-major M x d blocks, for kernels that sweep all entries.
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> recons() const noexcept { return recons_; }

    // Persisted fields only (mode, theta, w0, weights, biases, recons, scales).
    friend bool operator==(const Codebook& a, const Codebook& b);

private:
    void check_index(std::size_t y) const;
    void refresh_recon(std::size_t y);
    void rescale_to_target(std::size_t y);

    std::size_t size_;
    std::size_t dim_;
    EncoderMode mode_ = EncoderMode::affine;
    double theta_ = 0.0;
    double norm_target_ = 0.0;
    bool parallel_ = false;
    std::vector<double> weights_;
    std::vector<double> biases_;
    std::vector<double> recons_;
    std::vector<double> recon_scales_;
};

}  // namespace svq
