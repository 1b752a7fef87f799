#pragma once

// Constrained gradient descent on the reconstruction objective.
//
// While the constraints are active (epochs [0, lift_after)):
//   norm      weights are projected back to |w(y)| = w0 after every step
//   parallel  x'(y) = s(y) w_hat(y); s(y) is trained instead of x'(y)
// From lift_after on both are released: weights and reconstructions train
// freely. The threshold tie b(y) = -theta |w(y)| is kept for the whole run.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "svq/codebook.hpp"
#include "svq/encoder.hpp"

namespace svq {

class Rng;

enum class WeightInit {
    sphere,  // isotropic random directions
    data,    // directions of distinct training points
    spread,  // training directions by k-means++ seeding (distance-squared sampling)
    pairs,   // as spread with u ~ -u, each pick giving codes +u and -u
};

struct TrainConfig {
    std::size_t epochs = 3000;
    std::size_t batch_size = 64;  // 0 = full batch
    double learning_rate = 0.05;
    double lr_decay = 0.999;      // per-epoch multiplier, (0, 1]
    double theta = 1.0;
    double w0 = 10.0;
    bool threshold = true;
    bool norm = true;
    bool parallel = true;
    std::size_t lift_after = 2400;
    std::uint64_t seed = 1;
    double init_scale = 0.1;
    WeightInit init = WeightInit::sphere;

    void validate() const;
};

struct TrainReport {
    std::vector<double> objective_trace;     // full-dataset D after each epoch
    std::vector<double> learning_rate_trace; // rate in effect during each epoch
    std::vector<bool> constrained_trace;     // constraints active during each epoch
    double final_objective = 0.0;
    std::size_t epochs_run = 0;
    std::size_t constraint_lift_epoch = 0;
    std::size_t rejected_steps = 0;          // full-batch steps undone by halving
};

// Weights at norm w0 along random directions (sphere) or training-point
// directions (data, spread, pairs; these need `data`); thresholded mode when cfg.threshold;
// recon_scale = init_scale and recon = init_scale * w_hat for every entry.
Codebook init_codebook(std::size_t dim, std::size_t size, const TrainConfig& cfg, Rng& rng,
                       const Dataset* data = nullptr);

struct TrainResult {
    Codebook codebook;
    TrainReport report;
};

// Starts from init_codebook(data.dim(), size, cfg, rng, &data).
TrainResult train(const Dataset& data, std::size_t size, const TrainConfig& cfg, Rng& rng);

// Continues from an existing codebook (its constraint flags are overwritten from cfg).
TrainResult train_from(Codebook initial, const Dataset& data, const TrainConfig& cfg, Rng& rng);

// CSV: epoch,objective,learning_rate,constraints_active
void write_trace_csv(std::ostream& out, const TrainReport& report);

}  // namespace svq
