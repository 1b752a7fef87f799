#pragma once

// Synthetic jammer/signal scenario: each vector is the sum of two sampled sinc
// responses (a weak signal at a fixed location, a strong jammer at a random
// location near jammer_center) plus independent uniform noise per component.
//
//   x_i = a_s sinc((i - i_s)/sigma) + a_j sinc((i - i_j)/sigma) + eps_i,  i = 1..d
//
// Random streams: draw k of a dataset uses Rng(seed, k) and consumes, in order,
// a_s, a_j, i_j, eps_1 .. eps_d. Generation order therefore does not matter.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "svq/encoder.hpp"

namespace svq {

class Rng;

struct ScenarioConfig {
    std::size_t dim = 100;
    double signal_location = 50.0;  // i_s
    double sigma = 2.0;             // response width; resolution cell is pi*sigma
    double delta = 0.0;             // i_j ~ U[jammer_center - delta, jammer_center + delta]
    double jammer_center = 38.0;
    double signal_bound = std::sqrt(1e-3);  // -30 dB
    double jammer_bound = 1.0;              // 0 dB
    double noise_bound = std::sqrt(1e-5);   // -50 dB
    std::size_t codebook_size = 2;          // M paired with delta
    std::uint64_t seed = 1;

    // Throws ContractError when a field is out of range.
    void validate() const;
};

struct SamplePoint {
    std::vector<double> x;
    double signal_amplitude = 0.0;   // a_s
    double jammer_amplitude = 0.0;   // a_j
    double jammer_location = 0.0;    // i_j
};

// sin(u)/u, with the removable singularity at 0.
double sinc(double u);

// One draw from the scenario distribution.
SamplePoint sample(const ScenarioConfig& cfg, Rng& rng);

// Draw `index` of the dataset stream defined by cfg.seed.
SamplePoint sample_at(const ScenarioConfig& cfg, std::uint64_t index);

// Latents plus explicit noise (empty noise = none) to a vector.
std::vector<double> render(const ScenarioConfig& cfg, double signal_amplitude, double jammer_amplitude,
                           double jammer_location, std::span<const double> noise = {});

std::vector<double> pure_jammer(const ScenarioConfig& cfg, double jammer_location, double jammer_amplitude);
std::vector<double> signal_only(const ScenarioConfig& cfg, double signal_amplitude);

// Draws 0..count-1 of the cfg.seed stream.
std::vector<SamplePoint> generate_samples(const ScenarioConfig& cfg, std::size_t count);
Dataset generate_dataset(const ScenarioConfig& cfg, std::size_t count);

// Peak-to-first-zero distance of the response, pi * sigma.
inline double resolution_cell(const ScenarioConfig& cfg) { return 3.14159265358979323846 * cfg.sigma; }

}  // namespace svq
