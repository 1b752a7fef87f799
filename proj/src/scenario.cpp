#include "svq/scenario.hpp"

#include <string>

#include "svq/error.hpp"
#include "svq/random.hpp"

namespace svq {

void ScenarioConfig::validate() const {
    if (dim == 0) throw ContractError("scenario dimension must be >= 1");
    if (!(sigma > 0.0)) throw ContractError("scenario sigma must be > 0");
    if (!(delta >= 0.0)) throw ContractError("scenario delta must be >= 0");
    if (!(signal_bound > 0.0) || !(jammer_bound > 0.0) || !(noise_bound > 0.0)) {
        throw ContractError("scenario amplitude and noise bounds must be > 0");
    }
    if (codebook_size == 0) throw ContractError("scenario codebook size must be >= 1");
}

double sinc(double u) {
    if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
    return std::sin(u) / u;
}

std::vector<double> render(const ScenarioConfig& cfg, double signal_amplitude, double jammer_amplitude,
                           double jammer_location, std::span<const double> noise) {
    if (!noise.empty() && noise.size() != cfg.dim) throw DimensionMismatch("noise length does not match scenario");
    std::vector<double> x(cfg.dim);
    for (std::size_t k = 0; k < cfg.dim; ++k) {
        const double i = static_cast<double>(k + 1);
        x[k] = signal_amplitude * sinc((i - cfg.signal_location) / cfg.sigma) +
               jammer_amplitude * sinc((i - jammer_location) / cfg.sigma);
        if (!noise.empty()) x[k] += noise[k];
    }
    return x;
}

SamplePoint sample(const ScenarioConfig& cfg, Rng& rng) {
    SamplePoint s;
    s.signal_amplitude = rng.uniform(-cfg.signal_bound, cfg.signal_bound);
    s.jammer_amplitude = rng.uniform(-cfg.jammer_bound, cfg.jammer_bound);
    s.jammer_location = rng.uniform(cfg.jammer_center - cfg.delta, cfg.jammer_center + cfg.delta);
    std::vector<double> noise(cfg.dim);
    for (double& e : noise) e = rng.uniform(-cfg.noise_bound, cfg.noise_bound);
    s.x = render(cfg, s.signal_amplitude, s.jammer_amplitude, s.jammer_location, noise);
    return s;
}

SamplePoint sample_at(const ScenarioConfig& cfg, std::uint64_t index) {
    Rng rng(cfg.seed, index);
    return sample(cfg, rng);
}

std::vector<double> pure_jammer(const ScenarioConfig& cfg, double jammer_location, double jammer_amplitude) {
    return render(cfg, 0.0, jammer_amplitude, jammer_location);
}

std::vector<double> signal_only(const ScenarioConfig& cfg, double signal_amplitude) {
    return render(cfg, signal_amplitude, 0.0, cfg.jammer_center);
}

std::vector<SamplePoint> generate_samples(const ScenarioConfig& cfg, std::size_t count) {
    cfg.validate();
    std::vector<SamplePoint> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(sample_at(cfg, k));
    return out;
}

Dataset generate_dataset(const ScenarioConfig& cfg, std::size_t count) {
    cfg.validate();
    if (count == 0) throw ContractError("dataset size must be >= 1");
    Dataset data(cfg.dim);
    for (std::size_t k = 0; k < count; ++k) data.push_back(sample_at(cfg, k).x);
    return data;
}

}  // namespace svq
