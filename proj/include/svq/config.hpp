#pragma once

// Run configuration for the command-line tool.
//
// File format: UTF-8 text, one `key = value` per line, `#` starts a comment,
// blank lines ignored. Keys are namespaced (scenario.*, train.*, nulling.*,
// sweep.*, calibrate.*, gradcheck.*) plus the top-level `seed` and `samples`.
// Unknown keys, repeated keys and unparsable values are errors. Lists are
// comma separated.
//
// Keys left unset take scenario-dependent defaults: scenario.codebook_size
// follows the delta pairing (0 -> 2, 2 -> 4, 4 -> 6) and train.* falls back
// to the preset for that delta (see scenario_train_preset).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "svq/nulling.hpp"
#include "svq/scenario.hpp"
#include "svq/trainer.hpp"

namespace svq {

struct SweepConfig {
    std::vector<double> locations;  // empty = default grid 30..46 step 0.25
    double amplitude = 1.0;
};

struct CalibrationConfig {
    std::vector<double> thetas{0.25, 0.5, 0.75, 1.0, 1.5};
    std::size_t epochs = 200;        // per θ; lift is disabled in these short runs
    double max_invariance = 0.05;    // admissibility bound on the invariance ratio
};

struct GradcheckConfig {
    std::size_t dim = 6;
    std::size_t size = 3;
    std::size_t trials = 100;
};

struct RunConfig {
    ScenarioConfig scenario;
    TrainConfig train;
    std::size_t samples = 10000;     // training-set size N
    std::size_t test_points = 100;   // fresh draws for evaluation
    double tol = kDefaultRankTolerance;
    SweepConfig sweep;
    CalibrationConfig calibrate;
    GradcheckConfig gradcheck;
    std::uint64_t seed = 1;

    // Sets the seed everywhere it is used.
    void set_seed(std::uint64_t s);
    void validate() const;
};

// M paired with delta; throws ContractError for a delta without a pairing.
std::size_t paired_codebook_size(double delta);

// Training defaults for the scenario with the given delta.
TrainConfig scenario_train_preset(double delta);

std::vector<double> default_sweep_grid();

// Parses `text`. `origin` names the source in error messages.
RunConfig parse_config(std::string_view text, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& path);

// Every key with its effective value, in a form parse_config accepts.
std::string render_config(const RunConfig& cfg);

}  // namespace svq
