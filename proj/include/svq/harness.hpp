#pragma once

// Building blocks for the command-line verbs: dataset files, scenario
// training, sweeps, recovery and invariance scores, gradient and identity
// self-checks, and θ calibration. Everything here is deterministic given the
// configuration.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "svq/codebook.hpp"
#include "svq/config.hpp"
#include "svq/encoder.hpp"
#include "svq/scenario.hpp"
#include "svq/trainer.hpp"

namespace svq {

// Stream ids kept clear of the dataset draws 0 .. N-1.
inline constexpr std::uint64_t kTrainStream = std::uint64_t{1} << 63;
inline constexpr std::uint64_t kExampleStream = kTrainStream + 1;
inline constexpr std::uint64_t kCheckStream = kTrainStream + 2;

// ---- dataset files -------------------------------------------------------

// Header a_s,a_j,i_j,x_1..x_d then one row per sample.
void write_dataset_csv(std::ostream& out, std::span<const SamplePoint> samples);
// Reads the x columns back; throws FormatError on malformed input.
Dataset read_dataset_csv(std::istream& in);
Dataset load_dataset_csv(const std::filesystem::path& path);

// A comment naming the command, then the full effective config; loadable
// with --config to regenerate the file it accompanies.
std::string manifest_text(const std::string& command, const RunConfig& cfg);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// ---- training and evaluation ---------------------------------------------

TrainResult train_scenario(const RunConfig& cfg, const Dataset& data);

// Draws N .. N+count-1 of the scenario stream: never part of the training set.
std::vector<SamplePoint> fresh_samples(const RunConfig& cfg, std::size_t count);

struct SweepRow {
    double location = 0.0;
    double depth_db = 0.0;
    double raw_ratio = 0.0;
    std::size_t rank = 0;
};

std::vector<SweepRow> run_sweep(const Codebook& cb, const ScenarioConfig& scenario, std::span<const double> locations,
                                double amplitude, double tol);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
// Self-contained matplotlib script plotting depth against location from `csv_name`.
std::string sweep_plot_script(const std::string& csv_name);
std::string null_example_plot_script(const std::string& csv_name, double signal_location);

// Row with the lowest depth (first on ties).
const SweepRow& sweep_minimum(std::span<const SweepRow> rows);

// Extent of the contiguous run of rows at or below `level_db` around the
// minimum, counted as (last - first) + one grid step. Rows must be evenly
// spaced and sorted by location.
double sweep_width(std::span<const SweepRow> rows, double level_db);

// Fraction of samples whose nulled residual peaks within one resolution cell
// of the signal location.
double recovery_rate(const Codebook& cb, const ScenarioConfig& scenario, std::span<const SamplePoint> samples,
                     double tol);

struct InvarianceScore {
    double signal_sensitivity = 0.0;  // mean |G s_hat|
    double jammer_sensitivity = 0.0;  // mean |G j_hat| along the jammer-amplitude direction
    double ratio = 0.0;               // signal / jammer
};

InvarianceScore invariance_ratio(const Codebook& cb, const ScenarioConfig& scenario,
                                 std::span<const SamplePoint> samples);

// Jammer locations covered by training: center +/- delta on a 0.25 grid.
std::vector<double> trained_locations(const ScenarioConfig& scenario);

// ---- θ calibration --------------------------------------------------------

struct CalibrationRow {
    double theta = 0.0;
    double mean_depth_db = 0.0;
    double invariance = 0.0;
    bool admissible = false;
};

struct CalibrationResult {
    std::vector<CalibrationRow> rows;
    double recommended = 0.0;
    bool any_admissible = false;  // false: recommendation ignores the invariance bound
};

CalibrationResult calibrate_theta(const RunConfig& cfg, const Dataset& data);

// ---- self-checks -----------------------------------------------------------

struct GradcheckReport {
    std::size_t trials = 0;
    double weight = 0.0;       // worst relative error per parameter class
    double bias = 0.0;
    double recon = 0.0;
    double recon_scale = 0.0;
    double input = 0.0;        // grad_x Pr(y|x)
    double worst() const;
};

inline constexpr double kGradcheckTolerance = 1e-6;

// Random codebooks (all mode and constraint combinations) against central
// finite differences.
GradcheckReport gradcheck(std::size_t dim, std::size_t size, std::size_t trials, std::uint64_t seed);

// Discrepancies are scaled by max(1, |objective|) so the tolerances hold
// for objectives of any size.
struct OracleReport {
    std::size_t instances = 0;
    double full_vs_reduced = 0.0;   // max |full - reduced|
    double noisy_pair = 0.0;        // max |direct - (integrated + constant)|
    double gap_deviation = 0.0;     // max over instances of (max gap - min gap)
    double cross_term = 0.0;        // max |cross-term|
    bool ok() const;
};

inline constexpr double kIdentityTolerance = 1e-12;
inline constexpr double kGapTolerance = 1e-10;

// `instances` random instances per identity (K <= 8, M <= 4, n <= 3), with 10
// encoder re-draws per invariance instance.
OracleReport run_oracles(std::uint64_t seed, std::size_t instances = 50);

}  // namespace svq
