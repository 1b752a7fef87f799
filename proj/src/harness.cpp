#include "svq/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "svq/error.hpp"
#include "svq/nulling.hpp"
#include "svq/oracle.hpp"
#include "svq/random.hpp"

namespace svq {
namespace {

void put_double(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

std::vector<double> unit(std::vector<double> v) {
    double n = 0.0;
    for (const double c : v) n += c * c;
    n = std::sqrt(n);
    for (double& c : v) c /= n;
    return v;
}

double scaled(double diff, double magnitude) { return std::abs(diff) / std::max(1.0, std::abs(magnitude)); }

}  // namespace

void write_dataset_csv(std::ostream& out, std::span<const SamplePoint> samples) {
    const std::size_t d = samples.empty() ? 0 : samples.front().x.size();
    out << "a_s,a_j,i_j";
    for (std::size_t i = 1; i <= d; ++i) out << ",x_" << i;
    out << '\n';
    for (const auto& s : samples) {
        put_double(out, s.signal_amplitude);
        out << ',';
        put_double(out, s.jammer_amplitude);
        out << ',';
        put_double(out, s.jammer_location);
        for (const double v : s.x) {
            out << ',';
            put_double(out, v);
        }
        out << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("dataset file is empty");
    if (line.rfind("a_s,a_j,i_j", 0) != 0) throw FormatError("dataset header must start with a_s,a_j,i_j");
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 4) throw FormatError("dataset has no x columns");
    const std::size_t d = columns - 3;
    Dataset data(d);
    std::vector<double> row(columns);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const char* p = line.data();
        const char* end = p + line.size();
        for (std::size_t c = 0; c < columns; ++c) {
            const auto [next, ec] = std::from_chars(p, end, row[c]);
            if (ec != std::errc{}) throw FormatError("dataset line " + std::to_string(line_no) + ": bad number");
            p = next;
            if (c + 1 < columns) {
                if (p == end || *p != ',') throw FormatError("dataset line " + std::to_string(line_no) + ": too few columns");
                ++p;
            }
        }
        if (p != end) throw FormatError("dataset line " + std::to_string(line_no) + ": too many columns");
        data.push_back(std::span<const double>(row).subspan(3));
    }
    if (data.empty()) throw FormatError("dataset has no rows");
    return data;
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset " + path.string());
    return read_dataset_csv(in);
}

std::string manifest_text(const std::string& command, const RunConfig& cfg) {
    return "# svq " + command + "\n" + render_config(cfg);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

TrainResult train_scenario(const RunConfig& cfg, const Dataset& data) {
    if (data.dim() != cfg.scenario.dim) throw DimensionMismatch("dataset dimension does not match scenario.dim");
    Rng rng(cfg.train.seed, kTrainStream);
    return train(data, cfg.scenario.codebook_size, cfg.train, rng);
}

std::vector<SamplePoint> fresh_samples(const RunConfig& cfg, std::size_t count) {
    std::vector<SamplePoint> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(sample_at(cfg.scenario, cfg.samples + k));
    return out;
}

std::vector<SweepRow> run_sweep(const Codebook& cb, const ScenarioConfig& scenario, std::span<const double> locations,
                                double amplitude, double tol) {
    if (locations.empty()) throw ContractError("sweep needs at least one location");
    std::vector<SweepRow> rows;
    rows.reserve(locations.size());
    for (const double loc : locations) {
        const auto r = null_report(cb, pure_jammer(scenario, loc, amplitude), loc, tol);
        rows.push_back({loc, r.depth_db, r.raw_ratio, r.rank});
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "i_j,depth_db,raw_ratio,rank\n";
    for (const auto& r : rows) {
        put_double(out, r.location);
        out << ',';
        put_double(out, r.depth_db);
        out << ',';
        put_double(out, r.raw_ratio);
        out << ',' << r.rank << '\n';
    }
}

std::string sweep_plot_script(const std::string& csv_name) {
    return R"PY(#!/usr/bin/env python3
import csv, os, sys
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, ")PY" +
           csv_name + R"PY("))))
x = [float(r["i_j"]) for r in rows]
y = [float(r["depth_db"]) for r in rows]
plt.plot(x, y, marker=".")
plt.xlabel("nominal jammer location")
plt.ylabel("nulling depth (dB)")
plt.grid(True)
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "sweep.png")
plt.savefig(out, dpi=120)
)PY";
}

std::string null_example_plot_script(const std::string& csv_name, double signal_location) {
    std::ostringstream loc;
    put_double(loc, signal_location);
    return R"PY(#!/usr/bin/env python3
import csv, os, sys
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, ")PY" +
           csv_name + R"PY("))))
i = [int(r["i"]) for r in rows]
fig, ax = plt.subplots(2, 1, sharex=True)
ax[0].plot(i, [float(r["x_before"]) for r in rows])
ax[0].set_ylabel("before")
ax[1].plot(i, [float(r["x_after"]) for r in rows])
ax[1].set_ylabel("after")
for a in ax:
    a.axvline()PY" + loc.str() + R"PY(, color="grey", linestyle=":")
ax[1].set_xlabel("component")
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "null_example.png")
fig.savefig(out, dpi=120)
)PY";
}

const SweepRow& sweep_minimum(std::span<const SweepRow> rows) {
    if (rows.empty()) throw ContractError("empty sweep");
    return *std::min_element(rows.begin(), rows.end(),
                             [](const SweepRow& a, const SweepRow& b) { return a.depth_db < b.depth_db; });
}

double sweep_width(std::span<const SweepRow> rows, double level_db) {
    const auto& lowest = sweep_minimum(rows);
    if (lowest.depth_db > level_db) return 0.0;
    const auto at = static_cast<std::size_t>(&lowest - rows.data());
    std::size_t lo = at;
    std::size_t hi = at;
    while (lo > 0 && rows[lo - 1].depth_db <= level_db) --lo;
    while (hi + 1 < rows.size() && rows[hi + 1].depth_db <= level_db) ++hi;
    const double step = rows.size() > 1 ? rows[1].location - rows[0].location : 0.0;
    return rows[hi].location - rows[lo].location + step;
}

double recovery_rate(const Codebook& cb, const ScenarioConfig& scenario, std::span<const SamplePoint> samples,
                     double tol) {
    if (samples.empty()) throw ContractError("recovery needs at least one sample");
    std::size_t hits = 0;
    for (const auto& s : samples) {
        const auto nulled = null(cb, s.x, tol);
        std::size_t peak = 0;
        for (std::size_t i = 1; i < nulled.size(); ++i) {
            if (std::abs(nulled[i]) > std::abs(nulled[peak])) peak = i;
        }
        const double location = static_cast<double>(peak + 1);
        if (std::abs(location - scenario.signal_location) <= resolution_cell(scenario)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

InvarianceScore invariance_ratio(const Codebook& cb, const ScenarioConfig& scenario,
                                 std::span<const SamplePoint> samples) {
    if (samples.empty()) throw ContractError("invariance needs at least one sample");
    const auto signal = unit(signal_only(scenario, 1.0));
    InvarianceScore score;
    for (const auto& s : samples) {
        score.signal_sensitivity += posterior_sensitivity(cb, s.x, signal);
        score.jammer_sensitivity += posterior_sensitivity(cb, s.x, pure_jammer(scenario, s.jammer_location, 1.0));
    }
    const auto n = static_cast<double>(samples.size());
    score.signal_sensitivity /= n;
    score.jammer_sensitivity /= n;
    score.ratio = score.jammer_sensitivity > 0.0 ? score.signal_sensitivity / score.jammer_sensitivity
                                                 : std::numeric_limits<double>::infinity();
    return score;
}

std::vector<double> trained_locations(const ScenarioConfig& scenario) {
    std::vector<double> out;
    const auto steps = static_cast<int>(std::floor(2.0 * scenario.delta / 0.25 + 1e-9));
    for (int k = 0; k <= steps; ++k) out.push_back(scenario.jammer_center - scenario.delta + 0.25 * k);
    return out;
}

CalibrationResult calibrate_theta(const RunConfig& cfg, const Dataset& data) {
    if (cfg.calibrate.thetas.empty()) throw ContractError("calibrate.thetas is empty");
    const auto locations = trained_locations(cfg.scenario);
    const auto tests = fresh_samples(cfg, cfg.test_points);
    CalibrationResult result;
    for (const double theta : cfg.calibrate.thetas) {
        RunConfig run = cfg;
        run.train.theta = theta;
        run.train.epochs = cfg.calibrate.epochs;
        run.train.lift_after = cfg.calibrate.epochs;
        const auto trained = train_scenario(run, data);
        const auto sweep = run_sweep(trained.codebook, cfg.scenario, locations, cfg.sweep.amplitude, cfg.tol);
        CalibrationRow row;
        row.theta = theta;
        for (const auto& r : sweep) row.mean_depth_db += r.depth_db;
        row.mean_depth_db /= static_cast<double>(sweep.size());
        row.invariance = invariance_ratio(trained.codebook, cfg.scenario, tests).ratio;
        row.admissible = row.invariance <= cfg.calibrate.max_invariance;
        result.rows.push_back(row);
    }
    result.any_admissible = std::any_of(result.rows.begin(), result.rows.end(),
                                        [](const CalibrationRow& r) { return r.admissible; });
    const CalibrationRow* best = nullptr;
    for (const auto& r : result.rows) {
        if (result.any_admissible && !r.admissible) continue;
        if (best == nullptr || r.mean_depth_db < best->mean_depth_db) best = &r;
    }
    result.recommended = best->theta;
    return result;
}

double GradcheckReport::worst() const { return std::max({weight, bias, recon, recon_scale, input}); }

namespace {

double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
    double diff = 0.0;
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
        a += analytic[i] * analytic[i];
        b += numeric[i] * numeric[i];
    }
    return std::sqrt(diff) / std::max({std::sqrt(a), std::sqrt(b), 1e-8});
}

template <class Perturb>
std::vector<double> central_difference(const Codebook& cb, const Dataset& data, std::size_t count, Perturb&& perturb) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double h = 1e-5;
        Codebook plus = cb;
        Codebook minus = cb;
        perturb(plus, k, h);
        perturb(minus, k, -h);
        out[k] = (objective(plus, data) - objective(minus, data)) / (2.0 * h);
    }
    return out;
}

}  // namespace

GradcheckReport gradcheck(std::size_t dim, std::size_t size, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw ContractError("gradcheck needs at least one trial");
    if (dim == 0 || size == 0) throw ContractError("gradcheck dimension and size must be positive");
    Rng rng(seed, kCheckStream);
    GradcheckReport report;
    report.trials = trials;
    const std::size_t m = size;
    const std::size_t d = dim;

    for (std::size_t t = 0; t < trials; ++t) {
        const bool thresholded = (t & 1U) != 0;
        const bool parallel = (t & 2U) != 0;

        Codebook cb(m, d);
        std::vector<double> v(d);
        for (std::size_t y = 0; y < m; ++y) {
            for (double& c : v) c = 0.7 * rng.normal();
            cb.set_weight(y, v);
            for (double& c : v) c = rng.normal();
            cb.set_recon(y, v);
            cb.set_bias(y, 0.5 * rng.normal());
            cb.set_recon_scale(y, rng.normal());
        }
        if (thresholded) cb.set_thresholded(rng.uniform(-0.5, 0.5));
        if (parallel) cb.set_parallel(true);

        Dataset data(d);
        for (int i = 0; i < 7; ++i) {
            for (double& c : v) c = rng.normal();
            data.push_back(v);
        }

        const Gradients g = objective_gradients(cb, data);

        const auto numeric_w = central_difference(cb, data, m * d, [d](Codebook& c, std::size_t k, double h) {
            std::vector<double> w(c.weight(k / d).begin(), c.weight(k / d).end());
            w[k % d] += h;
            c.set_weight(k / d, w);
        });
        report.weight = std::max(report.weight, relative_error(g.weight, numeric_w));

        if (!thresholded) {
            const auto numeric_b = central_difference(cb, data, m, [](Codebook& c, std::size_t k, double h) {
                c.set_bias(k, c.bias(k) + h);
            });
            report.bias = std::max(report.bias, relative_error(g.bias, numeric_b));
        }

        if (parallel) {
            const auto numeric_s = central_difference(cb, data, m, [](Codebook& c, std::size_t k, double h) {
                c.set_recon_scale(k, c.recon_scale(k) + h);
            });
            report.recon_scale = std::max(report.recon_scale, relative_error(g.recon_scale, numeric_s));
        } else {
            const auto numeric_r = central_difference(cb, data, m * d, [d](Codebook& c, std::size_t k, double h) {
                std::vector<double> r(c.recon(k / d).begin(), c.recon(k / d).end());
                r[k % d] += h;
                c.set_recon(k / d, r);
            });
            report.recon = std::max(report.recon, relative_error(g.recon, numeric_r));
        }

        // grad_x Pr(y|x) at one of the data points.
        const auto x0 = data.point(0);
        const Eigen::MatrixXd grad = posterior_gradient(cb, x0);
        std::vector<double> analytic(m * d);
        std::vector<double> numeric(m * d);
        std::vector<double> x(x0.begin(), x0.end());
        for (std::size_t i = 0; i < d; ++i) {
            const double h = 1e-6;
            x[i] = x0[i] + h;
            const auto up = posterior(cb, x).probs;
            x[i] = x0[i] - h;
            const auto down = posterior(cb, x).probs;
            x[i] = x0[i];
            for (std::size_t y = 0; y < m; ++y) {
                numeric[y * d + i] = (up[y] - down[y]) / (2.0 * h);
                analytic[y * d + i] = grad(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(i));
            }
        }
        report.input = std::max(report.input, relative_error(analytic, numeric));
    }
    return report;
}

bool OracleReport::ok() const {
    return full_vs_reduced <= kIdentityTolerance && noisy_pair <= kIdentityTolerance &&
           gap_deviation <= kGapTolerance && cross_term <= kIdentityTolerance;
}

OracleReport run_oracles(std::uint64_t seed, std::size_t instances) {
    Rng rng(seed, kCheckStream);
    const auto pick = [&rng](std::size_t hi) { return static_cast<std::size_t>(rng.below(hi)) + 1; };
    OracleReport report;
    report.instances = instances;
    for (std::size_t t = 0; t < instances; ++t) {
        const auto fmc = oracle::random_fmc(pick(8), pick(4), pick(3), pick(3), rng);
        const double full = oracle::fmc_objective_full(fmc);
        const double reduced = oracle::fmc_objective_reduced(fmc);
        report.full_vs_reduced = std::max(report.full_vs_reduced, scaled(full - reduced, full));

        const auto noisy = oracle::random_noisy_fmc(pick(6), pick(8), pick(4), pick(3), pick(3), rng);
        const auto pair = oracle::noisy_objective_pair(noisy);
        report.noisy_pair =
            std::max(report.noisy_pair, scaled(pair.d_noisy - pair.d_integrated_plus_const, pair.d_noisy));

        auto product = oracle::random_product_fmc(pick(5), pick(5), pick(4), pick(3), pick(3), rng);
        double lo = 0.0;
        double hi = 0.0;
        for (int r = 0; r <= 10; ++r) {
            if (r > 0) oracle::rerandomize_encoder(product, rng);
            const auto check = oracle::invariance_reduction_check(product);
            if (r == 0) {
                lo = hi = check.gap;
            } else {
                lo = std::min(lo, check.gap);
                hi = std::max(hi, check.gap);
            }
            report.cross_term = std::max(report.cross_term, scaled(check.cross_term, check.d_split));
        }
        report.gap_deviation = std::max(report.gap_deviation, scaled(hi - lo, hi));
    }
    return report;
}

}  // namespace svq
