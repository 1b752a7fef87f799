// svq: generate scenario data, train encoders, null jammers, run self-checks.
//
// Exit status: 0 success, 1 validation failure (bad config, failed check,
// divergence), 2 I/O or file-format error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "svq/codebook_io.hpp"
#include "svq/config.hpp"
#include "svq/error.hpp"
#include "svq/harness.hpp"
#include "svq/kernels.hpp"
#include "svq/nulling.hpp"
#include "svq/random.hpp"
#include "svq/scenario.hpp"

namespace fs = std::filesystem;
using namespace svq;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
};

RunConfig effective_config(const Globals& g) {
    RunConfig cfg = g.config_path.empty() ? parse_config("") : load_config(g.config_path);
    if (g.seed) cfg.set_seed(*g.seed);
    cfg.validate();
    return cfg;
}

fs::path output_dir(const Globals& g) {
    const fs::path dir(g.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}


int cmd_gen(const Globals& g) {
    const RunConfig cfg = effective_config(g);
    const fs::path dir = output_dir(g);
    const auto samples = generate_samples(cfg.scenario, cfg.samples);
    std::ostringstream csv;
    write_dataset_csv(csv, samples);
    write_text_file(dir / "dataset.csv", csv.str());
    write_text_file(dir / "dataset.manifest", manifest_text("gen", cfg));
    std::cout << "wrote " << samples.size() << " samples to " << (dir / "dataset.csv").string() << '\n';
    return 0;
}

int cmd_train(const Globals& g, const std::string& data_path) {
    const RunConfig cfg = effective_config(g);
    const fs::path dir = output_dir(g);
    const Dataset data = load_dataset_csv(data_path.empty() ? dir / "dataset.csv" : fs::path(data_path));
    const auto result = train_scenario(cfg, data);
    save_codebook(result.codebook, dir / "codebook.svq");
    std::ostringstream trace;
    write_trace_csv(trace, result.report);
    write_text_file(dir / "trace.csv", trace.str());
    write_text_file(dir / "codebook.manifest", manifest_text("train", cfg));
    std::cout << "kernels: " << kernels::active().name << '\n'
              << "epochs: " << result.report.epochs_run << "  final objective: "
              << fmt(result.report.final_objective, "%.10g") << '\n'
              << "wrote " << (dir / "codebook.svq").string() << '\n';
    return 0;
}

int cmd_sweep(const Globals& g, const std::string& codebook_path) {
    const RunConfig cfg = effective_config(g);
    const fs::path dir = output_dir(g);
    const Codebook cb = load_codebook(codebook_path.empty() ? dir / "codebook.svq" : fs::path(codebook_path));
    const auto rows = run_sweep(cb, cfg.scenario, cfg.sweep.locations, cfg.sweep.amplitude, cfg.tol);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_text_file(dir / "sweep.csv", csv.str());
    write_text_file(dir / "sweep_plot.py", sweep_plot_script("sweep.csv"));
    write_text_file(dir / "sweep.manifest", manifest_text("sweep", cfg));
    const auto& lowest = sweep_minimum(rows);
    std::cout << "minimum " << fmt(lowest.depth_db, "%.2f") << " dB at i_j = " << fmt(lowest.location) << '\n'
              << "-10 dB width: " << fmt(sweep_width(rows, -10.0)) << '\n';
    return 0;
}

int cmd_null_example(const Globals& g, const std::string& codebook_path) {
    const RunConfig cfg = effective_config(g);
    const fs::path dir = output_dir(g);
    const Codebook cb = load_codebook(codebook_path.empty() ? dir / "codebook.svq" : fs::path(codebook_path));
    Rng rng(cfg.seed, kExampleStream);
    const SamplePoint s = sample(cfg.scenario, rng);
    const auto after = null(cb, s.x, cfg.tol);
    std::ostringstream csv;
    csv << "i,x_before,x_after\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        csv << (i + 1) << ',' << fmt(s.x[i], "%.17g") << ',' << fmt(after[i], "%.17g") << '\n';
    }
    write_text_file(dir / "null_example.csv", csv.str());
    write_text_file(dir / "null_example_plot.py", null_example_plot_script("null_example.csv", cfg.scenario.signal_location));
    write_text_file(dir / "null_example.manifest", manifest_text("null-example", cfg));
    std::cout << "a_s = " << fmt(s.signal_amplitude) << "  a_j = " << fmt(s.jammer_amplitude)
              << "  i_j = " << fmt(s.jammer_location) << "  depth = " << fmt(depth_db(energy_ratio(s.x, after)), "%.2f")
              << " dB\n";
    return 0;
}

int cmd_gradcheck(const Globals& g, std::optional<std::size_t> dim, std::optional<std::size_t> size,
                  std::optional<std::size_t> trials) {
    const RunConfig cfg = effective_config(g);
    const auto r = gradcheck(dim.value_or(cfg.gradcheck.dim), size.value_or(cfg.gradcheck.size),
                             trials.value_or(cfg.gradcheck.trials), cfg.seed);
    std::cout << "trials: " << r.trials << '\n'
              << "worst relative error\n"
              << "  weight       " << fmt(r.weight, "%.3e") << '\n'
              << "  bias         " << fmt(r.bias, "%.3e") << '\n'
              << "  recon        " << fmt(r.recon, "%.3e") << '\n'
              << "  recon_scale  " << fmt(r.recon_scale, "%.3e") << '\n'
              << "  input        " << fmt(r.input, "%.3e") << '\n';
    const bool ok = r.worst() <= kGradcheckTolerance;
    std::cout << (ok ? "PASS" : "FAIL") << " (tolerance " << fmt(kGradcheckTolerance, "%.0e") << ")\n";
    return ok ? 0 : 1;
}

int cmd_oracle(const Globals& g) {
    const RunConfig cfg = effective_config(g);
    const auto r = run_oracles(cfg.seed);
    std::cout << "instances per identity: " << r.instances << '\n'
              << "  full vs reduced objective    " << fmt(r.full_vs_reduced, "%.3e") << '\n'
              << "  noisy direct vs integrated   " << fmt(r.noisy_pair, "%.3e") << '\n'
              << "  gap deviation (max - min)    " << fmt(r.gap_deviation, "%.3e") << '\n'
              << "  cross-term magnitude         " << fmt(r.cross_term, "%.3e") << '\n';
    std::cout << (r.ok() ? "PASS" : "FAIL") << '\n';
    return r.ok() ? 0 : 1;
}

int cmd_calibrate(const Globals& g, const std::string& data_path) {
    const RunConfig cfg = effective_config(g);
    const fs::path dir = output_dir(g);
    const Dataset data = load_dataset_csv(data_path.empty() ? dir / "dataset.csv" : fs::path(data_path));
    const auto result = calibrate_theta(cfg, data);
    std::ostringstream csv;
    csv << "theta,mean_depth_db,invariance,admissible\n";
    std::cout << "theta  mean_depth_db  invariance\n";
    for (const auto& r : result.rows) {
        csv << fmt(r.theta, "%.17g") << ',' << fmt(r.mean_depth_db, "%.17g") << ',' << fmt(r.invariance, "%.17g") << ','
            << (r.admissible ? 1 : 0) << '\n';
        std::cout << fmt(r.theta) << "  " << fmt(r.mean_depth_db, "%.2f") << "  " << fmt(r.invariance, "%.4f")
                  << (r.admissible ? "" : "  (inadmissible)") << '\n';
    }
    write_text_file(dir / "calibration.csv", csv.str());
    write_text_file(dir / "calibration.manifest", manifest_text("calibrate-theta", cfg));
    std::cout << "recommended theta: " << fmt(result.recommended) << '\n';
    if (!result.any_admissible) {
        std::cout << "no theta met the invariance bound " << fmt(cfg.calibrate.max_invariance)
                  << "; recommendation is by depth alone\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic vector quantiser: scenario data, training, jammer nulling and self-checks"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "key = value configuration file");
    app.add_option("--seed", g.seed, "seed for every random stream (overrides the config)");
    app.add_option("--out", g.out, "output directory")->capture_default_str();

    std::string data_path;
    std::string codebook_path;
    std::optional<std::size_t> gc_dim;
    std::optional<std::size_t> gc_size;
    std::optional<std::size_t> gc_trials;

    auto* gen = app.add_subcommand("gen", "write the scenario dataset (dataset.csv)");
    auto* train = app.add_subcommand("train", "train a codebook (codebook.svq, trace.csv)");
    train->add_option("--data", data_path, "dataset CSV (default <out>/dataset.csv)");
    auto* sweep = app.add_subcommand("sweep", "pure-jammer nulling depth over jammer locations (sweep.csv)");
    sweep->add_option("--codebook", codebook_path, "codebook file (default <out>/codebook.svq)");
    auto* example = app.add_subcommand("null-example", "one sample before and after nulling (null_example.csv)");
    example->add_option("--codebook", codebook_path, "codebook file (default <out>/codebook.svq)");
    auto* gc = app.add_subcommand("gradcheck", "analytic gradients against finite differences");
    gc->add_option("--dim", gc_dim, "input dimension");
    gc->add_option("--size", gc_size, "codebook size M");
    gc->add_option("--trials", gc_trials, "random instances");
    auto* orc = app.add_subcommand("oracle", "exact-enumeration identity checks");
    auto* cal = app.add_subcommand("calibrate-theta", "short training runs over a theta grid");
    cal->add_option("--data", data_path, "dataset CSV (default <out>/dataset.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(g);
        if (train->parsed()) return cmd_train(g, data_path);
        if (sweep->parsed()) return cmd_sweep(g, codebook_path);
        if (example->parsed()) return cmd_null_example(g, codebook_path);
        if (gc->parsed()) return cmd_gradcheck(g, gc_dim, gc_size, gc_trials);
        if (orc->parsed()) return cmd_oracle(g);
        if (cal->parsed()) return cmd_calibrate(g, data_path);
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
