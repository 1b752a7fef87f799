#include "svq/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "svq/error.hpp"

namespace svq {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ContractError(std::string(key) + ": expected a finite number, got '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ContractError(std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ContractError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_double(key, trim(text.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::string render_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) s += ", ";
        s += format_double(v[i]);
    }
    return s;
}

struct Key {
    std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
Key number(T RunConfig::*outer, double T::*field) {
    return {[=](RunConfig& c, std::string_view k, std::string_view v) { c.*outer.*field = parse_double(k, v); },
            [=](const RunConfig& c) { return format_double(c.*outer.*field); }};
}

template <class T>
Key count(T RunConfig::*outer, std::size_t T::*field) {
    return {[=](RunConfig& c, std::string_view k, std::string_view v) {
                c.*outer.*field = static_cast<std::size_t>(parse_u64(k, v));
            },
            [=](const RunConfig& c) { return std::to_string(c.*outer.*field); }};
}

Key flag(bool TrainConfig::*field) {
    return {[=](RunConfig& c, std::string_view k, std::string_view v) { c.train.*field = parse_bool(k, v); },
            [=](const RunConfig& c) { return std::string(c.train.*field ? "true" : "false"); }};
}

// Ordered so render_config output is stable.
const std::vector<std::pair<std::string, Key>>& keys() {
    static const std::vector<std::pair<std::string, Key>> table = [] {
        std::vector<std::pair<std::string, Key>> t;
        t.emplace_back("seed", Key{[](RunConfig& c, std::string_view k, std::string_view v) { c.set_seed(parse_u64(k, v)); },
                                   [](const RunConfig& c) { return std::to_string(c.seed); }});
        t.emplace_back("samples", Key{[](RunConfig& c, std::string_view k, std::string_view v) {
                                          c.samples = static_cast<std::size_t>(parse_u64(k, v));
                                      },
                                      [](const RunConfig& c) { return std::to_string(c.samples); }});
        t.emplace_back("test_points", Key{[](RunConfig& c, std::string_view k, std::string_view v) {
                                              c.test_points = static_cast<std::size_t>(parse_u64(k, v));
                                          },
                                          [](const RunConfig& c) { return std::to_string(c.test_points); }});
        t.emplace_back("scenario.dim", count(&RunConfig::scenario, &ScenarioConfig::dim));
        t.emplace_back("scenario.signal_location", number(&RunConfig::scenario, &ScenarioConfig::signal_location));
        t.emplace_back("scenario.sigma", number(&RunConfig::scenario, &ScenarioConfig::sigma));
        t.emplace_back("scenario.delta", number(&RunConfig::scenario, &ScenarioConfig::delta));
        t.emplace_back("scenario.jammer_center", number(&RunConfig::scenario, &ScenarioConfig::jammer_center));
        t.emplace_back("scenario.signal_bound", number(&RunConfig::scenario, &ScenarioConfig::signal_bound));
        t.emplace_back("scenario.jammer_bound", number(&RunConfig::scenario, &ScenarioConfig::jammer_bound));
        t.emplace_back("scenario.noise_bound", number(&RunConfig::scenario, &ScenarioConfig::noise_bound));
        t.emplace_back("scenario.codebook_size", count(&RunConfig::scenario, &ScenarioConfig::codebook_size));
        t.emplace_back("train.epochs", count(&RunConfig::train, &TrainConfig::epochs));
        t.emplace_back("train.batch_size", count(&RunConfig::train, &TrainConfig::batch_size));
        t.emplace_back("train.learning_rate", number(&RunConfig::train, &TrainConfig::learning_rate));
        t.emplace_back("train.lr_decay", number(&RunConfig::train, &TrainConfig::lr_decay));
        t.emplace_back("train.theta", number(&RunConfig::train, &TrainConfig::theta));
        t.emplace_back("train.w0", number(&RunConfig::train, &TrainConfig::w0));
        t.emplace_back("train.threshold", flag(&TrainConfig::threshold));
        t.emplace_back("train.norm", flag(&TrainConfig::norm));
        t.emplace_back("train.parallel", flag(&TrainConfig::parallel));
        t.emplace_back("train.lift_after", count(&RunConfig::train, &TrainConfig::lift_after));
        t.emplace_back("train.init_scale", number(&RunConfig::train, &TrainConfig::init_scale));
        t.emplace_back("train.init", Key{[](RunConfig& c, std::string_view k, std::string_view v) {
                                             if (v == "sphere") {
                                                 c.train.init = WeightInit::sphere;
                                             } else if (v == "data") {
                                                 c.train.init = WeightInit::data;
                                             } else if (v == "spread") {
                                                 c.train.init = WeightInit::spread;
                                             } else if (v == "pairs") {
                                                 c.train.init = WeightInit::pairs;
                                             } else {
                                                 throw ContractError(std::string(k) + ": expected sphere, data, spread or pairs");
                                             }
                                         },
                                         [](const RunConfig& c) {
                                             switch (c.train.init) {
                                                 case WeightInit::data: return std::string("data");
                                                 case WeightInit::spread: return std::string("spread");
                                                 case WeightInit::pairs: return std::string("pairs");
                                                 default: return std::string("sphere");
                                             }
                                         }});
        t.emplace_back("nulling.tol", Key{[](RunConfig& c, std::string_view k, std::string_view v) {
                                              c.tol = parse_double(k, v);
                                          },
                                          [](const RunConfig& c) { return format_double(c.tol); }});
        t.emplace_back("sweep.locations", Key{[](RunConfig& c, std::string_view k, std::string_view v) {
                                                  c.sweep.locations = parse_list(k, v);
                                              },
                                              [](const RunConfig& c) { return render_list(c.sweep.locations); }});
        t.emplace_back("sweep.amplitude", number(&RunConfig::sweep, &SweepConfig::amplitude));
        t.emplace_back("calibrate.thetas", Key{[](RunConfig& c, std::string_view k, std::string_view v) {
                                                   c.calibrate.thetas = parse_list(k, v);
                                               },
                                               [](const RunConfig& c) { return render_list(c.calibrate.thetas); }});
        t.emplace_back("calibrate.epochs", count(&RunConfig::calibrate, &CalibrationConfig::epochs));
        t.emplace_back("calibrate.max_invariance", number(&RunConfig::calibrate, &CalibrationConfig::max_invariance));
        t.emplace_back("gradcheck.dim", count(&RunConfig::gradcheck, &GradcheckConfig::dim));
        t.emplace_back("gradcheck.size", count(&RunConfig::gradcheck, &GradcheckConfig::size));
        t.emplace_back("gradcheck.trials", count(&RunConfig::gradcheck, &GradcheckConfig::trials));
        return t;
    }();
    return table;
}

const Key* find_key(std::string_view name) {
    for (const auto& [k, v] : keys()) {
        if (k == name) return &v;
    }
    return nullptr;
}

}  // namespace

void RunConfig::set_seed(std::uint64_t s) {
    seed = s;
    scenario.seed = s;
    train.seed = s;
}

void RunConfig::validate() const {
    scenario.validate();
    train.validate();
    if (samples == 0) throw ContractError("samples must be >= 1");
    if (test_points == 0) throw ContractError("test_points must be >= 1");
    if (!(tol > 0.0 && tol < 1.0)) throw ContractError("nulling.tol must lie in (0, 1)");
    if (!(sweep.amplitude != 0.0)) throw ContractError("sweep.amplitude must be nonzero");
    if (calibrate.thetas.empty()) throw ContractError("calibrate.thetas is empty");
    if (calibrate.epochs == 0) throw ContractError("calibrate.epochs must be >= 1");
    if (gradcheck.dim == 0 || gradcheck.size == 0) throw ContractError("gradcheck.dim and gradcheck.size must be >= 1");
}

std::size_t paired_codebook_size(double delta) {
    if (delta == 0.0) return 2;
    if (delta == 2.0) return 4;
    if (delta == 4.0) return 6;
    throw ContractError("no codebook size is paired with scenario.delta = " + format_double(delta) +
                        "; set scenario.codebook_size");
}

TrainConfig scenario_train_preset(double delta) {
    TrainConfig t;
    // Random picks often leave one jammer sign without a code; the scenario
    // is sign-symmetric, so seed the codes as +/- pairs.
    if (delta > 0.0) t.init = WeightInit::pairs;
    // Recovery at delta = 4 is sensitive to theta: 1.625 and 1.875 both do
    // markedly worse than 1.75.
    if (delta == 2.0) t.theta = 2.0;
    if (delta == 4.0) t.theta = 1.75;
    return t;
}

std::vector<double> default_sweep_grid() {
    std::vector<double> g;
    for (int k = 0; k <= 64; ++k) g.push_back(30.0 + 0.25 * k);
    return g;
}

RunConfig parse_config(std::string_view text, const std::string& origin) {
    std::map<std::string, std::string, std::less<>> entries;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) throw ContractError(where + "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (find_key(key) == nullptr) throw ContractError(where + "unknown key '" + key + "'");
        if (!entries.emplace(key, value).second) throw ContractError(where + "repeated key '" + key + "'");
    }

    RunConfig cfg;
    if (const auto it = entries.find("scenario.delta"); it != entries.end()) {
        cfg.scenario.delta = parse_double(it->first, it->second);
    }
    cfg.train = scenario_train_preset(cfg.scenario.delta);
    if (!entries.contains("scenario.codebook_size")) {
        cfg.scenario.codebook_size = paired_codebook_size(cfg.scenario.delta);
    }
    // Apply in table order so `seed` lands before anything that might read it.
    for (const auto& [name, key] : keys()) {
        if (const auto it = entries.find(name); it != entries.end()) key.set(cfg, name, it->second);
    }
    if (cfg.sweep.locations.empty()) cfg.sweep.locations = default_sweep_grid();
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string render_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& [name, key] : keys()) out += name + " = " + key.get(cfg) + "\n";
    return out;
}

}  // namespace svq
