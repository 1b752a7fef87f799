#include "svq/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "svq/error.hpp"
#include "svq/kernels.hpp"
#include "svq/random.hpp"

namespace svq {

void TrainConfig::validate() const {
    if (epochs == 0) throw ContractError("train.epochs must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ContractError("train.learning_rate must be >= 0");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ContractError("train.lr_decay must lie in (0, 1]");
    if (!(w0 > 0.0) || !std::isfinite(w0)) throw ContractError("train.w0 must be > 0");
    if (!std::isfinite(theta)) throw ContractError("train.theta must be finite");
    if (lift_after > epochs) throw ContractError("train.lift_after must not exceed train.epochs");
    if (!(init_scale > 0.0) || !std::isfinite(init_scale)) throw ContractError("train.init_scale must be > 0");
}

namespace {

std::vector<double> random_direction(std::size_t dim, Rng& rng) {
    std::vector<double> v(dim);
    for (;;) {
        for (double& c : v) c = rng.normal();
        if (kernels::dot(v, v) > 0.0) return v;
    }
}

void scale_to(std::vector<double>& v, double norm) {
    const double k = norm / std::sqrt(kernels::dot(v, v));
    for (double& c : v) c *= k;
}

void apply_constraints(Codebook& cb, const TrainConfig& cfg, bool active) {
    if (active) {
        cb.set_norm_target(cfg.norm ? cfg.w0 : 0.0);
        cb.set_parallel(cfg.parallel);
    } else {
        cb.set_norm_target(0.0);
        cb.set_parallel(false);
    }
}

void check_finite(const Gradients& g) {
    const auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!std::isfinite(g.objective) || !finite(g.weight) || !finite(g.bias) || !finite(g.recon) ||
        !finite(g.recon_scale)) {
        throw DivergenceError("objective or gradient became non-finite");
    }
}

void step(Codebook& cb, const Gradients& g, double lr) {
    const std::size_t d = cb.dim();
    std::vector<double> w(d);
    std::vector<double> r(d);
    for (std::size_t y = 0; y < cb.size(); ++y) {
        if (cb.mode() == EncoderMode::affine) cb.set_bias(y, cb.bias(y) - lr * g.bias[y]);
        if (cb.parallel()) {
            cb.set_recon_scale(y, cb.recon_scale(y) - lr * g.recon_scale[y]);
        } else {
            const auto cur = cb.recon(y);
            std::copy(cur.begin(), cur.end(), r.begin());
            kernels::axpy(-lr, g.recon_row(y), r);
            cb.set_recon(y, r);
        }
        const auto cur = cb.weight(y);
        std::copy(cur.begin(), cur.end(), w.begin());
        kernels::axpy(-lr, g.weight_row(y), w);
        cb.set_weight(y, w);
    }
}

}  // namespace

Codebook init_codebook(std::size_t dim, std::size_t size, const TrainConfig& cfg, Rng& rng, const Dataset* data) {
    cfg.validate();
    Codebook cb(size, dim);
    if (cfg.init == WeightInit::spread || cfg.init == WeightInit::pairs) {
        if (data == nullptr || data->dim() != dim) throw ContractError("data initialisation needs the training set");
        const bool paired = cfg.init == WeightInit::pairs;
        std::vector<std::vector<double>> dirs;
        std::vector<double> energy;
        for (std::size_t i = 0; i < data->size(); ++i) {
            const auto x = data->point(i);
            const double e = kernels::dot(x, x);
            if (e == 0.0) continue;
            const double n = std::sqrt(e);
            std::vector<double> u(x.begin(), x.end());
            for (double& v : u) v /= n;
            dirs.push_back(std::move(u));
            energy.push_back(e);
        }
        if (dirs.size() < size) throw ContractError("not enough nonzero training points to initialise the codebook");
        // k-means++ seeding on unit directions, each point weighted by its
        // energy; with pairs, u and -u count as the same direction and each
        // pick fills two codes. Squared distance between unit vectors is at most 4.
        std::vector<double> nearest(dirs.size(), 4.0);
        std::vector<double> w;
        for (std::size_t y = 0; y < size; ++y) {
            if (paired && y % 2 == 1) {
                for (double& v : w) v = -v;
                cb.set_weight(y, w);
                continue;
            }
            double total = 0.0;
            for (std::size_t i = 0; i < dirs.size(); ++i) total += energy[i] * nearest[i];
            if (!(total > 0.0)) throw ContractError("training directions do not separate into distinct codes");
            double target = rng.uniform01() * total;
            std::size_t pick = dirs.size() - 1;
            for (std::size_t i = 0; i < dirs.size(); ++i) {
                target -= energy[i] * nearest[i];
                if (target < 0.0 && nearest[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            w = dirs[pick];
            for (std::size_t i = 0; i < dirs.size(); ++i) {
                double d = kernels::squared_distance(dirs[i], w);
                if (paired) d = std::min(d, 4.0 - d);
                nearest[i] = std::min(nearest[i], d);
            }
            scale_to(w, cfg.w0);
            cb.set_weight(y, w);
        }
    } else if (cfg.init == WeightInit::data) {
        if (data == nullptr || data->dim() != dim) throw ContractError("data initialisation needs the training set");
        std::vector<std::size_t> candidates(data->size());
        std::iota(candidates.begin(), candidates.end(), std::size_t{0});
        std::size_t remaining = candidates.size();
        for (std::size_t y = 0; y < size; ++y) {
            std::vector<double> w;
            while (w.empty()) {
                if (remaining == 0) throw ContractError("not enough nonzero training points to initialise the codebook");
                const auto pick = static_cast<std::size_t>(rng.below(remaining));
                std::swap(candidates[pick], candidates[--remaining]);
                const auto x = data->point(candidates[remaining]);
                if (kernels::dot(x, x) > 0.0) w.assign(x.begin(), x.end());
            }
            scale_to(w, cfg.w0);
            cb.set_weight(y, w);
        }
    } else {
        for (std::size_t y = 0; y < size; ++y) {
            auto w = random_direction(dim, rng);
            scale_to(w, cfg.w0);
            cb.set_weight(y, w);
        }
    }
    if (cfg.threshold) cb.set_thresholded(cfg.theta);
    std::vector<double> r(dim);
    for (std::size_t y = 0; y < size; ++y) {
        cb.set_recon_scale(y, cfg.init_scale);
        const auto w = cb.weight(y);
        const double k = cfg.init_scale / cb.weight_norm(y);
        for (std::size_t i = 0; i < dim; ++i) r[i] = k * w[i];
        cb.set_recon(y, r);
    }
    if (cfg.norm) cb.set_norm_target(cfg.w0);
    if (cfg.parallel) cb.set_parallel(true);
    return cb;
}

TrainResult train(const Dataset& data, std::size_t size, const TrainConfig& cfg, Rng& rng) {
    if (data.empty()) throw ContractError("training set is empty");
    Codebook cb = init_codebook(data.dim(), size, cfg, rng, &data);
    return train_from(std::move(cb), data, cfg, rng);
}

TrainResult train_from(Codebook cb, const Dataset& data, const TrainConfig& cfg, Rng& rng) {
    cfg.validate();
    if (data.empty()) throw ContractError("training set is empty");
    if (data.dim() != cb.dim()) throw DimensionMismatch("training set dimension does not match codebook");

    if (cfg.threshold) {
        cb.set_thresholded(cfg.theta);
    } else if (cb.mode() == EncoderMode::thresholded) {
        cb.set_affine();
    }
    apply_constraints(cb, cfg, cfg.lift_after > 0);

    const std::size_t n = data.size();
    const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= n;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainReport report;
    report.constraint_lift_epoch = cfg.lift_after;
    double lr = cfg.learning_rate;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (epoch == cfg.lift_after && epoch > 0) apply_constraints(cb, cfg, false);
        const bool constrained = epoch < cfg.lift_after;
        const double epoch_lr = lr;

        if (full_batch) {
            const Gradients g = objective_gradients(cb, data);
            check_finite(g);
            // Halve until the step does not increase D; give up (no step) once
            // the rate has underflowed.
            while (true) {
                Codebook candidate = cb;
                step(candidate, g, lr);
                const double after = objective(candidate, data);
                if (after <= g.objective) {
                    cb = std::move(candidate);
                    break;
                }
                ++report.rejected_steps;
                lr *= 0.5;
                if (lr < 1e-300) break;
            }
        } else {
            for (std::size_t i = n - 1; i > 0; --i) {
                std::swap(order[i], order[static_cast<std::size_t>(rng.below(i + 1))]);
            }
            for (std::size_t start = 0; start < n; start += cfg.batch_size) {
                const std::size_t len = std::min(cfg.batch_size, n - start);
                const Gradients g = objective_gradients(cb, data, std::span<const std::size_t>(order).subspan(start, len));
                check_finite(g);
                step(cb, g, lr);
            }
        }

        const double d = objective(cb, data);
        if (!std::isfinite(d)) throw DivergenceError("objective became non-finite at epoch " + std::to_string(epoch));
        report.objective_trace.push_back(d);
        report.learning_rate_trace.push_back(epoch_lr);
        report.constrained_trace.push_back(constrained);
        lr *= cfg.lr_decay;
    }
    report.epochs_run = cfg.epochs;
    report.final_objective = report.objective_trace.back();
    return {std::move(cb), std::move(report)};
}

void write_trace_csv(std::ostream& out, const TrainReport& report) {
    out << "epoch,objective,learning_rate,constraints_active\n";
    char buf[64];
    for (std::size_t e = 0; e < report.epochs_run; ++e) {
        out << e << ',';
        std::snprintf(buf, sizeof buf, "%.17g", report.objective_trace[e]);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", report.learning_rate_trace[e]);
        out << buf << ',' << (report.constrained_trace[e] ? 1 : 0) << '\n';
    }
}

}  // namespace svq
