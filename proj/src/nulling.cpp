#include "svq/nulling.hpp"

#include <cmath>

#include "svq/encoder.hpp"
#include "svq/error.hpp"
#include "svq/kernels.hpp"

namespace svq {
namespace {

using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

ConstVecMap as_vector(std::span<const double> x) {
    return ConstVecMap(x.data(), static_cast<Eigen::Index>(x.size()));
}

// Rows h_y with g_y = Pr(y|x) h_y:
//   h_y = s_y (1 - Pr(y|x)) w(y) - sum_{k != y} Pr(k|x) s_k w(k),   s_k = dQ_k/dz_k / Q_k
// 1 - Pr(y|x) is summed from the other entries so it stays accurate near 1.
Eigen::MatrixXd scaled_gradient_rows(const Codebook& cb, std::span<const double> x) {
    if (x.size() != cb.dim()) throw DimensionMismatch("input dimension does not match codebook");
    EncoderWorkspace ws(cb);
    ws.evaluate(x);
    const auto p = ws.probs();
    const auto slope = ws.log_slope();
    const std::size_t m = cb.size();
    const std::size_t d = cb.dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    std::vector<double> row(d);
    for (std::size_t y = 0; y < m; ++y) {
        double rest = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (k != y) rest += p[k];
        }
        std::fill(row.begin(), row.end(), 0.0);
        kernels::axpy(slope[y] * rest, cb.weight(y), row);
        for (std::size_t k = 0; k < m; ++k) {
            if (k != y) kernels::axpy(-p[k] * slope[k], cb.weight(k), row);
        }
        h.row(static_cast<Eigen::Index>(y)) = as_vector(row).transpose();
    }
    return h;
}

}  // namespace

std::vector<double> Projector::complement(std::span<const double> x) const {
    const auto v = as_vector(x);
    Eigen::VectorXd out = v;
    if (rank > 0) out -= basis * (basis.transpose() * v);
    return {out.data(), out.data() + out.size()};
}

Eigen::MatrixXd posterior_gradient(const Codebook& cb, std::span<const double> x) {
    Eigen::MatrixXd h = scaled_gradient_rows(cb, x);
    const auto post = posterior(cb, x);
    for (Eigen::Index y = 0; y < h.rows(); ++y) h.row(y) *= post.probs[static_cast<std::size_t>(y)];
    return h;
}

Projector span_projector(const Eigen::MatrixXd& rows, double tol) {
    if (!(tol > 0.0)) throw ContractError("rank tolerance must be > 0");
    const Eigen::Index d = rows.cols();
    Projector p;
    p.tol = tol;
    p.matrix = Eigen::MatrixXd::Zero(d, d);
    p.basis = Eigen::MatrixXd::Zero(d, 0);

    Eigen::MatrixXd unit(rows.rows(), d);
    Eigen::Index kept = 0;
    for (Eigen::Index y = 0; y < rows.rows(); ++y) {
        const double n = rows.row(y).stableNorm();
        if (n > 0.0 && std::isfinite(n)) unit.row(kept++) = rows.row(y) / n;
    }
    if (kept == 0) {
        p.degenerate = true;
        return p;
    }
    unit.conservativeResize(kept, d);

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(unit, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > tol * sv(0)) ++r;
    p.rank = static_cast<std::size_t>(r);
    p.basis = svd.matrixV().leftCols(r);
    p.matrix = p.basis * p.basis.transpose();
    return p;
}

Projector jammer_projector(const Codebook& cb, std::span<const double> x, double tol) {
    return span_projector(scaled_gradient_rows(cb, x), tol);
}

std::vector<double> null(const Codebook& cb, std::span<const double> x, double tol) {
    return jammer_projector(cb, x, tol).complement(x);
}

double depth_db(double ratio) {
    if (ratio < kDepthRatioFloor) return kDepthFloorDb;
    return 10.0 * std::log10(ratio);
}

double energy_ratio(std::span<const double> original, std::span<const double> nulled) {
    const double e0 = kernels::dot(original, original);
    if (!(e0 > 0.0)) throw ContractError("nulling depth is undefined for a zero input vector");
    return kernels::dot(nulled, nulled) / e0;
}

double nulling_depth(const Codebook& cb, std::span<const double> x, double tol) {
    const auto nulled = null(cb, x, tol);
    return depth_db(energy_ratio(x, nulled));
}

NullingReport null_report(const Codebook& cb, std::span<const double> x, double location, double tol) {
    const Projector p = jammer_projector(cb, x, tol);
    NullingReport r;
    r.location = location;
    r.original.assign(x.begin(), x.end());
    r.nulled = p.complement(x);
    r.raw_ratio = energy_ratio(r.original, r.nulled);
    r.depth_db = depth_db(r.raw_ratio);
    r.rank = p.rank;
    return r;
}

double posterior_sensitivity(const Codebook& cb, std::span<const double> x, std::span<const double> direction) {
    if (direction.size() != cb.dim()) throw DimensionMismatch("direction dimension does not match codebook");
    const auto u = as_vector(direction);
    const double n = u.norm();
    if (!(n > 0.0)) throw ContractError("sensitivity direction must be nonzero");
    return (posterior_gradient(cb, x) * u).norm() / n;
}

}  // namespace svq
