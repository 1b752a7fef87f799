#pragma once

// Jammer nulling with a trained encoder.
//
// The posterior gradients grad_x Pr(y|x), y = 0..M-1, span the local jammer
// subspace at x. J(x) is the orthogonal projector onto that span and the
// nulled vector is (I - J(x)) x.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "svq/codebook.hpp"

namespace svq {

inline constexpr double kDefaultRankTolerance = 1e-6;
// Energy ratios below this are reported as kDepthFloorDb.
inline constexpr double kDepthRatioFloor = 1e-20;
inline constexpr double kDepthFloorDb = -200.0;

struct Projector {
    Eigen::MatrixXd matrix;  // d x d, symmetric, idempotent
    Eigen::MatrixXd basis;   // d x rank, orthonormal columns
    std::size_t rank = 0;
    double tol = kDefaultRankTolerance;
    bool degenerate = false;  // every gradient was exactly zero; J = 0

    // (I - J) x without forming the d x d product.
    std::vector<double> complement(std::span<const double> x) const;
};

struct NullingReport {
    double location = 0.0;
    double depth_db = 0.0;
    double raw_ratio = 0.0;
    std::size_t rank = 0;
    std::vector<double> original;
    std::vector<double> nulled;
};

// Rows g_y = grad_x Pr(y|x), M x d.
Eigen::MatrixXd posterior_gradient(const Codebook& cb, std::span<const double> x);

// Orthogonal projector onto span{g_y}. The span does not depend on the row
// magnitudes, and near saturated sigmoids the magnitudes differ by many orders,
// so each nonzero row is scaled to unit length before the SVD. Directions with
// singular value <= tol * largest are dropped.
Projector jammer_projector(const Codebook& cb, std::span<const double> x, double tol = kDefaultRankTolerance);

// Projector onto the row space of an arbitrary stack of vectors (rows),
// with the same normalisation and rank rule.
Projector span_projector(const Eigen::MatrixXd& rows, double tol = kDefaultRankTolerance);

std::vector<double> null(const Codebook& cb, std::span<const double> x, double tol = kDefaultRankTolerance);

// |nulled|^2 / |original|^2 in dB, floored at kDepthFloorDb.
double depth_db(double ratio);
double energy_ratio(std::span<const double> original, std::span<const double> nulled);

// 10 log10(|null(x)|^2 / |x|^2). Throws ContractError for x == 0.
double nulling_depth(const Codebook& cb, std::span<const double> x, double tol = kDefaultRankTolerance);

NullingReport null_report(const Codebook& cb, std::span<const double> x, double location,
                          double tol = kDefaultRankTolerance);

// |G u| / |u|: how strongly the posterior responds to a move along u at x.
double posterior_sensitivity(const Codebook& cb, std::span<const double> x, std::span<const double> direction);

}  // namespace svq
