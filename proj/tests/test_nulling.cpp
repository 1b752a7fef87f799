#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "svq/encoder.hpp"
#include "svq/error.hpp"
#include "svq/nulling.hpp"

using namespace svq;

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("posterior gradient rows sum to zero") {
    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        const Codebook cb = testing::random_codebook(rng, 1 + rng.below(6), 1 + rng.below(8), (t & 1) != 0);
        const auto x = testing::normals(rng, cb.dim(), 2.0);
        const Eigen::MatrixXd g = posterior_gradient(cb, x);
        const double scale = std::max(g.rowwise().norm().maxCoeff(), 1e-300);
        CHECK(g.colwise().sum().norm() <= 1e-12 * std::max(scale, 1.0));
    }
}

TEST_CASE("single index has a zero posterior gradient and a degenerate projector") {
    Rng rng(1);
    const Codebook cb = testing::random_codebook(rng, 1, 3);
    const std::vector<double> x{1, 2, 3};
    CHECK(posterior_gradient(cb, x).norm() == 0.0);
    const Projector p = jammer_projector(cb, x);
    CHECK(p.degenerate);
    CHECK(p.rank == 0);
    CHECK(p.matrix.norm() == 0.0);
    CHECK(nulling_depth(cb, x) == 0.0);
}

TEST_CASE("posterior gradient matches central differences") {
    Rng rng(77);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Codebook cb = testing::random_codebook(rng, 2 + rng.below(4), 1 + rng.below(6), (t & 1) != 0);
        auto x = testing::normals(rng, cb.dim());
        const Eigen::MatrixXd g = posterior_gradient(cb, x);
        std::vector<double> analytic, numeric;
        for (std::size_t i = 0; i < cb.dim(); ++i) {
            const double h = 1e-6;
            const double keep = x[i];
            x[i] = keep + h;
            const auto up = posterior(cb, x).probs;
            x[i] = keep - h;
            const auto down = posterior(cb, x).probs;
            x[i] = keep;
            for (std::size_t y = 0; y < cb.size(); ++y) {
                numeric.push_back((up[y] - down[y]) / (2 * h));
                analytic.push_back(g(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(i)));
            }
        }
        worst = std::max(worst, testing::relative_error(analytic, numeric));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("span projector on simple stacks") {
    Eigen::MatrixXd one(1, 2);
    one << 1, 0;
    const Projector p = span_projector(one);
    CHECK(p.rank == 1);
    CHECK((p.matrix - Eigen::Matrix2d{{1, 0}, {0, 0}}).norm() < 1e-15);

    // x = (1, 1) with J = diag(1, 0): nulled (0, 1), depth 10 log10(1/2).
    const std::vector<double> x{1, 1};
    const auto nulled = p.complement(x);
    CHECK(std::abs(nulled[0]) < 1e-15);
    CHECK(nulled[1] == doctest::Approx(1.0));
    CHECK(depth_db(energy_ratio(x, nulled)) == doctest::Approx(-3.0102999566398121).epsilon(1e-12));

    Eigen::MatrixXd full(3, 3);
    full << 1, 2, 0, 0, 1, 1, 3, 0, 1;
    const Projector f = span_projector(full);
    CHECK(f.rank == 3);
    CHECK((f.matrix - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    const std::vector<double> x3{1, 2, 3};
    CHECK(depth_db(energy_ratio(x3, f.complement(x3))) == kDepthFloorDb);

    // Wildly different row magnitudes span the same space.
    Eigen::MatrixXd skewed(2, 3);
    skewed << 1e-200, 0, 0, 0, 5e150, 0;
    CHECK(span_projector(skewed).rank == 2);

    CHECK(span_projector(Eigen::MatrixXd::Zero(2, 3)).degenerate);
    CHECK_THROWS_AS(span_projector(one, 0.0), ContractError);
}

TEST_CASE("span projector reproduces every retained direction") {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        const auto rows = 1 + static_cast<Eigen::Index>(rng.below(4));
        const auto d = rows + static_cast<Eigen::Index>(rng.below(5));
        Eigen::MatrixXd g(rows, d);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) g(r, c) = rng.normal();
        }
        const Projector p = span_projector(g);
        CHECK(p.rank == static_cast<std::size_t>(rows));
        for (Eigen::Index r = 0; r < rows; ++r) {
            const Eigen::VectorXd v = g.row(r).transpose();
            CHECK((p.matrix * v - v).norm() <= 1e-8 * v.norm());
        }
    }
}

TEST_CASE("vectors in or orthogonal to the gradient span") {
    Codebook cb(2, 3);
    cb.set_weight(0, std::vector<double>{1, 0, 0});
    cb.set_weight(1, std::vector<double>{0, 1, 0});
    // Equal activations make the single gradient direction w(0) - w(1).
    const std::vector<double> x{0.3, 0.3, 0.0};
    const Projector p = jammer_projector(cb, x);
    CHECK(p.rank == 1);
    const std::vector<double> inside{1, -1, 0};
    const std::vector<double> outside{1, 1, 5};
    const auto a = p.complement(inside);
    const auto b = p.complement(outside);
    CHECK(testing::norm(a) < 1e-12);
    CHECK(testing::relative_error(b, outside) < 1e-12);
    CHECK_THROWS_AS(nulling_depth(cb, std::vector<double>{0, 0, 0}), ContractError);
}

TEST_CASE("projector laws on random codebooks") {
    Rng rng(1234);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t m = 1 + rng.below(6);
        const std::size_t d = 1 + rng.below(12);
        const Codebook cb = testing::random_codebook(rng, m, d, (t & 1) != 0);
        const auto x = testing::normals(rng, d, 2.0);
        const Projector p = jammer_projector(cb, x);
        const Eigen::MatrixXd& j = p.matrix;
        CHECK(p.rank <= m - 1);
        CHECK((j - j.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((j * j - j).cwiseAbs().maxCoeff() <= 1e-8);

        const Eigen::VectorXd v = to_eigen(x);
        const Eigen::VectorXd jv = j * v;
        const Eigen::VectorXd cv = to_eigen(p.complement(x));
        CHECK(jv.norm() <= v.norm() * (1 + 1e-12));
        CHECK(std::abs(jv.squaredNorm() + cv.squaredNorm() - v.squaredNorm()) <= 1e-8 * v.squaredNorm());
        CHECK(nulling_depth(cb, x) <= 1e-12);

        const Eigen::MatrixXd g = posterior_gradient(cb, x);
        for (Eigen::Index y = 0; y < g.rows(); ++y) {
            const Eigen::VectorXd gy = g.row(y).transpose();
            CHECK((gy - j * gy).norm() <= 1e-6 * gy.norm());
        }
    }
}

TEST_CASE("depth floor and report fields") {
    CHECK(depth_db(0.0) == kDepthFloorDb);
    CHECK(depth_db(1e-21) == kDepthFloorDb);
    CHECK(depth_db(1.0) == 0.0);
    CHECK(depth_db(0.1) == doctest::Approx(-10.0));

    Rng rng(6);
    const Codebook cb = testing::random_codebook(rng, 3, 4);
    const auto x = testing::normals(rng, 4);
    const NullingReport r = null_report(cb, x, 38.0);
    CHECK(r.location == 38.0);
    CHECK(r.original == x);
    CHECK(r.nulled == null(cb, x));
    CHECK(r.depth_db == 10.0 * std::log10(r.raw_ratio));
    CHECK(r.raw_ratio == energy_ratio(x, r.nulled));
}

TEST_CASE("posterior sensitivity is the gradient response to a unit move") {
    Rng rng(9);
    const Codebook cb = testing::random_codebook(rng, 3, 4);
    const auto x = testing::normals(rng, 4);
    const std::vector<double> u{0, 2, 0, 0};
    const Eigen::MatrixXd g = posterior_gradient(cb, x);
    CHECK(posterior_sensitivity(cb, x, u) == doctest::Approx(g.col(1).norm()).epsilon(1e-14));
    CHECK_THROWS_AS(posterior_sensitivity(cb, x, std::vector<double>(4, 0.0)), ContractError);
}
