#include <doctest.h>

#include <cmath>

#include "svq/error.hpp"
#include "svq/oracle.hpp"
#include "svq/random.hpp"

using namespace svq;
using namespace svq::oracle;

namespace {

DiscreteFmc antipodal(const Vec& v, const Table& encoder, std::size_t n = 1) {
    Vec minus(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) minus[i] = -v[i];
    return DiscreteFmc{{v, minus}, {0.5, 0.5}, encoder, n};
}

}  // namespace

TEST_CASE("code enumeration") {
    CHECK(code_count(2, 12) == 4096);
    CHECK(code_count(3, 1) == 3);
    CHECK_THROWS_AS(code_count(2, 13), ContractError);
    CHECK_THROWS_AS(code_count(0, 1), ContractError);
    const Vec row{0.2, 0.8};
    CHECK(code_probability(row, 0, 2) == doctest::Approx(0.04));
    CHECK(code_probability(row, 1, 2) == doctest::Approx(0.16));
    CHECK(code_probability(row, 2, 2) == doctest::Approx(0.16));
    CHECK(code_probability(row, 3, 2) == doctest::Approx(0.64));
}

TEST_CASE("uninformative encoder reconstructs the mean") {
    // x = +/- v, every code equally likely from either point: x'(y) = 0 and
    // D = 2 |v|^2 in both forms.
    const Vec v{1.0, -2.0, 0.5};
    const double expected = 2.0 * (1.0 + 4.0 + 0.25);
    for (const std::size_t n : {1u, 2u, 3u}) {
        const auto fmc = antipodal(v, {{0.5, 0.5}, {0.5, 0.5}}, n);
        CHECK(fmc_objective_full(fmc) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(fmc_objective_reduced(fmc) == doctest::Approx(expected).epsilon(1e-14));
        for (const auto& r : bayes_reconstructions(fmc)) {
            for (const double c : r) CHECK(std::abs(c) < 1e-15);
        }
    }
}

TEST_CASE("deterministic encoder has zero distortion") {
    const auto fmc = antipodal({3.0, 4.0}, {{1.0, 0.0}, {0.0, 1.0}});
    CHECK(fmc_objective_full(fmc) == 0.0);
    CHECK(fmc_objective_reduced(fmc) == 0.0);
    const auto r = bayes_reconstructions(fmc);
    CHECK(r[0] == Vec{3.0, 4.0});
    CHECK(r[1] == Vec{-3.0, -4.0});
}

TEST_CASE("partially informative encoder") {
    // Pr(y=0|+v) = p, Pr(y=0|-v) = 1-p, uniform prior: x'(0) = (2p-1) v and
    // the reduced form gives 2 |v|^2 (1 - (2p-1)^2).
    const double p = 0.8;
    const Vec v{1.0, 1.0};
    const auto fmc = antipodal(v, {{p, 1.0 - p}, {1.0 - p, p}});
    const double c = 2.0 * p - 1.0;
    const double expected = 2.0 * 2.0 * (1.0 - c * c);
    CHECK(fmc_objective_reduced(fmc) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(fmc_objective_full(fmc) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(bayes_reconstructions(fmc)[0][0] == doctest::Approx(c));
}

TEST_CASE("full and reduced objectives agree on random instances") {
    Rng rng(3);
    for (int t = 0; t < 40; ++t) {
        const auto fmc = random_fmc(1 + rng.below(8), 1 + rng.below(4), 1 + rng.below(3), 1 + rng.below(3), rng);
        const double full = fmc_objective_full(fmc);
        CHECK(std::abs(full - fmc_objective_reduced(fmc)) <= 1e-12 * std::max(1.0, std::abs(full)));
    }
}

TEST_CASE("noisy objective: the distortion integrates out") {
    Rng rng(5);
    for (int t = 0; t < 40; ++t) {
        const auto fmc = random_noisy_fmc(1 + rng.below(4), 1 + rng.below(8), 1 + rng.below(4), 1 + rng.below(3),
                                          1 + rng.below(3), rng);
        const auto r = noisy_objective_pair(fmc);
        CHECK(r.constant >= 0.0);
        CHECK(std::abs(r.d_noisy - r.d_integrated_plus_const) <= 1e-12 * std::max(1.0, std::abs(r.d_noisy)));
    }
}

TEST_CASE("noisy objective with a single undistorted point") {
    Rng rng(9);
    auto fmc = random_noisy_fmc(1, 5, 3, 2, 2, rng);
    const auto r = noisy_objective_pair(fmc);
    CHECK(std::abs(r.d_noisy) < 1e-14);
    for (const auto& m : noisy_conditional_means(fmc)) {
        for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] == doctest::Approx(fmc.x0s[0][i]));
    }
}

TEST_CASE("nuisance reduction: gap is independent of the encoder") {
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
        auto fmc = random_product_fmc(1 + rng.below(4), 1 + rng.below(4), 1 + rng.below(4), 1 + rng.below(2),
                                      1 + rng.below(3), rng);
        const auto first = invariance_reduction_check(fmc);
        CHECK(std::abs(first.cross_term) < 1e-12);
        for (int e = 0; e < 5; ++e) {
            rerandomize_encoder(fmc, rng);
            const auto again = invariance_reduction_check(fmc);
            CHECK(std::abs(again.gap - first.gap) <= 1e-10 * std::max(1.0, std::abs(first.gap)));
            CHECK(std::abs(again.cross_term) < 1e-12);
        }
    }
}

TEST_CASE("nuisance reconstruction off its mean raises the objective") {
    Rng rng(17);
    auto fmc = random_product_fmc(3, 3, 2, 1, 2, rng);
    const double base = invariance_reduction_check(fmc).d_split;
    fmc.xperp_recon[0][0] += 0.3;
    CHECK(invariance_reduction_check(fmc).d_split > base);
}

TEST_CASE("nuisance reduction guards its assumptions") {
    Rng rng(19);
    auto fmc = random_product_fmc(2, 2, 2, 1, 2, rng);
    auto encoder_depends = fmc;
    encoder_depends.encoder[0][1] = {0.9, 0.1};
    encoder_depends.encoder[0][0] = {0.1, 0.9};
    CHECK_THROWS_AS(invariance_reduction_check(encoder_depends), ContractError);

    auto conditional_depends = fmc;
    conditional_depends.conditional = {{0.9, 0.1}, {0.1, 0.9}};
    CHECK_THROWS_AS(invariance_reduction_check(conditional_depends), ContractError);
}

TEST_CASE("malformed instances are rejected") {
    auto fmc = antipodal({1.0}, {{0.5, 0.5}, {0.5, 0.5}});
    fmc.prior = {0.5, 0.6};
    CHECK_THROWS_AS(fmc_objective_full(fmc), ContractError);
    fmc.prior = {0.5, 0.5};
    fmc.encoder[1] = {0.5};
    CHECK_THROWS_AS(fmc_objective_reduced(fmc), ContractError);
    fmc.encoder[1] = {-0.5, 1.5};
    CHECK_THROWS_AS(fmc_objective_reduced(fmc), ContractError);
    fmc = antipodal({1.0}, {{0.5, 0.5}, {0.5, 0.5}});
    fmc.xs[1] = {1.0, 2.0};
    CHECK_THROWS_AS(fmc_objective_full(fmc), DimensionMismatch);
}
