#include <doctest.h>

#include <cmath>
#include <numbers>

#include "svq/error.hpp"
#include "svq/random.hpp"
#include "svq/scenario.hpp"

using namespace svq;

TEST_CASE("sinc values") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(std::abs(sinc(std::numbers::pi)) < 1e-15);
    CHECK(sinc(-6.0) == doctest::Approx(std::sin(-6.0) / -6.0).epsilon(1e-15));
    CHECK(sinc(-6.0) == doctest::Approx(-0.0465692497).epsilon(1e-9));
    CHECK(sinc(1e-300) == 1.0);
}

TEST_CASE("render places responses at 1-based indices") {
    const ScenarioConfig cfg;
    const auto x = render(cfg, 1.0, 0.0, 38.0);
    REQUIRE(x.size() == 100);
    CHECK(x[49] == 1.0);
    CHECK(x[37] == doctest::Approx(std::sin(-6.0) / -6.0));

    const auto j = pure_jammer(cfg, 38.0, 1.0);
    CHECK(j[37] == 1.0);
    CHECK(j[49] == doctest::Approx(-0.0465692497).epsilon(1e-9));

    const auto s = signal_only(cfg, 0.5);
    CHECK(s[49] == 0.5);
}

TEST_CASE("pure jammer matches render with zero signal and no noise") {
    const ScenarioConfig cfg;
    for (const double loc : {34.0, 37.3, 42.0}) {
        CHECK(pure_jammer(cfg, loc, -0.7) == render(cfg, 0.0, -0.7, loc));
    }
}

TEST_CASE("jammer power over the aperture") {
    const ScenarioConfig cfg;
    double expected = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double u = (i - 38) / 2.0;
        const double s = i == 38 ? 1.0 : std::sin(u) / u;
        expected += s * s;
    }
    double power = 0.0;
    for (const double v : pure_jammer(cfg, 38.0, 1.0)) power += v * v;
    CHECK(power == doctest::Approx(expected).epsilon(1e-13));
    CHECK(power == doctest::Approx(6.1984068137203785).epsilon(1e-12));
}

TEST_CASE("resolution cell separates signal from jammer") {
    const ScenarioConfig cfg;
    CHECK((cfg.signal_location - cfg.jammer_center) / resolution_cell(cfg) == doctest::Approx(1.9099).epsilon(1e-4));
}

TEST_CASE("samples respect their bounds") {
    ScenarioConfig cfg;
    cfg.delta = 4.0;
    for (std::uint64_t k = 0; k < 2000; ++k) {
        const auto s = sample_at(cfg, k);
        CHECK(std::abs(s.signal_amplitude) <= cfg.signal_bound);
        CHECK(std::abs(s.jammer_amplitude) <= cfg.jammer_bound);
        CHECK(s.jammer_location >= 34.0);
        CHECK(s.jammer_location <= 42.0);
        const auto clean = render(cfg, s.signal_amplitude, s.jammer_amplitude, s.jammer_location);
        double worst = 0.0;
        for (std::size_t i = 0; i < clean.size(); ++i) worst = std::max(worst, std::abs(s.x[i] - clean[i]));
        CHECK(worst <= cfg.noise_bound + 1e-15);
    }
}

TEST_CASE("latent distributions") {
    ScenarioConfig cfg;
    cfg.delta = 2.0;
    constexpr int n = 100000;
    constexpr int bins = 10;
    std::vector<int> hist(bins, 0);
    double mean = 0.0;
    Rng rng(7);
    for (int k = 0; k < n; ++k) {
        const auto s = sample(cfg, rng);
        mean += s.jammer_amplitude;
        const int b = std::min(bins - 1, static_cast<int>((s.jammer_location - 36.0) / 4.0 * bins));
        ++hist[b];
    }
    mean /= n;
    // Standard error of U[-1,1] mean: 1/sqrt(3n) ~ 0.0018.
    CHECK(std::abs(mean) < 0.01);
    double chi2 = 0.0;
    const double expected = static_cast<double>(n) / bins;
    for (const int h : hist) chi2 += (h - expected) * (h - expected) / expected;
    // 9 degrees of freedom, p = 0.001.
    CHECK(chi2 < 27.877);
}

TEST_CASE("dataset draws are indexed and reproducible") {
    ScenarioConfig cfg;
    cfg.delta = 2.0;
    cfg.seed = 11;
    const auto a = generate_samples(cfg, 5);
    const auto b = generate_samples(cfg, 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(a[k].x == b[k].x);
        CHECK(a[k].x == sample_at(cfg, k).x);
    }
    CHECK(a[0].x != a[1].x);
    cfg.seed = 12;
    CHECK(sample_at(cfg, 0).x != a[0].x);

    const auto data = generate_dataset(cfg, 3);
    CHECK(data.size() == 3);
    CHECK(data.dim() == 100);
}

TEST_CASE("scenario contract violations") {
    ScenarioConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.sigma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
    cfg = ScenarioConfig{};
    cfg.delta = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
    cfg = ScenarioConfig{};
    cfg.noise_bound = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
    cfg = ScenarioConfig{};
    CHECK_THROWS_AS(generate_dataset(cfg, 0), ContractError);
    const std::vector<double> short_noise(3, 0.0);
    CHECK_THROWS_AS(render(cfg, 0.0, 1.0, 38.0, short_noise), DimensionMismatch);
}
