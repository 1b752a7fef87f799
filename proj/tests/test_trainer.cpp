#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "support.hpp"
#include "svq/encoder.hpp"
#include "svq/error.hpp"
#include "svq/kernels.hpp"
#include "svq/random.hpp"
#include "svq/trainer.hpp"

using namespace svq;

namespace {

// Two clusters along +/- e_0 with small isotropic spread.
Dataset clusters(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    Dataset data(d);
    for (std::size_t i = 0; i < n; ++i) {
        auto x = testing::normals(rng, d, 0.1);
        x[0] += (i % 2 == 0) ? 1.0 : -1.0;
        data.push_back(x);
    }
    return data;
}

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.lift_after = 40;
    cfg.batch_size = 16;
    cfg.w0 = 3.0;
    cfg.theta = 0.5;
    cfg.learning_rate = 0.05;
    return cfg;
}

}  // namespace

TEST_CASE("traces cover every epoch") {
    const auto data = clusters(64, 4, 1);
    const auto cfg = small_config();
    Rng rng(2);
    const auto r = train(data, 2, cfg, rng);
    CHECK(r.report.epochs_run == 60);
    CHECK(r.report.objective_trace.size() == 60);
    CHECK(r.report.learning_rate_trace.size() == 60);
    REQUIRE(r.report.constrained_trace.size() == 60);
    CHECK(r.report.constrained_trace[39]);
    CHECK_FALSE(r.report.constrained_trace[40]);
    CHECK(r.report.constraint_lift_epoch == 40);
    CHECK(r.report.final_objective == r.report.objective_trace.back());
    CHECK(r.report.learning_rate_trace[1] == doctest::Approx(0.05 * 0.999));
}

TEST_CASE("training reduces the objective") {
    const auto data = clusters(128, 4, 3);
    auto cfg = small_config();
    Rng init_rng(4);
    const double before = objective(init_codebook(4, 2, cfg, init_rng), data);
    Rng rng(4);
    const auto r = train(data, 2, cfg, rng);
    CHECK(r.report.final_objective < before);
    CHECK(std::isfinite(r.report.final_objective));
}

TEST_CASE("training is deterministic") {
    const auto data = clusters(64, 4, 5);
    const auto cfg = small_config();
    Rng a(6);
    Rng b(6);
    const auto ra = train(data, 3, cfg, a);
    const auto rb = train(data, 3, cfg, b);
    CHECK(ra.codebook == rb.codebook);
    CHECK(ra.report.objective_trace == rb.report.objective_trace);
    Rng c(7);
    CHECK_FALSE(train(data, 3, cfg, c).codebook == ra.codebook);
}

TEST_CASE("constraints hold until lifted") {
    const auto data = clusters(64, 4, 8);
    auto cfg = small_config();
    cfg.lift_after = cfg.epochs;
    Rng rng(9);
    const auto r = train(data, 3, cfg, rng);
    for (std::size_t y = 0; y < 3; ++y) {
        CHECK(r.codebook.weight_norm(y) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(r.codebook.bias(y) == doctest::Approx(-0.5 * r.codebook.weight_norm(y)).epsilon(1e-12));
        // Parallel: reconstruction is the scaled unit weight.
        const auto w = r.codebook.weight(y);
        const auto x = r.codebook.recon(y);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(x[i] == doctest::Approx(r.codebook.recon_scale(y) * w[i] / 3.0).epsilon(1e-12));
        }
    }
    CHECK(r.codebook.parallel());
}

TEST_CASE("lifting releases norm and parallel constraints but keeps the threshold tie") {
    const auto data = clusters(64, 4, 10);
    auto cfg = small_config();
    cfg.epochs = 80;
    cfg.lift_after = 20;
    cfg.learning_rate = 0.2;
    Rng rng(11);
    const auto r = train(data, 2, cfg, rng);
    CHECK_FALSE(r.codebook.parallel());
    bool moved = false;
    for (std::size_t y = 0; y < 2; ++y) {
        moved = moved || std::abs(r.codebook.weight_norm(y) - 3.0) > 1e-9;
        CHECK(r.codebook.bias(y) == doctest::Approx(-0.5 * r.codebook.weight_norm(y)).epsilon(1e-12));
    }
    CHECK(moved);
}

TEST_CASE("full-batch steps never increase the objective") {
    const auto data = clusters(40, 3, 12);
    auto cfg = small_config();
    cfg.batch_size = 0;
    cfg.learning_rate = 2.0;
    cfg.lift_after = 0;
    Rng rng(13);
    const auto r = train(data, 2, cfg, rng);
    for (std::size_t e = 1; e < r.report.objective_trace.size(); ++e) {
        CHECK(r.report.objective_trace[e] <= r.report.objective_trace[e - 1]);
    }
}

TEST_CASE("zero learning rate leaves the codebook in place") {
    const auto data = clusters(32, 3, 14);
    auto cfg = small_config();
    cfg.learning_rate = 0.0;
    cfg.lift_after = cfg.epochs;
    Rng init_rng(15);
    const auto start = init_codebook(3, 2, cfg, init_rng);
    Rng rng(16);
    const auto r = train_from(start, data, cfg, rng);
    for (const double d : r.report.objective_trace) CHECK(d == doctest::Approx(r.report.objective_trace.front()).epsilon(1e-13));
    // Re-projecting onto the norm sphere may move the last bit.
    for (std::size_t y = 0; y < 2; ++y) {
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(r.codebook.weight(y)[i] == doctest::Approx(start.weight(y)[i]).epsilon(1e-14));
            CHECK(r.codebook.recon(y)[i] == doctest::Approx(start.recon(y)[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("data initialisation uses training points") {
    const auto data = clusters(32, 4, 17);
    auto cfg = small_config();
    cfg.init = WeightInit::data;
    Rng rng(18);
    const auto cb = init_codebook(4, 2, cfg, rng, &data);
    for (std::size_t y = 0; y < 2; ++y) {
        CHECK(cb.weight_norm(y) == doctest::Approx(3.0));
        CHECK(std::abs(cb.weight(y)[0]) / 3.0 > 0.8);
    }
    Rng rng2(18);
    CHECK_THROWS_AS(init_codebook(4, 2, cfg, rng2), ContractError);
}

TEST_CASE("seeded initialisations spread over the data") {
    // Clusters at +/- e_0 and +/- e_1; the e_1 clusters carry little energy.
    Rng data_rng(23);
    Dataset data(3);
    for (int i = 0; i < 400; ++i) {
        auto x = testing::normals(data_rng, 3, 0.02);
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        x[(i / 2) % 2] += sign * ((i / 2) % 2 == 0 ? 2.0 : 1.0);
        data.push_back(x);
    }
    auto cfg = small_config();
    cfg.init = WeightInit::pairs;
    Rng rng(24);
    const auto cb = init_codebook(3, 4, cfg, rng, &data);
    for (std::size_t y = 0; y < 4; y += 2) {
        for (std::size_t i = 0; i < 3; ++i) CHECK(cb.weight(y + 1)[i] == -cb.weight(y)[i]);
    }
    // The two picks land on different axes.
    const double overlap = std::abs(kernels::dot(cb.weight(0), cb.weight(2))) / 9.0;
    CHECK(overlap < 0.1);

    cfg.init = WeightInit::spread;
    Rng rng2(25);
    const auto sp = init_codebook(3, 2, cfg, rng2, &data);
    CHECK(sp.weight_norm(0) == doctest::Approx(3.0));
    CHECK(kernels::dot(sp.weight(0), sp.weight(1)) / 9.0 < 0.1);
    Rng rng3(25);
    CHECK_THROWS_AS(init_codebook(3, 2, cfg, rng3), ContractError);
}

TEST_CASE("invalid training settings") {
    const auto data = clusters(16, 3, 19);
    Rng rng(20);
    auto bad = [&](auto mutate) {
        auto cfg = small_config();
        mutate(cfg);
        CHECK_THROWS_AS(cfg.validate(), ContractError);
    };
    bad([](TrainConfig& c) { c.epochs = 0; });
    bad([](TrainConfig& c) { c.learning_rate = -1.0; });
    bad([](TrainConfig& c) { c.lr_decay = 0.0; });
    bad([](TrainConfig& c) { c.lr_decay = 1.5; });
    bad([](TrainConfig& c) { c.w0 = 0.0; });
    bad([](TrainConfig& c) { c.lift_after = c.epochs + 1; });
    bad([](TrainConfig& c) { c.init_scale = 0.0; });

    CHECK_THROWS_AS(train(Dataset(3), 2, small_config(), rng), ContractError);
    Codebook wrong(2, 5);
    CHECK_THROWS_AS(train_from(wrong, data, small_config(), rng), DimensionMismatch);
}

TEST_CASE("trace csv") {
    const auto data = clusters(16, 3, 21);
    auto cfg = small_config();
    cfg.epochs = 5;
    cfg.lift_after = 2;
    Rng rng(22);
    const auto r = train(data, 2, cfg, rng);
    std::ostringstream out;
    write_trace_csv(out, r.report);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "epoch,objective,learning_rate,constraints_active");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5);
}
