#include "svq/oracle.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "svq/error.hpp"
#include "svq/random.hpp"

namespace svq::oracle {
namespace {

constexpr double kStochasticTol = 1e-12;

double squared_distance(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

double inner(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_distribution(const Vec& p, const std::string& what) {
    double total = 0.0;
    for (const double v : p) {
        if (!(v >= 0.0)) throw ContractError(what + " has a negative or NaN entry");
        total += v;
    }
    if (std::abs(total - 1.0) > kStochasticTol) throw ContractError(what + " does not sum to 1");
}

void check_table(const Table& t, std::size_t rows, std::size_t cols, const std::string& what) {
    if (t.size() != rows) throw ContractError(what + " has the wrong number of rows");
    for (const auto& row : t) {
        if (row.size() != cols) throw ContractError(what + " has a row of the wrong width");
        check_distribution(row, what + " row");
    }
}

void check_points(const std::vector<Vec>& pts, std::size_t dim, const std::string& what) {
    for (const auto& p : pts) {
        if (p.size() != dim) throw DimensionMismatch(what + " points differ in dimension");
    }
}

Vec random_distribution(std::size_t size, Rng& rng) {
    Vec p(size);
    for (double& v : p) v = rng.uniform(0.05, 1.0);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= total;
    return p;
}

Vec random_point(std::size_t dim, Rng& rng) {
    Vec x(dim);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    return x;
}

// Pr(y) and x'(y) = sum_r w_r Pr(y|r) point_r / Pr(y).
struct CodeMeans {
    Vec mass;
    std::vector<Vec> mean;
};

CodeMeans code_means(const std::vector<Vec>& points, const Vec& weights, const Table& encoder, std::size_t n,
                     std::size_t dim) {
    const std::size_t codes = code_count(encoder.front().size(), n);
    CodeMeans out{Vec(codes, 0.0), std::vector<Vec>(codes, Vec(dim, 0.0))};
    for (std::size_t r = 0; r < points.size(); ++r) {
        for (std::size_t y = 0; y < codes; ++y) {
            const double p = weights[r] * code_probability(encoder[r], y, n);
            out.mass[y] += p;
            for (std::size_t i = 0; i < dim; ++i) out.mean[y][i] += p * points[r][i];
        }
    }
    for (std::size_t y = 0; y < codes; ++y) {
        if (out.mass[y] > 0.0) {
            for (double& v : out.mean[y]) v /= out.mass[y];
        }
    }
    return out;
}

}  // namespace

std::size_t code_count(std::size_t m, std::size_t n) {
    if (m == 0 || n == 0) throw ContractError("code book size and code length must be positive");
    std::size_t count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (count > kMaxCodes / m) throw ContractError("code index space too large to enumerate (M^n > 4096)");
        count *= m;
    }
    return count;
}

double code_probability(const Vec& row, std::size_t code, std::size_t n) {
    const std::size_t m = row.size();
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        p *= row[code % m];
        code /= m;
    }
    return p;
}

void DiscreteFmc::validate() const {
    if (xs.empty()) throw ContractError("FMC support is empty");
    if (prior.size() != xs.size()) throw ContractError("FMC prior size does not match support");
    check_points(xs, xs.front().size(), "FMC");
    check_distribution(prior, "FMC prior");
    if (encoder.empty() || encoder.front().empty()) throw ContractError("FMC encoder is empty");
    check_table(encoder, xs.size(), encoder.front().size(), "FMC encoder");
    code_count(encoder.front().size(), n);
}

void DiscreteNoisyFmc::validate() const {
    if (x0s.empty()) throw ContractError("noisy FMC support is empty");
    if (prior.size() != x0s.size()) throw ContractError("noisy FMC prior size does not match support");
    check_points(x0s, x0s.front().size(), "noisy FMC");
    check_distribution(prior, "noisy FMC prior");
    if (channel.empty() || channel.front().empty()) throw ContractError("noisy FMC channel is empty");
    check_table(channel, x0s.size(), channel.front().size(), "noisy FMC channel");
    if (encoder.empty() || encoder.front().empty()) throw ContractError("noisy FMC encoder is empty");
    check_table(encoder, channel.front().size(), encoder.front().size(), "noisy FMC encoder");
    code_count(encoder.front().size(), n);
}

void DiscreteProductFmc::validate() const {
    if (x0s.empty() || xperps.empty()) throw ContractError("product FMC support is empty");
    const std::size_t dim = x0s.front().size();
    check_points(x0s, dim, "product FMC");
    check_points(xperps, dim, "product FMC");
    if (prior.size() != x0s.size()) throw ContractError("product FMC prior size does not match support");
    check_distribution(prior, "product FMC prior");
    check_table(conditional, x0s.size(), xperps.size(), "product FMC conditional");
    if (encoder.size() != x0s.size()) throw ContractError("product FMC encoder has the wrong number of rows");
    if (encoder.front().empty() || encoder.front().front().empty()) throw ContractError("product FMC encoder is empty");
    const std::size_t m = encoder.front().front().size();
    for (const auto& t : encoder) check_table(t, xperps.size(), m, "product FMC encoder");
    const std::size_t codes = code_count(m, n);
    if (x0_recon.size() != codes || xperp_recon.size() != codes) {
        throw ContractError("product FMC reconstruction tables need one entry per code");
    }
    check_points(x0_recon, dim, "product FMC");
    check_points(xperp_recon, dim, "product FMC");
}

std::vector<Vec> bayes_reconstructions(const DiscreteFmc& fmc) {
    fmc.validate();
    return code_means(fmc.xs, fmc.prior, fmc.encoder, fmc.n, fmc.xs.front().size()).mean;
}

double fmc_objective_full(const DiscreteFmc& fmc) {
    fmc.validate();
    const std::size_t k = fmc.xs.size();
    const std::size_t codes = code_count(fmc.encoder.front().size(), fmc.n);

    // Pr(y|x) for every (x, code), and the evidence Pr(y).
    std::vector<Vec> likelihood(k, Vec(codes));
    Vec evidence(codes, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t y = 0; y < codes; ++y) {
            likelihood[a][y] = code_probability(fmc.encoder[a], y, fmc.n);
            evidence[y] += likelihood[a][y] * fmc.prior[a];
        }
    }

    double d = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t y = 0; y < codes; ++y) {
            if (evidence[y] == 0.0) continue;
            double inner_sum = 0.0;
            for (std::size_t b = 0; b < k; ++b) {
                const double inverse = likelihood[b][y] * fmc.prior[b] / evidence[y];
                inner_sum += inverse * squared_distance(fmc.xs[a], fmc.xs[b]);
            }
            d += fmc.prior[a] * likelihood[a][y] * inner_sum;
        }
    }
    return d;
}

double fmc_objective_reduced(const DiscreteFmc& fmc) {
    const auto recon = bayes_reconstructions(fmc);
    const std::size_t codes = recon.size();
    double d = 0.0;
    for (std::size_t a = 0; a < fmc.xs.size(); ++a) {
        for (std::size_t y = 0; y < codes; ++y) {
            d += fmc.prior[a] * code_probability(fmc.encoder[a], y, fmc.n) * squared_distance(fmc.xs[a], recon[y]);
        }
    }
    return 2.0 * d;
}

std::vector<Vec> noisy_conditional_means(const DiscreteNoisyFmc& fmc) {
    fmc.validate();
    const std::size_t k0 = fmc.x0s.size();
    const std::size_t k = fmc.channel.front().size();
    const std::size_t dim = fmc.x0s.front().size();
    std::vector<Vec> means(k, Vec(dim, 0.0));
    for (std::size_t x = 0; x < k; ++x) {
        double px = 0.0;
        for (std::size_t a = 0; a < k0; ++a) px += fmc.prior[a] * fmc.channel[a][x];
        if (px == 0.0) continue;
        for (std::size_t a = 0; a < k0; ++a) {
            const double post = fmc.prior[a] * fmc.channel[a][x] / px;
            for (std::size_t i = 0; i < dim; ++i) means[x][i] += post * fmc.x0s[a][i];
        }
    }
    return means;
}

NoisyObjectives noisy_objective_pair(const DiscreteNoisyFmc& fmc) {
    fmc.validate();
    const std::size_t k0 = fmc.x0s.size();
    const std::size_t k = fmc.channel.front().size();
    const std::size_t dim = fmc.x0s.front().size();
    const std::size_t codes = code_count(fmc.encoder.front().size(), fmc.n);

    // Joint Pr(x0, y) = Pr(x0) sum_x Pr(x|x0) Pr(y|x), then x0'(y) = E[x0 | y].
    Table joint(k0, Vec(codes, 0.0));
    for (std::size_t a = 0; a < k0; ++a) {
        for (std::size_t x = 0; x < k; ++x) {
            for (std::size_t y = 0; y < codes; ++y) {
                joint[a][y] += fmc.prior[a] * fmc.channel[a][x] * code_probability(fmc.encoder[x], y, fmc.n);
            }
        }
    }
    std::vector<Vec> recon(codes, Vec(dim, 0.0));
    for (std::size_t y = 0; y < codes; ++y) {
        double mass = 0.0;
        for (std::size_t a = 0; a < k0; ++a) mass += joint[a][y];
        if (mass == 0.0) continue;
        for (std::size_t a = 0; a < k0; ++a) {
            for (std::size_t i = 0; i < dim; ++i) recon[y][i] += joint[a][y] / mass * fmc.x0s[a][i];
        }
    }

    NoisyObjectives out;
    for (std::size_t a = 0; a < k0; ++a) {
        for (std::size_t x = 0; x < k; ++x) {
            for (std::size_t y = 0; y < codes; ++y) {
                out.d_noisy += fmc.prior[a] * fmc.channel[a][x] * code_probability(fmc.encoder[x], y, fmc.n) *
                               squared_distance(fmc.x0s[a], recon[y]);
            }
        }
    }
    out.d_noisy *= 2.0;

    const auto means = noisy_conditional_means(fmc);
    double integrated = 0.0;
    double constant = 0.0;
    for (std::size_t x = 0; x < k; ++x) {
        double px = 0.0;
        for (std::size_t a = 0; a < k0; ++a) px += fmc.prior[a] * fmc.channel[a][x];
        if (px == 0.0) continue;
        for (std::size_t y = 0; y < codes; ++y) {
            integrated += px * code_probability(fmc.encoder[x], y, fmc.n) * squared_distance(means[x], recon[y]);
        }
        for (std::size_t a = 0; a < k0; ++a) {
            constant += fmc.prior[a] * fmc.channel[a][x] * squared_distance(fmc.x0s[a], means[x]);
        }
    }
    out.constant = 2.0 * constant;
    out.d_integrated_plus_const = 2.0 * integrated + out.constant;
    return out;
}

Vec nuisance_mean(const DiscreteProductFmc& fmc) {
    const std::size_t dim = fmc.xperps.front().size();
    Vec mean(dim, 0.0);
    // Under the independence assumption every conditional row is the marginal.
    for (std::size_t a = 0; a < fmc.x0s.size(); ++a) {
        for (std::size_t l = 0; l < fmc.xperps.size(); ++l) {
            for (std::size_t i = 0; i < dim; ++i) mean[i] += fmc.prior[a] * fmc.conditional[a][l] * fmc.xperps[l][i];
        }
    }
    return mean;
}

void set_optimal_reconstructions(DiscreteProductFmc& fmc) {
    const std::size_t m = fmc.encoder.front().front().size();
    const std::size_t codes = code_count(m, fmc.n);
    const std::size_t dim = fmc.x0s.front().size();
    Vec x0_weights(fmc.x0s.size());
    Table x0_encoder(fmc.x0s.size());
    for (std::size_t a = 0; a < fmc.x0s.size(); ++a) {
        x0_weights[a] = fmc.prior[a];
        x0_encoder[a] = fmc.encoder[a].front();
    }
    fmc.x0_recon = code_means(fmc.x0s, x0_weights, x0_encoder, fmc.n, dim).mean;
    fmc.xperp_recon.assign(codes, nuisance_mean(fmc));
}

InvarianceCheck invariance_reduction_check(const DiscreteProductFmc& fmc) {
    fmc.validate();
    const std::size_t k0 = fmc.x0s.size();
    const std::size_t l = fmc.xperps.size();
    const std::size_t m = fmc.encoder.front().front().size();
    const std::size_t codes = code_count(m, fmc.n);

    for (std::size_t a = 0; a < k0; ++a) {
        for (std::size_t j = 0; j < l; ++j) {
            if (std::abs(fmc.conditional[a][j] - fmc.conditional[0][j]) > kStochasticTol) {
                throw ContractError("Pr(x_perp|x0) depends on x0");
            }
            for (std::size_t y = 0; y < m; ++y) {
                if (std::abs(fmc.encoder[a][j][y] - fmc.encoder[a][0][y]) > kStochasticTol) {
                    throw ContractError("Pr(y|x0,x_perp) depends on x_perp");
                }
            }
        }
    }

    InvarianceCheck out;
    for (std::size_t a = 0; a < k0; ++a) {
        for (std::size_t j = 0; j < l; ++j) {
            const double pj = fmc.prior[a] * fmc.conditional[a][j];
            for (std::size_t y = 0; y < codes; ++y) {
                const double p = pj * code_probability(fmc.encoder[a][j], y, fmc.n);
                const double e0 = squared_distance(fmc.x0s[a], fmc.x0_recon[y]);
                const double e1 = squared_distance(fmc.xperps[j], fmc.xperp_recon[y]);
                out.d_split += p * (e0 + e1);
                Vec u(fmc.x0s[a].size()), v(u.size());
                for (std::size_t i = 0; i < u.size(); ++i) {
                    u[i] = fmc.x0s[a][i] - fmc.x0_recon[y][i];
                    v[i] = fmc.xperps[j][i] - fmc.xperp_recon[y][i];
                }
                out.cross_term += p * inner(u, v);
            }
        }
        for (std::size_t y = 0; y < codes; ++y) {
            out.d_reduced += fmc.prior[a] * code_probability(fmc.encoder[a].front(), y, fmc.n) *
                             squared_distance(fmc.x0s[a], fmc.x0_recon[y]);
        }
    }
    out.d_split *= 2.0;
    out.d_reduced *= 2.0;
    out.cross_term *= 2.0;
    out.gap = out.d_split - out.d_reduced;
    return out;
}

DiscreteFmc random_fmc(std::size_t k, std::size_t m, std::size_t n, std::size_t dim, Rng& rng) {
    DiscreteFmc f;
    for (std::size_t a = 0; a < k; ++a) f.xs.push_back(random_point(dim, rng));
    f.prior = random_distribution(k, rng);
    for (std::size_t a = 0; a < k; ++a) f.encoder.push_back(random_distribution(m, rng));
    f.n = n;
    return f;
}

DiscreteNoisyFmc random_noisy_fmc(std::size_t k0, std::size_t k, std::size_t m, std::size_t n, std::size_t dim,
                                  Rng& rng) {
    DiscreteNoisyFmc f;
    for (std::size_t a = 0; a < k0; ++a) f.x0s.push_back(random_point(dim, rng));
    f.prior = random_distribution(k0, rng);
    for (std::size_t a = 0; a < k0; ++a) f.channel.push_back(random_distribution(k, rng));
    for (std::size_t x = 0; x < k; ++x) f.encoder.push_back(random_distribution(m, rng));
    f.n = n;
    return f;
}

DiscreteProductFmc random_product_fmc(std::size_t k0, std::size_t l, std::size_t m, std::size_t n, std::size_t dim,
                                      Rng& rng) {
    DiscreteProductFmc f;
    for (std::size_t a = 0; a < k0; ++a) f.x0s.push_back(random_point(dim, rng));
    f.prior = random_distribution(k0, rng);
    for (std::size_t j = 0; j < l; ++j) f.xperps.push_back(random_point(dim, rng));
    f.conditional.assign(k0, random_distribution(l, rng));
    f.n = n;
    f.encoder_size = m;
    f.encoder.resize(k0);
    rerandomize_encoder(f, rng);
    return f;
}

void rerandomize_encoder(DiscreteProductFmc& fmc, Rng& rng) {
    const std::size_t m = fmc.encoder.empty() || fmc.encoder.front().empty() ? fmc.encoder_size
                                                                            : fmc.encoder.front().front().size();
    for (auto& rows : fmc.encoder) rows.assign(fmc.xperps.size(), random_distribution(m, rng));
    set_optimal_reconstructions(fmc);
}

}  // namespace svq::oracle
