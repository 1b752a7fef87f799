#pragma once

// Exact-enumeration checks of the folded-Markov-chain identities on small
// discrete distributions. Every quantity is a finite sum, so the identities
// can be verified to rounding error.
//
// A code is a vector of n indices, each drawn independently from the scalar
// encoder table, so Pr(y|x) = prod_i Pr(y_i|x). Codes are enumerated as
// mixed-radix integers 0 .. M^n - 1.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace svq {

class Rng;

namespace oracle {

using Vec = std::vector<double>;
using Table = std::vector<std::vector<double>>;  // row-stochastic

inline constexpr std::size_t kMaxCodes = 4096;

// x -> y -> x' with an explicit prior on a finite support.
struct DiscreteFmc {
    std::vector<Vec> xs;  // K support points
    Vec prior;            // Pr(x), K entries
    Table encoder;        // K x M, Pr(y|x) for scalar y
    std::size_t n = 1;    // indices per code

    void validate() const;
};

// x0 -> x -> y -> x0' with a distortion channel.
struct DiscreteNoisyFmc {
    std::vector<Vec> x0s;  // undistorted support
    Vec prior;             // Pr(x0)
    Table channel;         // K0 x K, Pr(x|x0) over the distorted support
    Table encoder;         // K x M, Pr(y|x)
    std::size_t n = 1;

    void validate() const;
};

// (x0, x_perp) -> y -> (x0', x_perp'), both parts living in one ambient space
// (the parts need not be orthogonal).
struct DiscreteProductFmc {
    std::vector<Vec> x0s;      // K0
    Vec prior;                 // Pr(x0)
    std::vector<Vec> xperps;   // L
    Table conditional;         // K0 x L, Pr(x_perp|x0)
    std::vector<Table> encoder;  // [K0][L] -> M, Pr(y|x0, x_perp)
    std::size_t n = 1;
    std::size_t encoder_size = 0;  // M, used when the encoder table is still empty
    std::vector<Vec> x0_recon;     // per code (M^n entries)
    std::vector<Vec> xperp_recon;  // per code

    void validate() const;
};

std::size_t code_count(std::size_t m, std::size_t n);

// Pr(code|row) = prod_i table_row[y_i].
double code_probability(const Vec& row, std::size_t code, std::size_t n);

// Full triple sum over (x, y, x') with the Bayes inverse Pr(x'|y).
double fmc_objective_full(const DiscreteFmc& fmc);

// 2 sum_x Pr(x) sum_y Pr(y|x) |x - x'(y)|^2 with x'(y) = sum_x Pr(x|y) x.
double fmc_objective_reduced(const DiscreteFmc& fmc);

// x'(y) = sum_x Pr(x|y) x per code; zero vector for codes of zero probability.
std::vector<Vec> bayes_reconstructions(const DiscreteFmc& fmc);

struct NoisyObjectives {
    double d_noisy = 0.0;               // direct form, x0'(y) at its conditional mean
    double d_integrated_plus_const = 0.0;  // x0 integrated out via Bayes, plus the constant
    double constant = 0.0;
};

NoisyObjectives noisy_objective_pair(const DiscreteNoisyFmc& fmc);

// x0(x) = sum_x0 Pr(x0|x) x0 for every distorted support point.
std::vector<Vec> noisy_conditional_means(const DiscreteNoisyFmc& fmc);

struct InvarianceCheck {
    double d_split = 0.0;    // both squared-norm terms, no cross-term
    double d_reduced = 0.0;  // undistorted-only objective without its constant
    double gap = 0.0;        // d_split - d_reduced
    double cross_term = 0.0; // 2 sum ... (x0 - x0'(y)).(x_perp - x_perp'(y))
};

// Requires Pr(y|x0,x_perp) = Pr(y|x0) and Pr(x_perp|x0) = Pr(x_perp) (within
// 1e-12); throws ContractError otherwise.
InvarianceCheck invariance_reduction_check(const DiscreteProductFmc& fmc);

// Mean of x_perp under its (x0-independent) marginal.
Vec nuisance_mean(const DiscreteProductFmc& fmc);

// Sets x0'(y) to its conditional mean and x_perp'(y) to the nuisance mean.
void set_optimal_reconstructions(DiscreteProductFmc& fmc);

// Random instances for the identity checks.
DiscreteFmc random_fmc(std::size_t k, std::size_t m, std::size_t n, std::size_t dim, Rng& rng);
DiscreteNoisyFmc random_noisy_fmc(std::size_t k0, std::size_t k, std::size_t m, std::size_t n, std::size_t dim,
                                  Rng& rng);
// Satisfies the independence assumptions by construction.
DiscreteProductFmc random_product_fmc(std::size_t k0, std::size_t l, std::size_t m, std::size_t n, std::size_t dim,
                                      Rng& rng);
// Re-draws Pr(y|x0) (kept independent of x_perp) and resets optimal reconstructions.
void rerandomize_encoder(DiscreteProductFmc& fmc, Rng& rng);

}  // namespace oracle
}  // namespace svq
