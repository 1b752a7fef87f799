#pragma once

#include <cmath>
#include <vector>

#include "svq/codebook.hpp"
#include "svq/encoder.hpp"
#include "svq/random.hpp"

namespace testing {

inline std::vector<double> normals(svq::Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = scale * rng.normal();
    return v;
}

// Weights of moderate norm so the sigmoids stay away from saturation.
inline svq::Codebook random_codebook(svq::Rng& rng, std::size_t m, std::size_t d, bool thresholded = false,
                                     bool parallel = false) {
    svq::Codebook cb(m, d);
    for (std::size_t y = 0; y < m; ++y) {
        cb.set_weight(y, normals(rng, d, 0.7));
        cb.set_recon(y, normals(rng, d));
        cb.set_bias(y, 0.5 * rng.normal());
        cb.set_recon_scale(y, rng.normal());
    }
    if (thresholded) cb.set_thresholded(rng.uniform(-0.5, 0.5));
    if (parallel) cb.set_parallel(true);
    return cb;
}

inline svq::Dataset random_dataset(svq::Rng& rng, std::size_t n, std::size_t d) {
    svq::Dataset data(d);
    for (std::size_t i = 0; i < n; ++i) data.push_back(normals(rng, d));
    return data;
}

inline double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    const double scale = std::max({norm(a), norm(b), 1e-8});
    return norm(diff) / scale;
}

}  // namespace testing
