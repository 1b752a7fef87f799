#pragma once

// Dense double-precision inner-loop kernels.
//
// Every kernel has a portable scalar reference implementation and, where the
// build and the running CPU allow it, a vectorised variant (AVX2+FMA on x86-64,
// NEON on AArch64). The active table is chosen once at first use; setting the
// environment variable SVQ_FORCE_SCALAR=1 before the first call pins the scalar
// table. The vector variants sum in a different order than the scalar loops, so
// results agree to rounding, not bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace svq::kernels {

struct KernelTable {
    std::string_view name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace svq::kernels
