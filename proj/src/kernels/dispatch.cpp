#include <cstdlib>
#include <string_view>

#include "svq/kernels.hpp"

namespace svq::kernels {
namespace {

const KernelTable& select() noexcept {
    if (const char* force = std::getenv("SVQ_FORCE_SCALAR"); force && std::string_view(force) != "0") {
        return scalar_table();
    }
    if (const KernelTable* t = avx2_table()) return *t;
    if (const KernelTable* t = neon_table()) return *t;
    return scalar_table();
}

}  // namespace

const KernelTable& active() noexcept {
    static const KernelTable& table = select();
    return table;
}

}  // namespace svq::kernels
