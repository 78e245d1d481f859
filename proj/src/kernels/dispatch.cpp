#include "tangleflow/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace tangleflow::kernels {
namespace {

const KernelTable& select()
{
    const char* env = std::getenv("TANGLEFLOW_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar")
        return scalar_table();
    if (const KernelTable* t = avx2_table())
        return *t;
    return scalar_table();
}

const KernelTable* forced = nullptr;

} // namespace

const KernelTable& active() noexcept
{
    static const KernelTable& table = select();
    return forced != nullptr ? *forced : table;
}

void force(const KernelTable* table) noexcept { forced = table; }

} // namespace tangleflow::kernels
