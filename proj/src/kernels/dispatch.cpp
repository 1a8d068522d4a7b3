#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "e2dpca/kernels.hpp"

namespace e2dpca::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(E2DPCA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  if (const char* forced = std::getenv("E2DPCA_KERNELS")) {
    if (std::string(forced) == "scalar") return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

const KernelTable* table_for(Isa isa) noexcept {
#if defined(E2DPCA_HAVE_AVX2)
  if (isa == Isa::avx2) return &avx2_table();
#endif
  (void)isa;
  return &scalar_table();
}

struct ActiveState {
  std::atomic<Isa> isa;
  std::atomic<const KernelTable*> table;
  ActiveState() : isa(initial_isa()), table(table_for(isa.load())) {}
};

ActiveState& state() noexcept {
  static ActiveState s;
  return s;
}

}  // namespace

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
  }
  return false;
}

Isa active_isa() noexcept { return state().isa.load(std::memory_order_acquire); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel ISA '" + std::string(isa_name(isa)) +
                                "' is not available on this CPU/build");
  }
  state().table.store(table_for(isa), std::memory_order_release);
  state().isa.store(isa, std::memory_order_release);
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& active() noexcept { return *state().table.load(std::memory_order_acquire); }

}  // namespace e2dpca::kernels
