#pragma once

// Data-parallel inner loops shared by the numerical modules.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2/FMA variant. The variant is chosen once per process from the CPU
// feature bits; setting E2DPCA_KERNELS=scalar in the environment (or calling
// set_isa) pins the reference path. The scalar and vector variants sum in
// different orders, so results agree to rounding, not bit-for-bit; within a
// single ISA every kernel is deterministic.

#include <cstddef>
#include <span>
#include <string_view>

namespace e2dpca::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x <- c*x - s*y, y <- s*x + c*y
  void (*rotate)(double* x, double* y, std::size_t n, double c, double s);
  // acc[i] += (a[i] - b[i])^2
  void (*accumulate_squared_diff)(const double* a, const double* b, double* acc, std::size_t n);
  // out[i] = a[i] - b[i]
  void (*subtract)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
#if defined(E2DPCA_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif

bool isa_available(Isa isa) noexcept;
Isa active_isa() noexcept;
// Throws std::invalid_argument when the ISA is not available on this CPU.
void set_isa(Isa isa);
std::string_view isa_name(Isa isa) noexcept;

const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  active().rotate(x.data(), y.data(), x.size(), c, s);
}

inline void accumulate_squared_diff(std::span<const double> a, std::span<const double> b,
                                    std::span<double> acc) {
  active().accumulate_squared_diff(a.data(), b.data(), acc.data(), a.size());
}

inline void subtract(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  active().subtract(a.data(), b.data(), out.data(), a.size());
}

// RAII pin of the active ISA, restored on scope exit. Test-only convenience.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_isa(isa); }
  ~ScopedIsa() { set_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace e2dpca::kernels
