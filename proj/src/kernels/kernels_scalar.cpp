#include "e2dpca/kernels.hpp"

namespace e2dpca::kernels {
namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double squared_distance_ref(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

void axpy_ref(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void rotate_ref(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void accumulate_squared_diff_ref(const double* a, const double* b, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    acc[i] += diff * diff;
  }
}

void subtract_ref(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

constexpr KernelTable kScalarTable{
    dot_ref, squared_distance_ref, axpy_ref, rotate_ref, accumulate_squared_diff_ref, subtract_ref,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalarTable; }

}  // namespace e2dpca::kernels
