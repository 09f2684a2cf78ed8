#include <atomic>
#include <cstdlib>
#include <cstring>

#include "hmlab/kernels/distance.hpp"

namespace hmlab::kernels {
namespace {

Isa detect() {
  if (const char* env = std::getenv("HMLAB_FORCE_SCALAR"); env != nullptr && std::strcmp(env, "0") != 0) {
    return Isa::kScalar;
  }
  return avx2_supported() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_supported() {
#if defined(HMLAB_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::kAvx2 && !avx2_supported()) isa = Isa::kScalar;
  selected().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

#if !defined(HMLAB_HAVE_AVX2)
double min_sq_distance_avx2(const ObstacleBatch& batch, double px, double py) {
  return min_sq_distance_scalar(batch, px, py);
}
void distance_row_avx2(double px, double py, std::span<const double> xs,
                       std::span<const double> ys, std::span<double> out) {
  distance_row_scalar(px, py, xs, ys, out);
}
#endif

double min_sq_distance(const ObstacleBatch& batch, double px, double py) {
  if (active_isa() == Isa::kAvx2) return min_sq_distance_avx2(batch, px, py);
  return min_sq_distance_scalar(batch, px, py);
}

void distance_row(double px, double py, std::span<const double> xs, std::span<const double> ys,
                  std::span<double> out) {
  if (active_isa() == Isa::kAvx2) {
    distance_row_avx2(px, py, xs, ys, out);
  } else {
    distance_row_scalar(px, py, xs, ys, out);
  }
}

}  // namespace hmlab::kernels
