// AVX2 variants of the distance kernels. Compiled with -mavx2 (and without
// -mfma) so that each lane performs exactly the scalar operation sequence.

#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "hmlab/kernels/distance.hpp"

namespace hmlab::kernels {
namespace {

inline double hmin(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
}

inline __m256d sq_norm(__m256d dx, __m256d dy) {
  return _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
}

}  // namespace

double min_sq_distance_avx2(const ObstacleBatch& batch, double px, double py) {
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d best4 = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  double qx, qy;

  const auto& s = batch.segments;
  std::size_t i = 0;
  for (; i + 4 <= s.size(); i += 4) {
    const __m256d ax = _mm256_loadu_pd(&s.ax[i]);
    const __m256d ay = _mm256_loadu_pd(&s.ay[i]);
    const __m256d ux = _mm256_loadu_pd(&s.ux[i]);
    const __m256d uy = _mm256_loadu_pd(&s.uy[i]);
    const __m256d uu = _mm256_loadu_pd(&s.uu[i]);
    const __m256d num = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(vpx, ax), ux),
                                      _mm256_mul_pd(_mm256_sub_pd(vpy, ay), uy));
    __m256d t = _mm256_div_pd(num, uu);
    t = _mm256_blendv_pd(t, zero, _mm256_cmp_pd(t, zero, _CMP_LT_OQ));
    t = _mm256_blendv_pd(t, one, _mm256_cmp_pd(t, one, _CMP_GT_OQ));
    const __m256d qxv = _mm256_add_pd(ax, _mm256_mul_pd(t, ux));
    const __m256d qyv = _mm256_add_pd(ay, _mm256_mul_pd(t, uy));
    best4 = _mm256_min_pd(best4, sq_norm(_mm256_sub_pd(qxv, vpx), _mm256_sub_pd(qyv, vpy)));
  }
  for (; i < s.size(); ++i) {
    best = std::min(best, segment_sq(px, py, s.ax[i], s.ay[i], s.ux[i], s.uy[i], s.uu[i], qx, qy));
  }

  const auto& d = batch.disks;
  i = 0;
  for (; i + 4 <= d.size(); i += 4) {
    const __m256d cx = _mm256_loadu_pd(&d.cx[i]);
    const __m256d cy = _mm256_loadu_pd(&d.cy[i]);
    const __m256d r = _mm256_loadu_pd(&d.r[i]);
    const __m256d vx = _mm256_sub_pd(vpx, cx);
    const __m256d vy = _mm256_sub_pd(vpy, cy);
    const __m256d len = _mm256_sqrt_pd(sq_norm(vx, vy));
    const __m256d sc = _mm256_div_pd(r, len);
    const __m256d degenerate = _mm256_cmp_pd(len, zero, _CMP_EQ_OQ);
    const __m256d qxv = _mm256_blendv_pd(_mm256_add_pd(cx, _mm256_mul_pd(vx, sc)),
                                         _mm256_add_pd(cx, r), degenerate);
    const __m256d qyv = _mm256_blendv_pd(_mm256_add_pd(cy, _mm256_mul_pd(vy, sc)), cy, degenerate);
    best4 = _mm256_min_pd(best4, sq_norm(_mm256_sub_pd(qxv, vpx), _mm256_sub_pd(qyv, vpy)));
  }
  for (; i < d.size(); ++i) {
    best = std::min(best, circle_sq(px, py, d.cx[i], d.cy[i], d.r[i], qx, qy));
  }

  const auto& a = batch.arcs;
  i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    const __m256d cx = _mm256_loadu_pd(&a.cx[i]);
    const __m256d cy = _mm256_loadu_pd(&a.cy[i]);
    const __m256d r = _mm256_loadu_pd(&a.r[i]);
    const __m256d vx = _mm256_sub_pd(vpx, cx);
    const __m256d vy = _mm256_sub_pd(vpy, cy);
    const __m256d len = _mm256_sqrt_pd(sq_norm(vx, vy));
    const __m256d along = _mm256_add_pd(_mm256_mul_pd(vx, _mm256_loadu_pd(&a.mx[i])),
                                        _mm256_mul_pd(vy, _mm256_loadu_pd(&a.my[i])));
    const __m256d inside =
        _mm256_and_pd(_mm256_cmp_pd(len, zero, _CMP_GT_OQ),
                      _mm256_cmp_pd(along, _mm256_mul_pd(len, _mm256_loadu_pd(&a.cos_half[i])),
                                    _CMP_GE_OQ));
    const __m256d sc = _mm256_div_pd(r, len);
    const __m256d px_proj = _mm256_add_pd(cx, _mm256_mul_pd(vx, sc));
    const __m256d py_proj = _mm256_add_pd(cy, _mm256_mul_pd(vy, sc));
    const __m256d e0x = _mm256_loadu_pd(&a.e0x[i]);
    const __m256d e0y = _mm256_loadu_pd(&a.e0y[i]);
    const __m256d e1x = _mm256_loadu_pd(&a.e1x[i]);
    const __m256d e1y = _mm256_loadu_pd(&a.e1y[i]);
    const __m256d s0 = sq_norm(_mm256_sub_pd(e0x, vpx), _mm256_sub_pd(e0y, vpy));
    const __m256d s1 = sq_norm(_mm256_sub_pd(e1x, vpx), _mm256_sub_pd(e1y, vpy));
    const __m256d take_end = _mm256_cmp_pd(s1, s0, _CMP_LT_OQ);
    const __m256d ex = _mm256_blendv_pd(e0x, e1x, take_end);
    const __m256d ey = _mm256_blendv_pd(e0y, e1y, take_end);
    const __m256d qxv = _mm256_blendv_pd(ex, px_proj, inside);
    const __m256d qyv = _mm256_blendv_pd(ey, py_proj, inside);
    best4 = _mm256_min_pd(best4, sq_norm(_mm256_sub_pd(qxv, vpx), _mm256_sub_pd(qyv, vpy)));
  }
  for (; i < a.size(); ++i) {
    best = std::min(best, arc_sq(px, py, a.cx[i], a.cy[i], a.r[i], a.mx[i], a.my[i],
                                 a.cos_half[i], a.e0x[i], a.e0y[i], a.e1x[i], a.e1y[i], qx, qy));
  }
  return std::min(best, hmin(best4));
}

void distance_row_avx2(double px, double py, std::span<const double> xs,
                       std::span<const double> ys, std::span<double> out) {
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  std::size_t j = 0;
  for (; j + 4 <= xs.size(); j += 4) {
    const __m256d dx = _mm256_sub_pd(vpx, _mm256_loadu_pd(&xs[j]));
    const __m256d dy = _mm256_sub_pd(vpy, _mm256_loadu_pd(&ys[j]));
    _mm256_storeu_pd(&out[j], _mm256_sqrt_pd(sq_norm(dx, dy)));
  }
  distance_row_scalar(px, py, xs.subspan(j), ys.subspan(j), out.subspan(j));
}

}  // namespace hmlab::kernels
