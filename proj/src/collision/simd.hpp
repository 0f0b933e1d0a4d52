#pragma once

// Minimal vector abstraction shared by the scalar and AVX2 collision kernels.
// Both instantiations run the same arithmetic (including the polynomial exp),
// so they differ only by FMA contraction and reduction order.

#include <cmath>
#include <cstdint>
#include <cstring>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace rqbe::simd {

struct Scalar {
  static constexpr int width = 1;
  using D = double;
  using I = std::int32_t;
  using M = bool;

  static D set1(double x) { return x; }
  static D load(const double* p) { return *p; }
  static void store(double* p, D x) { *p = x; }
  static D add(D a, D b) { return a + b; }
  static D sub(D a, D b) { return a - b; }
  static D mul(D a, D b) { return a * b; }
  static D div(D a, D b) { return a / b; }
  static D fmadd(D a, D b, D c) { return a * b + c; }
  static D sqrt(D a) { return std::sqrt(a); }
  static D min(D a, D b) { return b < a ? b : a; }
  static D max(D a, D b) { return a < b ? b : a; }
  static D floor(D a) { return std::floor(a); }
  static D round(D a) { return std::nearbyint(a); }
  static D abs(D a) { return std::fabs(a); }
  static M le(D a, D b) { return a <= b; }
  static M ge(D a, D b) { return a >= b; }
  static M land(M a, M b) { return a && b; }
  static D select(M m, D a, D b) { return m ? a : b; }
  static I to_int(D a) { return static_cast<I>(a); }
  static I iadd(I a, I b) { return a + b; }
  static I imul(I a, std::int32_t k) { return a * k; }
  static I iset1(std::int32_t k) { return k; }
  static D gather(const double* base, I idx) { return base[idx]; }
  static void store_int(std::int32_t* p, I x) { *p = x; }
  static double hsum(D a) { return a; }
  // 2^n for integral n in the normal range.
  static D pow2(D n) {
    const std::int64_t bits = (static_cast<std::int64_t>(n) + 1023) << 52;
    double out;
    std::memcpy(&out, &bits, sizeof out);
    return out;
  }
};

#if defined(__AVX2__)
struct Avx2 {
  static constexpr int width = 4;
  using D = __m256d;
  using I = __m128i;
  using M = __m256d;

  static D set1(double x) { return _mm256_set1_pd(x); }
  static D load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, D x) { _mm256_storeu_pd(p, x); }
  static D add(D a, D b) { return _mm256_add_pd(a, b); }
  static D sub(D a, D b) { return _mm256_sub_pd(a, b); }
  static D mul(D a, D b) { return _mm256_mul_pd(a, b); }
  static D div(D a, D b) { return _mm256_div_pd(a, b); }
  static D fmadd(D a, D b, D c) { return _mm256_fmadd_pd(a, b, c); }
  static D sqrt(D a) { return _mm256_sqrt_pd(a); }
  static D min(D a, D b) { return _mm256_min_pd(b, a); }
  static D max(D a, D b) { return _mm256_max_pd(b, a); }
  static D floor(D a) { return _mm256_floor_pd(a); }
  static D round(D a) { return _mm256_round_pd(a, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC); }
  static D abs(D a) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a); }
  static M le(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_LE_OQ); }
  static M ge(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_GE_OQ); }
  static M land(M a, M b) { return _mm256_and_pd(a, b); }
  static D select(M m, D a, D b) { return _mm256_blendv_pd(b, a, m); }
  static I to_int(D a) { return _mm256_cvttpd_epi32(a); }
  static I iadd(I a, I b) { return _mm_add_epi32(a, b); }
  static I imul(I a, std::int32_t k) { return _mm_mullo_epi32(a, _mm_set1_epi32(k)); }
  static I iset1(std::int32_t k) { return _mm_set1_epi32(k); }
  static D gather(const double* base, I idx) { return _mm256_i32gather_pd(base, idx, 8); }
  static void store_int(std::int32_t* p, I x) { _mm_storeu_si128(reinterpret_cast<__m128i*>(p), x); }
  static double hsum(D a) {
    alignas(32) double t[4];
    _mm256_store_pd(t, a);
    return ((t[0] + t[1]) + t[2]) + t[3];
  }
  static D pow2(D n) {
    const __m128i ni = _mm256_cvtpd_epi32(n);
    __m256i e = _mm256_cvtepi32_epi64(ni);
    e = _mm256_add_epi64(e, _mm256_set1_epi64x(1023));
    e = _mm256_slli_epi64(e, 52);
    return _mm256_castsi256_pd(e);
  }
};
#endif

// exp via Cody-Waite reduction and a degree-13 Taylor polynomial on
// |r| <= ln2/2. Arguments are clamped to [-708, 709].
template <class S>
inline typename S::D vexp(typename S::D x) {
  using D = typename S::D;
  x = S::max(S::set1(-708.0), S::min(S::set1(709.0), x));
  const D n = S::round(S::mul(x, S::set1(1.4426950408889634)));
  D r = S::fmadd(n, S::set1(-6.93145751953125e-1), x);
  r = S::fmadd(n, S::set1(-1.4286068203094172e-6), r);
  constexpr double c[14] = {1.0,
                            1.0,
                            1.0 / 2,
                            1.0 / 6,
                            1.0 / 24,
                            1.0 / 120,
                            1.0 / 720,
                            1.0 / 5040,
                            1.0 / 40320,
                            1.0 / 362880,
                            1.0 / 3628800,
                            1.0 / 39916800,
                            1.0 / 479001600,
                            1.0 / 6227020800.0};
  D p = S::set1(c[13]);
  for (int k = 12; k >= 0; --k) p = S::fmadd(p, r, S::set1(c[k]));
  return S::mul(p, S::pow2(n));
}

}  // namespace rqbe::simd
