#include "linalg.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rqbe/error.hpp"

namespace rqbe::linalg {

namespace {

std::vector<double> eigen_range(const double* a, std::size_t n, char range, std::size_t il,
                                std::size_t iu) {
  std::vector<double> work(a, a + n * n);
  std::vector<double> w(n);
  std::vector<lapack_int> isuppz(2 * n);
  lapack_int m = 0;
  double z = 0.0;
  const lapack_int N = static_cast<lapack_int>(n);
  const lapack_int info = LAPACKE_dsyevr(LAPACK_ROW_MAJOR, 'N', range, 'U', N, work.data(), N,
                                         0.0, 0.0, static_cast<lapack_int>(il),
                                         static_cast<lapack_int>(iu), 0.0, &m, w.data(), &z, 1,
                                         isuppz.data());
  if (info != 0)
    throw Error(ErrorKind::EigenSolver, "dsyevr failed with info " + std::to_string(info));
  w.resize(static_cast<std::size_t>(m));
  return w;
}

}  // namespace

std::vector<double> symmetric_eigenvalues(const double* a, std::size_t n, std::size_t il,
                                          std::size_t iu) {
  if (il < 1 || iu < il || iu > n)
    throw Error(ErrorKind::InvalidParams, "eigenvalue index range out of bounds");
  return eigen_range(a, n, 'I', il, iu);
}

std::vector<double> symmetric_eigenvalues(const double* a, std::size_t n) {
  return eigen_range(a, n, 'A', 1, n);
}

double determinant(const double* a, std::size_t n) {
  std::vector<double> lu(a, a + n * n);
  std::vector<lapack_int> piv(n);
  const lapack_int N = static_cast<lapack_int>(n);
  const lapack_int info = LAPACKE_dgetrf(LAPACK_ROW_MAJOR, N, N, lu.data(), N, piv.data());
  if (info < 0) throw Error(ErrorKind::InvalidParams, "dgetrf failed with info " + std::to_string(info));
  double det = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    det *= lu[i * n + i];
    if (piv[i] != static_cast<lapack_int>(i + 1)) det = -det;
  }
  return det;
}

void matvec(const double* a, std::size_t n, const double* x, double* y) {
  const int N = static_cast<int>(n);
  cblas_dgemv(CblasRowMajor, CblasNoTrans, N, N, 1.0, a, N, x, 1, 0.0, y, 1);
}

LanczosResult lanczos_smallest(const std::function<void(const double*, double*)>& apply,
                               std::size_t n, std::uint64_t seed, double tol, int max_iter) {
  const int kmax = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_iter), n));
  std::vector<std::vector<double>> V;
  std::vector<double> alpha, beta;
  std::vector<double> v(n), w(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (auto& x : v) x = nd(rng);
  double nv = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  for (auto& x : v) x /= nv;

  LanczosResult res;
  for (int k = 0; k < kmax; ++k) {
    V.push_back(v);
    apply(v.data(), w.data());
    const double a = std::inner_product(w.begin(), w.end(), v.begin(), 0.0);
    alpha.push_back(a);
    // Full reorthogonalisation, applied twice.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : V) {
        const double d = std::inner_product(w.begin(), w.end(), u.begin(), 0.0);
        for (std::size_t i = 0; i < n; ++i) w[i] -= d * u[i];
      }
    const double b = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));

    // Ritz values of the current tridiagonal matrix.
    const lapack_int m = static_cast<lapack_int>(alpha.size());
    std::vector<double> d(alpha), e(beta), z(static_cast<std::size_t>(m) * m);
    e.resize(static_cast<std::size_t>(m));
    const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', m, d.data(), e.data(), z.data(), m);
    if (info != 0)
      throw Error(ErrorKind::EigenSolver, "dstev failed with info " + std::to_string(info));
    // d ascending; eigenvector 0 is column 0, its last component is z[m-1].
    res.value = d[0];
    res.residual = std::fabs(b * z[static_cast<std::size_t>(m) - 1]);
    res.iterations = k + 1;
    double scale = 0.0;
    for (double x : d) scale = std::max(scale, std::fabs(x));
    if (k >= 4 && res.residual <= tol * std::max(scale, 1e-300)) {
      res.converged = true;
      break;
    }
    if (b <= 1e-14 * std::max(scale, 1e-300)) {
      // Invariant subspace found; the Ritz values are exact.
      res.converged = true;
      break;
    }
    beta.push_back(b);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / b;
  }
  return res;
}

}  // namespace rqbe::linalg
