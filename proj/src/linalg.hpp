#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace rqbe::linalg {

// Eigenvalues il..iu (1-based, ascending) of the symmetric matrix a (row-major,
// n x n). a is copied.
std::vector<double> symmetric_eigenvalues(const double* a, std::size_t n, std::size_t il,
                                          std::size_t iu);

// All eigenvalues, ascending.
std::vector<double> symmetric_eigenvalues(const double* a, std::size_t n);

struct LanczosResult {
  double value = 0.0;     // smallest Ritz value
  double residual = 0.0;  // |beta_k s_k| for that Ritz pair
  int iterations = 0;
  bool converged = false;
};

// Smallest eigenvalue of a symmetric operator by Lanczos with full
// reorthogonalisation, started from a seeded random vector.
LanczosResult lanczos_smallest(const std::function<void(const double*, double*)>& apply,
                               std::size_t n, std::uint64_t seed, double tol, int max_iter);

// Determinant of a row-major n x n matrix by LU with partial pivoting.
double determinant(const double* a, std::size_t n);

// y = A x for a row-major n x n matrix.
void matvec(const double* a, std::size_t n, const double* x, double* y);

}  // namespace rqbe::linalg
