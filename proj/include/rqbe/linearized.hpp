#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rqbe/collision.hpp"
#include "rqbe/projection.hpp"

namespace rqbe {

// Dense matrix of L on the momentum nodes, row-major. The stored matrix is
// the symmetric part of (I - P) L (I - P); the defects of the raw quadrature
// matrix are kept alongside.
struct LinearOperatorMatrix {
  std::size_t n = 0;
  std::vector<double> matrix;
  std::vector<double> nu_diag;
  // w (1, p1, p2, p3, p0) orthonormalised for the plain Euclidean node sum.
  std::array<std::vector<double>, 5> kernel_basis;

  double scale = 0.0;            // max |L_ij| of the raw matrix
  double raw_asymmetry = 0.0;    // max |L_ij - L_ji| / scale
  double raw_kernel = 0.0;       // max_k |L e_k| / scale
  double raw_conservation = 0.0; // max_k |L^T e_k| / scale

  double at(std::size_t i, std::size_t j) const { return matrix[i * n + j]; }
  // max |L_ij - L_ji| / scale of the stored matrix.
  double symmetry_defect() const;
};

struct CoercivityResult {
  double delta = 0.0;
  std::string method;  // "dsyevr" or "lanczos"
  int iterations = 0;
  double residual = 0.0;
};

enum class EigenMethod { Auto, Dense, Lanczos };

class LinearizedOperator {
 public:
  explicit LinearizedOperator(const CollisionOperator& op);

  const CollisionOperator& collision() const { return op_; }
  const MacroProjection& projection() const { return op_.projection(); }

  // nu = R(m) / (1 + tau m) at the nodes and at an arbitrary momentum.
  const std::vector<double>& nu() const { return nu_; }
  double nu_at(const Vec3& p) const;

  std::vector<double> apply_K1(std::span<const double> f) const;
  std::vector<double> apply_K2(std::span<const double> f) const;
  // K2 from the two-term integrand before the p' <-> q' symmetrisation.
  std::vector<double> apply_K2_two_term(std::span<const double> f) const;
  // L f = nu f + K1 f - K2 f.
  std::vector<double> apply_L(std::span<const double> f) const;

  // Gamma_1..6(f, h) and T_1..4(f, h, eta) at the nodes.
  std::array<std::vector<double>, 6> gamma_terms(std::span<const double> f,
                                                 std::span<const double> h) const;
  std::array<std::vector<double>, 4> t_terms(std::span<const double> f, std::span<const double> h,
                                             std::span<const double> eta) const;

  LinearOperatorMatrix assemble_L() const;

  std::vector<double> project_P(std::span<const double> f,
                                ProjectionCoefficients* coeffs = nullptr) const;

 private:
  CollisionOperator op_;
  std::vector<double> nu_;
};

// Smallest value of <Lf, f> / |f|_nu^2 over f orthogonal to the kernel basis.
CoercivityResult coercivity_delta(const LinearOperatorMatrix& L,
                                  EigenMethod method = EigenMethod::Auto);

// The k smallest singular values of the stored matrix, ascending.
std::vector<double> smallest_singular_values(const LinearOperatorMatrix& L, std::size_t k);

}  // namespace rqbe
