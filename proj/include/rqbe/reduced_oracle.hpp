#pragma once

#include <string>
#include <vector>

#include "rqbe/kinematics.hpp"

// Delta-function reduction of the B integral to a 2-D (phi, y) integral,
// the Bessel closed forms and the upper-bound chain built on them.
namespace rqbe::reduced {

// I_0(y) = (1/pi) int_0^pi exp(y cos phi) dphi; power series for y <= 15,
// asymptotic expansion above.
double bessel_I0(double y);
// exp(-y) I_0(y), finite for every y >= 0.
double bessel_I0_scaled(double y);

// I(R, r) = int_0^inf y/sqrt(y^2+1) exp(-R sqrt(y^2+1)) I_0(r y) dy and
// II(R, r) = int_0^inf y exp(-R sqrt(y^2+1)) I_0(r y) dy, for R > r >= 0.
double closed_form_I(double R, double r);
double closed_form_II(double R, double r);

struct ReducedGeometry {
  kinematics::FourMomentum p, p_prime;
  double gbar = 0.0;
  double sbar = 4.0;
  double R = 0.0;  // (p0 + p'0) / 2
  double r = 0.0;  // |p x p'| / gbar
  // R^2 - r^2 from |p - p'|^2 sbar / (4 gbar^2), free of the R ~ r cancellation.
  double D = 0.0;

  static ReducedGeometry make(const kinematics::FourMomentum& p,
                              const kinematics::FourMomentum& p_prime);
};

enum class HalfAngle { Exact, Bounded };

// 2-D quadrature of the reduced B integral for J(x) = exp(-a x). With
// HalfAngle::Bounded the factor cos(theta_lambda / 2) is replaced by 1, which
// is the integral the closed forms evaluate.
double reduced_B(const kinematics::FourMomentum& p, const kinematics::FourMomentum& p_prime,
                 double a = 1.0, HalfAngle kernel = HalfAngle::Exact);

struct BUpper {
  // (sbar^{3/2} pi / 2) J((p'0 - p0)/2) [1/sqrt(D) + R/D + R/D^{3/2}] exp(-sqrt(D)),
  // with (R, r) scaled to (aR, ar).
  double chain = 0.0;
  // constant * sqrt(sbar) (p0 + p'0).
  double simplified = 0.0;
  double constant = 0.0;
};

BUpper B_upper(const kinematics::FourMomentum& p, const kinematics::FourMomentum& p_prime,
               double a = 1.0);

// Constant of the simplified bound: pi (2 + 1/a) / a, which is 3 pi for a = 1.
double simplified_bound_constant(double a);

struct IdentityCheck {
  std::string name;
  double error = 0.0;  // relative to the scale of the terms involved
  bool passed = true;
  bool skipped = false;  // division by a vanishing gbar or |p x p'|
};

struct OnShellReport {
  std::vector<IdentityCheck> checks;
  int failures() const;
  int skipped() const;
};

// On-shell identities of a quadruple: Pythagorean split of g, the two
// Minkowski forms of gbar^2 and gtilde^2, the cos(theta) forms, the half
// angle, the boost relations and the (q, q') <-> (qbar, qbar') round trip.
OnShellReport on_shell_identity_suite(const kinematics::PrePostQuadruple& quad,
                                      double tol = 1e-10);

}  // namespace rqbe::reduced
