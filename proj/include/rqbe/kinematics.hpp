#pragma once

#include <array>

#include "rqbe/vec3.hpp"

namespace rqbe::kinematics {

// On-shell four-momentum with c = m = 1.
struct FourMomentum {
  Vec3 p{0.0, 0.0, 0.0};
  double p0 = 1.0;

  FourMomentum() = default;
  explicit FourMomentum(const Vec3& momentum);
};

inline double energy(const Vec3& p) { return std::sqrt(1.0 + dot(p, p)); }

struct CollisionGeometry {
  Vec3 omega{0.0, 0.0, 1.0};
  double theta = 0.0;
  double phi = 0.0;

  static CollisionGeometry from_angles(double theta, double phi);
  static CollisionGeometry from_unit(const Vec3& omega);
};

struct PrePostQuadruple {
  FourMomentum p, q, p_prime, q_prime;
};

struct Relative {
  double s = 4.0;
  double g = 0.0;
};

using Mat4 = std::array<std::array<double, 4>, 4>;
using Vec4 = std::array<double, 4>;

double minkowski_product(const FourMomentum& p, const FourMomentum& q);
double minkowski_product(const Vec4& u, const Vec4& v);

// g^2 evaluated without the cancellation in -2 p.q - 2.
double g_squared(const FourMomentum& p, const FourMomentum& q);

Relative relative_quantities(const FourMomentum& p, const FourMomentum& q);

PrePostQuadruple com_post_momenta(const FourMomentum& p, const FourMomentum& q,
                                  const CollisionGeometry& geom);

// Direction of the relative momentum in the centre-of-momentum frame. The
// post-collision map with omega equal to this axis returns p' = p.
Vec3 relative_axis(const FourMomentum& p, const FourMomentum& q);

double scattering_cos_theta(const PrePostQuadruple& quad);

double moller_velocity(const FourMomentum& p, const FourMomentum& q);

double cross_section(double g, double theta);

// Boost taking p + p' to (sqrt(sbar),0,0,0) and p - p' to (0,0,0,-gbar).
Mat4 lorentz_boost(const FourMomentum& p, const FourMomentum& p_prime);

Vec4 apply(const Mat4& m, const Vec4& v);
inline Vec4 four(const FourMomentum& p) { return {p.p0, p.p[0], p.p[1], p.p[2]}; }

}  // namespace rqbe::kinematics
