#include "rqbe/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "rqbe/error.hpp"

namespace rqbe::kinematics {

namespace {

constexpr double kRadicandNoise = 1e-12;

double clamp_radicand(double r, const char* what) {
  if (r >= 0.0) return r;
  if (r >= -kRadicandNoise) return 0.0;
  throw Error(ErrorKind::DegenerateGeometry,
              std::string("negative radicand in ") + what);
}

}  // namespace

FourMomentum::FourMomentum(const Vec3& momentum)
    : p(momentum), p0(energy(momentum)) {}

CollisionGeometry CollisionGeometry::from_angles(double theta, double phi) {
  CollisionGeometry g;
  const double st = std::sin(theta);
  g.omega = {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
  g.theta = theta;
  g.phi = phi;
  return g;
}

CollisionGeometry CollisionGeometry::from_unit(const Vec3& omega) {
  CollisionGeometry g;
  const double n = norm(omega);
  g.omega = (1.0 / n) * omega;
  g.theta = std::acos(std::clamp(g.omega[2], -1.0, 1.0));
  double phi = std::atan2(g.omega[1], g.omega[0]);
  if (phi < 0.0) phi += 2.0 * M_PI;
  g.phi = phi;
  return g;
}

double minkowski_product(const FourMomentum& p, const FourMomentum& q) {
  return -p.p0 * q.p0 + dot(p.p, q.p);
}

double minkowski_product(const Vec4& u, const Vec4& v) {
  return -u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3];
}

double g_squared(const FourMomentum& p, const FourMomentum& q) {
  const Vec3 d = p.p - q.p;
  const double de = (dot(p.p, p.p) - dot(q.p, q.p)) / (p.p0 + q.p0);
  return dot(d, d) - de * de;
}

Relative relative_quantities(const FourMomentum& p, const FourMomentum& q) {
  const double g2 = clamp_radicand(g_squared(p, q), "relative momentum");
  return {g2 + 4.0, std::sqrt(g2)};
}

PrePostQuadruple com_post_momenta(const FourMomentum& p, const FourMomentum& q,
                                  const CollisionGeometry& geom) {
  const Relative rel = relative_quantities(p, q);
  const Vec3 P = p.p + q.p;
  const double P0 = p.p0 + q.p0;
  const double rs = std::sqrt(rel.s);
  // (gamma - 1) / |P|^2 rewritten so that P -> 0 is regular.
  const double c = 1.0 / (rs * (P0 + rs));
  const double Pw = dot(P, geom.omega);
  const double half_g = 0.5 * rel.g;

  PrePostQuadruple out;
  out.p = p;
  out.q = q;
  out.p_prime.p = 0.5 * P + half_g * (geom.omega + (c * Pw) * P);
  out.p_prime.p0 = 0.5 * P0 + half_g / rs * Pw;
  out.q_prime.p = P - out.p_prime.p;
  out.q_prime.p0 = P0 - out.p_prime.p0;
  return out;
}

Vec3 relative_axis(const FourMomentum& p, const FourMomentum& q) {
  const double g = relative_quantities(p, q).g;
  if (g == 0.0)
    throw Error(ErrorKind::DegenerateGeometry, "relative axis of equal momenta");
  const Vec3 P = p.p + q.p;
  const double P0 = p.p0 + q.p0;
  const double rs = std::sqrt(g * g + 4.0);
  const Vec3 u = (1.0 / g) * (p.p - q.p);
  const double c0 = -1.0 / (P0 * (P0 + rs));
  Vec3 w = u + (c0 * dot(P, u)) * P;
  return (1.0 / norm(w)) * w;
}

double scattering_cos_theta(const PrePostQuadruple& quad) {
  const double g2 = g_squared(quad.p, quad.q);
  if (!(g2 > 0.0))
    throw Error(ErrorKind::DegenerateGeometry, "scattering angle with g = 0");
  const Vec4 a{quad.p.p0 - quad.q.p0, quad.p.p[0] - quad.q.p[0],
               quad.p.p[1] - quad.q.p[1], quad.p.p[2] - quad.q.p[2]};
  const Vec4 b{quad.p_prime.p0 - quad.q_prime.p0,
               quad.p_prime.p[0] - quad.q_prime.p[0],
               quad.p_prime.p[1] - quad.q_prime.p[1],
               quad.p_prime.p[2] - quad.q_prime.p[2]};
  return minkowski_product(a, b) / g2;
}

double moller_velocity(const FourMomentum& p, const FourMomentum& q) {
  const Vec3 u = (1.0 / p.p0) * p.p;
  const Vec3 v = (1.0 / q.p0) * q.p;
  const Vec3 d = u - v;
  const Vec3 x = cross(u, v);
  return std::sqrt(clamp_radicand(dot(d, d) - dot(x, x), "Moller velocity"));
}

double cross_section(double g, double theta) { return g * std::sin(theta); }

Vec4 apply(const Mat4& m, const Vec4& v) {
  Vec4 r{};
  for (int i = 0; i < 4; ++i)
    r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2] + m[i][3] * v[3];
  return r;
}

Mat4 lorentz_boost(const FourMomentum& p, const FourMomentum& pp) {
  const double gbar2 = g_squared(p, pp);
  if (!(gbar2 > 0.0))
    throw Error(ErrorKind::DegenerateGeometry, "boost with p = p'");
  const double gbar = std::sqrt(gbar2);
  const double rsbar = std::sqrt(gbar2 + 4.0);

  // Orthonormal tetrad; row a of the boost is <E_a, .> with the metric sign
  // folded in.
  const Vec4 e0{(p.p0 + pp.p0) / rsbar, (p.p[0] + pp.p[0]) / rsbar,
                (p.p[1] + pp.p[1]) / rsbar, (p.p[2] + pp.p[2]) / rsbar};
  const Vec4 e3{-(p.p0 - pp.p0) / gbar, -(p.p[0] - pp.p[0]) / gbar,
                -(p.p[1] - pp.p[1]) / gbar, -(p.p[2] - pp.p[2]) / gbar};

  const Vec3 x = cross(p.p, pp.p);
  const double xn = norm(x);
  const bool collinear = xn < 1e-12;
  Vec3 n;
  if (!collinear) {
    n = (1.0 / xn) * x;
  } else {
    // Any unit vector normal to the common line.
    Vec3 d = p.p - pp.p;
    if (norm(d) == 0.0) d = norm(p.p) > 0.0 ? p.p : pp.p;
    if (norm(d) == 0.0) d = {0.0, 0.0, 1.0};
    const Vec3 axis = std::fabs(d[0]) < std::fabs(d[1])
                          ? (std::fabs(d[0]) < std::fabs(d[2]) ? Vec3{1, 0, 0} : Vec3{0, 0, 1})
                          : (std::fabs(d[1]) < std::fabs(d[2]) ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    n = cross(d, axis);
    const double nn = norm(n);
    if (nn == 0.0)
      throw Error(ErrorKind::CollinearGeometry, "cannot build normal direction");
    n = (1.0 / nn) * n;
  }
  const Vec4 e2{0.0, n[0], n[1], n[2]};

  // Complete the tetrad from the candidate with the largest residual.
  Vec4 e1{};
  double best = -1.0;
  for (int k = 0; k < 4; ++k) {
    Vec4 v{};
    v[k] = 1.0;
    const double a0 = minkowski_product(v, e0);
    const double a2 = minkowski_product(v, e2);
    const double a3 = minkowski_product(v, e3);
    for (int i = 0; i < 4; ++i) v[i] += a0 * e0[i] - a2 * e2[i] - a3 * e3[i];
    const double nv = minkowski_product(v, v);
    if (nv > best) {
      best = nv;
      e1 = v;
    }
  }
  if (!(best > 0.0))
    throw Error(ErrorKind::CollinearGeometry, "tetrad completion failed");
  const double inv = 1.0 / std::sqrt(best);
  for (double& v : e1) v *= inv;

  auto row = [](const Vec4& e, bool timelike) {
    if (timelike) return std::array<double, 4>{e[0], -e[1], -e[2], -e[3]};
    return std::array<double, 4>{-e[0], e[1], e[2], e[3]};
  };
  Mat4 L{row(e0, true), row(e1, false), row(e2, false), row(e3, false)};

  bool flip;
  if (!collinear) {
    flip = L[1][0] < 0.0;
  } else {
    // Fix orientation through the determinant instead.
    double det = 0.0;
    const auto& m = L;
    auto minor3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
      return m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) -
             m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0]) +
             m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
    };
    det = m[0][0] * minor3(1, 2, 3, 1, 2, 3) - m[0][1] * minor3(1, 2, 3, 0, 2, 3) +
          m[0][2] * minor3(1, 2, 3, 0, 1, 3) - m[0][3] * minor3(1, 2, 3, 0, 1, 2);
    flip = det < 0.0;
  }
  if (flip)
    for (double& v : L[1]) v = -v;
  return L;
}

}  // namespace rqbe::kinematics
