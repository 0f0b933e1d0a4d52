#include "rqbe/reduced_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "linalg.hpp"
#include "rqbe/error.hpp"
#include "rqbe/grid.hpp"

namespace rqbe::reduced {

namespace kin = rqbe::kinematics;
using kin::FourMomentum;
using kin::Vec4;

namespace {

// Asymptotic series of sqrt(2 pi y) exp(-y) I_0(y), summed until the terms
// stop decreasing.
double asymptotic_sum(double y) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * y);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * y);
}

}  // namespace

double bessel_I0_scaled(double y) {
  if (!(y >= 0.0)) throw Error(ErrorKind::Domain, "bessel_I0 needs y >= 0");
  if (y <= 15.0) return std::exp(-y) * bessel_I0(y);
  return asymptotic_sum(y);
}

double bessel_I0(double y) {
  if (!(y >= 0.0)) throw Error(ErrorKind::Domain, "bessel_I0 needs y >= 0");
  if (y <= 15.0) {
    const double q = 0.25 * y * y;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sum;
  }
  return std::exp(y) * asymptotic_sum(y);
}

namespace {

double checked_D(double R, double r) {
  if (!(r >= 0.0) || !(R > r)) throw Error(ErrorKind::Domain, "closed forms need R > r >= 0");
  return (R - r) * (R + r);
}

double form_I(double D) {
  const double sd = std::sqrt(D);
  return std::exp(-sd) / sd;
}

double form_II(double R, double D) {
  const double sd = std::sqrt(D);
  return R / D * (1.0 + 1.0 / sd) * std::exp(-sd);
}

}  // namespace

double closed_form_I(double R, double r) { return form_I(checked_D(R, r)); }

double closed_form_II(double R, double r) { return form_II(R, checked_D(R, r)); }

ReducedGeometry ReducedGeometry::make(const FourMomentum& p, const FourMomentum& p_prime) {
  const double gb2 = kin::g_squared(p, p_prime);
  if (!(gb2 > 0.0))
    throw Error(ErrorKind::DegenerateGeometry, "reduced geometry needs p != p'");
  ReducedGeometry g;
  g.p = p;
  g.p_prime = p_prime;
  g.gbar = std::sqrt(gb2);
  g.sbar = gb2 + 4.0;
  g.R = 0.5 * (p.p0 + p_prime.p0);
  g.r = norm(cross(p.p, p_prime.p)) / g.gbar;
  const Vec3 d = p.p - p_prime.p;
  g.D = dot(d, d) * g.sbar / (4.0 * gb2);
  return g;
}

namespace {

// Gauss-Legendre rule on [0, 1], shared by every panel.
struct Rule {
  std::vector<double> x, w;
  Rule() {
    gauss_legendre(32, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = 0.5 * (x[i] + 1.0);
      w[i] *= 0.5;
    }
  }
};

const Rule& rule() {
  static const Rule r;
  return r;
}

template <class F>
double panel(F& f, double a, double b) {
  const Rule& q = rule();
  double s = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * f(a + (b - a) * q.x[i]);
  return (b - a) * s;
}

template <class F>
double adapt(F& f, double a, double b, double whole, double abs_tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = panel(f, a, m), right = panel(f, m, b);
  if (depth <= 0 || std::fabs(left + right - whole) <= abs_tol) return left + right;
  return adapt(f, a, m, left, abs_tol, depth - 1) + adapt(f, m, b, right, abs_tol, depth - 1);
}

// Adaptive composite Gauss-Legendre on [0, ymax]: 16 uniform panels set the
// scale, each is then bisected until halves agree to 1e-14 of the total.
// The tolerance is not split between halves: it sits just above roundoff.
template <class F>
double integrate_y(F f, double ymax) {
  constexpr int kPanels = 16;
  double coarse[kPanels];
  double total = 0.0;
  const double h = ymax / kPanels;
  for (int k = 0; k < kPanels; ++k) {
    coarse[k] = panel(f, k * h, (k + 1) * h);
    total += std::fabs(coarse[k]);
  }
  double sum = 0.0;
  for (int k = 0; k < kPanels; ++k)
    sum += adapt(f, k * h, (k + 1) * h, coarse[k], 1e-14 * total, 12);
  return sum;
}

// Upper end of the y range: the envelope y (1 + sqrt(y^2+1)) exp(-R sqrt(y^2+1) + r y)
// has dropped 37 e-folds (1e-16) below its maximum.
double y_cutoff(double R, double r) {
  auto env = [&](double y) {
    const double t = std::sqrt(y * y + 1.0);
    return std::log(y) + std::log1p(t) - R * t + r * y;
  };
  const double ypk = std::max(1.0, r / std::sqrt((R - r) * (R + r)));
  double best = env(ypk), y = ypk;
  for (double t = ypk / 8.0; t < ypk; t *= 2.0) best = std::max(best, env(t));
  for (int it = 0; it < 2000; ++it) {
    y *= 1.25;
    const double v = env(y);
    best = std::max(best, v);
    if (v < best - 37.0) break;
  }
  return y;
}

// Periodic trapezoid over phi of exp(z (cos phi - 1)); terms below e^-50 of
// the phi = 0 term are dropped.
double phi_sum(double z) {
  const int n = std::max(16, 2 * static_cast<int>(std::ceil(std::sqrt(25.0 * z))) + 8);
  const double dphi = 2.0 * std::numbers::pi / n;
  double s = 1.0;
  for (int k = 1; k <= n / 2; ++k) {
    const double sh = std::sin(0.5 * k * dphi);
    const double e = 2.0 * z * sh * sh;
    if (e > 50.0) break;
    s += (k == n / 2 ? 1.0 : 2.0) * std::exp(-e);
  }
  return s * dphi;
}

}  // namespace

double reduced_B(const FourMomentum& p, const FourMomentum& p_prime, double a,
                 HalfAngle kernel) {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidParams, "decay rate a must be positive");
  const ReducedGeometry geo = ReducedGeometry::make(p, p_prime);
  const double R = a * geo.R, r = a * geo.r;
  const double gb2 = geo.gbar * geo.gbar, sb = geo.sbar;
  const bool exact = kernel == HalfAngle::Exact;

  auto integrand = [&](double y) {
    if (y <= 0.0) return 0.0;
    const double t = std::sqrt(y * y + 1.0);
    // g_lambda^2 - gbar^2 = (sbar/2)(sqrt(y^2+1) - 1), written without cancellation.
    const double excess = 0.5 * sb * y * y / (t + 1.0);
    const double half_cos = exact ? std::sqrt(excess / (gb2 + excess)) : 1.0;
    const double z = r * y;
    return y / t * (1.0 + t) * half_cos * std::exp(z - R * t) * phi_sum(z);
  };
  const double J = std::exp(-0.5 * a * (p_prime.p0 - p.p0));
  return 0.25 * sb * std::sqrt(sb) * J * integrate_y(integrand, y_cutoff(R, r));
}

double simplified_bound_constant(double a) {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidParams, "decay rate a must be positive");
  return std::numbers::pi * (2.0 + 1.0 / a) / a;
}

BUpper B_upper(const FourMomentum& p, const FourMomentum& p_prime, double a) {
  const ReducedGeometry geo = ReducedGeometry::make(p, p_prime);
  if (!(geo.R > geo.r)) throw Error(ErrorKind::Domain, "B_upper needs R > r");
  const double R = a * geo.R, D = a * a * geo.D;
  const double sd = std::sqrt(D);
  const double J = std::exp(-0.5 * a * (p_prime.p0 - p.p0));
  BUpper b;
  b.constant = simplified_bound_constant(a);
  b.chain = 0.5 * std::numbers::pi * geo.sbar * std::sqrt(geo.sbar) * J *
            (1.0 / sd + R / D + R / (D * sd)) * std::exp(-sd);
  b.simplified = b.constant * std::sqrt(geo.sbar) * (p.p0 + p_prime.p0);
  return b;
}

int OnShellReport::failures() const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

int OnShellReport::skipped() const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.skipped; }));
}

namespace {

Vec4 add(const Vec4& a, const Vec4& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}; }
Vec4 sub(const Vec4& a, const Vec4& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }
double amax(const Vec4& a) {
  return std::max({std::fabs(a[0]), std::fabs(a[1]), std::fabs(a[2]), std::fabs(a[3])});
}

struct Recorder {
  OnShellReport& out;
  double tol;
  void check(const std::string& name, double lhs, double rhs, double scale) {
    IdentityCheck c;
    c.name = name;
    c.error = std::fabs(lhs - rhs) / std::max(scale, 1e-300);
    c.passed = c.error <= tol;
    out.checks.push_back(c);
  }
  void skip(const std::string& name) {
    IdentityCheck c;
    c.name = name;
    c.skipped = true;
    out.checks.push_back(c);
  }
};

}  // namespace

OnShellReport on_shell_identity_suite(const kin::PrePostQuadruple& quad, double tol) {
  OnShellReport rep;
  Recorder rec{rep, tol};
  const FourMomentum &p = quad.p, &q = quad.q, &pp = quad.p_prime, &qp = quad.q_prime;
  const Vec4 P = kin::four(p), Q = kin::four(q), Pp = kin::four(pp), Qp = kin::four(qp);
  // Every g^2-type quantity is bounded by the squared total energy.
  const double S = (p.p0 + q.p0) * (p.p0 + q.p0);

  const double g2 = kin::g_squared(p, q);
  const double gb2 = kin::g_squared(p, pp);
  const double gt2 = kin::g_squared(p, qp);
  rec.check("g(p,q)=g(p',q')", kin::g_squared(pp, qp), g2, S);
  rec.check("gbar(p,p')=gbar(q,q')", kin::g_squared(q, qp), gb2, S);
  rec.check("gtilde(p,q')=gtilde(p',q)", kin::g_squared(pp, q), gt2, S);
  rec.check("g^2=gbar^2+gtilde^2", g2, gb2 + gt2, S);
  rec.check("gbar^2 minkowski form",
            gb2, -0.5 * kin::minkowski_product(add(P, Qp), sub(sub(add(Q, Pp), P), Qp)), S);
  rec.check("gtilde^2 minkowski form",
            gt2, -0.5 * kin::minkowski_product(add(P, Pp), sub(sub(add(Q, Qp), P), Pp)), S);

  if (g2 > 0.0) {
    const double c = kin::scattering_cos_theta(quad);
    rec.check("cos theta=1-2gbar^2/g^2", c, 1.0 - 2.0 * gb2 / g2, 1.0);
    // sigma = g sin(theta) = 2 gbar cos(theta/2), compared squared so theta ~ 0
    // does not lose half the digits to a square root.
    rec.check("half angle sigma", g2 * (1.0 - c) * (1.0 + c), 2.0 * gb2 * (1.0 + c), g2);
  } else {
    rec.skip("cos theta=1-2gbar^2/g^2");
    rec.skip("half angle sigma");
  }

  // Change of variables qbar = q + q', qbar' = q - q'.
  const Vec4 qb = add(Q, Qp), qbp = sub(Q, Qp);
  const double sb = gb2 + 4.0;
  const double E2 = qb[0] * qb[0];
  rec.check("qbar mass shell", kin::minkowski_product(qb, qb), -sb, E2);
  rec.check("qbar.qbar'=0", kin::minkowski_product(qb, qbp), 0.0, E2);
  rec.check("qbar'=p'-p", amax(sub(qbp, sub(Pp, P))), 0.0, qb[0]);
  rec.check("g_c^2 from qbar",
            gb2 - 0.5 * kin::minkowski_product(add(P, Pp), sub(sub(qb, P), Pp)), g2, S);
  {
    const Vec4 q1{0.5 * (qb[0] + qbp[0]), 0.5 * (qb[1] + qbp[1]), 0.5 * (qb[2] + qbp[2]),
                  0.5 * (qb[3] + qbp[3])};
    const Vec4 q2{0.5 * (qb[0] - qbp[0]), 0.5 * (qb[1] - qbp[1]), 0.5 * (qb[2] - qbp[2]),
                  0.5 * (qb[3] - qbp[3])};
    const double err = std::max(amax(sub(q1, Q)), amax(sub(q2, Qp)));
    IdentityCheck c{"round trip (q,q')->(qbar,qbar')->(q,q')", err / std::max(Q[0], Qp[0]), true,
                    false};
    c.passed = c.error <= std::min(tol, 1e-12);
    rep.checks.push_back(c);
    // Linear map (q, q') -> (qbar, qbar') on R^8; its determinant is 16 in
    // absolute value, so the inverse Jacobian is 1/16.
    double m[64] = {};
    for (int k = 0; k < 4; ++k) {
      m[k * 8 + k] = 1.0;
      m[k * 8 + 4 + k] = 1.0;
      m[(4 + k) * 8 + k] = 1.0;
      m[(4 + k) * 8 + 4 + k] = -1.0;
    }
    rec.check("jacobian 1/16", 1.0 / std::fabs(linalg::determinant(m, 8)), 1.0 / 16.0, 1.0 / 16.0);
  }

  const double cross_pp = norm(cross(p.p, pp.p));
  const bool boost_ok = gb2 > 0.0 && cross_pp > 1e-12 * (1.0 + dot(p.p, p.p) + dot(pp.p, pp.p));
  const char* boost_names[] = {"boost p+p'", "boost p-p'", "boost minkowski", "boost U column",
                               "boosted qbar^3=0", "g_lambda^2 from boosted qbar"};
  if (!boost_ok) {
    for (const char* n : boost_names) rec.skip(n);
    return rep;
  }
  const kin::Mat4 L = kin::lorentz_boost(p, pp);
  double lmax = 0.0;
  for (const auto& row : L)
    for (double x : row) lmax = std::max(lmax, std::fabs(x));
  const double gb = std::sqrt(gb2), rsb = std::sqrt(sb);
  const Vec4 sum = kin::apply(L, add(P, Pp)), diff = kin::apply(L, sub(P, Pp));
  rec.check(boost_names[0], amax(sub(sum, {rsb, 0.0, 0.0, 0.0})), 0.0, lmax * amax(add(P, Pp)));
  rec.check(boost_names[1], amax(sub(diff, {0.0, 0.0, 0.0, -gb})), 0.0,
            lmax * amax(sub(P, Pp)));
  const double before = kin::minkowski_product(Q, Qp);
  rec.check(boost_names[2], kin::minkowski_product(kin::apply(L, Q), kin::apply(L, Qp)), before,
            lmax * lmax * Q[0] * Qp[0]);
  const Vec4 U = kin::apply(L, {1.0, 0.0, 0.0, 0.0});
  const Vec4 U_expect{(p.p0 + pp.p0) / rsb, 2.0 * cross_pp / (gb * rsb), 0.0,
                      (p.p0 - pp.p0) / gb};
  rec.check(boost_names[3], amax(sub(U, U_expect)), 0.0, lmax);
  const Vec4 lq = kin::apply(L, qb);
  rec.check(boost_names[4], lq[3], 0.0, lmax * qb[0]);
  rec.check(boost_names[5], gb2 + 0.5 * rsb * (lq[0] - rsb), g2, lmax * S);
  return rep;
}

}  // namespace rqbe::reduced
