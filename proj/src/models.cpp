#include "laxmono/models.hpp"

#include <cmath>
#include <stdexcept>

#include "laxmono/error.hpp"

namespace laxmono {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kPi = 3.141592653589793;
constexpr Complex kI{0.0, 1.0};

// Coefficients of p(lambda - c) given those of p(u), lowest degree first.
std::array<double, 5> taylor_shift(const std::array<double, 5>& u, double c) {
  static constexpr double binom[5][5] = {
      {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
  std::array<double, 5> out{};
  for (int n = 0; n < 5; ++n)
    for (int j = 0; j <= n; ++j) out[j] += u[n] * binom[n][j] * std::pow(-c, n - j);
  return out;
}

// Maximiser of a smooth function on [lo, hi]: coarse grid, then golden section.
template <class F>
double argmax_1d(F f, double lo, double hi, int grid = 4000) {
  int best = 0;
  double fbest = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const double x = lo + (hi - lo) * i / grid;
    const double fx = f(x);
    if (fx > fbest) {
      fbest = fx;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / grid;
  double b = lo + (hi - lo) * std::min(best + 1, grid) / grid;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  const double xg = lo + (hi - lo) * best / grid;
  return f(xm) >= f(xg) ? xm : xg;
}

// ---------------------------------------------------------------------------

class JaynesCummings final : public Model {
 public:
  explicit JaynesCummings(const JCParams& p) : p_(p) {
    if (p.g == 0.0 || !std::isfinite(p.g)) throw std::invalid_argument("JC: g must be nonzero");
    if (!(p.S0 > 0.0)) throw std::invalid_argument("JC: S0 must be positive");
  }

  const JCParams& params() const { return p_; }

  ModelKind kind() const override { return ModelKind::JaynesCummings; }
  std::string name() const override { return "jc"; }
  std::size_t dim() const override { return 5; }

  double constraint_residual(const PhaseState& s) const override {
    return std::abs(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] - p_.S0 * p_.S0);
  }

  void project(PhaseState& s) const override {
    if (constraint_residual(s) <= 1e-9) return;
    const double n = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    for (int i = 0; i < 3; ++i) s[i] *= p_.S0 / n;
  }

  EMValue energy_momentum(const PhaseState& s) const override {
    const double n = 0.5 * (s[3] * s[3] + s[4] * s[4]);
    const double h = 2.0 * p_.omega0 * s[2] + p_.omega * n + p_.g * kSqrt2 * (s[3] * s[0] - s[4] * s[1]);
    return {h, s[2] + n};
  }

  void vector_field(const PhaseState& s, PhaseState& ds) const override {
    const double gx = p_.g * kSqrt2 * s[3];
    const double gy = -p_.g * kSqrt2 * s[4];
    const double gz = 2.0 * p_.omega0;
    ds.resize(5);
    ds[0] = gy * s[2] - gz * s[1];
    ds[1] = gz * s[0] - gx * s[2];
    ds[2] = gx * s[1] - gy * s[0];
    ds[3] = p_.omega * s[4] - p_.g * kSqrt2 * s[1];
    ds[4] = -p_.omega * s[3] - p_.g * kSqrt2 * s[0];
  }

  Quartic spectral_coeffs(double h, double k) const override {
    // In u = lambda - omega0, with d = 2 omega0 - omega:
    // ((2u + d)^2 u^2 + 4 g^2 K u^2 + 2 g^2 (H - omega K) u) / g^4 + S0^2.
    const double g2 = p_.g * p_.g, g4 = g2 * g2;
    const double d = 2.0 * p_.omega0 - p_.omega;
    const std::array<double, 5> u = {p_.S0 * p_.S0, 2.0 * (h - p_.omega * k) / g2,
                                     d * d / g4 + 4.0 * k / g2, 4.0 * d / g4, 4.0 / g4};
    const auto c = taylor_shift(u, p_.omega0);
    return Quartic::real(c[0], c[1], c[2], c[3], c[4]);
  }

  Complex angle_carrier(const PhaseState& s) const override { return Complex(s[3], -s[4]) / kSqrt2; }

  ReducedPoint reduce(const PhaseState& s) const override {
    const Complex splus(s[0], s[1]);
    const Complex lam = p_.omega0 - 0.5 * p_.g * splus / angle_carrier(s);
    const Complex mu = ((2.0 * lam - p_.omega) * (lam - p_.omega0) + p_.g * p_.g * s[2]) / (p_.g * p_.g);
    return {lam, mu};
  }

  Complex theta_dot(Complex lam) const override { return p_.omega + 2.0 * p_.omega0 - 2.0 * lam; }
  Complex lambda_dot(const ReducedPoint& r) const override { return kI * p_.g * p_.g * r.mu; }

  OneFormCoeffs rotation_one_form() const override {
    const Complex ig2 = kI * p_.g * p_.g;
    return {-2.0 / ig2, (p_.omega + 2.0 * p_.omega0) / ig2, true};
  }

  EMValue critical_value() const override { return {2.0 * p_.omega0 * p_.S0, p_.S0}; }
  PhaseState fixed_point() const override { return {0.0, 0.0, p_.S0, 0.0, 0.0}; }

  // Slice b = beta >= 0 real; Sx follows from H, Sy from the Casimir, and Sz
  // is chosen to maximise Sy^2.
  PhaseState seed_state(double h, double k) const override {
    const double hi = std::min(p_.S0, k);
    if (!(hi > -p_.S0))
      throw Error(ErrorKind::FiberEmpty, "JC: no spin state with Sz < k");
    auto sx_of = [&](double sz) {
      const double beta = std::sqrt(k - sz);
      return (h - 2.0 * p_.omega0 * sz - p_.omega * (k - sz)) / (2.0 * p_.g * beta);
    };
    auto f = [&](double sz) {
      if (sz >= k) return -std::numeric_limits<double>::infinity();
      const double sx = sx_of(sz);
      return p_.S0 * p_.S0 - sz * sz - sx * sx;
    };
    const double span = hi + p_.S0;
    const double sz = argmax_1d(f, -p_.S0, hi - 1e-9 * span);
    const double fy = f(sz);
    if (!(fy >= 0.0))
      throw Error(ErrorKind::FiberEmpty, "JC: slice search found no point with Sy^2 >= 0");
    return {sx_of(sz), std::sqrt(fy), sz, kSqrt2 * std::sqrt(k - sz), 0.0};
  }

  double t_char() const override { return 2.0 * kPi / (p_.omega + 2.0 * p_.omega0); }

 private:
  JCParams p_;
};

// ---------------------------------------------------------------------------

class SphericalPendulum final : public Model {
 public:
  ModelKind kind() const override { return ModelKind::SphericalPendulum; }
  std::string name() const override { return "sp"; }
  std::size_t dim() const override { return 6; }

  double constraint_residual(const PhaseState& s) const override {
    const double qq = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
    const double qp = s[0] * s[3] + s[1] * s[4] + s[2] * s[5];
    return std::max(std::abs(qq - 1.0), std::abs(qp));
  }

  void project(PhaseState& s) const override {
    const double n = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    for (int i = 0; i < 3; ++i) s[i] /= n;
    const double qp = s[0] * s[3] + s[1] * s[4] + s[2] * s[5];
    for (int i = 0; i < 3; ++i) s[3 + i] -= qp * s[i];
  }

  EMValue energy_momentum(const PhaseState& s) const override {
    const double pp = s[3] * s[3] + s[4] * s[4] + s[5] * s[5];
    return {0.5 * pp + s[2], s[0] * s[4] - s[1] * s[3]};
  }

  void vector_field(const PhaseState& s, PhaseState& ds) const override {
    const double pp = s[3] * s[3] + s[4] * s[4] + s[5] * s[5];
    const double c = pp - s[2];
    ds.resize(6);
    ds[0] = s[3];
    ds[1] = s[4];
    ds[2] = s[5];
    ds[3] = -c * s[0];
    ds[4] = -c * s[1];
    ds[5] = -1.0 - c * s[2];
  }

  Quartic spectral_coeffs(double h, double k) const override {
    return Quartic::real(1.0, 0.0, 2.0 * h, -2.0 * k, 1.0);
  }

  Complex angle_carrier(const PhaseState& s) const override {
    const double kx = s[1] * s[5] - s[2] * s[4];
    const double ky = s[2] * s[3] - s[0] * s[5];
    return {kx, ky};
  }

  ReducedPoint reduce(const PhaseState& s) const override {
    const Complex lam = Complex(s[0], s[1]) / angle_carrier(s);
    const double kz = s[0] * s[4] - s[1] * s[3];
    return {lam, s[2] - lam * kz + lam * lam};
  }

  Complex theta_dot(Complex lam) const override { return lam; }
  Complex lambda_dot(const ReducedPoint& r) const override { return -kI * r.mu; }
  OneFormCoeffs rotation_one_form() const override { return {kI, 0.0, true}; }

  EMValue critical_value() const override { return {1.0, 0.0}; }
  PhaseState fixed_point() const override { return {0.0, 0.0, 1.0, 0.0, 0.0, 0.0}; }

  // Azimuth zero, polar angle maximising p_theta^2 in the effective potential.
  PhaseState seed_state(double h, double k) const override {
    auto f = [&](double th) {
      const double st = std::sin(th);
      return 2.0 * (h - std::cos(th)) - k * k / (st * st);
    };
    const double eps = 1e-6;
    const double th = argmax_1d(f, eps, kPi - eps);
    const double pt2 = f(th);
    if (!(pt2 >= 0.0))
      throw Error(ErrorKind::FiberEmpty, "SP: effective potential exceeds the energy everywhere");
    const double pt = std::sqrt(pt2);
    const double st = std::sin(th), ct = std::cos(th);
    return {st, 0.0, ct, pt * ct, k / st, -pt * st};
  }
};

// ---------------------------------------------------------------------------

class QuasiLax final : public Model {
 public:
  explicit QuasiLax(const QuasiParams& p) : p_(p) {
    if (!(p.R > 0.0)) throw std::invalid_argument("Quasi: R must be positive");
  }

  const QuasiParams& params() const { return p_; }

  ModelKind kind() const override { return ModelKind::QuasiLax; }
  std::string name() const override { return "quasi"; }
  std::size_t dim() const override { return 4; }

  EMValue energy_momentum(const PhaseState& s) const override {
    const double h = 2.0 * (s[0] * s[2] - s[1] * s[3]);
    const double k = s[2] * s[2] + s[3] * s[3] - s[0] * s[0] - s[1] * s[1];
    return {h, k};
  }

  void vector_field(const PhaseState& s, PhaseState& ds) const override {
    ds.resize(4);
    ds[0] = -s[3];
    ds[1] = -s[2];
    ds[2] = -s[1];
    ds[3] = -s[0];
  }

  Quartic spectral_coeffs(double h, double k) const override {
    return Quartic::real(1.0, -h, 2.0 + k, 0.0, 1.0);
  }

  Complex angle_carrier(const PhaseState& s) const override { return {s[2], -s[3]}; }

  ReducedPoint reduce(const PhaseState& s) const override {
    const Complex lam = -Complex(s[0], s[1]) / angle_carrier(s);
    const double aa = s[0] * s[0] + s[1] * s[1];
    return {lam, lam * lam + 1.0 - 0.5 * aa};
  }

  Complex theta_dot(Complex lam) const override { return -lam; }
  Complex lambda_dot(const ReducedPoint& r) const override { return kI * (1.0 + r.lam * r.lam); }
  OneFormCoeffs rotation_one_form() const override { return {kI, 0.0, false}; }

  EMValue critical_value() const override { return {0.0, 0.0}; }
  PhaseState fixed_point() const override { return {0.0, 0.0, 0.0, 0.0}; }

  // a, b real: 2 a b = h, b^2 - a^2 = k (the point of the orbit closest to the origin).
  PhaseState seed_state(double h, double k) const override {
    const double r = std::hypot(h, k);
    if (r == 0.0) throw Error(ErrorKind::FiberEmpty, "Quasi: (0,0) is the critical fiber");
    double a, b;
    if (k >= 0.0) {
      b = std::sqrt(0.5 * (k + r));
      a = h / (2.0 * b);
    } else {
      a = std::copysign(std::sqrt(0.5 * (r - k)), h == 0.0 ? 1.0 : h);
      b = h / (2.0 * a);
    }
    return {a, 0.0, b, 0.0};
  }

  double t_char() const override { return 1.0; }

 private:
  QuasiParams p_;
};

}  // namespace

ModelHandle make_jaynes_cummings(const JCParams& p) { return std::make_shared<JaynesCummings>(p); }
ModelHandle make_spherical_pendulum() { return std::make_shared<SphericalPendulum>(); }
ModelHandle make_quasi_lax(const QuasiParams& p) { return std::make_shared<QuasiLax>(p); }

const JCParams* jc_params(const Model& m) {
  const auto* jc = dynamic_cast<const JaynesCummings*>(&m);
  return jc ? &jc->params() : nullptr;
}

const QuasiParams* quasi_params(const Model& m) {
  const auto* q = dynamic_cast<const QuasiLax*>(&m);
  return q ? &q->params() : nullptr;
}

namespace {
void check_state(const Model& m, const PhaseState& s) {
  if (s.size() != m.dim())
    throw Error(ErrorKind::ConstraintViolation,
                m.name() + ": state has " + std::to_string(s.size()) + " components, expected " +
                    std::to_string(m.dim()));
  const double r = m.constraint_residual(s);
  if (!(r <= 1e-6))
    throw Error(ErrorKind::ConstraintViolation, m.name() + ": constraint residual " + std::to_string(r));
}
}  // namespace

EMValue em_map(const Model& m, const PhaseState& s) {
  check_state(m, s);
  return m.energy_momentum(s);
}

PhaseState hamiltonian_vector_field(const Model& m, const PhaseState& s) {
  check_state(m, s);
  PhaseState ds;
  m.vector_field(s, ds);
  return ds;
}

ReducedPoint reduce(const Model& m, const PhaseState& s) {
  if (s.size() != m.dim()) throw Error(ErrorKind::ConstraintViolation, m.name() + ": wrong state size");
  if (std::abs(m.angle_carrier(s)) < 1e-12)
    throw Error(ErrorKind::AtInfinity, m.name() + ": lambda-tilde denominator vanishes");
  return m.reduce(s);
}

}  // namespace laxmono
