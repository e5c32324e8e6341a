#include "laxmono/normalform.hpp"

#include <cmath>
#include <stdexcept>

#include "laxmono/error.hpp"

namespace laxmono {

std::array<Complex, 5> affine_substitute(const std::array<Complex, 5>& c, Complex alpha, Complex beta) {
  static constexpr double binom[5][5] = {
      {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
  std::array<Complex, 5> out{};
  for (int n = 0; n < 5; ++n) {
    Complex bj = 1.0;
    for (int j = 0; j <= n; ++j) {
      out[j] += c[n] * binom[n][j] * std::pow(alpha, n - j) * bj;
      bj *= beta;
    }
  }
  return out;
}

Complex critical_double_root(const Model& m) {
  const EMValue cv = m.critical_value();
  const Quartic q = m.spectral_coeffs(cv.h, cv.k);
  const RootSet r = solve_quartic(q);

  Complex sum = 0.0;
  int n = 0;
  for (const auto& z : r.roots)
    if (z.imag() > 0.0) {
      sum += z;
      ++n;
    }
  if (n != 2)
    throw Error(ErrorKind::NonGeneric, m.name() + ": critical quartic has no pair of upper half-plane roots");
  Complex z = sum / 2.0;
  const double scale = 1.0 + std::abs(z);
  for (const auto& w : r.roots)
    if (w.imag() > 0.0 && std::abs(w - z) > 1e-4 * scale)
      throw Error(ErrorKind::NonGeneric, m.name() + ": critical quartic has no non-real double root");

  // A double root is a simple root of Q'.
  Quartic dq;
  for (int i = 0; i < 4; ++i) dq.a[i] = static_cast<double>(i + 1) * q.a[i + 1];
  for (int it = 0; it < 20; ++it) {
    const Complex f = eval_poly(dq, z);
    const Complex df = 2.0 * q.a[2] + z * (12.0 * q.a[4] * z + 6.0 * q.a[3]);
    if (df == Complex{}) break;
    const Complex step = f / df;
    z -= step;
    if (std::abs(step) < 1e-16 * scale) break;
  }
  return z;
}

NormalFormResult normalize_quartic(const Quartic& q, Complex lambda0) {
  for (const auto& c : q.a)
    if (c.imag() != 0.0) throw std::invalid_argument("normalize_quartic: coefficients must be real");
  if (!(lambda0.imag() != 0.0)) throw std::invalid_argument("normalize_quartic: lambda0 must be non-real");

  NormalFormResult nf;
  nf.shift0 = lambda0.real();
  nf.scale0 = lambda0.imag();
  const auto c1 = affine_substitute(q.a, nf.shift0, nf.scale0);
  nf.sigma = -c1[3].real() / (4.0 * c1[4].real());
  const auto c2 = affine_substitute(c1, nf.sigma, 1.0);
  const double a4 = c2[4].real();
  const double ratio = c2[0].real() / a4;
  if (!(ratio > 0.0))
    throw Error(ErrorKind::BranchFailure, "a0/a4 = " + std::to_string(ratio) + " after removing the cubic term");
  nf.s = std::pow(ratio, 0.25);
  nf.u = a4 * nf.s * nf.s * nf.s * nf.s;
  nf.a = c2[2].real() / (a4 * nf.s * nf.s);
  nf.b = c2[1].real() / (a4 * nf.s * nf.s * nf.s);
  return nf;
}

Quartic reconstruct_quartic(const NormalFormResult& nf) {
  const std::array<Complex, 5> n = {nf.u, nf.u * nf.b, nf.u * nf.a, 0.0, nf.u};
  const double m = nf.scale0 * nf.s;
  const double c = nf.shift0 + nf.scale0 * nf.sigma;
  Quartic q(affine_substitute(n, -c / m, 1.0 / m));
  for (auto& x : q.a) x = x.real();
  q.real_coeffs = true;
  return q;
}

std::pair<double, double> F_map(const Model& m, double h, double k) {
  const NormalFormResult nf = normalize_quartic(m.spectral_coeffs(h, k), critical_double_root(m));
  return {nf.hhat(), nf.khat()};
}

GenericityReport jacobian_F(const Model& m, double step) {
  const EMValue cv = m.critical_value();
  if (!(step > 0.0)) step = 1e-5 * (std::abs(cv.h) + std::abs(cv.k) + 1.0);
  const Complex l0 = critical_double_root(m);
  auto F = [&](double h, double k) {
    const NormalFormResult nf = normalize_quartic(m.spectral_coeffs(h, k), l0);
    return std::array<double, 2>{nf.hhat(), nf.khat()};
  };

  GenericityReport rep;
  const auto fhp = F(cv.h + step, cv.k), fhm = F(cv.h - step, cv.k);
  const auto fkp = F(cv.h, cv.k + step), fkm = F(cv.h, cv.k - step);
  for (int i = 0; i < 2; ++i) {
    rep.D[i][0] = (fhp[i] - fhm[i]) / (2.0 * step);
    rep.D[i][1] = (fkp[i] - fkm[i]) / (2.0 * step);
  }
  rep.det = rep.D[0][0] * rep.D[1][1] - rep.D[0][1] * rep.D[1][0];
  rep.orientation = rep.det < 0.0 ? -1 : 1;
  rep.pass = std::abs(rep.det) > 1e-8;
  return rep;
}

GenericityReport genericity_check(const Model& m) {
  GenericityReport rep = jacobian_F(m);
  if (!rep.pass)
    throw Error(ErrorKind::NonGeneric, m.name() + ": |det D| = " + std::to_string(std::abs(rep.det)));
  return rep;
}

}  // namespace laxmono
