// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "laxmono/error.hpp"
#include "laxmono/flow.hpp"
#include "laxmono/monodromy.hpp"
#include "oracles.hpp"

using namespace laxmono;

namespace {

constexpr double kPi = 3.141592653589793;
const Complex I{0.0, 1.0};

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

bool is_shear(const MonodromyMatrix& M) {
  return M.entries[0][0] == 1 && M.entries[0][1] == 1 && M.entries[1][0] == 0 && M.entries[1][1] == 1;
}

std::string matrix_str(const MonodromyMatrix& M) {
  std::ostringstream s;
  s << "[[" << M.entries[0][0] << "," << M.entries[0][1] << "],[" << M.entries[1][0] << "," << M.entries[1][1] << "]]";
  return s.str();
}

std::string fmt(double x, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

int failures = 0;

void report(int n, const std::string& title, const std::function<void(Verdict&)>& body) {
  Verdict v;
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  if (!v.pass) ++failures;
  std::printf("%s %d %s:%s\n", v.pass ? "PASS" : "FAIL", n, title.c_str(), v.detail.str().c_str());
  std::fflush(stdout);
}

void c1_jc_monodromy(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto jc = make_jaynes_cummings({1.0, 2.0, 1.0, 1.0});
  const LoopSpec loop{{2.0, 1.0}, 0.5, 512, 1};
  const MonodromyReport rep = analyze_monodromy(*jc, loop);
  const MonodromyMatrix M = monodromy_matrix(*jc, loop);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.detail << " permutation " << rep.permutation.cycle_notation() << ", matrix " << matrix_str(M) << ", " << fmt(secs)
           << " s";
  v.require(rep.permutation_ok && is_conjugate_exchange(rep.permutation, rep.track.rootsets.front()),
            "conjugate-pair double transposition");
  v.require(is_shear(M), "matrix [[1,1],[0,1]]");
  v.require(secs < 10.0, "runtime < 10 s");
}

void c2_sp_monodromy(Verdict& v) {
  const auto sp = make_spherical_pendulum();
  const LoopSpec loop{{1.0, 0.0}, 0.1, 512, 1};
  const MonodromyReport rep = analyze_monodromy(*sp, loop);
  const MonodromyMatrix M = monodromy_matrix(*sp, loop);
  v.detail << " permutation " << rep.permutation.cycle_notation() << ", matrix " << matrix_str(M);
  v.require(rep.permutation_ok, "conjugate-pair double transposition");
  v.require(is_shear(M), "matrix [[1,1],[0,1]]");
}

void c3_delta_theta(Verdict& v) {
  const double tol = 0.01 * 2 * kPi;
  const DeltaRotation jc = delta_rotation_loop(*make_jaynes_cummings(), {{2.0, 1.0}, 0.5, 64, 1});
  const DeltaRotation sp = delta_rotation_loop(*make_spherical_pendulum(), {{1.0, 0.0}, 0.1, 64, 1});
  const DeltaRotation reg = delta_rotation_loop(*make_spherical_pendulum(), {{2.0, 1.0}, 0.05, 64, 1});
  v.detail << " JC " << fmt(jc.delta) << " (orientation " << jc.traversed.orientation << "), SP " << fmt(sp.delta)
           << " (orientation " << sp.traversed.orientation << "), regular " << fmt(reg.delta) << ", 2pi = " << fmt(2 * kPi);
  v.require(std::abs(jc.delta - 2 * kPi) < tol, "JC within 1% of 2pi");
  v.require(std::abs(sp.delta - 2 * kPi) < tol, "SP within 1% of 2pi");
  v.require(std::abs(reg.delta) < tol, "regular loop within 1% of 0");
}

void c4_residues(Verdict& v) {
  double worst = 0.0, worst_expect = 0.0;
  for (const auto& [m, expect, rbig] :
       {std::tuple{make_jaynes_cummings(), 1.0 / I, 20.0}, std::tuple{make_spherical_pendulum(), -I, 10.0}}) {
    const EMValue c = m->critical_value();
    const OneFormCoeffs xi = m->rotation_one_form();
    for (int j = 0; j < 5; ++j) {
      const double phi = 2 * kPi * (j + 0.5) / 5;
      const double h = c.h + 0.15 * std::cos(phi), k = c.k + 0.15 * std::sin(phi);
      const Complex closed = residue_at_infinity(xi, m->spectral_coeffs(h, k).leading());
      worst = std::max(worst, std::abs(numeric_residue(*m, h, k, xi, rbig) - closed));
      worst_expect = std::max(worst_expect, std::abs(closed - expect));
    }
  }
  v.detail << " max |closed - quadrature| " << fmt(worst) << ", max |closed - expected| " << fmt(worst_expect);
  v.require(worst < 1e-8, "quadrature agreement");
  v.require(worst_expect < 1e-8, "JC 1/i and SP -i");
}

void c5_normal_form(Verdict& v) {
  double fmax = 0.0;
  for (const auto& m : {make_jaynes_cummings(), make_spherical_pendulum(), make_quasi_lax()}) {
    const EMValue c = m->critical_value();
    const auto [a, b] = F_map(*m, c.h, c.k);
    fmax = std::max({fmax, std::abs(a), std::abs(b)});
  }
  const GenericityReport sp = jacobian_F(*make_spherical_pendulum());
  const double want_sp[2][2] = {{0, 2}, {2, 0}};
  double sp_err = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) sp_err = std::max(sp_err, std::abs(sp.D[i][j] - want_sp[i][j]));

  const JCParams p{1.0, 2.0, 1.0, 1.0};
  const auto jcm = make_jaynes_cummings(p);
  const double im = critical_double_root(*jcm).imag();
  const double closed = std::pow(p.g, 4) *
                        (-p.g * p.g * p.S0 - p.omega0 * p.omega0 / 2 - p.omega / 2 + p.omega * p.omega / 4 + p.omega0) /
                        (4 * std::pow(im, 7));
  const double det = jacobian_F(*jcm).det;

  const auto q = make_quasi_lax();
  double qerr = 0.0;
  for (const auto& [h, k] : {std::pair{0.03, -0.02}, std::pair{-0.05, 0.04}, std::pair{0.01, 0.0}}) {
    const auto [hh, kh] = F_map(*q, h, k);
    qerr = std::max({qerr, std::abs(hh - k), std::abs(kh + h)});
  }

  v.detail << " max|F(h0,k0)| " << fmt(fmax) << "; SP D [[" << fmt(sp.D[0][0], "%.6f") << "," << fmt(sp.D[0][1], "%.6f")
           << "],[" << fmt(sp.D[1][0], "%.6f") << "," << fmt(sp.D[1][1], "%.6f") << "]]; JC det " << fmt(det, "%.8f")
           << " vs closed form " << fmt(closed, "%.8f") << "; quasi err " << fmt(qerr);
  v.require(fmax < 1e-9, "F(h0,k0) = 0");
  v.require(sp_err < 1e-6, "SP D = [[0,2],[2,0]]");
  v.require(std::abs(det - closed) < 1e-4 * std::abs(closed), "JC det D matches closed form");
  v.require(qerr < 1e-12, "quasi F = (k,-h)");
}

void c6_pair_exchange(Verdict& v) {
  const double r = 1e-4;
  TrackOptions opts;
  opts.n_samples = 256;
  const RootTrack tr = track_roots([&](double s) {
    const double hh = r * std::cos(2 * kPi * s), kh = r * std::sin(2 * kPi * s);
    return Quartic::real(1.0, kh, 2.0 + hh, 0.0, 1.0);
  }, opts);
  double worst = 0.0;
  for (std::size_t j = 0; j < tr.params.size(); ++j) {
    const double hh = r * std::cos(2 * kPi * tr.params[j]), kh = r * std::sin(2 * kPi * tr.params[j]);
    const Complex zu = std::sqrt((I * kh - hh) / 4.0), zl = std::sqrt((-I * kh - hh) / 4.0);
    const Complex pred[4] = {I + zu, I - zu, -I + zl, -I - zl};
    for (const auto& z : tr.rootsets[j].roots) {
      double best = 1e300;
      for (const auto& w : pred) best = std::min(best, std::abs(z - w) / std::abs(w));
      worst = std::max(worst, best);
    }
  }
  const Permutation4 p = loop_permutation(tr);
  v.detail << " max relative deviation " << fmt(worst) << ", permutation " << p.cycle_notation();
  v.require(worst < 1e-3, "roots near i +- sqrt((ik-h)/4)");
  v.require(is_conjugate_exchange(p, tr.rootsets.front()), "pairwise exchange");
}

void c7_quasi(Verdict& v) {
  double prev = 1e300, last = 0.0;
  bool decreasing = true;
  v.detail << " delta(eps):";
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    last = quasi_delta_rotation(0.1, eps, 1.0);
    const double err = std::abs(last - 2 * kPi);
    v.detail << " " << fmt(last);
    decreasing = decreasing && err < prev;
    prev = err;
  }

  const auto q = make_quasi_lax();
  const Complex a0{0.2, 0.1}, b0{0.3, -0.2};
  const Trajectory tr = integrate(*q, {a0.real(), a0.imag(), b0.real(), b0.imag()}, 2.0, 1e-12);
  double ferr = 0.0;
  for (std::size_t j = 0; j < tr.times.size(); ++j) {
    const double t = tr.times[j];
    const Complex a = a0 * std::cosh(t) - I * std::conj(b0) * std::sinh(t);
    ferr = std::max(ferr, std::abs(Complex(tr.states[j][0], tr.states[j][1]) - a));
  }
  v.detail << "; closed-form flow error " << fmt(ferr);
  v.require(decreasing, "|delta - 2pi| decreasing");
  v.require(std::abs(last - 2 * kPi) < 0.05 * 2 * kPi, "final within 5% of 2pi");
  v.require(ferr < 1e-9, "closed-form flow");
}

struct Fiber {
  ModelHandle m;
  double h, k;
};

std::vector<Fiber> fibers() {
  const auto jc = make_jaynes_cummings();
  const auto sp = make_spherical_pendulum();
  return {{jc, 2.0, 0.99}, {jc, 2.3, 1.2}, {jc, 1.8, 0.9}, {sp, 1.2, 0.1}, {sp, 1.5, 0.3}, {sp, 0.9, -0.05}};
}

void c8_properties(Verdict& v) {
  double drift = 0.0, defect = 0.0, dyn = 0.0;
  for (const auto& f : fibers()) {
    const ReturnData rd = rotation_number(*f.m, f.h, f.k);
    const Quartic q = f.m->spectral_coeffs(f.h, f.k);
    for (std::size_t j = 0; j < rd.traj.states.size(); ++j) {
      const EMValue e = f.m->energy_momentum(rd.traj.states[j]);
      drift = std::max({drift, std::abs(e.h - f.h) / (1 + std::abs(f.h)), std::abs(e.k - f.k) / (1 + std::abs(f.k))});
      const ReducedPoint& r = rd.traj.reduced[j];
      const Complex Q = eval_poly(q, r.lam);
      defect = std::max(defect, std::abs(r.mu * r.mu - Q) / (1.0 + std::abs(Q)));
    }
    // Middle of the orbit, stepping off samples where the chart is near infinity.
    std::size_t jm = rd.traj.states.size() / 2;
    while (jm + 1 < rd.traj.states.size() && std::abs(rd.traj.reduced[jm].lam) > 10.0) ++jm;
    const PhaseState mid = rd.traj.states[jm];
    const double dt = 2e-5;
    const Complex lp = reduce(*f.m, integrate(*f.m, mid, dt, 1e-13).states.back()).lam;
    const Complex lm = reduce(*f.m, integrate(*f.m, mid, -dt, 1e-13).states.back()).lam;
    const ReducedPoint r = reduce(*f.m, mid);
    const Complex want = f.m->kind() == ModelKind::SphericalPendulum ? -I * r.mu : I * std::pow(jc_params(*f.m)->g, 2) * r.mu;
    dyn = std::max(dyn, std::abs((lp - lm) / (2 * dt) - want) / (1.0 + std::abs(want)));
  }

  std::mt19937_64 rng(20240917);
  double solver = 0.0;
  int tested = 0;
  for (int n = 0; n < 10000; ++n) {
    const Quartic q = oracle::random_quartic(rng, n % 2 == 0);
    if (std::abs(discriminant(q)) / std::pow(q.max_abs_coeff(), 6) < 1e-12) continue;
    ++tested;
    const RootSet ref = oracle::companion_roots(q);
    double rmax = 1.0;
    for (const auto& z : ref.roots) rmax = std::max(rmax, std::abs(z));
    solver = std::max(solver, oracle::multiset_distance(solve_quartic(q), ref) / rmax);
  }
  v.detail << " drift " << fmt(drift) << ", curve defect " << fmt(defect) << ", reduced dynamics " << fmt(dyn)
           << ", solver vs companion " << fmt(solver) << " over " << tested << " quartics";
  v.require(drift < 1e-8, "conservation");
  v.require(defect < 1e-8, "curve membership");
  v.require(dyn < 1e-6, "reduced dynamics");
  v.require(solver < 1e-9 && tested > 9000, "solver oracle");
}

void c9_winding(Verdict& v) {
  int good = 0, total = 0;
  for (const auto& f : fibers()) {
    ++total;
    const ReturnData rd = rotation_number(*f.m, f.h, f.k);
    const RootSet roots = solve_quartic(f.m->spectral_coeffs(f.h, f.k));
    const auto w = winding_numbers(rd.traj, roots);
    int ones = 0, zeros = 0;
    bool paired = true;
    for (int i = 0; i < 4; ++i) {
      const bool one = std::abs(std::abs(w[i]) - 1.0) < 1e-6;
      ones += one;
      zeros += std::abs(w[i]) < 1e-6;
      for (int j = 0; j < 4; ++j)
        if (j != i && std::abs(roots[j] - std::conj(roots[i])) < 1e-9)
          paired = paired && (std::abs(std::abs(w[j]) - 1.0) < 1e-6) == one;
    }
    if (ones == 2 && zeros == 2 && paired) ++good;
  }
  v.detail << " " << good << "/" << total << " fibers wind once around exactly one conjugate pair";
  v.require(good == total, "winding pattern");
}

}  // namespace

int main() {
  report(1, "JC monodromy", c1_jc_monodromy);
  report(2, "SP monodromy", c2_sp_monodromy);
  report(3, "rotation variation by direct flow", c3_delta_theta);
  report(4, "residue cross-check", c4_residues);
  report(5, "normal form and Jacobians", c5_normal_form);
  report(6, "pairwise root exchange in the normal form", c6_pair_exchange);
  report(7, "quasi limit and closed-form flow", c7_quasi);
  report(8, "conservation, curve, dynamics, solver", c8_properties);
  report(9, "winding of the reduced cycle", c9_winding);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
