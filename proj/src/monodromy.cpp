#include "laxmono/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace laxmono {

namespace {
constexpr double kPi = 3.141592653589793;
constexpr Complex kI{0.0, 1.0};
}  // namespace

EMValue LoopSpec::at(double s) const {
  const double phi = 2.0 * kPi * s * orientation;
  return {center.h + radius * std::cos(phi), center.k + radius * std::sin(phi)};
}

LoopSpec LoopSpec::reversed() const {
  LoopSpec r = *this;
  r.orientation = -orientation;
  return r;
}

void validate(const LoopSpec& loop) {
  if (!(loop.radius > 0.0)) throw std::invalid_argument("loop radius must be positive");
  if (loop.n_samples < 16) throw std::invalid_argument("loop needs at least 16 samples");
  if (loop.orientation != 1 && loop.orientation != -1) throw std::invalid_argument("loop orientation must be +1 or -1");
}

Complex residue_at_infinity(const OneFormCoeffs& xi, Complex a4) {
  if (!xi.basis) return -xi.c1;
  return -xi.c1 / std::sqrt(a4);
}

Complex variation_of_integral(const OneFormCoeffs& xi, Complex a4) {
  return 2.0 * kPi * kI * residue_at_infinity(xi, a4);
}

Complex numeric_residue(const Model& m, double h, double k, const OneFormCoeffs& xi, double Rbig, int nodes) {
  const Quartic q = m.spectral_coeffs(h, k);
  const RootSet r = solve_quartic(q);
  double rmax = 0.0;
  for (const auto& z : r.roots) rmax = std::max(rmax, std::abs(z));
  if (!(Rbig > 2.0 * rmax)) throw std::invalid_argument("numeric_residue: Rbig must exceed twice the largest root");
  nodes = std::max(nodes, 512);

  const Complex sa4 = std::sqrt(q.leading());
  Complex acc = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double phi = 2.0 * kPi * j / nodes;
    const Complex lam = std::polar(Rbig, phi);
    Complex denom;
    if (xi.basis) {
      denom = sa4 * lam * lam;
      for (const auto& z : r.roots) denom *= std::sqrt(1.0 - z / lam);
    } else {
      denom = 1.0 + lam * lam;
    }
    // dlambda = i lambda dphi; the i cancels against 1/(2 pi i).
    acc += (xi.c1 * lam + xi.c2) / denom * lam;
  }
  return -acc / static_cast<double>(nodes);
}

bool is_conjugate_exchange(const Permutation4& p, const RootSet& roots) {
  if (!p.is_double_transposition()) return false;
  std::array<int, 4> conj{};
  for (int i = 0; i < 4; ++i) {
    int best = 0;
    for (int j = 1; j < 4; ++j)
      if (std::abs(roots[j] - std::conj(roots[i])) < std::abs(roots[best] - std::conj(roots[i]))) best = j;
    conj[i] = best;
  }
  for (int i = 0; i < 4; ++i) {
    const int j = p.image[i];
    if ((roots[i].imag() > 0.0) != (roots[j].imag() > 0.0)) return false;
    if (p.image[conj[i]] != conj[j]) return false;
  }
  return true;
}

MonodromyReport analyze_monodromy(const Model& m, const LoopSpec& loop, const TrackOptions& opts) {
  validate(loop);
  MonodromyReport rep;
  rep.genericity = jacobian_F(m);
  rep.genericity_ok = rep.genericity.pass;
  if (!rep.genericity_ok) {
    rep.failure = ErrorKind::NonGeneric;
    rep.message = "|det D| = " + std::to_string(std::abs(rep.genericity.det));
    return rep;
  }

  rep.traversed = rep.genericity.orientation < 0 ? loop.reversed() : loop;
  TrackOptions topts = opts;
  topts.n_samples = loop.n_samples;
  const LoopSpec path_loop = rep.traversed;
  rep.track = track_roots(
      [&](double s) {
        const EMValue v = path_loop.at(s);
        return m.spectral_coeffs(v.h, v.k);
      },
      topts);
  rep.permutation = loop_permutation(rep.track);

  const bool identity = rep.permutation.is_identity();
  const bool exchange = is_conjugate_exchange(rep.permutation, rep.track.rootsets.front());
  rep.permutation_ok = identity || exchange;

  const Quartic qc = m.spectral_coeffs(loop.center.h, loop.center.k);
  rep.residue = residue_at_infinity(m.rotation_one_form(), qc.leading());
  rep.residue_ok = std::abs(rep.residue - 1.0 / kI) < 1e-8;

  if (!rep.permutation_ok) {
    rep.failure = ErrorKind::UnexpectedPermutation;
    rep.message = "loop permutation " + rep.permutation.cycle_notation();
    return rep;
  }
  if (identity) {
    rep.matrix = MonodromyMatrix{};
    return rep;
  }
  if (!rep.residue_ok) {
    rep.failure = ErrorKind::ResidueMismatch;
    rep.message = "residue at infinity is not 1/i";
    return rep;
  }
  rep.matrix.entries = {{{1, 1}, {0, 1}}};
  return rep;
}

MonodromyMatrix monodromy_matrix(const Model& m, const LoopSpec& loop, const TrackOptions& opts) {
  const MonodromyReport rep = analyze_monodromy(m, loop, opts);
  if (rep.failure) throw Error(*rep.failure, m.name() + ": " + rep.message);
  return rep.matrix;
}

// ---------------------------------------------------------------------------

std::string_view to_string(CriticalClass c) {
  return c == CriticalClass::FocusFocusCandidate ? "focus-focus-candidate" : "boundary-candidate";
}

double normalized_discriminant(const Quartic& q) {
  const double s = q.max_abs_coeff();
  const double s6 = s * s * s * s * s * s;
  return discriminant(q).real() / s6;
}

namespace {

CriticalClass classify(const Quartic& q) {
  const RootSet r = solve_quartic(q);
  int bi = 0, bj = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (std::abs(r[i] - r[j]) < std::abs(r[bi] - r[bj])) {
        bi = i;
        bj = j;
      }
  const Complex mid = 0.5 * (r[bi] + r[bj]);
  return std::abs(mid.imag()) > 1e-3 * (1.0 + std::abs(mid)) ? CriticalClass::FocusFocusCandidate
                                                             : CriticalClass::BoundaryCandidate;
}

}  // namespace

std::vector<BifurcationHit> bifurcation_scan(const Model& m, const ScanGrid& g) {
  if (g.n < 16) throw std::invalid_argument("bifurcation_scan: n must be >= 16");
  if (!(g.h_max > g.h_min) || !(g.k_max > g.k_min)) throw std::invalid_argument("bifurcation_scan: empty window");

  const int n = g.n;
  const double dh = (g.h_max - g.h_min) / (n - 1);
  const double dk = (g.k_max - g.k_min) / (n - 1);
  auto disc = [&](double h, double k) { return normalized_discriminant(m.spectral_coeffs(h, k)); };

  std::vector<double> node(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) node[i * n + j] = disc(g.h_min + i * dh, g.k_min + j * dk);

  std::vector<BifurcationHit> hits;
  std::vector<BifurcationHit> isolated;
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j + 1 < n; ++j) {
      const double c[4] = {node[i * n + j], node[(i + 1) * n + j], node[i * n + j + 1], node[(i + 1) * n + j + 1]};
      const double h0 = g.h_min + i * dh, k0 = g.k_min + j * dk;
      const bool pos = std::any_of(c, c + 4, [](double v) { return v > 0.0; });
      const bool neg = std::any_of(c, c + 4, [](double v) { return v < 0.0; });
      if (pos && neg) {
        const EMValue at{h0 + 0.5 * dh, k0 + 0.5 * dk};
        const Quartic q = m.spectral_coeffs(at.h, at.k);
        hits.push_back({at, classify(q), std::log10(std::abs(normalized_discriminant(q)))});
        continue;
      }

      // Pattern search for a touching zero inside the cell.
      int corner = static_cast<int>(std::min_element(c, c + 4, [](double a, double b) {
                                      return std::abs(a) < std::abs(b);
                                    }) - c);
      double h = h0 + (corner & 1) * dh, k = k0 + (corner >> 1) * dk;
      double best = std::abs(c[corner]);
      double sh = 0.5 * dh, sk = 0.5 * dk;
      while (sh > 1e-12 * dh && best > 0.0) {
        bool moved = false;
        const double cand[4][2] = {{h + sh, k}, {h - sh, k}, {h, k + sk}, {h, k - sk}};
        for (const auto& p : cand) {
          if (p[0] < h0 || p[0] > h0 + dh || p[1] < k0 || p[1] > k0 + dk) continue;
          const double v = std::abs(disc(p[0], p[1]));
          if (v < best) {
            best = v;
            h = p[0];
            k = p[1];
            moved = true;
          }
        }
        if (!moved) {
          sh *= 0.5;
          sk *= 0.5;
        }
      }
      if (best < 1e-8) {
        const Quartic q = m.spectral_coeffs(h, k);
        isolated.push_back({{h, k}, classify(q), best > 0.0 ? std::log10(best) : -400.0});
      }
    }
  }

  // Neighbouring cells find the same touching zero.
  std::sort(isolated.begin(), isolated.end(),
            [](const BifurcationHit& a, const BifurcationHit& b) { return a.log10_abs_disc < b.log10_abs_disc; });
  std::vector<BifurcationHit> kept;
  for (const auto& hit : isolated) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const BifurcationHit& o) {
      return std::abs(o.at.h - hit.at.h) <= 1.5 * dh && std::abs(o.at.k - hit.at.k) <= 1.5 * dk;
    });
    if (!dup) kept.push_back(hit);
  }
  hits.insert(hits.end(), kept.begin(), kept.end());
  std::sort(hits.begin(), hits.end(), [](const BifurcationHit& a, const BifurcationHit& b) {
    return a.at.h != b.at.h ? a.at.h < b.at.h : a.at.k < b.at.k;
  });
  return hits;
}

}  // namespace laxmono
