#include "laxmono/cpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "laxmono/error.hpp"

namespace laxmono {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorKind::RefinementExhausted: return "RefinementExhausted";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::AtInfinity: return "AtInfinity";
    case ErrorKind::FiberEmpty: return "FiberEmpty";
    case ErrorKind::BranchFailure: return "BranchFailure";
    case ErrorKind::NonGeneric: return "NonGeneric";
    case ErrorKind::UnexpectedPermutation: return "UnexpectedPermutation";
    case ErrorKind::ResidueMismatch: return "ResidueMismatch";
    case ErrorKind::ToleranceFailure: return "ToleranceFailure";
    case ErrorKind::NoReturn: return "NoReturn";
    case ErrorKind::UnwrapFailure: return "UnwrapFailure";
    case ErrorKind::DegenerateFiber: return "DegenerateFiber";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Quartic / RootSet / Permutation4

Quartic::Quartic(const std::array<Complex, 5>& coeffs) : a(coeffs) {
  real_coeffs = std::all_of(a.begin(), a.end(), [](Complex c) { return c.imag() == 0.0; });
}

Quartic Quartic::real(double a0, double a1, double a2, double a3, double a4) {
  Quartic q;
  q.a = {a0, a1, a2, a3, a4};
  q.real_coeffs = true;
  return q;
}

double Quartic::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& c : a) m = std::max(m, std::abs(c));
  return m;
}

double RootSet::min_separation() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) m = std::min(m, std::abs(roots[i] - roots[j]));
  return m;
}

bool Permutation4::is_identity() const {
  for (int i = 0; i < 4; ++i)
    if (image[i] != i) return false;
  return true;
}

Permutation4 Permutation4::after(const Permutation4& first) const {
  Permutation4 out;
  for (int i = 0; i < 4; ++i) out.image[i] = image[first.image[i]];
  return out;
}

bool Permutation4::is_double_transposition() const {
  for (int i = 0; i < 4; ++i) {
    if (image[i] == i) return false;
    if (image[image[i]] != i) return false;
  }
  return true;
}

std::string Permutation4::cycle_notation() const {
  std::string out;
  std::array<bool, 4> seen{};
  for (int i = 0; i < 4; ++i) {
    if (seen[i] || image[i] == i) continue;
    out += '(';
    int j = i;
    bool first = true;
    while (!seen[j]) {
      seen[j] = true;
      if (!first) out += ' ';
      out += std::to_string(j + 1);
      first = false;
      j = image[j];
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

// ---------------------------------------------------------------------------
// Evaluation

Complex eval_poly(const Quartic& q, Complex lambda) {
  Complex acc = q.a[4];
  for (int i = 3; i >= 0; --i) acc = acc * lambda + q.a[i];
  return acc;
}

Complex eval_derivative(const Quartic& q, Complex lambda) {
  Complex acc = 4.0 * q.a[4];
  for (int i = 3; i >= 1; --i) acc = acc * lambda + static_cast<double>(i) * q.a[i];
  return acc;
}

// ---------------------------------------------------------------------------
// Roots

namespace {

// Roots of y^2 + b y + c, avoiding cancellation.
std::array<Complex, 2> solve_quadratic(Complex b, Complex c) {
  Complex sq = std::sqrt(b * b - 4.0 * c);
  if (std::real(std::conj(b) * sq) < 0.0) sq = -sq;
  Complex t = -0.5 * (b + sq);
  if (t == Complex{}) return {Complex{}, Complex{}};
  return {t, c / t};
}

// Roots of m^3 + a m^2 + b m + c (Cardano, branch with the larger radicand).
std::array<Complex, 3> solve_cubic(Complex a, Complex b, Complex c) {
  const Complex p = b - a * a / 3.0;
  const Complex q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const Complex disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  Complex u3 = -q / 2.0 + disc;
  const Complex alt = -q / 2.0 - disc;
  if (std::abs(alt) > std::abs(u3)) u3 = alt;

  std::array<Complex, 3> m{};
  if (std::abs(u3) == 0.0) {
    m = {Complex{}, Complex{}, Complex{}};
  } else {
    const Complex u = std::pow(u3, 1.0 / 3.0);
    const Complex w(-0.5, std::sqrt(3.0) / 2.0);
    Complex uk = u;
    for (int k = 0; k < 3; ++k) {
      m[k] = uk - p / (3.0 * uk);
      uk *= w;
    }
  }
  for (auto& r : m) {
    r -= a / 3.0;
    for (int it = 0; it < 2; ++it) {
      const Complex f = ((r + a) * r + b) * r + c;
      const Complex df = (3.0 * r + 2.0 * a) * r + b;
      if (std::abs(df) == 0.0) break;
      const Complex next = r - f / df;
      const Complex fn = ((next + a) * next + b) * next + c;
      if (std::abs(fn) < std::abs(f)) r = next; else break;
    }
  }
  return m;
}

}  // namespace

RootSet solve_quartic(const Quartic& q) {
  if (std::abs(q.a[4]) < 1e-300)
    throw Error(ErrorKind::DegenerateLeadingCoefficient, "|a4| below 1e-300");

  const Complex b = q.a[3] / q.a[4];
  const Complex c = q.a[2] / q.a[4];
  const Complex d = q.a[1] / q.a[4];
  const Complex e = q.a[0] / q.a[4];

  // y = x + b/4 removes the cubic term: y^4 + p y^2 + r1 y + r0.
  const Complex b2 = b * b;
  const Complex p = c - 3.0 * b2 / 8.0;
  const Complex r1 = d - b * c / 2.0 + b2 * b / 8.0;
  const Complex r0 = e - b * d / 4.0 + b2 * c / 16.0 - 3.0 * b2 * b2 / 256.0;

  std::array<Complex, 4> y{};
  const double scale = std::max({1.0, std::abs(p), std::sqrt(std::abs(r0))});
  bool done = false;
  if (std::abs(r1) > 1e-14 * scale * std::sqrt(scale)) {
    // (y^2+m)^2 = (2m-p) y^2 - r1 y + (m^2 - r0) is a perfect square when m solves
    // 8m^3 - 4p m^2 - 8 r0 m + 4 p r0 - r1^2 = 0.
    const auto ms = solve_cubic(-p / 2.0, -r0, (4.0 * p * r0 - r1 * r1) / 8.0);
    Complex m = ms[0];
    for (const auto& cand : ms)
      if (std::abs(2.0 * cand - p) > std::abs(2.0 * m - p)) m = cand;
    const Complex s = std::sqrt(2.0 * m - p);
    if (std::abs(s) > 0.0) {
      const Complex t = r1 / (2.0 * s);
      const auto lo = solve_quadratic(-s, m + t);
      const auto hi = solve_quadratic(s, m - t);
      y = {lo[0], lo[1], hi[0], hi[1]};
      done = true;
    }
  }
  if (!done) {
    // Biquadratic: z^2 + p z + r0 with z = y^2.
    const auto z = solve_quadratic(p, r0);
    const Complex s0 = std::sqrt(z[0]);
    const Complex s1 = std::sqrt(z[1]);
    y = {s0, -s0, s1, -s1};
  }

  RootSet out;
  for (int i = 0; i < 4; ++i) {
    Complex x = y[i] - b / 4.0;
    const Complex f = eval_poly(q, x);
    const Complex df = eval_derivative(q, x);
    if (std::abs(df) > 0.0) {
      const Complex next = x - f / df;
      if (std::abs(eval_poly(q, next)) < std::abs(f)) x = next;
    }
    out[i] = x;
  }
  return out;
}

Complex discriminant(const Quartic& q) {
  const Complex a = q.a[4], b = q.a[3], c = q.a[2], d = q.a[1], e = q.a[0];
  const Complex a2 = a * a, b2 = b * b, c2 = c * c, d2 = d * d, e2 = e * e;
  return 256.0 * a2 * a * e2 * e - 192.0 * a2 * b * d * e2 - 128.0 * a2 * c2 * e2 +
         144.0 * a2 * c * d2 * e - 27.0 * a2 * d2 * d2 + 144.0 * a * b2 * c * e2 -
         6.0 * a * b2 * d2 * e - 80.0 * a * b * c2 * d * e + 18.0 * a * b * c * d2 * d +
         16.0 * a * c2 * c2 * e - 4.0 * a * c2 * c * d2 - 27.0 * b2 * b2 * e2 +
         18.0 * b2 * b * c * d * e - 4.0 * b2 * b * d2 * d - 4.0 * b2 * c2 * c * e +
         b2 * c2 * d2;
}

// ---------------------------------------------------------------------------
// Matching and tracking

RootMatch match_roots(const RootSet& prev, const RootSet& next) {
  std::array<int, 4> perm{0, 1, 2, 3};
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  std::array<int, 4> best_perm = perm;
  do {
    double cost = 0.0;
    for (int i = 0; i < 4; ++i) cost += std::norm(next[perm[i]] - prev[i]);
    if (cost < best) {
      second = best;
      best = cost;
      best_perm = perm;
    } else if (cost < second) {
      second = cost;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  RootMatch out;
  out.perm.image = best_perm;
  out.cost = best;
  out.quality = best == 0.0 ? std::numeric_limits<double>::infinity() : second / best;
  return out;
}

namespace {

struct Tracker {
  const CoefficientPath& path;
  const TrackOptions& opts;
  RootTrack& track;

  bool acceptable(const RootSet& prev, const RootSet& next, const RootMatch& m) const {
    if (m.quality < opts.guard) return false;
    const double sep = prev.min_separation();
    for (int i = 0; i < 4; ++i) {
      const double step = std::abs(next[m.perm.image[i]] - prev[i]);
      if (step > 0.0 && step > 0.5 * sep) return false;
    }
    return true;
  }

  void push(double s, const RootSet& raw, const RootMatch& m) {
    track.params.push_back(s);
    track.raw.push_back(raw);
    track.step_perms.push_back(m.perm);
    track.quality.push_back(m.quality);
  }

  // Appends all samples in (s0, s1], given the raw roots at s0 and s1.
  void refine(double s0, const RootSet& r0, double s1, const RootSet& r1, int depth) {
    const RootMatch m = match_roots(r0, r1);
    if (acceptable(r0, r1, m)) {
      push(s1, r1, m);
      return;
    }
    if (depth >= opts.max_depth)
      throw Error(ErrorKind::RefinementExhausted,
                  "root matching ambiguous near s=" + std::to_string(s0) +
                      " (path crosses or grazes a repeated root)");
    const double mid = 0.5 * (s0 + s1);
    const RootSet rm = solve_quartic(path(mid));
    refine(s0, r0, mid, rm, depth + 1);
    refine(mid, rm, s1, r1, depth + 1);
  }
};

}  // namespace

RootTrack track_roots(const CoefficientPath& path, const TrackOptions& opts) {
  if (opts.n_samples < 16) throw std::invalid_argument("track_roots: n_samples must be >= 16");
  if (!(opts.guard > 1.0)) throw std::invalid_argument("track_roots: guard must exceed 1");

  RootTrack track;
  track.first = path(0.0);
  track.last = path(1.0);

  Tracker tr{path, opts, track};
  const int n = opts.n_samples;
  std::vector<RootSet> coarse(n + 1);
  for (int j = 0; j <= n; ++j) coarse[j] = solve_quartic(j == 0 ? track.first : j == n ? track.last : path(static_cast<double>(j) / n));

  track.params.push_back(0.0);
  track.raw.push_back(coarse[0]);
  for (int j = 0; j < n; ++j)
    tr.refine(static_cast<double>(j) / n, coarse[j], static_cast<double>(j + 1) / n, coarse[j + 1], 0);

  // Reorder into tracked order.
  Permutation4 acc = Permutation4::identity();
  track.rootsets.reserve(track.raw.size());
  track.rootsets.push_back(track.raw[0]);
  for (std::size_t j = 0; j < track.step_perms.size(); ++j) {
    acc = track.step_perms[j].after(acc);
    RootSet ordered;
    for (int i = 0; i < 4; ++i) ordered[i] = track.raw[j + 1][acc.image[i]];
    track.rootsets.push_back(ordered);
  }
  return track;
}

Permutation4 loop_permutation(const RootTrack& track) {
  const double tol = 1e-12 * std::max(1.0, track.first.max_abs_coeff());
  for (int i = 0; i < 5; ++i)
    if (std::abs(track.first.a[i] - track.last.a[i]) > tol)
      throw Error(ErrorKind::NotClosed, "path end coefficients differ at degree " + std::to_string(i));

  Permutation4 acc = Permutation4::identity();
  for (const auto& p : track.step_perms) acc = p.after(acc);
  return acc;
}

}  // namespace laxmono
