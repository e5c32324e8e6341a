#include "laxmono/flow.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "laxmono/error.hpp"

namespace laxmono {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using State = std::vector<double>;

// Phase state optionally followed by (Re Theta, Im Theta).
class Runner {
 public:
  Runner(const Model& m, const PhaseState& s0, double direction, double tol, bool with_theta)
      : m_(m), n_(m.dim()), theta_(with_theta),
        stepper_(odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>())) {
    State x0(s0);
    if (theta_) x0.insert(x0.end(), {0.0, 0.0});
    dt_ = direction * 1e-3 * m.t_char();
    stepper_.initialize(x0, 0.0, dt_);
  }

  void operator()(const State& x, State& dx, double /*t*/) const {
    dx.resize(x.size());
    m_.vector_field(x, scratch_);
    std::copy(scratch_.begin(), scratch_.begin() + n_, dx.begin());
    if (theta_) {
      const Complex td = m_.theta_dot(m_.reduce(x).lam);
      dx[n_] = td.real();
      dx[n_ + 1] = td.imag();
    }
  }

  void step() {
    try {
      stepper_.do_step(std::ref(*this));
    } catch (const odeint::odeint_error& e) {
      throw Error(ErrorKind::ToleranceFailure, std::string("integrator: ") + e.what());
    }
    const double t = stepper_.current_time();
    const double h = std::abs(stepper_.current_time_step());
    if (!(h > 1e-14 * std::max(1.0, std::abs(t))))
      throw Error(ErrorKind::ToleranceFailure, "step size collapsed at t=" + std::to_string(t));
    for (double v : stepper_.current_state())
      if (!std::isfinite(v)) throw Error(ErrorKind::ToleranceFailure, "non-finite state at t=" + std::to_string(t));
  }

  // Applies the model projection to the accepted state; restarts the stepper
  // when that changes it.
  void project() {
    State x = stepper_.current_state();
    PhaseState s(x.begin(), x.begin() + n_);
    const PhaseState before = s;
    m_.project(s);
    if (s == before) return;
    std::copy(s.begin(), s.end(), x.begin());
    stepper_.initialize(x, stepper_.current_time(), stepper_.current_time_step());
  }

  double t() const { return stepper_.current_time(); }
  double t_prev() const { return stepper_.previous_time(); }
  const State& x() const { return stepper_.current_state(); }

  State at(double t) const {
    State out(stepper_.current_state().size());
    stepper_.calc_state(t, out);
    return out;
  }

  PhaseState phase(const State& x) const { return PhaseState(x.begin(), x.begin() + n_); }
  Complex theta(const State& x) const { return {x[n_], x[n_ + 1]}; }

 private:
  const Model& m_;
  std::size_t n_;
  bool theta_;
  double dt_;
  mutable State scratch_;
  mutable odeint::result_of::make_dense_output<odeint::runge_kutta_dopri5<State>>::type stepper_;
};

ReducedPoint reduced_or_nan(const Model& m, const PhaseState& s) {
  if (std::abs(m.angle_carrier(s)) < 1e-12) return {Complex(kNaN, kNaN), Complex(kNaN, kNaN)};
  return m.reduce(s);
}

void record(const Model& m, Trajectory& tr, double t, const PhaseState& s) {
  tr.times.push_back(t);
  tr.states.push_back(s);
  tr.reduced.push_back(reduced_or_nan(m, s));
}

template <class G>
double refine_root(G g, double a, double b, double ga, double gb) {
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if (a > b) {
    std::swap(a, b);
    std::swap(ga, gb);
  }
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

bool is_at_rest(const Model& m, const PhaseState& s) {
  PhaseState ds;
  m.vector_field(s, ds);
  double n = 0.0;
  for (double v : ds) n = std::max(n, std::abs(v));
  return n < 1e-14;
}

}  // namespace

Trajectory integrate(const Model& m, const PhaseState& s0, double t_max, double tol) {
  if (s0.size() != m.dim()) throw Error(ErrorKind::ConstraintViolation, "integrate: wrong state size");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
  Trajectory tr;
  record(m, tr, 0.0, s0);
  if (t_max == 0.0) return tr;

  const double dir = t_max > 0.0 ? 1.0 : -1.0;
  if (is_at_rest(m, s0)) {
    record(m, tr, t_max, s0);
    return tr;
  }
  Runner run(m, s0, dir, tol, false);
  while (dir * (run.t() - t_max) < 0.0) {
    run.step();
    if (dir * (run.t() - t_max) >= 0.0) {
      PhaseState s = run.phase(run.at(t_max));
      m.project(s);
      record(m, tr, t_max, s);
      break;
    }
    run.project();
    record(m, tr, run.t(), run.phase(run.x()));
  }
  return tr;
}

ReturnData first_return(const Model& m, const PhaseState& s0, double tol) {
  if (s0.size() != m.dim()) throw Error(ErrorKind::ConstraintViolation, "first_return: wrong state size");
  if (is_at_rest(m, s0)) throw Error(ErrorKind::NoReturn, m.name() + ": initial state is an equilibrium");
  const ReducedPoint r0 = reduce(m, s0);
  const double t_excl = 0.1 * m.t_char();
  const double t_limit = 1e4 * m.t_char();
  const double lam_tol = 1e-6 * (1.0 + std::abs(r0.lam));
  const double mu_tol = 1e-6 * (1.0 + std::abs(r0.mu));

  Runner run(m, s0, 1.0, tol, true);
  ReturnData out;
  record(m, out.traj, 0.0, s0);

  auto g_at = [&](double t) {
    const ReducedPoint r = m.reduce(run.phase(run.at(t)));
    return (std::conj(r.lam - r0.lam) * m.lambda_dot(r)).real();
  };

  while (true) {
    run.step();
    if (run.t() > t_limit) throw Error(ErrorKind::NoReturn, m.name() + ": no return before 1e4 t_char");
    const double ta = std::max(run.t_prev(), t_excl), tb = run.t();
    if (tb > ta) {
      constexpr int sub = 4;
      double t0 = ta, g0 = g_at(ta);
      for (int i = 1; i <= sub; ++i) {
        const double t1 = ta + (tb - ta) * i / sub;
        const double g1 = g_at(t1);
        if (g0 < 0.0 && g1 >= 0.0) {
          const double ts = refine_root(g_at, t0, t1, g0, g1);
          const State xs = run.at(ts);
          const ReducedPoint rs = m.reduce(run.phase(xs));
          if (std::abs(rs.lam - r0.lam) < lam_tol && std::abs(rs.mu - r0.mu) < mu_tol) {
            PhaseState s = run.phase(xs);
            out.T = ts;
            out.theta = run.theta(xs).real();
            out.theta_im_defect = std::abs(run.theta(xs).imag());
            out.closure = std::abs(rs.lam - r0.lam);
            record(m, out.traj, ts, s);
            return out;
          }
        }
        t0 = t1;
        g0 = g1;
      }
    }
    run.project();
    record(m, out.traj, run.t(), run.phase(run.x()));
  }
}

ReturnData rotation_number(const Model& m, double h, double k, double tol) {
  return first_return(m, m.seed_state(h, k), tol);
}

DeltaRotation delta_rotation_loop(const Model& m, const LoopSpec& loop, double tol) {
  validate(loop);
  const GenericityReport gen = genericity_check(m);
  DeltaRotation out;
  out.traversed = gen.orientation < 0 ? loop.reversed() : loop;

  // Fibers whose reduced path runs through lambda = infinity are stepped over.
  auto sample = [&](double s) {
    for (double shift : {0.0, 1e-6, -1e-6, 1e-4, -1e-4}) {
      const EMValue v = out.traversed.at(s + shift);
      try {
        return RotationSample{s + shift, v, rotation_number(m, v.h, v.k, tol).theta};
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ToleranceFailure && e.kind() != ErrorKind::AtInfinity) throw;
      }
    }
    const EMValue v = out.traversed.at(s);
    return RotationSample{s, v, rotation_number(m, v.h, v.k, tol).theta};
  };

  std::vector<RotationSample> coarse;
  for (int j = 0; j <= loop.n_samples; ++j) coarse.push_back(sample(static_cast<double>(j) / loop.n_samples));

  out.samples.push_back(coarse.front());
  out.unwrapped.push_back(coarse.front().theta);
  double acc = coarse.front().theta;

  // Appends samples in (a, b], continuing Theta by the nearest 2 pi representative.
  auto walk = [&](auto&& self, const RotationSample& a, const RotationSample& b, int depth) -> void {
    const double d = std::remainder(b.theta - a.theta, 2.0 * kPi);
    if (std::abs(d) <= 0.5 * kPi) {
      acc += d;
      out.samples.push_back(b);
      out.unwrapped.push_back(acc);
      return;
    }
    if (depth >= 10)
      throw Error(ErrorKind::UnwrapFailure, "Theta jump of " + std::to_string(d) + " persists near s=" + std::to_string(a.s));
    const RotationSample mid = sample(0.5 * (a.s + b.s));
    self(self, a, mid, depth + 1);
    self(self, mid, b, depth + 1);
  };
  for (std::size_t j = 0; j + 1 < coarse.size(); ++j) walk(walk, coarse[j], coarse[j + 1], 0);

  out.delta = acc - out.unwrapped.front();
  return out;
}

std::array<double, 4> winding_numbers(const Trajectory& traj, const RootSet& roots) {
  std::array<double, 4> w{};
  const auto& r = traj.reduced;
  if (r.size() < 2) return w;
  for (int i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const Complex a = r[j].lam - roots[i];
      const Complex b = r[(j + 1) % r.size()].lam - roots[i];
      acc += std::arg(b / a);
    }
    w[i] = acc / (2.0 * kPi);
  }
  return w;
}

// ---------------------------------------------------------------------------

QuasiTransit quasi_transit(double rho, double phi, double R, double tol) {
  if (!(rho > 0.0)) throw std::invalid_argument("quasi: rho must be positive");
  const double h = rho * std::cos(phi), k = rho * std::sin(phi);
  if (std::abs(h) <= 1e-15 * rho && k < 0.0)
    throw Error(ErrorKind::DegenerateFiber, "quasi: h = 0, k < 0 sends lambda-tilde through infinity");

  const ModelHandle mh = make_quasi_lax({R});
  const Model& m = *mh;
  const PhaseState s0 = m.seed_state(h, k);
  auto norm2 = [](const PhaseState& s) { return s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3]; };
  if (!(norm2(s0) < R * R)) throw Error(ErrorKind::FiberEmpty, "quasi: fiber does not meet the ball");

  QuasiTransit out;
  std::vector<double> times[2];
  std::vector<PhaseState> states[2];
  Complex theta[2];
  double tend[2];
  for (int leg = 0; leg < 2; ++leg) {
    const double dir = leg == 0 ? 1.0 : -1.0;
    Runner run(m, s0, dir, tol, true);
    auto g_at = [&](double t) { return norm2(run.phase(run.at(t))) - R * R; };
    while (true) {
      run.step();
      if (std::abs(run.t()) > 1e4) throw Error(ErrorKind::NoReturn, "quasi: trajectory never leaves the ball");
      const PhaseState s = run.phase(run.x());
      if (norm2(s) >= R * R) {
        const double te = refine_root(g_at, run.t_prev(), run.t(), g_at(run.t_prev()), norm2(s) - R * R);
        const State xe = run.at(te);
        tend[leg] = te;
        theta[leg] = run.theta(xe);
        times[leg].push_back(te);
        states[leg].push_back(run.phase(xe));
        break;
      }
      times[leg].push_back(run.t());
      states[leg].push_back(s);
    }
  }

  out.t_exit = tend[0];
  out.t_entry = tend[1];
  const Complex total = theta[0] - theta[1];
  out.theta = total.real();
  out.theta_im = total.imag();

  for (std::size_t j = times[1].size(); j-- > 0;) record(m, out.traj, times[1][j], states[1][j]);
  record(m, out.traj, 0.0, s0);
  for (std::size_t j = 0; j < times[0].size(); ++j) record(m, out.traj, times[0][j], states[0][j]);
  return out;
}

double quasi_relative_rotation(double rho, double phi, double R) { return quasi_transit(rho, phi, R).theta; }

double quasi_delta_rotation(double rho, double eps, double R) {
  if (!(eps > 0.0 && eps < 0.5 * kPi)) throw std::invalid_argument("quasi: eps must lie in (0, pi/2)");
  return quasi_relative_rotation(rho, 1.5 * kPi - eps, R) - quasi_relative_rotation(rho, -0.5 * kPi + eps, R);
}

}  // namespace laxmono
