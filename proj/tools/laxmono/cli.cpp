#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "laxmono/error.hpp"
#include "laxmono/flow.hpp"
#include "laxmono/monodromy.hpp"

namespace laxmono::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kPi = 3.141592653589793;

const std::vector<std::string> kKeys = {"model", "omega0", "omega", "g",   "S0",  "R",   "center", "radius",
                                        "samples", "orientation", "window", "grid", "at", "t_max", "rho",
                                        "eps",   "tol",   "out"};

const std::vector<std::pair<std::string, std::string>> kCommands = {
    {"bifurcation", "discriminant scan of the (h, k) plane"},
    {"roots", "roots of the spectral curve tracked along a loop"},
    {"flow", "trajectory and reduced orbit on one fiber"},
    {"rotation", "rotation number along a loop and its variation"},
    {"monodromy", "monodromy matrix with the permutation and residue checks"},
    {"quasi", "relative rotation of the quasi model over an eps sweep"}};

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::UsageError, msg); }

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) usage("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) usage(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      usage(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    usage("invalid value for " + key + ": '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const char* b = v.data() + (!v.empty() && v[0] == '+' ? 1 : 0);
  const auto [p, ec] = std::from_chars(b, v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) usage("invalid value for " + key + ": '" + v + "'");
  return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v, std::size_t n) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_real(key, trim(item)));
  if (n != 0 && out.size() != n) usage(key + " expects " + std::to_string(n) + " comma-separated values");
  if (out.empty()) usage(key + " expects at least one value");
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_real(xs[i]);
  return s;
}

ModelHandle make_model(const RunConfig& c) {
  switch (c.model) {
    case ModelKind::SphericalPendulum: return make_spherical_pendulum();
    case ModelKind::QuasiLax: return make_quasi_lax(c.quasi);
    default: return make_jaynes_cummings(c.jc);
  }
}

std::string model_name(ModelKind k) {
  switch (k) {
    case ModelKind::SphericalPendulum: return "sp";
    case ModelKind::QuasiLax: return "quasi";
    default: return "jc";
  }
}

std::vector<std::string> state_names(ModelKind k) {
  switch (k) {
    case ModelKind::SphericalPendulum: return {"x", "y", "z", "px", "py", "pz"};
    case ModelKind::QuasiLax: return {"re_a", "im_a", "re_b", "im_b"};
    default: return {"Sx", "Sy", "Sz", "qb", "pb"};
  }
}

struct Output {
  std::string name;
  std::string content;
};

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row_strings(header); }
  void row(const std::vector<double>& xs) {
    std::vector<std::string> s;
    for (double x : xs) s.push_back(format_real(x));
    row_strings(s);
  }
  void row_strings(const std::vector<std::string>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) text_ += (i ? "," : "") + xs[i];
    text_ += '\n';
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonGeneric:
    case ErrorKind::UnexpectedPermutation:
    case ErrorKind::ResidueMismatch: return 2;
    case ErrorKind::UsageError: return 64;
    default: return 3;
  }
}

LoopSpec loop_of(const RunConfig& c) { return {c.center, c.radius, c.samples, c.orientation}; }

// Each command returns its files and the exit status of a completed run.
int cmd_bifurcation(const RunConfig& c, std::vector<Output>& out) {
  const ModelHandle m = make_model(c);
  const auto hits = bifurcation_scan(*m, {c.h_min, c.h_max, c.k_min, c.k_max, c.grid});
  Csv csv({"h", "k", "log10_abs_discriminant", "class"});
  for (const auto& h : hits)
    csv.row_strings({format_real(h.at.h), format_real(h.at.k), format_real(h.log10_abs_disc), std::string(to_string(h.cls))});
  out.push_back({"bifurcation.csv", csv.str()});
  std::cout << hits.size() << " candidate(s)\n";
  return 0;
}

int cmd_roots(const RunConfig& c, std::vector<Output>& out) {
  const ModelHandle m = make_model(c);
  const LoopSpec loop = loop_of(c);
  validate(loop);
  TrackOptions opts;
  opts.n_samples = c.samples;
  const RootTrack tr = track_roots([&](double s) {
    const EMValue v = loop.at(s);
    return m->spectral_coeffs(v.h, v.k);
  }, opts);
  Csv csv({"s", "re_r1", "im_r1", "re_r2", "im_r2", "re_r3", "im_r3", "re_r4", "im_r4"});
  for (std::size_t j = 0; j < tr.params.size(); ++j) {
    std::vector<double> row{tr.params[j]};
    for (const auto& z : tr.rootsets[j].roots) {
      row.push_back(z.real());
      row.push_back(z.imag());
    }
    csv.row(row);
  }
  out.push_back({"roots.csv", csv.str()});
  std::cout << "permutation " << loop_permutation(tr).cycle_notation() << "\n";
  return 0;
}

int cmd_flow(const RunConfig& c, std::vector<Output>& out) {
  const ModelHandle m = make_model(c);
  const PhaseState s0 = m->seed_state(c.at.h, c.at.k);
  Trajectory tr;
  if (c.t_max) {
    tr = integrate(*m, s0, *c.t_max, c.tol);
  } else if (c.model == ModelKind::QuasiLax) {
    tr = integrate(*m, s0, 1.0, c.tol);
  } else {
    const ReturnData rd = first_return(*m, s0, c.tol);
    std::cout << "T = " << format_real(rd.T) << ", Theta = " << format_real(rd.theta) << "\n";
    tr = rd.traj;
  }
  std::vector<std::string> header{"t"};
  for (const auto& n : state_names(c.model)) header.push_back(n);
  for (const char* n : {"re_lam", "im_lam", "re_mu", "im_mu"}) header.push_back(n);
  Csv csv(header);
  for (std::size_t j = 0; j < tr.times.size(); ++j) {
    std::vector<double> row{tr.times[j]};
    row.insert(row.end(), tr.states[j].begin(), tr.states[j].end());
    const ReducedPoint& r = tr.reduced[j];
    row.insert(row.end(), {r.lam.real(), r.lam.imag(), r.mu.real(), r.mu.imag()});
    csv.row(row);
  }
  out.push_back({"flow.csv", csv.str()});
  return 0;
}

int cmd_rotation(const RunConfig& c, std::vector<Output>& out) {
  if (c.model == ModelKind::QuasiLax) usage("rotation needs a model with a first return; use the quasi command");
  const ModelHandle m = make_model(c);
  const DeltaRotation d = delta_rotation_loop(*m, loop_of(c), c.tol);
  Csv csv({"s", "h", "k", "theta_unwrapped"});
  for (std::size_t j = 0; j < d.samples.size(); ++j)
    csv.row({d.samples[j].s, d.samples[j].at.h, d.samples[j].at.k, d.unwrapped[j]});
  out.push_back({"rotation.csv", csv.str()});
  ordered_json j;
  j["delta"] = d.delta;
  j["delta_over_2pi"] = d.delta / (2 * kPi);
  j["traversed_orientation"] = d.traversed.orientation;
  j["samples"] = d.samples.size();
  out.push_back({"rotation.json", dump(j)});
  std::cout << "delta = " << format_real(d.delta) << "\n";
  return 0;
}

int cmd_monodromy(const RunConfig& c, std::vector<Output>& out) {
  const ModelHandle m = make_model(c);
  const LoopSpec loop = loop_of(c);
  validate(loop);
  const MonodromyReport rep = analyze_monodromy(*m, loop);
  ordered_json j;
  if (rep.failure) {
    j["matrix"] = nullptr;
  } else {
    j["matrix"] = rep.matrix.entries;
    j["basis"] = rep.matrix.basis;
  }
  j["permutation"] = rep.permutation.cycle_notation();
  j["residue"] = complex_json(rep.residue);
  j["det_D"] = rep.genericity.det;
  j["D"] = rep.genericity.D;
  j["orientation"] = rep.genericity.orientation;
  j["checks"] = {{"genericity", rep.genericity_ok}, {"permutation", rep.permutation_ok}, {"residue", rep.residue_ok}};
  j["status"] = rep.failure ? std::string(to_string(*rep.failure)) : std::string("ok");
  if (rep.failure) j["message"] = rep.message;
  out.push_back({"monodromy.json", dump(j)});
  std::cout << j["status"].get<std::string>() << " " << rep.permutation.cycle_notation() << "\n";
  return rep.failure ? exit_code_for(*rep.failure) : 0;
}

int cmd_quasi(const RunConfig& c, std::vector<Output>& out) {
  Csv csv({"eps", "delta", "delta_minus_2pi"});
  std::vector<double> deltas;
  for (double e : c.eps) {
    const double d = quasi_delta_rotation(c.rho, e, c.quasi.R);
    deltas.push_back(d);
    csv.row({e, d, d - 2 * kPi});
  }
  out.push_back({"quasi.csv", csv.str()});
  ordered_json j;
  j["rho"] = c.rho;
  j["R"] = c.quasi.R;
  j["eps"] = c.eps;
  j["delta"] = deltas;
  j["final_delta"] = deltas.back();
  j["final_delta_over_2pi"] = deltas.back() / (2 * kPi);
  out.push_back({"quasi.json", dump(j)});
  std::cout << "delta = " << format_real(deltas.back()) << "\n";
  return 0;
}

void write_outputs(const RunConfig& c, const std::vector<Output>& files, int code, double seconds) {
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  ordered_json listing = ordered_json::array();
  for (const auto& f : files) {
    const auto path = c.out_dir / f.name;
    std::ofstream os(path, std::ios::binary);
    os << f.content;
    os.close();
    if (!os) throw Error(ErrorKind::UsageError, "cannot write " + path.string());
    listing.push_back({{"name", f.name}, {"bytes", f.content.size()}, {"sha256", sha256_hex(path)}});
  }
  ordered_json man;
  man["command"] = c.command;
  man["config"] = c.resolved;
  man["tool_version"] = kVersion;
  man["duration_s"] = seconds;
  man["files"] = listing;
  man["status"] = code == 0 ? "success" : "partial";
  man["exit_code"] = code;
  std::ofstream os(c.out_dir / "manifest.json", std::ios::binary);
  os << dump(man);
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ec == std::errc() ? p : buf);
}

std::string sha256_hex(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::UsageError, "cannot read " + file.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Hamiltonian monodromy from spectral curves", "laxmono"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_opts;
  std::string config_path;
  for (const auto& [name, desc] : kCommands) {
    CLI::App* sc = app.add_subcommand(name, desc);
    sc->add_option("--config", config_path, "key = value file; flags take precedence");
    auto add = [&](const std::string& key, const std::string& flag, const std::string& help) {
      flag_opts[name + "/" + key] = sc->add_option(flag, flag_values[key], help);
    };
    add("model", "--model", "jc, sp or quasi");
    add("omega0", "--omega0", "JC spin frequency");
    add("omega", "--omega", "JC oscillator frequency");
    add("g", "--g", "JC coupling");
    add("S0", "--S0", "JC spin length");
    add("R", "--R", "quasi ball radius");
    add("tol", "--tol", "integration tolerance");
    add("out", "--out", "output directory (also LAXMONO_OUT)");
    if (name == "roots" || name == "rotation" || name == "monodromy") {
      add("center", "--center", "loop center h,k");
      add("radius", "--radius", "loop radius");
      add("samples", "--samples", "loop samples");
      add("orientation", "--orientation", "+1 or -1");
    }
    if (name == "bifurcation") {
      add("window", "--window", "h_min,h_max,k_min,k_max");
      add("grid", "--grid", "grid points per axis");
    }
    if (name == "flow") {
      add("at", "--at", "fiber h,k");
      add("t_max", "--t-max", "integrate for this time instead of one return");
    }
    if (name == "quasi") {
      add("rho", "--rho", "fiber radius");
      add("eps", "--eps", "comma-separated eps values");
    }
  }

  if (args.empty()) usage("no command given\n" + app.help());
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    usage(app.help());
  } catch (const CLI::CallForVersion&) {
    usage(kVersion);
  } catch (const CLI::ParseError& e) {
    usage(std::string(e.what()) + "\n" + app.help());
  }

  RunConfig c;
  for (const auto* sc : app.get_subcommands()) c.command = sc->get_name();

  std::map<std::string, std::string> v;
  if (!config_path.empty()) v = read_config_file(config_path);
  if (const char* env = std::getenv("LAXMONO_OUT"); env != nullptr && *env != '\0') v["out"] = env;
  for (const auto& [key, opt] : flag_opts)
    if (key.rfind(c.command + "/", 0) == 0 && opt->count() > 0) v[key.substr(c.command.size() + 1)] = flag_values[key.substr(c.command.size() + 1)];

  auto has = [&](const std::string& k) { return v.count(k) > 0; };

  const std::string model = has("model") ? v["model"] : "jc";
  if (model == "jc") c.model = ModelKind::JaynesCummings;
  else if (model == "sp") c.model = ModelKind::SphericalPendulum;
  else if (model == "quasi") c.model = ModelKind::QuasiLax;
  else usage("unknown model '" + model + "' (expected jc, sp or quasi)");

  if (has("omega0")) c.jc.omega0 = to_real("omega0", v["omega0"]);
  if (has("omega")) c.jc.omega = to_real("omega", v["omega"]);
  if (has("g")) c.jc.g = to_real("g", v["g"]);
  if (has("S0")) c.jc.S0 = to_real("S0", v["S0"]);
  if (has("R")) c.quasi.R = to_real("R", v["R"]);

  ModelHandle m;
  try {
    m = make_model(c);
  } catch (const std::invalid_argument& e) {
    usage(e.what());
  }
  const EMValue cv = m->critical_value();

  c.center = cv;
  if (has("center")) {
    const auto p = to_list("center", v["center"], 2);
    c.center = {p[0], p[1]};
  }
  c.radius = c.model == ModelKind::JaynesCummings ? 0.5 : c.model == ModelKind::SphericalPendulum ? 0.1 : 0.05;
  if (has("radius")) c.radius = to_real("radius", v["radius"]);
  c.samples = c.command == "rotation" ? 64 : 512;
  if (has("samples")) c.samples = to_int("samples", v["samples"]);
  if (has("orientation")) c.orientation = to_int("orientation", v["orientation"]);

  const double half = c.model == ModelKind::QuasiLax ? 0.1 : 0.5;
  c.h_min = cv.h - half, c.h_max = cv.h + half, c.k_min = cv.k - half, c.k_max = cv.k + half;
  if (has("window")) {
    const auto w = to_list("window", v["window"], 4);
    c.h_min = w[0], c.h_max = w[1], c.k_min = w[2], c.k_max = w[3];
  }
  if (has("grid")) c.grid = to_int("grid", v["grid"]);

  switch (c.model) {
    case ModelKind::SphericalPendulum: c.at = {1.2, 0.1}; break;
    case ModelKind::QuasiLax: c.at = {0.0, 0.05}; break;
    default: c.at = {cv.h, cv.k - 0.01};
  }
  if (has("at")) {
    const auto p = to_list("at", v["at"], 2);
    c.at = {p[0], p[1]};
  }
  if (has("t_max")) c.t_max = to_real("t_max", v["t_max"]);
  if (has("rho")) c.rho = to_real("rho", v["rho"]);
  if (has("eps")) c.eps = to_list("eps", v["eps"], 0);
  if (has("tol")) c.tol = to_real("tol", v["tol"]);
  if (has("out")) c.out_dir = v["out"];

  if (!(c.tol > 0.0)) usage("tol must be positive");
  if (!(c.radius > 0.0)) usage("radius must be positive");
  if (c.samples < 16) usage("samples must be at least 16");
  if (c.orientation != 1 && c.orientation != -1) usage("orientation must be +1 or -1");
  if (c.grid < 16) usage("grid must be at least 16");
  if (!(c.h_max > c.h_min) || !(c.k_max > c.k_min)) usage("window must have h_min < h_max and k_min < k_max");
  if (!(c.rho > 0.0)) usage("rho must be positive");
  for (double e : c.eps)
    if (!(e > 0.0 && e < 0.5 * kPi)) usage("eps values must lie in (0, pi/2)");
  if (c.t_max && !(std::abs(*c.t_max) > 0.0)) usage("t_max must be nonzero");
  if (c.out_dir.empty()) usage("out must not be empty");

  c.resolved = {{"model", model_name(c.model)},
                {"omega0", format_real(c.jc.omega0)},
                {"omega", format_real(c.jc.omega)},
                {"g", format_real(c.jc.g)},
                {"S0", format_real(c.jc.S0)},
                {"R", format_real(c.quasi.R)},
                {"tol", format_real(c.tol)},
                {"out", c.out_dir.string()}};
  if (c.command == "roots" || c.command == "rotation" || c.command == "monodromy") {
    c.resolved["center"] = join({c.center.h, c.center.k});
    c.resolved["radius"] = format_real(c.radius);
    c.resolved["samples"] = std::to_string(c.samples);
    c.resolved["orientation"] = std::to_string(c.orientation);
  } else if (c.command == "bifurcation") {
    c.resolved["window"] = join({c.h_min, c.h_max, c.k_min, c.k_max});
    c.resolved["grid"] = std::to_string(c.grid);
  } else if (c.command == "flow") {
    c.resolved["at"] = join({c.at.h, c.at.k});
    if (c.t_max) c.resolved["t_max"] = format_real(*c.t_max);
  } else if (c.command == "quasi") {
    c.resolved["rho"] = format_real(c.rho);
    c.resolved["eps"] = join(c.eps);
  }
  return c;
}

int execute(const RunConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Output> files;
  int code = 0;
  try {
    if (c.command == "bifurcation") code = cmd_bifurcation(c, files);
    else if (c.command == "roots") code = cmd_roots(c, files);
    else if (c.command == "flow") code = cmd_flow(c, files);
    else if (c.command == "rotation") code = cmd_rotation(c, files);
    else if (c.command == "monodromy") code = cmd_monodromy(c, files);
    else if (c.command == "quasi") code = cmd_quasi(c, files);
    else usage("unknown command '" + c.command + "'");
  } catch (const Error& e) {
    std::cerr << "laxmono: " << e.what() << "\n";
    code = exit_code_for(e.kind());
  } catch (const std::invalid_argument& e) {
    std::cerr << "laxmono: " << e.what() << "\n";
    code = 64;
  }
  if (files.empty()) return code;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_outputs(c, files, code, secs);
  return code;
}

int run(const std::vector<std::string>& args) {
  try {
    if (args.size() == 1 && (args[0] == "--help" || args[0] == "-h" || args[0] == "--version")) {
      try {
        parse_config(args);
      } catch (const Error& e) {
        std::cout << std::string(e.what()).substr(std::string(to_string(ErrorKind::UsageError)).size() + 2) << "\n";
      }
      return 0;
    }
    return execute(parse_config(args));
  } catch (const Error& e) {
    std::cerr << "laxmono: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace laxmono::cli
