#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "laxmono/models.hpp"

namespace laxmono::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string command;
  ModelKind model = ModelKind::JaynesCummings;
  JCParams jc;
  QuasiParams quasi;

  // Loop commands (roots, rotation, monodromy).
  EMValue center;
  double radius = 0.5;
  int samples = 512;
  int orientation = 1;

  // bifurcation
  double h_min = 0.0, h_max = 0.0, k_min = 0.0, k_max = 0.0;
  int grid = 64;

  // flow
  EMValue at;
  std::optional<double> t_max;

  // quasi
  double rho = 0.1;
  std::vector<double> eps{0.4, 0.2, 0.1, 0.05};

  double tol = 1e-10;
  std::filesystem::path out_dir = "out";

  /// Every key after resolution, as it would appear in a config file.
  std::map<std::string, std::string> resolved;
};

/// Flags override the config file, which overrides the defaults.
/// LAXMONO_OUT sits between --out and the file's `out` key.
/// Throws Error(UsageError) carrying the help text when appropriate.
RunConfig parse_config(const std::vector<std::string>& args);

/// Runs the command and writes its files plus manifest.json.
/// Returns 0, 2 (model check failed) or 3 (numerical failure).
int execute(const RunConfig& cfg);

/// parse_config + execute with error reporting; returns the exit code.
int run(const std::vector<std::string>& args);

/// 17 significant digits, independent of locale.
std::string format_real(double x);

std::string sha256_hex(const std::filesystem::path& file);

}  // namespace laxmono::cli
