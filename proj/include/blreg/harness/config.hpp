#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "blreg/harness/synthesize.hpp"
#include "blreg/objective.hpp"
#include "blreg/optimizer.hpp"

namespace blreg {

/// Everything a registration run needs. Loaded from an INI file:
///
///   [grid]       dims = 64 64, bounds = 16, alpha, exponent, symbol = discrete|continuous
///   [problem]    formulation = state|deformation, sigma2, incompressible, mode, time_nodes, interpolation
///   [transport]  steps, cfl = refine|fail|ignore, cfl_limit
///   [optimizer]  method, max_outer, gradient_tolerance, pcg_tolerance, max_inner, eisenstat_walker
///   [input]      source, target, source_labels, target_labels (volume paths), or
///   [synthetic]  kind, seed, shift, swirl
///   [output]     directory
struct RunConfig {
  std::vector<int> dims{64, 64};
  std::vector<int> bounds{16, 16};
  double alpha = 0.05;
  int exponent = 2;
  SymbolKind symbol = SymbolKind::discrete_laplacian;

  Formulation formulation = Formulation::deformation;
  ProblemConfig problem;
  OptimizerConfig optimizer;

  bool synthetic = true;
  SynthesisOptions synthesis;
  std::filesystem::path source, target, source_labels, target_labels;

  std::filesystem::path output_dir = "out";

  BLDomain domain() const;
  /// key = value lines of every setting, defaults included, in a fixed order.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Throws ConfigError naming the section and key on unreadable or ill-formed settings.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

Formulation parse_formulation(const std::string& s);
Method parse_method(const std::string& s);

}  // namespace blreg
