#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "blreg/harness/metrics.hpp"
#include "blreg/optimizer.hpp"

namespace blreg {

struct RegistrationReport {
  std::vector<IterationRecord> history;
  Status status = Status::max_iterations;
  double final_mse_rel = 0.0;
  double final_gradient_rel = 0.0;
  Extrema jacobian{1.0, 1.0};
  std::vector<std::pair<int, double>> dice;  ///< (label, DSC)
  std::vector<std::pair<std::string, std::string>> config;
  int total_pcg_iterations = 0;
  int negative_curvature_events = 0;
  int time_steps = 0;
  double max_divergence = 0.0;  ///< over every iterate
  double wall_seconds = 0.0;
};

/// One row per outer iteration. Timing is left out so reruns compare byte for byte.
std::string history_csv(const std::vector<IterationRecord>& history);
std::vector<IterationRecord> parse_history_csv(const std::string& text);

/// Human-readable summary including the configuration echo and wall time.
std::string report_text(const RegistrationReport& r);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace blreg
