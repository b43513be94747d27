#include "blreg/harness/report.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "blreg/errors.hpp"

namespace blreg {

std::string history_csv(const std::vector<IterationRecord>& history) {
  std::string out = "outer,energy,mse_rel,gradient_rel,pcg_iterations,step,negative_curvature,time_steps,max_divergence\n";
  for (const auto& r : history) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{},{:.17g},{},{},{:.17g}\n", r.outer, r.energy, r.mse_rel,
                       r.gradient_rel, r.pcg_iterations, r.step, r.negative_curvature ? 1 : 0, r.time_steps,
                       r.max_divergence);
  }
  return out;
}

std::vector<IterationRecord> parse_history_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("outer,", 0) != 0) throw InputError("history CSV: missing header");
  std::vector<IterationRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> cells;
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (cells.size() != 9) throw InputError(fmt::format("history CSV: row {} has {} fields, expected 9", row, cells.size()));
    try {
      IterationRecord r;
      r.outer = std::stoi(cells[0]);
      r.energy = std::stod(cells[1]);
      r.mse_rel = std::stod(cells[2]);
      r.gradient_rel = std::stod(cells[3]);
      r.pcg_iterations = std::stoi(cells[4]);
      r.step = std::stod(cells[5]);
      r.negative_curvature = cells[6] == "1";
      r.time_steps = std::stoi(cells[7]);
      r.max_divergence = std::stod(cells[8]);
      out.push_back(r);
    } catch (const std::exception&) {
      throw InputError(fmt::format("history CSV: row {} is malformed", row));
    }
  }
  return out;
}

std::string report_text(const RegistrationReport& r) {
  std::string s = "registration report\n\n";
  s += fmt::format("status                 {}\n", to_string(r.status));
  s += fmt::format("outer iterations       {}\n", r.history.empty() ? 0 : r.history.back().outer);
  s += fmt::format("pcg iterations         {}\n", r.total_pcg_iterations);
  s += fmt::format("negative curvature     {}\n", r.negative_curvature_events);
  s += fmt::format("final MSE_rel (%)      {:.6g}\n", r.final_mse_rel);
  s += fmt::format("final |g|inf,rel       {:.6g}\n", r.final_gradient_rel);
  s += fmt::format("jacobian det min/max   {:.6g} / {:.6g}\n", r.jacobian.min, r.jacobian.max);
  s += fmt::format("max divergence         {:.3g}\n", r.max_divergence);
  s += fmt::format("time steps             {}\n", r.time_steps);
  for (const auto& [label, d] : r.dice) s += fmt::format("dice label {:<11} {:.6g}\n", label, d);
  s += fmt::format("wall time (s)          {:.3f}\n", r.wall_seconds);
  s += "\niterations\n";
  s += fmt::format("{:>5} {:>14} {:>10} {:>10} {:>5} {:>9} {:>3}\n", "outer", "energy", "mse_rel", "|g|rel", "pcg",
                   "step", "nc");
  for (const auto& it : r.history) {
    s += fmt::format("{:>5} {:>14.6e} {:>10.4f} {:>10.3e} {:>5} {:>9.3g} {:>3}\n", it.outer, it.energy, it.mse_rel,
                     it.gradient_rel, it.pcg_iterations, it.step, it.negative_curvature ? 1 : 0);
  }
  s += "\nconfiguration\n";
  for (const auto& [k, v] : r.config) s += fmt::format("{} = {}\n", k, v);
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("{}: cannot open for writing", path.string()));
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("{}: cannot open", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace blreg
