#include "blreg/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "blreg/errors.hpp"

namespace blreg {

namespace pt = boost::property_tree;

namespace {

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string origin) : tree_(tree), origin_(std::move(origin)) {}

  std::string text(const std::string& key, const std::string& fallback) const {
    return tree_.get<std::string>(key, fallback);
  }
  bool has(const std::string& key) const { return bool(tree_.get_optional<std::string>(key)); }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const std::string s = text(key, "");
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw fail(key, "expected a number, got '" + s + "'");
    }
  }

  int integer(const std::string& key, int fallback) const {
    const double v = real(key, fallback);
    if (v != std::floor(v)) throw fail(key, "expected an integer");
    return int(v);
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = text(key, "");
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw fail(key, "expected true or false, got '" + s + "'");
  }

  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback) const {
    if (!has(key)) return fallback;
    std::istringstream in(text(key, ""));
    std::vector<int> out;
    for (std::string tok; in >> tok;) {
      try {
        out.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw fail(key, "expected integers, got '" + tok + "'");
      }
    }
    if (out.empty()) throw fail(key, "empty list");
    return out;
  }

  template <typename F>
  auto choice(const std::string& key, const std::string& fallback, F&& parse) const {
    try {
      return parse(text(key, fallback));
    } catch (const ConfigError& e) {
      throw fail(key, e.what());
    }
  }

  ConfigError fail(const std::string& key, const std::string& why) const {
    const auto dot = key.find('.');
    return ConfigError(fmt::format("{}: [{}] {}: {}", origin_, key.substr(0, dot), key.substr(dot + 1), why));
  }

 private:
  const pt::ptree& tree_;
  std::string origin_;
};

Interpolation parse_interpolation(const std::string& s) {
  if (s == "linear") return Interpolation::linear;
  if (s == "cubic" || s == "cubic_bspline") return Interpolation::cubic_bspline;
  throw ConfigError("expected linear or cubic, got '" + s + "'");
}

FlowMode parse_mode(const std::string& s) {
  if (s == "stationary") return FlowMode::stationary;
  if (s == "nonstationary") return FlowMode::nonstationary;
  throw ConfigError("expected stationary or nonstationary, got '" + s + "'");
}

CflPolicy parse_cfl(const std::string& s) {
  if (s == "refine") return CflPolicy::refine;
  if (s == "fail") return CflPolicy::fail;
  if (s == "ignore") return CflPolicy::ignore;
  throw ConfigError("expected refine, fail or ignore, got '" + s + "'");
}

SymbolKind parse_symbol(const std::string& s) {
  if (s == "discrete") return SymbolKind::discrete_laplacian;
  if (s == "continuous") return SymbolKind::continuous;
  throw ConfigError("expected discrete or continuous, got '" + s + "'");
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

Formulation parse_formulation(const std::string& s) {
  if (s == "state") return Formulation::state;
  if (s == "deformation") return Formulation::deformation;
  throw ConfigError("expected state or deformation, got '" + s + "'");
}

Method parse_method(const std::string& s) {
  if (s == "newton") return Method::newton;
  if (s == "gauss_newton") return Method::gauss_newton;
  if (s == "gradient_descent") return Method::gradient_descent;
  throw ConfigError("expected newton, gauss_newton or gradient_descent, got '" + s + "'");
}

BLDomain RunConfig::domain() const { return BLDomain(dims, bounds, alpha, exponent, symbol); }

RunConfig parse_config(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: line {}: {}", origin, e.line(), e.message()));
  }
  const Reader r(tree, origin);
  RunConfig c;

  c.dims = r.integers("grid.dims", c.dims);
  c.bounds = r.integers("grid.bounds", c.bounds);
  if (c.bounds.size() == 1) c.bounds.assign(c.dims.size(), c.bounds.front());
  c.alpha = r.real("grid.alpha", c.alpha);
  c.exponent = r.integer("grid.exponent", c.exponent);
  c.symbol = r.choice("grid.symbol", "discrete", parse_symbol);
  try {
    (void)c.domain();
  } catch (const DomainMismatch& e) {
    throw ConfigError(fmt::format("{}: [grid]: {}", origin, e.what()));
  }

  c.formulation = r.choice("problem.formulation", "deformation", parse_formulation);
  c.problem.sigma2 = r.real("problem.sigma2", c.problem.sigma2);
  if (!(c.problem.sigma2 > 0.0)) throw r.fail("problem.sigma2", "must be positive");
  c.problem.incompressible = r.boolean("problem.incompressible", false);
  c.problem.mode = r.choice("problem.mode", "stationary", parse_mode);
  c.problem.time_nodes = r.integer("problem.time_nodes", c.problem.time_nodes);
  if (c.problem.time_nodes < 1) throw r.fail("problem.time_nodes", "must be >= 1");
  c.problem.interpolation = r.choice("problem.interpolation", "linear", parse_interpolation);

  c.problem.transport.steps = r.integer("transport.steps", c.problem.transport.steps);
  if (c.problem.transport.steps < 1) throw r.fail("transport.steps", "must be >= 1");
  c.problem.transport.cfl = r.choice("transport.cfl", "refine", parse_cfl);
  c.problem.transport.cfl_limit = r.real("transport.cfl_limit", c.problem.transport.cfl_limit);
  if (!(c.problem.transport.cfl_limit > 0.0)) throw r.fail("transport.cfl_limit", "must be positive");

  auto& o = c.optimizer;
  o.method = r.choice("optimizer.method", "gauss_newton", parse_method);
  c.problem.hessian = o.method == Method::newton ? HessianKind::newton : HessianKind::gauss_newton;
  o.max_outer = r.integer("optimizer.max_outer", o.max_outer);
  o.gradient_tolerance = r.real("optimizer.gradient_tolerance", o.gradient_tolerance);
  o.pcg_tolerance = r.real("optimizer.pcg_tolerance", o.pcg_tolerance);
  o.max_inner = r.integer("optimizer.max_inner", o.max_inner);
  o.eisenstat_walker = r.boolean("optimizer.eisenstat_walker", o.eisenstat_walker);
  o.backtrack = r.real("optimizer.backtrack", o.backtrack);
  o.armijo = r.real("optimizer.armijo", o.armijo);
  o.initial_step = r.real("optimizer.initial_step", o.initial_step);
  o.max_halvings = r.integer("optimizer.max_halvings", o.max_halvings);
  if (o.max_outer < 0) throw r.fail("optimizer.max_outer", "must be >= 0");
  if (o.max_inner < 1) throw r.fail("optimizer.max_inner", "must be >= 1");
  if (!(o.gradient_tolerance > 0.0)) throw r.fail("optimizer.gradient_tolerance", "must be positive");
  if (!(o.pcg_tolerance > 0.0)) throw r.fail("optimizer.pcg_tolerance", "must be positive");
  if (!(o.backtrack > 0.0 && o.backtrack < 1.0)) throw r.fail("optimizer.backtrack", "must lie in (0,1)");
  if (!(o.armijo > 0.0 && o.armijo < 1.0)) throw r.fail("optimizer.armijo", "must lie in (0,1)");

  c.synthetic = !r.has("input.source");
  if (c.synthetic) {
    c.synthesis.kind = r.choice("synthetic.kind", "translation", parse_pair_kind);
    const double seed = r.real("synthetic.seed", 0.0);
    if (seed < 0.0 || seed != std::floor(seed)) throw r.fail("synthetic.seed", "must be a non-negative integer");
    c.synthesis.seed = std::uint64_t(seed);
    c.synthesis.shift = r.real("synthetic.shift", c.synthesis.shift);
    c.synthesis.swirl = r.real("synthetic.swirl", c.synthesis.swirl);
  } else {
    if (!r.has("input.target")) throw r.fail("input.target", "required when input.source is given");
    c.source = r.text("input.source", "");
    c.target = r.text("input.target", "");
    c.source_labels = r.text("input.source_labels", "");
    c.target_labels = r.text("input.target_labels", "");
  }
  c.output_dir = r.text("output.directory", c.output_dir.string());
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  auto num = [](double x) { return fmt::format("{}", x); };
  std::vector<std::pair<std::string, std::string>> e{
      {"grid.dims", join(dims)},
      {"grid.bounds", join(bounds)},
      {"grid.alpha", num(alpha)},
      {"grid.exponent", std::to_string(exponent)},
      {"grid.symbol", symbol == SymbolKind::discrete_laplacian ? "discrete" : "continuous"},
      {"problem.formulation", to_string(formulation)},
      {"problem.sigma2", num(problem.sigma2)},
      {"problem.incompressible", problem.incompressible ? "true" : "false"},
      {"problem.mode", problem.mode == FlowMode::stationary ? "stationary" : "nonstationary"},
      {"problem.time_nodes", std::to_string(problem.time_nodes)},
      {"problem.interpolation", problem.interpolation == Interpolation::linear ? "linear" : "cubic"},
      {"transport.steps", std::to_string(problem.transport.steps)},
      {"transport.cfl",
       problem.transport.cfl == CflPolicy::refine ? "refine" : problem.transport.cfl == CflPolicy::fail ? "fail" : "ignore"},
      {"transport.cfl_limit", num(problem.transport.cfl_limit)},
      {"optimizer.method", to_string(optimizer.method)},
      {"optimizer.max_outer", std::to_string(optimizer.max_outer)},
      {"optimizer.gradient_tolerance", num(optimizer.gradient_tolerance)},
      {"optimizer.pcg_tolerance", num(optimizer.pcg_tolerance)},
      {"optimizer.max_inner", std::to_string(optimizer.max_inner)},
      {"optimizer.eisenstat_walker", optimizer.eisenstat_walker ? "true" : "false"},
      {"optimizer.backtrack", num(optimizer.backtrack)},
      {"optimizer.armijo", num(optimizer.armijo)},
      {"optimizer.initial_step", num(optimizer.initial_step)},
      {"optimizer.max_halvings", std::to_string(optimizer.max_halvings)},
  };
  if (synthetic) {
    e.emplace_back("synthetic.kind", to_string(synthesis.kind));
    e.emplace_back("synthetic.seed", std::to_string(synthesis.seed));
    e.emplace_back("synthetic.shift", num(synthesis.shift));
    e.emplace_back("synthetic.swirl", num(synthesis.swirl));
  } else {
    e.emplace_back("input.source", source.string());
    e.emplace_back("input.target", target.string());
    e.emplace_back("input.source_labels", source_labels.string());
    e.emplace_back("input.target_labels", target_labels.string());
  }
  e.emplace_back("output.directory", output_dir.string());
  return e;
}

}  // namespace blreg
