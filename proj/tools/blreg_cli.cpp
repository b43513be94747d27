#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "blreg/errors.hpp"
#include "blreg/harness/config.hpp"
#include "blreg/harness/derivative_check.hpp"
#include "blreg/harness/report.hpp"
#include "blreg/harness/run.hpp"
#include "blreg/harness/synthesize.hpp"
#include "blreg/harness/volume_io.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kInput = 3, kCfl = 4, kStall = 5 };

int cmd_register(const std::string& config_path, bool quiet) {
  const blreg::RunConfig cfg = blreg::load_config(config_path);
  blreg::IterationCallback cb;
  if (!quiet) {
    cb = [](const blreg::IterationRecord& r) {
      fmt::print("iter {:3d}  E {:.6e}  mse_rel {:8.4f}  |g|rel {:.3e}  pcg {:2d}  step {:.3g}{}\n", r.outer, r.energy,
                 r.mse_rel, r.gradient_rel, r.pcg_iterations, r.step, r.negative_curvature ? "  (negative curvature)" : "");
    };
  }
  const blreg::RegistrationReport rep = blreg::run(cfg, cb);
  fmt::print("{}: MSE_rel {:.4f}%, |g|rel {:.3e}, jacobian [{:.4f}, {:.4f}], outputs in {}\n", to_string(rep.status),
             rep.final_mse_rel, rep.final_gradient_rel, rep.jacobian.min, rep.jacobian.max, cfg.output_dir.string());
  return rep.status == blreg::Status::stalled ? kStall : kOk;
}

int cmd_synthesize(const std::string& kind, int size, int dim, std::uint64_t seed, double shift, double swirl,
                   const std::filesystem::path& out) {
  if (dim != 2 && dim != 3) throw blreg::ConfigError("--dim must be 2 or 3");
  if (size < 16) throw blreg::ConfigError("--size must be >= 16");
  const blreg::BLDomain dom = blreg::BLDomain::cube(dim, size, (size - 1) / 2, 1.0, 1);
  blreg::SynthesisOptions opt;
  opt.kind = blreg::parse_pair_kind(kind);
  opt.seed = seed;
  opt.shift = shift;
  opt.swirl = swirl;
  const blreg::SyntheticPair p = blreg::synthesize_pair(dom, opt);
  std::filesystem::create_directories(out);
  blreg::write_volume(out / "source.vol", blreg::to_volume(p.source));
  blreg::write_volume(out / "target.vol", blreg::to_volume(p.target));
  if (!p.source_labels.empty()) {
    blreg::write_volume(out / "source_labels.vol", blreg::to_label_volume(dom, p.source_labels));
    blreg::write_volume(out / "target_labels.vol", blreg::to_label_volume(dom, p.target_labels));
  }
  fmt::print("wrote {} pair to {}\n", kind, out.string());
  return kOk;
}

int cmd_check(const blreg::DerivativeCheckOptions& opt) {
  const auto entries = blreg::run_derivative_checks(opt);
  int failed = 0;
  for (const auto& e : entries) {
    fmt::print("{:4}  {:<58} {:>11.3e}  (tol {:.1e})  {}\n", e.passed ? "PASS" : "FAIL", e.name, e.value, e.tolerance,
               e.detail);
    failed += e.passed ? 0 : 1;
  }
  fmt::print("{} of {} checks passed\n", int(entries.size()) - failed, entries.size());
  return kOk;
}

int cmd_report(const std::filesystem::path& path) {
  const std::filesystem::path dir = std::filesystem::is_directory(path) ? path : path.parent_path();
  if (std::filesystem::is_directory(path) && std::filesystem::exists(dir / "report.txt")) {
    std::cout << blreg::read_text(dir / "report.txt");
    return kOk;
  }
  const auto csv = std::filesystem::is_directory(path) ? dir / "history.csv" : path;
  const auto history = blreg::parse_history_csv(blreg::read_text(csv));
  if (history.empty()) throw blreg::InputError(csv.string() + ": no iterations recorded");
  int pcg = 0;
  for (const auto& r : history) pcg += r.pcg_iterations;
  const auto& last = history.back();
  fmt::print("outer iterations {}\npcg iterations {}\ninitial energy {:.6e}\nfinal energy {:.6e}\n", last.outer, pcg,
             history.front().energy, last.energy);
  fmt::print("final MSE_rel {:.4f}%\nfinal |g|rel {:.3e}\n", last.mse_rel, last.gradient_rel);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band-limited diffeomorphic image registration"};
  app.require_subcommand(1);

  auto* reg = app.add_subcommand("register", "register an image pair described by an INI config");
  std::string config_path;
  bool quiet = false;
  reg->add_option("config", config_path, "configuration file")->required();
  reg->add_flag("-q,--quiet", quiet, "only print the final summary");

  auto* syn = app.add_subcommand("synthesize", "write a synthetic image pair");
  std::string kind = "translation";
  int size = 64, dim = 2;
  std::uint64_t seed = 0;
  double shift = 0.1, swirl = 0.8;
  std::string out_dir = "pair";
  syn->add_option("-k,--kind", kind, "translation | swirl | c_to_circle");
  syn->add_option("-n,--size", size, "samples per axis");
  syn->add_option("-d,--dim", dim, "2 or 3");
  syn->add_option("-s,--seed", seed, "layout jitter seed (0: canonical)");
  syn->add_option("--shift", shift, "translation per axis");
  syn->add_option("--swirl", swirl, "swirl angle at the centre (radians)");
  syn->add_option("-o,--out", out_dir, "output directory");

  auto* chk = app.add_subcommand("check-derivatives", "finite-difference checks of gradients and Hessian products");
  blreg::DerivativeCheckOptions copt;
  chk->add_option("-n,--size", copt.size, "grid size (<= 64)")->check(CLI::Range(16, 64));
  chk->add_option("-k,--bound", copt.bound, "frequency bound");
  chk->add_option("--alpha", copt.alpha);
  chk->add_option("--sigma2", copt.sigma2);
  chk->add_option("--seed", copt.seed);
  chk->add_option("--eps", copt.eps);
  chk->add_option("--directions", copt.directions)->check(CLI::Range(2, 100));

  auto* rep = app.add_subcommand("report", "summarize a run directory or history CSV");
  std::string report_path;
  rep->add_option("path", report_path)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*reg) return cmd_register(config_path, quiet);
    if (*syn) return cmd_synthesize(kind, size, dim, seed, shift, swirl, out_dir);
    if (*chk) return cmd_check(copt);
    if (*rep) return cmd_report(report_path);
  } catch (const blreg::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const blreg::CflViolation& e) {
    fmt::print(stderr, "CFL violation: {}\n", e.what());
    return kCfl;
  } catch (const blreg::InputError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInput;
  } catch (const blreg::DomainMismatch& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kFailure;
  }
  return kOk;
}
