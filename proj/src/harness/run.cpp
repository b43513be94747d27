#include "blreg/harness/run.hpp"

#include <chrono>
#include <set>

#include "blreg/errors.hpp"
#include "blreg/harness/volume_io.hpp"
#include "blreg/spectral.hpp"

namespace blreg {

RegistrationInputs load_inputs(const RunConfig& config) {
  RegistrationInputs in;
  const BLDomain dom = config.domain();
  if (config.synthetic) {
    SyntheticPair p = synthesize_pair(dom, config.synthesis);
    in.source = std::move(p.source);
    in.target = std::move(p.target);
    in.source_labels = std::move(p.source_labels);
    in.target_labels = std::move(p.target_labels);
    return in;
  }
  in.source = to_grid_field(read_volume(config.source), dom);
  in.target = to_grid_field(read_volume(config.target), dom);
  if (in.source.components() != 1 || in.target.components() != 1) throw InputError("images must be scalar volumes");
  auto labels = [&](const std::filesystem::path& p) {
    std::vector<std::int32_t> out;
    if (p.empty()) return out;
    Volume v = read_volume(p);
    if (v.dtype != "int32" || v.labels.size() != dom.grid_size()) {
      throw InputError(p.string() + ": label volume must be int32 on the image grid");
    }
    return std::move(v.labels);
  };
  in.source_labels = labels(config.source_labels);
  in.target_labels = labels(config.target_labels);
  if (in.source_labels.empty() != in.target_labels.empty()) {
    throw InputError("source_labels and target_labels must be given together");
  }
  return in;
}

std::vector<std::int32_t> warp_labels(const std::vector<std::int32_t>& labels, const GridField& displacement) {
  const BLDomain& dom = displacement.domain();
  std::vector<std::int32_t> out(labels.size(), 0);
  std::vector<double> best(labels.size(), 0.5);
  const std::set<std::int32_t> ids(labels.begin(), labels.end());
  for (std::int32_t id : ids) {
    if (id == 0) continue;
    GridField ind = GridField::scalar(dom);
    for (std::size_t i = 0; i < labels.size(); ++i) ind.data()[i] = labels[i] == id ? 1.0 : 0.0;
    const GridField w = warp_with_derivatives(Interpolant(ind, Interpolation::linear), displacement, 0).value;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (w.data()[i] > best[i]) {
        best[i] = w.data()[i];
        out[i] = id;
      }
    }
  }
  return out;
}

RegistrationOutputs register_images(const RunConfig& config, const RegistrationInputs& inputs,
                                    const IterationCallback& on_iteration) {
  const auto start = std::chrono::steady_clock::now();
  std::unique_ptr<Objective> objective = make_objective(config.formulation, inputs.source, inputs.target, config.problem);
  const OptimizationResult res = minimize(*objective, objective->zero_velocity(), config.optimizer, on_iteration);

  RegistrationOutputs out;
  out.velocity = res.velocity;
  out.warped = res.final.m1;
  out.difference = out.warped - inputs.target;
  out.displacement = objective->final_displacement(res.velocity);

  RegistrationReport& r = out.report;
  r.history = res.history;
  r.status = res.status;
  r.final_mse_rel = res.history.back().mse_rel;
  r.final_gradient_rel = res.history.back().gradient_rel;
  r.jacobian = extrema(jacobian_determinant(GridMap(out.displacement)));
  r.config = config.echo();
  r.total_pcg_iterations = res.total_pcg_iterations;
  r.negative_curvature_events = res.negative_curvature_events;
  r.time_steps = objective->steps();
  for (const auto& it : res.history) r.max_divergence = std::max(r.max_divergence, it.max_divergence);
  if (!inputs.source_labels.empty()) {
    out.warped_labels = warp_labels(inputs.source_labels, out.displacement);
    std::set<std::int32_t> ids(inputs.target_labels.begin(), inputs.target_labels.end());
    ids.insert(inputs.source_labels.begin(), inputs.source_labels.end());
    for (std::int32_t id : ids) {
      if (id != 0) r.dice.emplace_back(id, dice(out.warped_labels, inputs.target_labels, id));
    }
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RegistrationReport run(const RunConfig& config, const IterationCallback& on_iteration) {
  const RegistrationInputs inputs = load_inputs(config);
  RegistrationOutputs out = register_images(config, inputs, on_iteration);
  std::filesystem::create_directories(config.output_dir);
  const auto& dir = config.output_dir;
  write_volume(dir / "warped.vol", to_volume(out.warped));
  write_volume(dir / "displacement.vol", to_volume(out.displacement));
  write_volume(dir / "difference.vol", to_volume(out.difference));
  if (!out.warped_labels.empty()) {
    write_volume(dir / "warped_labels.vol", to_label_volume(out.warped.domain(), out.warped_labels));
  }
  write_text(dir / "history.csv", history_csv(out.report.history));
  write_text(dir / "report.txt", report_text(out.report));
  return out.report;
}

}  // namespace blreg
