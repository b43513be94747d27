#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "blreg/harness/config.hpp"
#include "blreg/harness/report.hpp"

namespace blreg {

struct RegistrationInputs {
  GridField source;
  GridField target;
  std::vector<std::int32_t> source_labels;
  std::vector<std::int32_t> target_labels;
};

/// Synthesizes or reads the image pair named by the config.
RegistrationInputs load_inputs(const RunConfig& config);

struct RegistrationOutputs {
  RegistrationReport report;
  TimeFlow velocity;
  GridField warped;        ///< m(1)
  GridField displacement;  ///< ι(φ̃(1)) - id
  GridField difference;    ///< m(1) - I₁
  std::vector<std::int32_t> warped_labels;
};

/// Runs minimize with the configured objective and fills the report.
RegistrationOutputs register_images(const RunConfig& config, const RegistrationInputs& inputs,
                                    const IterationCallback& on_iteration = {});

/// register_images plus output files under config.output_dir: warped.vol,
/// displacement.vol, difference.vol, history.csv, report.txt (and
/// warped_labels.vol when labels are present).
RegistrationReport run(const RunConfig& config, const IterationCallback& on_iteration = {});

/// Source labels carried along φ(1): each label's indicator is warped linearly and thresholded at 1/2.
std::vector<std::int32_t> warp_labels(const std::vector<std::int32_t>& labels, const GridField& displacement);

}  // namespace blreg
