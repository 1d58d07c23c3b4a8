#ifndef AWSGD_CLI_SCENARIOS_HPP_
#define AWSGD_CLI_SCENARIOS_HPP_

#include "cli/config.hpp"

namespace awsgd::cli {

// Execute every (algorithm, seed) run of the configured scenario, writing
// one metrics CSV per run plus summary.json and effective_config.json to the
// output directory. Throws ConfigError for invalid configs, IoError for
// missing inputs, Error subtypes for run failures.
void runScenario(const ExperimentConfig& cfg);

// Environment variable consulted when task.mnist_dir is empty.
inline constexpr const char* kMnistDirEnv = "AWSGD_MNIST_DIR";

}  // namespace awsgd::cli

#endif  // AWSGD_CLI_SCENARIOS_HPP_
