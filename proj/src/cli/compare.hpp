#ifndef AWSGD_CLI_COMPARE_HPP_
#define AWSGD_CLI_COMPARE_HPP_

#include <filesystem>
#include <string>

#include <json.hpp>

namespace awsgd::cli {

// Compare one metric across two summary.json files. The metric is a dotted
// path (for example algorithms.awsgd.final_eval.mean). Scalars compare by
// ratio a/b against the threshold; equal-length arrays add per-seed deltas
// and win counts, passing when the mean ratio stays at or under the
// threshold. Lower values are treated as better.
nlohmann::json compareRuns(const std::filesystem::path& summaryA,
                           const std::filesystem::path& summaryB, const std::string& metric,
                           double threshold);

}  // namespace awsgd::cli

#endif  // AWSGD_CLI_COMPARE_HPP_
