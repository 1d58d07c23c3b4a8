#ifndef AWSGD_CLI_CONFIG_HPP_
#define AWSGD_CLI_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "awsgd/errors.hpp"

namespace awsgd::cli {

using nlohmann::json;

// Declarative run description. Validation fills scenario defaults, rejects
// unknown fields, and reports missing required fields by full path.
struct ExperimentConfig {
    std::string scenario;
    std::string algorithm = "both";  // sgd | awsgd | both
    std::vector<std::uint64_t> seeds;
    std::string outputDir;
    int jobs = 1;
    json hyper = json::object();
    json task = json::object();

    static ExperimentConfig load(const std::filesystem::path& path,
                                 const std::vector<std::string>& overrides = {});
    static ExperimentConfig fromJson(json root,
                                     const std::vector<std::string>& overrides = {});

    // Effective config with every default filled in.
    json toJson() const;

    double hyperNumber(const std::string& key) const;
    std::int64_t hyperInt(const std::string& key) const;
    std::string hyperString(const std::string& key) const;
    double taskNumber(const std::string& key) const;
    std::int64_t taskInt(const std::string& key) const;
    std::string taskString(const std::string& key) const;
};

// Apply one `path=value` override (dotted path, JSON-parsed value with
// string fallback) to a raw config object.
void applyOverride(json& root, const std::string& assignment);

const std::vector<std::string>& knownScenarios();

}  // namespace awsgd::cli

#endif  // AWSGD_CLI_CONFIG_HPP_
