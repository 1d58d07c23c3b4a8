#include "cli/config.hpp"

#include <fstream>

namespace awsgd::cli {

namespace {

struct FieldSpec {
    const char* key;
    bool required = false;
    json def;  // ignored when required
    json::value_t type = json::value_t::number_float;
};

struct ScenarioSpec {
    const char* name;
    std::vector<FieldSpec> hyper;
    std::vector<FieldSpec> task;
};

constexpr auto kNum = json::value_t::number_float;
constexpr auto kInt = json::value_t::number_integer;
constexpr auto kStr = json::value_t::string;
constexpr auto kArr = json::value_t::array;

// weight_cap and rho_offset use 0 / -1 as "disabled" / "derive from task".
const std::vector<ScenarioSpec>& scenarioSpecs() {
    static const std::vector<ScenarioSpec> specs = {
        {"mvis-block",
         {
             {"eta0", true, {}, kNum},
             {"steps", false, json(5000), kInt},
             {"record_every", false, json(1), kInt},
             {"flush_every", false, json(1000), kInt},
         },
         {
             {"n", false, json(100), kInt},
             {"m", false, json(100), kInt},
             {"rank", false, json(10), kInt},
             {"block_size", false, json(20), kInt},
             {"block_scale", false, json(100.0), kNum},
             {"data_seed", false, json(7), kInt},
             {"model_seed", false, json(8), kInt},
         }},
        {"matfac-block",
         {
             {"rho0", true, {}, kNum},
             {"eta0", true, {}, kNum},
             {"rho_schedule", false, json("inverse_time"), kStr},
             {"rho_offset", false, json(-1.0), kNum},
             {"eta_schedule", false, json("constant"), kStr},
             {"adagrad_eps", false, json(1e-8), kNum},
             {"batch", false, json(100), kInt},
             {"epochs", false, json(3.0), kNum},
             {"inner_steps", false, json(1), kInt},
             {"eval_every_samples", false, json(0), kInt},  // 0 = one per epoch
             {"record_every", false, json(1), kInt},
             {"flush_every", false, json(1000), kInt},
             {"d_norm_sq_guard", false, json(1e12), kNum},
             {"weight_cap", false, json(0.0), kNum},
         },
         {
             {"n", false, json(100), kInt},
             {"m", false, json(100), kInt},
             {"rank", false, json(10), kInt},
             {"block_size", false, json(20), kInt},
             {"block_scale", false, json(100.0), kNum},
             {"data_seed", false, json(7), kInt},
         }},
        {"matfac-mnist",
         {
             {"rho0", true, {}, kNum},
             {"eta0", true, {}, kNum},
             {"rho_schedule", false, json("inverse_time"), kStr},
             {"rho_offset", false, json(-1.0), kNum},
             {"eta_schedule", false, json("constant"), kStr},
             {"adagrad_eps", false, json(1e-8), kNum},
             {"batch", false, json(100), kInt},
             {"epochs", false, json(1.0), kNum},
             {"inner_steps", false, json(1), kInt},
             {"eval_every_samples", false, json(0), kInt},
             {"record_every", false, json(1), kInt},
             {"flush_every", false, json(1000), kInt},
             {"d_norm_sq_guard", false, json(1e12), kNum},
             {"weight_cap", false, json(0.0), kNum},
         },
         {
             {"digit", false, json(0), kInt},
             {"rank", false, json(50), kInt},
             {"mnist_dir", false, json(""), kStr},
         }},
        {"matfac-nonstationary",
         {
             {"rho0", true, {}, kNum},
             {"eta0", true, {}, kNum},
             {"rho_schedule", false, json("inverse_time"), kStr},
             {"rho_offset", false, json(-1.0), kNum},
             {"eta_schedule", false, json("constant"), kStr},
             {"adagrad_eps", false, json(1e-8), kNum},
             {"batch", false, json(100), kInt},
             {"total_samples", false, json(40000), kInt},
             {"inner_steps", false, json(1), kInt},
             {"eval_every_samples", false, json(0), kInt},
             {"record_every", false, json(1), kInt},
             {"flush_every", false, json(1000), kInt},
             {"d_norm_sq_guard", false, json(1e12), kNum},
             {"weight_cap", false, json(0.0), kNum},
             {"snapshot_every_samples", false, json(2000), kInt},
         },
         {
             {"source", false, json("synthetic"), kStr},
             {"rows", false, json(200), kInt},
             {"cols", false, json(196), kInt},
             {"rank", false, json(5), kInt},
             {"pattern_rank", false, json(3), kInt},
             {"amplitude", false, json(3.0), kNum},
             {"a_active_begin", false, json(20), kInt},
             {"a_active_end", false, json(80), kInt},
             {"b_active_begin", false, json(110), kInt},
             {"b_active_end", false, json(170), kInt},
             {"switch_start", false, json(10000), kInt},
             {"switch_end", false, json(20000), kInt},
             {"mnist_dir", false, json(""), kStr},
             {"digit_a", false, json(0), kInt},
             {"digit_b", false, json(1), kInt},
             {"data_seed", false, json(7), kInt},
         }},
        {"logistic-imbalance",
         {
             {"rho0", true, {}, kNum},
             {"eta0", true, {}, kNum},
             {"rho_schedule", false, json("adagrad"), kStr},
             {"eta_schedule", false, json("adagrad"), kStr},
             {"rho_offset", false, json(-1.0), kNum},
             {"adagrad_eps", false, json(1e-8), kNum},
             {"batch", false, json(1), kInt},
             {"epochs", false, json(10.0), kNum},
             {"inner_steps", false, json(1), kInt},
             {"eval_every_samples", false, json(0), kInt},
             {"record_every", false, json(1), kInt},
             {"flush_every", false, json(1000), kInt},
             {"d_norm_sq_guard", false, json(1e12), kNum},
             {"weight_cap", false, json(0.0), kNum},
         },
         {
             {"n_pos", false, json(100), kInt},
             {"n_neg", false, json(1000), kInt},
             {"dim", false, json(16), kInt},
             {"separation", false, json(2.0), kNum},
             {"data_seed", false, json(7), kInt},
         }},
        {"gridworld",
         {
             {"rho0", true, {}, kNum},
             {"eta0", true, {}, kNum},
             {"rho0_sgd", false, json(0.0), kNum},    // 0 = use rho0
             {"rho0_awsgd", false, json(0.0), kNum},  // 0 = use rho0
             {"episodes", false, json(2000), kInt},
             {"eval_every", false, json(0), kInt},  // 0 = final only
             {"eval_rollouts", false, json(200), kInt},
             {"weight_cap", false, json(1e6), kNum},
             {"d_norm_sq_guard", false, json(1e12), kNum},
             {"record_every", false, json(1), kInt},
             {"flush_every", false, json(1000), kInt},
         },
         {
             {"side", false, json(15), kInt},
             {"discount", false, json(0.99), kNum},
             {"t_max", false, json(-1), kInt},  // -1 = 4*side*side
             {"world_seed", false, json(7), kInt},
         }},
        {"timeaware-speedup",
         {
             {"rho0", true, {}, kNum},
             {"eta0", true, {}, kNum},
             {"slow_factors", true, {}, kArr},
             {"runs_per_factor", false, json(5), kInt},
             {"batch", false, json(1), kInt},
             {"base_seconds", false, json(1e-7), kNum},
             {"rho_offset", false, json(-1.0), kNum},
         },
         {
             {"n", false, json(1000), kInt},
             {"m", false, json(1000), kInt},
             {"rank", false, json(10), kInt},
             {"data_seed", false, json(7), kInt},
         }},
    };
    return specs;
}

const ScenarioSpec& specFor(const std::string& scenario) {
    for (const auto& s : scenarioSpecs()) {
        if (scenario == s.name) return s;
    }
    std::string names;
    for (const auto& s : scenarioSpecs()) names += std::string(" ") + s.name;
    throw ConfigError("unknown scenario '" + scenario + "'; known:" + names);
}

bool typeMatches(const json& v, json::value_t want) {
    if (want == json::value_t::number_float || want == json::value_t::number_integer) {
        return v.is_number();
    }
    return v.type() == want;
}

void applySection(json& section, const std::vector<FieldSpec>& fields,
                  const std::string& sectionName) {
    if (!section.is_object()) throw ConfigError(sectionName + " must be an object");
    for (const auto& f : fields) {
        const auto it = section.find(f.key);
        if (it == section.end()) {
            if (f.required) {
                throw ConfigError("missing required field " + sectionName + "." + f.key);
            }
            section[f.key] = f.def;
        } else if (!typeMatches(*it, f.type)) {
            throw ConfigError("field " + sectionName + "." + f.key + " has wrong type");
        }
    }
    for (const auto& [key, value] : section.items()) {
        (void)value;
        bool known = false;
        for (const auto& f : fields) {
            if (key == f.key) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError("unknown field " + sectionName + "." + key);
    }
}

}  // namespace

const std::vector<std::string>& knownScenarios() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& s : scenarioSpecs()) out.emplace_back(s.name);
        return out;
    }();
    return names;
}

void applyOverride(json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + assignment + "' is not of the form path=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // bare strings are fine
    }
    json* node = &root;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (key.empty()) throw ConfigError("override path '" + path + "' has an empty segment");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return fromJson(std::move(root), overrides);
}

ExperimentConfig ExperimentConfig::fromJson(json root, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) applyOverride(root, o);
    if (!root.is_object()) throw ConfigError("config root must be an object");

    static const std::vector<std::string> topKeys = {"scenario", "algorithm", "seeds",
                                                     "output",   "jobs",      "hyper",
                                                     "task"};
    for (const auto& [key, value] : root.items()) {
        (void)value;
        bool known = false;
        for (const auto& k : topKeys) known = known || key == k;
        if (!known) throw ConfigError("unknown field " + key);
    }

    ExperimentConfig cfg;
    if (!root.contains("scenario") || !root["scenario"].is_string()) {
        throw ConfigError("missing required field scenario");
    }
    cfg.scenario = root["scenario"].get<std::string>();
    const ScenarioSpec& spec = specFor(cfg.scenario);

    if (root.contains("algorithm")) {
        if (!root["algorithm"].is_string()) throw ConfigError("field algorithm has wrong type");
        cfg.algorithm = root["algorithm"].get<std::string>();
    }
    if (cfg.algorithm != "sgd" && cfg.algorithm != "awsgd" && cfg.algorithm != "both") {
        throw ConfigError("field algorithm must be sgd, awsgd or both");
    }
    if (!root.contains("seeds") || !root["seeds"].is_array() || root["seeds"].empty()) {
        throw ConfigError("missing required field seeds (nonempty array)");
    }
    for (const auto& s : root["seeds"]) {
        if (!s.is_number_integer()) throw ConfigError("field seeds must hold integers");
        cfg.seeds.push_back(s.get<std::uint64_t>());
    }
    if (!root.contains("output") || !root["output"].is_string()) {
        throw ConfigError("missing required field output");
    }
    cfg.outputDir = root["output"].get<std::string>();
    if (root.contains("jobs")) {
        if (!root["jobs"].is_number_integer()) throw ConfigError("field jobs has wrong type");
        cfg.jobs = root["jobs"].get<int>();
        if (cfg.jobs < 1) throw ConfigError("field jobs must be >= 1");
    }
    cfg.hyper = root.value("hyper", json::object());
    cfg.task = root.value("task", json::object());
    applySection(cfg.hyper, spec.hyper, "hyper");
    applySection(cfg.task, spec.task, "task");
    return cfg;
}

json ExperimentConfig::toJson() const {
    json root;
    root["scenario"] = scenario;
    root["algorithm"] = algorithm;
    root["seeds"] = seeds;
    root["output"] = outputDir;
    root["jobs"] = jobs;
    root["hyper"] = hyper;
    root["task"] = task;
    return root;
}

double ExperimentConfig::hyperNumber(const std::string& key) const {
    return hyper.at(key).get<double>();
}
std::int64_t ExperimentConfig::hyperInt(const std::string& key) const {
    return hyper.at(key).get<std::int64_t>();
}
std::string ExperimentConfig::hyperString(const std::string& key) const {
    return hyper.at(key).get<std::string>();
}
double ExperimentConfig::taskNumber(const std::string& key) const {
    return task.at(key).get<double>();
}
std::int64_t ExperimentConfig::taskInt(const std::string& key) const {
    return task.at(key).get<std::int64_t>();
}
std::string ExperimentConfig::taskString(const std::string& key) const {
    return task.at(key).get<std::string>();
}

}  // namespace awsgd::cli
