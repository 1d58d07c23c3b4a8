#include "cli/compare.hpp"

#include <fstream>
#include <vector>

#include "awsgd/errors.hpp"

namespace awsgd::cli {

using nlohmann::json;

namespace {

json loadJson(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + " is not valid JSON: " + e.what());
    }
}

const json* lookup(const json& root, const std::string& path) {
    const json* node = &root;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (!node->is_object() || !node->contains(key)) return nullptr;
        node = &(*node)[key];
        if (dot == std::string::npos) return node;
        pos = dot + 1;
    }
    return nullptr;
}

}  // namespace

json compareRuns(const std::filesystem::path& summaryA, const std::filesystem::path& summaryB,
                 const std::string& metric, double threshold) {
    const json a = loadJson(summaryA);
    const json b = loadJson(summaryB);
    const json* va = lookup(a, metric);
    const json* vb = lookup(b, metric);
    if (va == nullptr) throw ConfigError("metric " + metric + " missing from " + summaryA.string());
    if (vb == nullptr) throw ConfigError("metric " + metric + " missing from " + summaryB.string());

    json report;
    report["metric"] = metric;
    report["threshold"] = threshold;

    if (va->is_number() && vb->is_number()) {
        const double x = va->get<double>();
        const double y = vb->get<double>();
        report["value_a"] = x;
        report["value_b"] = y;
        report["delta"] = x - y;
        report["ratio"] = x / y;
        report["pass"] = (x / y) <= threshold;
        return report;
    }
    if (va->is_array() && vb->is_array() && va->size() == vb->size() && !va->empty()) {
        std::vector<double> deltas, ratios;
        int winsA = 0;
        for (std::size_t i = 0; i < va->size(); ++i) {
            const double x = (*va)[i].get<double>();
            const double y = (*vb)[i].get<double>();
            deltas.push_back(x - y);
            ratios.push_back(x / y);
            if (x < y) ++winsA;
        }
        double meanRatio = 0.0, meanDelta = 0.0;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            meanRatio += ratios[i];
            meanDelta += deltas[i];
        }
        meanRatio /= static_cast<double>(ratios.size());
        meanDelta /= static_cast<double>(deltas.size());
        report["per_seed_delta"] = deltas;
        report["per_seed_ratio"] = ratios;
        report["wins_a"] = winsA;
        report["mean_delta"] = meanDelta;
        report["mean_ratio"] = meanRatio;
        report["pass"] = meanRatio <= threshold;
        return report;
    }
    throw ConfigError("metric " + metric + " must be a number or equal-length arrays");
}

}  // namespace awsgd::cli
