#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "awsgd/data/generators.hpp"
#include "awsgd/data/idx.hpp"
#include "awsgd/data/matrix_io.hpp"
#include "cli/compare.hpp"
#include "cli/config.hpp"
#include "cli/scenarios.hpp"

namespace {

using awsgd::cli::ExperimentConfig;
using nlohmann::json;

int cmdRun(const std::string& configPath, const std::vector<std::string>& overrides, int jobs) {
    ExperimentConfig cfg = ExperimentConfig::load(configPath, overrides);
    if (jobs > 0) cfg.jobs = jobs;
    awsgd::cli::runScenario(cfg);
    std::cout << "wrote " << cfg.outputDir << "/summary.json\n";
    return 0;
}

int cmdCompare(const std::string& a, const std::string& b, const std::string& metric,
               double threshold) {
    const json report = awsgd::cli::compareRuns(a, b, metric, threshold);
    std::cout << report.dump(2) << '\n';
    return report["pass"].get<bool>() ? 0 : 1;
}

// Data generation specs are small JSON files:
//   {"kind":"block-matrix","n":100,"m":100,"rank":10,"block_size":20,
//    "block_scale":100,"seed":7,"output":"y.mat"}
//   {"kind":"logistic-csv","n_pos":100,"n_neg":1000,"dim":16,
//    "separation":2.0,"seed":7,"output":"features.csv"}
//   {"kind":"idx-fixture","count":4,"rows":2,"cols":2,"seed":7,
//    "images_output":"t.idx3","labels_output":"t.idx1"}
int cmdGenData(const std::string& specPath) {
    std::ifstream in(specPath);
    if (!in) throw awsgd::IoError("cannot open spec " + specPath);
    const json spec = json::parse(in);
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "block-matrix") {
        awsgd::BlockMatrixSpec ms;
        ms.rows = spec.value("n", 100);
        ms.cols = spec.value("m", 100);
        ms.rank = spec.value("rank", 10);
        ms.blockSize = spec.value("block_size", 20);
        ms.blockScale = spec.value("block_scale", 100.0);
        ms.seed = spec.value("seed", 0);
        const auto data = awsgd::genBlockMatrix(ms);
        awsgd::writeMatrixFile(spec.at("output").get<std::string>(), data.y);
        if (spec.contains("factors_output")) {
            const std::string base = spec["factors_output"].get<std::string>();
            awsgd::writeMatrixFile(base + ".u", data.u);
            awsgd::writeMatrixFile(base + ".v", data.v);
        }
        return 0;
    }
    if (kind == "logistic-csv") {
        awsgd::LogisticDataSpec ls;
        ls.nPos = spec.value("n_pos", 100);
        ls.nNeg = spec.value("n_neg", 1000);
        ls.dim = spec.value("dim", 16);
        ls.separation = spec.value("separation", 2.0);
        ls.seed = spec.value("seed", 0);
        const auto data = awsgd::genImbalancedLogistic(ls);
        awsgd::writeFeatureCsv(spec.at("output").get<std::string>(), data.features, data.labels);
        return 0;
    }
    if (kind == "idx-fixture") {
        const awsgd::Index count = spec.value("count", 4);
        const awsgd::Index rows = spec.value("rows", 2);
        const awsgd::Index cols = spec.value("cols", 2);
        awsgd::Rng rng = awsgd::makeRng(spec.value("seed", 0), 0x1dULL);
        awsgd::IdxImages images;
        images.count = count;
        images.imageRows = rows;
        images.imageCols = cols;
        images.data.resize(count, rows * cols);
        awsgd::IdxLabels labels;
        for (awsgd::Index i = 0; i < count; ++i) {
            labels.labels.push_back(static_cast<std::uint8_t>(i % 10));
            for (awsgd::Index p = 0; p < rows * cols; ++p) {
                images.data(i, p) = static_cast<double>(rng() % 256) / 255.0;
            }
        }
        const auto imgBytes = awsgd::serializeIdxImages(images);
        const auto lblBytes = awsgd::serializeIdxLabels(labels);
        std::ofstream imgOut(spec.at("images_output").get<std::string>(), std::ios::binary);
        imgOut.write(reinterpret_cast<const char*>(imgBytes.data()),
                     static_cast<std::streamsize>(imgBytes.size()));
        std::ofstream lblOut(spec.at("labels_output").get<std::string>(), std::ios::binary);
        lblOut.write(reinterpret_cast<const char*>(lblBytes.data()),
                     static_cast<std::streamsize>(lblBytes.size()));
        return 0;
    }
    throw awsgd::ConfigError("unknown gen-data kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive weighted SGD experiment runner"};
    app.require_subcommand(1);

    std::string configPath;
    std::vector<std::string> overrides;
    int jobs = 0;
    auto* run = app.add_subcommand("run", "execute a scenario from a config file");
    run->add_option("--config", configPath, "JSON experiment config")->required();
    run->add_option("--set", overrides, "override config fields, e.g. --set hyper.rho0=0.5");
    run->add_option("--jobs", jobs, "run (algorithm, seed) pairs concurrently");

    std::string pathA, pathB, metric;
    double threshold = 1.0;
    auto* cmp = app.add_subcommand("compare", "compare a metric across two summaries");
    cmp->add_option("--a", pathA, "first summary.json")->required();
    cmp->add_option("--b", pathB, "second summary.json")->required();
    cmp->add_option("--metric", metric, "dotted metric path")->required();
    cmp->add_option("--threshold", threshold, "pass when ratio a/b <= threshold");

    std::string specPath;
    auto* gen = app.add_subcommand("gen-data", "write synthetic data sets");
    gen->add_option("--spec", specPath, "JSON generation spec")->required();

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmdRun(configPath, overrides, jobs);
        if (cmp->parsed()) return cmdCompare(pathA, pathB, metric, threshold);
        if (gen->parsed()) return cmdGenData(specPath);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const awsgd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
