#include "cli/scenarios.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <thread>

#include "awsgd/data/generators.hpp"
#include "awsgd/data/idx.hpp"
#include "awsgd/grid_env.hpp"
#include "awsgd/mvis.hpp"
#include "awsgd/runloop.hpp"
#include "awsgd/tasks/gridworld.hpp"
#include "awsgd/tasks/logistic.hpp"
#include "awsgd/tasks/matfac.hpp"
#include "awsgd/timeaware.hpp"

namespace awsgd::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kModelStream = 0x30de1ULL;
constexpr std::uint64_t kDrawStream = 0xd4a35ULL;
constexpr std::uint64_t kEvalStream = 0xe7a1fULL;

struct RunKey {
    std::string alg;
    std::uint64_t seed;
};

struct RunOutput {
    json perSeed = json::object();
    std::vector<std::pair<std::int64_t, double>> evalSeries;
};

std::vector<RunKey> buildRunMatrix(const ExperimentConfig& cfg) {
    std::vector<std::string> algs;
    if (cfg.algorithm == "both") {
        algs = {"sgd", "awsgd"};
    } else {
        algs = {cfg.algorithm};
    }
    std::vector<RunKey> keys;
    for (const auto& a : algs)
        for (const auto s : cfg.seeds) keys.push_back({a, s});
    return keys;
}

template <class Fn>
void parallelFor(int jobs, std::size_t n, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    const int workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Schedule makeSchedule(const std::string& kind, double rate0, double offset, double eps) {
    if (kind == "constant") return Schedule::constant(rate0);
    if (kind == "inverse_time") return Schedule::inverseTime(rate0, offset);
    if (kind == "adagrad") return Schedule::adagrad(rate0, eps);
    throw ConfigError("unknown schedule kind '" + kind + "'");
}

fs::path metricsPath(const ExperimentConfig& cfg, const RunKey& key) {
    return fs::path(cfg.outputDir) /
           ("metrics_" + key.alg + "_seed" + std::to_string(key.seed) + ".csv");
}

void writeJsonFile(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string());
    out << j.dump(2) << '\n';
}

double meanOf(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stdOf(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = meanOf(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

json seedStats(const std::vector<double>& values) {
    json out;
    out["values"] = values;
    out["mean"] = meanOf(values);
    out["std"] = stdOf(values);
    return out;
}

struct SgdHyper {
    Schedule rho, eta;
    int batch = 1;
    int innerSteps = 1;
    double guard = 1e12;
    double weightCap = 0.0;
    std::int64_t recordEvery = 1;
    std::int64_t flushEvery = 1000;
};

SgdHyper readSgdHyper(const ExperimentConfig& cfg, double autoRhoOffset) {
    SgdHyper h;
    double offset = cfg.hyperNumber("rho_offset");
    if (offset < 0.0) offset = autoRhoOffset;
    const double eps = cfg.hyperNumber("adagrad_eps");
    h.rho = makeSchedule(cfg.hyperString("rho_schedule"), cfg.hyperNumber("rho0"), offset, eps);
    h.eta = makeSchedule(cfg.hyperString("eta_schedule"), cfg.hyperNumber("eta0"), offset, eps);
    h.batch = static_cast<int>(cfg.hyperInt("batch"));
    h.innerSteps = static_cast<int>(cfg.hyperInt("inner_steps"));
    h.guard = cfg.hyperNumber("d_norm_sq_guard");
    h.weightCap = cfg.hyperNumber("weight_cap");
    h.recordEvery = cfg.hyperInt("record_every");
    h.flushEvery = cfg.hyperInt("flush_every");
    return h;
}

StepOptions toStepOptions(const SgdHyper& h) {
    StepOptions opts;
    opts.rho = h.rho;
    opts.eta = h.eta;
    opts.batch = h.batch;
    opts.innerSteps = h.innerSteps;
    opts.dNormSqGuard = h.guard;
    opts.weightCap = h.weightCap > 0.0 ? h.weightCap : std::numeric_limits<double>::infinity();
    return opts;
}

// ---------------------------------------------------------------------------
// matfac scenarios (block, mnist, nonstationary)

struct MatfacData {
    Matrix y;
    int rank = 0;
    // nonstationary extras
    Matrix replacement;
    std::int64_t switchStart = 0, switchEnd = 0;
    Index bBegin = 0, bEnd = 0;
    bool streaming = false;
};

fs::path resolveMnistDir(const ExperimentConfig& cfg) {
    std::string dir = cfg.taskString("mnist_dir");
    if (dir.empty()) {
        if (const char* env = std::getenv(kMnistDirEnv)) dir = env;
    }
    if (dir.empty()) {
        throw IoError(std::string("MNIST directory not configured; set task.mnist_dir or ") +
                      kMnistDirEnv);
    }
    return dir;
}

Matrix loadMnistDigit(const fs::path& dir, int digit) {
    const IdxImages images = loadIdxImages(dir / "train-images-idx3-ubyte");
    const IdxLabels labels = loadIdxLabels(dir / "train-labels-idx1-ubyte");
    return digitMatrix(images, labels, digit);
}

MatfacData buildMatfacData(const ExperimentConfig& cfg) {
    MatfacData data;
    if (cfg.scenario == "matfac-block") {
        BlockMatrixSpec spec;
        spec.rows = cfg.taskInt("n");
        spec.cols = cfg.taskInt("m");
        spec.rank = static_cast<int>(cfg.taskInt("rank"));
        spec.blockSize = cfg.taskInt("block_size");
        spec.blockScale = cfg.taskNumber("block_scale");
        spec.seed = static_cast<std::uint64_t>(cfg.taskInt("data_seed"));
        data.y = genBlockMatrix(spec).y;
        data.rank = spec.rank;
        return data;
    }
    if (cfg.scenario == "matfac-mnist") {
        const fs::path dir = resolveMnistDir(cfg);
        data.y = loadMnistDigit(dir, static_cast<int>(cfg.taskInt("digit")));
        data.rank = static_cast<int>(cfg.taskInt("rank"));
        return data;
    }
    // matfac-nonstationary
    data.streaming = true;
    data.rank = static_cast<int>(cfg.taskInt("rank"));
    data.switchStart = cfg.taskInt("switch_start");
    data.switchEnd = cfg.taskInt("switch_end");
    if (cfg.taskString("source") == "mnist") {
        const fs::path dir = resolveMnistDir(cfg);
        data.y = loadMnistDigit(dir, static_cast<int>(cfg.taskInt("digit_a")));
        data.replacement = loadMnistDigit(dir, static_cast<int>(cfg.taskInt("digit_b")));
        if (data.replacement.cols() != data.y.cols()) {
            throw DimensionMismatchError("digit matrices have different widths");
        }
        data.bBegin = 0;
        data.bEnd = data.y.cols();
        return data;
    }
    const Index rows = cfg.taskInt("rows");
    const Index cols = cfg.taskInt("cols");
    const int patternRank = static_cast<int>(cfg.taskInt("pattern_rank"));
    const double amplitude = cfg.taskNumber("amplitude");
    const auto seed = static_cast<std::uint64_t>(cfg.taskInt("data_seed"));
    data.y = genColumnPattern(rows, cols, cfg.taskInt("a_active_begin"),
                              cfg.taskInt("a_active_end"), patternRank, amplitude, seed);
    data.replacement = genColumnPattern(rows, cols, cfg.taskInt("b_active_begin"),
                                        cfg.taskInt("b_active_end"), patternRank, amplitude,
                                        seed + 1);
    data.bBegin = cfg.taskInt("b_active_begin");
    data.bEnd = cfg.taskInt("b_active_end");
    return data;
}

// Largest factor pair for reshaping a probability vector into a heatmap.
std::pair<Index, Index> heatmapShape(Index cols) {
    Index r = static_cast<Index>(std::sqrt(static_cast<double>(cols)));
    while (r > 1 && cols % r != 0) --r;
    return {r, cols / r};
}

void writeHeatmap(const fs::path& path, const Vector& probs, Index rows, Index cols) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string());
    char buf[32];
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            std::snprintf(buf, sizeof(buf), "%.10g", probs[r * cols + c]);
            if (c) out.put(',');
            out << buf;
        }
        out.put('\n');
    }
}

void runMatfacScenario(const ExperimentConfig& cfg) {
    const MatfacData data = buildMatfacData(cfg);
    const std::int64_t samplesPerEpoch =
        static_cast<std::int64_t>(data.y.rows()) * data.y.cols();
    const SgdHyper hyper = readSgdHyper(cfg, static_cast<double>(samplesPerEpoch) / 2.0);

    std::int64_t totalSamples;
    if (cfg.scenario == "matfac-nonstationary") {
        totalSamples = cfg.hyperInt("total_samples");
    } else {
        totalSamples = static_cast<std::int64_t>(
            std::llround(cfg.hyperNumber("epochs") * static_cast<double>(samplesPerEpoch)));
    }
    const std::int64_t steps = totalSamples / hyper.batch;
    std::int64_t evalEverySamples = cfg.hyperInt("eval_every_samples");
    if (evalEverySamples <= 0) evalEverySamples = samplesPerEpoch;
    const std::int64_t evalEverySteps = std::max<std::int64_t>(1, evalEverySamples / hyper.batch);
    const std::int64_t snapshotEvery =
        data.streaming ? cfg.hyperInt("snapshot_every_samples") : 0;

    const auto runs = buildRunMatrix(cfg);
    std::vector<RunOutput> outputs(runs.size());

    parallelFor(cfg.jobs, runs.size(), [&](std::size_t idx) {
        const RunKey& key = runs[idx];
        MatFacTask task(data.y, data.rank);
        ModelState model;
        {
            Rng modelRng = makeRng(key.seed, kModelStream);
            model.w = task.initialModel(modelRng);
        }
        SoftmaxProductSampler sampler(task.rows(), task.cols());
        StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, task,
                                                             toStepOptions(hyper));
        Rng rng = makeRng(key.seed, kDrawStream);
        CsvWriter metrics(metricsPath(cfg, key), kStepMetricsHeader, hyper.flushEvery);

        RunOutput& out = outputs[idx];
        LoopHooks hooks;
        hooks.recordEvery = hyper.recordEvery;
        hooks.evalEvery = evalEverySteps;
        hooks.evaluate = [&] {
            const double v = task.exactLoss(model.w);
            out.evalSeries.emplace_back(model.sampleCount, v);
            return v;
        };

        std::unique_ptr<NonStationaryStream> stream;
        json massSeries = json::array();
        if (data.streaming) {
            stream = std::make_unique<NonStationaryStream>(
                data.replacement, data.switchStart, data.switchEnd, task.rows(),
                static_cast<std::uint64_t>(cfg.taskInt("data_seed")));
            hooks.preStep = [&](std::int64_t samples) { stream->advance(samples, task.y()); };
            const auto [hr, hc] = heatmapShape(task.cols());
            hooks.snapshotEverySamples = snapshotEvery;
            hooks.snapshot = [&, hr = hr, hc = hc](std::int64_t samples) {
                const Vector& p = sampler.colProbabilities();
                writeHeatmap(fs::path(cfg.outputDir) /
                                 ("heatmap_" + key.alg + "_seed" + std::to_string(key.seed) +
                                  "_" + std::to_string(samples) + ".csv"),
                             p, hr, hc);
                const double mass = p.segment(data.bBegin, data.bEnd - data.bBegin).sum();
                massSeries.push_back({samples, mass});
            };
        }

        const Algorithm alg = key.alg == "sgd" ? Algorithm::Sgd : Algorithm::AwSgd;
        const RunResult result = runLoop(engine, alg, steps, rng, &metrics, hooks);

        out.perSeed["seed"] = key.seed;
        out.perSeed["final_loss"] = result.finalLoss;
        if (result.finalEval) out.perSeed["final_eval"] = *result.finalEval;
        out.perSeed["steps"] = result.steps;
        out.perSeed["guard_skips"] = result.counters.guardSkips;
        out.perSeed["overflow_skips"] = result.counters.overflowSkips;
        if (data.streaming) out.perSeed["b_mass_series"] = std::move(massSeries);
    });

    // Aggregate.
    json algSection = json::object();
    for (const char* alg : {"sgd", "awsgd"}) {
        std::vector<double> finals;
        json perSeed = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (runs[i].alg != alg) continue;
            perSeed.push_back(outputs[i].perSeed);
            if (outputs[i].perSeed.contains("final_eval")) {
                finals.push_back(outputs[i].perSeed["final_eval"].get<double>());
            }
        }
        if (perSeed.empty()) continue;
        json section;
        section["per_seed"] = perSeed;
        if (!finals.empty()) section["final_eval"] = seedStats(finals);
        algSection[alg] = section;
    }

    json summary;
    summary["scenario"] = cfg.scenario;
    summary["samples_per_epoch"] = samplesPerEpoch;
    summary["algorithms"] = algSection;

    // Samples for the adaptive algorithm to first reach the loss the
    // baseline holds after two epochs, per seed.
    if (cfg.algorithm == "both" && !data.streaming) {
        json ratios = json::array();
        json awIters = json::array();
        const std::int64_t baselineSamples = 2 * samplesPerEpoch;
        for (const auto seed : cfg.seeds) {
            const RunOutput* sgdOut = nullptr;
            const RunOutput* awOut = nullptr;
            for (std::size_t i = 0; i < runs.size(); ++i) {
                if (runs[i].seed != seed) continue;
                if (runs[i].alg == "sgd") sgdOut = &outputs[i];
                if (runs[i].alg == "awsgd") awOut = &outputs[i];
            }
            double target = std::numeric_limits<double>::quiet_NaN();
            for (const auto& [samples, eval] : sgdOut->evalSeries) {
                target = eval;
                if (samples >= baselineSamples) break;
            }
            std::int64_t reachedAt = -1;
            for (const auto& [samples, eval] : awOut->evalSeries) {
                if (eval <= target) {
                    reachedAt = samples;
                    break;
                }
            }
            awIters.push_back(reachedAt);
            ratios.push_back(reachedAt < 0 ? -1.0
                                           : static_cast<double>(reachedAt) /
                                                 static_cast<double>(baselineSamples));
        }
        json cmp;
        cmp["baseline_samples"] = baselineSamples;
        cmp["awsgd_samples_to_baseline_loss"] = awIters;
        cmp["sample_ratio"] = ratios;
        summary["iterations_to_threshold"] = cmp;
    }
    writeJsonFile(fs::path(cfg.outputDir) / "summary.json", summary);
}

// ---------------------------------------------------------------------------
// mvis-block

void runMvisScenario(const ExperimentConfig& cfg) {
    BlockMatrixSpec spec;
    spec.rows = cfg.taskInt("n");
    spec.cols = cfg.taskInt("m");
    spec.rank = static_cast<int>(cfg.taskInt("rank"));
    spec.blockSize = cfg.taskInt("block_size");
    spec.blockScale = cfg.taskNumber("block_scale");
    spec.seed = static_cast<std::uint64_t>(cfg.taskInt("data_seed"));
    const BlockMatrix data = genBlockMatrix(spec);
    const MatFacTask task(data.y, spec.rank);

    // Frozen factors shared by every run: the estimand is the loss at this
    // fixed point.
    Rng modelRng = makeRng(static_cast<std::uint64_t>(cfg.taskInt("model_seed")), kModelStream);
    const Vector w0 = task.initialModel(modelRng);
    const double exactMean =
        task.exactLoss(w0) / static_cast<double>(task.spaceSize());

    const double eta0 = cfg.hyperNumber("eta0");
    const std::int64_t steps = cfg.hyperInt("steps");
    const std::int64_t recordEvery = cfg.hyperInt("record_every");
    const std::int64_t flushEvery = cfg.hyperInt("flush_every");

    const auto runs = buildRunMatrix(cfg);
    std::vector<RunOutput> outputs(runs.size());

    parallelFor(cfg.jobs, runs.size(), [&](std::size_t idx) {
        const RunKey& key = runs[idx];
        MvisEstimator<SoftmaxProductSampler> estimator(
            SoftmaxProductSampler(task.rows(), task.cols()));
        const double eta = key.alg == "sgd" ? 0.0 : eta0;
        Rng rng = makeRng(key.seed, kDrawStream);
        CsvWriter metrics(metricsPath(cfg, key), kMvisMetricsHeader, flushEvery);
        for (std::int64_t t = 1; t <= steps; ++t) {
            const auto rec = estimator.step(
                [&](const Cell& c) { return task.lossAt(w0, c); }, eta, rng);
            if (t % recordEvery == 0 || t == steps) {
                std::optional<double> gamma, sd;
                if (t >= 2) {
                    const auto est = estimator.estimate();
                    gamma = est.gammaHat;
                    sd = est.stdDev;
                }
                metrics.row(rec.t, {rec.weightedValue, gamma, sd, rec.tauDigest});
            }
        }
        const auto est = estimator.estimate();
        RunOutput& out = outputs[idx];
        out.perSeed["seed"] = key.seed;
        out.perSeed["gamma_hat"] = est.gammaHat;
        out.perSeed["std_dev"] = est.stdDev;
    });

    json algSection = json::object();
    for (const char* alg : {"sgd", "awsgd"}) {
        std::vector<double> stds;
        json perSeed = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (runs[i].alg != alg) continue;
            perSeed.push_back(outputs[i].perSeed);
            stds.push_back(outputs[i].perSeed["std_dev"].get<double>());
        }
        if (perSeed.empty()) continue;
        json section;
        section["per_seed"] = perSeed;
        section["std_dev"] = seedStats(stds);
        algSection[alg] = section;
    }
    json summary;
    summary["scenario"] = cfg.scenario;
    summary["exact_mean_loss"] = exactMean;
    summary["algorithms"] = algSection;
    if (cfg.algorithm == "both") {
        std::vector<double> ratios;
        for (const auto seed : cfg.seeds) {
            double uniform = 0.0, adapted = 0.0;
            for (std::size_t i = 0; i < runs.size(); ++i) {
                if (runs[i].seed != seed) continue;
                const double sd = outputs[i].perSeed["std_dev"].get<double>();
                if (runs[i].alg == "sgd") uniform = sd;
                else adapted = sd;
            }
            ratios.push_back(adapted / uniform);
        }
        summary["std_dev_ratio"] = seedStats(ratios);
    }
    writeJsonFile(fs::path(cfg.outputDir) / "summary.json", summary);
}

// ---------------------------------------------------------------------------
// logistic-imbalance

void runLogisticScenario(const ExperimentConfig& cfg) {
    LogisticDataSpec spec;
    spec.nPos = cfg.taskInt("n_pos");
    spec.nNeg = cfg.taskInt("n_neg");
    spec.dim = cfg.taskInt("dim");
    spec.separation = cfg.taskNumber("separation");
    spec.seed = static_cast<std::uint64_t>(cfg.taskInt("data_seed"));
    const LogisticData data = genImbalancedLogistic(spec);
    const std::int64_t samplesPerEpoch = spec.nPos + spec.nNeg;
    const SgdHyper hyper = readSgdHyper(cfg, static_cast<double>(samplesPerEpoch) / 2.0);

    const std::int64_t totalSamples = static_cast<std::int64_t>(
        std::llround(cfg.hyperNumber("epochs") * static_cast<double>(samplesPerEpoch)));
    const std::int64_t steps = totalSamples / hyper.batch;
    std::int64_t evalEverySamples = cfg.hyperInt("eval_every_samples");
    if (evalEverySamples <= 0) evalEverySamples = samplesPerEpoch;
    const std::int64_t evalEverySteps = std::max<std::int64_t>(1, evalEverySamples / hyper.batch);

    const auto runs = buildRunMatrix(cfg);
    std::vector<RunOutput> outputs(runs.size());

    parallelFor(cfg.jobs, runs.size(), [&](std::size_t idx) {
        const RunKey& key = runs[idx];
        LogisticTask task(data.features, data.labels);
        ModelState model;
        model.w = Vector::Zero(task.dim());
        LabelBiasSampler sampler(data.labels, 0.0);
        StepEngine<LabelBiasSampler, LogisticTask> engine(model, sampler, task,
                                                          toStepOptions(hyper));
        Rng rng = makeRng(key.seed, kDrawStream);
        CsvWriter metrics(metricsPath(cfg, key), kStepMetricsHeader, hyper.flushEvery);

        RunOutput& out = outputs[idx];
        LoopHooks hooks;
        hooks.recordEvery = hyper.recordEvery;
        hooks.evalEvery = evalEverySteps;
        hooks.evaluate = [&] {
            const double v = task.exactLoss(model.w);
            out.evalSeries.emplace_back(model.sampleCount, v);
            return v;
        };

        // Track the signed bias for drift statistics.
        std::vector<double> tauTrace;
        tauTrace.reserve(static_cast<std::size_t>(steps));
        const Algorithm alg = key.alg == "sgd" ? Algorithm::Sgd : Algorithm::AwSgd;
        RunResult result;
        for (std::int64_t s = 1; s <= steps; ++s) {
            StepRecord rec =
                alg == Algorithm::AwSgd ? engine.awsgdStep(rng) : engine.sgdStep(rng);
            tauTrace.push_back(sampler.tau());
            const bool evalNow = s % evalEverySteps == 0 || s == steps;
            if (evalNow) {
                rec.evalLoss = hooks.evaluate();
                result.finalEval = rec.evalLoss;
            }
            if (s % hyper.recordEvery == 0 || s == steps || rec.evalLoss) {
                metrics.row(rec.t, {rec.loss, rec.dNormSq, rec.density, rec.tauDigest,
                                    rec.simSeconds, rec.evalLoss});
            }
            result.finalLoss = rec.loss;
        }
        metrics.flush();

        const auto tenth = std::max<std::size_t>(1, tauTrace.size() / 10);
        double head = 0.0, tail = 0.0;
        for (std::size_t i = 0; i < tenth; ++i) head += tauTrace[i];
        for (std::size_t i = tauTrace.size() - tenth; i < tauTrace.size(); ++i)
            tail += tauTrace[i];
        out.perSeed["seed"] = key.seed;
        out.perSeed["final_loss"] = result.finalLoss;
        if (result.finalEval) out.perSeed["final_eval"] = *result.finalEval;
        out.perSeed["tau_mean_first_tenth"] = head / static_cast<double>(tenth);
        out.perSeed["tau_mean_last_tenth"] = tail / static_cast<double>(tenth);
        out.perSeed["tau_final"] = tauTrace.back();
    });

    json algSection = json::object();
    for (const char* alg : {"sgd", "awsgd"}) {
        std::vector<double> finals;
        json perSeed = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (runs[i].alg != alg) continue;
            perSeed.push_back(outputs[i].perSeed);
            if (outputs[i].perSeed.contains("final_eval")) {
                finals.push_back(outputs[i].perSeed["final_eval"].get<double>());
            }
        }
        if (perSeed.empty()) continue;
        json section;
        section["per_seed"] = perSeed;
        if (!finals.empty()) section["final_eval"] = seedStats(finals);
        algSection[alg] = section;
    }
    json summary;
    summary["scenario"] = cfg.scenario;
    summary["algorithms"] = algSection;
    writeJsonFile(fs::path(cfg.outputDir) / "summary.json", summary);
}

// ---------------------------------------------------------------------------
// gridworld

void runGridworldScenario(const ExperimentConfig& cfg) {
    const Index side = cfg.taskInt("side");
    const double discount = cfg.taskNumber("discount");
    const Index tmax = cfg.taskInt("t_max");
    const GridWorld world = GridWorld::make(
        side, static_cast<std::uint64_t>(cfg.taskInt("world_seed")), discount, tmax);

    const std::int64_t episodes = cfg.hyperInt("episodes");
    std::int64_t evalEvery = cfg.hyperInt("eval_every");
    if (evalEvery <= 0) evalEvery = episodes;
    const std::int64_t evalRollouts = cfg.hyperInt("eval_rollouts");
    const double rho0 = cfg.hyperNumber("rho0");
    const double rhoSgd = cfg.hyperNumber("rho0_sgd") > 0.0 ? cfg.hyperNumber("rho0_sgd") : rho0;
    const double rhoAw =
        cfg.hyperNumber("rho0_awsgd") > 0.0 ? cfg.hyperNumber("rho0_awsgd") : rho0;
    const double eta0 = cfg.hyperNumber("eta0");
    const double weightCap = cfg.hyperNumber("weight_cap");
    const std::int64_t recordEvery = cfg.hyperInt("record_every");
    const std::int64_t flushEvery = cfg.hyperInt("flush_every");

    const auto runs = buildRunMatrix(cfg);
    std::vector<RunOutput> outputs(runs.size());

    parallelFor(cfg.jobs, runs.size(), [&](std::size_t idx) {
        const RunKey& key = runs[idx];
        Rng rng = makeRng(key.seed, kDrawStream);
        Rng evalRng = makeRng(key.seed, kEvalStream);
        CsvWriter metrics(metricsPath(cfg, key), kStepMetricsHeader, flushEvery);
        RunOutput& out = outputs[idx];
        double finalSuccess = 0.0;

        if (key.alg == "sgd") {
            Vector w = Vector::Zero(world.policyDim());
            for (std::int64_t e = 1; e <= episodes; ++e) {
                const double ret = reinforceEpisode(world, w, rhoSgd, rng);
                std::optional<double> eval;
                if (e % evalEvery == 0 || e == episodes) {
                    eval = successProbability(world, w, evalRollouts, evalRng);
                    finalSuccess = *eval;
                }
                if (e % recordEvery == 0 || e == episodes || eval) {
                    metrics.row(e, {-ret, 0.0, 1.0, 0.0, 0.0, eval});
                }
            }
        } else {
            GridworldTask task(world);
            ModelState model;
            model.w = Vector::Zero(world.policyDim());
            PolicyTableSampler sampler(world, Vector::Zero(world.policyDim()));
            sampler.bindReference(&model.w);
            StepOptions opts;
            opts.rho = Schedule::constant(rhoAw);
            opts.eta = Schedule::constant(eta0);
            opts.weightCap = weightCap > 0.0 ? weightCap
                                             : std::numeric_limits<double>::infinity();
            opts.dNormSqGuard = cfg.hyperNumber("d_norm_sq_guard");
            StepEngine<PolicyTableSampler, GridworldTask> engine(model, sampler, task, opts);
            for (std::int64_t e = 1; e <= episodes; ++e) {
                StepRecord rec = engine.awsgdStep(rng);
                if (e % evalEvery == 0 || e == episodes) {
                    rec.evalLoss = successProbability(world, model.w, evalRollouts, evalRng);
                    finalSuccess = *rec.evalLoss;
                }
                if (e % recordEvery == 0 || e == episodes || rec.evalLoss) {
                    metrics.row(rec.t, {rec.loss, rec.dNormSq, rec.density, rec.tauDigest,
                                        rec.simSeconds, rec.evalLoss});
                }
            }
            out.perSeed["overflow_skips"] = engine.counters().overflowSkips;
            out.perSeed["guard_skips"] = engine.counters().guardSkips;
        }
        out.perSeed["seed"] = key.seed;
        out.perSeed["success"] = finalSuccess;
    });

    json algSection = json::object();
    for (const char* alg : {"sgd", "awsgd"}) {
        std::vector<double> success;
        json perSeed = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (runs[i].alg != alg) continue;
            perSeed.push_back(outputs[i].perSeed);
            success.push_back(outputs[i].perSeed["success"].get<double>());
        }
        if (perSeed.empty()) continue;
        json section;
        section["per_seed"] = perSeed;
        section["success"] = seedStats(success);
        algSection[alg] = section;
    }
    json summary;
    summary["scenario"] = cfg.scenario;
    summary["side"] = side;
    summary["traps"] = world.traps;
    summary["algorithms"] = algSection;
    writeJsonFile(fs::path(cfg.outputDir) / "summary.json", summary);
}

// ---------------------------------------------------------------------------
// timeaware-speedup

void runTimeawareScenario(const ExperimentConfig& cfg) {
    SpeedupConfig sc;
    for (const auto& f : cfg.hyper.at("slow_factors")) sc.slowFactors.push_back(f.get<double>());
    sc.runsPerFactor = static_cast<int>(cfg.hyperInt("runs_per_factor"));
    sc.rows = cfg.taskInt("n");
    sc.cols = cfg.taskInt("m");
    sc.rank = static_cast<int>(cfg.taskInt("rank"));
    sc.rho0 = cfg.hyperNumber("rho0");
    sc.rhoOffset = cfg.hyperNumber("rho_offset");
    sc.eta0 = cfg.hyperNumber("eta0");
    sc.batch = static_cast<int>(cfg.hyperInt("batch"));
    sc.baseSeconds = cfg.hyperNumber("base_seconds");
    sc.dataSeed = static_cast<std::uint64_t>(cfg.taskInt("data_seed"));
    sc.runSeed = cfg.seeds.front();

    const auto table = speedupBenchmark(sc);

    std::ofstream csv(fs::path(cfg.outputDir) / "speedup_table.csv",
                      std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot open speedup table");
    csv << "slow_factor,sgd_time_s,aw_time_s,speedup\n";
    json rows = json::array();
    for (const auto& row : table) {
        csv << row.slowFactor << ',' << row.sgdTimeSeconds << ',' << row.awTimeSeconds << ','
            << row.speedup << '\n';
        rows.push_back({{"slow_factor", row.slowFactor},
                        {"sgd_time_s", row.sgdTimeSeconds},
                        {"aw_time_s", row.awTimeSeconds},
                        {"speedup", row.speedup}});
    }
    json summary;
    summary["scenario"] = cfg.scenario;
    summary["table"] = rows;
    writeJsonFile(fs::path(cfg.outputDir) / "summary.json", summary);
}

}  // namespace

void runScenario(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.outputDir);
    writeJsonFile(fs::path(cfg.outputDir) / "effective_config.json", cfg.toJson());

    if (cfg.scenario == "mvis-block") return runMvisScenario(cfg);
    if (cfg.scenario == "matfac-block" || cfg.scenario == "matfac-mnist" ||
        cfg.scenario == "matfac-nonstationary") {
        return runMatfacScenario(cfg);
    }
    if (cfg.scenario == "logistic-imbalance") return runLogisticScenario(cfg);
    if (cfg.scenario == "gridworld") return runGridworldScenario(cfg);
    if (cfg.scenario == "timeaware-speedup") return runTimeawareScenario(cfg);
    throw ConfigError("unknown scenario '" + cfg.scenario + "'");
}

}  // namespace awsgd::cli
