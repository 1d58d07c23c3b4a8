#ifndef AWSGD_RUNLOOP_HPP_
#define AWSGD_RUNLOOP_HPP_

#include <cstdint>
#include <functional>
#include <optional>

#include "awsgd/metrics.hpp"
#include "awsgd/optimizer.hpp"

namespace awsgd {

enum class Algorithm { Sgd, AwSgd };

struct LoopHooks {
    std::int64_t evalEvery = 0;  // steps between full-loss evaluations; 0 = never
    std::function<double()> evaluate;
    std::function<void(std::int64_t)> preStep;  // called with samples consumed so far
    std::int64_t snapshotEverySamples = 0;
    std::function<void(std::int64_t)> snapshot;
    std::int64_t recordEvery = 1;  // thin metrics rows for very long runs
};

struct RunResult {
    std::int64_t steps = 0;
    double finalLoss = 0.0;                 // last step's pointwise loss
    std::optional<double> finalEval;
    RunCounters counters;
};

// Drives an engine for a fixed number of steps, recording metrics and firing
// the evaluation/snapshot hooks. steps == 0 leaves every state untouched and
// the metrics empty.
template <class Engine>
RunResult runLoop(Engine& engine, Algorithm alg, std::int64_t steps, Rng& rng,
                  CsvWriter* metrics, const LoopHooks& hooks = {}) {
    RunResult result;
    std::int64_t nextSnapshotAt = hooks.snapshotEverySamples;
    for (std::int64_t s = 1; s <= steps; ++s) {
        if (hooks.preStep) hooks.preStep(engine.model().sampleCount);
        StepRecord rec;
        if (alg == Algorithm::AwSgd) {
            rec = engine.awsgdStep(rng);
        } else {
            if constexpr (requires(Engine& e, Rng& r) { e.sgdStep(r); }) {
                rec = engine.sgdStep(rng);
            } else {
                throw Error("baseline step unavailable for this task");
            }
        }
        const bool evalNow =
            hooks.evalEvery > 0 && hooks.evaluate && (s % hooks.evalEvery == 0 || s == steps);
        if (evalNow) {
            rec.evalLoss = hooks.evaluate();
            result.finalEval = rec.evalLoss;
        }
        if (metrics && (s % hooks.recordEvery == 0 || s == steps || rec.evalLoss)) {
            metrics->row(rec.t, {rec.loss, rec.dNormSq, rec.density, rec.tauDigest,
                                 rec.simSeconds, rec.evalLoss});
        }
        if (hooks.snapshotEverySamples > 0 && hooks.snapshot) {
            const std::int64_t samples = engine.model().sampleCount;
            while (samples >= nextSnapshotAt) {
                hooks.snapshot(nextSnapshotAt);
                nextSnapshotAt += hooks.snapshotEverySamples;
            }
        }
        result.finalLoss = rec.loss;
        ++result.steps;
    }
    result.counters = engine.counters();
    if (metrics) metrics->flush();
    return result;
}

}  // namespace awsgd

#endif  // AWSGD_RUNLOOP_HPP_
