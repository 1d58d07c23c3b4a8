#include "awsgd/timeaware.hpp"

#include <algorithm>

#include "awsgd/data/generators.hpp"
#include "awsgd/tasks/matfac.hpp"

namespace awsgd {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<SpeedupRow> speedupBenchmark(const SpeedupConfig& config) {
    BlockMatrixSpec ms;
    ms.rows = config.rows;
    ms.cols = config.cols;
    ms.rank = config.rank;
    ms.blockSize = 1;
    ms.blockScale = 1.0;  // uniform variance: no exploitable block structure
    ms.seed = config.dataSeed;
    const BlockMatrix data = genBlockMatrix(ms);
    const MatFacTask task(data.y, config.rank);

    const std::int64_t samplesPerEpoch =
        static_cast<std::int64_t>(config.rows) * config.cols;
    const std::int64_t steps = samplesPerEpoch / config.batch;
    const double rhoOffset = config.rhoOffset > 0.0
                                 ? config.rhoOffset
                                 : static_cast<double>(samplesPerEpoch) / 2.0;

    std::vector<SpeedupRow> table;
    for (const double factor : config.slowFactors) {
        std::vector<double> sgdTotals, awTotals, speedups;
        for (int run = 0; run < config.runsPerFactor; ++run) {
            SimulatedMatrixClock clock{config.baseSeconds, factor, config.rows / 2, true};
            Rng initRng = makeRng(config.runSeed, 0x9100 + static_cast<std::uint64_t>(run));
            const Vector w0 = task.initialModel(initRng);

            StepOptions opts;
            opts.rho = Schedule::inverseTime(config.rho0, rhoOffset);
            opts.eta = Schedule::constant(config.eta0);
            opts.batch = config.batch;

            double totals[2] = {0.0, 0.0};
            for (int alg = 0; alg < 2; ++alg) {
                ModelState model;
                model.w = w0;
                MatFacTask localTask = task;
                SoftmaxProductSampler sampler(config.rows, config.cols);
                StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, localTask,
                                                                     opts);
                Rng rng = makeRng(config.runSeed,
                                  0x5eed + static_cast<std::uint64_t>(run) * 2 +
                                      static_cast<std::uint64_t>(alg));
                if (alg == 0) {
                    for (std::int64_t s = 0; s < steps; ++s) engine.timedBaselineStep(rng, clock);
                } else {
                    for (std::int64_t s = 0; s < steps; ++s) engine.timeAwareStep(rng, clock);
                }
                totals[alg] =
                    engine.counters().simSecondsTotal + engine.counters().wallSecondsTotal;
            }
            sgdTotals.push_back(totals[0]);
            awTotals.push_back(totals[1]);
            speedups.push_back(totals[0] / totals[1]);
        }
        table.push_back(SpeedupRow{factor, median(sgdTotals), median(awTotals),
                                   median(speedups)});
    }
    return table;
}

}  // namespace awsgd
