#ifndef AWSGD_TIMEAWARE_HPP_
#define AWSGD_TIMEAWARE_HPP_

#include <cstdint>
#include <vector>

#include "awsgd/common.hpp"
#include "awsgd/optimizer.hpp"

namespace awsgd {

// Simulated non-uniform access cost for matrix cells: rows at or past
// slowRowStart cost baseSeconds * slowFactor, the rest cost baseSeconds.
// The elapsed divisor for the sampler update combines the simulated access
// cost with the measured wall time of the step, so the tracked totals stay
// meaningful when the simulated scale is far below real compute time.
struct SimulatedMatrixClock {
    static constexpr bool timed = true;

    double baseSeconds = 1e-7;
    double slowFactor = 1.0;
    Index slowRowStart = 0;
    bool includeWall = true;

    double simSeconds(const Cell& c) const {
        return c.row >= slowRowStart ? baseSeconds * slowFactor : baseSeconds;
    }
    double elapsed(double sim, double wall) const { return includeWall ? sim + wall : sim; }
};

// Pure wall-clock elapsed, for real workloads.
struct WallClock {
    static constexpr bool timed = true;

    template <class A>
    double simSeconds(const A&) const {
        return 0.0;
    }
    double elapsed(double, double wall) const { return wall; }
};

// Constant elapsed, for equivalence tests.
struct FixedClock {
    static constexpr bool timed = true;

    double value = 1.0;

    template <class A>
    double simSeconds(const A&) const {
        return 0.0;
    }
    double elapsed(double, double) const { return value; }
};

struct SpeedupRow {
    double slowFactor = 0.0;
    double sgdTimeSeconds = 0.0;
    double awTimeSeconds = 0.0;
    double speedup = 0.0;
};

struct SpeedupConfig {
    std::vector<double> slowFactors;
    int runsPerFactor = 5;  // speedup reported as the median over runs
    Index rows = 1000;
    Index cols = 1000;
    int rank = 10;
    double rho0 = 1.0;
    double rhoOffset = -1.0;  // default rows*cols/2
    double eta0 = 1e-8;
    int batch = 1;
    double baseSeconds = 1e-7;
    std::uint64_t dataSeed = 7;
    std::uint64_t runSeed = 1;
};

// One-epoch paired benchmark on a uniform-variance low-rank matrix: for each
// slow factor, run plain SGD and the time-aware variant for rows*cols
// samples each, total cost = simulated access time + real execution time,
// speedup = sgd total / time-aware total.
std::vector<SpeedupRow> speedupBenchmark(const SpeedupConfig& config);

}  // namespace awsgd

#endif  // AWSGD_TIMEAWARE_HPP_
