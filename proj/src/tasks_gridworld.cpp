#include "awsgd/tasks/gridworld.hpp"

#include <cmath>
#include <limits>

namespace awsgd {

void GridworldTask::gradAt(const Vector& w, const Trajectory& traj, SparseGrad& g) const {
    // d/dw [-return * log P_w(traj)]: score entries at every visited cell,
    // scaled by the negated return.
    const double scale = -traj.returnValue;
    g.reserve(4 * traj.actions.size());
    for (std::size_t t = 0; t < traj.actions.size(); ++t) {
        const Index cell = traj.states[t];
        const Eigen::Vector4d p = actionProbs(w, cell);
        for (int a = 0; a < 4; ++a) {
            const double indicator = (a == traj.actions[t]) ? 1.0 : 0.0;
            g.push(cell * 4 + a, scale * (indicator - p[a]));
        }
    }
}

PolicyGradResult policyGradient(const GridWorld& world, const Vector& wLogits,
                                const Trajectory& traj, double weightCap) {
    PolicyGradResult out;
    out.logRatio = pathLogProb(world, wLogits, traj) - traj.behaviorLogProb;
    const double omega = std::exp(out.logRatio);
    if (omega > weightCap) {
        throw WeightOverflowError("importance weight " + std::to_string(omega) + " above cap");
    }
    const double scale = -omega * traj.returnValue;
    out.d.reserve(4 * traj.actions.size());
    for (std::size_t t = 0; t < traj.actions.size(); ++t) {
        const Index cell = traj.states[t];
        const Eigen::Vector4d p = actionProbs(wLogits, cell);
        for (int a = 0; a < 4; ++a) {
            const double indicator = (a == traj.actions[t]) ? 1.0 : 0.0;
            out.d.push(cell * 4 + a, scale * (indicator - p[a]));
        }
    }
    out.d.compress();
    return out;
}

double successProbability(const GridWorld& world, const Vector& wLogits, std::int64_t rollouts,
                          Rng& rng) {
    std::int64_t hits = 0;
    for (std::int64_t r = 0; r < rollouts; ++r) {
        if (rollout(world, wLogits, rng).terminal == Terminal::Goal) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(rollouts);
}

double reinforceEpisode(const GridWorld& world, Vector& wLogits, double rho, Rng& rng) {
    const Trajectory traj = rollout(world, wLogits, rng);
    // w -= rho * (-return) * score  ==  ascend return * score
    pathScoreAccumulate(world, wLogits, traj, rho * traj.returnValue, wLogits);
    if (!wLogits.allFinite()) throw NonFiniteUpdateError("policy became non-finite");
    return traj.returnValue;
}

double expectedReturnEnumerated(const GridWorld& world, const Vector& logits) {
    double total = 0.0;
    enumerateTrajectories(world, logits, [&](const Trajectory& traj, double prob) {
        total += prob * traj.returnValue;
    });
    return total;
}

Vector policyGradientExpectationOnPolicy(const GridWorld& world, const Vector& wLogits) {
    Vector grad = Vector::Zero(world.policyDim());
    enumerateTrajectories(world, wLogits, [&](const Trajectory& traj, double prob) {
        pathScoreAccumulate(world, wLogits, traj, -prob * traj.returnValue, grad);
    });
    return grad;
}

Vector policyGradientExpectationOffPolicy(const GridWorld& world, const Vector& wLogits,
                                          const Vector& tauLogits, double weightCap) {
    Vector grad = Vector::Zero(world.policyDim());
    enumerateTrajectories(world, tauLogits, [&](const Trajectory& traj, double prob) {
        const PolicyGradResult pg = policyGradient(world, wLogits, traj, weightCap);
        pg.d.addTo(grad, prob);
    });
    return grad;
}

double varianceTraceGridworld(const GridWorld& world, const Vector& wLogits,
                              const Vector& tauLogits) {
    double total = 0.0;
    enumerateTrajectories(world, tauLogits, [&](const Trajectory& traj, double prob) {
        const PolicyGradResult pg =
            policyGradient(world, wLogits, traj, std::numeric_limits<double>::infinity());
        total += prob * pg.d.squaredNorm();
    });
    return total;
}

}  // namespace awsgd
