#ifndef AWSGD_TASKS_GRIDWORLD_HPP_
#define AWSGD_TASKS_GRIDWORLD_HPP_

#include <cstdint>

#include "awsgd/grid_env.hpp"
#include "awsgd/schedule.hpp"
#include "awsgd/sparse_grad.hpp"

namespace awsgd {

// Episodic policy-gradient task: maximize the expected discounted return of
// the tabular softmax policy by minimizing f(trajectory) = -return. The
// pointwise gradient is the trajectory's score function scaled by -return;
// dividing by the behavior sampler's density turns it into the off-policy
// (importance-weighted) gradient.
class GridworldTask {
public:
    using Atom = Trajectory;

    explicit GridworldTask(GridWorld world) : world_(std::move(world)) {}

    Index dim() const { return world_.policyDim(); }

    double lossAt(const Vector&, const Trajectory& traj) const { return -traj.returnValue; }

    void gradAt(const Vector& w, const Trajectory& traj, SparseGrad& g) const;

    const GridWorld& world() const { return world_; }

private:
    GridWorld world_;
};

struct PolicyGradResult {
    SparseGrad d;        // importance-weighted gradient of -return
    double logRatio = 0; // log of the target/behavior trajectory probability ratio
};

// Off-policy gradient of one trajectory sampled under behaviorLogProb
// (recorded in the trajectory): d = -omega * return * score(target policy),
// omega = exp(log P_w - log Q_tau). Throws WeightOverflow past the cap;
// callers skip and count such steps.
PolicyGradResult policyGradient(const GridWorld& world, const Vector& wLogits,
                                const Trajectory& traj, double weightCap = 1e6);

// Monte Carlo probability that an episode under softmax(wLogits) ends at
// the goal.
double successProbability(const GridWorld& world, const Vector& wLogits, std::int64_t rollouts,
                          Rng& rng);

// One on-policy REINFORCE update: rollout under the current policy, then
// w -= rho * (-return) * score. Returns the episode's return.
double reinforceEpisode(const GridWorld& world, Vector& wLogits, double rho, Rng& rng);

// Exact enumeration diagnostics for small grids.
double expectedReturnEnumerated(const GridWorld& world, const Vector& logits);
Vector policyGradientExpectationOnPolicy(const GridWorld& world, const Vector& wLogits);
Vector policyGradientExpectationOffPolicy(const GridWorld& world, const Vector& wLogits,
                                          const Vector& tauLogits, double weightCap = 1e6);
// sum over trajectories of Q_tau(x) * ||d(x)||^2, the gradient-variance
// trace the behavior policy is tuned to shrink.
double varianceTraceGridworld(const GridWorld& world, const Vector& wLogits,
                              const Vector& tauLogits);

}  // namespace awsgd

#endif  // AWSGD_TASKS_GRIDWORLD_HPP_
