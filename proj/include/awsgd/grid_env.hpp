#ifndef AWSGD_GRID_ENV_HPP_
#define AWSGD_GRID_ENV_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "awsgd/common.hpp"
#include "awsgd/errors.hpp"
#include "awsgd/samplers.hpp"

namespace awsgd {

// Square grid MDP. Start top-left, goal bottom-right; moving off the grid
// leaves the position unchanged. Every step costs -1; reaching the goal adds
// +1000 and a trap adds -1000 at the arrival step. Policies are tables of
// per-cell log-odds over the four moves, laid out as cell*4 + action.
struct GridWorld {
    Index side = 0;
    double discount = 0.99;
    Index maxSteps = 0;  // episode cap; 4*side*side by default
    Index start = 0;
    Index goal = 0;
    std::vector<Index> traps;

    // Traps are drawn uniformly without replacement, excluding start/goal;
    // count = max(1, side/25).
    static GridWorld make(Index side, std::uint64_t seed, double discount = 0.99,
                          Index maxSteps = -1);

    Index cells() const { return side * side; }
    Index policyDim() const { return cells() * 4; }
    bool isTrap(Index cell) const;
    bool isTerminal(Index cell) const { return cell == goal || isTrap(cell); }
    // Actions: 0 = up, 1 = right, 2 = down, 3 = left.
    Index nextCell(Index cell, int action) const;
};

enum class Terminal { Goal, Trap, Timeout };

struct Trajectory {
    std::vector<Index> states;   // state in which each action was taken
    std::vector<int> actions;
    std::vector<double> rewards;  // reward received after each action
    Terminal terminal = Terminal::Timeout;
    double returnValue = 0.0;     // discounted sum of rewards
    double behaviorLogProb = 0.0; // sum of log-probs under the rollout policy
};

// Probabilities of the 4 actions at one cell of a log-odds table.
Eigen::Vector4d actionProbs(const Vector& logits, Index cell);

// Simulate one episode under softmax(behaviorLogits).
Trajectory rollout(const GridWorld& world, const Vector& behaviorLogits, Rng& rng);

// Sum over steps of log pi(a_t | s_t) under the given table.
double pathLogProb(const GridWorld& world, const Vector& logits, const Trajectory& traj);

// accum += weight * sum_t (e_{a_t} - softmax(logits[s_t])), scattered into
// the policy table layout.
void pathScoreAccumulate(const GridWorld& world, const Vector& logits, const Trajectory& traj,
                         double weight, Vector& accum);

// Depth-first enumeration of every trajectory under softmax(logits) up to
// the episode cap. Probabilities of the emitted leaves sum to one. Intended
// for small grids only; throws SpaceTooLarge past the leaf budget.
void enumerateTrajectories(const GridWorld& world, const Vector& logits,
                           const std::function<void(const Trajectory&, double)>& emit,
                           std::int64_t leafBudget = 1000000);

// Trajectory-space importance sampler: draws full episodes under its own
// log-odds table tau and reports the density of each trajectory relative to
// the distribution induced by a reference policy table (bound by the caller,
// typically the live model being optimized). Trajectory densities are
// governed by the optimizer's importance-weight cap, not the atom density
// floor: long action sequences legitimately reach tiny probability ratios.
class PolicyTableSampler {
public:
    using Atom = Trajectory;

    PolicyTableSampler(const GridWorld& world, Vector tau0);

    void bindReference(const Vector* referenceLogits) { reference_ = referenceLogits; }

    Draw<Trajectory> draw(Rng& rng);
    double density(const Trajectory& traj) const;
    Vector score(const Trajectory& traj) const;
    void scoreAccumulate(const Trajectory& traj, double weight, Vector& accum) const;
    void applyTauStep(const Vector& delta);

    Index tauDim() const { return tau_.size(); }
    double tauDigest() const { return tau_.norm(); }
    const Vector& tau() const { return tau_; }
    void setTau(const Vector& tau);

    const GridWorld& world() const { return *world_; }
    std::int64_t drawCount() const { return drawCount_; }

private:
    const GridWorld* world_;
    const Vector* reference_ = nullptr;
    Vector tau_;
    std::int64_t drawCount_ = 0;
};

}  // namespace awsgd

#endif  // AWSGD_GRID_ENV_HPP_
