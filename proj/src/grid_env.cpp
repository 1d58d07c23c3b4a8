#include "awsgd/grid_env.hpp"

#include <algorithm>
#include <cmath>

namespace awsgd {

GridWorld GridWorld::make(Index side, std::uint64_t seed, double discount, Index maxSteps) {
    if (side < 2) throw ConfigError("grid side must be >= 2");
    if (discount <= 0.0 || discount >= 1.0) throw ConfigError("discount must be in (0,1)");
    GridWorld w;
    w.side = side;
    w.discount = discount;
    w.maxSteps = maxSteps >= 0 ? maxSteps : 4 * side * side;
    w.start = 0;
    w.goal = side * side - 1;
    const Index nTraps = std::max<Index>(1, side / 25);
    Rng rng = makeRng(seed, 0xf2a9ULL);
    while (static_cast<Index>(w.traps.size()) < nTraps) {
        const Index cell = uniformIndex(rng, side * side);
        if (cell == w.start || cell == w.goal) continue;
        if (std::find(w.traps.begin(), w.traps.end(), cell) != w.traps.end()) continue;
        w.traps.push_back(cell);
    }
    std::sort(w.traps.begin(), w.traps.end());
    return w;
}

bool GridWorld::isTrap(Index cell) const {
    return std::binary_search(traps.begin(), traps.end(), cell);
}

Index GridWorld::nextCell(Index cell, int action) const {
    const Index r = cell / side;
    const Index c = cell % side;
    switch (action) {
        case 0: return r > 0 ? cell - side : cell;         // up
        case 1: return c + 1 < side ? cell + 1 : cell;     // right
        case 2: return r + 1 < side ? cell + side : cell;  // down
        case 3: return c > 0 ? cell - 1 : cell;            // left
        default: throw AtomOutOfRangeError("action out of range");
    }
}

Eigen::Vector4d actionProbs(const Vector& logits, Index cell) {
    Eigen::Vector4d x = logits.segment<4>(cell * 4);
    x.array() -= x.maxCoeff();
    Eigen::Vector4d e = x.array().exp();
    return e / e.sum();
}

namespace {

double actionLogProb(const Vector& logits, Index cell, int action) {
    Eigen::Vector4d x = logits.segment<4>(cell * 4);
    const double mx = x.maxCoeff();
    const double lse = std::log((x.array() - mx).exp().sum());
    return x[action] - mx - lse;
}

double stepReward(const GridWorld& world, Index arrival) {
    double r = -1.0;
    if (arrival == world.goal) r += 1000.0;
    else if (world.isTrap(arrival)) r -= 1000.0;
    return r;
}

}  // namespace

Trajectory rollout(const GridWorld& world, const Vector& behaviorLogits, Rng& rng) {
    Trajectory traj;
    traj.states.reserve(16);
    Index cur = world.start;
    double gamma = 1.0;
    for (Index t = 0; t < world.maxSteps; ++t) {
        const Eigen::Vector4d p = actionProbs(behaviorLogits, cur);
        const double u = uniform01(rng);
        int a = 0;
        double acc = 0.0;
        for (; a < 3; ++a) {
            acc += p[a];
            if (u < acc) break;
        }
        const Index next = world.nextCell(cur, a);
        const double r = stepReward(world, next);
        traj.states.push_back(cur);
        traj.actions.push_back(a);
        traj.rewards.push_back(r);
        traj.behaviorLogProb += std::log(p[a]);
        traj.returnValue += gamma * r;
        gamma *= world.discount;
        if (next == world.goal) {
            traj.terminal = Terminal::Goal;
            return traj;
        }
        if (world.isTrap(next)) {
            traj.terminal = Terminal::Trap;
            return traj;
        }
        cur = next;
    }
    traj.terminal = Terminal::Timeout;
    return traj;
}

double pathLogProb(const GridWorld& world, const Vector& logits, const Trajectory& traj) {
    (void)world;
    double lp = 0.0;
    for (std::size_t t = 0; t < traj.actions.size(); ++t) {
        lp += actionLogProb(logits, traj.states[t], traj.actions[t]);
    }
    return lp;
}

void pathScoreAccumulate(const GridWorld& world, const Vector& logits, const Trajectory& traj,
                         double weight, Vector& accum) {
    (void)world;
    for (std::size_t t = 0; t < traj.actions.size(); ++t) {
        const Index cell = traj.states[t];
        const Eigen::Vector4d p = actionProbs(logits, cell);
        accum.segment<4>(cell * 4) -= weight * p;
        accum[cell * 4 + traj.actions[t]] += weight;
    }
}

namespace {

struct Enumerator {
    const GridWorld& world;
    const Vector& logits;
    const std::function<void(const Trajectory&, double)>& emit;
    std::int64_t leafBudget;
    std::int64_t leaves = 0;
    Trajectory partial;

    void expand(Index cur, double prob, double gamma) {
        if (static_cast<Index>(partial.actions.size()) == world.maxSteps) {
            partial.terminal = Terminal::Timeout;
            emitLeaf(prob);
            return;
        }
        const Eigen::Vector4d p = actionProbs(logits, cur);
        for (int a = 0; a < 4; ++a) {
            const Index next = world.nextCell(cur, a);
            const double r = stepReward(world, next);
            partial.states.push_back(cur);
            partial.actions.push_back(a);
            partial.rewards.push_back(r);
            partial.behaviorLogProb += std::log(p[a]);
            partial.returnValue += gamma * r;
            if (next == world.goal) {
                partial.terminal = Terminal::Goal;
                emitLeaf(prob * p[a]);
            } else if (world.isTrap(next)) {
                partial.terminal = Terminal::Trap;
                emitLeaf(prob * p[a]);
            } else {
                expand(next, prob * p[a], gamma * world.discount);
            }
            partial.states.pop_back();
            partial.actions.pop_back();
            partial.rewards.pop_back();
            partial.behaviorLogProb -= std::log(p[a]);
            partial.returnValue -= gamma * r;
        }
    }

    void emitLeaf(double prob) {
        if (++leaves > leafBudget) {
            throw SpaceTooLargeError("trajectory enumeration exceeded leaf budget");
        }
        emit(partial, prob);
    }
};

}  // namespace

void enumerateTrajectories(const GridWorld& world, const Vector& logits,
                           const std::function<void(const Trajectory&, double)>& emit,
                           std::int64_t leafBudget) {
    Enumerator en{world, logits, emit, leafBudget, 0, {}};
    if (world.maxSteps == 0) {
        Trajectory empty;
        emit(empty, 1.0);
        return;
    }
    en.expand(world.start, 1.0, 1.0);
}

PolicyTableSampler::PolicyTableSampler(const GridWorld& world, Vector tau0)
    : world_(&world), tau_(std::move(tau0)) {
    if (tau_.size() != world.policyDim()) {
        throw DimensionMismatchError("policy table dimension mismatch");
    }
    if (!tau_.allFinite()) throw NonFiniteUpdateError("tau0 not finite");
}

Draw<Trajectory> PolicyTableSampler::draw(Rng& rng) {
    if (reference_ == nullptr) throw Error("policy sampler has no bound reference policy");
    ++drawCount_;
    Trajectory traj = rollout(*world_, tau_, rng);
    const double q = std::exp(traj.behaviorLogProb - pathLogProb(*world_, *reference_, traj));
    return {std::move(traj), q};
}

double PolicyTableSampler::density(const Trajectory& traj) const {
    if (reference_ == nullptr) throw Error("policy sampler has no bound reference policy");
    return std::exp(pathLogProb(*world_, tau_, traj) - pathLogProb(*world_, *reference_, traj));
}

Vector PolicyTableSampler::score(const Trajectory& traj) const {
    Vector s = Vector::Zero(tau_.size());
    pathScoreAccumulate(*world_, tau_, traj, 1.0, s);
    return s;
}

void PolicyTableSampler::scoreAccumulate(const Trajectory& traj, double weight,
                                         Vector& accum) const {
    pathScoreAccumulate(*world_, tau_, traj, weight, accum);
}

void PolicyTableSampler::applyTauStep(const Vector& delta) {
    tau_ += delta;
    if (!tau_.allFinite()) throw NonFiniteUpdateError("policy tau became non-finite");
}

void PolicyTableSampler::setTau(const Vector& tau) {
    if (tau.size() != tau_.size()) throw DimensionMismatchError("tau dimension mismatch");
    if (!tau.allFinite()) throw NonFiniteUpdateError("tau not finite");
    tau_ = tau;
}

}  // namespace awsgd
