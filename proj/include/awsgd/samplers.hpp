#ifndef AWSGD_SAMPLERS_HPP_
#define AWSGD_SAMPLERS_HPP_

#include <cstdint>
#include <vector>

#include "awsgd/common.hpp"
#include "awsgd/errors.hpp"

namespace awsgd {

// One accepted draw from an importance distribution: the atom, and the
// density q = dQ/dP at that atom. Scores are queried separately so hot
// paths that never adapt the distribution skip the score work entirely.
template <class A>
struct Draw {
    A atom;
    double density = 1.0;
};

// Below this density a draw is rejected with an error instead of clamped;
// clamping would bias every downstream estimator.
inline constexpr double kDensityFloor = 1e-12;

namespace detail {
inline void checkDensityFloor(double density) {
    if (density < kDensityFloor) {
        throw DensityFloorError("drawn atom density " + std::to_string(density) +
                                " below floor; importance distribution has starved part of the support");
    }
}
}  // namespace detail

// Two-class sampling bias over n labelled items. tau is the log-odd of
// drawing from the positive class; the base distribution P is uniform over
// all items, so q(i) = (n / n(y_i)) * sigmoid(y_i * tau).
class LabelBiasSampler {
public:
    using Atom = Index;

    explicit LabelBiasSampler(const std::vector<int>& labels, double tau0 = 0.0);

    Draw<Index> draw(Rng& rng);
    double density(Index i) const;
    Vector score(Index i) const;
    void scoreAccumulate(Index i, double weight, Vector& accum) const;
    void applyTauStep(const Vector& delta);

    Index tauDim() const { return 1; }
    // Signed digest: the bias itself, the quantity worth tracking.
    double tauDigest() const { return tau_; }
    double tau() const { return tau_; }
    void setTau(double tau);

    Index size() const { return static_cast<Index>(labels_.size()); }
    int label(Index i) const { return labels_[static_cast<std::size_t>(i)]; }
    std::int64_t drawCount() const { return drawCount_; }

private:
    void checkAtom(Index i) const;

    std::vector<int> labels_;
    std::vector<Index> positives_;
    std::vector<Index> negatives_;
    double tau_ = 0.0;
    std::int64_t drawCount_ = 0;
};

// Independent row/column softmax distributions over an n x m grid. The base
// distribution is uniform over the n*m cells, so q(i,j) factorizes into
// (n * softmax(tauRow)_i) * (m * softmax(tauCol)_j). Each block of tau is
// kept shift-normalized (max component 0) so exp never overflows no matter
// how far the optimizer drifts it.
class SoftmaxProductSampler {
public:
    using Atom = Cell;

    SoftmaxProductSampler(Index rows, Index cols);

    Draw<Cell> draw(Rng& rng);
    double density(const Cell& c) const;
    Vector score(const Cell& c) const;
    void scoreAccumulate(const Cell& c, double weight, Vector& accum) const;
    void applyTauStep(const Vector& delta);

    Index tauDim() const { return rows_ + cols_; }
    double tauDigest() const;

    // tau layout: [row block; col block].
    Vector tau() const;
    void setTau(const Vector& tau);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    const Vector& rowProbabilities() const { return probRow_; }
    const Vector& colProbabilities() const { return probCol_; }
    std::int64_t drawCount() const { return drawCount_; }

private:
    void rebuild();
    void checkAtom(const Cell& c) const;
    static Index drawFromCdf(const Vector& cdf, double total, Rng& rng);

    Index rows_;
    Index cols_;
    Vector tauRow_, tauCol_;    // shift-normalized logits
    Vector expRow_, expCol_;    // exp(tau), max component exactly 1
    Vector cdfRow_, cdfCol_;    // prefix sums of exp for inverse-CDF draws
    Vector probRow_, probCol_;  // normalized probabilities
    double sumRow_ = 0.0, sumCol_ = 0.0;
    double scaleRow_ = 1.0, scaleCol_ = 1.0;  // n/sumRow, m/sumCol
    std::int64_t drawCount_ = 0;
};

}  // namespace awsgd

#endif  // AWSGD_SAMPLERS_HPP_
