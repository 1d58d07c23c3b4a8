#ifndef AWSGD_TASKS_MATFAC_HPP_
#define AWSGD_TASKS_MATFAC_HPP_

#include <functional>

#include "awsgd/common.hpp"
#include "awsgd/errors.hpp"
#include "awsgd/sparse_grad.hpp"

namespace awsgd {

// Low-rank factorization of a dense matrix under squared loss. The model
// vector packs the factor rows contiguously: U (n x K) row-major, then
// V (m x K) row-major, so a sampled cell touches exactly 2K coordinates.
class MatFacTask {
public:
    using Atom = Cell;

    MatFacTask(Matrix y, int rank);

    Index rows() const { return y_.rows(); }
    Index cols() const { return y_.cols(); }
    int rank() const { return rank_; }
    Index dim() const { return (y_.rows() + y_.cols()) * rank_; }
    std::int64_t spaceSize() const { return static_cast<std::int64_t>(y_.rows()) * y_.cols(); }

    double lossAt(const Vector& w, const Cell& c) const {
        const double s = residual(w, c);
        return s * s;
    }

    void gradAt(const Vector& w, const Cell& c, SparseGrad& g) const;

    Cell sampleBase(Rng& rng) const {
        const Index i = uniformIndex(rng, y_.rows());
        const Index j = uniformIndex(rng, y_.cols());
        return {i, j};
    }

    void forEachAtom(const std::function<void(const Cell&, double)>& fn) const;

    // Full training loss, the exact double sum of squared residuals.
    double exactLoss(const Vector& w) const;

    // Factors drawn i.i.d. N(0, 1/K) so initial predictions are O(1)
    // regardless of the rank.
    Vector initialModel(Rng& rng) const;

    double residual(const Vector& w, const Cell& c) const;

    Matrix& y() { return y_; }
    const Matrix& y() const { return y_; }

private:
    void checkCell(const Cell& c) const;

    Matrix y_;
    int rank_;
};

}  // namespace awsgd

#endif  // AWSGD_TASKS_MATFAC_HPP_
