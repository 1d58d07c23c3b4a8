#ifndef AWSGD_TASKS_LOGISTIC_HPP_
#define AWSGD_TASKS_LOGISTIC_HPP_

#include <functional>
#include <vector>

#include "awsgd/common.hpp"
#include "awsgd/errors.hpp"
#include "awsgd/sparse_grad.hpp"

namespace awsgd {

// Binary logistic regression over precomputed feature rows with labels in
// {-1, +1}; log-loss log(1 + exp(-y w.x)).
class LogisticTask {
public:
    using Atom = Index;

    LogisticTask(Matrix features, std::vector<int> labels);

    Index size() const { return features_.rows(); }
    Index dim() const { return features_.cols(); }
    std::int64_t spaceSize() const { return features_.rows(); }
    const std::vector<int>& labels() const { return labels_; }

    double lossAt(const Vector& w, Index i) const {
        checkIndex(i);
        const double z = static_cast<double>(labels_[static_cast<std::size_t>(i)]) *
                         features_.row(i).dot(w);
        return log1pExp(-z);
    }

    void gradAt(const Vector& w, Index i, SparseGrad& g) const;

    Index sampleBase(Rng& rng) const { return uniformIndex(rng, features_.rows()); }

    void forEachAtom(const std::function<void(const Index&, double)>& fn) const {
        const double pmass = 1.0 / static_cast<double>(features_.rows());
        for (Index i = 0; i < features_.rows(); ++i) fn(i, pmass);
    }

    // Mean log-loss over the data set.
    double exactLoss(const Vector& w) const;

    // Dense mean gradient, for batch descent and tests.
    Vector fullGradient(const Vector& w) const;

private:
    void checkIndex(Index i) const;

    Matrix features_;
    std::vector<int> labels_;
};

}  // namespace awsgd

#endif  // AWSGD_TASKS_LOGISTIC_HPP_
