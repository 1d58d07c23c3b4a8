#include "awsgd/tasks/logistic.hpp"

#include <cmath>

namespace awsgd {

LogisticTask::LogisticTask(Matrix features, std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
    if (static_cast<Index>(labels_.size()) != features_.rows()) {
        throw DimensionMismatchError("one label per feature row required");
    }
    bool pos = false, neg = false;
    for (int y : labels_) {
        if (y == 1) pos = true;
        else if (y == -1) neg = true;
        else throw ConfigError("labels must be +1 or -1");
    }
    if (!pos || !neg) throw EmptyClassError("both classes must be nonempty");
}

void LogisticTask::gradAt(const Vector& w, Index i, SparseGrad& g) const {
    checkIndex(i);
    const double y = static_cast<double>(labels_[static_cast<std::size_t>(i)]);
    const double z = y * features_.row(i).dot(w);
    const double coeff = (sigmoid(z) - 1.0) * y;
    g.reserve(static_cast<std::size_t>(features_.cols()));
    for (Index k = 0; k < features_.cols(); ++k) g.push(k, coeff * features_(i, k));
}

double LogisticTask::exactLoss(const Vector& w) const {
    double total = 0.0;
    for (Index i = 0; i < features_.rows(); ++i) {
        const double z = static_cast<double>(labels_[static_cast<std::size_t>(i)]) *
                         features_.row(i).dot(w);
        total += log1pExp(-z);
    }
    return total / static_cast<double>(features_.rows());
}

Vector LogisticTask::fullGradient(const Vector& w) const {
    Vector g = Vector::Zero(features_.cols());
    for (Index i = 0; i < features_.rows(); ++i) {
        const double y = static_cast<double>(labels_[static_cast<std::size_t>(i)]);
        const double z = y * features_.row(i).dot(w);
        g += (sigmoid(z) - 1.0) * y * features_.row(i).transpose();
    }
    return g / static_cast<double>(features_.rows());
}

void LogisticTask::checkIndex(Index i) const {
    if (i < 0 || i >= features_.rows()) throw AtomOutOfRangeError("item index out of range");
}

}  // namespace awsgd
