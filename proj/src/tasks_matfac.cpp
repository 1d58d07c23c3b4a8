#include "awsgd/tasks/matfac.hpp"

#include <cmath>

namespace awsgd {

MatFacTask::MatFacTask(Matrix y, int rank) : y_(std::move(y)), rank_(rank) {
    if (rank_ < 1) throw ConfigError("rank must be >= 1");
    if (y_.rows() < 1 || y_.cols() < 1) throw ConfigError("matrix must be nonempty");
}

double MatFacTask::residual(const Vector& w, const Cell& c) const {
    checkCell(c);
    const auto u = w.segment(c.row * rank_, rank_);
    const auto v = w.segment((y_.rows() + c.col) * rank_, rank_);
    return u.dot(v) - y_(c.row, c.col);
}

void MatFacTask::gradAt(const Vector& w, const Cell& c, SparseGrad& g) const {
    checkCell(c);
    const Index uBase = c.row * rank_;
    const Index vBase = (y_.rows() + c.col) * rank_;
    const auto u = w.segment(uBase, rank_);
    const auto v = w.segment(vBase, rank_);
    const double s = u.dot(v) - y_(c.row, c.col);
    const double twoS = 2.0 * s;
    g.reserve(2 * static_cast<std::size_t>(rank_));
    for (int k = 0; k < rank_; ++k) g.push(uBase + k, twoS * v[k]);
    for (int k = 0; k < rank_; ++k) g.push(vBase + k, twoS * u[k]);
}

void MatFacTask::forEachAtom(const std::function<void(const Cell&, double)>& fn) const {
    const double pmass = 1.0 / static_cast<double>(spaceSize());
    for (Index i = 0; i < y_.rows(); ++i) {
        for (Index j = 0; j < y_.cols(); ++j) fn(Cell{i, j}, pmass);
    }
}

double MatFacTask::exactLoss(const Vector& w) const {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMajor> u(w.data(), y_.rows(), rank_);
    const Eigen::Map<const RowMajor> v(w.data() + y_.rows() * rank_, y_.cols(), rank_);
    return (u * v.transpose() - y_).squaredNorm();
}

Vector MatFacTask::initialModel(Rng& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(rank_)));
    Vector w(dim());
    for (Index i = 0; i < w.size(); ++i) w[i] = gauss(rng);
    return w;
}

void MatFacTask::checkCell(const Cell& c) const {
    if (c.row < 0 || c.row >= y_.rows() || c.col < 0 || c.col >= y_.cols()) {
        throw AtomOutOfRangeError("cell out of range");
    }
}

}  // namespace awsgd
