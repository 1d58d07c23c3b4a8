#include "awsgd/data/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace awsgd {

BlockMatrix genBlockMatrix(const BlockMatrixSpec& spec) {
    if (spec.blockSize > std::min(spec.rows, spec.cols)) {
        throw ConfigError("block does not fit inside the matrix");
    }
    if (spec.rank < 1) throw ConfigError("rank must be >= 1");
    Rng rng = makeRng(spec.seed, 0xb10cULL);
    std::normal_distribution<double> gauss(0.0, 1.0);

    BlockMatrix out;
    out.u.resize(spec.rows, spec.rank);
    out.v.resize(spec.cols, spec.rank);
    for (Index i = 0; i < spec.rows; ++i)
        for (int k = 0; k < spec.rank; ++k) out.u(i, k) = gauss(rng);
    for (Index j = 0; j < spec.cols; ++j)
        for (int k = 0; k < spec.rank; ++k) out.v(j, k) = gauss(rng);
    out.y = out.u * out.v.transpose();

    out.blockRow = uniformIndex(rng, spec.rows - spec.blockSize + 1);
    out.blockCol = uniformIndex(rng, spec.cols - spec.blockSize + 1);
    if (spec.blockScale != 1.0) {
        out.y.block(out.blockRow, out.blockCol, spec.blockSize, spec.blockSize) *=
            spec.blockScale;
    }
    return out;
}

LogisticData genImbalancedLogistic(const LogisticDataSpec& spec) {
    if (spec.nPos < 1 || spec.nNeg < 1) throw EmptyClassError("both classes need members");
    if (spec.dim < 1) throw ConfigError("feature dimension must be >= 1");
    Rng rng = makeRng(spec.seed, 0x109dULL);
    std::normal_distribution<double> gauss(0.0, 1.0);

    LogisticData out;
    const Index n = spec.nPos + spec.nNeg;
    out.features.resize(n, spec.dim);
    out.labels.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const int y = i < spec.nPos ? 1 : -1;
        out.labels[static_cast<std::size_t>(i)] = y;
        for (Index k = 0; k < spec.dim; ++k) out.features(i, k) = gauss(rng);
        out.features(i, 0) += y * spec.separation / 2.0;
    }
    return out;
}

Matrix genColumnPattern(Index rows, Index cols, Index activeBegin, Index activeEnd, int rank,
                        double amplitude, std::uint64_t seed) {
    if (activeBegin < 0 || activeEnd > cols || activeBegin >= activeEnd) {
        throw ConfigError("active column range invalid");
    }
    Rng rng = makeRng(seed, 0xc01aULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix u(rows, rank), v(cols, rank);
    v.setZero();
    for (Index i = 0; i < rows; ++i)
        for (int k = 0; k < rank; ++k) u(i, k) = gauss(rng);
    for (Index j = activeBegin; j < activeEnd; ++j)
        for (int k = 0; k < rank; ++k) v(j, k) = amplitude * gauss(rng);
    return u * v.transpose();
}

NonStationaryStream::NonStationaryStream(Matrix replacement, std::int64_t switchStart,
                                         std::int64_t switchEnd, Index targetRows,
                                         std::uint64_t seed)
    : replacement_(std::move(replacement)), switchStart_(switchStart), switchEnd_(switchEnd) {
    if (switchEnd_ <= switchStart_) throw ConfigError("switch window must be nonempty");
    if (replacement_.rows() < 1) throw ConfigError("replacement matrix is empty");
    targetOrder_.resize(static_cast<std::size_t>(targetRows));
    std::iota(targetOrder_.begin(), targetOrder_.end(), Index{0});
    Rng rng = makeRng(seed, 0x57a7ULL);
    std::shuffle(targetOrder_.begin(), targetOrder_.end(), rng);
    sourceOrder_.resize(targetOrder_.size());
    for (std::size_t k = 0; k < sourceOrder_.size(); ++k) {
        sourceOrder_[k] = uniformIndex(rng, replacement_.rows());
    }
}

void NonStationaryStream::advance(std::int64_t samples, Matrix& target) {
    const auto nRows = static_cast<Index>(targetOrder_.size());
    Index want = 0;
    if (samples >= switchEnd_) {
        want = nRows;
    } else if (samples > switchStart_) {
        const double frac = static_cast<double>(samples - switchStart_) /
                            static_cast<double>(switchEnd_ - switchStart_);
        want = static_cast<Index>(frac * static_cast<double>(nRows));
    }
    for (; substituted_ < want; ++substituted_) {
        const Index row = targetOrder_[static_cast<std::size_t>(substituted_)];
        const Index src = sourceOrder_[static_cast<std::size_t>(substituted_)];
        target.row(row) = replacement_.row(src);
    }
}

}  // namespace awsgd
