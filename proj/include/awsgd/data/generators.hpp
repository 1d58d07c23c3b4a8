#ifndef AWSGD_DATA_GENERATORS_HPP_
#define AWSGD_DATA_GENERATORS_HPP_

#include <cstdint>
#include <vector>

#include "awsgd/common.hpp"
#include "awsgd/errors.hpp"

namespace awsgd {

// Rank-K product of unit-variance Gaussian factors with one square block
// scaled up, the benchmark with localized high variance. blockScale = 1
// leaves the product untouched.
struct BlockMatrixSpec {
    Index rows = 100;
    Index cols = 100;
    int rank = 10;
    Index blockSize = 20;
    double blockScale = 100.0;
    std::uint64_t seed = 0;
};

struct BlockMatrix {
    Matrix y;
    Matrix u;  // ground-truth factors before block scaling
    Matrix v;
    Index blockRow = 0;
    Index blockCol = 0;
};

BlockMatrix genBlockMatrix(const BlockMatrixSpec& spec);

// Two Gaussian clouds at +/- (separation/2) along the first axis, the
// positive class scarce. Stand-in for frozen feature vectors.
struct LogisticDataSpec {
    Index nPos = 100;
    Index nNeg = 1000;
    Index dim = 16;
    double separation = 2.0;
    std::uint64_t seed = 0;
};

struct LogisticData {
    Matrix features;
    std::vector<int> labels;
};

LogisticData genImbalancedLogistic(const LogisticDataSpec& spec);

// Low-rank pattern whose column support is restricted to
// [activeBegin, activeEnd); used as a synthetic stand-in for digit matrices
// in the non-stationary experiment.
Matrix genColumnPattern(Index rows, Index cols, Index activeBegin, Index activeEnd, int rank,
                        double amplitude, std::uint64_t seed);

// Progressive row substitution: as the consumed-sample count moves from
// switchStart to switchEnd, rows of the streamed matrix are replaced by rows
// of the replacement matrix, in a seeded random order without replacement.
class NonStationaryStream {
public:
    NonStationaryStream(Matrix replacement, std::int64_t switchStart, std::int64_t switchEnd,
                        Index targetRows, std::uint64_t seed);

    // Substitute rows of `target` up to the schedule position for `samples`.
    void advance(std::int64_t samples, Matrix& target);

    Index substituted() const { return substituted_; }
    std::int64_t switchStart() const { return switchStart_; }
    std::int64_t switchEnd() const { return switchEnd_; }

private:
    Matrix replacement_;
    std::int64_t switchStart_;
    std::int64_t switchEnd_;
    std::vector<Index> targetOrder_;   // substitution order over target rows
    std::vector<Index> sourceOrder_;   // which replacement row lands where
    Index substituted_ = 0;
};

}  // namespace awsgd

#endif  // AWSGD_DATA_GENERATORS_HPP_
