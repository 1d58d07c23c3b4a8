#include "awsgd/samplers.hpp"

#include <algorithm>
#include <cmath>

namespace awsgd {

LabelBiasSampler::LabelBiasSampler(const std::vector<int>& labels, double tau0)
    : labels_(labels), tau_(tau0) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == 1) {
            positives_.push_back(static_cast<Index>(i));
        } else if (labels_[i] == -1) {
            negatives_.push_back(static_cast<Index>(i));
        } else {
            throw AtomOutOfRangeError("labels must be +1 or -1");
        }
    }
    if (positives_.empty() || negatives_.empty()) {
        throw EmptyClassError("label-bias sampler needs both classes nonempty");
    }
    if (!std::isfinite(tau_)) throw NonFiniteUpdateError("tau0 not finite");
}

Draw<Index> LabelBiasSampler::draw(Rng& rng) {
    ++drawCount_;
    const bool positive = uniform01(rng) < sigmoid(tau_);
    const auto& cls = positive ? positives_ : negatives_;
    const Index i = cls[static_cast<std::size_t>(uniformIndex(rng, static_cast<Index>(cls.size())))];
    const double q = density(i);
    detail::checkDensityFloor(q);
    return {i, q};
}

double LabelBiasSampler::density(Index i) const {
    checkAtom(i);
    const double y = static_cast<double>(labels_[static_cast<std::size_t>(i)]);
    const double classCount =
        static_cast<double>(y > 0 ? positives_.size() : negatives_.size());
    return (static_cast<double>(labels_.size()) / classCount) * sigmoid(y * tau_);
}

Vector LabelBiasSampler::score(Index i) const {
    checkAtom(i);
    const double y = static_cast<double>(labels_[static_cast<std::size_t>(i)]);
    Vector s(1);
    s[0] = y * (1.0 - sigmoid(y * tau_));
    return s;
}

void LabelBiasSampler::scoreAccumulate(Index i, double weight, Vector& accum) const {
    checkAtom(i);
    const double y = static_cast<double>(labels_[static_cast<std::size_t>(i)]);
    accum[0] += weight * y * (1.0 - sigmoid(y * tau_));
}

void LabelBiasSampler::applyTauStep(const Vector& delta) {
    tau_ += delta[0];
    if (!std::isfinite(tau_)) throw NonFiniteUpdateError("label-bias tau became non-finite");
}

void LabelBiasSampler::setTau(double tau) {
    if (!std::isfinite(tau)) throw NonFiniteUpdateError("tau not finite");
    tau_ = tau;
}

void LabelBiasSampler::checkAtom(Index i) const {
    if (i < 0 || i >= static_cast<Index>(labels_.size())) {
        throw AtomOutOfRangeError("item index out of range");
    }
}

SoftmaxProductSampler::SoftmaxProductSampler(Index rows, Index cols) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0) throw AtomOutOfRangeError("sample space must be nonempty");
    tauRow_ = Vector::Zero(rows);
    tauCol_ = Vector::Zero(cols);
    rebuild();
}

void SoftmaxProductSampler::rebuild() {
    expRow_ = tauRow_.array().exp();
    expCol_ = tauCol_.array().exp();
    sumRow_ = expRow_.sum();
    sumCol_ = expCol_.sum();
    // After shift normalization the max exp is exactly 1, so the sums are
    // >= 1 and underflow to zero cannot happen; anything else is a fault.
    if (!(sumRow_ > 0.0) || !(sumCol_ > 0.0)) {
        throw NumericOverflowError("softmax normalization underflowed");
    }
    scaleRow_ = static_cast<double>(rows_) / sumRow_;
    scaleCol_ = static_cast<double>(cols_) / sumCol_;
    probRow_ = expRow_ / sumRow_;
    probCol_ = expCol_ / sumCol_;
    cdfRow_.resize(rows_);
    cdfCol_.resize(cols_);
    double acc = 0.0;
    for (Index i = 0; i < rows_; ++i) cdfRow_[i] = (acc += expRow_[i]);
    acc = 0.0;
    for (Index j = 0; j < cols_; ++j) cdfCol_[j] = (acc += expCol_[j]);
}

Index SoftmaxProductSampler::drawFromCdf(const Vector& cdf, double total, Rng& rng) {
    const double target = uniform01(rng) * total;
    const double* begin = cdf.data();
    const double* end = begin + cdf.size();
    const double* it = std::upper_bound(begin, end, target);
    if (it == end) --it;  // target can round up to the last prefix sum
    return static_cast<Index>(it - begin);
}

Draw<Cell> SoftmaxProductSampler::draw(Rng& rng) {
    ++drawCount_;
    const Index i = drawFromCdf(cdfRow_, sumRow_, rng);
    const Index j = drawFromCdf(cdfCol_, sumCol_, rng);
    const double q = (expRow_[i] * scaleRow_) * (expCol_[j] * scaleCol_);
    detail::checkDensityFloor(q);
    return {Cell{i, j}, q};
}

double SoftmaxProductSampler::density(const Cell& c) const {
    checkAtom(c);
    return (expRow_[c.row] * scaleRow_) * (expCol_[c.col] * scaleCol_);
}

Vector SoftmaxProductSampler::score(const Cell& c) const {
    checkAtom(c);
    Vector s(rows_ + cols_);
    s.head(rows_) = -probRow_;
    s.tail(cols_) = -probCol_;
    s[c.row] += 1.0;
    s[rows_ + c.col] += 1.0;
    return s;
}

void SoftmaxProductSampler::scoreAccumulate(const Cell& c, double weight, Vector& accum) const {
    checkAtom(c);
    accum.head(rows_) -= weight * probRow_;
    accum.tail(cols_) -= weight * probCol_;
    accum[c.row] += weight;
    accum[rows_ + c.col] += weight;
}

void SoftmaxProductSampler::applyTauStep(const Vector& delta) {
    tauRow_ += delta.head(rows_);
    tauCol_ += delta.tail(cols_);
    if (!tauRow_.allFinite() || !tauCol_.allFinite()) {
        throw NonFiniteUpdateError("softmax-product tau became non-finite");
    }
    tauRow_.array() -= tauRow_.maxCoeff();
    tauCol_.array() -= tauCol_.maxCoeff();
    rebuild();
}

Vector SoftmaxProductSampler::tau() const {
    Vector t(rows_ + cols_);
    t.head(rows_) = tauRow_;
    t.tail(cols_) = tauCol_;
    return t;
}

void SoftmaxProductSampler::setTau(const Vector& tau) {
    if (tau.size() != rows_ + cols_) throw DimensionMismatchError("tau dimension mismatch");
    if (!tau.allFinite()) throw NonFiniteUpdateError("tau not finite");
    tauRow_ = tau.head(rows_);
    tauCol_ = tau.tail(cols_);
    tauRow_.array() -= tauRow_.maxCoeff();
    tauCol_.array() -= tauCol_.maxCoeff();
    rebuild();
}

double SoftmaxProductSampler::tauDigest() const {
    return std::sqrt(tauRow_.squaredNorm() + tauCol_.squaredNorm());
}

void SoftmaxProductSampler::checkAtom(const Cell& c) const {
    if (c.row < 0 || c.row >= rows_ || c.col < 0 || c.col >= cols_) {
        throw AtomOutOfRangeError("cell out of range");
    }
}

}  // namespace awsgd
