#ifndef AWSGD_SPARSE_GRAD_HPP_
#define AWSGD_SPARSE_GRAD_HPP_

#include <algorithm>
#include <utility>
#include <vector>

#include "awsgd/common.hpp"

namespace awsgd {

// Gradient with few touched coordinates. Tasks fill it with push(); call
// compress() before using norms or applying, so duplicate indices merge in
// a deterministic order.
class SparseGrad {
public:
    void clear() {
        entries_.clear();
        compressed_ = true;
    }

    void reserve(std::size_t n) { entries_.reserve(n); }

    void push(Index idx, double value) {
        entries_.emplace_back(idx, value);
        compressed_ = false;
    }

    void compress() {
        if (compressed_) return;
        std::sort(entries_.begin(), entries_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t out = 0;
        for (std::size_t i = 0; i < entries_.size();) {
            Index idx = entries_[i].first;
            double sum = 0.0;
            while (i < entries_.size() && entries_[i].first == idx) {
                sum += entries_[i].second;
                ++i;
            }
            entries_[out++] = {idx, sum};
        }
        entries_.resize(out);
        compressed_ = true;
    }

    void scale(double a) {
        for (auto& e : entries_) e.second *= a;
    }

    double squaredNorm() const {
        double s = 0.0;
        for (const auto& e : entries_) s += e.second * e.second;
        return s;
    }

    // dest += coeff * this
    void addTo(Vector& dest, double coeff = 1.0) const {
        for (const auto& e : entries_) dest[e.first] += coeff * e.second;
    }

    // Merge another compressed/uncompressed gradient into this one.
    void append(const SparseGrad& other) {
        for (const auto& e : other.entries_) push(e.first, e.second);
    }

    bool allFinite() const {
        for (const auto& e : entries_)
            if (!std::isfinite(e.second)) return false;
        return true;
    }

    Vector toDense(Index dim) const {
        Vector v = Vector::Zero(dim);
        addTo(v);
        return v;
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<std::pair<Index, double>>& entries() const { return entries_; }
    std::vector<std::pair<Index, double>>& entries() { return entries_; }

private:
    std::vector<std::pair<Index, double>> entries_;
    bool compressed_ = true;
};

}  // namespace awsgd

#endif  // AWSGD_SPARSE_GRAD_HPP_
