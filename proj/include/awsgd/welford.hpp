#ifndef AWSGD_WELFORD_HPP_
#define AWSGD_WELFORD_HPP_

#include <cmath>
#include <cstdint>

namespace awsgd {

// Single-pass running mean/variance (Welford). Stable at 1e6+ samples.
struct Welford {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    // Unbiased sample variance; requires n >= 2.
    double variance() const { return m2 / static_cast<double>(n - 1); }

    // Standard error of the running mean; requires n >= 2.
    double meanStdDev() const { return std::sqrt(variance() / static_cast<double>(n)); }
};

}  // namespace awsgd

#endif  // AWSGD_WELFORD_HPP_
