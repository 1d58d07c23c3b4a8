#ifndef AWSGD_MVIS_HPP_
#define AWSGD_MVIS_HPP_

#include <cmath>
#include <cstdint>
#include <utility>

#include "awsgd/errors.hpp"
#include "awsgd/optimizer.hpp"
#include "awsgd/welford.hpp"

namespace awsgd {

struct MvisEstimate {
    double gammaHat = 0.0;
    double stdDev = 0.0;  // standard error of the running mean
};

struct MvisStepRecord {
    std::int64_t t = 0;
    double weightedValue = 0.0;
    double tauDigest = 0.0;
};

// Importance-sampling estimator of E_P[f] that tunes its own sampling
// distribution while estimating: each draw contributes f(x)/q(x) to the
// running mean, and the sampler parameters ascend the score direction
// weighted by the squared weighted value, shrinking the estimator variance.
// The running average spans the whole (changing) parameter sequence; each
// weighted value uses the density in effect when its draw was made, and
// history is never reweighted.
template <SamplerFamily S>
class MvisEstimator {
public:
    explicit MvisEstimator(S sampler) : sampler_(std::move(sampler)) {
        tauScratch_ = Vector::Zero(sampler_.tauDim());
    }

    // One draw: record the weighted value, then move tau by
    // eta * (f/q)^2 * score at the pre-update parameters.
    template <class F>
    MvisStepRecord step(const F& f, double eta, Rng& rng) {
        auto dr = sampler_.draw(rng);
        const double value = f(dr.atom);
        if (!std::isfinite(value)) throw NonFiniteUpdateError("integrand not finite at draw");
        const double weighted = value / dr.density;
        runningSum_ += weighted;
        moments_.add(weighted);
        ++t_;
        if (eta != 0.0) {
            const double factor = eta * weighted * weighted;
            if (!std::isfinite(factor)) {
                throw NonFiniteUpdateError("sampler update overflowed; eta too large");
            }
            tauScratch_.setZero();
            sampler_.scoreAccumulate(dr.atom, factor, tauScratch_);
            sampler_.applyTauStep(tauScratch_);
        }
        return {t_, weighted, sampler_.tauDigest()};
    }

    MvisEstimate estimate() const {
        if (t_ < 2) throw InsufficientSamplesError("estimate needs at least 2 samples");
        return {runningSum_ / static_cast<double>(t_), moments_.meanStdDev()};
    }

    std::int64_t samples() const { return t_; }
    S& sampler() { return sampler_; }
    const S& sampler() const { return sampler_; }
    const Welford& moments() const { return moments_; }

private:
    S sampler_;
    double runningSum_ = 0.0;
    Welford moments_;
    std::int64_t t_ = 0;
    Vector tauScratch_;
};

// Exact per-sample variance of the weighted value under the current
// parameters, sum_x P(x) f(x)^2 / q(x) - gamma^2, by enumeration. The
// estimator variance after T draws at fixed parameters is this divided by T.
template <class F, SamplerFamily S, class EnumerateFn>
double exactWeightedVariance(const F& f, const S& sampler, const EnumerateFn& forEachAtom) {
    double second = 0.0;
    double gamma = 0.0;
    forEachAtom([&](const typename S::Atom& x, double pmass) {
        const double v = f(x);
        gamma += pmass * v;
        second += pmass * v * v / sampler.density(x);
    });
    return second - gamma * gamma;
}

}  // namespace awsgd

#endif  // AWSGD_MVIS_HPP_
