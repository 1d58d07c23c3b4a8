#ifndef AWSGD_OPTIMIZER_HPP_
#define AWSGD_OPTIMIZER_HPP_

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>

#include "awsgd/common.hpp"
#include "awsgd/errors.hpp"
#include "awsgd/samplers.hpp"
#include "awsgd/schedule.hpp"
#include "awsgd/sparse_grad.hpp"

namespace awsgd {

template <class S>
concept SamplerFamily = requires(S s, const S cs, Rng& rng, const typename S::Atom& x,
                                 const Vector& delta, Vector& accum) {
    typename S::Atom;
    { s.draw(rng) } -> std::same_as<Draw<typename S::Atom>>;
    { cs.density(x) } -> std::same_as<double>;
    { cs.score(x) } -> std::same_as<Vector>;
    cs.scoreAccumulate(x, 1.0, accum);
    { cs.tauDim() } -> std::convertible_to<Index>;
    { cs.tauDigest() } -> std::convertible_to<double>;
    s.applyTauStep(delta);
};

template <class T>
concept TaskModel = requires(const T t, const Vector& w, const typename T::Atom& x,
                             SparseGrad& g) {
    typename T::Atom;
    { t.lossAt(w, x) } -> std::convertible_to<double>;
    t.gradAt(w, x, g);
    { t.dim() } -> std::convertible_to<Index>;
};

template <class T, class S>
concept TaskFor =
    TaskModel<T> && SamplerFamily<S> && std::same_as<typename T::Atom, typename S::Atom>;

// Tasks whose base distribution can be sampled directly (uniform over a
// finite space); required by the plain-SGD baseline.
template <class T>
concept UniformSampleable = TaskModel<T> && requires(const T t, Rng& rng) {
    { t.sampleBase(rng) } -> std::same_as<typename T::Atom>;
};

// Tasks with an enumerable space, for exact diagnostics.
template <class T>
concept Enumerable = TaskModel<T> && requires(const T t) {
    { t.spaceSize() } -> std::convertible_to<std::int64_t>;
};

struct ModelState {
    Vector w;
    Vector adagradAccum;  // sized lazily when an AdaGrad schedule is in use
    std::int64_t stepCount = 0;
    std::int64_t sampleCount = 0;
};

struct StepRecord {
    std::int64_t t = 0;           // step index, 1-based
    double loss = 0.0;            // batch-mean pointwise loss
    double dNormSq = 0.0;         // batch-mean squared norm of the weighted gradient
    double density = 0.0;         // batch-mean density of the draws
    double tauDigest = 0.0;
    double simSeconds = 0.0;      // simulated access time consumed by this step
    std::optional<double> evalLoss;
    bool skipped = false;         // importance-weight cap tripped; no update applied
};

struct StepOptions {
    Schedule rho;
    Schedule eta;
    int batch = 1;
    int innerSteps = 1;  // extra sampler-only updates per step, each on a fresh draw
    double dNormSqGuard = 1e12;
    double weightCap = std::numeric_limits<double>::infinity();
};

struct RunCounters {
    std::int64_t guardSkips = 0;     // per-sample tau contributions dropped by the norm guard
    std::int64_t overflowSkips = 0;  // whole steps dropped by the importance-weight cap
    double simSecondsTotal = 0.0;
    double wallSecondsTotal = 0.0;
};

namespace detail {

// Clock used by the untimed paths: no simulated cost, no wall component.
struct NullClock {
    template <class A>
    double simSeconds(const A&) const {
        return 0.0;
    }
    static constexpr bool timed = false;
};

inline double wallSecondsSince(std::chrono::steady_clock::time_point t0) {
    const auto dt = std::chrono::steady_clock::now() - t0;
    double s = std::chrono::duration<double>(dt).count();
    return s > 1e-9 ? s : 1e-9;  // clock resolution can report 0 for fast steps
}

}  // namespace detail

// One optimization run: a model, an importance sampler over the task's
// sample space, and the task itself. Each step draws a batch from the
// sampler, applies the density-weighted mean gradient to the model, then
// moves the sampler parameters along the score direction weighted by the
// squared gradient norms. The baseline step samples the base distribution
// and touches only the model.
template <class S, class T>
    requires TaskFor<T, S>
class StepEngine {
public:
    StepEngine(ModelState& model, S& sampler, T& task, StepOptions opts)
        : model_(&model), sampler_(&sampler), task_(&task), opts_(opts) {
        if (opts_.batch < 1) throw ConfigError("batch must be >= 1");
        if (opts_.innerSteps < 1) throw ConfigError("innerSteps must be >= 1");
        tauAccum_ = Vector::Zero(sampler.tauDim());
        if (opts_.eta.isAdaGrad()) etaAccum_ = Vector::Zero(sampler.tauDim());
    }

    StepRecord awsgdStep(Rng& rng) {
        detail::NullClock clock;
        return stepCore(rng, clock, /*adaptTau=*/true, /*baseline=*/false);
    }

    StepRecord sgdStep(Rng& rng)
        requires UniformSampleable<T>
    {
        detail::NullClock clock;
        return stepCore(rng, clock, /*adaptTau=*/false, /*baseline=*/true);
    }

    // Adaptive step whose sampler update is divided by the measured elapsed
    // time (simulated access cost plus wall time of the draw/model work), so
    // the sampler learns progress per unit time rather than per iteration.
    template <class Clock>
    StepRecord timeAwareStep(Rng& rng, Clock& clock) {
        return stepCore(rng, clock, /*adaptTau=*/true, /*baseline=*/false);
    }

    template <class Clock>
    StepRecord timedBaselineStep(Rng& rng, Clock& clock)
        requires UniformSampleable<T>
    {
        return stepCore(rng, clock, /*adaptTau=*/false, /*baseline=*/true);
    }

    const RunCounters& counters() const { return counters_; }
    ModelState& model() { return *model_; }
    S& sampler() { return *sampler_; }
    T& task() { return *task_; }
    const StepOptions& options() const { return opts_; }

private:
    template <class Clock>
    StepRecord stepCore(Rng& rng, Clock& clock, bool adaptTau, bool baseline) {
        constexpr bool timed = Clock::timed;
        const auto wallStart = std::chrono::steady_clock::now();

        const double rhoRate = opts_.rho.at(model_->sampleCount);
        const double etaRate = opts_.eta.at(model_->sampleCount);
        const bool moveTau = adaptTau && (opts_.eta.base != 0.0);

        StepRecord rec;
        rec.t = model_->stepCount + 1;
        if (moveTau) tauAccum_.setZero();
        gradAccum_.clear();

        double simSeconds = 0.0;
        const int batch = opts_.batch;
        for (int b = 0; b < batch; ++b) {
            typename S::Atom atom;
            double q = 1.0;
            if (baseline) {
                if constexpr (UniformSampleable<T>) {
                    atom = task_->sampleBase(rng);
                } else {
                    throw Error("task has no uniform base sampler");
                }
            } else {
                auto dr = sampler_->draw(rng);
                atom = std::move(dr.atom);
                q = dr.density;
            }
            simSeconds += clock.simSeconds(atom);
            if (!baseline && 1.0 / q > opts_.weightCap) {
                // Importance weight exploded; drop the whole step but keep
                // the draw so the stream position stays deterministic.
                ++counters_.overflowSkips;
                ++model_->stepCount;
                model_->sampleCount += b + 1;
                counters_.simSecondsTotal += simSeconds;
                if constexpr (timed) counters_.wallSecondsTotal += detail::wallSecondsSince(wallStart);
                rec.loss = task_->lossAt(model_->w, atom);
                rec.density = q;
                rec.tauDigest = sampler_->tauDigest();
                rec.simSeconds = simSeconds;
                rec.skipped = true;
                return rec;
            }
            sampleGrad_.clear();
            task_->gradAt(model_->w, atom, sampleGrad_);
            sampleGrad_.compress();
            if (q != 1.0) sampleGrad_.scale(1.0 / q);
            const double dnsq = sampleGrad_.squaredNorm();
            if (!std::isfinite(dnsq)) {
                throw NonFiniteUpdateError("weighted gradient non-finite; step size too large?");
            }
            rec.loss += task_->lossAt(model_->w, atom);
            rec.density += q;
            rec.dNormSq += dnsq;
            gradAccum_.append(sampleGrad_);
            if (moveTau) {
                if (dnsq <= opts_.dNormSqGuard) {
                    sampler_->scoreAccumulate(atom, dnsq, tauAccum_);
                } else {
                    ++counters_.guardSkips;
                }
            }
        }
        const double invB = 1.0 / static_cast<double>(batch);
        rec.loss *= invB;
        rec.density *= invB;
        rec.dNormSq *= invB;

        gradAccum_.compress();
        applyModelStep(rhoRate, invB);
        ++model_->stepCount;
        model_->sampleCount += batch;

        double elapsedDivisor = 1.0;
        if constexpr (timed) {
            const double wall = detail::wallSecondsSince(wallStart);
            counters_.wallSecondsTotal += wall;
            counters_.simSecondsTotal += simSeconds;
            elapsedDivisor = clock.elapsed(simSeconds, wall);
        }
        rec.simSeconds = simSeconds;

        if (moveTau) {
            applyTauUpdate(etaRate / elapsedDivisor, invB);
            for (int k = 1; k < opts_.innerSteps; ++k) innerTauStep(rng, etaRate / elapsedDivisor);
        }
        rec.tauDigest = sampler_->tauDigest();
        return rec;
    }

    void applyModelStep(double rhoRate, double invB) {
        auto& w = model_->w;
        if (opts_.rho.isAdaGrad()) {
            if (model_->adagradAccum.size() != w.size()) {
                model_->adagradAccum = Vector::Zero(w.size());
            }
            for (const auto& [idx, val] : gradAccum_.entries()) {
                const double g = val * invB;
                model_->adagradAccum[idx] += g * g;
                w[idx] -= rhoRate * g / (std::sqrt(model_->adagradAccum[idx]) + opts_.rho.eps);
                if (!std::isfinite(w[idx])) throw NonFiniteUpdateError("model parameter non-finite");
            }
        } else {
            const double coeff = -rhoRate * invB;
            for (const auto& [idx, val] : gradAccum_.entries()) {
                w[idx] += coeff * val;
                if (!std::isfinite(w[idx])) throw NonFiniteUpdateError("model parameter non-finite");
            }
        }
    }

    void applyTauUpdate(double etaRate, double invB) {
        if (opts_.eta.isAdaGrad()) {
            tauAccum_ *= invB;
            etaAccum_.array() += tauAccum_.array().square();
            tauAccum_.array() *= etaRate / (etaAccum_.array().sqrt() + opts_.eta.eps);
        } else {
            tauAccum_ *= etaRate * invB;
        }
        sampler_->applyTauStep(tauAccum_);
    }

    // Sampler-only refinement on a fresh draw, gradient taken at the
    // already-updated model.
    void innerTauStep(Rng& rng, double etaRate) {
        auto dr = sampler_->draw(rng);
        if (1.0 / dr.density > opts_.weightCap) {
            ++counters_.overflowSkips;
            ++model_->sampleCount;
            return;
        }
        sampleGrad_.clear();
        task_->gradAt(model_->w, dr.atom, sampleGrad_);
        sampleGrad_.compress();
        if (dr.density != 1.0) sampleGrad_.scale(1.0 / dr.density);
        const double dnsq = sampleGrad_.squaredNorm();
        ++model_->sampleCount;
        if (!std::isfinite(dnsq)) throw NonFiniteUpdateError("weighted gradient non-finite");
        if (dnsq > opts_.dNormSqGuard) {
            ++counters_.guardSkips;
            return;
        }
        tauAccum_.setZero();
        sampler_->scoreAccumulate(dr.atom, dnsq, tauAccum_);
        applyTauUpdate(etaRate, 1.0);
    }

    ModelState* model_;
    S* sampler_;
    T* task_;
    StepOptions opts_;
    RunCounters counters_;
    SparseGrad sampleGrad_;
    SparseGrad gradAccum_;
    Vector tauAccum_;
    Vector etaAccum_;
};

// One-shot step helpers mirroring the engine methods.
template <class S, class T>
    requires TaskFor<T, S>
StepRecord awsgdStep(ModelState& model, S& sampler, T& task, const StepOptions& opts, Rng& rng) {
    StepEngine<S, T> engine(model, sampler, task, opts);
    return engine.awsgdStep(rng);
}

template <UniformSampleable T>
StepRecord sgdStep(ModelState& model, T& task, const Schedule& rho, Rng& rng, int batch = 1) {
    StepOptions opts;
    opts.rho = rho;
    opts.batch = batch;
    // Degenerate sampler fills the engine's sampler slot; the baseline path
    // never touches it.
    if constexpr (std::same_as<typename T::Atom, Cell>) {
        SoftmaxProductSampler unused(1, 1);
        StepEngine<SoftmaxProductSampler, T> engine(model, unused, task, opts);
        return engine.sgdStep(rng);
    } else {
        LabelBiasSampler unused(std::vector<int>{1, -1});
        StepEngine<LabelBiasSampler, T> engine(model, unused, task, opts);
        return engine.sgdStep(rng);
    }
}

// Exact trace of the weighted-gradient second moment,
// sum_x P(x) ||grad_w f(x;w)||^2 / q(x;tau), by full enumeration.
template <class T, class S>
    requires TaskFor<T, S> && Enumerable<T>
double varianceTrace(const T& task, const Vector& w, const S& sampler,
                     std::int64_t atomBudget = 1000000) {
    if (task.spaceSize() > atomBudget) {
        throw SpaceTooLargeError("variance trace enumeration over atom budget");
    }
    double total = 0.0;
    SparseGrad g;
    task.forEachAtom([&](const typename T::Atom& x, double pmass) {
        g.clear();
        task.gradAt(w, x, g);
        g.compress();
        total += pmass * g.squaredNorm() / sampler.density(x);
    });
    return total;
}

// Exact gradient of varianceTrace with respect to the sampler parameters:
// -sum_x P(x) (||grad f||^2 / q) * score(x).
template <class T, class S>
    requires TaskFor<T, S> && Enumerable<T>
Vector varianceTraceTauGrad(const T& task, const Vector& w, const S& sampler,
                            std::int64_t atomBudget = 1000000) {
    if (task.spaceSize() > atomBudget) {
        throw SpaceTooLargeError("variance trace enumeration over atom budget");
    }
    Vector grad = Vector::Zero(sampler.tauDim());
    SparseGrad g;
    task.forEachAtom([&](const typename T::Atom& x, double pmass) {
        g.clear();
        task.gradAt(w, x, g);
        g.compress();
        const double weight = -pmass * g.squaredNorm() / sampler.density(x);
        sampler.scoreAccumulate(x, weight, grad);
    });
    return grad;
}

}  // namespace awsgd

#endif  // AWSGD_OPTIMIZER_HPP_
