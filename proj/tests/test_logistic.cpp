#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "awsgd/data/generators.hpp"
#include "awsgd/optimizer.hpp"
#include "awsgd/tasks/logistic.hpp"

using namespace awsgd;

namespace {

LogisticTask smallTask(Index nPos, Index nNeg, Index dim, double sep, std::uint64_t seed) {
    LogisticDataSpec spec;
    spec.nPos = nPos;
    spec.nNeg = nNeg;
    spec.dim = dim;
    spec.separation = sep;
    spec.seed = seed;
    auto data = genImbalancedLogistic(spec);
    return {std::move(data.features), std::move(data.labels)};
}

}  // namespace

TEST_CASE("gradient at w = 0 is minus half the signed feature") {
    Matrix x(3, 4);
    x << 1.0, -2.0, 0.5, 3.0,
        -1.5, 0.25, 2.0, -0.5,
        0.75, 1.0, -1.0, 2.5;
    LogisticTask task(x, {1, -1, 1});
    const Vector w = Vector::Zero(4);
    SparseGrad g;
    for (Index i = 0; i < task.size(); ++i) {
        g.clear();
        task.gradAt(w, i, g);
        g.compress();
        const Vector dense = g.toDense(4);
        const double y = task.labels()[static_cast<std::size_t>(i)];
        for (Index k = 0; k < 4; ++k) {
            CHECK(dense[k] == doctest::Approx(-0.5 * y * x(i, k)).epsilon(1e-14));
        }
    }
}

TEST_CASE("confident correct example has a vanishing gradient") {
    Matrix x(2, 2);
    x << 5.0, 0.0, -5.0, 0.0;
    LogisticTask task(x, {1, -1});
    Vector w(2);
    w << 10.0, 0.0;  // y w.x = 50 for both rows
    SparseGrad g;
    for (Index i = 0; i < 2; ++i) {
        g.clear();
        task.gradAt(w, i, g);
        g.compress();
        CHECK(std::sqrt(g.squaredNorm()) < 1e-6 * 5.0);
    }
}

TEST_CASE("gradient matches finite differences of the pointwise loss") {
    LogisticTask task = smallTask(10, 30, 6, 1.5, 3);
    Rng rng = makeRng(9);
    for (int rep = 0; rep < 50; ++rep) {
        Vector w(6);
        for (Index k = 0; k < 6; ++k) w[k] = 2.0 * uniform01(rng) - 1.0;
        const Index i = uniformIndex(rng, task.size());
        SparseGrad g;
        task.gradAt(w, i, g);
        g.compress();
        const Vector dense = g.toDense(6);
        const double h = 1e-6;
        for (Index k = 0; k < 6; ++k) {
            Vector hi = w, lo = w;
            hi[k] += h;
            lo[k] -= h;
            const double fd = (task.lossAt(hi, i) - task.lossAt(lo, i)) / (2.0 * h);
            CHECK(fd == doctest::Approx(dense[k]).epsilon(1e-6));
        }
    }
}

TEST_CASE("single-example step matches the closed-form logistic update") {
    Matrix x(2, 3);
    x << 1.0, -2.0, 0.5, 0.25, 1.0, -1.0;
    LogisticTask task(x, {1, -1});
    Vector w0(3);
    w0 << 0.3, -0.1, 0.2;

    // find the seed whose uniform draw picks row 0
    std::uint64_t seed = 0;
    for (;; ++seed) {
        Rng probe = makeRng(seed, 0);
        if (task.sampleBase(probe) == 0) break;
    }
    ModelState model;
    model.w = w0;
    Rng rng = makeRng(seed, 0);
    sgdStep(model, task, Schedule::constant(0.1), rng);
    const double s = sigmoid(1.0 * x.row(0).dot(w0));
    for (Index k = 0; k < 3; ++k) {
        const double expect = w0[k] - 0.1 * (s - 1.0) * 1.0 * x(0, k);
        CHECK(model.w[k] == doctest::Approx(expect).epsilon(1e-15));
    }
}

TEST_CASE("long deterministic descent reaches a near-zero full gradient") {
    // Overlapping clouds keep the optimum finite.
    LogisticTask task = smallTask(20, 40, 4, 0.8, 5);
    Vector w = Vector::Zero(4);
    for (int it = 0; it < 200000; ++it) {
        const Vector g = task.fullGradient(w);
        w -= 4.0 * g;
        if (g.norm() < 1e-10) break;
    }
    CHECK(task.fullGradient(w).norm() < 1e-6);
}

TEST_CASE("construction validation") {
    Matrix x(2, 2);
    x.setZero();
    CHECK_THROWS_AS(LogisticTask(x, {1, 1}), EmptyClassError);
    CHECK_THROWS_AS(LogisticTask(x, {1}), DimensionMismatchError);
    CHECK_THROWS_AS(LogisticTask(x, {1, 2}), ConfigError);
}
