#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "awsgd/grid_env.hpp"
#include "awsgd/samplers.hpp"

using namespace awsgd;

namespace {

std::vector<int> imbalancedLabels(int n, int nPos) {
    std::vector<int> labels(n, -1);
    for (int i = 0; i < nPos; ++i) labels[i] = 1;
    return labels;
}

Vector randomTau(Index dim, Rng& rng, double scale = 1.5) {
    Vector t(dim);
    for (Index i = 0; i < dim; ++i) t[i] = scale * (2.0 * uniform01(rng) - 1.0);
    return t;
}

// Central finite difference of log density along one tau component.
template <class SetTau, class LogDensity>
double fdLogDensity(SetTau&& set, LogDensity&& logq, const Vector& tau, Index k,
                    double h = 1e-6) {
    Vector hi = tau, lo = tau;
    hi[k] += h;
    lo[k] -= h;
    set(hi);
    const double up = logq();
    set(lo);
    const double dn = logq();
    set(tau);
    return (up - dn) / (2.0 * h);
}

}  // namespace

TEST_CASE("softmax product with zero tau is the base distribution") {
    SoftmaxProductSampler s(4, 5);
    for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 5; ++j) {
            CHECK(s.density({i, j}) == 1.0);  // exactly
        }
    }
    // each atom drawn with probability 1/20
    Rng rng = makeRng(11);
    std::vector<int> counts(20, 0);
    const int draws = 200000;
    for (int t = 0; t < draws; ++t) {
        const auto d = s.draw(rng);
        ++counts[static_cast<std::size_t>(d.atom.row * 5 + d.atom.col)];
    }
    for (int c : counts) {
        const double freq = static_cast<double>(c) / draws;
        CHECK(freq == doctest::Approx(0.05).epsilon(0.08));
    }
}

TEST_CASE("label bias density closed forms") {
    const auto labels = imbalancedLabels(100, 10);
    LabelBiasSampler s(labels, 0.0);
    CHECK(s.density(0) == 5.0);  // (100/10) * sigmoid(0), exactly
    CHECK(s.density(99) == doctest::Approx(10.0 / 9.0 * 0.5).epsilon(1e-15));

    s.setTau(2.0);
    const double oracle = 10.0 / (1.0 + std::exp(-2.0));
    CHECK(s.density(0) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(s.density(0) == doctest::Approx(8.8080).epsilon(1e-4));
}

TEST_CASE("label bias positive draw frequency matches sigmoid(tau)") {
    const auto labels = imbalancedLabels(100, 10);
    LabelBiasSampler s(labels, 0.0);
    Rng rng = makeRng(42);
    const int draws = 1000000;
    int positives = 0;
    for (int t = 0; t < draws; ++t) {
        const auto d = s.draw(rng);
        if (s.label(d.atom) == 1) ++positives;
    }
    const double freq = static_cast<double>(positives) / draws;
    CHECK(freq == doctest::Approx(0.5).epsilon(0.004));  // binomial 3-sigma is 0.0015
}

TEST_CASE("softmax product closed-form density") {
    SoftmaxProductSampler s(2, 2);
    Vector tau(4);
    tau << std::log(3.0), 0.0, 0.0, 0.0;
    s.setTau(tau);
    CHECK(s.density({0, 0}) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(s.density({1, 0}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("densities normalize against the base distribution") {
    Rng rng = makeRng(7);

    SUBCASE("label bias") {
        const auto labels = imbalancedLabels(30, 4);
        for (int rep = 0; rep < 20; ++rep) {
            LabelBiasSampler s(labels, 3.0 * (2.0 * uniform01(rng) - 1.0));
            double total = 0.0;
            for (Index i = 0; i < 30; ++i) total += s.density(i) / 30.0;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("softmax product") {
        for (int rep = 0; rep < 20; ++rep) {
            SoftmaxProductSampler s(6, 4);
            s.setTau(randomTau(10, rng));
            double total = 0.0;
            for (Index i = 0; i < 6; ++i)
                for (Index j = 0; j < 4; ++j) total += s.density({i, j}) / 24.0;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("policy table over enumerated trajectories") {
        const GridWorld world = GridWorld::make(3, 5, 0.99, 4);
        const Vector ref = randomTau(world.policyDim(), rng, 0.7);
        PolicyTableSampler s(world, randomTau(world.policyDim(), rng, 0.7));
        s.bindReference(&ref);
        double total = 0.0;
        enumerateTrajectories(world, ref, [&](const Trajectory& traj, double prob) {
            total += prob * s.density(traj);
        });
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("score example: softmax blocks at uniform tau") {
    SoftmaxProductSampler s(4, 5);
    const Vector sc = s.score({2, 1});
    for (Index i = 0; i < 4; ++i) {
        const double expect = (i == 2 ? 1.0 : 0.0) - 0.25;
        CHECK(sc[i] == doctest::Approx(expect).epsilon(1e-15));
    }
    for (Index j = 0; j < 5; ++j) {
        const double expect = (j == 1 ? 1.0 : 0.0) - 0.2;
        CHECK(sc[4 + j] == doctest::Approx(expect).epsilon(1e-15));
    }
}

TEST_CASE("scores have zero mean under their own distribution") {
    Rng rng = makeRng(19);

    SUBCASE("softmax product 3x3") {
        for (int rep = 0; rep < 10; ++rep) {
            SoftmaxProductSampler s(3, 3);
            s.setTau(randomTau(6, rng));
            Vector mean = Vector::Zero(6);
            for (Index i = 0; i < 3; ++i) {
                for (Index j = 0; j < 3; ++j) {
                    const Cell c{i, j};
                    mean += (s.density(c) / 9.0) * s.score(c);
                }
            }
            CHECK(mean.lpNorm<Eigen::Infinity>() < 1e-10);
        }
    }
    SUBCASE("label bias") {
        const auto labels = imbalancedLabels(12, 3);
        for (int rep = 0; rep < 10; ++rep) {
            LabelBiasSampler s(labels, 2.0 * (2.0 * uniform01(rng) - 1.0));
            double mean = 0.0;
            for (Index i = 0; i < 12; ++i) mean += (s.density(i) / 12.0) * s.score(i)[0];
            CHECK(std::abs(mean) < 1e-10);
        }
    }
    SUBCASE("policy table") {
        const GridWorld world = GridWorld::make(2, 3, 0.99, 4);
        const Vector tau = randomTau(world.policyDim(), rng, 0.8);
        PolicyTableSampler s(world, tau);
        Vector ref = Vector::Zero(world.policyDim());
        s.bindReference(&ref);
        Vector mean = Vector::Zero(world.policyDim());
        enumerateTrajectories(world, tau, [&](const Trajectory& traj, double prob) {
            s.scoreAccumulate(traj, prob, mean);
        });
        CHECK(mean.lpNorm<Eigen::Infinity>() < 1e-10);
    }
}

TEST_CASE("score agrees with finite differences of log density") {
    Rng rng = makeRng(23);

    SUBCASE("softmax product") {
        SoftmaxProductSampler s(5, 3);
        for (int rep = 0; rep < 100; ++rep) {
            const Vector tau = randomTau(8, rng);
            s.setTau(tau);
            const Cell atom{uniformIndex(rng, 5), uniformIndex(rng, 3)};
            const Vector analytic = s.score(atom);
            // Tau blocks are shift-invariant, so perturbing one raw
            // component is an admissible chart for the finite difference.
            for (int probe = 0; probe < 3; ++probe) {
                const Index k = uniformIndex(rng, 8);
                const double fd = fdLogDensity([&](const Vector& t) { s.setTau(t); },
                                               [&] { return std::log(s.density(atom)); }, tau, k);
                CHECK(fd == doctest::Approx(analytic[k]).epsilon(1e-5));
            }
        }
    }
    SUBCASE("label bias") {
        const auto labels = imbalancedLabels(20, 6);
        LabelBiasSampler s(labels);
        for (int rep = 0; rep < 100; ++rep) {
            const double tau = 2.5 * (2.0 * uniform01(rng) - 1.0);
            s.setTau(tau);
            const Index atom = uniformIndex(rng, 20);
            const double analytic = s.score(atom)[0];
            Vector t1(1);
            t1 << tau;
            const double fd =
                fdLogDensity([&](const Vector& t) { s.setTau(t[0]); },
                             [&] { return std::log(s.density(atom)); }, t1, 0);
            CHECK(fd == doctest::Approx(analytic).epsilon(1e-5));
        }
    }
    SUBCASE("policy table") {
        const GridWorld world = GridWorld::make(3, 9, 0.99, 4);
        const Vector ref = randomTau(world.policyDim(), rng, 0.5);
        for (int rep = 0; rep < 100; ++rep) {
            const Vector tau = randomTau(world.policyDim(), rng, 0.8);
            PolicyTableSampler s(world, tau);
            s.bindReference(&ref);
            Rng drawRng = makeRng(900 + rep);
            const auto dr = s.draw(drawRng);
            const Vector analytic = s.score(dr.atom);
            for (int probe = 0; probe < 3; ++probe) {
                const Index k = uniformIndex(rng, world.policyDim());
                const double fd =
                    fdLogDensity([&](const Vector& t) { s.setTau(t); },
                                 [&] { return std::log(s.density(dr.atom)); }, tau, k);
                CHECK(fd == doctest::Approx(analytic[k]).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("shift invariance of softmax product tau blocks") {
    Rng rng = makeRng(31);
    SoftmaxProductSampler a(4, 6), b(4, 6);
    const Vector tau = randomTau(10, rng);
    Vector shifted = tau;
    shifted.head(4).array() += 17.5;
    shifted.tail(6).array() -= 3.25;
    a.setTau(tau);
    b.setTau(shifted);
    for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 6; ++j) {
            CHECK(a.density({i, j}) == doctest::Approx(b.density({i, j})).epsilon(1e-12));
        }
    }
}

TEST_CASE("draws are deterministic per seed") {
    SoftmaxProductSampler s1(7, 7), s2(7, 7);
    Rng a = makeRng(99), b = makeRng(99);
    for (int t = 0; t < 100; ++t) {
        const auto da = s1.draw(a);
        const auto db = s2.draw(b);
        CHECK(da.atom == db.atom);
        CHECK(da.density == db.density);
    }
}

TEST_CASE("sampler error paths") {
    CHECK_THROWS_AS(LabelBiasSampler(std::vector<int>(5, 1)), EmptyClassError);
    CHECK_THROWS_AS(LabelBiasSampler(std::vector<int>{}), EmptyClassError);

    const auto labels = imbalancedLabels(10, 2);
    LabelBiasSampler lb(labels);
    CHECK_THROWS_AS(lb.density(10), AtomOutOfRangeError);
    CHECK_THROWS_AS(lb.density(-1), AtomOutOfRangeError);

    SoftmaxProductSampler sp(3, 3);
    CHECK_THROWS_AS(sp.density({3, 0}), AtomOutOfRangeError);
    CHECK_THROWS_AS(sp.score({0, 5}), AtomOutOfRangeError);

    Vector bad(6);
    bad.setZero();
    bad[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sp.applyTauStep(bad), NonFiniteUpdateError);

    CHECK_THROWS_AS(detail::checkDensityFloor(1e-13), DensityFloorError);
    CHECK_NOTHROW(detail::checkDensityFloor(1e-11));
}

TEST_CASE("tau updates preserve the distribution after renormalization") {
    Rng rng = makeRng(63);
    SoftmaxProductSampler s(5, 5);
    Vector delta = randomTau(10, rng, 40.0);  // large drift
    const Vector before = s.tau();
    s.applyTauStep(delta);
    // stored tau has max 0 per block
    const Vector after = s.tau();
    CHECK(after.head(5).maxCoeff() == doctest::Approx(0.0));
    CHECK(after.tail(5).maxCoeff() == doctest::Approx(0.0));
    // relative log-probabilities match the unnormalized update
    SoftmaxProductSampler ref(5, 5);
    ref.setTau(before + delta);
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j)
            CHECK(s.density({i, j}) == doctest::Approx(ref.density({i, j})).epsilon(1e-12));
}
