#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "awsgd/data/generators.hpp"
#include "awsgd/grid_env.hpp"
#include "awsgd/runloop.hpp"
#include "awsgd/tasks/gridworld.hpp"
#include "awsgd/tasks/matfac.hpp"

using namespace awsgd;

namespace {

Matrix smallBlockMatrix(Index n, Index m, int rank, std::uint64_t seed, double scale = 50.0) {
    BlockMatrixSpec spec;
    spec.rows = n;
    spec.cols = m;
    spec.rank = rank;
    spec.blockSize = std::max<Index>(2, n / 5);
    spec.blockScale = scale;
    spec.seed = seed;
    return genBlockMatrix(spec).y;
}

Vector randomTau(Index dim, Rng& rng, double scale = 1.0) {
    Vector t(dim);
    for (Index i = 0; i < dim; ++i) t[i] = scale * (2.0 * uniform01(rng) - 1.0);
    return t;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("single weighted step on a rank-1 factorization, hand-checked") {
    Matrix y(2, 2);
    y << 1, 2, 2, 4;
    MatFacTask task(y, 1);
    // w = (u0, u1, v0, v1), all ones

    // find a seed whose first draw is cell (0,1)
    std::uint64_t seed = 0;
    for (;; ++seed) {
        SoftmaxProductSampler probe(2, 2);
        Rng rng = makeRng(seed, 0);
        const auto d = probe.draw(rng);
        if (d.atom == Cell{0, 1}) break;
    }

    ModelState model;
    model.w = Vector::Ones(4);
    SoftmaxProductSampler sampler(2, 2);
    StepOptions opts;
    opts.rho = Schedule::constant(0.1);
    opts.eta = Schedule::constant(0.0);
    StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, task, opts);
    Rng rng = makeRng(seed, 0);
    const StepRecord rec = engine.awsgdStep(rng);

    // s = u0 v1 - y01 = 1 - 2 = -1, grad u0 = 2 v1 s = -2, grad v1 = 2 u0 s = -2
    CHECK(rec.loss == 1.0);
    CHECK(rec.density == 1.0);
    CHECK(model.w[0] == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(model.w[1] == 1.0);
    CHECK(model.w[2] == 1.0);
    CHECK(model.w[3] == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(rec.dNormSq == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("weighted gradient is unbiased for any sampler parameters") {
    const Matrix y = smallBlockMatrix(5, 5, 2, 3);
    MatFacTask task(y, 2);
    Rng rng = makeRng(31);
    const Vector w = randomTau(task.dim(), rng, 0.8);

    Vector full = Vector::Zero(task.dim());
    SparseGrad g;
    task.forEachAtom([&](const Cell& c, double pmass) {
        g.clear();
        task.gradAt(w, c, g);
        g.compress();
        g.addTo(full, pmass);
    });

    for (int rep = 0; rep < 20; ++rep) {
        SoftmaxProductSampler sampler(5, 5);
        sampler.setTau(randomTau(10, rng));
        Vector expectation = Vector::Zero(task.dim());
        task.forEachAtom([&](const Cell& c, double pmass) {
            g.clear();
            task.gradAt(w, c, g);
            g.compress();
            const double q = sampler.density(c);
            g.addTo(expectation, pmass * q / q);  // P(x) q(x) * (grad/q)
        });
        CHECK((expectation - full).lpNorm<Eigen::Infinity>() < 1e-10);
    }
}

TEST_CASE("frozen uniform adaptive run is bit-identical to the baseline") {
    const Matrix y = smallBlockMatrix(6, 5, 2, 5);
    MatFacTask taskA(y, 2), taskB(y, 2);

    StepOptions opts;
    opts.rho = Schedule::inverseTime(2.0, 15.0);
    opts.eta = Schedule::constant(0.0);
    opts.batch = 3;

    ModelState modelA, modelB;
    {
        Rng mr = makeRng(7, 1);
        modelA.w = taskA.initialModel(mr);
    }
    modelB.w = modelA.w;

    SoftmaxProductSampler samplerA(6, 5), samplerB(6, 5);
    StepEngine<SoftmaxProductSampler, MatFacTask> engineA(modelA, samplerA, taskA, opts);
    StepEngine<SoftmaxProductSampler, MatFacTask> engineB(modelB, samplerB, taskB, opts);
    Rng rngA = makeRng(7, 2), rngB = makeRng(7, 2);
    for (int t = 0; t < 100; ++t) {
        engineA.awsgdStep(rngA);
        engineB.sgdStep(rngB);
        REQUIRE(std::memcmp(modelA.w.data(), modelB.w.data(),
                            sizeof(double) * static_cast<std::size_t>(modelA.w.size())) == 0);
    }
}

TEST_CASE("zero gradient at a solved factorization leaves the model unchanged") {
    Rng rng = makeRng(4);
    Vector w(6);  // u = [[1,2]], v rows [[3,-1],[0.5,2]] -> y = u v^T
    w << 1, 2, 3, -1, 0.5, 2;
    Matrix y(1, 2);
    y << 1 * 3 + 2 * (-1), 1 * 0.5 + 2 * 2;
    MatFacTask task(y, 2);
    ModelState model;
    model.w = w;
    const StepRecord rec = sgdStep(model, task, Schedule::constant(0.5), rng);
    CHECK(rec.loss == 0.0);
    for (Index i = 0; i < 6; ++i) CHECK(model.w[i] == w[i]);
}

TEST_CASE("batched step applies the mean of per-sample weighted gradients") {
    const Matrix y = smallBlockMatrix(5, 4, 2, 11);
    MatFacTask task(y, 2);
    Rng initRng = makeRng(8, 1);
    const Vector w0 = task.initialModel(initRng);
    const double rho = 0.05;
    const int B = 4;

    // replicate the engine's draw/accumulate order by hand
    SoftmaxProductSampler shadow(5, 4);
    Rng shadowRng = makeRng(8, 2);
    SparseGrad accum, g;
    for (int b = 0; b < B; ++b) {
        const auto d = shadow.draw(shadowRng);
        g.clear();
        task.gradAt(w0, d.atom, g);
        g.compress();
        if (d.density != 1.0) g.scale(1.0 / d.density);
        accum.append(g);
    }
    accum.compress();
    Vector expected = w0;
    accum.addTo(expected, -rho / B);

    ModelState model;
    model.w = w0;
    SoftmaxProductSampler sampler(5, 4);
    StepOptions opts;
    opts.rho = Schedule::constant(rho);
    opts.eta = Schedule::constant(0.0);
    opts.batch = B;
    StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, task, opts);
    Rng rng = makeRng(8, 2);
    engine.awsgdStep(rng);
    for (Index i = 0; i < model.w.size(); ++i) {
        CHECK(model.w[i] == doctest::Approx(expected[i]).epsilon(1e-14));
    }
}

TEST_CASE("one draw per inner step") {
    const Matrix y = smallBlockMatrix(5, 4, 2, 13);
    MatFacTask task(y, 2);
    ModelState model;
    Rng initRng = makeRng(9, 1);
    model.w = task.initialModel(initRng);
    SoftmaxProductSampler sampler(5, 4);
    StepOptions opts;
    opts.rho = Schedule::constant(0.01);
    opts.eta = Schedule::constant(1e-6);
    opts.batch = 3;
    opts.innerSteps = 2;
    StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, task, opts);
    Rng rng = makeRng(9, 2);
    engine.awsgdStep(rng);
    CHECK(sampler.drawCount() == 4);  // batch + (innerSteps - 1)
    CHECK(model.sampleCount == 4);
}

TEST_CASE("variance trace closed forms and finite-difference gradient") {
    const Matrix y = smallBlockMatrix(4, 3, 2, 17);
    MatFacTask task(y, 2);
    Rng rng = makeRng(23);
    const Vector w = randomTau(task.dim(), rng, 0.7);

    SUBCASE("uniform sampler reduces to the plain second moment") {
        SoftmaxProductSampler uniform(4, 3);
        double direct = 0.0;
        SparseGrad g;
        task.forEachAtom([&](const Cell& c, double pmass) {
            g.clear();
            task.gradAt(w, c, g);
            g.compress();
            direct += pmass * g.squaredNorm();
        });
        CHECK(varianceTrace(task, w, uniform) == doctest::Approx(direct).epsilon(1e-14));
    }

    SUBCASE("analytic tau gradient matches central differences") {
        SoftmaxProductSampler sampler(4, 3);
        const Vector tau = randomTau(7, rng, 0.9);
        sampler.setTau(tau);
        const Vector analytic = varianceTraceTauGrad(task, w, sampler);
        const double h = 1e-5;
        for (Index k = 0; k < 7; ++k) {
            Vector hi = tau, lo = tau;
            hi[k] += h;
            lo[k] -= h;
            SoftmaxProductSampler up(4, 3), dn(4, 3);
            up.setTau(hi);
            dn.setTau(lo);
            const double fd =
                (varianceTrace(task, w, up) - varianceTrace(task, w, dn)) / (2.0 * h);
            CHECK(fd == doctest::Approx(analytic[k]).epsilon(1e-6));
        }
    }

    SUBCASE("space budget is enforced") {
        SoftmaxProductSampler uniform(4, 3);
        CHECK_THROWS_AS(varianceTrace(task, w, uniform, 5), SpaceTooLargeError);
    }
}

TEST_CASE("sampler-only updates descend the variance trace") {
    const Matrix y = smallBlockMatrix(20, 20, 3, 29, 50.0);
    MatFacTask task(y, 3);
    ModelState model;
    Rng initRng = makeRng(12, 1);
    model.w = task.initialModel(initRng);
    const Vector w = model.w;

    SoftmaxProductSampler sampler(20, 20);
    const double before = varianceTrace(task, w, sampler);
    StepOptions opts;
    opts.rho = Schedule::constant(0.0);  // freeze the model
    opts.eta = Schedule::constant(2e-9);
    StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, task, opts);
    Rng rng = makeRng(12, 2);
    for (int t = 0; t < 10000; ++t) engine.awsgdStep(rng);
    const double after = varianceTrace(task, w, sampler);
    CHECK(after < before);
    for (Index i = 0; i < w.size(); ++i) CHECK(model.w[i] == w[i]);
}

TEST_CASE("adagrad accumulator never decreases") {
    const Matrix y = smallBlockMatrix(6, 6, 2, 37);
    MatFacTask task(y, 2);
    ModelState model;
    Rng initRng = makeRng(14, 1);
    model.w = task.initialModel(initRng);
    SoftmaxProductSampler sampler(6, 6);
    StepOptions opts;
    opts.rho = Schedule::adagrad(0.1);
    opts.eta = Schedule::constant(1e-6);
    StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, task, opts);
    Rng rng = makeRng(14, 2);
    Vector prev = Vector::Zero(task.dim());
    for (int t = 0; t < 200; ++t) {
        engine.awsgdStep(rng);
        REQUIRE(model.adagradAccum.size() == task.dim());
        for (Index i = 0; i < prev.size(); ++i) REQUIRE(model.adagradAccum[i] >= prev[i]);
        prev = model.adagradAccum;
    }
}

TEST_CASE("runaway step sizes raise NonFiniteUpdate") {
    const Matrix y = smallBlockMatrix(5, 5, 2, 41);
    MatFacTask task(y, 2);
    ModelState model;
    Rng initRng = makeRng(15, 1);
    model.w = task.initialModel(initRng);
    SoftmaxProductSampler sampler(5, 5);
    StepOptions opts;
    opts.rho = Schedule::constant(1e300);
    opts.eta = Schedule::constant(0.0);
    StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, task, opts);
    Rng rng = makeRng(15, 2);
    CHECK_THROWS_AS(
        [&] {
            for (int t = 0; t < 10; ++t) engine.awsgdStep(rng);
        }(),
        NonFiniteUpdateError);
}

TEST_CASE("gradient norm guard skips only the sampler update") {
    const Matrix y = smallBlockMatrix(5, 5, 2, 43);
    MatFacTask task(y, 2);
    ModelState model;
    Rng initRng = makeRng(16, 1);
    model.w = task.initialModel(initRng);
    SoftmaxProductSampler sampler(5, 5);
    StepOptions opts;
    opts.rho = Schedule::constant(0.001);
    opts.eta = Schedule::constant(1e-6);
    opts.dNormSqGuard = 1e-12;  // everything trips the guard
    StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, task, opts);
    Rng rng = makeRng(16, 2);
    const Vector w0 = model.w;
    engine.awsgdStep(rng);
    CHECK(engine.counters().guardSkips == 1);
    CHECK(sampler.tauDigest() == 0.0);            // tau untouched
    CHECK((model.w - w0).lpNorm<Eigen::Infinity>() > 0.0);  // model still moved
}

TEST_CASE("importance-weight cap skips the whole step and counts it") {
    const GridWorld world = GridWorld::make(2, 3, 0.99, 8);
    GridworldTask task(world);
    ModelState model;
    model.w = Vector::Zero(world.policyDim());
    // bias the target policy so trajectory ratios leave 1
    Rng wRng = makeRng(17, 1);
    for (Index i = 0; i < model.w.size(); ++i) model.w[i] = 2.0 * (2.0 * uniform01(wRng) - 1.0);
    const Vector w0 = model.w;

    PolicyTableSampler sampler(world, Vector::Zero(world.policyDim()));
    sampler.bindReference(&model.w);
    StepOptions opts;
    opts.rho = Schedule::constant(1e-5);
    opts.eta = Schedule::constant(1e-9);
    opts.weightCap = 1.0;  // any ratio above 1 skips
    StepEngine<PolicyTableSampler, GridworldTask> engine(model, sampler, task, opts);
    Rng rng = makeRng(17, 2);
    std::int64_t skipped = 0;
    for (int t = 0; t < 60; ++t) {
        const Vector before = model.w;
        const StepRecord rec = engine.awsgdStep(rng);
        if (rec.skipped) {
            ++skipped;
            CHECK((model.w - before).lpNorm<Eigen::Infinity>() == 0.0);
        }
    }
    CHECK(skipped > 0);
    CHECK(engine.counters().overflowSkips == skipped);
}

TEST_CASE("run loop basics") {
    const Matrix y = smallBlockMatrix(6, 6, 2, 47);

    SUBCASE("zero steps changes nothing and writes only the header") {
        MatFacTask task(y, 2);
        ModelState model;
        Rng initRng = makeRng(18, 1);
        model.w = task.initialModel(initRng);
        const Vector w0 = model.w;
        SoftmaxProductSampler sampler(6, 6);
        StepOptions opts;
        opts.rho = Schedule::constant(0.01);
        opts.eta = Schedule::constant(1e-6);
        StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, task, opts);
        Rng rng = makeRng(18, 2);
        const auto dir = std::filesystem::temp_directory_path() / "awsgd_test_rl0";
        std::filesystem::create_directories(dir);
        {
            CsvWriter metrics(dir / "m.csv", kStepMetricsHeader);
            const RunResult r = runLoop(engine, Algorithm::AwSgd, 0, rng, &metrics);
            CHECK(r.steps == 0);
        }
        for (Index i = 0; i < w0.size(); ++i) CHECK(model.w[i] == w0[i]);
        CHECK(slurp(dir / "m.csv") == std::string(kStepMetricsHeader) + "\n");
    }

    SUBCASE("identical seeds give byte-identical metrics") {
        const auto dir = std::filesystem::temp_directory_path() / "awsgd_test_rl1";
        std::filesystem::create_directories(dir);
        auto runOnce = [&](const std::filesystem::path& file) {
            MatFacTask task(y, 2);
            ModelState model;
            Rng initRng = makeRng(19, 1);
            model.w = task.initialModel(initRng);
            SoftmaxProductSampler sampler(6, 6);
            StepOptions opts;
            opts.rho = Schedule::inverseTime(1.0, 18.0);
            opts.eta = Schedule::constant(1e-7);
            opts.batch = 4;
            StepEngine<SoftmaxProductSampler, MatFacTask> engine(model, sampler, task, opts);
            Rng rng = makeRng(19, 2);
            CsvWriter metrics(file, kStepMetricsHeader);
            LoopHooks hooks;
            hooks.evalEvery = 5;
            hooks.evaluate = [&] { return task.exactLoss(model.w); };
            runLoop(engine, Algorithm::AwSgd, 40, rng, &metrics, hooks);
        };
        runOnce(dir / "a.csv");
        runOnce(dir / "b.csv");
        const std::string a = slurp(dir / "a.csv");
        CHECK(!a.empty());
        CHECK(a == slurp(dir / "b.csv"));
    }
}
