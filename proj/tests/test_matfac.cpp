#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "awsgd/data/generators.hpp"
#include "awsgd/tasks/matfac.hpp"

using namespace awsgd;

namespace {

Vector randomVec(Index dim, Rng& rng, double scale = 1.0) {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = scale * (2.0 * uniform01(rng) - 1.0);
    return v;
}

}  // namespace

TEST_CASE("pointwise gradient closed forms") {
    SUBCASE("perfect cell has zero gradient") {
        Matrix y(1, 1);
        y << 7.0;
        MatFacTask task(y, 2);
        Vector w(4);
        w << 2, 1, 3, 1;  // u.v = 7
        SparseGrad g;
        task.gradAt(w, {0, 0}, g);
        g.compress();
        CHECK(g.squaredNorm() == 0.0);
        CHECK(task.lossAt(w, {0, 0}) == 0.0);
    }
    SUBCASE("hand-worked cell") {
        // u = (1,0), v = (2,0), y = 1: s = 1, grad_u = (4,0), grad_v = (2,0)
        Matrix y(1, 1);
        y << 1.0;
        MatFacTask task(y, 2);
        Vector w(4);
        w << 1, 0, 2, 0;
        SparseGrad g;
        task.gradAt(w, {0, 0}, g);
        g.compress();
        const Vector dense = g.toDense(4);
        CHECK(dense[0] == 4.0);
        CHECK(dense[1] == 0.0);
        CHECK(dense[2] == 2.0);
        CHECK(dense[3] == 0.0);
    }
}

TEST_CASE("accumulated sparse gradients match finite differences of the full loss") {
    Rng rng = makeRng(3);
    for (int rep = 0; rep < 3; ++rep) {
        const Index n = 8 + rep * 4, m = 6 + rep * 3;
        const int rank = 2 + rep;
        BlockMatrixSpec spec;
        spec.rows = n;
        spec.cols = m;
        spec.rank = rank;
        spec.blockSize = 3;
        spec.blockScale = 10.0;
        spec.seed = 100 + rep;
        MatFacTask task(genBlockMatrix(spec).y, rank);
        const Vector w = randomVec(task.dim(), rng);

        Vector assembled = Vector::Zero(task.dim());
        SparseGrad g;
        task.forEachAtom([&](const Cell& c, double) {
            g.clear();
            task.gradAt(w, c, g);
            g.compress();
            g.addTo(assembled);
        });

        const double h = 1e-5;
        for (int probe = 0; probe < 25; ++probe) {
            const Index k = uniformIndex(rng, task.dim());
            Vector hi = w, lo = w;
            hi[k] += h;
            lo[k] -= h;
            const double fd = (task.exactLoss(hi) - task.exactLoss(lo)) / (2.0 * h);
            CHECK(fd == doctest::Approx(assembled[k]).epsilon(1e-5));
        }
    }
}

TEST_CASE("exact loss closed form on a 2x2 instance") {
    Matrix y(2, 2);
    y << 1, 2, 2, 4;
    MatFacTask task(y, 1);
    Vector w = Vector::Ones(4);
    // residuals: 1-1=0, 1-2=-1, 1-2=-1, 1-4=-3
    CHECK(task.exactLoss(w) == doctest::Approx(0.0 + 1.0 + 1.0 + 9.0).epsilon(1e-15));
    CHECK(task.residual(w, {1, 1}) == -3.0);
}

TEST_CASE("exact loss vanishes when the matrix is the factor product") {
    BlockMatrixSpec spec;
    spec.rows = 12;
    spec.cols = 9;
    spec.rank = 3;
    spec.blockScale = 1.0;
    spec.seed = 5;
    const BlockMatrix data = genBlockMatrix(spec);
    MatFacTask task(data.y, 3);
    Vector w(task.dim());
    for (Index i = 0; i < 12; ++i)
        for (int k = 0; k < 3; ++k) w[i * 3 + k] = data.u(i, k);
    for (Index j = 0; j < 9; ++j)
        for (int k = 0; k < 3; ++k) w[(12 + j) * 3 + k] = data.v(j, k);
    CHECK(task.exactLoss(w) == doctest::Approx(0.0));
}

TEST_CASE("atom range checks") {
    Matrix y(2, 3);
    y.setZero();
    MatFacTask task(y, 1);
    const Vector w = Vector::Ones(task.dim());
    SparseGrad g;
    CHECK_THROWS_AS(task.lossAt(w, {2, 0}), AtomOutOfRangeError);
    CHECK_THROWS_AS(task.gradAt(w, {0, 3}, g), AtomOutOfRangeError);
}

TEST_CASE("initial factors keep predictions O(1) regardless of rank") {
    Matrix y = Matrix::Zero(40, 40);
    for (const int rank : {1, 5, 25}) {
        MatFacTask task(y, rank);
        Rng rng = makeRng(71);
        const Vector w = task.initialModel(rng);
        double meanSq = 0.0;
        for (Index i = 0; i < 40; ++i) {
            for (Index j = 0; j < 40; ++j) {
                const double p = task.residual(w, {i, j});
                meanSq += p * p;
            }
        }
        meanSq /= 1600.0;
        CHECK(meanSq < 10.0);
        CHECK(meanSq > 0.01);
    }
}
