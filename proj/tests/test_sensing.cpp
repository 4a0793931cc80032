#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cscv/errors.hpp"
#include "cscv/kernels.hpp"
#include "cscv/rng.hpp"
#include "cscv/sensing.hpp"
#include "cscv/signal.hpp"

using cscv::DenseSignal;
using cscv::EnsembleKind;
using cscv::MeasurementEnsemble;

TEST_CASE("draw_ensemble is deterministic and seed-sensitive") {
    const auto a = cscv::draw_ensemble(20, 30, EnsembleKind::Gaussian, 0.5, 3);
    const auto b = cscv::draw_ensemble(20, 30, EnsembleKind::Gaussian, 0.5, 3);
    const auto c = cscv::draw_ensemble(20, 30, EnsembleKind::Gaussian, 0.5, 4);
    CHECK(*a.storage == *b.storage);
    CHECK(*a.storage != *c.storage);
}

TEST_CASE("rows depend only on their index, never on the row count") {
    const auto small = cscv::draw_ensemble(10, 25, EnsembleKind::Gaussian, 1.0, 8);
    const auto big = cscv::draw_ensemble(40, 25, EnsembleKind::Gaussian, 1.0, 8);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 25; ++j)
            REQUIRE(small.row(i)[j] == big.row(i)[j]);
}

TEST_CASE("bernoulli entries take exactly two values") {
    const double var = 0.04;
    const auto m = cscv::draw_ensemble(50, 40, EnsembleKind::Bernoulli, var, 5);
    const double mag = std::sqrt(var);
    int plus = 0;
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 40; ++j) {
            const double v = m.row(i)[j];
            REQUIRE((v == mag || v == -mag));
            plus += v > 0.0;
        }
    }
    CHECK(plus > 800);
    CHECK(plus < 1200);
}

TEST_CASE("gaussian entry variance is honored") {
    const int rows = 2000;
    const auto m = cscv::draw_ensemble(rows, 1, EnsembleKind::Gaussian, 1.0 / rows, 12);
    double s = 0.0;
    for (int i = 0; i < rows; ++i)
        s += m.row(i)[0] * m.row(i)[0];
    CHECK(s == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("split partitions the budget with per-role normalization") {
    const auto part = cscv::split(800, 30, 60, EnsembleKind::Gaussian, 77);
    CHECK(part.total_m == 800);
    CHECK(part.phi.rows == 770);
    CHECK(part.psi.rows == 30);
    CHECK(part.phi.entry_variance == doctest::Approx(1.0 / 770));
    CHECK(part.psi.entry_variance == doctest::Approx(1.0 / 30));

    // The holdout stream is independent of the implementation row count:
    // changing total_m must leave psi untouched.
    const auto part2 = cscv::split(500, 30, 60, EnsembleKind::Gaussian, 77);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 60; ++j)
            REQUIRE(part.psi.row(i)[j] == part2.psi.row(i)[j]);

    // And phi at equal row counts is independent of r's value.
    const auto part3 = cscv::split(771, 1, 60, EnsembleKind::Gaussian, 77);
    CHECK(part3.phi.rows == 770);
    for (int j = 0; j < 60; ++j)
        REQUIRE(part.phi.row(0)[j] == part3.phi.row(0)[j]);

    CHECK_THROWS_AS(cscv::split(10, 10, 5, EnsembleKind::Gaussian, 1), cscv::InvalidArgument);
    CHECK_THROWS_AS(cscv::split(10, 0, 5, EnsembleKind::Gaussian, 1), cscv::InvalidArgument);
}

TEST_CASE("measure is the exact matrix-vector product and is linear") {
    const auto m = cscv::draw_ensemble(15, 24, EnsembleKind::Gaussian, 1.0, 2);
    DenseSignal x = cscv::make_spike_signal(24, 3, 0.2, 5);
    DenseSignal z = cscv::make_spike_signal(24, 2, 0.3, 6);

    const auto yx = cscv::measure(m, x);
    const auto yz = cscv::measure(m, z);

    DenseSignal combo;
    combo.values.resize(24);
    for (int i = 0; i < 24; ++i)
        combo.values[i] = 2.0 * x.values[i] - 0.5 * z.values[i];
    const auto yc = cscv::measure(m, combo);
    for (int i = 0; i < 15; ++i)
        REQUIRE(yc[i] == doctest::Approx(2.0 * yx[i] - 0.5 * yz[i]).epsilon(1e-12));

    for (int i = 0; i < 15; ++i) {
        double s = 0.0;
        for (int j = 0; j < 24; ++j)
            s += m.row(i)[j] * x.values[j];
        REQUIRE(yx[i] == doctest::Approx(s).epsilon(1e-13));
    }

    DenseSignal wrong;
    wrong.values.resize(10);
    CHECK_THROWS_AS(cscv::measure(m, wrong), cscv::InvalidArgument);
}

TEST_CASE("row_prefix shares entries and rescales the variance metadata") {
    const auto m = cscv::draw_ensemble(16, 10, EnsembleKind::Gaussian, 1.0, 9);
    const auto pre = cscv::row_prefix(m, 5);
    CHECK(pre.rows == 5);
    CHECK(pre.cols == 10);
    CHECK(pre.entry_variance == doctest::Approx(1.0 / 5));
    for (int i = 0; i < 5; ++i)
        REQUIRE(pre.row(i) == m.row(i));  // shared storage, same pointers

    const auto full = cscv::row_prefix(m, 16);
    CHECK(full.rows == 16);
    CHECK_THROWS_AS(cscv::row_prefix(m, 0), cscv::InvalidArgument);
    CHECK_THROWS_AS(cscv::row_prefix(m, 17), cscv::InvalidArgument);
}

TEST_CASE("row_range addresses a suffix without copying") {
    const auto m = cscv::draw_ensemble(12, 7, EnsembleKind::Bernoulli, 1.0, 4);
    const auto tail = cscv::row_range(m, 8, 12);
    CHECK(tail.rows == 4);
    CHECK(tail.entry_variance == m.entry_variance);
    for (int i = 0; i < 4; ++i)
        REQUIRE(tail.row(i) == m.row(8 + i));
    CHECK_THROWS_AS(cscv::row_range(m, 5, 4), cscv::InvalidArgument);
    CHECK_THROWS_AS(cscv::row_range(m, 0, 13), cscv::InvalidArgument);
}

TEST_CASE("measure_range equals the scaled suffix product") {
    const auto m = cscv::draw_ensemble(9, 14, EnsembleKind::Gaussian, 1.0, 6);
    const DenseSignal x = cscv::make_spike_signal(14, 2, 0.1, 3);
    const double scale = 0.25;
    const auto y = cscv::measure_range(m, x.values, 3, 9, scale);
    REQUIRE(y.size() == 6);
    for (int i = 0; i < 6; ++i) {
        double s = 0.0;
        for (int j = 0; j < 14; ++j)
            s += m.row(3 + i)[j] * x.values[j];
        REQUIRE(y[i] == doctest::Approx(scale * s).epsilon(1e-12));
    }
}

TEST_CASE("holdout products concentrate at the signal norm for both kinds") {
    // With entry variance 1/r, E||Psi x||^2 = ||x||^2. Averaged over many
    // draws the relative error should be well inside 2%.
    const int r = 5, n = 50, draws = 10000;
    const DenseSignal x = cscv::make_spike_signal(n, 4, 0.1, 42);
    for (const EnsembleKind kind : {EnsembleKind::Gaussian, EnsembleKind::Bernoulli}) {
        double acc = 0.0;
        for (int t = 0; t < draws; ++t) {
            const auto psi = cscv::draw_ensemble(r, n, kind, 1.0 / r, 1000 + t);
            const auto y = cscv::measure(psi, x);
            acc += cscv::kernels::sumsq(y.data(), y.size());
        }
        CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.02));
    }
}
