// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "merawav/errors.hpp"
#include "merawav/transform.hpp"
#include "test_support.hpp"

using namespace merawav;
using namespace merawav::testing;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("orthogonal pair validates its invariants") {
    CHECK_NOTHROW(OrthogonalPair::haar());
    CHECK_NOTHROW(OrthogonalPair::identity());
    CHECK_NOTHROW(OrthogonalPair::rotation(0.37));
    CHECK(OrthogonalPair::haar().det() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(OrthogonalPair::rotation(1.0).det() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(OrthogonalPair(1.0, 0.1, 0.0, 1.0), NumericalError);
    CHECK_THROWS_AS(OrthogonalPair(2.0, 0.0, 0.0, 0.5), NumericalError);
}

TEST_CASE("layer analysis matches the worked 4-sample case") {
    const auto [a, d] = layer_analyze({1.0, 2.0, 3.0, 4.0}, OrthogonalPair::haar());
    REQUIRE(a.size() == 2);
    REQUIRE(d.size() == 2);
    CHECK(a[0] == doctest::Approx(3.0 / kSqrt2).epsilon(1e-14));
    CHECK(a[1] == doctest::Approx(7.0 / kSqrt2).epsilon(1e-14));
    CHECK(d[0] == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-14));
}

TEST_CASE("identity layer splits even and odd samples") {
    const auto [a, d] = layer_analyze({5.0, 9.0}, OrthogonalPair::identity());
    CHECK(a == std::vector<double>{5.0});
    CHECK(d == std::vector<double>{9.0});
}

TEST_CASE("constant input kills Haar details") {
    const double c = -3.25;
    const auto [a, d] = layer_analyze({c, c, c, c}, OrthogonalPair::haar());
    for (double v : d) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
    for (double v : a) CHECK(v == doctest::Approx(c * kSqrt2).epsilon(1e-14));
}

TEST_CASE("layer rejects malformed input") {
    CHECK_THROWS_AS(layer_analyze({1.0, 2.0, 3.0}, OrthogonalPair::haar()),
                    DataError);
    CHECK_THROWS_AS(layer_analyze({}, OrthogonalPair::haar()), DataError);
    CHECK_THROWS_AS(
        layer_analyze({1.0, std::nan("")}, OrthogonalPair::haar()), DataError);
    CHECK_THROWS_AS(layer_synthesize({1.0}, {1.0, 2.0}, OrthogonalPair::haar()),
                    DataError);
}

TEST_CASE("layer synthesis inverts the worked case") {
    const std::vector<double> a{3.0 / kSqrt2, 7.0 / kSqrt2};
    const std::vector<double> d{-1.0 / kSqrt2, -1.0 / kSqrt2};
    const auto x = layer_synthesize(a, d, OrthogonalPair::haar());
    CHECK(max_abs_diff(x, {1.0, 2.0, 3.0, 4.0}) <= 1e-12);

    const auto y = layer_synthesize({5.0}, {9.0}, OrthogonalPair::identity());
    CHECK(y == std::vector<double>{5.0, 9.0});
}

TEST_CASE("layer roundtrip over random matrices") {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto u = random_orthogonal(rng);
        const auto x = random_signal(rng, 64, 10.0);
        const auto [a, d] = layer_analyze(x, u);
        worst = std::max(worst, max_abs_diff(layer_synthesize(a, d, u), x));

        // Pairwise energy conservation.
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double in = x[2 * k] * x[2 * k] + x[2 * k + 1] * x[2 * k + 1];
            const double out = a[k] * a[k] + d[k] * d[k];
            CHECK(std::abs(in - out) <= 1e-12 * std::max(1.0, in));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("two-level Haar cascade matches the hand-computed pyramid") {
    const auto p = analyze({1.0, 2.0, 3.0, 4.0}, FilterStack::haar(2));
    REQUIRE(p.approx.size() == 1);
    REQUIRE(p.details.size() == 2);
    REQUIRE(p.details[0].size() == 2);
    REQUIRE(p.details[1].size() == 1);
    CHECK(p.approx[0] == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(p.details[1][0] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(p.details[0][0] == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-14));
    CHECK(p.details[0][1] == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-14));

    // Energy split 25 + 4 + 1 = 30.
    CHECK(p.energy() == doctest::Approx(30.0).epsilon(1e-12));

    // Flattened compression order [approx, d^(2), d^(1)].
    const auto flat = p.flatten();
    REQUIRE(flat.size() == 4);
    CHECK(flat[0] == doctest::Approx(5.0));
    CHECK(flat[1] == doctest::Approx(-2.0));
    CHECK(flat[2] == doctest::Approx(-1.0 / kSqrt2));
}

TEST_CASE("single-level cascade degenerates to the layer operation") {
    std::mt19937_64 rng(7);
    const auto u = random_orthogonal(rng);
    const auto x = random_signal(rng, 32);
    const auto p = analyze(x, FilterStack({u}));
    const auto [a, d] = layer_analyze(x, u);
    CHECK(max_abs_diff(p.approx, a) == 0.0);
    CHECK(max_abs_diff(p.details[0], d) == 0.0);
}

TEST_CASE("cascade rejects indivisible lengths") {
    CHECK_THROWS_AS(analyze(std::vector<double>(12, 1.0), FilterStack::haar(3)),
                    DataError);
    CHECK_THROWS_AS(analyze({}, FilterStack::haar(1)), DataError);
}

TEST_CASE("pyramid from the worked cascade synthesizes back") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const auto stack = FilterStack::haar(2);
    const auto p = analyze(x, stack);
    CHECK(max_abs_diff(synthesize(p, stack), x) <= 1e-12);
}

TEST_CASE("all-zero pyramid synthesizes to zeros") {
    CoefficientPyramid p;
    p.approx.assign(4, 0.0);
    p.details = {std::vector<double>(8, 0.0), std::vector<double>(4, 0.0)};
    const auto x = synthesize(p, FilterStack::haar(2));
    for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("synthesis rejects mismatched pyramid shapes") {
    CoefficientPyramid p;
    p.approx.assign(4, 1.0);
    p.details = {std::vector<double>(8, 0.0)};
    CHECK_THROWS_AS(synthesize(p, FilterStack::haar(2)), DataError);

    CoefficientPyramid bad;
    bad.approx.assign(4, 1.0);
    bad.details = {std::vector<double>(6, 0.0), std::vector<double>(4, 0.0)};
    CHECK_THROWS_AS(synthesize(bad, FilterStack::haar(2)), DataError);
}

TEST_CASE("roundtrip and Parseval over random windows and stacks") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t depth = 1 + rng() % 5;
        const std::size_t blocks = 1 + rng() % 4;
        const std::size_t n = (std::size_t{1} << depth) * blocks;
        const auto stack = random_stack(rng, depth);
        const auto x = random_signal(rng, n, 100.0);

        const auto p = analyze(x, stack);
        CHECK(p.total_size() == n);
        CHECK(max_abs_diff(synthesize(p, stack), x) <= 1e-9);

        const double ex = energy(x);
        if (ex > 0.0) {
            CHECK(std::abs(ex - p.energy()) / ex <= 1e-9);
        }
    }
}

TEST_CASE("analysis is linear in the input") {
    std::mt19937_64 rng(123);
    const auto stack = random_stack(rng, 3);
    const auto x = random_signal(rng, 64);
    const auto y = random_signal(rng, 64);
    const double alpha = 2.5, beta = -0.75;

    std::vector<double> mix(64);
    for (std::size_t i = 0; i < 64; ++i) mix[i] = alpha * x[i] + beta * y[i];

    const auto pm = analyze(mix, stack).flatten();
    const auto px = analyze(x, stack).flatten();
    const auto py = analyze(y, stack).flatten();
    for (std::size_t i = 0; i < pm.size(); ++i) {
        CHECK(std::abs(pm[i] - (alpha * px[i] + beta * py[i])) <= 1e-9);
    }
}

TEST_CASE("materialized operator is orthogonal at small sizes") {
    std::mt19937_64 rng(5150);
    for (const std::size_t n : {8u, 16u}) {
        const std::size_t depth = n == 8 ? 3 : 4;
        const auto stack = random_stack(rng, depth);
        const auto op = materialize_operator(stack, n);

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double dot = 0.0;
                for (std::size_t r = 0; r < n; ++r) dot += op[r][i] * op[r][j];
                const double expected = i == j ? 1.0 : 0.0;
                CHECK(std::abs(dot - expected) <= 1e-10);
            }
        }
    }
}

TEST_CASE("brute-force operator reproduces the worked cascade") {
    const auto op = materialize_operator(FilterStack::haar(2), 4);
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    std::vector<double> by_matrix(4, 0.0);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) by_matrix[r] += op[r][c] * x[c];
    }
    const auto direct = analyze(x, FilterStack::haar(2)).flatten();
    CHECK(max_abs_diff(by_matrix, direct) <= 1e-12);
}
