// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "aqua/aqua.hpp"
#include "aqua/attention.hpp"
#include "aqua/costmodel.hpp"
#include "aqua/error.hpp"
#include "aqua/matrix.hpp"
#include "aqua/rng.hpp"

using namespace aqua;

TEST_CASE("analytic break-even reproduces the worked examples at d_head 128") {
    SUBCASE("aggressive pruning") {
        const BreakEven b = analytic_break_even(128, 16);
        CHECK(b.boundary == doctest::Approx(16384.0 / 112.0));
        CHECK(b.first_win == 147);
    }
    SUBCASE("moderate pruning, exact boundary") {
        const BreakEven b = analytic_break_even(128, 64);
        CHECK(b.boundary == 256.0);
        CHECK(b.first_win == 257);
    }
    SUBCASE("fine pruning, exact boundary") {
        const BreakEven b = analytic_break_even(128, 112);
        CHECK(b.boundary == 1024.0);
        CHECK(b.first_win == 1025);
    }
    SUBCASE("no pruning never breaks even") {
        const BreakEven b = analytic_break_even(128, 128);
        CHECK(std::isinf(b.boundary));
        CHECK_FALSE(b.first_win.has_value());
    }
}

TEST_CASE("analytic break-even matches direct inequality evaluation exhaustively") {
    for (std::size_t d = 1; d <= 256; ++d) {
        for (std::size_t k = 1; k < d; ++k) {
            const BreakEven b = analytic_break_even(d, k);
            REQUIRE(b.first_win.has_value());
            const auto len = static_cast<double>(*b.first_win);
            const double dd = static_cast<double>(d);
            const double kk = static_cast<double>(k);
            CHECK(len > dd * dd / (dd - kk));            // strictly wins
            CHECK(len - 1.0 <= dd * dd / (dd - kk));     // smallest such integer
        }
        CHECK_FALSE(analytic_break_even(d, d).first_win.has_value());
    }
}

TEST_CASE("break-even parameter errors") {
    CHECK_THROWS_AS((void)analytic_break_even(8, 0), ParameterError);
    CHECK_THROWS_AS((void)analytic_break_even(8, 9), ParameterError);
}

TEST_CASE("count_decode totals equal the closed forms") {
    // sampled grid up to d=256, t=4096
    const std::size_t ds[] = {1, 2, 3, 8, 64, 128, 256};
    const std::size_t ts[] = {1, 2, 17, 100, 512, 4096};
    for (std::size_t d : ds) {
        for (std::size_t t : ts) {
            const std::size_t kk = std::max<std::size_t>(1, d / 3);
            const CostReport r = count_decode(d, kk, t);
            const std::uint64_t tri = static_cast<std::uint64_t>(t) * (t + 1) / 2;
            CHECK(r.macs_std == tri * d);
            CHECK(r.macs_aqua_fixed == static_cast<std::uint64_t>(t) * 2 * d * d);
            CHECK(r.macs_aqua_variable == tri * kk);
        }
    }
}

TEST_CASE("worked per-step numbers at d_head 128, k 96, t 100") {
    // one step at t = 100 costs t*d = 12800 standard MACs and
    // 2*d^2 + t*k = 42368 approximate MACs
    const CostReport upto100 = count_decode(128, 96, 100);
    const CostReport upto99 = count_decode(128, 96, 99);
    CHECK(upto100.macs_std - upto99.macs_std == 12800);
    CHECK((upto100.macs_aqua_fixed + upto100.macs_aqua_variable) -
              (upto99.macs_aqua_fixed + upto99.macs_aqua_variable) ==
          42368);
}

TEST_CASE("counted per-step crossover for (128, 16) is 293") {
    const CostReport r = count_decode(128, 16, 512);
    REQUIRE(r.counted_step_threshold.has_value());
    CHECK(*r.counted_step_threshold == 293);
    // the threshold is found even when the requested horizon is shorter
    const CostReport short_run = count_decode(128, 16, 8);
    CHECK(short_run.counted_step_threshold == r.counted_step_threshold);
    CHECK(short_run.counted_cumulative_threshold == r.counted_cumulative_threshold);
}

TEST_CASE("no crossover when k equals d") {
    const CostReport r = count_decode(128, 128, 64);
    CHECK_FALSE(r.counted_step_threshold.has_value());
    CHECK_FALSE(r.counted_cumulative_threshold.has_value());
}

TEST_CASE("per-step gap grows by d - k beyond the crossover") {
    for (std::size_t k : {16, 64, 96}) {
        const CostReport r = count_decode(128, k, 4096);
        REQUIRE(r.counted_step_threshold.has_value());
        const std::uint64_t t0 = *r.counted_step_threshold;
        const auto step_gap = [&](std::uint64_t t) {
            return static_cast<std::int64_t>(t * 128) -
                   static_cast<std::int64_t>(2 * 128 * 128 + t * k);
        };
        CHECK(step_gap(t0) > 0);
        CHECK(step_gap(t0 - 1) <= 0);
        for (std::uint64_t t = t0; t < t0 + 10; ++t) {
            CHECK(step_gap(t + 1) - step_gap(t) == static_cast<std::int64_t>(128 - k));
        }
    }
}

TEST_CASE("instrumented decode counters equal the closed forms") {
    const std::size_t d = 32;
    AquaConfig cfg;
    cfg.k_ratio = 0.25;  // k = 8
    const std::size_t k = cfg.top_k(d);
    const Matrix p = Matrix::identity(d);
    ProjectedKVCache cache(d, d);
    KVCache exact_cache(d);
    Rng rng(21);

    MacCounter aqua_counter;
    MacCounter std_counter;
    for (std::size_t t = 1; t <= 48; ++t) {
        std::vector<double> q(d);
        std::vector<double> kv(d);
        for (double& x : q) {
            x = rng.normal();
        }
        for (double& x : kv) {
            x = rng.normal();
        }
        const std::uint64_t before_proj = aqua_counter.projection_macs;
        const std::uint64_t before_score = aqua_counter.score_macs;
        (void)aqua_step(q, kv, cache, p, cfg, &aqua_counter);
        CHECK(aqua_counter.projection_macs - before_proj == 2 * d * d);
        CHECK(aqua_counter.score_macs - before_score == t * k);

        const std::uint64_t before_std = std_counter.score_macs;
        exact_cache.append(kv, kv);
        (void)attend_exact(q, exact_cache, &std_counter);
        CHECK(std_counter.score_macs - before_std == t * d);
    }
    // totals agree with the analytic counter
    const CostReport r = count_decode(d, k, 48);
    CHECK(aqua_counter.projection_macs == r.macs_aqua_fixed);
    CHECK(aqua_counter.score_macs == r.macs_aqua_variable);
    CHECK(std_counter.score_macs == r.macs_std);
}

TEST_CASE("svd cost picks the cheaper gram route") {
    SUBCASE("tall matrix goes through the n x n gram") {
        const SvdCost c = svd_cost(4096, 128);
        CHECK(c.chosen_path == 1);
        CHECK(c.macs == 128ULL * 128 * 4096 + 128ULL * 128 * 128);
    }
    SUBCASE("square matrix costs the same either way") {
        const SvdCost c = svd_cost(64, 64);
        CHECK(c.via_gram_cols == c.via_gram_rows);
    }
    SUBCASE("wide matrix goes through the m x m gram") {
        const SvdCost c = svd_cost(64, 128);
        CHECK(c.chosen_path == 2);
        CHECK(c.via_gram_rows < c.via_gram_cols);
        CHECK(c.macs == 64ULL * 64 * 128 + 64ULL * 64 * 64);
    }
}
