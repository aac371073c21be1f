#include <doctest.h>

#include "reference.hpp"
#include "sysdse/cost.hpp"
#include "sysdse/data.hpp"
#include "sysdse/oracle.hpp"
#include "sysdse/sched.hpp"

using namespace sysdse;

TEST_CASE("case 1 oracle examples") {
    const auto t = enumerate_case1_labels();
    const auto only16 = oracle_case1({{1000, 32, 32}, 8}, t);
    CHECK(t.at(only16) == ArrayConfig{ArrayShape(16, 16), Dataflow::WS});
    CHECK(compute_runtime({1000, 32, 32}, t.at(only16).shape, t.at(only16).dataflow) == 4184);

    const auto id = oracle_case1({{32, 32, 16}, 10}, t);
    // 16x32 under WS and IS both take 94 cycles; WS has the smaller id.
    CHECK(t.at(id) == ArrayConfig{ArrayShape(16, 32), Dataflow::WS});
    CHECK(compute_runtime({32, 32, 16}, t.at(id).shape, t.at(id).dataflow) == 94);
    CHECK(static_cast<std::int64_t>(id) == ref::best_case1({32, 32, 16}, 10, t));

    // All three dataflows tie on a 1x1x1 GEMM at 16x16; the smallest id wins.
    const auto t8 = enumerate_case1_labels(4, 8);
    CHECK(oracle_case1({{1, 1, 1}, 8}, t8) == 0);
    CHECK(oracle_case1({{64, 64, 64}, 8}, t) == 0);

    CHECK_THROWS_AS(oracle_case1({{1, 1, 1}, 19}, t), ParameterError);
    CHECK_THROWS_AS(oracle_case1({{1, 1, 1}, 7}, t), InfeasibleError);
}

TEST_CASE("case 2 oracle examples") {
    const auto t = enumerate_case2_labels();
    Case2Query q{{32, 32, 16}, {ArrayShape(32, 32), Dataflow::OS}, 50, 300};
    CHECK(t.at(oracle_case2(q, t)) == BufferSizes{100, 100, 100});
    q.budget_kb = 3000;
    // Stalls cannot drop below the 100 KB cube; the smaller total wins the tie.
    CHECK(t.at(oracle_case2(q, t)) == BufferSizes{100, 100, 100});
    q.budget_kb = 299;
    CHECK_THROWS_AS(oracle_case2(q, t), InfeasibleError);
}

TEST_CASE("case 3 oracle example") {
    const Platform p({{1, ArrayShape(32, 32)}, {1, ArrayShape(16, 16)}});
    const auto t = enumerate_case3_labels(p);
    const std::vector<GemmWorkload> ws{{1000, 32, 32}, {32, 32, 16}};
    const LabelId id = oracle_case3(ws, p, t);
    // Identity assignment with WS on both units: 1094 on the 32x32 array,
    // 156 on the 16x16.
    CHECK(t.at(id) == Schedule{{0, 1}, {Dataflow::WS, Dataflow::WS}});
    CHECK(id == 4);
    const auto c = schedule_cost(ws, p, t.at(id));
    CHECK(c.critical_path == 1094);
    CHECK(c.cumulative == 1250);

    CHECK_THROWS_AS(oracle_case3(std::span(ws).first(1), p, t), ShapeError);
    const Platform other({{1, ArrayShape(32, 32)}, {1, ArrayShape(32, 32)}});
    CHECK_THROWS_AS(oracle_case3(ws, other, t), ShapeError);
}

TEST_CASE("oracles agree with an independent rescan") {
    const auto t1 = enumerate_case1_labels();
    const auto t2 = enumerate_case2_labels();
    const auto t3 = enumerate_case3_labels(Platform::default_platform());
    Rng rng(17);
    const SamplingRanges r;
    for (int i = 0; i < 200; ++i) {
        const auto w = sample_workload(rng, r);
        const int mac_exp = static_cast<int>(rng.uniform_int(8, 18));
        CHECK(static_cast<std::int64_t>(oracle_case1({w, mac_exp}, t1)) == ref::best_case1(w, mac_exp, t1));

        const auto& arr = t1.at(static_cast<LabelId>(rng.uniform_int(0, static_cast<std::int64_t>(t1.size()) - 1)));
        const std::int64_t bw = rng.uniform_int(1, 100);
        const std::int64_t budget = 100 * rng.uniform_int(3, 30);
        CHECK(static_cast<std::int64_t>(oracle_case2({w, arr, bw, budget}, t2)) ==
              ref::best_case2(w, arr.shape, arr.dataflow, bw, budget, t2));
    }
    for (int i = 0; i < 30; ++i) {
        std::vector<GemmWorkload> ws;
        for (int j = 0; j < 4; ++j) ws.push_back(sample_workload(rng, r));
        CHECK(static_cast<std::int64_t>(oracle_case3(ws, t3.params().platform, t3)) == ref::best_case3(ws, t3));
    }
}

TEST_CASE("oracle answers are stable across repeated calls") {
    const auto t3 = enumerate_case3_labels(Platform::default_platform());
    const std::vector<GemmWorkload> ws{{500, 600, 70}, {1, 2, 3}, {90000, 20, 999}, {4096, 4096, 64}};
    const auto a = oracle_case3(ws, t3.params().platform, t3);
    CHECK(oracle_case3(ws, t3.params().platform, t3) == a);
}
