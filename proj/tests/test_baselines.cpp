// Copyright 2026 The bqaoa Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "catch_amalgamated.hpp"

#include <bqaoa/baselines.hpp>

#include <sstream>

using namespace bqaoa;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Bounds kBox = uniform_bounds(2, {0.0, kPi});

const Objective kQuad = [](std::span<const double> x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + 2.0 * (x[1] - 2.0) * (x[1] - 2.0);
};

/// Many shallow basins on top of a bowl.
const Objective kBumpy = [](std::span<const double> x) {
    return (x[0] - 2.0) * (x[0] - 2.0) + (x[1] - 1.0) * (x[1] - 1.0) +
           0.3 * std::sin(8 * x[0]) * std::sin(8 * x[1]);
};

void check_common_invariants(const Trace &t, const Bounds &box) {
    double best = kInf;
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        const auto &r = t.records[i];
        CHECK(r.calls == static_cast<long>(i) + 1);
        CHECK(inside_bounds(r.theta, box));
        best = std::min(best, r.y);
        CHECK(r.best_y == best);
    }
    CHECK(t.best_y == best);
}

std::string csv_of(const Trace &t) {
    std::ostringstream s;
    write_trace_csv(s, t);
    return s.str();
}

} // namespace

TEST_CASE("basin-hopping temperature schedule", "[baselines]") {
    BaselineConfig c;
    c.initial_temperature = 2.0;
    c.decay = 0.9;
    CHECK(basin_hopping_temperature(c, 0) == 2.0);
    CHECK_THAT(basin_hopping_temperature(c, 3), WithinRel(2.0 * 0.729, 1e-14));
}

TEST_CASE("basin-hopping on a single basin", "[baselines]") {
    Rng rng(1);
    auto cfg = BaselineConfig::for_method(BaselineMethod::BasinHopping);
    cfg.max_iterations = 5;
    const auto t = basin_hopping(kQuad, kBox, cfg, rng);
    check_common_invariants(t, kBox);
    double first_local = kInf;
    for (const auto &r : t.records) {
        if (r.step == 0) {
            first_local = std::min(first_local, r.y);
        }
    }
    CHECK(first_local < 1e-8);
    CHECK_THAT(t.best_theta[0], WithinAbs(1.0, 1e-4));
    CHECK_THAT(t.best_theta[1], WithinAbs(2.0, 1e-4));
}

TEST_CASE("basin-hopping local searches respect the call cap", "[baselines]") {
    Rng rng(2);
    auto cfg = BaselineConfig::for_method(BaselineMethod::BasinHopping);
    cfg.max_iterations = 10;
    cfg.local.max_evaluations = 30;
    const auto t = basin_hopping(kBumpy, kBox, cfg, rng);
    std::map<int, long> per_step;
    for (const auto &r : t.records) {
        ++per_step[r.step];
    }
    CHECK(per_step.size() == 11);
    for (const auto &[step, n] : per_step) {
        CHECK(n <= 30);
    }
    check_common_invariants(t, kBox);
}

TEST_CASE("basin-hopping global budget and determinism", "[baselines]") {
    auto cfg = BaselineConfig::for_method(BaselineMethod::BasinHopping);
    cfg.max_evaluations = 200;
    Rng a(3);
    Rng b(3);
    const auto ta = basin_hopping(kBumpy, kBox, cfg, a);
    const auto tb = basin_hopping(kBumpy, kBox, cfg, b);
    CHECK(ta.calls() >= 200);
    CHECK(ta.calls() < 200 + cfg.local.max_evaluations);
    CHECK(csv_of(ta) == csv_of(tb));
}

TEST_CASE("generalized annealing acceptance", "[baselines]") {
    CHECK(gsa_accept_probability(-1.0, 1.0, -5.0) == 1.0);
    CHECK(gsa_accept_probability(0.5, 0.0, -5.0) == 0.0);
    CHECK(gsa_accept_probability(0.5, 1e-12, -5.0) == 0.0);
    // [1 - (1 - qa) d / T]^(1 / (1 - qa)) at qa = -5, d = 0.1, T = 1.
    CHECK_THAT(gsa_accept_probability(0.1, 1.0, -5.0), WithinRel(std::pow(0.4, 1.0 / 6.0), 1e-14));
    CHECK(gsa_accept_probability(0.2, 1.0, -5.0) == 0.0);
    CHECK(gsa_accept_probability(0.01, 10.0, -5.0) > gsa_accept_probability(0.01, 1.0, -5.0));
    CHECK_THAT(gsa_temperature(5230.0, 2.62, 1), WithinRel(5230.0, 1e-14));
    CHECK(gsa_temperature(5230.0, 2.62, 100) < gsa_temperature(5230.0, 2.62, 10));
}

TEST_CASE("dual annealing on a quadratic", "[baselines]") {
    Rng rng(4);
    auto cfg = BaselineConfig::for_method(BaselineMethod::DualAnnealing);
    cfg.max_iterations = 100;
    const auto t = dual_annealing(kQuad, kBox, cfg, rng);
    check_common_invariants(t, kBox);
    CHECK_THAT(t.best_theta[0], WithinAbs(1.0, 1e-3));
    CHECK_THAT(t.best_theta[1], WithinAbs(2.0, 1e-3));
    double annealed = kInf;
    for (const auto &r : t.records) {
        if (r.step <= cfg.max_iterations) {
            annealed = std::min(annealed, r.y);
        }
    }
    CHECK(t.best_y <= annealed);
}

TEST_CASE("dual annealing proposals per iteration", "[baselines]") {
    Rng rng(5);
    auto cfg = BaselineConfig::for_method(BaselineMethod::DualAnnealing);
    cfg.max_iterations = 7;
    cfg.local.max_evaluations = 1;
    const auto t = dual_annealing(kBumpy, kBox, cfg, rng);
    // Start point, 2d proposals per iteration, one finite-difference
    // gradient (d + 1 calls) for the polish.
    CHECK(t.calls() == 1 + 7 * 4 + 3);
    check_common_invariants(t, kBox);
}

TEST_CASE("direct DE minimizes a quadratic", "[baselines]") {
    Rng rng(6);
    std::vector<DEGeneration> history;
    const auto t = direct_de(kQuad, kBox, DEConfig{}, rng, {}, 6, &history);
    check_common_invariants(t, kBox);
    CHECK_THAT(t.best_theta[0], WithinAbs(1.0, 1e-2));
    CHECK_THAT(t.best_theta[1], WithinAbs(2.0, 1e-2));
    const long np = 30;
    const auto g = static_cast<long>(history.size()) - 1;
    CHECK(t.calls() == np * (g + 1));
    for (std::size_t k = 1; k < history.size(); ++k) {
        CHECK(-history[k].best <= -history[k - 1].best);
    }
}

TEST_CASE("run_baseline dispatch and config validation", "[baselines]") {
    Rng rng(7);
    auto cfg = BaselineConfig::for_method(BaselineMethod::DirectDE);
    cfg.de.max_generations = 3;
    CHECK(run_baseline(kQuad, kBox, cfg, rng).calls() == 30 * 4);
    cfg = BaselineConfig::for_method(BaselineMethod::BasinHopping);
    cfg.decay = 1.0;
    CHECK_THROWS_AS(basin_hopping(kQuad, kBox, cfg, rng), std::invalid_argument);
    cfg.decay = 0.95;
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(basin_hopping(kQuad, kBox, cfg, rng), std::invalid_argument);
    cfg.max_iterations = 5;
    cfg.local.method = "nelder-mead";
    CHECK_THROWS_AS(basin_hopping(kQuad, kBox, cfg, rng), std::invalid_argument);
    CHECK_THROWS_AS(dual_annealing(kQuad, {}, BaselineConfig{}, rng), std::invalid_argument);
}

TEST_CASE("calls to reach a target ratio", "[baselines]") {
    const auto inst = make_instance(Graph(2, {{0, 1}}), ProblemKind::MaxCut);
    Trace t;
    auto push = [&t](double y) {
        StepRecord r;
        r.calls = t.calls() + 1;
        r.y = y;
        t.records.push_back(r);
    };
    push(-1.0);
    push(-0.5);
    CHECK(calls_to_reach(t, 1.0, inst) == 1);
    CHECK_FALSE(calls_to_reach(t, 1.01, inst).has_value());

    Trace slow;
    for (double y : {-0.2, -0.1, -0.6, -0.9}) {
        StepRecord r;
        r.calls = slow.calls() + 1;
        r.y = y;
        slow.records.push_back(r);
    }
    CHECK(calls_to_reach(slow, 0.5, inst) == 3);
    CHECK(calls_to_reach(slow, 0.9, inst) == 4);
    CHECK_FALSE(calls_to_reach(Trace{}, 0.1, inst).has_value());
}
