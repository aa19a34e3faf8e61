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

#include <bqaoa/bayes.hpp>

#include <sstream>

using namespace bqaoa;
using Catch::Matchers::WithinAbs;

namespace {

BayesConfig small_config(std::size_t dim, int n_warmup, int n_bayes) {
    BayesConfig c;
    c.bounds = uniform_bounds(dim, {0.0, kPi});
    c.n_warmup = n_warmup;
    c.n_bayes = n_bayes;
    c.n_restarts = 3;
    c.de.max_generations = 60;
    return c;
}

const Objective kBowl = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += (x[i] - 1.0 - 0.3 * static_cast<double>(i)) * (x[i] - 1.0 - 0.3 * static_cast<double>(i));
    }
    return s;
};

std::shared_ptr<const ProblemInstance> k33_mis() {
    return std::make_shared<const ProblemInstance>(
        make_instance(random_regular_graph(6, 3, 14), ProblemKind::MIS));
}

} // namespace

TEST_CASE("call counting and phases", "[bayes]") {
    Rng rng(1);
    const auto trace = bayes_optimize(kBowl, small_config(2, 5, 8), rng);
    CHECK(trace.calls() == 13);
    CHECK(trace.records.size() == 13);
    CHECK(trace.count(Phase::Warmup) == 5);
    CHECK(trace.count(Phase::Bayes) == 8);
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto &r = trace.records[i];
        CHECK(r.calls == static_cast<long>(i) + 1);
        CHECK(inside_bounds(r.theta, small_config(2, 5, 8).bounds));
        if (r.phase == Phase::Bayes) {
            CHECK(r.ell > 0.0);
            CHECK(r.sigma_n2 > 0.0);
            CHECK(r.de_generations >= 0);
        } else {
            CHECK(std::isnan(r.ell));
        }
    }
}

TEST_CASE("incumbent is monotone and matches the best observation", "[bayes]") {
    Rng rng(2);
    const auto trace = bayes_optimize(kBowl, small_config(2, 5, 15), rng);
    double best = kInf;
    for (const auto &r : trace.records) {
        best = std::min(best, r.y);
        CHECK(r.best_y == best);
    }
    CHECK(trace.best_y == best);
    CHECK(kBowl(trace.best_theta) == best);
    const auto curve = best_so_far(trace);
    CHECK(std::is_sorted(curve.rbegin(), curve.rend()));
}

TEST_CASE("BO finds the minimum of a smooth bowl", "[bayes]") {
    Rng rng(3);
    const auto trace = bayes_optimize(kBowl, small_config(2, 6, 25), rng);
    CHECK(trace.best_y < 1e-2);
}

TEST_CASE("same seed, same trace", "[bayes]") {
    Rng a(4);
    Rng b(4);
    const auto ta = bayes_optimize(kBowl, small_config(2, 4, 6), a);
    const auto tb = bayes_optimize(kBowl, small_config(2, 4, 6), b);
    std::ostringstream ca;
    std::ostringstream cb;
    write_trace_csv(ca, ta);
    write_trace_csv(cb, tb);
    CHECK(ca.str() == cb.str());
}

TEST_CASE("patience stops the loop early", "[bayes]") {
    Rng rng(5);
    auto cfg = small_config(1, 3, 50);
    cfg.patience = 2;
    // A constant objective never improves after warmup.
    const auto trace =
        bayes_optimize([](std::span<const double>) { return 1.0; }, cfg, rng);
    CHECK(trace.count(Phase::Bayes) == 2);
}

TEST_CASE("objective failure aborts with the partial trace", "[bayes]") {
    Rng rng(6);
    int calls = 0;
    const Objective flaky = [&calls](std::span<const double>) {
        if (++calls == 4) {
            throw std::runtime_error("device offline");
        }
        return 0.0;
    };
    try {
        bayes_optimize(flaky, small_config(2, 5, 5), rng);
        FAIL("expected optimization_aborted");
    } catch (const optimization_aborted &e) {
        CHECK(e.partial_trace().records.size() == 3);
        CHECK(std::string(e.what()).find("device offline") != std::string::npos);
    }
}

TEST_CASE("config validation", "[bayes]") {
    Rng rng(0);
    auto cfg = small_config(2, 1, 3);
    CHECK_THROWS_AS(bayes_optimize(kBowl, cfg, rng), std::invalid_argument);
    cfg = small_config(2, 3, -1);
    CHECK_THROWS_AS(bayes_optimize(kBowl, cfg, rng), std::invalid_argument);
    cfg = small_config(2, 3, 3);
    cfg.bounds.clear();
    CHECK_THROWS_AS(bayes_optimize(kBowl, cfg, rng), std::invalid_argument);
}

TEST_CASE("QAOA objective counts calls and follows the requested mode", "[bayes]") {
    const auto inst = k33_mis();
    const std::vector<double> theta{0.3, 0.5};
    const double exact =
        exact_energy(apply_qaoa(inst->cost, QaoaAngles::from_flat(theta)), inst->cost);

    auto ex = make_qaoa_objective(inst, 1, 0, {}, 1);
    CHECK(ex.fn(theta) == exact);
    CHECK(ex.fn(theta) == exact);
    CHECK(*ex.calls == 2);

    auto shots = make_qaoa_objective(inst, 1, 16, {}, 1);
    const double a = shots.fn(theta);
    const double b = shots.fn(theta);
    CHECK(a != b); // fresh shots every call
    CHECK(*shots.calls == 2);

    auto noisy = make_qaoa_objective(inst, 1, 0, {0.1}, 1);
    CHECK(noisy.fn(theta) != exact);

    CHECK_THROWS_AS(ex.fn(std::vector<double>{0.1}), std::invalid_argument);
    CHECK_THROWS_AS(make_qaoa_objective(inst, 0, 0, {}, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_qaoa_objective(inst, 1, -1, {}, 1), std::invalid_argument);

    const auto metrics = make_qaoa_metrics(inst);
    const auto [r, f] = metrics(theta);
    CHECK_THAT(r, WithinAbs(exact / inst->e_gs, 1e-15));
    CHECK(f >= 0.0);
}

TEST_CASE("depth-1 BO reaches the landscape-grid optimum", "[bayes][qaoa]") {
    const auto inst = k33_mis();
    const auto grid = landscape_grid(*inst, 101);
    const double grid_r = approximation_ratio(grid.energy.minCoeff(), inst->e_gs);
    // Single runs can stall in the secondary minimum near R = 0.31; the
    // median over repetitions is what the depth sweep reports.
    std::vector<double> finals;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
        auto obj = make_qaoa_objective(inst, 1, 0, {}, derive_seed(7, rep));
        Rng rng(derive_seed(7, rep, 1));
        const auto trace =
            bayes_optimize(obj.fn, BayesConfig::for_depth(1), rng, make_qaoa_metrics(inst));
        CHECK(*obj.calls == trace.calls());
        finals.push_back(trace.records.back().R);
    }
    CHECK(std::abs(median_of(finals) - grid_r) < 0.02);
}

TEST_CASE("trace writers", "[trace]") {
    Rng rng(8);
    const auto trace = bayes_optimize(kBowl, small_config(3, 3, 2), rng);
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    std::istringstream in(csv.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "phase,step,calls,y,best_y,R,F,sigma2,ell,sigma_n2,de_generations,"
                    "de_score_std,de_mean_distance,theta_0,theta_1,theta_2");
    int rows = 0;
    for (std::string line; std::getline(in, line);) {
        ++rows;
    }
    CHECK(rows == 5);

    const auto j = trace_to_json(trace);
    CHECK(j["calls"] == 5);
    CHECK(j["records"].size() == 5);
    CHECK(j["records"][0]["ell"].is_null());
    CHECK(j["records"][4]["ell"].is_number());
}
