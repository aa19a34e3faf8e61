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
#include "oracles.hpp"

#include <bqaoa/qaoa.hpp>

#include <numeric>

using namespace bqaoa;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// max_z |a_z - e^{i phi} b_z| with the global phase fixed on the largest entry.
double phase_aligned_distance(const Statevector &s, const oracle::CVector &ref) {
    Eigen::Index k = 0;
    ref.cwiseAbs().maxCoeff(&k);
    const Complex phase = s[static_cast<std::size_t>(k)] / ref[k];
    const Complex unit = phase / std::abs(phase);
    double worst = 0.0;
    for (Eigen::Index z = 0; z < ref.size(); ++z) {
        worst = std::max(worst, std::abs(s[static_cast<std::size_t>(z)] - unit * ref[z]));
    }
    return worst;
}

ProblemInstance ring(int n, ProblemKind kind) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        edges.push_back({i, (i + 1) % n});
    }
    return make_instance(Graph(n, edges), kind);
}

} // namespace

TEST_CASE("plus state and basis states", "[qaoa]") {
    const auto plus = prepare_plus(3);
    CHECK_THAT(plus.norm_squared(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(std::abs(plus[5]), WithinAbs(1.0 / std::sqrt(8.0), 1e-15));
    CHECK_THROWS_AS(prepare_plus(0), std::invalid_argument);
    CHECK_THROWS_AS(prepare_plus(kMaxQubits + 1), std::invalid_argument);
    CHECK_THROWS_AS(basis_state(2, 4), std::out_of_range);
    CHECK(overlap_squared(basis_state(2, 1), basis_state(2, 1)) == 1.0);
    CHECK(overlap_squared(basis_state(2, 1), basis_state(2, 2)) == 0.0);
}

TEST_CASE("zero angles leave the plus state unchanged", "[qaoa]") {
    const auto inst = ring(4, ProblemKind::MaxCut);
    const auto s = apply_qaoa(inst.cost, QaoaAngles({0.0, 0.0}, {0.0, 0.0}));
    CHECK_THAT(overlap_squared(s, prepare_plus(4)), WithinAbs(1.0, 1e-14));
    // <+|C|+> is the mean of the cost table.
    const double mean = std::accumulate(inst.cost.values.begin(), inst.cost.values.end(), 0.0) /
                        static_cast<double>(inst.cost.values.size());
    CHECK_THAT(exact_energy(s, inst.cost), WithinAbs(mean, 1e-14));
}

TEST_CASE("mixer on a basis state is a product of RX rotations", "[qaoa]") {
    auto s = basis_state(1, 0);
    apply_mixer_layer(s, 0.3);
    CHECK_THAT(s[0].real(), WithinAbs(std::cos(0.3), 1e-15));
    CHECK_THAT(s[1].imag(), WithinAbs(-std::sin(0.3), 1e-15));
}

TEST_CASE("apply_qaoa matches the dense matrix-exponential oracle", "[qaoa][oracle]") {
    Rng rng(2024);
    const std::vector<Graph> graphs{
        Graph(1, {}),
        Graph(2, {{0, 1}}),
        Graph(3, {{0, 1}, {1, 2}}),
        Graph(3, {{0, 1}, {1, 2}, {0, 2}}),
        Graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}),
        Graph(4, {{0, 1}, {0, 2}, {0, 3}}),
        Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}),
    };
    for (const auto &g : graphs) {
        for (auto kind : {ProblemKind::MaxCut, ProblemKind::MIS}) {
            const auto cost = build_cost_table(g, kind);
            for (int p = 1; p <= 2; ++p) {
                for (int trial = 0; trial < 5; ++trial) {
                    std::vector<double> gs(static_cast<std::size_t>(p));
                    std::vector<double> bs(static_cast<std::size_t>(p));
                    for (int l = 0; l < p; ++l) {
                        gs[static_cast<std::size_t>(l)] = uniform(rng, -kPi, kPi);
                        bs[static_cast<std::size_t>(l)] = uniform(rng, -kPi, kPi);
                    }
                    const auto s = apply_qaoa(cost, QaoaAngles(gs, bs));
                    const auto ref = oracle::qaoa_state(cost.values, g.n_nodes(), gs, bs);
                    CHECK(phase_aligned_distance(s, ref) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("noisy circuit with zero noise reproduces apply_qaoa", "[qaoa]") {
    Rng rng(1);
    for (auto kind : {ProblemKind::MaxCut, ProblemKind::MIS}) {
        const auto inst = ring(5, kind);
        const QaoaAngles a({0.4, 1.1, 2.0}, {0.7, 0.2, 1.3});
        const auto clean = apply_qaoa(inst.cost, a);
        const auto noisy = apply_qaoa_noisy(inst.graph, kind, 2.0, a, NoiseSpec{0.0}, rng);
        for (std::size_t z = 0; z < clean.dimension(); ++z) {
            CHECK(std::abs(clean[z] - noisy[z]) < 1e-12);
        }
    }
}

TEST_CASE("noisy circuit is norm preserving and redraws noise", "[qaoa]") {
    Rng rng(8);
    const auto inst = ring(4, ProblemKind::MaxCut);
    const QaoaAngles a({0.4}, {0.7});
    const auto s1 = apply_qaoa_noisy(inst.graph, ProblemKind::MaxCut, 2.0, a, {0.1}, rng);
    const auto s2 = apply_qaoa_noisy(inst.graph, ProblemKind::MaxCut, 2.0, a, {0.1}, rng);
    CHECK_THAT(s1.norm_squared(), WithinAbs(1.0, 1e-12));
    CHECK(overlap_squared(s1, s2) < 1.0 - 1e-9);
    CHECK_THROWS_AS(apply_qaoa_noisy(inst.graph, ProblemKind::MaxCut, 2.0, a, {-0.1}, rng),
                    std::invalid_argument);
}

TEST_CASE("energy bounds, fidelity and ratio", "[qaoa]") {
    Rng rng(4);
    const auto inst = ring(6, ProblemKind::MaxCut);
    const double lo = *std::min_element(inst.cost.values.begin(), inst.cost.values.end());
    const double hi = *std::max_element(inst.cost.values.begin(), inst.cost.values.end());
    for (int t = 0; t < 20; ++t) {
        const QaoaAngles a({uniform(rng, 0, kPi), uniform(rng, 0, kPi)},
                           {uniform(rng, 0, kPi), uniform(rng, 0, kPi)});
        const auto s = apply_qaoa(inst.cost, a);
        CHECK_THAT(s.norm_squared(), WithinAbs(1.0, 1e-12));
        const double e = exact_energy(s, inst.cost);
        CHECK(e >= lo - 1e-12);
        CHECK(e <= hi + 1e-12);
        const double f = fidelity(s, inst.ground_set);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0 + 1e-12);
    }
    const auto gs = basis_state(6, inst.ground_set.front());
    CHECK(exact_energy(gs, inst.cost) == inst.e_gs);
    CHECK_THAT(fidelity(gs, inst.ground_set), WithinAbs(1.0, 1e-15));
    CHECK(approximation_ratio(inst.e_gs, inst.e_gs) == 1.0);
    CHECK_THROWS_AS(approximation_ratio(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(fidelity(gs, {}), std::invalid_argument);
}

TEST_CASE("shot sampling", "[qaoa]") {
    const auto inst = ring(4, ProblemKind::MaxCut);
    const auto s = apply_qaoa(inst.cost, QaoaAngles({0.6}, {0.4}));
    const double exact = exact_energy(s, inst.cost);
    double var = 0.0;
    for (std::size_t z = 0; z < s.dimension(); ++z) {
        var += std::norm(s[z]) * (inst.cost.values[z] - exact) * (inst.cost.values[z] - exact);
    }

    SECTION("basis state gives a deterministic estimate") {
        Rng rng(1);
        const auto est = sample_energy(basis_state(4, 5), 3, inst.cost, rng);
        CHECK(est.estimate == inst.cost.values[5]);
        CHECK(est.counts.counts.at(5) == 3);
        CHECK(est.counts.total == 3);
    }

    SECTION("mean and variance over repeats") {
        Rng rng(77);
        const long shots = 64;
        const int repeats = 4000;
        std::vector<double> ests;
        for (int r = 0; r < repeats; ++r) {
            ests.push_back(sample_energy(s, shots, inst.cost, rng).estimate);
        }
        const double se = std::sqrt(var / shots / repeats);
        CHECK_THAT(mean_of(ests), WithinAbs(exact, 5.0 * se));
        const double sample_var = stddev_of(ests) * stddev_of(ests);
        CHECK_THAT(sample_var, WithinRel(var / shots, 0.1));
    }

    SECTION("reproducible with the same seed") {
        Rng a(3);
        Rng b(3);
        CHECK(sample_energy(s, 100, inst.cost, a).estimate ==
              sample_energy(s, 100, inst.cost, b).estimate);
    }

    Rng rng(0);
    CHECK_THROWS_AS(sample_energy(s, 0, inst.cost, rng), std::invalid_argument);
}

TEST_CASE("landscape grid", "[qaoa]") {
    const auto inst = ring(4, ProblemKind::MaxCut);
    SECTION("resolution 3 has 9 points and the origin is the table mean") {
        const auto L = landscape_grid(inst, 3);
        CHECK(L.energy.rows() == 3);
        CHECK(L.energy.cols() == 3);
        const double mean = std::accumulate(inst.cost.values.begin(), inst.cost.values.end(),
                                            0.0) /
                            16.0;
        CHECK_THAT(L.energy(0, 0), WithinAbs(mean, 1e-14));
        CHECK(L.axis == std::vector<double>{0.0, kPi / 2, kPi});
    }
    SECTION("argmin and argmax agree with a scan of the matrices") {
        const auto L = landscape_grid(inst, 21);
        Eigen::Index i = 0;
        Eigen::Index j = 0;
        const double emin = L.energy.minCoeff(&i, &j);
        CHECK(L.energy(L.argmin_energy.first, L.argmin_energy.second) == emin);
        const double fmax = L.fidelity.maxCoeff();
        CHECK(L.fidelity(L.argmax_fidelity.first, L.argmax_fidelity.second) == fmax);
    }
    CHECK_THROWS_AS(landscape_grid(inst, 1), std::invalid_argument);
}

TEST_CASE("angle packing", "[qaoa]") {
    const std::vector<double> flat{1, 2, 3, 4};
    const auto a = QaoaAngles::from_flat(flat);
    CHECK(a.gammas == std::vector<double>{1, 2});
    CHECK(a.betas == std::vector<double>{3, 4});
    CHECK(a.flat() == flat);
    CHECK_THROWS_AS(QaoaAngles::from_flat(std::vector<double>{1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(QaoaAngles({1.0}, {}), std::invalid_argument);
}
