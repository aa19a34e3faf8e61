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

/**
 * @file
 * Dense statevector simulation of the QAOA ansatz
 *
 *     |theta> = prod_l exp(-i beta_l H_M) exp(-i gamma_l H_C) |+>,
 *
 * with H_M = sum_i X_i and H_C the diagonal cost table. Also provides the
 * shot-based energy estimator, the solution fidelity, and a gate-level
 * Gaussian noise model where every edge/qubit term sees its own perturbed
 * angle.
 */
#pragma once

#include "common.hpp"
#include "problems.hpp"

#include <complex>
#include <map>

namespace bqaoa {

using Complex = std::complex<double>;

/// 2p variational angles. Flat layout is (gamma_1..gamma_p, beta_1..beta_p).
struct QaoaAngles {
    std::vector<double> gammas;
    std::vector<double> betas;

    QaoaAngles() = default;
    QaoaAngles(std::vector<double> g, std::vector<double> b)
        : gammas(std::move(g)), betas(std::move(b)) {
        if (gammas.size() != betas.size() || gammas.empty()) {
            throw std::invalid_argument("QaoaAngles: need p >= 1 gammas and as many betas");
        }
    }

    [[nodiscard]] int depth() const { return static_cast<int>(gammas.size()); }

    static QaoaAngles from_flat(std::span<const double> theta) {
        if (theta.empty() || theta.size() % 2 != 0) {
            throw std::invalid_argument("QaoaAngles: flat vector must have even length 2p");
        }
        const std::size_t p = theta.size() / 2;
        return {std::vector<double>(theta.begin(), theta.begin() + static_cast<long>(p)),
                std::vector<double>(theta.begin() + static_cast<long>(p), theta.end())};
    }

    [[nodiscard]] std::vector<double> flat() const {
        std::vector<double> out(gammas);
        out.insert(out.end(), betas.begin(), betas.end());
        return out;
    }
};

class Statevector {
  public:
    Statevector() = default;
    Statevector(int n_qubits, std::vector<Complex> amplitudes)
        : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
        if (amps_.size() != (std::size_t{1} << static_cast<unsigned>(n_qubits))) {
            throw std::invalid_argument("Statevector: amplitude count must be 2^n");
        }
    }

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dimension() const { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const { return amps_; }
    [[nodiscard]] std::span<Complex> amplitudes() { return amps_; }
    [[nodiscard]] const Complex &operator[](std::size_t z) const { return amps_[z]; }
    [[nodiscard]] Complex &operator[](std::size_t z) { return amps_[z]; }

    [[nodiscard]] double norm_squared() const {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    [[nodiscard]] std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t z = 0; z < amps_.size(); ++z) {
            p[z] = std::norm(amps_[z]);
        }
        return p;
    }

  private:
    int n_qubits_ = 0;
    std::vector<Complex> amps_;
};

/// |<a|b>|^2; insensitive to global phase.
inline double overlap_squared(const Statevector &a, const Statevector &b) {
    if (a.dimension() != b.dimension()) {
        throw std::invalid_argument("overlap: dimension mismatch");
    }
    Complex s{0.0, 0.0};
    for (std::size_t z = 0; z < a.dimension(); ++z) {
        s += std::conj(a[z]) * b[z];
    }
    return std::norm(s);
}

inline Statevector prepare_plus(int n) {
    if (n < 1 || n > kMaxQubits) {
        throw std::invalid_argument("prepare_plus: qubit count out of range");
    }
    const std::size_t dim = std::size_t{1} << static_cast<unsigned>(n);
    const double a = 1.0 / std::sqrt(static_cast<double>(dim));
    return {n, std::vector<Complex>(dim, Complex{a, 0.0})};
}

inline Statevector basis_state(int n, Bitstring z) {
    const std::size_t dim = std::size_t{1} << static_cast<unsigned>(n);
    if (z >= dim) {
        throw std::out_of_range("basis_state: index out of range");
    }
    std::vector<Complex> amps(dim, Complex{0.0, 0.0});
    amps[z] = 1.0;
    return {n, std::move(amps)};
}

/// amp[z] *= exp(-i gamma C(z)).
inline void apply_cost_layer(Statevector &state, std::span<const double> cost_values,
                             double gamma) {
    if (cost_values.size() != state.dimension()) {
        throw std::invalid_argument("cost layer: dimension mismatch");
    }
    auto amps = state.amplitudes();
    for (std::size_t z = 0; z < amps.size(); ++z) {
        const double phase = -gamma * cost_values[z];
        amps[z] *= Complex{std::cos(phase), std::sin(phase)};
    }
}

/// exp(-i beta X) on one qubit: [[cos b, -i sin b], [-i sin b, cos b]].
inline void apply_rx_like(Statevector &state, int qubit, double beta) {
    const double c = std::cos(beta);
    const Complex mis{0.0, -std::sin(beta)};
    auto amps = state.amplitudes();
    const std::size_t stride = std::size_t{1} << static_cast<unsigned>(qubit);
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t k = base; k < base + stride; ++k) {
            const Complex a0 = amps[k];
            const Complex a1 = amps[k + stride];
            amps[k] = c * a0 + mis * a1;
            amps[k + stride] = mis * a0 + c * a1;
        }
    }
}

inline void apply_mixer_layer(Statevector &state, double beta) {
    for (int q = 0; q < state.n_qubits(); ++q) {
        apply_rx_like(state, q, beta);
    }
}

inline Statevector apply_qaoa(const CostTable &cost, const QaoaAngles &angles) {
    if (angles.gammas.size() != angles.betas.size()) {
        throw std::invalid_argument("apply_qaoa: gamma/beta length mismatch");
    }
    auto state = prepare_plus(cost.n_qubits);
    if (state.dimension() != cost.values.size()) {
        throw std::invalid_argument("apply_qaoa: cost table dimension mismatch");
    }
    for (std::size_t l = 0; l < angles.gammas.size(); ++l) {
        apply_cost_layer(state, cost.values, angles.gammas[l]);
        apply_mixer_layer(state, angles.betas[l]);
    }
    return state;
}

struct NoiseSpec {
    double sigma_qn = 0.0;
};

/// QAOA circuit in which every diagonal term (edge ZZ, and for MIS each
/// single-qubit Z) and every single-qubit mixer rotation gets its own angle
/// gamma_l + eps, beta_l + eps', with eps ~ N(0, sigma_qn^2) redrawn per call.
/// The cost layer uses the same sign convention as apply_qaoa, so
/// sigma_qn = 0 reproduces it.
inline Statevector apply_qaoa_noisy(const Graph &graph, ProblemKind kind, double omega,
                                    const QaoaAngles &angles, const NoiseSpec &noise,
                                    Rng &rng) {
    if (angles.gammas.size() != angles.betas.size()) {
        throw std::invalid_argument("apply_qaoa_noisy: gamma/beta length mismatch");
    }
    if (noise.sigma_qn < 0.0) {
        throw std::invalid_argument("apply_qaoa_noisy: sigma_qn must be non-negative");
    }
    const int n = graph.n_nodes();
    auto state = prepare_plus(n);
    const auto &edges = graph.edges();
    const bool mis = kind == ProblemKind::MIS;

    std::vector<double> edge_gamma(edges.size());
    std::vector<double> node_gamma(static_cast<std::size_t>(n));
    std::vector<double> node_beta(static_cast<std::size_t>(n));
    auto amps = state.amplitudes();

    for (std::size_t l = 0; l < angles.gammas.size(); ++l) {
        for (auto &g : edge_gamma) {
            g = angles.gammas[l] + noise.sigma_qn * standard_normal(rng);
        }
        if (mis) {
            for (auto &g : node_gamma) {
                g = angles.gammas[l] + noise.sigma_qn * standard_normal(rng);
            }
        }
        for (auto &b : node_beta) {
            b = angles.betas[l] + noise.sigma_qn * standard_normal(rng);
        }

        for (Bitstring z = 0; z < amps.size(); ++z) {
            double phase = 0.0;
            for (std::size_t e = 0; e < edges.size(); ++e) {
                const double zz = z_eigenvalue(z, edges[e].u) * z_eigenvalue(z, edges[e].v);
                const double term = mis ? omega * zz : -0.5 * (1.0 - zz);
                phase += edge_gamma[e] * term;
            }
            if (mis) {
                for (int i = 0; i < n; ++i) {
                    phase += node_gamma[static_cast<std::size_t>(i)] * z_eigenvalue(z, i);
                }
            }
            amps[z] *= Complex{std::cos(-phase), std::sin(-phase)};
        }
        for (int q = 0; q < n; ++q) {
            apply_rx_like(state, q, node_beta[static_cast<std::size_t>(q)]);
        }
    }
    return state;
}

/// <psi|H_C|psi> for a diagonal H_C.
inline double exact_energy(const Statevector &state, const CostTable &cost) {
    if (state.dimension() != cost.values.size()) {
        throw std::invalid_argument("exact_energy: dimension mismatch");
    }
    double e = 0.0;
    for (std::size_t z = 0; z < state.dimension(); ++z) {
        e += std::norm(state[z]) * cost.values[z];
    }
    return e;
}

struct ShotCounts {
    std::map<Bitstring, long> counts;
    long total = 0;
};

struct ShotEstimate {
    double estimate = 0.0;
    ShotCounts counts;
};

/// Draws `n_shots` basis states from |amp|^2 and averages their costs.
inline ShotEstimate sample_energy(const Statevector &state, long n_shots,
                                  const CostTable &cost, Rng &rng) {
    if (n_shots < 1) {
        throw std::invalid_argument("sample_energy: n_shots must be >= 1");
    }
    if (state.dimension() != cost.values.size()) {
        throw std::invalid_argument("sample_energy: dimension mismatch");
    }
    std::vector<double> cdf(state.dimension());
    double acc = 0.0;
    for (std::size_t z = 0; z < cdf.size(); ++z) {
        acc += std::norm(state[z]);
        cdf[z] = acc;
    }
    ShotEstimate out;
    double sum = 0.0;
    for (long s = 0; s < n_shots; ++s) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto z = static_cast<Bitstring>(std::distance(cdf.begin(), it));
        if (z >= cdf.size()) {
            z = cdf.size() - 1;
        }
        ++out.counts.counts[z];
        sum += cost.values[z];
    }
    out.counts.total = n_shots;
    out.estimate = sum / static_cast<double>(n_shots);
    return out;
}

/// Probability mass on the solution bitstrings.
inline double fidelity(const Statevector &state, std::span<const Bitstring> ground_set) {
    if (ground_set.empty()) {
        throw std::invalid_argument("fidelity: empty ground set");
    }
    double f = 0.0;
    for (auto z : ground_set) {
        if (z >= state.dimension()) {
            throw std::out_of_range("fidelity: bitstring out of range");
        }
        f += std::norm(state[z]);
    }
    return f;
}

inline double approximation_ratio(double energy, double e_gs) {
    if (e_gs == 0.0) {
        throw std::domain_error("approximation_ratio: ground-state energy is zero");
    }
    return energy / e_gs;
}

struct Landscape {
    int resolution = 0;
    std::vector<double> axis;  ///< shared gamma/beta grid over [0, pi]
    Matrix energy;             ///< energy(i, j) at gamma = axis[i], beta = axis[j]
    Matrix fidelity;
    std::pair<int, int> argmin_energy;
    std::pair<int, int> argmax_fidelity;

    [[nodiscard]] std::pair<double, double> theta_e() const {
        return {axis[static_cast<std::size_t>(argmin_energy.first)],
                axis[static_cast<std::size_t>(argmin_energy.second)]};
    }
    [[nodiscard]] std::pair<double, double> theta_f() const {
        return {axis[static_cast<std::size_t>(argmax_fidelity.first)],
                axis[static_cast<std::size_t>(argmax_fidelity.second)]};
    }
};

/// p = 1 energy and fidelity on a uniform resolution x resolution grid over
/// [0, pi]^2. Ties in argmin/argmax go to the first index in row-major order.
inline Landscape landscape_grid(const ProblemInstance &instance, int resolution) {
    if (resolution < 2) {
        throw std::invalid_argument("landscape_grid: resolution must be >= 2");
    }
    Landscape L;
    L.resolution = resolution;
    L.axis.resize(static_cast<std::size_t>(resolution));
    for (int k = 0; k < resolution; ++k) {
        L.axis[static_cast<std::size_t>(k)] = kPi * k / (resolution - 1);
    }
    L.energy.resize(resolution, resolution);
    L.fidelity.resize(resolution, resolution);
    double best_e = kInf;
    double best_f = -kInf;
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            const QaoaAngles angles({L.axis[static_cast<std::size_t>(i)]},
                                    {L.axis[static_cast<std::size_t>(j)]});
            const auto state = apply_qaoa(instance.cost, angles);
            const double e = exact_energy(state, instance.cost);
            const double f = fidelity(state, instance.ground_set);
            L.energy(i, j) = e;
            L.fidelity(i, j) = f;
            if (e < best_e) {
                best_e = e;
                L.argmin_energy = {i, j};
            }
            if (f > best_f) {
                best_f = f;
                L.argmax_fidelity = {i, j};
            }
        }
    }
    return L;
}

} // namespace bqaoa
