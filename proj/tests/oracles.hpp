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

// Brute-force reference implementations used by the tests. Written from the
// definitions with dense linear algebra, independent of the library code paths.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Cut size of z on the edge list.
inline int cut_size(const std::vector<std::pair<int, int>> &edges, std::uint64_t z) {
    int cut = 0;
    for (auto [u, v] : edges) {
        cut += static_cast<int>(((z >> u) & 1U) != ((z >> v) & 1U));
    }
    return cut;
}

/// MIS energy counted on selected nodes: each selected node contributes -2
/// relative to none, each edge with both endpoints in the same state
/// contributes +w and otherwise -w.
inline double mis_energy(int n, const std::vector<std::pair<int, int>> &edges, double omega,
                         std::uint64_t z) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        e += ((z >> i) & 1U) ? -1.0 : 1.0;
    }
    for (auto [u, v] : edges) {
        const bool same = (((z >> u) & 1U) == ((z >> v) & 1U));
        e += same ? omega : -omega;
    }
    return e;
}

/// Dense Pauli-X on qubit q of an n-qubit register (bit q of the index).
inline CMatrix pauli_x(int n, int q) {
    const std::size_t dim = std::size_t{1} << n;
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t z = 0; z < dim; ++z) {
        m(static_cast<Eigen::Index>(z ^ (std::size_t{1} << q)), static_cast<Eigen::Index>(z)) = 1.0;
    }
    return m;
}

/// exp(-i t H) for Hermitian H through its eigendecomposition.
inline CMatrix expm_hermitian(const CMatrix &h, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const Eigen::VectorXd lam = es.eigenvalues();
    CVector phase(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        phase[k] = std::exp(std::complex<double>(0.0, -t * lam[k]));
    }
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

/// Dense QAOA state: prod_l exp(-i b_l H_M) exp(-i g_l H_C) |+>.
inline CVector qaoa_state(const std::vector<double> &cost_diag, int n,
                          const std::vector<double> &gammas, const std::vector<double> &betas) {
    const auto dim = static_cast<Eigen::Index>(cost_diag.size());
    CMatrix hc = CMatrix::Zero(dim, dim);
    for (Eigen::Index z = 0; z < dim; ++z) {
        hc(z, z) = cost_diag[static_cast<std::size_t>(z)];
    }
    CMatrix hm = CMatrix::Zero(dim, dim);
    for (int q = 0; q < n; ++q) {
        hm += pauli_x(n, q);
    }
    CVector psi = CVector::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    for (std::size_t l = 0; l < gammas.size(); ++l) {
        psi = expm_hermitian(hc, gammas[l]) * psi;
        psi = expm_hermitian(hm, betas[l]) * psi;
    }
    return psi;
}

/// Matern 3/2 covariance written out from its closed form.
inline double matern32(double r, double sigma2, double ell) {
    const double a = std::sqrt(3.0) * r / ell;
    return sigma2 * (1.0 + a) * std::exp(-a);
}

/// Gaussian log-density of y under N(0, K) with dense inverse and determinant.
inline double gaussian_log_density(const Eigen::MatrixXd &k, const Eigen::VectorXd &y) {
    const double n = static_cast<double>(y.size());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
    const double quad = y.dot(lu.solve(y));
    return -0.5 * quad - 0.5 * std::log(lu.determinant()) - 0.5 * n * std::log(2.0 * M_PI);
}

/// Posterior mean and variance from the textbook formulas with a dense inverse.
inline std::pair<double, double> posterior(const Eigen::MatrixXd &k, const Eigen::VectorXd &kstar,
                                           double kss, const Eigen::VectorXd &y) {
    const Eigen::MatrixXd kinv = k.inverse();
    return {kstar.dot(kinv * y), kss - kstar.dot(kinv * kstar)};
}

/// Standard normal density and distribution through std::erf.
inline double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
inline double Phi(double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); }

} // namespace oracle
