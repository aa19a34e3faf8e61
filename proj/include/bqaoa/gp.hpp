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
 * Gaussian-process surrogate with an isotropic Matern 3/2 kernel and a white
 * noise term on the covariance diagonal.
 *
 * Observations are standardized to zero mean and unit variance before any
 * linear algebra; the prior mean is zero on that scale and predictions are
 * mapped back. Hyperparameters therefore live on the standardized scale.
 * All factorizations add a jitter that starts at 1e-10 and is escalated by
 * 10x up to 1e-4 when Cholesky fails.
 */
#pragma once

#include "common.hpp"
#include "lbfgs.hpp"
#include "sampling.hpp"

#include <optional>

namespace bqaoa {

struct Hyperparams {
    double sigma2 = 1.0;   ///< signal variance
    double ell = 1.0;      ///< length scale
    double sigma_n2 = 1e-6; ///< white-noise variance
};

struct HyperparamBounds {
    Interval sigma2{1e-3, 1e3};
    Interval ell{1e-2, 1e2};
    Interval sigma_n2{1e-8, 1e1};

    void validate() const {
        for (const auto &iv : {sigma2, ell, sigma_n2}) {
            if (!(iv.lo > 0.0) || !(iv.hi > iv.lo)) {
                throw std::invalid_argument("hyperparameter bounds must satisfy 0 < lo < hi");
            }
        }
    }

    [[nodiscard]] Bounds log_box() const {
        return {{std::log(sigma2.lo), std::log(sigma2.hi)},
                {std::log(ell.lo), std::log(ell.hi)},
                {std::log(sigma_n2.lo), std::log(sigma_n2.hi)}};
    }
};

struct GpOptions {
    bool standardize = true;
    double jitter_start = 1e-10;
    double jitter_max = 1e-4;
};

/// Training set: design matrix (one parameter vector per row) and observations.
struct Dataset {
    Matrix points;
    Vector y;

    Dataset() = default;
    Dataset(Matrix pts, Vector obs) : points(std::move(pts)), y(std::move(obs)) {
        if (points.rows() != y.size()) {
            throw std::invalid_argument("Dataset: row count must match observation count");
        }
    }

    [[nodiscard]] Eigen::Index size() const { return y.size(); }
    [[nodiscard]] Eigen::Index dim() const { return points.cols(); }

    void append(std::span<const double> theta, double value) {
        const auto d = static_cast<Eigen::Index>(theta.size());
        if (size() > 0 && d != dim()) {
            throw std::invalid_argument("Dataset::append: dimension mismatch");
        }
        const Eigen::Index n = size();
        points.conservativeResize(n + 1, d);
        y.conservativeResize(n + 1);
        for (Eigen::Index j = 0; j < d; ++j) {
            points(n, j) = theta[static_cast<std::size_t>(j)];
        }
        y[n] = value;
    }
};

inline constexpr double kSqrt3 = 1.7320508075688772;

inline double matern_from_distance(double r, const Hyperparams &hp) {
    const double a = kSqrt3 * r / hp.ell;
    return hp.sigma2 * (1.0 + a) * std::exp(-a);
}

/// sigma2 (1 + sqrt(3) r / ell) exp(-sqrt(3) r / ell), r = |a - b|_2.
inline double matern_kernel(std::span<const double> a, std::span<const double> b,
                            const Hyperparams &hp) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("matern_kernel: dimension mismatch");
    }
    double r2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        r2 += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return matern_from_distance(std::sqrt(r2), hp);
}

inline Matrix pairwise_distances(const Matrix &points) {
    const Eigen::Index n = points.rows();
    Matrix r(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = (points.row(i) - points.row(j)).norm();
            r(i, j) = d;
            r(j, i) = d;
        }
    }
    return r;
}

struct Standardization {
    double mean = 0.0;
    double scale = 1.0;
};

inline Standardization standardization_of(const Vector &y, bool enabled) {
    Standardization s;
    if (!enabled || y.size() == 0) {
        return s;
    }
    s.mean = y.mean();
    if (y.size() > 1) {
        const double var = (y.array() - s.mean).square().sum() / static_cast<double>(y.size());
        const double sd = std::sqrt(var);
        if (sd > 1e-12 * std::max(1.0, std::abs(s.mean))) {
            s.scale = sd;
        }
    }
    return s;
}

namespace detail {

struct Factorization {
    Matrix L;
    double jitter = 0.0;
};

/// Cholesky of K + (sigma_n2 + jitter) I with jitter escalation.
inline std::optional<Factorization> factorize(const Matrix &k_matern, double sigma_n2,
                                              const GpOptions &opt) {
    const Eigen::Index n = k_matern.rows();
    for (double jitter = opt.jitter_start; jitter <= opt.jitter_max * (1.0 + 1e-9);
         jitter *= 10.0) {
        Matrix c = k_matern;
        c.diagonal().array() += sigma_n2 + jitter;
        Eigen::LLT<Matrix> llt(c);
        if (llt.info() != Eigen::Success) {
            continue;
        }
        Matrix L = llt.matrixL();
        bool ok = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return Factorization{std::move(L), jitter};
        }
    }
    return std::nullopt;
}

/// Solves (L L^T) x = b.
inline Vector cholesky_solve(const Matrix &L, const Vector &b) {
    const Vector w = L.triangularView<Eigen::Lower>().solve(b);
    return L.transpose().triangularView<Eigen::Upper>().solve(w);
}

inline Matrix matern_matrix(const Matrix &dist, const Hyperparams &hp) {
    return dist.unaryExpr([&](double r) { return matern_from_distance(r, hp); });
}

} // namespace detail

class factorization_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Posterior {
    double mu = 0.0;
    double var = 0.0;
};

/// Conditioned GP, immutable after construction.
class GpModel {
  public:
    static GpModel build(Dataset data, const Hyperparams &hp, const GpOptions &opt = {}) {
        if (data.size() < 1) {
            throw std::invalid_argument("GpModel: dataset must be non-empty");
        }
        if (!(hp.sigma2 > 0.0) || !(hp.ell > 0.0) || !(hp.sigma_n2 >= 0.0)) {
            throw std::invalid_argument("GpModel: invalid hyperparameters");
        }
        GpModel m;
        m.hp_ = hp;
        m.std_ = standardization_of(data.y, opt.standardize);
        m.ys_ = (data.y.array() - m.std_.mean) / m.std_.scale;
        const Matrix km = detail::matern_matrix(pairwise_distances(data.points), hp);
        auto fac = detail::factorize(km, hp.sigma_n2, opt);
        if (!fac) {
            throw factorization_error("GpModel: covariance not positive definite at max jitter");
        }
        m.L_ = std::move(fac->L);
        m.jitter_ = fac->jitter;
        m.alpha_ = detail::cholesky_solve(m.L_, m.ys_);
        m.point_norms_ = data.points.rowwise().squaredNorm();
        m.data_ = std::move(data);
        return m;
    }

    [[nodiscard]] Posterior predict(std::span<const double> q) const {
        if (static_cast<Eigen::Index>(q.size()) != data_.dim()) {
            throw std::invalid_argument("posterior: query dimension mismatch");
        }
        const Eigen::Index n = data_.size();
        Vector kappa(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double r2 = 0.0;
            for (Eigen::Index j = 0; j < data_.dim(); ++j) {
                const double d = data_.points(i, j) - q[static_cast<std::size_t>(j)];
                r2 += d * d;
            }
            kappa[i] = matern_from_distance(std::sqrt(r2), hp_);
        }
        const Vector v = L_.triangularView<Eigen::Lower>().solve(kappa);
        Posterior p;
        p.mu = std_.mean + std_.scale * kappa.dot(alpha_);
        p.var = std::max(0.0, hp_.sigma2 - v.squaredNorm()) * std_.scale * std_.scale;
        return p;
    }

    /// Posterior at every row of `queries` (M x d). Distances go through a
    /// Gram-matrix product, so this agrees with predict() to round-off.
    void predict_batch(const Matrix &queries, Vector &mu, Vector &var) const {
        if (queries.cols() != data_.dim()) {
            throw std::invalid_argument("posterior: query dimension mismatch");
        }
        const Eigen::Index m = queries.rows();
        const Vector qn = queries.rowwise().squaredNorm();
        Matrix kstar = -2.0 * (data_.points * queries.transpose());
        kstar.colwise() += point_norms_;
        kstar.rowwise() += qn.transpose();
        kstar = kstar.unaryExpr(
            [this](double r2) { return matern_from_distance(std::sqrt(std::max(r2, 0.0)), hp_); });
        mu.noalias() = kstar.transpose() * alpha_;
        mu = (mu.array() * std_.scale + std_.mean).matrix();
        L_.triangularView<Eigen::Lower>().solveInPlace(kstar);
        var.resize(m);
        const double s2 = std_.scale * std_.scale;
        for (Eigen::Index j = 0; j < m; ++j) {
            var[j] = std::max(0.0, hp_.sigma2 - kstar.col(j).squaredNorm()) * s2;
        }
    }

    [[nodiscard]] const Dataset &dataset() const { return data_; }
    [[nodiscard]] const Hyperparams &hyperparams() const { return hp_; }
    [[nodiscard]] const Matrix &chol() const { return L_; }
    [[nodiscard]] const Vector &alpha() const { return alpha_; }
    [[nodiscard]] const Vector &standardized_y() const { return ys_; }
    [[nodiscard]] double y_mean() const { return std_.mean; }
    [[nodiscard]] double y_std() const { return std_.scale; }
    [[nodiscard]] double jitter() const { return jitter_; }

  private:
    Dataset data_;
    Hyperparams hp_;
    Standardization std_;
    Vector ys_;
    Matrix L_;
    Vector alpha_;
    Vector point_norms_;
    double jitter_ = 0.0;
};

inline GpModel build_model(Dataset data, const Hyperparams &hp, const GpOptions &opt = {}) {
    return GpModel::build(std::move(data), hp, opt);
}

/// Predictive mean and latent variance, both on the original y scale.
inline Posterior posterior(const GpModel &model, std::span<const double> query) {
    return model.predict(query);
}

struct LmlValue {
    double value = -kInf;
    /// d lml / d(log sigma2, log ell, log sigma_n2); empty if not requested.
    Eigen::Vector3d grad = Eigen::Vector3d::Zero();
};

/// Log marginal likelihood of standardized observations `ys` given the
/// pairwise distance matrix. Throws factorization_error when the covariance
/// cannot be factorized.
inline LmlValue lml_from_distances(const Matrix &dist, const Vector &ys, const Hyperparams &hp,
                                   bool with_gradient, const GpOptions &opt = {}) {
    const Eigen::Index n = ys.size();
    const Matrix km = detail::matern_matrix(dist, hp);
    auto fac = detail::factorize(km, hp.sigma_n2, opt);
    if (!fac) {
        throw factorization_error("log_marginal_likelihood: factorization failed");
    }
    const Vector alpha = detail::cholesky_solve(fac->L, ys);
    LmlValue out;
    out.value = -0.5 * ys.dot(alpha) - fac->L.diagonal().array().log().sum() -
                0.5 * static_cast<double>(n) * std::log(2.0 * kPi);
    if (with_gradient) {
        const Matrix linv = fac->L.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
        const Matrix cinv = linv.transpose() * linv;
        const Matrix w = alpha * alpha.transpose() - cinv;
        double g_sigma = 0.0;
        double g_ell = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                const double a = kSqrt3 * dist(i, j) / hp.ell;
                g_sigma += w(i, j) * km(i, j);
                g_ell += w(i, j) * hp.sigma2 * a * a * std::exp(-a);
            }
        }
        out.grad[0] = 0.5 * g_sigma;
        out.grad[1] = 0.5 * g_ell;
        out.grad[2] = 0.5 * hp.sigma_n2 * w.trace();
    }
    return out;
}

/// -1/2 y^T C^-1 y - 1/2 log det C - N/2 log 2 pi with C = K + sigma_n2 I
/// (plus jitter), evaluated on the standardized observations.
inline double log_marginal_likelihood(const Dataset &data, const Hyperparams &hp,
                                      const GpOptions &opt = {}) {
    if (data.size() < 1) {
        throw std::invalid_argument("log_marginal_likelihood: empty dataset");
    }
    const auto s = standardization_of(data.y, opt.standardize);
    const Vector ys = (data.y.array() - s.mean) / s.scale;
    return lml_from_distances(pairwise_distances(data.points), ys, hp, false, opt).value;
}

inline Hyperparams hyperparams_from_log(const Eigen::Vector3d &u) {
    return {std::exp(u[0]), std::exp(u[1]), std::exp(u[2])};
}

inline Eigen::Vector3d hyperparams_to_log(const Hyperparams &hp) {
    return {std::log(hp.sigma2), std::log(hp.ell), std::log(hp.sigma_n2)};
}

struct FitResult {
    Hyperparams hp;
    double lml = -kInf;
    int best_restart = -1;
    std::vector<Hyperparams> starts;
    std::vector<double> start_lml;
    std::vector<double> final_lml;
};

/// Maximizes the log marginal likelihood in log-hyperparameter space with
/// bounded L-BFGS from `n_restarts` starting points: the warm start (if
/// given, clamped into bounds) followed by a latin-hypercube design over the
/// log-box. Ties between restarts go to the lowest restart index.
inline FitResult fit_hyperparams(const Dataset &data, const HyperparamBounds &bounds,
                                 int n_restarts, Rng &rng,
                                 std::optional<Hyperparams> warm_start = std::nullopt,
                                 const GpOptions &opt = {}) {
    if (n_restarts < 1) {
        throw std::invalid_argument("fit_hyperparams: n_restarts must be >= 1");
    }
    if (data.size() < 1) {
        throw std::invalid_argument("fit_hyperparams: empty dataset");
    }
    bounds.validate();
    const Bounds box = bounds.log_box();
    const auto s = standardization_of(data.y, opt.standardize);
    const Vector ys = (data.y.array() - s.mean) / s.scale;
    const Matrix dist = pairwise_distances(data.points);

    std::vector<Eigen::Vector3d> starts;
    if (warm_start) {
        Vector u = hyperparams_to_log(*warm_start);
        clip_to_bounds(u, box);
        starts.emplace_back(u);
    }
    const int n_design = n_restarts - static_cast<int>(starts.size());
    if (n_design > 0) {
        const Matrix design = latin_hypercube(n_design, box, rng);
        for (Eigen::Index i = 0; i < design.rows(); ++i) {
            starts.emplace_back(design.row(i).transpose());
        }
    }

    auto neg_lml = [&](const Vector &u, Vector &grad) {
        try {
            const auto r = lml_from_distances(dist, ys, hyperparams_from_log(u), true, opt);
            grad = -r.grad;
            return -r.value;
        } catch (const factorization_error &) {
            grad.setZero(3);
            return kInf;
        }
    };

    LbfgsOptions lopt;
    lopt.max_iterations = 100;
    lopt.pg_tolerance = 1e-5;

    FitResult out;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        Vector g(3);
        const double f0 = neg_lml(starts[k], g);
        out.starts.push_back(hyperparams_from_log(starts[k]));
        out.start_lml.push_back(-f0);
        const auto res = lbfgs_minimize(neg_lml, starts[k], box, lopt);
        const double lml = std::isfinite(res.f) ? -res.f : -kInf;
        out.final_lml.push_back(lml);
        if (lml > out.lml) {
            out.lml = lml;
            out.hp = hyperparams_from_log(res.x);
            out.best_restart = static_cast<int>(k);
        }
    }
    if (out.best_restart < 0) {
        throw factorization_error("fit_hyperparams: no restart produced a finite likelihood");
    }
    return out;
}

} // namespace bqaoa
