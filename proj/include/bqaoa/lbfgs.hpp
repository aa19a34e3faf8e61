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
 * Box-constrained limited-memory BFGS.
 *
 * Projected variant: variables sitting on a bound with the gradient pushing
 * outward are frozen for the iteration, the two-loop recursion runs on the
 * remaining free set, and a backtracking Armijo search is done along the
 * projected path P(x + t d).
 */
#pragma once

#include "common.hpp"

#include <deque>

namespace bqaoa {

/// f(x) with gradient written into `grad` (same size as x).
using GradientObjective = std::function<double(const Vector &x, Vector &grad)>;

struct LbfgsOptions {
    int memory = 10;
    int max_iterations = 200;
    /// Hard cap on objective evaluations; 0 disables it.
    long max_evaluations = 0;
    /// Stop when the projected-gradient infinity norm falls below this.
    double pg_tolerance = 1e-5;
    /// Stop on relative decrease (f_k - f_{k+1}) / max(|f_k|, |f_{k+1}|, 1).
    double f_tolerance = 1e7 * std::numeric_limits<double>::epsilon();
    double armijo = 1e-4;
    int max_backtracks = 30;
};

struct LbfgsResult {
    Vector x;
    double f = kInf;
    int iterations = 0;
    long evaluations = 0;
    bool converged = false;
};

namespace detail {

inline Vector project(const Vector &x, const Bounds &bounds) {
    Vector out = x;
    clip_to_bounds(out, bounds);
    return out;
}

/// Mask of variables free to move: not pinned at a bound by the gradient.
inline std::vector<bool> free_set(const Vector &x, const Vector &g, const Bounds &bounds) {
    std::vector<bool> free(static_cast<std::size_t>(x.size()), true);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const auto &iv = bounds[static_cast<std::size_t>(i)];
        if ((x[i] <= iv.lo && g[i] > 0.0) || (x[i] >= iv.hi && g[i] < 0.0)) {
            free[static_cast<std::size_t>(i)] = false;
        }
    }
    return free;
}

} // namespace detail

inline LbfgsResult lbfgs_minimize(const GradientObjective &fn, const Vector &x0,
                                  const Bounds &bounds, const LbfgsOptions &opt = {}) {
    validate_bounds(bounds);
    if (static_cast<std::size_t>(x0.size()) != bounds.size()) {
        throw std::invalid_argument("lbfgs_minimize: x0 / bounds dimension mismatch");
    }
    const Eigen::Index n = x0.size();
    LbfgsResult res;
    auto budget_left = [&] {
        return opt.max_evaluations <= 0 || res.evaluations < opt.max_evaluations;
    };
    auto evaluate = [&](const Vector &x, Vector &g) {
        ++res.evaluations;
        g.resize(n);
        const double f = fn(x, g);
        if (!std::isfinite(f) || !g.allFinite()) {
            return kInf;
        }
        return f;
    };

    Vector x = detail::project(x0, bounds);
    Vector g(n);
    double f = evaluate(x, g);
    res.x = x;
    res.f = f;
    if (!std::isfinite(f)) {
        return res;
    }

    std::deque<Vector> s_hist;
    std::deque<Vector> y_hist;
    std::deque<double> rho_hist;

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        res.iterations = iter;
        const Vector pg = x - detail::project(x - g, bounds);
        if (pg.lpNorm<Eigen::Infinity>() < opt.pg_tolerance) {
            res.converged = true;
            break;
        }
        if (!budget_left()) {
            break;
        }

        const auto free = detail::free_set(x, g, bounds);
        auto mask = [&](Vector v) {
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!free[static_cast<std::size_t>(i)]) {
                    v[i] = 0.0;
                }
            }
            return v;
        };

        // Two-loop recursion on the free subspace.
        Vector q = mask(g);
        const std::size_t m = s_hist.size();
        std::vector<double> alpha(m);
        for (std::size_t k = m; k-- > 0;) {
            alpha[k] = rho_hist[k] * mask(s_hist[k]).dot(q);
            q -= alpha[k] * mask(y_hist[k]);
        }
        if (m > 0) {
            const Vector ys = mask(y_hist.back());
            const double yy = ys.squaredNorm();
            const double sy = mask(s_hist.back()).dot(ys);
            if (yy > 0.0 && sy > 0.0) {
                q *= sy / yy;
            }
        }
        for (std::size_t k = 0; k < m; ++k) {
            const double beta = rho_hist[k] * mask(y_hist[k]).dot(q);
            q += (alpha[k] - beta) * mask(s_hist[k]);
        }
        Vector d = -mask(q);
        if (d.dot(g) >= 0.0) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = -mask(g);
        }
        if (d.squaredNorm() == 0.0) {
            res.converged = true;
            break;
        }

        double t = (m == 0) ? std::min(1.0, 1.0 / std::max(d.lpNorm<Eigen::Infinity>(), 1e-12))
                            : 1.0;
        Vector x_new(n);
        Vector g_new(n);
        double f_new = kInf;
        bool accepted = false;
        for (int bt = 0; bt < opt.max_backtracks && budget_left(); ++bt) {
            x_new = detail::project(x + t * d, bounds);
            if ((x_new - x).lpNorm<Eigen::Infinity>() == 0.0) {
                break;
            }
            f_new = evaluate(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + opt.armijo * g.dot(x_new - x)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (m > 0) {
                // Retry once from steepest descent with a clean memory.
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
                continue;
            }
            break;
        }

        const Vector s = x_new - x;
        const Vector y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-10 * y.squaredNorm()) {
            if (static_cast<int>(s_hist.size()) == opt.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
        }

        const double rel = (f - f_new) / std::max({std::abs(f), std::abs(f_new), 1.0});
        x = x_new;
        g = g_new;
        f = f_new;
        res.x = x;
        res.f = f;
        res.iterations = iter + 1;
        if (rel <= opt.f_tolerance) {
            res.converged = true;
            break;
        }
    }
    return res;
}

/// Wraps a plain objective with a forward-difference gradient (d + 1
/// evaluations per call). Steps are taken toward the interior at a bound.
inline GradientObjective forward_difference(Objective f, const Bounds &bounds,
                                            double rel_step = 1.4901161193847656e-08) {
    return [f = std::move(f), bounds, rel_step](const Vector &x, Vector &grad) {
        const double fx = f(as_span(x));
        Vector xh = x;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            double h = rel_step * std::max(1.0, std::abs(x[i]));
            if (x[i] + h > bounds[static_cast<std::size_t>(i)].hi) {
                h = -h;
            }
            xh[i] = x[i] + h;
            grad[i] = (f(as_span(xh)) - fx) / h;
            xh[i] = x[i];
        }
        return fx;
    };
}

} // namespace bqaoa
