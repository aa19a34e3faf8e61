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
 * Expected-improvement acquisition and the differential-evolution maximizer
 * used to optimize it.
 */
#pragma once

#include "common.hpp"
#include "gp.hpp"
#include "sampling.hpp"

namespace bqaoa {

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Expected improvement of a minimization problem over the incumbent f_min.
/// Uses the posterior standard deviation s = sqrt(var):
/// EI = (f_min - mu) Phi(z) + s phi(z), z = (f_min - mu) / s, and
/// max(0, f_min - mu) when s = 0.
inline double expected_improvement(const Posterior &post, double f_min) {
    const double s = std::sqrt(std::max(0.0, post.var));
    const double diff = f_min - post.mu;
    if (!(s > 0.0)) {
        return std::max(0.0, diff);
    }
    const double z = diff / s;
    return std::max(0.0, diff * normal_cdf(z) + s * normal_pdf(z));
}

struct DEConfig {
    int pop_factor = 15;          ///< population = pop_factor * dimension
    Interval m_range{0.5, 1.0};   ///< mutation factor, redrawn once per generation
    double crossover = 0.5;       ///< per-coordinate probability of taking the mutant
    double std_threshold = 1e-3;  ///< stop when score std <= this ...
    double dist_threshold = 1e-3; ///< ... and mean pairwise distance <= this
    int max_generations = 1000;

    [[nodiscard]] int population(std::size_t dim) const {
        return pop_factor * static_cast<int>(dim);
    }
};

struct DEGeneration {
    int generation = 0;
    double best = kNaN;
    double score_std = kNaN;
    /// Only computed once the score-std criterion holds (NaN otherwise).
    double mean_distance = kNaN;
};

struct DEResult {
    Vector argmax;
    double value = -kInf;
    int generations = 0;   ///< evolution steps performed after initialization
    bool converged = false;
    double score_std = kNaN;
    double mean_distance = kNaN;
    long evaluations = 0;
    std::vector<DEGeneration> history;
};

/// v = base + m (a - b).
inline Vector de_mutation(const Vector &base, const Vector &a, const Vector &b, double m) {
    return base + m * (a - b);
}

inline double population_score_std(const Vector &scores) {
    const double mean = scores.mean();
    return std::sqrt((scores.array() - mean).square().sum() / static_cast<double>(scores.size()));
}

/// Mean Euclidean distance over all unordered member pairs (rows).
inline double mean_pairwise_distance(const Matrix &members) {
    const Eigen::Index n = members.rows();
    if (n < 2) {
        return 0.0;
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            s += (members.row(i) - members.row(j)).norm();
        }
    }
    return s / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

using DEObserver = std::function<void(const DEGeneration &)>;

/// Scores every row of a population matrix at once.
using BatchObjective = std::function<Vector(const Matrix &rows)>;

inline BatchObjective batched(Objective objective) {
    return [objective = std::move(objective)](const Matrix &rows) {
        Vector out(rows.rows());
        Vector x(rows.cols());
        for (Eigen::Index i = 0; i < rows.rows(); ++i) {
            x = rows.row(i).transpose();
            out[i] = objective(as_span(x));
        }
        return out;
    };
}

/// Expected improvement of every row of `queries` under `model`.
inline Vector expected_improvement_batch(const GpModel &model, const Matrix &queries,
                                         double f_min) {
    Vector mu;
    Vector var;
    model.predict_batch(queries, mu, var);
    Vector ei(queries.rows());
    for (Eigen::Index i = 0; i < ei.size(); ++i) {
        ei[i] = expected_improvement({mu[i], var[i]}, f_min);
    }
    return ei;
}

/// Maximizes `objective` over the box with classic DE/rand/1/bin:
///  (a) latin-hypercube initial population of pop_factor * d members,
///  (b) mutation v = x_r0 + M (x_r1 - x_r2), r0, r1, r2 distinct and != i,
///      M ~ U(m_range) once per generation, clipped to the box,
///  (c) binomial crossover with one forced mutant coordinate,
///  (d) greedy selection, offspring kept when its score is >= the parent's.
/// Stops when both the score std and mean pairwise member distance fall
/// below their thresholds, or after max_generations.
inline DEResult de_maximize(const BatchObjective &objective, const Bounds &bounds,
                            const DEConfig &config, Rng &rng,
                            const DEObserver &observer = {}) {
    validate_bounds(bounds);
    const auto d = static_cast<Eigen::Index>(bounds.size());
    const int np = config.population(bounds.size());
    if (np < 4) {
        throw std::invalid_argument("de_maximize: population must be >= 4 for mutation partners");
    }
    if (!(config.std_threshold > 0.0) || !(config.dist_threshold > 0.0)) {
        throw std::invalid_argument("de_maximize: thresholds must be positive");
    }
    if (config.max_generations < 0) {
        throw std::invalid_argument("de_maximize: max_generations must be non-negative");
    }

    DEResult res;
    Matrix pop = latin_hypercube(np, bounds, rng);
    auto score = [&](const Matrix &rows) {
        Vector v = objective(rows);
        if (v.size() != rows.rows()) {
            throw std::logic_error("de_maximize: objective returned wrong number of scores");
        }
        res.evaluations += rows.rows();
        return v;
    };
    Vector scores = score(pop);

    auto record = [&](int gen) {
        DEGeneration g;
        g.generation = gen;
        g.best = scores.maxCoeff();
        g.score_std = population_score_std(scores);
        if (g.score_std <= config.std_threshold) {
            g.mean_distance = mean_pairwise_distance(pop);
        }
        res.history.push_back(g);
        if (observer) {
            observer(g);
        }
        return g;
    };

    auto converged = [&](const DEGeneration &g) {
        return g.score_std <= config.std_threshold && g.mean_distance <= config.dist_threshold;
    };

    DEGeneration last = record(0);
    Matrix trial(np, d);
    Vector trial_scores(np);
    int gen = 0;
    while (!converged(last) && gen < config.max_generations) {
        ++gen;
        const double m = uniform(rng, config.m_range.lo, config.m_range.hi);
        for (int i = 0; i < np; ++i) {
            std::size_t r0 = 0;
            std::size_t r1 = 0;
            std::size_t r2 = 0;
            const auto n = static_cast<std::size_t>(np);
            const auto self = static_cast<std::size_t>(i);
            do {
                r0 = uniform_index(rng, n);
            } while (r0 == self);
            do {
                r1 = uniform_index(rng, n);
            } while (r1 == self || r1 == r0);
            do {
                r2 = uniform_index(rng, n);
            } while (r2 == self || r2 == r0 || r2 == r1);
            Vector v = de_mutation(pop.row(static_cast<Eigen::Index>(r0)).transpose(),
                                   pop.row(static_cast<Eigen::Index>(r1)).transpose(),
                                   pop.row(static_cast<Eigen::Index>(r2)).transpose(), m);
            clip_to_bounds(v, bounds);
            const auto forced = static_cast<Eigen::Index>(uniform_index(rng, bounds.size()));
            for (Eigen::Index j = 0; j < d; ++j) {
                const bool take = j == forced || uniform01(rng) < config.crossover;
                trial(i, j) = take ? v[j] : pop(i, j);
            }
        }
        trial_scores = score(trial);
        for (int i = 0; i < np; ++i) {
            if (trial_scores[i] >= scores[i]) {
                pop.row(i) = trial.row(i);
                scores[i] = trial_scores[i];
            }
        }
        last = record(gen);
    }

    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < np; ++i) {
        if (scores[i] > scores[best]) {
            best = i;
        }
    }
    res.argmax = pop.row(best).transpose();
    res.value = scores[best];
    res.generations = gen;
    res.converged = converged(last);
    res.score_std = last.score_std;
    res.mean_distance =
        std::isnan(last.mean_distance) ? mean_pairwise_distance(pop) : last.mean_distance;
    return res;
}

inline DEResult de_maximize(const Objective &objective, const Bounds &bounds,
                            const DEConfig &config, Rng &rng,
                            const DEObserver &observer = {}) {
    return de_maximize(batched(objective), bounds, config, rng, observer);
}

} // namespace bqaoa
