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
 * Global-optimizer baselines on a black-box objective: basin-hopping, dual
 * annealing (generalized simulated annealing) and differential evolution run
 * directly on the objective. Each returns a call-indexed Trace with the same
 * schema as the Bayesian loop.
 */
#pragma once

#include "acquisition.hpp"
#include "lbfgs.hpp"
#include "problems.hpp"
#include "qaoa.hpp"
#include "trace.hpp"

#include <optional>

namespace bqaoa {

enum class BaselineMethod { BasinHopping, DualAnnealing, DirectDE };

inline const char *to_string(BaselineMethod m) {
    switch (m) {
    case BaselineMethod::BasinHopping:
        return "basinhopping";
    case BaselineMethod::DualAnnealing:
        return "dualannealing";
    case BaselineMethod::DirectDE:
        return "de";
    }
    return "?";
}

/// Bounded quasi-Newton with forward-difference gradients.
struct LocalSearchConfig {
    std::string method = "lbfgs";
    long max_evaluations = 100; ///< objective calls per invocation
    double tolerance = 1e-6;    ///< projected-gradient tolerance
};

struct BaselineConfig {
    BaselineMethod method = BaselineMethod::BasinHopping;
    int max_iterations = 100;
    /// Total objective-call cap across the run; 0 means iterations only.
    long max_evaluations = 0;
    double initial_temperature = 1.0;
    double decay = 0.95;      ///< basin-hopping cooling per iteration
    double step_size = 0.4;   ///< basin-hopping displacement half-width
    double visit_q = 2.62;    ///< dual annealing visiting parameter
    double accept_q = -5.0;   ///< dual annealing acceptance parameter
    double restart_ratio = 2e-5;
    LocalSearchConfig local;
    DEConfig de;
    std::uint64_t seed = 0;

    /// Defaults per method; dual annealing starts hot.
    static BaselineConfig for_method(BaselineMethod m) {
        BaselineConfig c;
        c.method = m;
        if (m == BaselineMethod::DualAnnealing) {
            c.initial_temperature = 5230.0;
            c.max_iterations = 1000;
        }
        return c;
    }

    void validate() const {
        if (max_iterations < 1) {
            throw std::invalid_argument("BaselineConfig: max_iterations must be >= 1");
        }
        if (max_evaluations < 0) {
            throw std::invalid_argument("BaselineConfig: max_evaluations must be >= 0");
        }
        if (!(decay > 0.0 && decay < 1.0)) {
            throw std::invalid_argument("BaselineConfig: decay must be in (0, 1)");
        }
        if (!(initial_temperature >= 0.0)) {
            throw std::invalid_argument("BaselineConfig: initial temperature must be >= 0");
        }
        if (!(step_size > 0.0)) {
            throw std::invalid_argument("BaselineConfig: step size must be positive");
        }
        if (!(visit_q > 1.0 && visit_q < 3.0)) {
            throw std::invalid_argument("BaselineConfig: visiting parameter must be in (1, 3)");
        }
        if (!(accept_q < 1.0)) {
            throw std::invalid_argument("BaselineConfig: acceptance parameter must be < 1");
        }
        if (local.max_evaluations < 1) {
            throw std::invalid_argument("BaselineConfig: local search needs >= 1 evaluation");
        }
        if (local.method != "lbfgs") {
            throw std::invalid_argument("BaselineConfig: unknown local search '" + local.method +
                                        "'");
        }
    }
};

inline nlohmann::json to_json(const BaselineConfig &c) {
    return {{"method", to_string(c.method)},
            {"max_iterations", c.max_iterations},
            {"max_evaluations", c.max_evaluations},
            {"initial_temperature", c.initial_temperature},
            {"decay", c.decay},
            {"step_size", c.step_size},
            {"visit_q", c.visit_q},
            {"accept_q", c.accept_q},
            {"restart_ratio", c.restart_ratio},
            {"local",
             {{"method", c.local.method},
              {"max_evaluations", c.local.max_evaluations},
              {"tolerance", c.local.tolerance}}},
            {"de", {{"pop_factor", c.de.pop_factor}, {"max_generations", c.de.max_generations}}},
            {"seed", c.seed}};
}

/// T0 * decay^k.
inline double basin_hopping_temperature(const BaselineConfig &c, int k) {
    return c.initial_temperature * std::pow(c.decay, k);
}

namespace detail {

/// Bounded local minimization through `f`, capped at the configured number
/// of objective calls (each gradient costs d + 1).
inline LbfgsResult local_minimize(const Objective &f, const Vector &x0, const Bounds &bounds,
                                  const LocalSearchConfig &cfg) {
    const auto d = static_cast<long>(bounds.size());
    LbfgsOptions opt;
    opt.max_evaluations = std::max<long>(1, cfg.max_evaluations / (d + 1));
    opt.pg_tolerance = cfg.tolerance;
    return lbfgs_minimize(forward_difference(f, bounds), x0, bounds, opt);
}

inline Vector uniform_point(const Bounds &bounds, Rng &rng) {
    Vector x(static_cast<Eigen::Index>(bounds.size()));
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        x[static_cast<Eigen::Index>(i)] = uniform(rng, bounds[i].lo, bounds[i].hi);
    }
    return x;
}

/// Running population spread of every value seen, used to put Metropolis
/// differences on a unit scale.
class RunningScale {
  public:
    void add(double y) {
        if (!std::isfinite(y)) {
            return;
        }
        ++n_;
        const double delta = y - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (y - mean_);
    }
    [[nodiscard]] double scale() const {
        if (n_ < 2) {
            return 1.0;
        }
        const double s = std::sqrt(m2_ / static_cast<double>(n_));
        return s > 1e-12 ? s : 1.0;
    }

  private:
    long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

} // namespace detail

/// Basin-hopping with a geometrically cooled Metropolis test:
/// local minimization, random displacement, local minimization, accept.
/// Energy differences are divided by the spread of all values observed so
/// far before comparing against the temperature.
inline Trace basin_hopping(const Objective &objective, const Bounds &bounds,
                           const BaselineConfig &config, Rng &rng, const Metrics &metrics = {}) {
    validate_bounds(bounds);
    config.validate();
    Trace trace;
    trace.method = to_string(BaselineMethod::BasinHopping);
    trace.seed = config.seed;
    trace.config = to_json(config);
    EvaluationRecorder recorder(objective, metrics, trace);
    detail::RunningScale spread;
    const Objective f = [&](std::span<const double> x) {
        const double y = recorder(x);
        spread.add(y);
        return y;
    };
    auto exhausted = [&] {
        return config.max_evaluations > 0 && trace.calls() >= config.max_evaluations;
    };

    recorder.set_step(0);
    auto cur = detail::local_minimize(f, detail::uniform_point(bounds, rng), bounds, config.local);
    for (int k = 0; k < config.max_iterations && !exhausted(); ++k) {
        recorder.set_step(k + 1);
        Vector trial = cur.x;
        for (Eigen::Index j = 0; j < trial.size(); ++j) {
            trial[j] += uniform(rng, -config.step_size, config.step_size);
        }
        clip_to_bounds(trial, bounds);
        auto next = detail::local_minimize(f, trial, bounds, config.local);
        const double t = basin_hopping_temperature(config, k);
        const double delta = (next.f - cur.f) / spread.scale();
        bool accept = next.f < cur.f;
        if (!accept && t > 0.0 && std::isfinite(delta)) {
            accept = uniform01(rng) < std::exp(-delta / t);
        }
        if (accept) {
            cur = std::move(next);
        }
    }
    return trace;
}

/// Acceptance probability of an uphill move in generalized simulated
/// annealing: [1 - (1 - qa) delta / T]^(1 / (1 - qa)), zero when the bracket
/// is non-positive. Downhill moves (delta < 0) are always accepted.
inline double gsa_accept_probability(double delta, double temperature, double qa) {
    if (delta < 0.0) {
        return 1.0;
    }
    if (!(temperature > 0.0)) {
        return 0.0;
    }
    const double base = 1.0 - (1.0 - qa) * delta / temperature;
    if (base <= 0.0) {
        return 0.0;
    }
    return std::exp(std::log(base) / (1.0 - qa));
}

/// Visiting temperature T0 (2^(qv-1) - 1) / ((1 + t)^(qv-1) - 1), t >= 1.
inline double gsa_temperature(double t0, double qv, int t) {
    const double s = qv - 1.0;
    return t0 * (std::exp(s * std::log(2.0)) - 1.0) /
           (std::exp(s * std::log(1.0 + static_cast<double>(t))) - 1.0);
}

namespace detail {

/// Heavy-tailed (Tsallis) jump sizes at the given temperature.
class GsaVisitor {
  public:
    explicit GsaVisitor(double qv) : qv_(qv) {
        factor2_ = std::exp((4.0 - qv) * std::log(qv - 1.0));
        factor3_ = std::exp((2.0 - qv) * std::log(2.0) / (qv - 1.0));
        factor4p_ = std::sqrt(kPi) * factor2_ / (factor3_ * (3.0 - qv));
        factor5_ = 1.0 / (qv - 1.0) - 0.5;
        const double d1 = 2.0 - factor5_;
        factor6_ = kPi * (1.0 - factor5_) / std::sin(kPi * (1.0 - factor5_)) /
                   std::exp(std::lgamma(d1));
    }

    double draw(double temperature, Rng &rng) const {
        const double factor1 = std::exp(std::log(temperature) / (qv_ - 1.0));
        const double factor4 = factor4p_ * factor1;
        const double sigmax =
            std::exp(-(qv_ - 1.0) * std::log(factor6_ / factor4) / (3.0 - qv_));
        const double x = sigmax * standard_normal(rng);
        const double y = standard_normal(rng);
        const double den = std::exp((qv_ - 1.0) * std::log(std::abs(y)) / (3.0 - qv_));
        double v = x / den;
        if (!std::isfinite(v) || std::abs(v) > kTail) {
            v = std::copysign(kTail * uniform01(rng), std::isfinite(v) ? v : x);
        }
        return v;
    }

  private:
    static constexpr double kTail = 1e8;
    double qv_;
    double factor2_;
    double factor3_;
    double factor4p_;
    double factor5_;
    double factor6_;
};

/// Wraps x + v back into [lo, hi) periodically.
inline double wrap_into(double x, const Interval &iv) {
    const double w = iv.width();
    double r = std::fmod(x - iv.lo, w);
    if (r < 0.0) {
        r += w;
    }
    return iv.lo + r;
}

} // namespace detail

/// Dual annealing: a generalized simulated annealing chain (all-coordinate
/// moves then single-coordinate moves per iteration, 2d proposals), restarts
/// from a random point when the temperature collapses, and one bounded local
/// polish from the best annealed point at the end, kept only if it improves.
inline Trace dual_annealing(const Objective &objective, const Bounds &bounds,
                            const BaselineConfig &config, Rng &rng, const Metrics &metrics = {}) {
    validate_bounds(bounds);
    config.validate();
    Trace trace;
    trace.method = to_string(BaselineMethod::DualAnnealing);
    trace.seed = config.seed;
    trace.config = to_json(config);
    EvaluationRecorder recorder(objective, metrics, trace);
    const Objective f = recorder.as_objective();
    auto exhausted = [&] {
        return config.max_evaluations > 0 && trace.calls() >= config.max_evaluations;
    };

    const auto d = static_cast<Eigen::Index>(bounds.size());
    const detail::GsaVisitor visitor(config.visit_q);
    const double restart_below = config.initial_temperature * config.restart_ratio;

    recorder.set_step(0);
    Vector cur = detail::uniform_point(bounds, rng);
    double f_cur = f(as_span(cur));
    Vector best = cur;
    double f_best = f_cur;

    int t = 1;
    for (int iter = 0; iter < config.max_iterations && !exhausted(); ++iter, ++t) {
        recorder.set_step(iter + 1);
        double temp = gsa_temperature(config.initial_temperature, config.visit_q, t);
        if (temp < restart_below) {
            cur = detail::uniform_point(bounds, rng);
            f_cur = f(as_span(cur));
            t = 1;
            temp = gsa_temperature(config.initial_temperature, config.visit_q, t);
            if (f_cur < f_best) {
                best = cur;
                f_best = f_cur;
            }
        }
        const double temp_step = temp / static_cast<double>(t);
        for (Eigen::Index j = 0; j < 2 * d && !exhausted(); ++j) {
            Vector cand = cur;
            if (j < d) {
                for (Eigen::Index k = 0; k < d; ++k) {
                    const auto &iv = bounds[static_cast<std::size_t>(k)];
                    cand[k] = detail::wrap_into(cand[k] + visitor.draw(temp, rng), iv);
                }
            } else {
                const Eigen::Index k = j - d;
                const auto &iv = bounds[static_cast<std::size_t>(k)];
                cand[k] = detail::wrap_into(cand[k] + visitor.draw(temp, rng), iv);
            }
            const double fc = f(as_span(cand));
            const double r = uniform01(rng);
            if (r <= gsa_accept_probability(fc - f_cur, temp_step, config.accept_q)) {
                cur = cand;
                f_cur = fc;
            }
            if (fc < f_best) {
                best = cand;
                f_best = fc;
            }
        }
    }

    recorder.set_step(config.max_iterations + 1);
    (void)detail::local_minimize(f, best, bounds, config.local);
    return trace;
}

/// The acquisition DE run on the objective itself (minimized via negation).
/// Every population member evaluated is one recorded call.
inline Trace direct_de(const Objective &objective, const Bounds &bounds, const DEConfig &de,
                       Rng &rng, const Metrics &metrics = {}, std::uint64_t seed = 0,
                       std::vector<DEGeneration> *history = nullptr) {
    Trace trace;
    trace.method = to_string(BaselineMethod::DirectDE);
    trace.seed = seed;
    trace.config = {{"pop_factor", de.pop_factor},
                    {"m_range", {de.m_range.lo, de.m_range.hi}},
                    {"crossover", de.crossover},
                    {"std_threshold", de.std_threshold},
                    {"dist_threshold", de.dist_threshold},
                    {"max_generations", de.max_generations},
                    {"seed", seed}};
    EvaluationRecorder recorder(objective, metrics, trace);
    int generation = 0;
    const BatchObjective negated = [&](const Matrix &rows) {
        recorder.set_step(generation++);
        Vector out(rows.rows());
        Vector x(rows.cols());
        for (Eigen::Index i = 0; i < rows.rows(); ++i) {
            x = rows.row(i).transpose();
            out[i] = -recorder(as_span(x));
        }
        return out;
    };
    DEResult res = de_maximize(negated, bounds, de, rng);
    if (history != nullptr) {
        *history = std::move(res.history);
    }
    return trace;
}

/// Runs the configured baseline.
inline Trace run_baseline(const Objective &objective, const Bounds &bounds,
                          const BaselineConfig &config, Rng &rng, const Metrics &metrics = {}) {
    switch (config.method) {
    case BaselineMethod::BasinHopping:
        return basin_hopping(objective, bounds, config, rng, metrics);
    case BaselineMethod::DualAnnealing:
        return dual_annealing(objective, bounds, config, rng, metrics);
    case BaselineMethod::DirectDE:
        return direct_de(objective, bounds, config.de, rng, metrics, config.seed);
    }
    throw std::invalid_argument("run_baseline: unknown method");
}

/// Smallest call count at which the best-so-far energy reaches
/// approximation ratio target_r; nullopt if it never does.
inline std::optional<long> calls_to_reach(const Trace &trace, double target_r,
                                          const ProblemInstance &instance) {
    double best = kInf;
    for (const auto &r : trace.records) {
        best = std::min(best, r.y);
        if (std::isfinite(best) && approximation_ratio(best, instance.e_gs) >= target_r) {
            return r.calls;
        }
    }
    return std::nullopt;
}

} // namespace bqaoa
