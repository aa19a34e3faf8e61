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
 * Bayesian optimization loop over a black-box objective, and the QAOA
 * objective factory that feeds it.
 *
 * Loop: latin-hypercube warmup, then per iteration
 *   fit GP hyperparameters (multi-restart, warm-started at the previous fit)
 *   -> condition the GP -> maximize expected improvement with DE
 *   -> evaluate the objective at the proposal -> update the incumbent.
 */
#pragma once

#include "acquisition.hpp"
#include "gp.hpp"
#include "problems.hpp"
#include "qaoa.hpp"
#include "sampling.hpp"
#include "trace.hpp"

#include <memory>

namespace bqaoa {

struct BayesConfig {
    int n_warmup = 10;
    int n_bayes = 100;
    Bounds bounds;
    DEConfig de;
    HyperparamBounds hp_bounds;
    int n_restarts = 10;
    GpOptions gp;
    /// Stop early once the incumbent has not improved for this many
    /// iterations; 0 disables early stopping.
    int patience = 0;
    std::uint64_t seed = 0;

    /// Box [0, pi]^{2p} for a depth-p QAOA circuit.
    static BayesConfig for_depth(int p) {
        BayesConfig c;
        c.bounds = uniform_bounds(static_cast<std::size_t>(2 * p), {0.0, kPi});
        return c;
    }

    void validate() const {
        if (n_warmup < 2) {
            throw std::invalid_argument("BayesConfig: n_warmup must be >= 2");
        }
        if (n_bayes < 0) {
            throw std::invalid_argument("BayesConfig: n_bayes must be >= 0");
        }
        if (n_restarts < 1) {
            throw std::invalid_argument("BayesConfig: n_restarts must be >= 1");
        }
        validate_bounds(bounds);
        hp_bounds.validate();
    }
};

inline nlohmann::json to_json(const BayesConfig &c) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto &iv : c.bounds) {
        b.push_back({iv.lo, iv.hi});
    }
    return {{"n_warmup", c.n_warmup},
            {"n_bayes", c.n_bayes},
            {"bounds", b},
            {"n_restarts", c.n_restarts},
            {"patience", c.patience},
            {"seed", c.seed},
            {"standardize", c.gp.standardize},
            {"hp_bounds",
             {{"sigma2", {c.hp_bounds.sigma2.lo, c.hp_bounds.sigma2.hi}},
              {"ell", {c.hp_bounds.ell.lo, c.hp_bounds.ell.hi}},
              {"sigma_n2", {c.hp_bounds.sigma_n2.lo, c.hp_bounds.sigma_n2.hi}}}},
            {"de",
             {{"pop_factor", c.de.pop_factor},
              {"m_range", {c.de.m_range.lo, c.de.m_range.hi}},
              {"crossover", c.de.crossover},
              {"std_threshold", c.de.std_threshold},
              {"dist_threshold", c.de.dist_threshold},
              {"max_generations", c.de.max_generations}}}};
}

/// Thrown when the objective fails mid-run; carries the trace so far.
class optimization_aborted : public std::runtime_error {
  public:
    optimization_aborted(const std::string &what, Trace partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    [[nodiscard]] const Trace &partial_trace() const { return partial_; }

  private:
    Trace partial_;
};

using StepObserver = std::function<void(const StepRecord &)>;

inline Trace bayes_optimize(const Objective &objective, const BayesConfig &config, Rng &rng,
                            const Metrics &metrics = {}, const StepObserver &observer = {}) {
    config.validate();
    Trace trace;
    trace.method = "bayes";
    trace.seed = config.seed;
    trace.config = to_json(config);
    EvaluationRecorder recorder(objective, metrics, trace);

    auto evaluate = [&](const Vector &theta) {
        try {
            return recorder(as_span(theta));
        } catch (const std::exception &e) {
            throw optimization_aborted(std::string("objective evaluation failed: ") + e.what(),
                                       trace);
        }
    };

    Dataset data;
    recorder.set_phase(Phase::Warmup);
    const Matrix warmup = latin_hypercube(config.n_warmup, config.bounds, rng);
    for (Eigen::Index i = 0; i < warmup.rows(); ++i) {
        recorder.set_step(static_cast<int>(i));
        const Vector theta = warmup.row(i).transpose();
        const double y = evaluate(theta);
        data.append(as_span(theta), y);
        if (observer) {
            observer(trace.records.back());
        }
    }

    std::optional<Hyperparams> previous;
    int stale = 0;
    recorder.set_phase(Phase::Bayes);
    for (int step = 1; step <= config.n_bayes; ++step) {
        FitResult fit;
        try {
            fit = fit_hyperparams(data, config.hp_bounds, config.n_restarts, rng, previous,
                                  config.gp);
        } catch (const factorization_error &) {
            fit = fit_hyperparams(data, config.hp_bounds, config.n_restarts, rng, std::nullopt,
                                  config.gp);
        }
        previous = fit.hp;
        const GpModel model = build_model(data, fit.hp, config.gp);
        const double f_m = trace.best_y;
        const BatchObjective ei = [&model, f_m](const Matrix &rows) {
            return expected_improvement_batch(model, rows, f_m);
        };
        const DEResult de = de_maximize(ei, config.bounds, config.de, rng);

        recorder.set_step(step);
        const double y = evaluate(de.argmax);
        auto &rec = trace.records.back();
        const double scale2 = model.y_std() * model.y_std();
        rec.sigma2 = fit.hp.sigma2 * scale2;
        rec.ell = fit.hp.ell;
        rec.sigma_n2 = fit.hp.sigma_n2 * scale2;
        rec.de_generations = de.generations;
        rec.de_score_std = de.score_std;
        rec.de_mean_distance = de.mean_distance;
        data.append(as_span(de.argmax), y);
        if (observer) {
            observer(rec);
        }

        stale = y < f_m ? 0 : stale + 1;
        if (config.patience > 0 && stale >= config.patience) {
            break;
        }
    }
    return trace;
}

/// QAOA energy as a black box over theta = (gammas, betas).
struct QaoaObjective {
    Objective fn;
    std::shared_ptr<long> calls;
};

/// Exact expectation (shots = 0) or an N_S-shot estimate of the energy of
/// the (optionally noisy) depth-p circuit. Each call increments the shared
/// counter by one, whatever the shot count.
inline QaoaObjective make_qaoa_objective(std::shared_ptr<const ProblemInstance> instance, int p,
                                         long shots, NoiseSpec noise, std::uint64_t seed) {
    if (p < 1) {
        throw std::invalid_argument("make_qaoa_objective: depth must be >= 1");
    }
    if (shots < 0) {
        throw std::invalid_argument("make_qaoa_objective: shots must be >= 0");
    }
    QaoaObjective out;
    out.calls = std::make_shared<long>(0);
    auto rng = std::make_shared<Rng>(seed);
    out.fn = [instance = std::move(instance), p, shots, noise, rng,
              calls = out.calls](std::span<const double> theta) {
        if (theta.size() != static_cast<std::size_t>(2 * p)) {
            throw std::invalid_argument("QAOA objective: expected 2p parameters");
        }
        ++*calls;
        const auto angles = QaoaAngles::from_flat(theta);
        const Statevector state =
            noise.sigma_qn > 0.0
                ? apply_qaoa_noisy(instance->graph, instance->cost.kind, instance->cost.omega,
                                   angles, noise, *rng)
                : apply_qaoa(instance->cost, angles);
        if (shots == 0) {
            return exact_energy(state, instance->cost);
        }
        return sample_energy(state, shots, instance->cost, *rng).estimate;
    };
    return out;
}

/// (R, F) of the noiseless circuit at theta.
inline Metrics make_qaoa_metrics(std::shared_ptr<const ProblemInstance> instance) {
    return [instance = std::move(instance)](std::span<const double> theta) {
        const auto state = apply_qaoa(instance->cost, QaoaAngles::from_flat(theta));
        return std::pair{approximation_ratio(exact_energy(state, instance->cost), instance->e_gs),
                         fidelity(state, instance->ground_set)};
    };
}

} // namespace bqaoa
