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
 * Call-indexed optimization traces shared by the Bayesian loop and the
 * baseline optimizers, with CSV and JSON writers.
 */
#pragma once

#include "common.hpp"

#include <json.hpp>

#include <ostream>
#include <utility>

namespace bqaoa {

enum class Phase { Warmup, Bayes, Eval };

inline const char *to_string(Phase p) {
    switch (p) {
    case Phase::Warmup:
        return "warmup";
    case Phase::Bayes:
        return "bayes";
    case Phase::Eval:
        return "eval";
    }
    return "?";
}

/// One objective evaluation. R and F describe the best-so-far point.
struct StepRecord {
    Phase phase = Phase::Eval;
    int step = 0;
    long calls = 0; ///< cumulative circuit calls including this one
    std::vector<double> theta;
    double y = kNaN;
    double best_y = kNaN;
    double R = kNaN;
    double F = kNaN;
    // GP hyperparameters used to propose this point, variances on the
    // original energy scale.
    double sigma2 = kNaN;
    double ell = kNaN;
    double sigma_n2 = kNaN;
    int de_generations = -1;
    double de_score_std = kNaN;
    double de_mean_distance = kNaN;
};

struct Trace {
    std::string method;
    std::string problem;
    std::uint64_t seed = 0;
    nlohmann::json config = nlohmann::json::object();
    std::vector<StepRecord> records;
    std::vector<double> best_theta;
    double best_y = kInf;

    [[nodiscard]] long calls() const { return records.empty() ? 0 : records.back().calls; }

    [[nodiscard]] std::size_t count(Phase p) const {
        return static_cast<std::size_t>(std::count_if(
            records.begin(), records.end(), [p](const StepRecord &r) { return r.phase == p; }));
    }
};

/// (R, F) of a parameter point; used to annotate traces.
using Metrics = std::function<std::pair<double, double>(std::span<const double>)>;

/// Wraps an objective so that every call is appended to a trace, together
/// with the running best and its metrics. Metrics are recomputed only when
/// the incumbent changes.
class EvaluationRecorder {
  public:
    EvaluationRecorder(Objective objective, Metrics metrics, Trace &trace)
        : objective_(std::move(objective)), metrics_(std::move(metrics)), trace_(trace) {}

    void set_phase(Phase p) { phase_ = p; }
    void set_step(int s) { step_ = s; }

    double operator()(std::span<const double> theta) {
        const double y = objective_(theta);
        StepRecord rec;
        rec.phase = phase_;
        rec.step = step_;
        rec.calls = trace_.calls() + 1;
        rec.theta.assign(theta.begin(), theta.end());
        rec.y = y;
        if (y < trace_.best_y || trace_.best_theta.empty()) {
            trace_.best_y = y;
            trace_.best_theta = rec.theta;
            if (metrics_) {
                best_metrics_ = metrics_(theta);
            }
        }
        rec.best_y = trace_.best_y;
        rec.R = best_metrics_.first;
        rec.F = best_metrics_.second;
        trace_.records.push_back(std::move(rec));
        return y;
    }

    [[nodiscard]] Objective as_objective() {
        return [this](std::span<const double> t) { return (*this)(t); };
    }

  private:
    Objective objective_;
    Metrics metrics_;
    Trace &trace_;
    Phase phase_ = Phase::Eval;
    int step_ = 0;
    std::pair<double, double> best_metrics_{kNaN, kNaN};
};

/// Running minimum of the observed values, indexed like trace.records.
inline std::vector<double> best_so_far(const Trace &trace) {
    std::vector<double> out;
    out.reserve(trace.records.size());
    double best = kInf;
    for (const auto &r : trace.records) {
        best = std::min(best, r.y);
        out.push_back(best);
    }
    return out;
}

inline std::size_t trace_dimension(const Trace &trace) {
    return trace.records.empty() ? 0 : trace.records.front().theta.size();
}

inline void write_trace_csv(std::ostream &out, const Trace &trace) {
    const std::size_t d = trace_dimension(trace);
    out << "phase,step,calls,y,best_y,R,F,sigma2,ell,sigma_n2,de_generations,de_score_std,"
           "de_mean_distance";
    for (std::size_t j = 0; j < d; ++j) {
        out << ",theta_" << j;
    }
    out << '\n';
    for (const auto &r : trace.records) {
        out << to_string(r.phase) << ',' << r.step << ',' << r.calls << ',' << format_real(r.y)
            << ',' << format_real(r.best_y) << ',' << format_real(r.R) << ','
            << format_real(r.F) << ',' << format_real(r.sigma2) << ',' << format_real(r.ell)
            << ',' << format_real(r.sigma_n2) << ',' << r.de_generations << ','
            << format_real(r.de_score_std) << ',' << format_real(r.de_mean_distance);
        for (double t : r.theta) {
            out << ',' << format_real(t);
        }
        out << '\n';
    }
}

namespace detail {
inline nlohmann::json json_real(double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}
} // namespace detail

inline nlohmann::json trace_to_json(const Trace &trace) {
    nlohmann::json j;
    j["method"] = trace.method;
    j["problem"] = trace.problem;
    j["seed"] = trace.seed;
    j["config"] = trace.config;
    j["best_theta"] = trace.best_theta;
    j["best_y"] = detail::json_real(trace.best_y);
    j["calls"] = trace.calls();
    auto &recs = j["records"] = nlohmann::json::array();
    for (const auto &r : trace.records) {
        recs.push_back({{"phase", to_string(r.phase)},
                        {"step", r.step},
                        {"calls", r.calls},
                        {"theta", r.theta},
                        {"y", detail::json_real(r.y)},
                        {"best_y", detail::json_real(r.best_y)},
                        {"R", detail::json_real(r.R)},
                        {"F", detail::json_real(r.F)},
                        {"sigma2", detail::json_real(r.sigma2)},
                        {"ell", detail::json_real(r.ell)},
                        {"sigma_n2", detail::json_real(r.sigma_n2)},
                        {"de_generations", r.de_generations},
                        {"de_score_std", detail::json_real(r.de_score_std)},
                        {"de_mean_distance", detail::json_real(r.de_mean_distance)}});
    }
    return j;
}

} // namespace bqaoa
