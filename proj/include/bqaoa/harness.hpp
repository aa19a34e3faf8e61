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
 * Experiment pipelines: instance construction, seeded repetitions over a
 * worker pool, aggregation, and plot-ready CSV/JSON output.
 *
 * Output layout of a run with a non-empty out_dir:
 *   config.json, meta.json, graph.txt, aggregate.csv, runs.csv,
 *   runs/<id>.csv (one trace per run), plus experiment-specific tables
 *   (landscape.csv, landscape_summary.csv, histogram.csv, power_law.csv).
 */
#pragma once

#include "baselines.hpp"
#include "bayes.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace bqaoa {

inline constexpr const char *kVersion = "0.1.0";

enum class Experiment { Landscape, Histogram, DepthSweep, Compare, Shots, Noise, Solve };

inline const char *to_string(Experiment e) {
    switch (e) {
    case Experiment::Landscape:
        return "landscape";
    case Experiment::Histogram:
        return "histogram";
    case Experiment::DepthSweep:
        return "depth-sweep";
    case Experiment::Compare:
        return "compare";
    case Experiment::Shots:
        return "shots";
    case Experiment::Noise:
        return "noise";
    case Experiment::Solve:
        return "solve";
    }
    return "?";
}

inline Experiment parse_experiment(const std::string &s) {
    for (auto e : {Experiment::Landscape, Experiment::Histogram, Experiment::DepthSweep,
                   Experiment::Compare, Experiment::Shots, Experiment::Noise, Experiment::Solve}) {
        if (s == to_string(e)) {
            return e;
        }
    }
    throw std::invalid_argument("unknown experiment '" + s + "'");
}

enum class OptimizerKind { Bayes, DE, BasinHopping, DualAnnealing };

inline const char *to_string(OptimizerKind k) {
    switch (k) {
    case OptimizerKind::Bayes:
        return "bayes";
    case OptimizerKind::DE:
        return "de";
    case OptimizerKind::BasinHopping:
        return "basinhopping";
    case OptimizerKind::DualAnnealing:
        return "dualannealing";
    }
    return "?";
}

inline OptimizerKind parse_optimizer(const std::string &s) {
    for (auto k : {OptimizerKind::Bayes, OptimizerKind::DE, OptimizerKind::BasinHopping,
                   OptimizerKind::DualAnnealing}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown optimizer '" + s + "'");
}

/// Edge-list file, or a seeded random regular graph when graph_file is empty.
struct InstanceSpec {
    std::string graph_file;
    int n_nodes = 6;
    int degree = 3;
    std::uint64_t graph_seed = 14;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::DepthSweep;
    InstanceSpec instance;
    ProblemKind problem = ProblemKind::MIS;
    double omega = kDefaultOmega;
    std::vector<int> depths{1};
    int repetitions = 1;
    std::vector<long> shots{0}; ///< 0 = exact expectation
    std::vector<double> sigma_qn{0.0};
    std::vector<OptimizerKind> optimizers{OptimizerKind::Bayes};

    // Bayesian loop
    int n_warmup = 10;
    int n_bayes = 100;
    int n_restarts = 10;
    int patience = 0;
    int acq_max_generations = 1000;

    // Baseline budgets
    int de_max_generations = 200;
    int bh_iterations = 100;
    int da_iterations = 500;
    long local_max_evaluations = 100;

    /// Compare: approximation ratio every method must reach; NaN means each
    /// repetition's Bayesian final R.
    double target_ratio = kNaN;

    int resolution = 101; ///< landscape grid points per axis
    int bins = 20;        ///< histogram bins

    std::string out_dir;
    bool write_traces = true; ///< per-run trace CSVs under runs/
    std::uint64_t seed = 0;
    int jobs = 1;

    /// Defaults for each experiment.
    static ExperimentConfig defaults(Experiment e) {
        ExperimentConfig c;
        c.experiment = e;
        switch (e) {
        case Experiment::Landscape:
        case Experiment::Histogram:
        case Experiment::Solve:
            break;
        case Experiment::DepthSweep:
            c.depths = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
            c.repetitions = 50;
            break;
        case Experiment::Compare:
            c.instance.n_nodes = 10;
            c.problem = ProblemKind::MaxCut;
            c.depths = {7};
            c.repetitions = 30;
            c.patience = 50;
            c.optimizers = {OptimizerKind::Bayes, OptimizerKind::DE, OptimizerKind::BasinHopping,
                            OptimizerKind::DualAnnealing};
            break;
        case Experiment::Shots:
            c.depths = {2};
            c.repetitions = 10;
            c.shots = {0, 1024, 128, 64, 16, 4};
            break;
        case Experiment::Noise:
            c.instance.n_nodes = 10;
            c.problem = ProblemKind::MaxCut;
            c.depths = {1, 2, 3, 4, 5, 6, 7, 8, 9};
            c.repetitions = 10;
            c.sigma_qn = {0.0, 0.01, 0.05, 0.1};
            break;
        }
        return c;
    }

    void validate() const {
        if (repetitions < 1) {
            throw std::invalid_argument("config: repetitions must be >= 1");
        }
        if (depths.empty()) {
            throw std::invalid_argument("config: depth list must be non-empty");
        }
        for (int p : depths) {
            if (p < 1) {
                throw std::invalid_argument("config: depths must be >= 1");
            }
        }
        if (shots.empty() || sigma_qn.empty() || optimizers.empty()) {
            throw std::invalid_argument("config: shots, sigma_qn and optimizer lists must be "
                                        "non-empty");
        }
        for (long s : shots) {
            if (s < 0) {
                throw std::invalid_argument("config: shots must be >= 0 (0 = exact)");
            }
        }
        for (double s : sigma_qn) {
            if (!(s >= 0.0)) {
                throw std::invalid_argument("config: sigma_qn must be >= 0");
            }
        }
        if (n_warmup < 2 || n_bayes < 0 || n_restarts < 1 || patience < 0) {
            throw std::invalid_argument("config: invalid Bayesian loop settings");
        }
        if (acq_max_generations < 0 || de_max_generations < 0 || bh_iterations < 1 ||
            da_iterations < 1 || local_max_evaluations < 1) {
            throw std::invalid_argument("config: invalid optimizer budgets");
        }
        if (resolution < 2 || bins < 1) {
            throw std::invalid_argument("config: resolution must be >= 2 and bins >= 1");
        }
        if (jobs < 1) {
            throw std::invalid_argument("config: jobs must be >= 1");
        }
    }
};

inline void to_json(nlohmann::json &j, const ExperimentConfig &c) {
    std::vector<std::string> opts;
    for (auto k : c.optimizers) {
        opts.emplace_back(to_string(k));
    }
    j = {{"experiment", to_string(c.experiment)},
         {"instance",
          {{"graph_file", c.instance.graph_file},
           {"n_nodes", c.instance.n_nodes},
           {"degree", c.instance.degree},
           {"graph_seed", c.instance.graph_seed}}},
         {"problem", to_string(c.problem)},
         {"omega", c.omega},
         {"depths", c.depths},
         {"repetitions", c.repetitions},
         {"shots", c.shots},
         {"sigma_qn", c.sigma_qn},
         {"optimizers", opts},
         {"n_warmup", c.n_warmup},
         {"n_bayes", c.n_bayes},
         {"n_restarts", c.n_restarts},
         {"patience", c.patience},
         {"acq_max_generations", c.acq_max_generations},
         {"de_max_generations", c.de_max_generations},
         {"bh_iterations", c.bh_iterations},
         {"da_iterations", c.da_iterations},
         {"local_max_evaluations", c.local_max_evaluations},
         {"target_ratio", detail::json_real(c.target_ratio)},
         {"resolution", c.resolution},
         {"bins", c.bins},
         {"out_dir", c.out_dir},
         {"write_traces", c.write_traces},
         {"seed", c.seed},
         {"jobs", c.jobs}};
}

/// Missing keys keep the experiment's defaults.
inline ExperimentConfig config_from_json(const nlohmann::json &j) {
    ExperimentConfig c = ExperimentConfig::defaults(
        parse_experiment(j.value("experiment", std::string("depth-sweep"))));
    auto get = [&j](const char *key, auto &field) {
        if (j.contains(key) && !j.at(key).is_null()) {
            j.at(key).get_to(field);
        }
    };
    if (j.contains("instance")) {
        const auto &in = j.at("instance");
        c.instance.graph_file = in.value("graph_file", c.instance.graph_file);
        c.instance.n_nodes = in.value("n_nodes", c.instance.n_nodes);
        c.instance.degree = in.value("degree", c.instance.degree);
        c.instance.graph_seed = in.value("graph_seed", c.instance.graph_seed);
    }
    if (j.contains("problem")) {
        c.problem = parse_problem_kind(j.at("problem").get<std::string>());
    }
    if (j.contains("optimizers")) {
        c.optimizers.clear();
        for (const auto &s : j.at("optimizers")) {
            c.optimizers.push_back(parse_optimizer(s.get<std::string>()));
        }
    }
    get("omega", c.omega);
    get("depths", c.depths);
    get("repetitions", c.repetitions);
    get("shots", c.shots);
    get("sigma_qn", c.sigma_qn);
    get("n_warmup", c.n_warmup);
    get("n_bayes", c.n_bayes);
    get("n_restarts", c.n_restarts);
    get("patience", c.patience);
    get("acq_max_generations", c.acq_max_generations);
    get("de_max_generations", c.de_max_generations);
    get("bh_iterations", c.bh_iterations);
    get("da_iterations", c.da_iterations);
    get("local_max_evaluations", c.local_max_evaluations);
    get("target_ratio", c.target_ratio);
    get("resolution", c.resolution);
    get("bins", c.bins);
    get("out_dir", c.out_dir);
    get("write_traces", c.write_traces);
    get("seed", c.seed);
    get("jobs", c.jobs);
    return c;
}

inline ProblemInstance build_instance(const ExperimentConfig &c) {
    Graph g = c.instance.graph_file.empty()
                  ? random_regular_graph(c.instance.n_nodes, c.instance.degree,
                                         c.instance.graph_seed)
                  : load_edge_list(c.instance.graph_file);
    return make_instance(std::move(g), c.problem, c.omega);
}

/// Seed of repetition `rep` at depth p; shared by every method, shot count
/// and noise level so cells differ only in what they vary.
inline std::uint64_t repetition_seed(std::uint64_t master, int p, int rep) {
    return derive_seed(master, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(rep));
}

/// One optimizer run of one cell.
struct RunResult {
    std::string id;
    int depth = 1;
    long shots = 0;
    double sigma_qn = 0.0;
    OptimizerKind method = OptimizerKind::Bayes;
    int rep = 0;
    std::uint64_t seed = 0;
    double final_y = kNaN;
    double final_R = kNaN; ///< noiseless R at the best observed point
    double final_F = kNaN;
    double final_sigma_n2 = kNaN;
    long calls = 0;
    double target_R = kNaN;
    std::optional<long> calls_to_target;
    Trace trace;
};

struct AggregateRow {
    int depth = 1;
    long shots = 0;
    double sigma_qn = 0.0;
    std::string method;
    int n_runs = 0;
    double mean_R = kNaN;
    double std_R = kNaN;
    double median_R = kNaN;
    double mean_F = kNaN;
    double std_F = kNaN;
    double median_F = kNaN;
    double mean_sigma_n2 = kNaN;
    double std_sigma_n2 = kNaN;
    double mean_calls = kNaN;
    int n_reached = 0;
    double median_calls_to_target = kNaN; ///< unreached runs count as infinite
    std::vector<double> R_values;
    std::vector<double> F_values;
};

/// log(mean sigma_N^2) = intercept + exponent * log(N_S).
struct PowerLawFit {
    double exponent = kNaN;
    double intercept = kNaN;
    int n_points = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    ProblemInstance instance;
    std::vector<RunResult> runs;
    std::vector<AggregateRow> rows;
    std::optional<PowerLawFit> power_law;
    std::optional<Landscape> landscape;
    std::optional<Histogram> histogram;
    double wall_seconds = 0.0;

    /// Row for the given cell; throws if absent.
    [[nodiscard]] const AggregateRow &row(int depth, long shots = 0, double sigma_qn = 0.0,
                                          const std::string &method = "bayes") const {
        for (const auto &r : rows) {
            if (r.depth == depth && r.shots == shots && r.sigma_qn == sigma_qn &&
                r.method == method) {
                return r;
            }
        }
        throw std::out_of_range("no aggregate row for the requested cell");
    }
};

/// Least-squares line through (log N_S, log sigma_N^2); exact (0) entries
/// are skipped.
inline PowerLawFit fit_power_law(std::span<const double> shots,
                                 std::span<const double> sigma_n2) {
    if (shots.size() != sigma_n2.size()) {
        throw std::invalid_argument("fit_power_law: size mismatch");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < shots.size(); ++i) {
        if (shots[i] > 0.0 && sigma_n2[i] > 0.0) {
            xs.push_back(std::log(shots[i]));
            ys.push_back(std::log(sigma_n2[i]));
        }
    }
    PowerLawFit fit;
    fit.n_points = static_cast<int>(xs.size());
    if (xs.size() < 2) {
        return fit;
    }
    const double mx = mean_of(xs);
    const double my = mean_of(ys);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx > 0.0) {
        fit.exponent = sxy / sxx;
        fit.intercept = my - fit.exponent * mx;
    }
    return fit;
}

using ProgressFn = std::function<void(const std::string &)>;

namespace detail {

/// Runs tasks[0..n) on `jobs` threads. Results go into caller-owned slots,
/// so the outcome does not depend on scheduling.
inline void run_parallel(std::size_t n, int jobs, const std::function<void(std::size_t)> &task) {
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

inline std::string shots_label(long shots) {
    return shots == 0 ? "exact" : std::to_string(shots);
}

inline std::string run_id(const RunResult &r) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "p%02d_ns%s_sq%s_%s_r%03d", r.depth,
                  shots_label(r.shots).c_str(), format_real(r.sigma_qn).c_str(),
                  to_string(r.method), r.rep);
    return buf;
}

struct Cell {
    int depth;
    long shots;
    double sigma_qn;
    OptimizerKind method;
    int rep;
};

inline BaselineConfig baseline_config(const ExperimentConfig &c, OptimizerKind k,
                                      std::uint64_t seed) {
    BaselineConfig b;
    switch (k) {
    case OptimizerKind::DE:
        b = BaselineConfig::for_method(BaselineMethod::DirectDE);
        b.de.max_generations = c.de_max_generations;
        break;
    case OptimizerKind::BasinHopping:
        b = BaselineConfig::for_method(BaselineMethod::BasinHopping);
        b.max_iterations = c.bh_iterations;
        break;
    case OptimizerKind::DualAnnealing:
        b = BaselineConfig::for_method(BaselineMethod::DualAnnealing);
        b.max_iterations = c.da_iterations;
        break;
    case OptimizerKind::Bayes:
        throw std::logic_error("baseline_config: not a baseline");
    }
    b.local.max_evaluations = c.local_max_evaluations;
    b.seed = seed;
    return b;
}

inline RunResult run_cell(const ExperimentConfig &c,
                          const std::shared_ptr<const ProblemInstance> &instance,
                          const Cell &cell) {
    RunResult r;
    r.depth = cell.depth;
    r.shots = cell.shots;
    r.sigma_qn = cell.sigma_qn;
    r.method = cell.method;
    r.rep = cell.rep;
    r.seed = repetition_seed(c.seed, cell.depth, cell.rep);
    r.id = run_id(r);

    auto objective = make_qaoa_objective(instance, cell.depth, cell.shots,
                                         NoiseSpec{cell.sigma_qn}, derive_seed(r.seed, 1));
    const Metrics metrics = make_qaoa_metrics(instance);
    Rng rng(derive_seed(r.seed, 2));
    const Bounds bounds = uniform_bounds(static_cast<std::size_t>(2 * cell.depth), {0.0, kPi});

    if (cell.method == OptimizerKind::Bayes) {
        BayesConfig bc = BayesConfig::for_depth(cell.depth);
        bc.n_warmup = c.n_warmup;
        bc.n_bayes = c.n_bayes;
        bc.n_restarts = c.n_restarts;
        bc.patience = c.patience;
        bc.de.max_generations = c.acq_max_generations;
        bc.seed = r.seed;
        r.trace = bayes_optimize(objective.fn, bc, rng, metrics);
    } else {
        r.trace = run_baseline(objective.fn, bounds, baseline_config(c, cell.method, r.seed),
                               rng, metrics);
    }
    r.trace.problem = to_string(instance->cost.kind);
    if (!r.trace.records.empty()) {
        const auto &last = r.trace.records.back();
        r.final_y = last.best_y;
        r.final_R = last.R;
        r.final_F = last.F;
    }
    for (auto it = r.trace.records.rbegin(); it != r.trace.records.rend(); ++it) {
        if (!std::isnan(it->sigma_n2)) {
            r.final_sigma_n2 = it->sigma_n2;
            break;
        }
    }
    r.calls = r.trace.calls();
    return r;
}

inline AggregateRow aggregate_cell(const std::vector<const RunResult *> &runs) {
    AggregateRow a;
    const RunResult &first = *runs.front();
    a.depth = first.depth;
    a.shots = first.shots;
    a.sigma_qn = first.sigma_qn;
    a.method = to_string(first.method);
    a.n_runs = static_cast<int>(runs.size());
    std::vector<double> noise;
    std::vector<double> calls;
    std::vector<double> to_target;
    for (const auto *r : runs) {
        a.R_values.push_back(r->final_R);
        a.F_values.push_back(r->final_F);
        if (!std::isnan(r->final_sigma_n2)) {
            noise.push_back(r->final_sigma_n2);
        }
        calls.push_back(static_cast<double>(r->calls));
        if (r->calls_to_target) {
            ++a.n_reached;
            to_target.push_back(static_cast<double>(*r->calls_to_target));
        } else if (!std::isnan(r->target_R)) {
            to_target.push_back(kInf);
        }
    }
    a.mean_R = mean_of(a.R_values);
    a.std_R = stddev_of(a.R_values);
    a.median_R = median_of(a.R_values);
    a.mean_F = mean_of(a.F_values);
    a.std_F = stddev_of(a.F_values);
    a.median_F = median_of(a.F_values);
    if (!noise.empty()) {
        a.mean_sigma_n2 = mean_of(noise);
        a.std_sigma_n2 = stddev_of(noise);
    }
    a.mean_calls = mean_of(calls);
    if (!to_target.empty()) {
        a.median_calls_to_target = median_of(to_target);
    }
    return a;
}

/// Groups runs by (depth, shots, sigma, method) in first-seen order.
inline std::vector<AggregateRow> aggregate_runs(const std::vector<RunResult> &runs) {
    std::vector<std::vector<const RunResult *>> groups;
    for (const auto &r : runs) {
        auto same = [&r](const std::vector<const RunResult *> &g) {
            const auto *f = g.front();
            return f->depth == r.depth && f->shots == r.shots && f->sigma_qn == r.sigma_qn &&
                   f->method == r.method;
        };
        auto it = std::find_if(groups.begin(), groups.end(), same);
        if (it == groups.end()) {
            groups.push_back({&r});
        } else {
            it->push_back(&r);
        }
    }
    std::vector<AggregateRow> rows;
    for (const auto &g : groups) {
        rows.push_back(aggregate_cell(g));
    }
    return rows;
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

inline std::string real_or_inf(double x) {
    return std::isinf(x) ? "inf" : format_real(x);
}

} // namespace detail

inline constexpr const char *kAggregateHeader =
    "depth,shots,sigma_qn,method,n_runs,mean_R,std_R,median_R,mean_F,std_F,median_F,"
    "mean_sigma_n2,std_sigma_n2,mean_calls,n_reached,median_calls_to_target";

inline void write_aggregate_csv(std::ostream &out, const std::vector<AggregateRow> &rows) {
    out << kAggregateHeader << '\n';
    for (const auto &a : rows) {
        out << a.depth << ',' << detail::shots_label(a.shots) << ',' << format_real(a.sigma_qn)
            << ',' << a.method << ',' << a.n_runs << ',' << format_real(a.mean_R) << ','
            << format_real(a.std_R) << ',' << format_real(a.median_R) << ','
            << format_real(a.mean_F) << ',' << format_real(a.std_F) << ','
            << format_real(a.median_F) << ',' << format_real(a.mean_sigma_n2) << ','
            << format_real(a.std_sigma_n2) << ',' << format_real(a.mean_calls) << ','
            << a.n_reached << ',' << detail::real_or_inf(a.median_calls_to_target) << '\n';
    }
}

inline constexpr const char *kRunsHeader =
    "id,depth,shots,sigma_qn,method,rep,seed,final_y,final_R,final_F,final_sigma_n2,calls,"
    "target_R,calls_to_target";

inline void write_runs_csv(std::ostream &out, const std::vector<RunResult> &runs) {
    out << kRunsHeader << '\n';
    for (const auto &r : runs) {
        out << r.id << ',' << r.depth << ',' << detail::shots_label(r.shots) << ','
            << format_real(r.sigma_qn) << ',' << to_string(r.method) << ',' << r.rep << ','
            << r.seed << ',' << format_real(r.final_y) << ',' << format_real(r.final_R) << ','
            << format_real(r.final_F) << ',' << format_real(r.final_sigma_n2) << ',' << r.calls
            << ',' << format_real(r.target_R) << ','
            << (r.calls_to_target ? std::to_string(*r.calls_to_target) : std::string("none"))
            << '\n';
    }
}

inline void write_landscape_csv(std::ostream &out, const Landscape &L) {
    out << "i,j,gamma,beta,energy,fidelity\n";
    for (int i = 0; i < L.resolution; ++i) {
        for (int j = 0; j < L.resolution; ++j) {
            out << i << ',' << j << ',' << format_real(L.axis[static_cast<std::size_t>(i)]) << ','
                << format_real(L.axis[static_cast<std::size_t>(j)]) << ','
                << format_real(L.energy(i, j)) << ',' << format_real(L.fidelity(i, j)) << '\n';
        }
    }
}

inline void write_histogram_csv(std::ostream &out, const Histogram &h) {
    out << "bin,lo,hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        out << b << ',' << format_real(h.edges[b]) << ',' << format_real(h.edges[b + 1]) << ','
            << h.counts[b] << '\n';
    }
}

/// Writes every artifact of `res` under res.config.out_dir.
inline void write_outputs(const ExperimentResult &res) {
    namespace fs = std::filesystem;
    const fs::path dir(res.config.out_dir);
    fs::create_directories(dir);
    nlohmann::json cfg = res.config;
    detail::write_text(dir / "config.json", cfg.dump(2) + "\n");

    nlohmann::json meta;
    meta["version"] = kVersion;
    meta["experiment"] = to_string(res.config.experiment);
    meta["master_seed"] = res.config.seed;
    meta["wall_seconds"] = res.wall_seconds;
    meta["instance"] = {{"n_nodes", res.instance.graph.n_nodes()},
                        {"n_edges", res.instance.graph.n_edges()},
                        {"problem", to_string(res.instance.cost.kind)},
                        {"omega", res.instance.cost.omega},
                        {"e_gs", res.instance.e_gs},
                        {"n_ground_states", res.instance.ground_set.size()}};
    meta["final_metrics"] = "R and F are evaluated on the noiseless state at the best observed "
                            "parameters";
    auto &seeds = meta["runs"] = nlohmann::json::array();
    for (const auto &r : res.runs) {
        seeds.push_back({{"id", r.id}, {"seed", r.seed}});
    }
    detail::write_text(dir / "meta.json", meta.dump(2) + "\n");

    std::ostringstream graph;
    write_edge_list(graph, res.instance.graph);
    detail::write_text(dir / "graph.txt", graph.str());

    if (!res.rows.empty()) {
        std::ostringstream agg;
        write_aggregate_csv(agg, res.rows);
        detail::write_text(dir / "aggregate.csv", agg.str());
        std::ostringstream runs;
        write_runs_csv(runs, res.runs);
        detail::write_text(dir / "runs.csv", runs.str());
    }
    for (const auto &r : res.runs) {
        if (!res.config.write_traces) {
            break;
        }
        std::ostringstream t;
        write_trace_csv(t, r.trace);
        detail::write_text(dir / "runs" / (r.id + ".csv"), t.str());
    }
    if (res.power_law) {
        std::ostringstream pl;
        pl << "exponent,intercept,n_points\n"
           << format_real(res.power_law->exponent) << ',' << format_real(res.power_law->intercept)
           << ',' << res.power_law->n_points << '\n';
        detail::write_text(dir / "power_law.csv", pl.str());
    }
    if (res.landscape) {
        const auto &L = *res.landscape;
        std::ostringstream out;
        write_landscape_csv(out, L);
        detail::write_text(dir / "landscape.csv", out.str());
        const auto [ge, be] = L.theta_e();
        const auto [gf, bf] = L.theta_f();
        const auto [ie, je] = L.argmin_energy;
        const auto [i_f, j_f] = L.argmax_fidelity;
        std::ostringstream s;
        s << "point,gamma,beta,energy,fidelity,R\n";
        s << "theta_E," << format_real(ge) << ',' << format_real(be) << ','
          << format_real(L.energy(ie, je)) << ',' << format_real(L.fidelity(ie, je)) << ','
          << format_real(approximation_ratio(L.energy(ie, je), res.instance.e_gs)) << '\n';
        s << "theta_F," << format_real(gf) << ',' << format_real(bf) << ','
          << format_real(L.energy(i_f, j_f)) << ',' << format_real(L.fidelity(i_f, j_f)) << ','
          << format_real(approximation_ratio(L.energy(i_f, j_f), res.instance.e_gs)) << '\n';
        detail::write_text(dir / "landscape_summary.csv", s.str());
    }
    if (res.histogram) {
        std::ostringstream out;
        write_histogram_csv(out, *res.histogram);
        detail::write_text(dir / "histogram.csv", out.str());
    }
}

namespace detail {

inline ExperimentResult run_cells(const ExperimentConfig &config, const std::vector<Cell> &cells,
                                  const ProgressFn &progress) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.config = config;
    res.instance = build_instance(config);
    const auto instance = std::make_shared<const ProblemInstance>(res.instance);
    res.runs.resize(cells.size());
    std::mutex log_mutex;
    run_parallel(cells.size(), config.jobs, [&](std::size_t i) {
        res.runs[i] = run_cell(config, instance, cells[i]);
        if (progress) {
            const auto &r = res.runs[i];
            std::lock_guard lock(log_mutex);
            progress(r.id + " R=" + format_real(r.final_R) + " F=" + format_real(r.final_F) +
                     " calls=" + std::to_string(r.calls));
        }
    });
    res.rows = aggregate_runs(res.runs);
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

inline void finish(ExperimentResult &res) {
    if (!res.config.out_dir.empty()) {
        write_outputs(res);
    }
}

} // namespace detail

/// p = 1 energy/fidelity grid.
inline ExperimentResult run_landscape(const ExperimentConfig &config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.config = config;
    res.instance = build_instance(config);
    res.landscape = landscape_grid(res.instance, config.resolution);
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail::finish(res);
    return res;
}

/// Distribution of the classical cost over all 2^N bitstrings.
inline ExperimentResult run_histogram(const ExperimentConfig &config) {
    config.validate();
    ExperimentResult res;
    res.config = config;
    res.instance = build_instance(config);
    res.histogram = energy_histogram(res.instance.cost, config.bins);
    detail::finish(res);
    return res;
}

/// Bayesian optimization with exact energies at every depth.
inline ExperimentResult run_depth_sweep(const ExperimentConfig &config,
                                        const ProgressFn &progress = {}) {
    std::vector<detail::Cell> cells;
    for (int p : config.depths) {
        for (int rep = 0; rep < config.repetitions; ++rep) {
            cells.push_back({p, 0, 0.0, OptimizerKind::Bayes, rep});
        }
    }
    auto res = detail::run_cells(config, cells, progress);
    detail::finish(res);
    return res;
}

/// Every configured optimizer on identical instance and seeds. Each run
/// gets the calls needed to reach the target ratio: the fixed target_ratio
/// if set, otherwise the Bayesian final R of the same depth and repetition.
inline ExperimentResult run_compare(const ExperimentConfig &config,
                                    const ProgressFn &progress = {}) {
    std::vector<detail::Cell> cells;
    for (int p : config.depths) {
        for (int rep = 0; rep < config.repetitions; ++rep) {
            for (auto k : config.optimizers) {
                cells.push_back({p, 0, 0.0, k, rep});
            }
        }
    }
    auto res = detail::run_cells(config, cells, progress);
    for (auto &r : res.runs) {
        double target = config.target_ratio;
        if (std::isnan(target)) {
            for (const auto &b : res.runs) {
                if (b.method == OptimizerKind::Bayes && b.depth == r.depth && b.rep == r.rep) {
                    target = b.final_R;
                }
            }
        }
        if (!std::isnan(target)) {
            r.target_R = target;
            r.calls_to_target = calls_to_reach(r.trace, target, res.instance);
        }
    }
    res.rows = detail::aggregate_runs(res.runs);
    detail::finish(res);
    return res;
}

/// Bayesian optimization on shot-sampled energies for each shot count, with
/// a power-law fit of the mean final noise variance against N_S.
inline ExperimentResult run_shots_study(const ExperimentConfig &config,
                                        const ProgressFn &progress = {}) {
    std::vector<detail::Cell> cells;
    for (int p : config.depths) {
        for (long s : config.shots) {
            for (int rep = 0; rep < config.repetitions; ++rep) {
                cells.push_back({p, s, 0.0, OptimizerKind::Bayes, rep});
            }
        }
    }
    auto res = detail::run_cells(config, cells, progress);
    std::vector<double> ns;
    std::vector<double> noise;
    for (const auto &row : res.rows) {
        if (row.depth == config.depths.front()) {
            ns.push_back(static_cast<double>(row.shots));
            noise.push_back(row.mean_sigma_n2);
        }
    }
    res.power_law = fit_power_law(ns, noise);
    detail::finish(res);
    return res;
}

/// Bayesian optimization on the noisy circuit for every (depth, sigma_QN).
inline ExperimentResult run_noise_study(const ExperimentConfig &config,
                                        const ProgressFn &progress = {}) {
    std::vector<detail::Cell> cells;
    for (int p : config.depths) {
        for (double s : config.sigma_qn) {
            for (int rep = 0; rep < config.repetitions; ++rep) {
                cells.push_back({p, 0, s, OptimizerKind::Bayes, rep});
            }
        }
    }
    auto res = detail::run_cells(config, cells, progress);
    detail::finish(res);
    return res;
}

/// One run of the first configured optimizer at the first depth, shot
/// count and noise level.
inline ExperimentResult solve(const ExperimentConfig &config, const ProgressFn &progress = {}) {
    const std::vector<detail::Cell> cells{{config.depths.front(), config.shots.front(),
                                           config.sigma_qn.front(), config.optimizers.front(),
                                           0}};
    auto res = detail::run_cells(config, cells, progress);
    detail::finish(res);
    return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig &config,
                                       const ProgressFn &progress = {}) {
    switch (config.experiment) {
    case Experiment::Landscape:
        return run_landscape(config);
    case Experiment::Histogram:
        return run_histogram(config);
    case Experiment::DepthSweep:
        return run_depth_sweep(config, progress);
    case Experiment::Compare:
        return run_compare(config, progress);
    case Experiment::Shots:
        return run_shots_study(config, progress);
    case Experiment::Noise:
        return run_noise_study(config, progress);
    case Experiment::Solve:
        return solve(config, progress);
    }
    throw std::invalid_argument("run_experiment: unknown experiment");
}

} // namespace bqaoa
