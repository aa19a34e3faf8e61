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

// Command-line front end for the experiment pipelines.

#include <bqaoa/bqaoa.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace bqaoa;

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

/// "1,2,5" or a range "1-12".
std::vector<int> parse_depths(const std::string &s) {
    std::vector<int> out;
    for (const auto &tok : split(s, ',')) {
        const auto dash = tok.find('-');
        if (dash != std::string::npos && dash > 0) {
            const int lo = std::stoi(tok.substr(0, dash));
            const int hi = std::stoi(tok.substr(dash + 1));
            if (hi < lo) {
                throw CLI::ValidationError("--depth", "empty range " + tok);
            }
            for (int p = lo; p <= hi; ++p) {
                out.push_back(p);
            }
        } else {
            out.push_back(std::stoi(tok));
        }
    }
    return out;
}

std::vector<long> parse_shots(const std::string &s) {
    std::vector<long> out;
    for (const auto &tok : split(s, ',')) {
        out.push_back(tok == "exact" ? 0L : std::stol(tok));
    }
    return out;
}

std::vector<double> parse_reals(const std::string &s) {
    std::vector<double> out;
    for (const auto &tok : split(s, ',')) {
        out.push_back(std::stod(tok));
    }
    return out;
}

struct Options {
    std::string config_file;
    std::string graph;
    std::string random_regular;
    std::string problem;
    double omega = kNaN;
    std::string depth;
    std::string shots;
    std::string sigma_qn;
    std::string optimizer;
    int reps = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    int n_bayes = -1;
    int n_warmup = -1;
    int patience = -1;
    int restarts = -1;
    int acq_generations = -1;
    int resolution = -1;
    int bins = -1;
    double target = kNaN;
    int jobs = 0;
    bool quiet = false;
};

void add_common(CLI::App *sub, Options &o) {
    sub->add_option("--config", o.config_file, "JSON config file; flags override it");
    auto *g = sub->add_option("--graph", o.graph, "edge-list file (first line: node count)");
    sub->add_option("--random-regular", o.random_regular, "random regular graph n,d,seed")
        ->excludes(g);
    sub->add_option("--problem", o.problem, "maxcut | mis")
        ->check(CLI::IsMember({"maxcut", "mis"}));
    sub->add_option("--omega", o.omega, "MIS penalty weight");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "master seed")->each([&o](const std::string &) {
        o.seed_set = true;
    });
    sub->add_flag("--quiet", o.quiet, "no per-run progress on stderr");
}

void add_run_options(CLI::App *sub, Options &o) {
    sub->add_option("--depth", o.depth, "depth p, list 1,2,3 or range 1-12");
    sub->add_option("--reps", o.reps, "repetitions per cell")->check(CLI::PositiveNumber);
    sub->add_option("--n-bayes", o.n_bayes, "Bayesian iterations")->check(CLI::NonNegativeNumber);
    sub->add_option("--n-warmup", o.n_warmup, "warmup points")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--patience", o.patience, "stop after this many non-improving iterations");
    sub->add_option("--restarts", o.restarts, "hyperparameter fit restarts");
    sub->add_option("--acq-generations", o.acq_generations, "DE generation cap for EI");
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig build_config(Experiment e, const Options &o) {
    ExperimentConfig c = ExperimentConfig::defaults(e);
    if (!o.config_file.empty()) {
        std::ifstream in(o.config_file);
        if (!in) {
            throw std::runtime_error("cannot open config " + o.config_file);
        }
        nlohmann::json j = nlohmann::json::parse(in);
        j["experiment"] = to_string(e);
        c = config_from_json(j);
    }
    if (!o.graph.empty()) {
        c.instance.graph_file = o.graph;
    }
    if (!o.random_regular.empty()) {
        const auto parts = split(o.random_regular, ',');
        if (parts.size() != 3) {
            throw CLI::ValidationError("--random-regular", "expected n,d,seed");
        }
        c.instance.graph_file.clear();
        c.instance.n_nodes = std::stoi(parts[0]);
        c.instance.degree = std::stoi(parts[1]);
        c.instance.graph_seed = std::stoull(parts[2]);
    }
    if (!o.problem.empty()) {
        c.problem = parse_problem_kind(o.problem);
    }
    if (!std::isnan(o.omega)) {
        c.omega = o.omega;
    }
    if (!o.depth.empty()) {
        c.depths = parse_depths(o.depth);
    }
    if (!o.shots.empty()) {
        c.shots = parse_shots(o.shots);
    }
    if (!o.sigma_qn.empty()) {
        c.sigma_qn = parse_reals(o.sigma_qn);
    }
    if (!o.optimizer.empty()) {
        c.optimizers.clear();
        for (const auto &s : split(o.optimizer, ',')) {
            c.optimizers.push_back(parse_optimizer(s));
        }
    }
    if (o.reps > 0) {
        c.repetitions = o.reps;
    }
    if (o.seed_set) {
        c.seed = o.seed;
    }
    if (!o.out.empty()) {
        c.out_dir = o.out;
    }
    if (o.n_bayes >= 0) {
        c.n_bayes = o.n_bayes;
    }
    if (o.n_warmup >= 0) {
        c.n_warmup = o.n_warmup;
    }
    if (o.patience >= 0) {
        c.patience = o.patience;
    }
    if (o.restarts > 0) {
        c.n_restarts = o.restarts;
    }
    if (o.acq_generations >= 0) {
        c.acq_max_generations = o.acq_generations;
    }
    if (o.resolution > 0) {
        c.resolution = o.resolution;
    }
    if (o.bins > 0) {
        c.bins = o.bins;
    }
    if (!std::isnan(o.target)) {
        c.target_ratio = o.target;
    }
    if (o.jobs > 0) {
        c.jobs = o.jobs;
    }
    c.validate();
    return c;
}

void print_summary(const ExperimentResult &res, std::ostream &out) {
    const auto &inst = res.instance;
    out << "instance: " << inst.graph.n_nodes() << " nodes, " << inst.graph.n_edges()
        << " edges, " << to_string(inst.cost.kind) << ", E_GS=" << format_real(inst.e_gs)
        << ", " << inst.ground_set.size() << " ground state(s)\n";
    if (res.landscape) {
        const auto &L = *res.landscape;
        const auto [ge, be] = L.theta_e();
        const auto [gf, bf] = L.theta_f();
        out << "theta_E=(" << format_real(ge) << "," << format_real(be) << ") E="
            << format_real(L.energy(L.argmin_energy.first, L.argmin_energy.second)) << " F="
            << format_real(L.fidelity(L.argmin_energy.first, L.argmin_energy.second)) << '\n';
        out << "theta_F=(" << format_real(gf) << "," << format_real(bf) << ") E="
            << format_real(L.energy(L.argmax_fidelity.first, L.argmax_fidelity.second))
            << " F="
            << format_real(L.fidelity(L.argmax_fidelity.first, L.argmax_fidelity.second))
            << '\n';
    }
    if (res.histogram) {
        write_histogram_csv(out, *res.histogram);
    }
    if (!res.rows.empty()) {
        write_aggregate_csv(out, res.rows);
    }
    if (res.power_law) {
        out << "power law: sigma_n2 ~ N_S^" << format_real(res.power_law->exponent) << '\n';
    }
    if (res.config.experiment == Experiment::Solve && !res.runs.empty()) {
        const auto &t = res.runs.front().trace;
        out << "best_theta";
        for (double x : t.best_theta) {
            out << ' ' << format_real(x);
        }
        out << '\n';
    }
    if (!res.config.out_dir.empty()) {
        out << "wrote " << res.config.out_dir << '\n';
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Bayesian optimization of QAOA parameters"};
    app.require_subcommand(1);
    Options o;

    struct Sub {
        Experiment e;
        const char *help;
    };
    const std::vector<Sub> subs{
        {Experiment::Landscape, "p = 1 energy and fidelity grid"},
        {Experiment::Histogram, "distribution of the classical cost"},
        {Experiment::DepthSweep, "final R and F versus depth"},
        {Experiment::Compare, "circuit calls of Bayesian optimization versus baselines"},
        {Experiment::Shots, "optimization on shot-sampled energies"},
        {Experiment::Noise, "optimization on a noisy circuit"},
        {Experiment::Solve, "single optimization run"},
    };
    std::vector<std::pair<CLI::App *, Experiment>> commands;
    for (const auto &s : subs) {
        auto *sub = app.add_subcommand(to_string(s.e), s.help);
        add_common(sub, o);
        switch (s.e) {
        case Experiment::Landscape:
            sub->add_option("--resolution", o.resolution, "grid points per axis")
                ->check(CLI::Range(2, 100000));
            break;
        case Experiment::Histogram:
            sub->add_option("--bins", o.bins, "number of bins")->check(CLI::PositiveNumber);
            break;
        case Experiment::Compare:
            add_run_options(sub, o);
            sub->add_option("--optimizer", o.optimizer,
                            "comma list of bayes,de,basinhopping,dualannealing");
            sub->add_option("--target", o.target,
                            "fixed target R (default: each repetition's Bayesian final R)");
            break;
        case Experiment::Shots:
            add_run_options(sub, o);
            sub->add_option("--shots", o.shots, "shot counts, e.g. exact,1024,128");
            break;
        case Experiment::Noise:
            add_run_options(sub, o);
            sub->add_option("--sigma-qn", o.sigma_qn, "noise levels, e.g. 0,0.01,0.1");
            break;
        case Experiment::Solve:
            add_run_options(sub, o);
            sub->add_option("--shots", o.shots, "exact or a shot count");
            sub->add_option("--sigma-qn", o.sigma_qn, "noise level");
            sub->add_option("--optimizer", o.optimizer, "bayes | de | basinhopping | "
                                                        "dualannealing");
            break;
        case Experiment::DepthSweep:
            add_run_options(sub, o);
            break;
        }
        commands.emplace_back(sub, s.e);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto &[sub, e] : commands) {
            if (!sub->parsed()) {
                continue;
            }
            const ExperimentConfig config = build_config(e, o);
            ProgressFn progress;
            if (!o.quiet) {
                progress = [](const std::string &line) { std::cerr << line << '\n'; };
            }
            const auto res = run_experiment(config, progress);
            print_summary(res, std::cout);
        }
    } catch (const std::exception &ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
