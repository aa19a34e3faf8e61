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
 * Graph instances and the diagonal cost Hamiltonians of Max-Cut and
 * Maximum Independent Set, with exhaustive ground-state oracles.
 *
 * Bit convention, used everywhere in the library: a computational basis
 * state is an integer z whose bit i is the value of qubit i, and the Pauli Z
 * eigenvalue of qubit i is zeta_i = +1 when the bit is 0 and -1 when it is 1.
 */
#pragma once

#include "common.hpp"

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace bqaoa {

inline constexpr int kMaxQubits = 24;

using Bitstring = std::uint64_t;

/// Z eigenvalue of qubit `i` in basis state `z`.
constexpr int z_eigenvalue(Bitstring z, int i) {
    return ((z >> static_cast<unsigned>(i)) & 1U) != 0 ? -1 : 1;
}

struct Edge {
    int u = 0;
    int v = 0;
    friend bool operator==(const Edge &, const Edge &) = default;
};

/// Simple undirected graph; edges are stored with u < v, without duplicates.
class Graph {
  public:
    Graph() = default;

    Graph(int n_nodes, std::vector<Edge> edges) : n_nodes_(n_nodes) {
        if (n_nodes < 1 || n_nodes > kMaxQubits) {
            throw std::invalid_argument("graph must have between 1 and " +
                                        std::to_string(kMaxQubits) + " nodes");
        }
        std::set<std::pair<int, int>> seen;
        edges_.reserve(edges.size());
        for (auto e : edges) {
            if (e.u < 0 || e.v < 0 || e.u >= n_nodes || e.v >= n_nodes) {
                throw std::out_of_range("edge (" + std::to_string(e.u) + ", " +
                                        std::to_string(e.v) +
                                        ") references a node out of range");
            }
            if (e.u == e.v) {
                throw std::invalid_argument("self-loop on node " + std::to_string(e.u));
            }
            if (e.u > e.v) {
                std::swap(e.u, e.v);
            }
            if (!seen.emplace(e.u, e.v).second) {
                throw std::invalid_argument("duplicate edge (" + std::to_string(e.u) +
                                            ", " + std::to_string(e.v) + ")");
            }
            edges_.push_back(e);
        }
    }

    [[nodiscard]] int n_nodes() const { return n_nodes_; }
    [[nodiscard]] const std::vector<Edge> &edges() const { return edges_; }
    [[nodiscard]] std::size_t n_edges() const { return edges_.size(); }

    [[nodiscard]] int degree(int node) const {
        int d = 0;
        for (const auto &e : edges_) {
            d += static_cast<int>(e.u == node) + static_cast<int>(e.v == node);
        }
        return d;
    }

    friend bool operator==(const Graph &, const Graph &) = default;

  private:
    int n_nodes_ = 0;
    std::vector<Edge> edges_;
};

enum class ProblemKind { MaxCut, MIS };

inline std::string to_string(ProblemKind kind) {
    return kind == ProblemKind::MaxCut ? "maxcut" : "mis";
}

inline ProblemKind parse_problem_kind(const std::string &s) {
    if (s == "maxcut") {
        return ProblemKind::MaxCut;
    }
    if (s == "mis") {
        return ProblemKind::MIS;
    }
    throw std::invalid_argument("unknown problem kind '" + s + "' (expected maxcut|mis)");
}

inline constexpr double kDefaultOmega = 2.0;

/// Dense table of C(z) over all 2^N basis states.
struct CostTable {
    ProblemKind kind = ProblemKind::MaxCut;
    double omega = kDefaultOmega;
    int n_qubits = 0;
    std::vector<double> values;

    [[nodiscard]] std::size_t dimension() const { return values.size(); }
};

/// Cost of a single basis state, evaluated term by term.
inline double evaluate_cost(const Graph &graph, ProblemKind kind, double omega, Bitstring z) {
    double c = 0.0;
    if (kind == ProblemKind::MaxCut) {
        for (const auto &e : graph.edges()) {
            c -= 0.5 * (1.0 - z_eigenvalue(z, e.u) * z_eigenvalue(z, e.v));
        }
    } else {
        for (int i = 0; i < graph.n_nodes(); ++i) {
            c += z_eigenvalue(z, i);
        }
        for (const auto &e : graph.edges()) {
            c += omega * z_eigenvalue(z, e.u) * z_eigenvalue(z, e.v);
        }
    }
    return c;
}

inline CostTable build_cost_table(const Graph &graph, ProblemKind kind,
                                  double omega = kDefaultOmega) {
    if (kind == ProblemKind::MIS && !(omega > 0.0)) {
        throw std::invalid_argument("MIS penalty weight omega must be positive");
    }
    const int n = graph.n_nodes();
    if (n < 1 || n > kMaxQubits) {
        throw std::invalid_argument("graph size out of range");
    }
    CostTable table;
    table.kind = kind;
    table.omega = omega;
    table.n_qubits = n;
    const std::size_t dim = std::size_t{1} << static_cast<unsigned>(n);
    table.values.resize(dim);
    for (Bitstring z = 0; z < dim; ++z) {
        table.values[z] = evaluate_cost(graph, kind, omega, z);
    }
    return table;
}

struct GroundState {
    double energy = 0.0;
    std::vector<Bitstring> states;
};

/// Exact minimum and full argmin set by linear scan.
inline GroundState brute_force_ground(const CostTable &cost) {
    if (cost.values.empty()) {
        throw std::invalid_argument("empty cost table");
    }
    GroundState gs;
    gs.energy = cost.values[0];
    for (double v : cost.values) {
        gs.energy = std::min(gs.energy, v);
    }
    for (Bitstring z = 0; z < cost.values.size(); ++z) {
        if (cost.values[z] == gs.energy) {
            gs.states.push_back(z);
        }
    }
    return gs;
}

struct ProblemInstance {
    Graph graph;
    CostTable cost;
    double e_gs = 0.0;
    std::vector<Bitstring> ground_set;

    [[nodiscard]] int n_qubits() const { return graph.n_nodes(); }
};

inline ProblemInstance make_instance(Graph graph, ProblemKind kind,
                                     double omega = kDefaultOmega) {
    ProblemInstance inst;
    inst.cost = build_cost_table(graph, kind, omega);
    auto gs = brute_force_ground(inst.cost);
    inst.graph = std::move(graph);
    inst.e_gs = gs.energy;
    inst.ground_set = std::move(gs.states);
    return inst;
}

/// Random d-regular simple graph from the pairing (configuration) model.
/// Pairings containing self-loops or multi-edges are rejected and redrawn.
inline Graph random_regular_graph(int n, int degree, std::uint64_t seed,
                                  int max_attempts = 10000) {
    if (n < 1 || n > kMaxQubits) {
        throw std::invalid_argument("random_regular_graph: n out of range");
    }
    if (degree < 0 || degree >= n) {
        throw std::invalid_argument("random_regular_graph: need 0 <= degree < n");
    }
    if ((n * degree) % 2 != 0) {
        throw std::invalid_argument("random_regular_graph: n * degree must be even");
    }
    Rng rng(seed);
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n * degree));
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        stubs.clear();
        for (int v = 0; v < n; ++v) {
            for (int k = 0; k < degree; ++k) {
                stubs.push_back(v);
            }
        }
        shuffle(stubs, rng);
        std::set<std::pair<int, int>> seen;
        std::vector<Edge> edges;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int u = stubs[i];
            int v = stubs[i + 1];
            if (u == v) {
                ok = false;
                break;
            }
            if (u > v) {
                std::swap(u, v);
            }
            if (!seen.emplace(u, v).second) {
                ok = false;
                break;
            }
            edges.push_back({u, v});
        }
        if (ok) {
            std::sort(edges.begin(), edges.end(), [](const Edge &a, const Edge &b) {
                return std::pair(a.u, a.v) < std::pair(b.u, b.v);
            });
            return Graph(n, std::move(edges));
        }
    }
    throw std::runtime_error("random_regular_graph: no simple pairing found after " +
                             std::to_string(max_attempts) + " attempts");
}

struct Histogram {
    std::vector<double> edges; ///< n_bins + 1 bin boundaries
    std::vector<std::size_t> counts;
};

/// Equal-width histogram over [min C, max C]; the top edge is inclusive.
inline Histogram energy_histogram(const CostTable &cost, int n_bins) {
    if (n_bins < 1) {
        throw std::invalid_argument("energy_histogram: n_bins must be >= 1");
    }
    const auto [lo_it, hi_it] = std::minmax_element(cost.values.begin(), cost.values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double width = (hi - lo) / n_bins;
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int b = 0; b <= n_bins; ++b) {
        h.edges[static_cast<std::size_t>(b)] = lo + width * b;
    }
    h.edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(n_bins), 0);
    for (double v : cost.values) {
        int b = width > 0.0 ? static_cast<int>(std::floor((v - lo) / width)) : 0;
        b = std::clamp(b, 0, n_bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

// Edge-list text format: first line is n_nodes, then one "u v" pair per line.

inline Graph read_edge_list(std::istream &in) {
    int n = 0;
    if (!(in >> n)) {
        throw std::runtime_error("edge list: missing node count");
    }
    std::vector<Edge> edges;
    int u = 0;
    int v = 0;
    while (in >> u) {
        if (!(in >> v)) {
            throw std::runtime_error("edge list: dangling node index");
        }
        edges.push_back({u, v});
    }
    if (!in.eof()) {
        throw std::runtime_error("edge list: malformed entry");
    }
    return Graph(n, std::move(edges));
}

inline void write_edge_list(std::ostream &out, const Graph &graph) {
    out << graph.n_nodes() << '\n';
    for (const auto &e : graph.edges()) {
        out << e.u << ' ' << e.v << '\n';
    }
}

inline Graph load_edge_list(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open edge list '" + path + "'");
    }
    return read_edge_list(in);
}

inline void save_edge_list(const std::string &path, const Graph &graph) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write edge list '" + path + "'");
    }
    write_edge_list(out, graph);
}

/// Bitstring rendered with qubit 0 first, e.g. z = 1 on 3 qubits -> "100".
inline std::string bitstring_label(Bitstring z, int n_qubits) {
    std::string s(static_cast<std::size_t>(n_qubits), '0');
    for (int i = 0; i < n_qubits; ++i) {
        if (((z >> static_cast<unsigned>(i)) & 1U) != 0) {
            s[static_cast<std::size_t>(i)] = '1';
        }
    }
    return s;
}

} // namespace bqaoa
