// graph.hpp
// Expansion of forward path evolution into the computation basis as a
// time-unrolled graph, structural classification (trees, interferometer
// loops), and deterministic DOT / JSON export. Node identity is the basis
// vector stamped with its step, since the same computation-basis state can
// recur at different steps.

#pragma once

#include <algorithm>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qtm/paths.hpp"
#include "qtm/step_operator.hpp"

namespace qtm {

constexpr double kGraphNodeEps = 1e-10;

struct GraphNode {
    int step = 0;
    BasisVector basis;
    Complex amplitude;  // amplitude within the normalized step state
};

struct GraphEdge {
    int from = 0;  // node indices
    int to = 0;
    Complex amplitude;  // <b'|T|b>
};

struct ComputationGraph {
    std::vector<GraphNode> nodes;  // sorted by step, then basis order
    std::vector<GraphEdge> edges;
    WaveState seed;
    int steps = 0;
};

// Iterates Psi_{m+1} = T Psi_m (normalized) and records the components
// with |amplitude| > eps at each step, connecting components b of Psi_m
// to components b' of Psi_{m+1} with <b'|T|b> != 0.
inline ComputationGraph build_graph(const StepOperator& T, const WaveState& seed, int steps,
                                    double eps = kGraphNodeEps) {
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    ComputationGraph g{.seed = seed.normalized(), .steps = steps};

    std::map<std::pair<int, BasisVector>, int> node_index;
    auto record_step = [&](int m, const WaveState& psi) {
        for (const auto& [b, amp] : psi.terms())
            if (std::abs(amp) > eps) {
                node_index[{m, b}] = static_cast<int>(g.nodes.size());
                g.nodes.push_back(GraphNode{m, b, amp});
            }
    };

    WaveState current = g.seed;
    record_step(0, current);
    for (int m = 0; m < steps; ++m) {
        WaveState image = apply(T, current);
        if (image.norm() <= kEpsTerminal) break;
        WaveState next = image.normalized();
        record_step(m + 1, next);
        for (const auto& [b, amp] : current.terms()) {
            if (std::abs(amp) <= eps) continue;
            auto from_it = node_index.find({m, b});
            if (from_it == node_index.end()) continue;
            WaveState column = apply(T, WaveState::basis(T.head_dim(), T.qudit_dim(), b));
            for (const auto& [bp, tamp] : column.terms()) {
                auto to_it = node_index.find({m + 1, bp});
                if (to_it != node_index.end())
                    g.edges.push_back(GraphEdge{from_it->second, to_it->second, tamp});
            }
        }
        current = std::move(next);
    }
    return g;
}

struct InterferometerLoop {
    int open_step = 0;   // step of the branch node
    int close_step = 0;  // step of the merge node
    std::vector<int> arm_lengths;  // states strictly between branch and merge, per arm
};

struct StructureReport {
    int branch_nodes = 0;  // out-degree >= 2
    int merge_nodes = 0;   // in-degree >= 2
    int leaves = 0;        // nodes at the final recorded step
    int max_depth = 0;
    std::vector<int> stage_positions;  // steps at which branchings occur
    bool is_tree = false;
    std::vector<InterferometerLoop> loops;  // in open-step order
    std::vector<std::size_t> components_per_step;
};

// Degree statistics, tree detection, and pairing of branch/merge nodes
// into interferometer loops with per-arm lengths.
inline StructureReport classify_structure(const ComputationGraph& g) {
    StructureReport report;
    const int n = static_cast<int>(g.nodes.size());
    std::vector<int> out_deg(n, 0), in_deg(n, 0);
    std::vector<int> parent(n, -1);  // one representative predecessor
    std::vector<std::vector<int>> successors(n);
    for (const auto& e : g.edges) {
        ++out_deg[e.from];
        ++in_deg[e.to];
        parent[e.to] = e.from;
        successors[e.from].push_back(e.to);
    }

    for (int i = 0; i < n; ++i) {
        report.max_depth = std::max(report.max_depth, g.nodes[i].step);
        if (out_deg[i] >= 2) {
            ++report.branch_nodes;
            report.stage_positions.push_back(g.nodes[i].step);
        }
        if (in_deg[i] >= 2) ++report.merge_nodes;
    }
    std::sort(report.stage_positions.begin(), report.stage_positions.end());
    report.components_per_step.assign(report.max_depth + 1, 0);
    for (int i = 0; i < n; ++i) ++report.components_per_step[g.nodes[i].step];
    for (int i = 0; i < n; ++i)
        if (g.nodes[i].step == report.max_depth) ++report.leaves;
    report.is_tree = report.merge_nodes == 0;

    // Pair each merge node with the branch node its arms diverged from.
    // Loops can nest (a unitary acting inside one arm splits it into a
    // sub-loop that recombines before the outer closure), so climbing an
    // arm jumps over inner merges to the node above their own opener.
    std::vector<int> loop_branch(n, -2);  // memo: -2 unresolved, -1 failed
    std::function<int(int)> resolve_merge = [&](int merge) -> int {
        if (loop_branch[merge] != -2) return loop_branch[merge];
        loop_branch[merge] = -1;  // breaks cycles while resolving
        int branch = -1;
        bool consistent = true;
        for (const auto& e : g.edges) {
            if (e.to != merge) continue;
            int node = e.from;
            int guard = n + 1;
            while (guard-- > 0) {
                if (in_deg[node] >= 2) {
                    const int inner = resolve_merge(node);
                    if (inner < 0 || parent[inner] < 0) { node = -1; break; }
                    node = parent[inner];
                    if (out_deg[node] >= 2) break;  // the opener we seek
                    continue;
                }
                if (out_deg[node] >= 2) break;
                if (parent[node] < 0) { node = -1; break; }
                node = parent[node];
            }
            if (node < 0 || (branch >= 0 && node != branch)) {
                consistent = false;
                break;
            }
            branch = node;
        }
        loop_branch[merge] = consistent ? branch : -1;
        return loop_branch[merge];
    };

    for (int merge = 0; merge < n; ++merge) {
        if (in_deg[merge] < 2) continue;
        const int branch = resolve_merge(merge);
        if (branch < 0) continue;
        InterferometerLoop loop;
        loop.open_step = g.nodes[branch].step;
        loop.close_step = g.nodes[merge].step;
        // every edge advances the step by one, so each arm holds the states
        // strictly between the opener and the closure
        loop.arm_lengths.assign(static_cast<std::size_t>(in_deg[merge]),
                                loop.close_step - loop.open_step - 1);
        report.loops.push_back(loop);
    }
    std::sort(report.loops.begin(), report.loops.end(),
              [](const InterferometerLoop& a, const InterferometerLoop& b) {
                  return a.open_step < b.open_step;
              });
    return report;
}

namespace detail {

inline std::string node_label(const GraphNode& node) {
    std::ostringstream os;
    os << "m=" << node.step << " l=" << node.basis.head_level << " j=" << node.basis.head_pos;
    for (const auto& [site, lvl] : node.basis.lattice.entries())
        os << " s" << site << "=" << lvl;
    return os.str();
}

inline std::string format_real(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

}  // namespace detail

inline std::string export_graph_dot(const ComputationGraph& g) {
    std::ostringstream os;
    os << "digraph computation {\n  rankdir=LR;\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        os << "  n" << i << " [label=\"" << detail::node_label(g.nodes[i]) << "\"];\n";
    // edges sorted by (from, to) for deterministic output
    std::vector<GraphEdge> edges = g.edges;
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return std::pair(a.from, a.to) < std::pair(b.from, b.to);
    });
    for (const auto& e : edges)
        os << "  n" << e.from << " -> n" << e.to << " [label=\""
           << detail::format_real(std::abs(e.amplitude)) << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace qtm
