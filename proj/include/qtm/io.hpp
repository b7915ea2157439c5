// io.hpp
// JSON serialization for machines, states, and analysis reports.
//
// Machine file: {"name":str, "head_dim":L, "qudit_dim":d,
//   "terms":[{"gamma":float, "delta":int, "head":[[[re,im] x L] x L],
//             "qubit":[[[re,im] x d] x d]}]}
// State file: {"components":[{"amp":[re,im], "head_level":int,
//   "head_pos":int, "lattice":{"<site>":level, ...}}]}
// Lattice keys are decimal signed site indices; absent sites are level 0.

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qtm/dynamics.hpp"
#include "qtm/graph.hpp"
#include "qtm/paths.hpp"
#include "qtm/step_operator.hpp"

namespace qtm {
namespace io {

using nlohmann::json;
using nlohmann::ordered_json;

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError("complex values must be [re, im] pairs");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& e : row) r.push_back(complex_to_json(e));
        rows.push_back(r);
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j, int expected, const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != expected)
        throw ParseError(what + " must have " + std::to_string(expected) + " rows");
    Matrix m;
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != expected)
            throw ParseError(what + " must be square with side " + std::to_string(expected));
        std::vector<Complex> r;
        for (const auto& e : row) r.push_back(complex_from_json(e));
        m.push_back(std::move(r));
    }
    return m;
}

inline json machine_to_json(const StepOperator& T) {
    json terms = json::array();
    for (const auto& t : T.terms()) {
        json term;
        term["gamma"] = t.gamma;
        term["delta"] = t.delta;
        term["head"] = matrix_to_json(t.head_matrix);
        term["qubit"] = matrix_to_json(t.qubit_matrix);
        if (!t.label.empty()) term["label"] = t.label;
        terms.push_back(term);
    }
    return json{{"name", T.name()},
                {"head_dim", T.head_dim()},
                {"qudit_dim", T.qudit_dim()},
                {"terms", terms}};
}

inline StepOperator machine_from_json(const json& j) {
    for (const char* key : {"name", "head_dim", "qudit_dim", "terms"})
        if (!j.contains(key)) throw ParseError(std::string("machine file lacks \"") + key + "\"");
    const int L = j["head_dim"].get<int>();
    const int d = j["qudit_dim"].get<int>();
    std::vector<StepTerm> terms;
    for (const auto& t : j["terms"]) {
        for (const char* key : {"gamma", "delta", "head", "qubit"})
            if (!t.contains(key))
                throw ParseError(std::string("machine term lacks \"") + key + "\"");
        terms.emplace_back(t["gamma"].get<double>(), t["delta"].get<int>(),
                           matrix_from_json(t["head"], L, "head matrix"),
                           matrix_from_json(t["qubit"], d, "qubit matrix"),
                           t.value("label", std::string{}));
    }
    return StepOperator(j["name"].get<std::string>(), L, d, std::move(terms));
}

inline json state_to_json(const WaveState& psi) {
    json components = json::array();
    for (const auto& [b, amp] : psi.terms()) {
        json lattice = json::object();
        for (const auto& [site, lvl] : b.lattice.entries())
            lattice[std::to_string(site)] = lvl;
        components.push_back(json{{"amp", complex_to_json(amp)},
                                  {"head_level", b.head_level},
                                  {"head_pos", b.head_pos},
                                  {"lattice", lattice}});
    }
    return json{{"components", components}};
}

// Level-0 lattice entries in the file are normalized away silently.
inline WaveState state_from_json(const json& j, int head_dim, int qudit_dim) {
    if (!j.contains("components")) throw ParseError("state file lacks \"components\"");
    WaveState out(head_dim, qudit_dim);
    for (const auto& c : j["components"]) {
        for (const char* key : {"amp", "head_level", "head_pos", "lattice"})
            if (!c.contains(key))
                throw ParseError(std::string("state component lacks \"") + key + "\"");
        QuditLattice lat(qudit_dim);
        for (const auto& [key, val] : c["lattice"].items()) {
            std::int64_t site = 0;
            try {
                site = std::stoll(key);
            } catch (const std::exception&) {
                throw ParseError("lattice key \"" + key + "\" is not a site index");
            }
            lat = lat.with_level(site, val.get<int>());
        }
        out.add(BasisVector(c["head_level"].get<int>(), c["head_pos"].get<std::int64_t>(), lat),
                complex_from_json(c["amp"]));
    }
    out.prune();
    return out;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

inline StepOperator load_machine(const std::string& path) {
    return machine_from_json(load_json_file(path));
}

inline WaveState load_state(const std::string& path, int head_dim, int qudit_dim) {
    return state_from_json(load_json_file(path), head_dim, qudit_dim);
}

// ---------------------------------------------------------------------------
// Report serialization (CLI --json payloads)

inline json path_to_json(const PathRecord& path) {
    json states = json::array();
    for (std::int64_t k = path.m_min; k <= path.m_max; ++k) {
        json s = state_to_json(path.state(k));
        s["index"] = k;
        s["weight"] = path.weight(k);
        states.push_back(s);
    }
    json out{{"states", states},
             {"forward_terminal", path.forward_terminal},
             {"backward_terminal", path.backward_terminal},
             {"classification", to_string(path.classification)},
             {"verified", path.verified}};
    if (path.cyclic_period) out["cyclic_period"] = *path.cyclic_period;
    return out;
}

inline json dpg_report_to_json(const DpgReport& r) {
    return json{{"pass", r.pass()},
                {"orthogonal", r.orthogonal},
                {"max_cross_overlap", r.max_cross_overlap},
                {"backstep_ok", r.backstep_ok},
                {"forwardstep_ok", r.forwardstep_ok},
                {"worst_step_defect", r.worst_step_defect},
                {"witness", r.witness}};
}

inline json eigensystem_to_json(const EigenSystem& e) {
    json out{{"numeric_eigenvalues", e.numeric_eigenvalues},
             {"formulas_emitted", e.formulas_emitted},
             {"note", e.note}};
    if (e.formulas_emitted) {
        out["dirichlet_formula_eigenvalues"] = e.dirichlet_formula_eigenvalues;
        out["reported_formula_eigenvalues"] = e.reported_formula_eigenvalues;
        out["reported_formula_matches"] = e.reported_formula_matches;
        out["dirichlet_formula_max_deviation"] = e.dirichlet_formula_max_deviation;
    }
    return out;
}

inline json graph_to_json(const ComputationGraph& g) {
    int max_step = 0;
    for (const auto& n : g.nodes) max_step = std::max(max_step, n.step);
    json nodes = json::array();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        json lattice = json::object();
        for (const auto& [site, lvl] : n.basis.lattice.entries())
            lattice[std::to_string(site)] = lvl;
        nodes.push_back(json{{"id", i},
                             {"step", n.step},
                             {"head_level", n.basis.head_level},
                             {"head_pos", n.basis.head_pos},
                             {"lattice", lattice},
                             {"amp", complex_to_json(n.amplitude)},
                             {"leaf", n.step == max_step}});
    }
    json edges = json::array();
    for (const auto& e : g.edges)
        edges.push_back(json{{"from", e.from}, {"to", e.to}, {"amp", complex_to_json(e.amplitude)}});
    return json{{"nodes", nodes}, {"edges", edges}, {"steps", g.steps}};
}

inline json structure_to_json(const StructureReport& r) {
    json loops = json::array();
    for (const auto& loop : r.loops)
        loops.push_back(json{{"open_step", loop.open_step},
                             {"close_step", loop.close_step},
                             {"arm_lengths", loop.arm_lengths}});
    return json{{"branch_nodes", r.branch_nodes},
                {"merge_nodes", r.merge_nodes},
                {"leaves", r.leaves},
                {"max_depth", r.max_depth},
                {"stage_positions", r.stage_positions},
                {"is_tree", r.is_tree},
                {"loops", loops},
                {"components_per_step", r.components_per_step}};
}

}  // namespace io
}  // namespace qtm
