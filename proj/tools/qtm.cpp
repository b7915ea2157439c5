// qtm.cpp
// Command-line front end: validate machines, generate and verify paths,
// probe power partial isometries, compute path spectra, evolve states,
// and export computation graphs.
//
// Exit codes: 0 on success, 1 when a requested check fails (a witness is
// printed, as JSON under --json), 2 on usage or input errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qtm/dynamics.hpp"
#include "qtm/graph.hpp"
#include "qtm/io.hpp"
#include "qtm/machines.hpp"
#include "qtm/paths.hpp"

using namespace qtm;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

StepOperator resolve_machine(const std::string& spec) {
    if (spec.rfind("builtin:", 0) == 0) {
        const std::string name = spec.substr(8);
        if (name == "free") return machines::free_motion();
        if (name == "erasure") return machines::erasure();
        if (name == "erasure_p+") return machines::erasure_projector_form();
        if (name == "add1") return machines::add1();
        if (name == "interf1") return machines::interferometer1();
        if (name == "interf2") return machines::interferometer2();
        if (name == "interf2_broken") return machines::interferometer2_broken();
        if (name == "cycle") return machines::cycle(3);
        throw UsageError("unknown builtin machine '" + name +
                         "' (expected free, erasure, erasure_p+, add1, interf1, interf2, "
                         "interf2_broken, cycle)");
    }
    return io::load_machine(spec);
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            out.push_back(std::stoll(tok));
        } catch (const std::exception&) {
            throw UsageError(what + ": '" + tok + "' is not an integer");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// State mini-specs alongside plain JSON file paths:
//   basis:l,j[,site:level ...]   a single computation-basis state
//   markers:s1,s2,...[@head]     add-1 marker seed (head defaults to s1)
//   erasure_bt:head,wall         one-way-infinite erasure wall state
//   erasure_bt_finite:h,a,b      two-walled erasure state
//   interf1:z                    first interferometer seed with gap z
//   interf2                      second interferometer seed
//   interf2chain:n               n chained interferometer patterns
WaveState resolve_state(const std::string& spec, const StepOperator& T) {
    auto rest_of = [&](std::size_t n) { return spec.substr(n); };
    try {
        if (spec.rfind("basis:", 0) == 0) {
            std::vector<std::string> parts;
            std::string body = rest_of(6);
            std::size_t pos = 0;
            while (pos <= body.size()) {
                const std::size_t comma = body.find(',', pos);
                parts.push_back(
                    body.substr(pos, comma == std::string::npos ? comma : comma - pos));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            if (parts.size() < 2) throw UsageError("basis: needs at least 'level,position'");
            QuditLattice lat(T.qudit_dim());
            for (std::size_t i = 2; i < parts.size(); ++i) {
                const std::size_t colon = parts[i].find(':');
                if (colon == std::string::npos)
                    throw UsageError("basis: lattice entries look like 'site:level'");
                lat = lat.with_level(std::stoll(parts[i].substr(0, colon)),
                                     std::stoi(parts[i].substr(colon + 1)));
            }
            return WaveState::basis(T.head_dim(), T.qudit_dim(),
                                    BasisVector(std::stoi(parts[0]), std::stoll(parts[1]), lat));
        }
        if (spec.rfind("markers:", 0) == 0) {
            std::string body = rest_of(8);
            std::optional<std::int64_t> head;
            const std::size_t at = body.find('@');
            if (at != std::string::npos) {
                head = std::stoll(body.substr(at + 1));
                body = body.substr(0, at);
            }
            const auto sites = parse_int_list(body, "markers");
            return machines::add1_initial_state(sites, head.value_or(sites.front()));
        }
        if (spec.rfind("erasure_bt_finite:", 0) == 0) {
            const auto v = parse_int_list(rest_of(18), "erasure_bt_finite");
            if (v.size() != 3) throw UsageError("erasure_bt_finite: needs 'head,left,wall'");
            return machines::erasure_bt_state_finite(v[0], v[1], v[2]);
        }
        if (spec.rfind("erasure_bt:", 0) == 0) {
            const auto v = parse_int_list(rest_of(11), "erasure_bt");
            if (v.size() != 2) throw UsageError("erasure_bt: needs 'head,wall'");
            return machines::erasure_bt_state(v[0], v[1]);
        }
        if (spec.rfind("interf1:", 0) == 0)
            return machines::interferometer1_seed(static_cast<int>(std::stoll(rest_of(8))));
        if (spec.rfind("interf2chain:", 0) == 0)
            return machines::interferometer2_chain_seed(
                static_cast<int>(std::stoll(rest_of(13))));
        if (spec == "interf2") return machines::interferometer2_seed();
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError("bad state spec '" + spec + "': " + e.what());
    }
    WaveState psi = io::load_state(spec, T.head_dim(), T.qudit_dim());
    if (psi.empty()) throw UsageError("state file '" + spec + "' holds a zero state");
    return psi;
}

void emit(bool as_json, const json& payload, const std::string& text) {
    if (as_json)
        std::cout << payload.dump(2) << "\n";
    else
        std::cout << text;
}

void write_output(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-") {
        std::cout << content;
        return;
    }
    std::ofstream f(out);
    if (!f) throw UsageError("cannot write " + out);
    f << content;
}

struct Options {
    bool as_json = false;
    std::string machine_spec;
    std::string state_spec;
    int steps = 10;
    int back_steps = 0;
    double K = 1.0;
    double time = 1.0;
    double eps_orth = kEpsOrth;
    double eps_terminal = kEpsTerminal;
    bool require_dpg = false;
    int n_max = 3;
    std::string method = "window";
    int window_depth = -1;
    std::string format = "dot";
    std::string out;
};

int run_validate(const Options& opt) {
    StepOperator T = resolve_machine(opt.machine_spec);
    auto homog = check_homogeneity_locality(T, 200);
    auto dpg = check_dpg_computation_basis(T);

    json j{{"machine", T.name()},
           {"head_dim", T.head_dim()},
           {"qudit_dim", T.qudit_dim()},
           {"terms", T.terms().size()},
           {"homogeneous", homog.ok},
           {"distinct_path_generating", dpg.distinct_path_generating}};
    if (!homog.ok) j["homogeneity_witness"] = homog.witness;
    if (dpg.witness) j["dpg_witness"] = dpg.witness->describe();

    std::string text = "machine " + T.name() + ": L=" + std::to_string(T.head_dim()) + ", d=" +
                       std::to_string(T.qudit_dim()) + ", " + std::to_string(T.terms().size()) +
                       " terms\nhomogeneity: " + (homog.ok ? "ok" : homog.witness) +
                       "\ncomputation-basis distinct paths: " +
                       (dpg.distinct_path_generating ? "yes" : "no") +
                       (dpg.witness ? "\n  " + dpg.witness->describe() : "") + "\n";
    emit(opt.as_json, j, text);
    if (!homog.ok) return 1;
    if (opt.require_dpg && !dpg.distinct_path_generating) return 1;
    return 0;
}

int run_path(const Options& opt) {
    StepOperator T = resolve_machine(opt.machine_spec);
    WaveState seed = resolve_state(opt.state_spec, T);
    auto path = generate_path(T, seed, opt.steps, opt.back_steps, opt.eps_terminal,
                              opt.eps_orth);
    auto rep = verify_distinct_path(T, path, opt.eps_orth);

    json j = io::path_to_json(path);
    j["report"] = io::dpg_report_to_json(rep);
    if (path.verified) {
        auto shift = classify_shift_type(path);
        j["shift_type"] = to_string(shift.type);
        j["shift_type_lower_bound"] = shift.lower_bound;
    }
    if (path.weight_floor_warning) j["weight_floor_warning"] = true;

    std::string text = "path m in [" + std::to_string(path.m_min) + ", " +
                       std::to_string(path.m_max) + "], " + to_string(path.classification) +
                       "\nweights:";
    for (std::int64_t k = path.m_min; k <= path.m_max; ++k)
        text += " " + std::to_string(path.weight(k));
    text += std::string("\nverification: ") + (rep.pass() ? "pass" : "FAIL " + rep.witness) + "\n";
    if (path.verified)
        text += "shift type: " + to_string(classify_shift_type(path).type) + "\n";
    if (!opt.out.empty()) write_output(opt.out, j.dump(2) + "\n");
    emit(opt.as_json, j, text);
    return rep.pass() ? 0 : 1;
}

int run_isometry(const Options& opt) {
    StepOperator T = resolve_machine(opt.machine_spec);
    WaveState seed = resolve_state(opt.state_spec, T);
    std::vector<BasisVector> sample;
    for (const auto& [b, amp] : seed.terms()) sample.push_back(b);
    auto rep = check_power_partial_isometry(T, opt.n_max, sample);

    json j{{"ok", rep.ok},
           {"n_max", rep.n_max},
           {"sample_size", sample.size()},
           {"worst_idempotency_defect", rep.worst_idempotency_defect},
           {"worst_hermiticity_defect", rep.worst_hermiticity_defect},
           {"worst_commutator_defect", rep.worst_commutator_defect}};
    if (!rep.ok) j["witness"] = rep.witness;
    std::string text = std::string("power partial isometry: ") + (rep.ok ? "ok" : "FAIL") +
                       " (idempotency " + std::to_string(rep.worst_idempotency_defect) +
                       ", hermiticity " + std::to_string(rep.worst_hermiticity_defect) +
                       ", commutators " + std::to_string(rep.worst_commutator_defect) + ")\n" +
                       (rep.ok ? "" : rep.witness + "\n");
    emit(opt.as_json, j, text);
    return rep.ok ? 0 : 1;
}

int run_spectrum(const Options& opt) {
    StepOperator T = resolve_machine(opt.machine_spec);
    WaveState seed = resolve_state(opt.state_spec, T);
    auto path = generate_path(T, seed, opt.steps, opt.back_steps, opt.eps_terminal,
                              opt.eps_orth);
    auto rep = verify_distinct_path(T, path, opt.eps_orth);
    if (!rep.pass()) {
        emit(opt.as_json, json{{"error", "path verification failed"},
                               {"report", io::dpg_report_to_json(rep)}},
             "path verification failed: " + rep.witness + "\n");
        return 1;
    }
    auto eig = eigensystem(path_hamiltonian(path, opt.K));
    json j = io::eigensystem_to_json(eig);
    j["path_length"] = path.length();
    j["classification"] = to_string(path.classification);
    std::string text = "path of " + std::to_string(path.length()) + " states (" +
                       to_string(path.classification) + "), K=" + std::to_string(opt.K) +
                       "\neigenvalues:";
    for (double e : eig.numeric_eigenvalues) text += " " + std::to_string(e);
    text += "\n";
    if (!eig.note.empty()) text += eig.note + "\n";
    emit(opt.as_json, j, text);
    return 0;
}

int run_evolve(const Options& opt) {
    StepOperator T = resolve_machine(opt.machine_spec);
    WaveState seed = resolve_state(opt.state_spec, T);
    WaveState result = T.zero_state();
    json extra;

    if (opt.method == "window") {
        WindowSpec window;
        if (opt.window_depth >= 0) window.depth = opt.window_depth;
        auto res = evolve(T, opt.K, seed.normalized(), opt.time, window);
        result = res.state;
        extra = json{{"method", "window"},
                     {"window_dimension", res.window_dimension},
                     {"depth", res.depth_used},
                     {"boundary_mass", res.boundary_mass},
                     {"leakage_warning", res.leakage_warning}};
    } else if (opt.method == "path") {
        auto path = generate_path(T, seed, opt.steps, opt.back_steps, opt.eps_terminal,
                                  opt.eps_orth);
        auto rep = verify_distinct_path(T, path, opt.eps_orth);
        if (!rep.pass()) {
            emit(opt.as_json, json{{"error", "path verification failed"},
                                   {"report", io::dpg_report_to_json(rep)}},
                 "path verification failed: " + rep.witness + "\n");
            return 1;
        }
        auto res = evolve_on_path(path, opt.K, seed.normalized(), opt.time);
        result = res.state;
        extra = json{{"method", "path"},
                     {"path_length", path.length()},
                     {"residual_mass", res.residual_mass}};
    } else {
        throw UsageError("unknown --method '" + opt.method + "' (expected window or path)");
    }

    json j = io::state_to_json(result);
    j["norm"] = result.norm();
    j["components"] = result.size();
    j.update(extra);
    std::string text = "evolved to t=" + std::to_string(opt.time) + ": " +
                       std::to_string(result.size()) + " components, norm " +
                       std::to_string(result.norm()) + "\n";
    if (extra.contains("leakage_warning") && extra["leakage_warning"].get<bool>())
        text += "warning: probability reached the window edge; enlarge --window\n";
    if (!opt.out.empty()) write_output(opt.out, j.dump(2) + "\n");
    emit(opt.as_json, j, text);
    return 0;
}

int run_graph(const Options& opt) {
    StepOperator T = resolve_machine(opt.machine_spec);
    WaveState seed = resolve_state(opt.state_spec, T);
    auto g = build_graph(T, seed, opt.steps);
    auto r = classify_structure(g);

    std::string payload;
    if (opt.format == "dot")
        payload = export_graph_dot(g);
    else if (opt.format == "json") {
        json j = io::graph_to_json(g);
        j["structure"] = io::structure_to_json(r);
        payload = j.dump(2) + "\n";
    } else
        throw UsageError("unknown --format '" + opt.format + "' (expected dot or json)");
    write_output(opt.out, payload);

    if (opt.out.empty() || opt.out == "-") return 0;
    json j = io::structure_to_json(r);
    std::string text = std::to_string(g.nodes.size()) + " nodes, " +
                       std::to_string(g.edges.size()) + " edges; " +
                       (r.is_tree ? "tree" : "not a tree") + ", " +
                       std::to_string(r.leaves) + " leaves, " + std::to_string(r.loops.size()) +
                       " loops\n";
    emit(opt.as_json, j, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum Turing machine path and dynamics toolkit"};
    app.require_subcommand(1);

    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_flag("--json", opt.as_json, "machine-readable output");
    };
    auto add_machine = [&](CLI::App* sub) {
        add_common(sub);
        sub->add_option("--machine", opt.machine_spec,
                        "machine file or builtin:{free,erasure,erasure_p+,add1,interf1,"
                        "interf2,interf2_broken,cycle}")
            ->required();
    };
    auto add_state = [&](CLI::App* sub) {
        sub->add_option("--state", opt.state_spec,
                        "state file or mini-spec (basis:, markers:, erasure_bt:, "
                        "erasure_bt_finite:, interf1:, interf2, interf2chain:)")
            ->required();
    };

    CLI::App* validate = app.add_subcommand("validate", "machine sanity and path-generation "
                                                        "properties");
    add_machine(validate);
    validate->add_flag("--require-dpg", opt.require_dpg,
                       "fail unless the machine is distinct path generating in the "
                       "computation basis");

    CLI::App* path = app.add_subcommand("path", "generate and verify a distinct path");
    add_machine(path);
    add_state(path);
    path->add_option("--steps", opt.steps, "forward steps");
    path->add_option("--back-steps", opt.back_steps, "backward steps");
    path->add_option("--eps-orth", opt.eps_orth, "orthogonality tolerance");
    path->add_option("--eps-terminal", opt.eps_terminal, "terminal-norm tolerance");
    path->add_option("--out", opt.out, "write the path record as JSON");

    CLI::App* isometry = app.add_subcommand("isometry", "power partial isometry probe on the "
                                                        "components of a state");
    add_machine(isometry);
    add_state(isometry);
    isometry->add_option("--n-max", opt.n_max, "highest power probed");

    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues of the Hamiltonian "
                                                        "restricted to a verified path");
    add_machine(spectrum);
    add_state(spectrum);
    spectrum->add_option("--steps", opt.steps, "forward steps");
    spectrum->add_option("--back-steps", opt.back_steps, "backward steps");
    spectrum->add_option("--K", opt.K, "Hamiltonian energy scale");

    CLI::App* evolve_cmd = app.add_subcommand("evolve", "e^{-iHt} on a window or along a path");
    add_machine(evolve_cmd);
    add_state(evolve_cmd);
    evolve_cmd->add_option("--time", opt.time, "evolution time")->required();
    evolve_cmd->add_option("--K", opt.K, "Hamiltonian energy scale");
    evolve_cmd->add_option("--method", opt.method, "window (default) or path");
    evolve_cmd->add_option("--window", opt.window_depth, "window closure depth");
    evolve_cmd->add_option("--steps", opt.steps, "forward steps (path method)");
    evolve_cmd->add_option("--back-steps", opt.back_steps, "backward steps (path method)");
    evolve_cmd->add_option("--out", opt.out, "write the evolved state as JSON");

    CLI::App* graph = app.add_subcommand("graph", "unroll the computation into a graph");
    add_machine(graph);
    add_state(graph);
    graph->add_option("--steps", opt.steps, "forward steps");
    graph->add_option("--format", opt.format, "dot (default) or json");
    graph->add_option("--out", opt.out, "output file ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (validate->parsed()) return run_validate(opt);
        if (path->parsed()) return run_path(opt);
        if (isometry->parsed()) return run_isometry(opt);
        if (spectrum->parsed()) return run_spectrum(opt);
        if (evolve_cmd->parsed()) return run_evolve(opt);
        if (graph->parsed()) return run_graph(opt);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const io::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
