#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracle.hpp"
#include "qtm/io.hpp"
#include "qtm/machines.hpp"

using namespace qtm;
using nlohmann::json;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / name;
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("machines round-trip through JSON") {
    std::mt19937 rng(41);
    for (const auto& T : {machines::erasure(), machines::add1(), machines::interferometer2()}) {
        const json j = io::machine_to_json(T);
        const StepOperator back = io::machine_from_json(j);
        CHECK(back.name() == T.name());
        CHECK(back.head_dim() == T.head_dim());
        CHECK(back.qudit_dim() == T.qudit_dim());
        REQUIRE(back.terms().size() == T.terms().size());
        for (std::size_t i = 0; i < T.terms().size(); ++i)
            CHECK(back.terms()[i].label == T.terms()[i].label);

        // identical action on random states
        for (int trial = 0; trial < 5; ++trial) {
            WaveState psi = oracle::random_state(T.head_dim(), T.qudit_dim(), rng);
            CHECK(superpose({{Complex(1.0), apply(T, psi)}, {Complex(-1.0), apply(back, psi)}})
                      .norm() < 1e-15);
        }
    }
}

TEST_CASE("states round-trip through JSON exactly") {
    std::mt19937 rng(43);
    WaveState psi = oracle::random_state(4, 3, rng, 10);
    WaveState back = io::state_from_json(io::state_to_json(psi), 4, 3);
    REQUIRE(back.size() == psi.size());
    for (const auto& [b, amp] : psi.terms()) CHECK(back.amplitude(b) == amp);
}

TEST_CASE("level-0 lattice entries in a state file are normalized silently") {
    const json j = json::parse(R"({"components":[
        {"amp":[1.0,0.0],"head_level":0,"head_pos":2,"lattice":{"3":1,"5":0}}]})");
    WaveState psi = io::state_from_json(j, 1, 2);
    REQUIRE(psi.size() == 1);
    const auto& b = psi.terms().begin()->first;
    CHECK(b.lattice.entries().size() == 1);
    CHECK(b.lattice.level_at(3) == 1);
}

TEST_CASE("malformed files raise parse errors") {
    CHECK_THROWS_AS(io::machine_from_json(json::parse(R"({"name":"x"})")), io::ParseError);
    CHECK_THROWS_AS(io::machine_from_json(json::parse(
                        R"({"name":"x","head_dim":1,"qudit_dim":2,"terms":[{"gamma":1.0}]})")),
                    io::ParseError);
    CHECK_THROWS_AS(io::state_from_json(json::parse(R"({})"), 1, 2), io::ParseError);
    CHECK_THROWS_AS(io::state_from_json(json::parse(R"({"components":[
        {"amp":1.0,"head_level":0,"head_pos":0,"lattice":{}}]})"),
                                        1, 2),
                    io::ParseError);
    CHECK_THROWS_AS(io::state_from_json(json::parse(R"({"components":[
        {"amp":[1.0,0.0],"head_level":0,"head_pos":0,"lattice":{"x":1}}]})"),
                                        1, 2),
                    io::ParseError);
    CHECK_THROWS_AS(io::load_json_file("/nonexistent/qtm.json"), io::ParseError);

    // wrong matrix shape
    json m = io::machine_to_json(machines::erasure());
    m["terms"][0]["qubit"] = json::array({json::array({json::array({1.0, 0.0})})});
    CHECK_THROWS_AS(io::machine_from_json(m), io::ParseError);
}

TEST_CASE("machine and state files load from disk") {
    TempFile mf("qtm_test_machine.json", io::machine_to_json(machines::erasure()).dump());
    StepOperator T = io::load_machine(mf.path.string());
    CHECK(T.name() == "erasure");

    TempFile sf("qtm_test_state.json",
                io::state_to_json(machines::erasure_bt_state(0, 3)).dump());
    WaveState psi = io::load_state(sf.path.string(), T.head_dim(), T.qudit_dim());
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    CHECK(superpose({{Complex(1.0), psi}, {Complex(-1.0), machines::erasure_bt_state(0, 3)}})
              .norm() < 1e-12);
}

TEST_CASE("report serializers carry the analysis fields") {
    auto T = machines::erasure();
    auto path = generate_path(T, machines::erasure_bt_state_finite(2, 2, 4), 10, 10);
    auto rep = verify_distinct_path(T, path);

    const json pj = io::path_to_json(path);
    CHECK(pj["classification"] == "finite");
    CHECK(pj["verified"] == true);
    CHECK(pj["states"].size() == 3);
    // the seed sits on the left wall, so the path starts at index 0
    CHECK(pj["states"][0]["index"] == 0);
    CHECK(pj["states"][2]["index"] == 2);

    const json rj = io::dpg_report_to_json(rep);
    CHECK(rj["pass"] == true);
    CHECK(rj["orthogonal"] == true);

    const json ej = io::eigensystem_to_json(eigensystem(path_hamiltonian(path, 1.0)));
    CHECK(ej["numeric_eigenvalues"].size() == 3);
    CHECK(ej["reported_formula_matches"] == false);

    auto g = build_graph(machines::interferometer1(), machines::interferometer1_seed(0), 6);
    const json gj = io::graph_to_json(g);
    CHECK(gj["nodes"].size() == g.nodes.size());
    CHECK(gj["edges"].size() == g.edges.size());
    int leaves = 0;
    for (const auto& n : gj["nodes"])
        if (n["leaf"] == true) ++leaves;
    CHECK(leaves >= 1);

    const json sj = io::structure_to_json(classify_structure(g));
    CHECK(sj["loops"].size() == 1);
    CHECK(sj["is_tree"] == false);
}

TEST_CASE("JSON export is deterministic") {
    auto T = machines::interferometer2();
    auto g1 = build_graph(T, machines::interferometer2_seed(), 7);
    auto g2 = build_graph(T, machines::interferometer2_seed(), 7);
    CHECK(io::graph_to_json(g1).dump(2) == io::graph_to_json(g2).dump(2));
    CHECK(io::machine_to_json(T).dump() == io::machine_to_json(machines::interferometer2()).dump());
}
