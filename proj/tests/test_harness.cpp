#include <doctest.h>

#include "affine/checks.hpp"

using namespace affine;

TEST_CASE("toml subset parser") {
    std::string text = R"(
# comment
title = "demo"
count = 42
ratio = 1.5e-2
flag = true

[table.sub]
name = "inner"
values = [1, 2, 3]
nested = [["a", "b"], ["c", "d"]]

[[items]]
id = "first"

[[items]]
id = "second"
)";
    auto v = toml::parse(text);
    CHECK(v.get_string("title") == "demo");
    CHECK(v.get_integer("count", 0) == 42);
    CHECK(v.get_number("ratio", 0) == doctest::Approx(0.015));
    CHECK(v.get_bool("flag", false));
    const toml::Value* sub = v.find("table")->find("sub");
    REQUIRE(sub);
    CHECK(sub->get_string("name") == "inner");
    CHECK(sub->find("values")->array().size() == 3);
    CHECK(sub->find("nested")->array()[1]->array()[0]->str() == "c");
    const toml::Value* items = v.find("items");
    REQUIRE(items);
    REQUIRE(items->is_array());
    CHECK(items->array().size() == 2);
    CHECK(items->array()[1]->get_string("id") == "second");

    CHECK_THROWS_AS(toml::parse("key = "), toml::ParseError);
    CHECK_THROWS_AS(toml::parse("a = 1\na = 2"), toml::ParseError);
    CHECK_THROWS_AS(toml::parse("x = [1, 2"), toml::ParseError);
    try {
        toml::parse("\n\nbad bad");
    } catch (const toml::ParseError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("scenario loading and validation") {
    // minimal flat scenario loads with zero checks
    Scenario flat = load_scenario(AFFINE_SOURCE_DIR "/scenarios/flat_d5.toml");
    CHECK(flat.sig.total_dim == 5);
    CHECK(flat.checks.empty());
    CHECK(flat.stacks.count("e") == 1);

    // the shipped electroweak fixture lists six checks
    Scenario weak = load_scenario(AFFINE_SOURCE_DIR "/scenarios/weak_em_rotation.toml");
    CHECK(weak.checks.size() == 6);
    CHECK(weak.sector.has_value());
    CHECK(weak.charges.count("rho") == 1);

    // non-invertible frame is rejected with the offending point named
    std::string bad = R"(
[space]
dim = 2
external_dim = 1
[stacks.s.outer]
kind = "diagonal"
entries = ["0.0000000000001", "1"]
)";
    CHECK_THROWS_AS(load_scenario_text(bad), ScenarioError);
    try {
        load_scenario_text(bad);
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("singular at") != std::string::npos);
    }

    // sector dimension mismatch
    std::string mismatch = R"(
[space]
dim = 6
[sector]
kind = "weak_em"
)";
    CHECK_THROWS_AS(load_scenario_text(mismatch), ScenarioError);

    // unresolved references
    std::string dangling = R"(
[space]
dim = 5
[background]
stack = "missing"
)";
    CHECK_THROWS_AS(load_scenario_text(dangling), ScenarioError);
}

TEST_CASE("glob filter") {
    CHECK(glob_match("", "anything"));
    CHECK(glob_match("*", "anything"));
    CHECK(glob_match("cpt", "cpt"));
    CHECK_FALSE(glob_match("cpt", "cpt2"));
    CHECK(glob_match("*mixing", "pmns-mixing"));
    CHECK(glob_match("p*g", "pmns-mixing"));
    CHECK_FALSE(glob_match("q*", "pmns-mixing"));
}

TEST_CASE("report serialization and exit codes") {
    std::vector<CheckReport> reports(3);
    reports[0].id = "zeta";
    reports[0].status = CheckReport::Status::pass;
    reports[0].residual = 1e-9;
    reports[0].tolerance = 1e-6;
    reports[1].id = "alpha";
    reports[1].status = CheckReport::Status::estimated;
    reports[1].estimate = 1.01;
    reports[1].stderr_value = 0.02;
    reports[2].id = "mid";
    reports[2].status = CheckReport::Status::skipped;
    reports[2].diagnostics = "precondition, violated";

    std::string json = report_json(reports, false);
    CHECK(json.find("\"report_version\": 1") != std::string::npos);
    // sorted by id
    CHECK(json.find("alpha") < json.find("mid"));
    CHECK(json.find("mid") < json.find("zeta"));
    CHECK(json.find("wall_ms") == std::string::npos);

    std::string json_t = report_json(reports, true);
    CHECK(json_t.find("wall_ms") != std::string::npos);

    std::string csv = report_csv(reports, false);
    CHECK(csv.find("id,status,residual") == 0);
    CHECK(csv.find("precondition; violated") != std::string::npos);  // comma escaped

    std::string text = report_text(reports);
    CHECK(text.find("[PASS] zeta") != std::string::npos);
    CHECK(text.find("[ESTIMATED] alpha") != std::string::npos);

    CHECK(report_exit_code(reports) == 0);
    reports[2].status = CheckReport::Status::fail;
    CHECK(report_exit_code(reports) == 1);
}

TEST_CASE("empty report list serializes to valid empty documents") {
    std::vector<CheckReport> none;
    CHECK(report_json(none).find("\"checks\": [") != std::string::npos);
    CHECK(report_csv(none).find("id,status") == 0);
    CHECK(report_text(none).empty());
    CHECK(report_exit_code(none) == 0);
}

TEST_CASE("run_checks: unknown ids fail without aborting, filters apply") {
    std::string text = R"(
[space]
dim = 5
[sampling]
seed = 3
[stacks.e.outer]
kind = "identity"

[[checks]]
id = "confinement-exclusion"
count = 10

[[checks]]
id = "no-such-check"

[[checks]]
id = "gluon-assembly"
trials = 2
)";
    Scenario sc = load_scenario_text(text);
    auto reports = run_checks(sc);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].status == CheckReport::Status::pass);
    CHECK(reports[1].status == CheckReport::Status::fail);
    CHECK(reports[1].diagnostics == "unknown check id");
    CHECK(reports[2].status == CheckReport::Status::pass);
    CHECK(report_exit_code(reports) == 1);

    auto filtered = run_checks(sc, "*exclusion");
    REQUIRE(filtered.size() == 1);
    CHECK(filtered[0].id == "confinement-exclusion");

    // parallel execution gives the same results in the same order
    auto par = run_checks(sc, "", true);
    REQUIRE(par.size() == 3);
    for (size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].id == reports[i].id);
        CHECK(par[i].status == reports[i].status);
        CHECK(par[i].residual == reports[i].residual);
    }
}

TEST_CASE("determinism: same scenario and seed give identical reports") {
    std::string text = R"TOML(
[space]
dim = 5
[sampling]
seed = 77
[stacks.G.outer]
kind = "rotations"
[[stacks.G.outer.rotations]]
plane = [4, 5]
angle = "(* 0.5 x1)"
[charges.rho]
kind = "internal_random"
seed = 4
[background]
stack = "G"
[evolution]
charge = "rho"
component = [4, 4]

[[checks]]
id = "energy-momentum"
points = 20
control_trials = 10
)TOML";
    Scenario a = load_scenario_text(text);
    Scenario b = load_scenario_text(text);
    std::string ra = report_json(run_checks(a), false);
    std::string rb = report_json(run_checks(b), false);
    CHECK(ra == rb);

    // a different seed changes sampled quantities but not the format
    b.seed = 78;
    std::string rc = report_json(run_checks(b), false);
    CHECK(rc != ra);
}

TEST_CASE("tolerance overrides flow from the scenario table") {
    std::string text = R"(
[space]
dim = 5
[sampling]
seed = 3
[tolerances]
default = 1e-6
"confinement-exclusion" = 0.5

[[checks]]
id = "confinement-exclusion"
count = 5
)";
    Scenario sc = load_scenario_text(text);
    CHECK(sc.tolerance_for("confinement-exclusion") == 0.5);
    CHECK(sc.tolerance_for("anything-else") == 1e-6);
}

TEST_CASE("singular coefficient matrix in the sector table is rejected") {
    std::string text = R"(
[space]
dim = 6
[sector]
kind = "strong"
rst = [1, 0, 0, 1, 0, 0, 0, 0, 1]
)";
    CHECK_THROWS_AS(load_scenario_text(text), ScenarioError);
}
