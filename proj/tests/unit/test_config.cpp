#include "hris/config.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace hris;
using nlohmann::json;

namespace {

bool mentions(const ConfigError& e, const std::string& field)
{
    return std::any_of(e.errors().begin(), e.errors().end(),
                       [&](const std::string& s) { return s.find(field) != std::string::npos; });
}

} // namespace

TEST_CASE("defaults carry the published parameters")
{
    const json d = default_config();
    CHECK(d["env"]["topology"]["antennas"] == 2);
    CHECK(d["env"]["topology"]["su_receivers"] == 2);
    CHECK(d["env"]["topology"]["ris_elements"] == 4);
    CHECK(d["env"]["topology"]["pu_receivers"] == 2);
    CHECK(d["env"]["cascade"]["su_to_ris"] == 4);
    CHECK(d["env"]["cascade"]["ris_to_su"] == 4);
    CHECK(d["env"]["cascade"]["su_to_pu"] == 1);
    CHECK(d["env"]["penalty_weight"] == 0.1);
    CHECK(d["env"]["power"]["interference_db"] == 10.0);
    CHECK(d["env"]["power"]["max_power_db"] == 10.0);
    CHECK(d["env"]["harvest"]["efficiency"] == 0.9);
    CHECK(d["env"]["harvest"]["beacon_power_w"] == 10.0);
    CHECK(d["env"]["harvest"]["threshold_j"] == 50.0);
    CHECK(d["env"]["harvest"]["duration_s"] == 1.0);
    CHECK(d["env"]["active"]["alpha_min"] == 1.2);
    CHECK(d["env"]["active"]["alpha_max"] == 2.0);
    CHECK(d["env"]["passive"]["beta_min"] == 0.6);
    CHECK(d["env"]["passive"]["exponent"] == 1.5);
    CHECK(d["env"]["passive"]["offset"] == 0.0);
    CHECK(d["agent"]["sac"]["entropy_alpha"] == 0.2);
    CHECK(d["agent"]["sac"]["lr"] == 0.001);
    CHECK(d["agent"]["sac"]["batch"] == 16);
    CHECK(d["agent"]["sac"]["gamma"] == 1.0);
    CHECK(d["agent"]["baseline"]["gamma"] == 1.0);
    CHECK(d["defense"]["r_min"] == -2.0);
    CHECK(d["defense"]["r_max"] == 2.0);
    CHECK(d["defense"]["chi"] == 2.0);
    CHECK(d["defense"]["warmup_count"] == 10);
    CHECK(d["seeds"].size() == 10);
}

TEST_CASE("parsing converts dB and derives E_max")
{
    const ExperimentSpec s = parse_spec(json::object());
    CHECK(s.env.power.max_power == doctest::Approx(10.0));
    CHECK(s.env.power.interference == doctest::Approx(10.0));
    CHECK(s.env.active.e_max == doctest::Approx(9.0));
    CHECK(s.agent == AgentKind::sac);
    CHECK(!s.attack);
    CHECK(!s.defense);
    CHECK(s.total_steps == 20000);

    const ExperimentSpec t = parse_spec(json::parse(R"({"env": {"power": {"max_power_db": 1.0}}})"));
    CHECK(t.env.power.max_power == doctest::Approx(std::pow(10.0, 0.1)));
    const ExperimentSpec u = parse_spec(json::parse(R"({"env": {"active": {"e_max_j": 20.0}}})"));
    CHECK(u.env.active.e_max == 20.0);
}

TEST_CASE("unknown keys are rejected")
{
    try {
        parse_spec(json::parse(R"({"env": {"powr": {}}})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "/env/powr"));
    }
}

TEST_CASE("every offending field is listed")
{
    try {
        parse_spec(json::parse(R"({"env": {"penalty_weight": -1, "topology": {"antennas": 0}},
                                   "agent": {"sac": {"gamma": 0.0}}, "seeds": [], "total_steps": 0})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "/env/penalty_weight"));
        CHECK(mentions(e, "/env/topology"));
        CHECK(mentions(e, "/agent/sac"));
        CHECK(mentions(e, "/seeds"));
        CHECK(mentions(e, "/total_steps"));
        CHECK(e.errors().size() >= 5);
    }
    CHECK_THROWS_AS(parse_spec(json::parse(R"({"agent": {"kind": "ppo"}})")), ConfigError);
    CHECK_THROWS_AS(parse_spec(json::parse(R"({"env": {"mode": {"kind": "semi"}}})")), ConfigError);
    CHECK_THROWS_AS(parse_spec(json::parse(R"({"sweep": [{"path": "/env/nothing", "values": [1]}]})")), ConfigError);
}

TEST_CASE("sweeps expand to a named cartesian product")
{
    const ExperimentSpec s = parse_spec(json::parse(R"({
        "name": "tau",
        "sweep": [{"path": "/env/harvest/threshold_j", "values": [10, 40]},
                  {"path": "/agent/kind", "values": ["sac", "random"]}]})"));
    const auto points = expand_sweep(s);
    REQUIRE(points.size() == 4);
    CHECK(points[0].name == "tau__threshold_j=10__kind=\"sac\"");
    CHECK(points[3].name == "tau__threshold_j=40__kind=\"random\"");
    CHECK(points[0].env.harvest.threshold == 10.0);
    CHECK(points[3].env.harvest.threshold == 40.0);
    CHECK(points[3].agent == AgentKind::random);
    for (const auto& p : points) CHECK(p.sweep.empty());
    CHECK(expand_sweep(parse_spec(json::object())).size() == 1);
}

TEST_CASE("spec files may carry comments")
{
    const auto path = std::filesystem::temp_directory_path() / "hris_config_comments.json";
    {
        std::ofstream out(path);
        out << "// comment\n{\n  \"name\": \"c\", /* inline */ \"total_steps\": 5\n}\n";
    }
    const ExperimentSpec s = load_spec(path.string());
    CHECK(s.name == "c");
    CHECK(s.total_steps == 5);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), ConfigError);
}

TEST_CASE("attack and defense sections")
{
    const ExperimentSpec s = parse_spec(json::parse(R"({
        "attack": {"enabled": true, "kind": "scale", "scale": 0.25},
        "defense": {"enabled": true, "chi": 3.0}})"));
    REQUIRE(s.attack);
    REQUIRE(s.defense);
    CHECK(s.attack->kind == AttackKind::scale);
    CHECK(s.attack->scale == 0.25);
    CHECK(s.defense->chi == 3.0);
    CHECK_THROWS_AS(parse_spec(json::parse(R"({"attack": {"enabled": true, "kind": "scale", "scale": 2}})")),
                    ConfigError);
}

TEST_CASE("overrides re-parse")
{
    const ExperimentSpec s = parse_spec(json::object());
    const ExperimentSpec t = with_overrides(s, json::parse(R"({"env": {"mode": {"kind": "passive"}}})"));
    CHECK(t.env.mode.kind == RisModeKind::passive);
    CHECK(s.env.mode.kind == RisModeKind::dynamic_hybrid);
}
