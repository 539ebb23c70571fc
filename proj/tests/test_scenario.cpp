#include <cmath>

#include "doctest.h"

#include "siqr/scenario.hpp"

using namespace siqr;

namespace {

nlohmann::json const_tf(double v) {
    return {{"kind", "const"}, {"value", v}};
}

nlohmann::json seasonal_beta_doc(double alpha) {
    return nlohmann::json::parse(R"({
      "kind": "affine", "scale": )" + std::to_string(alpha) + R"(, "offset": 0.0,
      "arg": {"kind": "product", "args": [
        {"kind": "sum", "args": [
          {"kind": "const", "value": 1.0},
          {"kind": "affine", "scale": -0.7, "offset": 0.0,
           "arg": {"kind": "sin", "amp": 1.0, "omega": 0.3, "phase": 0.0}}]},
        {"kind": "sum", "args": [
          {"kind": "const", "value": 2.0},
          {"kind": "affine", "scale": -1.0, "offset": 0.0,
           "arg": {"kind": "expdecay", "rate": 1.0}}]}]}
    })");
}

nlohmann::json section9_doc(double alpha) {
    nlohmann::json doc;
    doc["name"] = "seasonal_ma";
    doc["kind"] = "general";
    doc["params"] = {{"Lambda", const_tf(0.001)}, {"d", const_tf(0.035)},
                     {"gamma", const_tf(0.4)},    {"sigma", const_tf(0.01)},
                     {"alpha1", const_tf(0.2)},   {"alpha2", const_tf(0.2)},
                     {"eps", const_tf(0.2)},      {"omega_d", 1.0},
                     {"omega_Lambda", 1.0}};
    doc["incidence"] = {{"kind", "mass_action"}, {"beta", seasonal_beta_doc(alpha)}};
    doc["initial"] = {{"S", 0.0286}, {"I", 0.01}, {"Q", 0.0}, {"R", 0.0}};
    doc["integrator"] = {{"method", "rk45"}, {"t_end", 5000.0}, {"sample_stride", 1.0}};
    doc["thresholds"] = {{"lambdas", {21.0}}};
    return doc;
}

nlohmann::json autonomous_doc(double beta) {
    nlohmann::json doc;
    doc["name"] = "autonomous_ma";
    doc["kind"] = "autonomous";
    doc["params"] = {{"Lambda", const_tf(1.0)}, {"d", const_tf(0.1)},
                     {"gamma", const_tf(0.2)},  {"sigma", const_tf(0.1)},
                     {"alpha1", const_tf(0.0)}, {"alpha2", const_tf(0.0)},
                     {"eps", const_tf(0.1)},    {"omega_d", 1.0},
                     {"omega_Lambda", 1.0}};
    doc["incidence"] = {{"kind", "mass_action"}, {"beta", const_tf(beta)}};
    doc["initial"] = {{"S", 1.0}, {"I", 1.0}, {"Q", 0.0}, {"R", 0.0}};
    doc["integrator"] = {{"method", "rk45"}, {"t_end", 5000.0}, {"sample_stride", 1.0}};
    doc["thresholds"] = {{"lambdas", {5.0}}};
    return doc;
}

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("loading the seasonal mass-action document") {
    const Scenario sc = load_scenario(section9_doc(9.0));
    CHECK(sc.params.Lambda(0.0) == 0.001);
    CHECK(sc.params.d(0.0) == 0.035);
    CHECK(sc.params.gamma(0.0) == 0.4);
    CHECK(sc.params.sigma(0.0) == 0.01);
    CHECK(sc.params.alpha1(0.0) == 0.2);
    CHECK(sc.initial.S == 0.0286);
    CHECK(sc.kind == ScenarioKind::General);
    const TimeFunction* beta = incidence_beta(sc.incidence);
    REQUIRE(beta != nullptr);
    CHECK((*beta)(0.0) == doctest::Approx(9.0).epsilon(1e-14));
}

TEST_CASE("a zero death rate fails the windowed positivity condition") {
    auto doc = section9_doc(9.0);
    doc["params"]["d"] = const_tf(0.0);
    try {
        load_scenario(doc);
        FAIL("expected ScenarioValidationError");
    } catch (const ScenarioValidationError& e) {
        REQUIRE_FALSE(e.violations().empty());
        bool found = false;
        for (const auto& v : e.violations()) {
            found = found || v.find("d^-") != std::string::npos;
        }
        CHECK(found);
    }
}

TEST_CASE("a dipping-negative coefficient fails with a witness") {
    auto doc = section9_doc(9.0);
    doc["params"]["gamma"] = nlohmann::json::parse(R"({
        "kind": "sum", "args": [
          {"kind": "const", "value": 0.1},
          {"kind": "affine", "scale": -0.2, "offset": 0.0,
           "arg": {"kind": "sin", "amp": 1.0, "omega": 0.5, "phase": 0.0}}]})");
    try {
        load_scenario(doc);
        FAIL("expected ScenarioValidationError");
    } catch (const ScenarioValidationError& e) {
        bool found = false;
        for (const auto& v : e.violations()) {
            found = found || (v.find("gamma") != std::string::npos &&
                              v.find("t=") != std::string::npos);
        }
        CHECK(found);
    }
}

TEST_CASE("missing fields surface their JSON path") {
    auto doc = section9_doc(9.0);
    doc["params"].erase("d");
    try {
        load_scenario(doc);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "params.d");
    }
}

TEST_CASE("a strongly supercritical autonomous run agrees with its trajectory") {
    const Scenario sc = load_scenario(autonomous_doc(0.5));
    const RunResult result = run(sc);
    REQUIRE(result.reports.size() == 1);
    CHECK(result.reports.front().specialization == "autonomous");
    REQUIRE(result.reports.front().ratio_form.has_value());
    CHECK(result.reports.front().ratio_form->first == doctest::Approx(12.5).epsilon(1e-12));
    CHECK(result.threshold_verdict == Verdict::Permanent);
    CHECK(result.cross.trajectory_verdict == TrajectoryVerdict::Persistent);
    CHECK(result.cross.agreement);

    // the trajectory should settle at the endemic equilibrium
    const State& last = result.trajectory.final_state();
    CHECK(last.S == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(last.I == doctest::Approx(2.3).epsilon(1e-6));
}

TEST_CASE("a subcritical autonomous run agrees with its trajectory") {
    const Scenario sc = load_scenario(autonomous_doc(0.02)); // R_aut = 0.5
    const RunResult result = run(sc);
    REQUIRE(result.reports.front().ratio_form.has_value());
    CHECK(result.reports.front().ratio_form->first == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(result.threshold_verdict == Verdict::Extinct);
    CHECK(result.cross.trajectory_verdict == TrajectoryVerdict::Extinct);
    CHECK(result.cross.agreement);
}

TEST_CASE("zero initial infectives go extinct regardless of the thresholds") {
    auto doc = autonomous_doc(0.5);
    doc["initial"]["I"] = 0.0;
    const Scenario sc = load_scenario(doc);
    const RunResult result = run(sc);
    CHECK(result.threshold_verdict == Verdict::Permanent);
    CHECK(result.cross.trajectory_verdict == TrajectoryVerdict::Extinct);
    // the disease-free orbit sits outside the permanence theorem's
    // hypotheses, and the flag records the mismatch honestly
    CHECK_FALSE(result.cross.agreement);
}

TEST_CASE("asymptotically autonomous scenarios classify via the limit system") {
    auto doc = autonomous_doc(0.5);
    doc["name"] = "asym";
    doc["kind"] = "asymptotically_autonomous";
    // beta(t) = 0.5 + 0.5 e^{-0.1 t} -> 0.5
    doc["incidence"] = {{"kind", "mass_action"},
                        {"beta", nlohmann::json::parse(R"({
        "kind": "sum", "args": [
          {"kind": "const", "value": 0.5},
          {"kind": "affine", "scale": 0.5, "offset": 0.0,
           "arg": {"kind": "expdecay", "rate": 0.1}}]})")}};
    doc["limit_params"] = doc["params"];
    doc["limit_incidence"] = {{"kind", "mass_action"}, {"beta", const_tf(0.5)}};
    const Scenario sc = load_scenario(doc);
    const RunResult result = run(sc);
    CHECK(result.reports.front().specialization == "autonomous");
    CHECK(result.reports.front().reason.find("limit system") != std::string::npos);
    CHECK(result.threshold_verdict == Verdict::Permanent);
    CHECK(result.cross.agreement);

    // without the declared limit system the document is rejected
    doc.erase("limit_params");
    doc.erase("limit_incidence");
    CHECK_THROWS_AS(load_scenario(doc), ScenarioValidationError);
}

TEST_CASE("periodic scenarios use the period-averaged thresholds") {
    const double T = 2.0 * M_PI / 0.3;
    auto doc = autonomous_doc(0.4);
    doc["name"] = "periodic_ma";
    doc["kind"] = "periodic";
    doc["period"] = T;
    doc["incidence"] = {{"kind", "mass_action"},
                        {"beta", nlohmann::json::parse(R"({
        "kind": "sum", "args": [
          {"kind": "const", "value": 0.4},
          {"kind": "affine", "scale": 0.2, "offset": 0.0,
           "arg": {"kind": "sin", "amp": 1.0, "omega": 0.3, "phase": 0.0}}]})")}};
    const Scenario sc = load_scenario(doc);
    const RunResult result = run(sc);
    REQUIRE(result.reports.size() == 1);
    CHECK(result.reports.front().specialization == "periodic");
    REQUIRE(result.reports.front().ratio_form.has_value());
    CHECK(result.reports.front().ratio_form->first == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(result.threshold_verdict == Verdict::Permanent);
    CHECK(result.cross.trajectory_verdict == TrajectoryVerdict::Persistent);
    CHECK(result.cross.agreement);
}

TEST_CASE("the seasonal suite reports the published constants as metadata") {
    const PaperSuite suite = paper_suite();
    REQUIRE(suite.rows.size() == 4);
    CHECK(suite.rows[0].paper_reported == 1.10599);
    CHECK(suite.rows[1].paper_reported == 0.98310);
    CHECK(suite.rows[2].paper_reported == 1.07527);
    CHECK(suite.rows[3].paper_reported == 0.989247);
    CHECK(suite.rows[0].name == "ma_alpha9");

    // internal coherence: every row's verdict pair is consistent
    for (const auto& row : suite.rows) {
        CHECK(row.agreement);
    }
    // the recorded initial state is part of the table
    const std::string csv = suite.comparison_csv();
    CHECK(csv.find("S0,I0,Q0,R0") != std::string::npos);
    CHECK(csv.find("0.0286") != std::string::npos);
}

TEST_CASE("sweeping the contact-rate scale is monotone in both exponents") {
    const auto doc = section9_doc(9.0);
    const auto rows = sweep(doc, "incidence.beta.scale", {12.0, 4.0, 8.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].value == 4.0); // ordered by value
    CHECK(rows[1].value == 8.0);
    CHECK(rows[2].value == 12.0);
    CHECK(rows[0].r_p <= rows[1].r_p);
    CHECK(rows[1].r_p <= rows[2].r_p);
    CHECK(rows[0].r_e <= rows[1].r_e);
    CHECK(rows[1].r_e <= rows[2].r_e);
}

TEST_CASE("sweeping the window length of an autonomous scenario scales linearly") {
    const auto doc = autonomous_doc(0.5);
    const auto rows = sweep(doc, "thresholds.lambdas.0", {1.0, 5.0, 21.0});
    REQUIRE(rows.size() == 3);
    const double rate = rows[0].r_p / rows[0].value;
    for (const auto& row : rows) {
        CHECK(std::abs(row.r_p / row.value - rate) < 1e-8);
        CHECK(row.verdict == Verdict::Permanent);
    }
}

TEST_CASE("an empty sweep yields an empty table") {
    CHECK(sweep(autonomous_doc(0.5), "incidence.beta.value", {}).empty());
}

TEST_CASE("sweep rejects unresolvable or non-scalar paths") {
    const auto doc = autonomous_doc(0.5);
    CHECK_THROWS_AS(sweep(doc, "incidence.nope", {1.0}), SchemaError);
    CHECK_THROWS_AS(sweep(doc, "incidence.beta", {1.0}), SchemaError);
}

TEST_CASE("suite determinism: two invocations produce identical tables") {
    const std::string a = paper_suite().comparison_csv();
    const std::string b = paper_suite().comparison_csv();
    CHECK(a == b);
}

} // TEST_SUITE
