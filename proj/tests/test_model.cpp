#include <array>
#include <cmath>
#include <random>

#include "doctest.h"

#include "siqr/model.hpp"
#include "test_helpers.hpp"

using namespace siqr;

namespace {

ParameterSet reference_params() {
    ParameterSet p;
    p.Lambda = TimeFunction::constant(1.0);
    p.d = TimeFunction::constant(0.1);
    p.gamma = TimeFunction::constant(0.2);
    p.sigma = TimeFunction::constant(0.1);
    p.alpha1 = TimeFunction::constant(0.0);
    p.alpha2 = TimeFunction::constant(0.0);
    p.eps = TimeFunction::constant(0.1);
    return p;
}

// Endemic equilibrium of the constant-coefficient mass-action system,
// solved from the stationarity conditions:
//   S* = (gamma+sigma+d+alpha1)/beta,      I* = Lambda/(gamma+sigma+d+alpha1) - d/beta,
//   Q* = sigma I*/(d+alpha2+eps),          R* = (gamma I* + eps Q*)/d
State endemic_equilibrium(const ParameterSet& p, double beta) {
    const double rem = p.removal_sum(0.0);
    const double d = p.d(0.0);
    State s;
    s.S = rem / beta;
    s.I = p.Lambda(0.0) / rem - d / beta;
    s.Q = p.sigma(0.0) * s.I / (d + p.alpha2(0.0) + p.eps(0.0));
    s.R = (p.gamma(0.0) * s.I + p.eps(0.0) * s.Q) / d;
    return s;
}

StateExpr psi_scaled_S(double scale) {
    return StateExpr::affine(scale, 0.0, StateExpr::var(0, "S"));
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("rhs at the disease-free equilibrium is zero") {
    const auto p = reference_params();
    const IncidenceKind inc = MassAction{TimeFunction::constant(0.5)};
    const State dfe{10.0, 0.0, 0.0, 0.0, 0.0};
    const auto d = rhs(p, inc, dfe);
    CHECK(d.dS == 0.0);
    CHECK(d.dI == 0.0);
    CHECK(d.dQ == 0.0);
    CHECK(d.dR == 0.0);
}

TEST_CASE("rhs matches a hand evaluation") {
    const auto p = reference_params();
    const IncidenceKind inc = MassAction{TimeFunction::constant(0.5)};
    const State s{1.0, 1.0, 0.0, 0.0, 0.0};
    const auto d = rhs(p, inc, s);
    CHECK(d.dS == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(d.dI == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(d.dQ == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(d.dR == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("rhs vanishes at the endemic equilibrium") {
    const auto p = reference_params();
    const double beta = 0.5;
    const IncidenceKind inc = MassAction{TimeFunction::constant(beta)};
    const State eq = endemic_equilibrium(p, beta);
    CHECK(eq.S == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(eq.I == doctest::Approx(2.3).epsilon(1e-12));
    CHECK(eq.Q == doctest::Approx(1.15).epsilon(1e-12));
    CHECK(eq.R == doctest::Approx(5.75).epsilon(1e-12));
    const auto d = rhs(p, inc, eq);
    for (double v : {d.dS, d.dI, d.dQ, d.dR}) {
        CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("incidence formulas") {
    State s;
    s.S = 3.0;
    s.I = 0.5;
    CHECK(incidence_eval(MassAction{TimeFunction::constant(2.0)}, 0.0, s) ==
          doctest::Approx(3.0).epsilon(1e-15));

    // continuous extension at the origin
    CHECK(incidence_eval(StandardIncidence{TimeFunction::constant(1.0)}, 0.0, State{}) == 0.0);
    CHECK(incidence_eval(QuarantineAdjustedIncidence{TimeFunction::constant(1.0)}, 0.0,
                         State{}) == 0.0);

    // R is excluded from the quarantine-adjusted denominator
    State qa{2.0, 1.0, 1.0, 100.0, 0.0};
    CHECK(incidence_eval(QuarantineAdjustedIncidence{TimeFunction::constant(1.0)}, 0.0, qa) ==
          doctest::Approx(0.5).epsilon(1e-15));

    State std_state{2.0, 1.0, 1.0, 0.0, 0.0};
    CHECK(incidence_eval(StandardIncidence{TimeFunction::constant(1.0)}, 0.0, std_state) ==
          doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("incidence is zero without susceptibles or infectives") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    const IncidenceKind kinds[] = {
        IncidenceKind{MassAction{TimeFunction::constant(2.0)}},
        IncidenceKind{StandardIncidence{TimeFunction::constant(2.0)}},
        IncidenceKind{QuarantineAdjustedIncidence{TimeFunction::constant(2.0)}},
        IncidenceKind{PsiG{psi_scaled_S(1.0),
                           StateExpr::pow(StateExpr::sum({StateExpr::constant(1.0),
                                                          StateExpr::var(0, "I")}),
                                          -1.0),
                           1.0, 1.0}},
    };
    for (const auto& inc : kinds) {
        for (int i = 0; i < 20; ++i) {
            State s{0.0, u(rng), u(rng), u(rng), u(rng)};
            CHECK(incidence_eval(inc, s.t, s) == 0.0);
            s.S = u(rng);
            s.I = 0.0;
            CHECK(incidence_eval(inc, s.t, s) == 0.0);
        }
    }
}

TEST_CASE("scaling degree of the ratio incidences") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.01, 20.0);
    const IncidenceKind std_inc = StandardIncidence{TimeFunction::constant(0.7)};
    const IncidenceKind qa_inc = QuarantineAdjustedIncidence{TimeFunction::constant(0.7)};
    for (int i = 0; i < 50; ++i) {
        const State s{u(rng), u(rng), u(rng), u(rng), 0.0};
        const State s2{2.0 * s.S, 2.0 * s.I, 2.0 * s.Q, 2.0 * s.R, 0.0};
        for (const auto* inc : {&std_inc, &qa_inc}) {
            const double phi = incidence_eval(*inc, 0.0, s);
            const double phi2 = incidence_eval(*inc, 0.0, s2);
            CHECK(phi2 == doctest::Approx(2.0 * phi).epsilon(1e-12));
        }
    }
}

TEST_CASE("linearized incidence per kind") {
    const auto lin_ma = linearized_incidence(MassAction{TimeFunction::constant(0.5)}, 0.0, 10.0);
    CHECK(lin_ma.lower == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(lin_ma.upper == doctest::Approx(5.0).epsilon(1e-14));

    const auto lin_std =
        linearized_incidence(StandardIncidence{TimeFunction::constant(0.8)}, 0.0, 0.02857);
    CHECK(lin_std.lower == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(lin_std.upper == doctest::Approx(0.8).epsilon(1e-14));

    // psi = S, g = 1/(1+I): g(0+) = 1, so the linearization is psi(x) * 1
    const PsiG declared{
        psi_scaled_S(1.0),
        StateExpr::pow(StateExpr::sum({StateExpr::constant(1.0), StateExpr::var(0, "I")}), -1.0),
        1.0, 1.0};
    const auto lin_psig = linearized_incidence(declared, 0.0, 2.0);
    CHECK(lin_psig.lower == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(lin_psig.upper == doctest::Approx(2.0).epsilon(1e-14));

    // same incidence without declared limits: the numerical probe converges
    PsiG probed = declared;
    probed.g_liminf0.reset();
    probed.g_limsup0.reset();
    const auto lin_probe = linearized_incidence(probed, 0.0, 2.0);
    CHECK(lin_probe.lower == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(lin_probe.upper == lin_probe.lower);

    // divergent g: no declared limits and no convergent probe
    const PsiG divergent{psi_scaled_S(1.0), StateExpr::pow(StateExpr::var(0, "I"), -0.5),
                         std::nullopt, std::nullopt};
    CHECK_THROWS_AS(linearized_incidence(divergent, 0.0, 2.0), LinearizationError);
}

TEST_CASE("a misconfigured psi factor is an error naming the factor") {
    // sqrt(S - 5) is NaN for S < 5
    const PsiG inc{StateExpr::pow(StateExpr::affine(1.0, -5.0, StateExpr::var(0, "S")), 0.5),
                   StateExpr::constant(1.0), 1.0, 1.0};
    const State s{2.0, 1.0, 0.0, 0.0, 0.0};
    try {
        incidence_eval(inc, 0.0, s);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(std::string(e.what()).find("psi") != std::string::npos);
    }

    const PsiG bad_g{StateExpr::var(0, "S"),
                     StateExpr::pow(StateExpr::affine(1.0, -5.0, StateExpr::var(0, "I")), 0.5),
                     1.0, 1.0};
    try {
        incidence_eval(bad_g, 0.0, s);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(std::string(e.what()).find("g ") != std::string::npos);
    }
}

TEST_CASE("unknown expression variables are schema errors") {
    const auto doc = nlohmann::json::parse(R"({"kind": "var", "name": "X"})");
    CHECK_THROWS_AS(StateExpr::parse(doc, psi_variables(), "incidence.psi"), SchemaError);
}

TEST_CASE("linearized lower never exceeds upper") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.1, 15.0);
    std::uniform_real_distribution<double> lim(0.0, 3.0);
    for (int i = 0; i < 40; ++i) {
        const double lo = lim(rng);
        const double hi = lo + lim(rng);
        const PsiG inc{psi_scaled_S(u(rng)),
                       StateExpr::pow(
                           StateExpr::sum({StateExpr::constant(1.0), StateExpr::var(0, "I")}),
                           -1.0),
                       lo, hi};
        const auto lin = linearized_incidence(inc, 0.0, u(rng));
        CHECK(lin.lower <= lin.upper);
    }
    const auto lin = linearized_incidence(
        MassAction{TimeFunction::sum({TimeFunction::constant(1.0),
                                      TimeFunction::sinusoid(0.3, 0.5, 0.0)})},
        2.0, 4.0);
    CHECK(lin.lower == lin.upper);
}

TEST_CASE("disease-free states are invariant") {
    const auto p = reference_params();
    const IncidenceKind inc = MassAction{TimeFunction::constant(0.5)};
    const State s{7.0, 0.0, 0.0, 3.0, 12.0};
    const auto d = rhs(p, inc, s);
    CHECK(d.dI == 0.0);
    CHECK(d.dQ == 0.0);
}

TEST_CASE("mass conservation identity") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 8.0);
    for (int i = 0; i < 40; ++i) {
        ParameterSet p;
        p.Lambda = testing::random_nonnegative_tree(rng);
        p.d = testing::random_nonnegative_tree(rng);
        p.gamma = testing::random_nonnegative_tree(rng);
        p.sigma = testing::random_nonnegative_tree(rng);
        p.alpha1 = testing::random_nonnegative_tree(rng);
        p.alpha2 = testing::random_nonnegative_tree(rng);
        p.eps = testing::random_nonnegative_tree(rng);
        const IncidenceKind inc = MassAction{testing::random_nonnegative_tree(rng)};
        const State s{u(rng), u(rng), u(rng), u(rng), u(rng)};
        const auto d = rhs(p, inc, s);
        const double lhs = d.dS + d.dI + d.dQ + d.dR;
        const double rhs_val = p.Lambda(s.t) - p.d(s.t) * s.total() -
                               p.alpha1(s.t) * s.I - p.alpha2(s.t) * s.Q;
        CHECK(std::abs(lhs - rhs_val) <= 1e-12 * std::max(1.0, std::abs(rhs_val)));
    }
}

TEST_CASE("hypothesis checks on a bounded mass-action incidence") {
    const IncidenceKind inc = MassAction{TimeFunction::constant(0.5)};
    const auto report = check_hypotheses(inc, 0.5, 10.0);
    CHECK(report.all_pass());
    CHECK(report.lipschitz_K == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(report.bound_N == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("hypothesis checks flag a divergent g at 0+") {
    const PsiG inc{psi_scaled_S(1.0), StateExpr::pow(StateExpr::var(0, "I"), -0.5),
                   std::nullopt, std::nullopt};
    const auto report = check_hypotheses(inc, 0.5, 10.0);
    CHECK_FALSE(report.h4.pass);
    REQUIRE(report.h4.witness.has_value());
    CHECK(report.h4.witness->detail.find("limsup") != std::string::npos);
}

TEST_CASE("hypothesis checks pass for a constant g") {
    const PsiG inc{psi_scaled_S(0.3), StateExpr::constant(1.0), 1.0, 1.0};
    const auto report = check_hypotheses(inc, 0.5, 10.0);
    CHECK(report.all_pass());
}

TEST_CASE("failed verdicts always carry witnesses") {
    // psi depending on R violates H4 (phi/z can exceed the limsup at 0+,
    // which is evaluated at R = 0).
    const PsiG inc{StateExpr::sum({StateExpr::var(0, "S"), StateExpr::var(2, "R")}),
                   StateExpr::constant(1.0), 1.0, 1.0};
    const auto report = check_hypotheses(inc, 0.5, 10.0);
    CHECK_FALSE(report.h4.pass);
    REQUIRE(report.h4.witness.has_value());
    CHECK(report.h4.witness->y > 0.0);
}

TEST_CASE("parameter validation catches the documented failure modes") {
    auto p = reference_params();
    CHECK(p.validate(1300.0).empty());

    p.d = TimeFunction::constant(0.0);
    auto violations = p.validate(1300.0);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations.front().find("d^-") != std::string::npos);

    p = reference_params();
    p.gamma = TimeFunction::sum(
        {TimeFunction::constant(0.1),
         TimeFunction::affine(-0.2, 0.0, TimeFunction::sinusoid(1.0, 0.5, 0.0))});
    violations = p.validate(1300.0);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations.front().find("gamma") != std::string::npos);
}

TEST_CASE("incidence serialization round trip and field names") {
    const IncidenceKind ma = MassAction{TimeFunction::constant(2.0)};
    const auto j = incidence_to_json(ma);
    CHECK(j.at("kind") == "mass_action");
    CHECK(j.at("beta").at("kind") == "const");

    const auto back = incidence_from_json(j);
    CHECK(std::holds_alternative<MassAction>(back));

    const PsiG psig{psi_scaled_S(1.0),
                    StateExpr::pow(StateExpr::sum({StateExpr::constant(1.0),
                                                   StateExpr::var(0, "I")}),
                                   -1.0),
                    1.0, 1.0};
    const auto jp = incidence_to_json(psig);
    CHECK(jp.at("kind") == "psi_g");
    CHECK(jp.at("g_liminf0") == 1.0);
    CHECK(jp.at("g_limsup0") == 1.0);
    const auto back_pg = incidence_from_json(jp);
    REQUIRE(std::holds_alternative<PsiG>(back_pg));
    State probe{2.0, 3.0, 0.5, 1.0, 0.0};
    CHECK(incidence_eval(back_pg, 0.0, probe) ==
          doctest::Approx(incidence_eval(psig, 0.0, probe)).epsilon(1e-15));

    CHECK_THROWS_AS(incidence_from_json(nlohmann::json{{"kind", "unknown"}}), SchemaError);
}

} // TEST_SUITE
