#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "siqr/errors.hpp"
#include "siqr/timefn.hpp"

namespace siqr {

/// One point of the SIQR system: susceptible, infective, quarantined and
/// recovered head counts at time t.
struct State {
    double S = 0.0;
    double I = 0.0;
    double Q = 0.0;
    double R = 0.0;
    double t = 0.0;

    double total() const { return S + I + Q + R; }
    bool valid() const;
};

/// Component-wise rates of change (per unit time).
struct Derivative {
    double dS = 0.0;
    double dI = 0.0;
    double dQ = 0.0;
    double dR = 0.0;
};

/// The seven time-dependent coefficients of the model plus the validation
/// windows used for the positivity conditions on d and Lambda.
struct ParameterSet {
    TimeFunction Lambda = TimeFunction::constant(1.0);  ///< recruitment
    TimeFunction d = TimeFunction::constant(0.1);       ///< natural mortality
    TimeFunction gamma = TimeFunction::constant(0.0);   ///< recovery
    TimeFunction sigma = TimeFunction::constant(0.0);   ///< removal into quarantine
    TimeFunction alpha1 = TimeFunction::constant(0.0);  ///< disease death, infectives
    TimeFunction alpha2 = TimeFunction::constant(0.0);  ///< disease death, quarantine
    TimeFunction eps = TimeFunction::constant(0.0);     ///< removal out of quarantine
    double omega_d = 1.0;
    double omega_Lambda = 1.0;

    /// gamma + sigma + d + alpha1 at time t (the removal pressure on I).
    double removal_sum(double t) const;

    /// Checks nonnegativity of all seven coefficients on a sampled grid
    /// over [0, horizon] and the windowed positivity of d and Lambda.
    /// Returns one entry per violated condition; empty means valid.
    std::vector<std::string> validate(double horizon) const;

    bool all_constant() const;
    double slowest_period() const;

    nlohmann::json to_json() const;
    static ParameterSet from_json(const nlohmann::json& j, const std::string& path = "params");
};

/// Scalar expression in a fixed list of named variables; the vocabulary
/// mirrors TimeFunction plus a power node. Used for the psi and g factors
/// of the general incidence family.
class StateExpr {
public:
    static StateExpr constant(double value);
    static StateExpr var(std::size_t index, std::string name);
    static StateExpr sum(std::vector<StateExpr> parts);
    static StateExpr product(std::vector<StateExpr> parts);
    static StateExpr affine(double scale, double offset, StateExpr child);
    static StateExpr pow(StateExpr base, double exponent);

    double eval(std::span<const double> values) const;

    nlohmann::json to_json() const;
    /// `variables` fixes the meaning and order of the value span passed to
    /// eval; unknown names in the document are schema errors.
    static StateExpr parse(const nlohmann::json& j, std::span<const std::string> variables,
                           const std::string& path = "");

private:
    struct Node;
    explicit StateExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

/// phi(t,S,R,Q,I) = beta(t) * S * I
struct MassAction {
    TimeFunction beta;
};

/// phi = beta(t) * S * I / (S+I+Q+R), extended by 0 at a zero denominator.
struct StandardIncidence {
    TimeFunction beta;
};

/// phi = beta(t) * S * I / (S+I+Q), extended by 0 at a zero denominator.
struct QuarantineAdjustedIncidence {
    TimeFunction beta;
};

/// phi = psi(S,R,Q) * g(I) * I. The limits of g at 0+ drive the
/// thresholds; they are declared by the author, not computed. When absent
/// a numerical probe is attempted and divergence is an error.
struct PsiG {
    StateExpr psi; ///< over (S, Q, R)
    StateExpr g;   ///< over (I)
    std::optional<double> g_liminf0;
    std::optional<double> g_limsup0;
};

using IncidenceKind = std::variant<MassAction, StandardIncidence, QuarantineAdjustedIncidence, PsiG>;

/// Variable order for the psi factor of PsiG.
std::span<const std::string> psi_variables();
/// Variable order for the g factor of PsiG.
std::span<const std::string> g_variables();

/// The incidence flow into the infective class. Returns 0 whenever S = 0
/// or I = 0 (the continuous extension the ratio incidences require).
double incidence_eval(const IncidenceKind& inc, double t, const State& s);

/// liminf/limsup as delta -> 0 of phi(t,x,0,0,delta)/delta.
struct LinearizedIncidence {
    double lower = 0.0;
    double upper = 0.0;
};

/// Analytic per kind; for PsiG without declared g-limits a numerical probe
/// at delta in {1e-4, 1e-6, 1e-8} is compared Richardson-style and
/// non-convergence raises LinearizationError.
LinearizedIncidence linearized_incidence(const IncidenceKind& inc, double t, double x);

/// Right-hand side of the SIQR system at state s:
///   S' = Lambda - phi - d S
///   I' = phi - (gamma+sigma+d+alpha1) I
///   Q' = sigma I - (d+alpha2+eps) Q
///   R' = gamma I + eps Q - d R
Derivative rhs(const ParameterSet& p, const IncidenceKind& inc, const State& s);

/// Sampling resolution for the hypothesis checker.
struct HypothesisGrid {
    int points = 33;        ///< samples on the primary axis of each check
    int coarse = 5;         ///< samples on secondary axes
    int time_points = 9;    ///< sampled times in [0, t_max]
    double t_max = 100.0;
    double h3_factor = 3.0; ///< the factor in inf over 0 < tau < factor*delta
};

/// Concrete point at which a hypothesis failed (or was extremal).
struct HypothesisWitness {
    double t = 0.0, x = 0.0, y = 0.0, w = 0.0, z = 0.0;
    double value = 0.0;
    std::string detail;
};

struct HypothesisCheck {
    bool pass = true;
    std::optional<HypothesisWitness> witness;
};

/// Sampled verdicts for H1-H4 on the box theta <= x <= K, 0 <= y,w,z <= K.
/// A checker of this kind can only falsify; PASS means no violation was
/// sampled.
struct HypothesisReport {
    HypothesisCheck h1, h2, h3, h4;
    double lipschitz_K = 0.0; ///< estimated K_theta
    double bound_N = 0.0;     ///< estimated N
    double theta = 0.0;
    double K = 0.0;

    bool all_pass() const { return h1.pass && h2.pass && h3.pass && h4.pass; }
};

HypothesisReport check_hypotheses(const IncidenceKind& inc, double theta, double K,
                                  const HypothesisGrid& grid = {});

nlohmann::json incidence_to_json(const IncidenceKind& inc);
IncidenceKind incidence_from_json(const nlohmann::json& j, const std::string& path = "incidence");

/// Pointer to the contact-rate tree for the three ratio/bilinear kinds,
/// nullptr for PsiG.
const TimeFunction* incidence_beta(const IncidenceKind& inc);

} // namespace siqr
