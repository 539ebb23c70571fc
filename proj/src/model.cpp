#include "siqr/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace siqr {

bool State::valid() const {
    return std::isfinite(S) && std::isfinite(I) && std::isfinite(Q) && std::isfinite(R) &&
           std::isfinite(t) && S >= 0.0 && I >= 0.0 && Q >= 0.0 && R >= 0.0;
}

double ParameterSet::removal_sum(double t) const {
    return gamma(t) + sigma(t) + d(t) + alpha1(t);
}

std::vector<std::string> ParameterSet::validate(double horizon) const {
    std::vector<std::string> violations;
    const std::array<std::pair<const char*, const TimeFunction*>, 7> coeffs = {{
        {"Lambda", &Lambda},
        {"d", &d},
        {"gamma", &gamma},
        {"sigma", &sigma},
        {"alpha1", &alpha1},
        {"alpha2", &alpha2},
        {"eps", &eps},
    }};
    for (const auto& [name, f] : coeffs) {
        if (const auto neg = find_negative_sample(*f, horizon)) {
            violations.push_back(std::string(name) + "(t) < 0 at t=" + std::to_string(neg->t) +
                                 " (value " + std::to_string(neg->value) + ")");
        }
    }
    if (!(omega_d > 0.0)) {
        violations.emplace_back("omega_d must be positive");
    }
    if (!(omega_Lambda > 0.0)) {
        violations.emplace_back("omega_Lambda must be positive");
    }
    if (omega_d > 0.0) {
        const auto lo = liminf_window(d, WindowStatConfig::for_window(omega_d, d.slowest_period()));
        if (!(lo.value > 0.0)) {
            violations.push_back("d^-_{omega_d} > 0 fails: windowed liminf of d is " +
                                 std::to_string(lo.value));
        }
    }
    if (omega_Lambda > 0.0) {
        const auto lo = liminf_window(
            Lambda, WindowStatConfig::for_window(omega_Lambda, Lambda.slowest_period()));
        if (!(lo.value > 0.0)) {
            violations.push_back("Lambda^-_{omega_Lambda} > 0 fails: windowed liminf of Lambda is " +
                                 std::to_string(lo.value));
        }
    }
    return violations;
}

bool ParameterSet::all_constant() const {
    return Lambda.is_constant() && d.is_constant() && gamma.is_constant() &&
           sigma.is_constant() && alpha1.is_constant() && alpha2.is_constant() &&
           eps.is_constant();
}

double ParameterSet::slowest_period() const {
    return std::max({Lambda.slowest_period(), d.slowest_period(), gamma.slowest_period(),
                     sigma.slowest_period(), alpha1.slowest_period(), alpha2.slowest_period(),
                     eps.slowest_period()});
}

nlohmann::json ParameterSet::to_json() const {
    return {{"Lambda", Lambda.to_json()}, {"d", d.to_json()},
            {"gamma", gamma.to_json()},   {"sigma", sigma.to_json()},
            {"alpha1", alpha1.to_json()}, {"alpha2", alpha2.to_json()},
            {"eps", eps.to_json()},       {"omega_d", omega_d},
            {"omega_Lambda", omega_Lambda}};
}

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                    const std::string& path) {
    if (!j.is_object() || !j.contains(key)) {
        throw SchemaError(path + "." + key, "missing field");
    }
    return j.at(key);
}

double require_number(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto& v = require_field(j, key, path);
    if (!v.is_number()) {
        throw SchemaError(path + "." + key, "expected a number");
    }
    return v.get<double>();
}

} // namespace

ParameterSet ParameterSet::from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) {
        throw SchemaError(path, "expected an object");
    }
    ParameterSet p;
    p.Lambda = TimeFunction::from_json(require_field(j, "Lambda", path), path + ".Lambda");
    p.d = TimeFunction::from_json(require_field(j, "d", path), path + ".d");
    p.gamma = TimeFunction::from_json(require_field(j, "gamma", path), path + ".gamma");
    p.sigma = TimeFunction::from_json(require_field(j, "sigma", path), path + ".sigma");
    p.alpha1 = TimeFunction::from_json(require_field(j, "alpha1", path), path + ".alpha1");
    p.alpha2 = TimeFunction::from_json(require_field(j, "alpha2", path), path + ".alpha2");
    p.eps = TimeFunction::from_json(require_field(j, "eps", path), path + ".eps");
    p.omega_d = j.contains("omega_d") ? require_number(j, "omega_d", path) : 1.0;
    p.omega_Lambda = j.contains("omega_Lambda") ? require_number(j, "omega_Lambda", path) : 1.0;
    return p;
}

// ---------------------------------------------------------------------------
// StateExpr

struct StateExpr::Node {
    enum class Kind { Constant, Var, Sum, Product, Affine, Pow } kind;
    double a = 0.0, b = 0.0; // Constant: a=value; Var: a=index; Affine: a=scale,b=offset; Pow: a=exponent
    std::string name;        // Var only
    std::vector<StateExpr> children;
};

StateExpr StateExpr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->a = value;
    return StateExpr(std::move(n));
}

StateExpr StateExpr::var(std::size_t index, std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Var;
    n->a = static_cast<double>(index);
    n->name = std::move(name);
    return StateExpr(std::move(n));
}

StateExpr StateExpr::sum(std::vector<StateExpr> parts) {
    if (parts.empty()) {
        throw PreconditionError("StateExpr: sum of zero terms");
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Sum;
    n->children = std::move(parts);
    return StateExpr(std::move(n));
}

StateExpr StateExpr::product(std::vector<StateExpr> parts) {
    if (parts.empty()) {
        throw PreconditionError("StateExpr: product of zero factors");
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Product;
    n->children = std::move(parts);
    return StateExpr(std::move(n));
}

StateExpr StateExpr::affine(double scale, double offset, StateExpr child) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Affine;
    n->a = scale;
    n->b = offset;
    n->children.push_back(std::move(child));
    return StateExpr(std::move(n));
}

StateExpr StateExpr::pow(StateExpr base, double exponent) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Pow;
    n->a = exponent;
    n->children.push_back(std::move(base));
    return StateExpr(std::move(n));
}

double StateExpr::eval(std::span<const double> values) const {
    const Node& n = *root_;
    switch (n.kind) {
    case Node::Kind::Constant:
        return n.a;
    case Node::Kind::Var:
        return values[static_cast<std::size_t>(n.a)];
    case Node::Kind::Sum: {
        double acc = 0.0;
        for (const auto& ch : n.children) {
            acc += ch.eval(values);
        }
        return acc;
    }
    case Node::Kind::Product: {
        double acc = 1.0;
        for (const auto& ch : n.children) {
            acc *= ch.eval(values);
        }
        return acc;
    }
    case Node::Kind::Affine:
        return n.a * n.children.front().eval(values) + n.b;
    case Node::Kind::Pow:
        return std::pow(n.children.front().eval(values), n.a);
    }
    return 0.0; // unreachable
}

nlohmann::json StateExpr::to_json() const {
    const Node& n = *root_;
    switch (n.kind) {
    case Node::Kind::Constant:
        return {{"kind", "const"}, {"value", n.a}};
    case Node::Kind::Var:
        return {{"kind", "var"}, {"name", n.name}};
    case Node::Kind::Sum:
    case Node::Kind::Product: {
        nlohmann::json args = nlohmann::json::array();
        for (const auto& ch : n.children) {
            args.push_back(ch.to_json());
        }
        return {{"kind", n.kind == Node::Kind::Sum ? "sum" : "product"}, {"args", std::move(args)}};
    }
    case Node::Kind::Affine:
        return {{"kind", "affine"},
                {"scale", n.a},
                {"offset", n.b},
                {"arg", n.children.front().to_json()}};
    case Node::Kind::Pow:
        return {{"kind", "pow"}, {"exponent", n.a}, {"arg", n.children.front().to_json()}};
    }
    return nullptr; // unreachable
}

StateExpr StateExpr::parse(const nlohmann::json& j, std::span<const std::string> variables,
                           const std::string& path) {
    if (!j.is_object() || !j.contains("kind")) {
        throw SchemaError(path, "expected an expression object with a 'kind' field");
    }
    const std::string kind = j.at("kind").get<std::string>();
    const auto sub = [&](const char* key) { return path.empty() ? key : path + "." + key; };
    if (kind == "const") {
        return constant(require_number(j, "value", path));
    }
    if (kind == "var") {
        const auto& name = require_field(j, "name", path);
        for (std::size_t i = 0; i < variables.size(); ++i) {
            if (variables[i] == name.get<std::string>()) {
                return var(i, variables[i]);
            }
        }
        throw SchemaError(sub("name"), "unknown variable '" + name.get<std::string>() + "'");
    }
    if (kind == "sum" || kind == "product") {
        const auto& args = require_field(j, "args", path);
        if (!args.is_array() || args.empty()) {
            throw SchemaError(sub("args"), "expected a non-empty array");
        }
        std::vector<StateExpr> parts;
        std::size_t i = 0;
        for (const auto& a : args) {
            parts.push_back(parse(a, variables, sub("args") + "[" + std::to_string(i++) + "]"));
        }
        return kind == "sum" ? sum(std::move(parts)) : product(std::move(parts));
    }
    if (kind == "affine") {
        const double scale = require_number(j, "scale", path);
        const double offset = require_number(j, "offset", path);
        return affine(scale, offset, parse(require_field(j, "arg", path), variables, sub("arg")));
    }
    if (kind == "pow") {
        const double exponent = require_number(j, "exponent", path);
        return pow(parse(require_field(j, "arg", path), variables, sub("arg")), exponent);
    }
    throw SchemaError(sub("kind"), "unknown expression kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Incidence

std::span<const std::string> psi_variables() {
    static const std::vector<std::string> vars = {"S", "Q", "R"};
    return vars;
}

std::span<const std::string> g_variables() {
    static const std::vector<std::string> vars = {"I"};
    return vars;
}

namespace {

double psig_psi(const PsiG& inc, double S, double Q, double R) {
    const std::array<double, 3> vals = {S, Q, R};
    const double v = inc.psi.eval(vals);
    if (!std::isfinite(v)) {
        throw EvaluationError("incidence factor psi produced a non-finite value at S=" +
                              std::to_string(S) + ", Q=" + std::to_string(Q) +
                              ", R=" + std::to_string(R));
    }
    return v;
}

double psig_g(const PsiG& inc, double I) {
    const std::array<double, 1> vals = {I};
    const double v = inc.g.eval(vals);
    if (!std::isfinite(v)) {
        throw EvaluationError("incidence factor g produced a non-finite value at I=" +
                              std::to_string(I));
    }
    return v;
}

} // namespace

double incidence_eval(const IncidenceKind& inc, double t, const State& s) {
    if (s.S <= 0.0 || s.I <= 0.0) {
        return 0.0;
    }
    return std::visit(
        [&](const auto& kind) -> double {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, MassAction>) {
                return kind.beta(t) * s.S * s.I;
            } else if constexpr (std::is_same_v<T, StandardIncidence>) {
                const double den = s.S + s.I + s.Q + s.R;
                return den > 0.0 ? kind.beta(t) * s.S * s.I / den : 0.0;
            } else if constexpr (std::is_same_v<T, QuarantineAdjustedIncidence>) {
                const double den = s.S + s.I + s.Q;
                return den > 0.0 ? kind.beta(t) * s.S * s.I / den : 0.0;
            } else {
                const double phi = psig_psi(kind, s.S, s.Q, s.R) * psig_g(kind, s.I) * s.I;
                if (!std::isfinite(phi)) {
                    throw EvaluationError("psi*g incidence produced a non-finite value");
                }
                return phi;
            }
        },
        inc);
}

namespace {

/// Richardson-style probe of lim_{delta->0} phi(t,x,0,0,delta)/delta.
double probe_linearization(const IncidenceKind& inc, double t, double x) {
    const std::array<double, 3> deltas = {1e-4, 1e-6, 1e-8};
    std::array<double, 3> values{};
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        State s;
        s.S = x;
        s.I = deltas[i];
        s.t = t;
        values[i] = incidence_eval(inc, t, s) / deltas[i];
        if (!std::isfinite(values[i])) {
            throw LinearizationError("linearization undefined: non-finite probe at delta=" +
                                     std::to_string(deltas[i]));
        }
    }
    const double d1 = std::abs(values[1] - values[0]);
    const double d2 = std::abs(values[2] - values[1]);
    const double scale = std::max(1.0, std::abs(values[2]));
    if (d2 > 0.5 * d1 + 1e-9 * scale) {
        throw LinearizationError(
            "linearization undefined: probe did not converge (values " +
            std::to_string(values[0]) + ", " + std::to_string(values[1]) + ", " +
            std::to_string(values[2]) + ")");
    }
    return values[2];
}

} // namespace

LinearizedIncidence linearized_incidence(const IncidenceKind& inc, double t, double x) {
    if (!(x > 0.0)) {
        throw PreconditionError("linearized_incidence: susceptible level must be positive");
    }
    return std::visit(
        [&](const auto& kind) -> LinearizedIncidence {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, MassAction>) {
                const double v = kind.beta(t) * x;
                return {v, v};
            } else if constexpr (std::is_same_v<T, StandardIncidence> ||
                                 std::is_same_v<T, QuarantineAdjustedIncidence>) {
                // phi/delta = beta x / (x + delta) -> beta
                const double v = kind.beta(t);
                return {v, v};
            } else {
                const double psi0 = psig_psi(kind, x, 0.0, 0.0);
                if (kind.g_liminf0 && kind.g_limsup0) {
                    return {psi0 * *kind.g_liminf0, psi0 * *kind.g_limsup0};
                }
                const double probed = probe_linearization(inc, t, x);
                return {probed, probed};
            }
        },
        inc);
}

Derivative rhs(const ParameterSet& p, const IncidenceKind& inc, const State& s) {
    const double phi = incidence_eval(inc, s.t, s);
    const double dt = p.d(s.t);
    Derivative out;
    out.dS = p.Lambda(s.t) - phi - dt * s.S;
    out.dI = phi - p.removal_sum(s.t) * s.I;
    out.dQ = p.sigma(s.t) * s.I - (dt + p.alpha2(s.t) + p.eps(s.t)) * s.Q;
    out.dR = p.gamma(s.t) * s.I + p.eps(s.t) * s.Q - dt * s.R;
    return out;
}

const TimeFunction* incidence_beta(const IncidenceKind& inc) {
    return std::visit(
        [](const auto& kind) -> const TimeFunction* {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, PsiG>) {
                return nullptr;
            } else {
                return &kind.beta;
            }
        },
        inc);
}

// ---------------------------------------------------------------------------
// Hypothesis checking

namespace {

double phi_at(const IncidenceKind& inc, double t, double x, double y, double w, double z) {
    // The hypothesis tuple order is (x, y, w, z) = (S, R, Q, I).
    State s;
    s.S = x;
    s.R = y;
    s.Q = w;
    s.I = z;
    s.t = t;
    return incidence_eval(inc, t, s);
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    for (int i = 0; i < n; ++i) {
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
}

} // namespace

HypothesisReport check_hypotheses(const IncidenceKind& inc, double theta, double K,
                                  const HypothesisGrid& grid) {
    if (!(0.0 < theta && theta < K)) {
        throw PreconditionError("check_hypotheses: need 0 < theta < K");
    }
    HypothesisReport report;
    report.theta = theta;
    report.K = K;

    const auto times = linspace(0.0, grid.t_max, grid.time_points);
    const auto xs = linspace(theta, K, grid.points);
    // secondary axes start strictly above zero where the hypotheses ask for it
    const auto positive_coarse = [&](double hi) {
        return linspace(hi / static_cast<double>(grid.coarse), hi, grid.coarse);
    };
    const auto ywz = positive_coarse(K);

    const double tol = 1e-9;

    // H1: x -> phi nondecreasing and phi(t,0,y,w,z) = 0
    for (double t : times) {
        for (double y : ywz) {
            for (double w : ywz) {
                for (double z : ywz) {
                    const double at_zero = phi_at(inc, t, 0.0, y, w, z);
                    if (std::abs(at_zero) > tol) {
                        report.h1.pass = false;
                        report.h1.witness =
                            HypothesisWitness{t, 0.0, y, w, z, at_zero, "phi(t,0,y,w,z) != 0"};
                    }
                    double prev = phi_at(inc, t, xs.front(), y, w, z);
                    for (std::size_t i = 1; i < xs.size() && report.h1.pass; ++i) {
                        const double cur = phi_at(inc, t, xs[i], y, w, z);
                        if (cur < prev - tol * std::max(1.0, std::abs(prev))) {
                            report.h1.pass = false;
                            report.h1.witness = HypothesisWitness{
                                t, xs[i], y, w, z, cur - prev, "phi decreasing in x"};
                        }
                        prev = cur;
                    }
                }
            }
        }
    }

    // H2: |phi(x1) - phi(x2)| <= K_theta |x1 - x2| z; estimate K_theta from
    // adjacent pairs on the x grid.
    for (double t : times) {
        for (double y : ywz) {
            for (double w : ywz) {
                for (double z : ywz) {
                    for (std::size_t i = 1; i < xs.size(); ++i) {
                        const double dphi =
                            std::abs(phi_at(inc, t, xs[i], y, w, z) -
                                     phi_at(inc, t, xs[i - 1], y, w, z));
                        const double ratio = dphi / ((xs[i] - xs[i - 1]) * z);
                        if (!std::isfinite(ratio)) {
                            report.h2.pass = false;
                            report.h2.witness = HypothesisWitness{
                                t, xs[i], y, w, z, ratio, "non-finite difference quotient"};
                        } else if (ratio > report.lipschitz_K) {
                            report.lipschitz_K = ratio;
                            if (report.h2.pass) {
                                report.h2.witness = HypothesisWitness{
                                    t, xs[i], y, w, z, ratio, "largest sampled quotient"};
                            }
                        }
                    }
                }
            }
        }
    }

    // H3: inf_{0 < tau < factor*delta} phi(t,x,0,0,tau)/tau <= phi(t,x,y,w,z)/z < N
    const auto deltas = positive_coarse(K);
    const auto x_coarse = linspace(theta, K, grid.coarse);
    for (double t : times) {
        for (double x : x_coarse) {
            for (double delta : deltas) {
                double inf_ratio = std::numeric_limits<double>::infinity();
                const auto taus =
                    linspace(grid.h3_factor * delta / grid.points, grid.h3_factor * delta,
                             grid.points);
                for (double tau : taus) {
                    inf_ratio = std::min(inf_ratio, phi_at(inc, t, x, 0.0, 0.0, tau) / tau);
                }
                const auto small = positive_coarse(delta);
                for (double y : small) {
                    for (double w : small) {
                        for (double z : small) {
                            const double mid = phi_at(inc, t, x, y, w, z) / z;
                            if (!std::isfinite(mid)) {
                                report.h3.pass = false;
                                report.h3.witness = HypothesisWitness{
                                    t, x, y, w, z, mid, "phi/z not finite"};
                                continue;
                            }
                            report.bound_N = std::max(report.bound_N, mid);
                            if (inf_ratio > mid + tol * std::max(1.0, std::abs(mid))) {
                                report.h3.pass = false;
                                report.h3.witness = HypothesisWitness{
                                    t, x, y, w, z, inf_ratio - mid,
                                    "inf over tau exceeds phi/z (delta=" + std::to_string(delta) +
                                        ")"};
                            }
                        }
                    }
                }
            }
        }
    }

    // H4: phi(t,x,y,w,z)/z <= limsup_{delta->0} phi(t,x,0,0,delta)/delta < inf
    for (double t : times) {
        for (double x : x_coarse) {
            double upper;
            try {
                upper = linearized_incidence(inc, t, x).upper;
            } catch (const LinearizationError& e) {
                report.h4.pass = false;
                report.h4.witness =
                    HypothesisWitness{t, x, 0.0, 0.0, 0.0, 0.0,
                                      std::string("limsup at 0+ does not exist: ") + e.what()};
                continue;
            }
            if (!std::isfinite(upper)) {
                report.h4.pass = false;
                report.h4.witness =
                    HypothesisWitness{t, x, 0.0, 0.0, 0.0, upper, "limsup at 0+ infinite"};
                continue;
            }
            for (double y : ywz) {
                for (double w : ywz) {
                    for (double z : ywz) {
                        const double ratio = phi_at(inc, t, x, y, w, z) / z;
                        if (ratio > upper + tol * std::max(1.0, std::abs(upper))) {
                            report.h4.pass = false;
                            report.h4.witness = HypothesisWitness{
                                t, x, y, w, z, ratio - upper, "phi/z above the limsup at 0+"};
                        }
                    }
                }
            }
        }
    }

    return report;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json incidence_to_json(const IncidenceKind& inc) {
    return std::visit(
        [](const auto& kind) -> nlohmann::json {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, MassAction>) {
                return {{"kind", "mass_action"}, {"beta", kind.beta.to_json()}};
            } else if constexpr (std::is_same_v<T, StandardIncidence>) {
                return {{"kind", "standard"}, {"beta", kind.beta.to_json()}};
            } else if constexpr (std::is_same_v<T, QuarantineAdjustedIncidence>) {
                return {{"kind", "quarantine_adjusted"}, {"beta", kind.beta.to_json()}};
            } else {
                nlohmann::json j = {{"kind", "psi_g"},
                                    {"psi", kind.psi.to_json()},
                                    {"g", kind.g.to_json()}};
                if (kind.g_liminf0) {
                    j["g_liminf0"] = *kind.g_liminf0;
                }
                if (kind.g_limsup0) {
                    j["g_limsup0"] = *kind.g_limsup0;
                }
                return j;
            }
        },
        inc);
}

IncidenceKind incidence_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("kind")) {
        throw SchemaError(path + ".kind", "missing field");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "mass_action" || kind == "standard" || kind == "quarantine_adjusted") {
        auto beta = TimeFunction::from_json(require_field(j, "beta", path), path + ".beta");
        if (kind == "mass_action") {
            return MassAction{std::move(beta)};
        }
        if (kind == "standard") {
            return StandardIncidence{std::move(beta)};
        }
        return QuarantineAdjustedIncidence{std::move(beta)};
    }
    if (kind == "psi_g") {
        PsiG out{StateExpr::parse(require_field(j, "psi", path), psi_variables(), path + ".psi"),
                 StateExpr::parse(require_field(j, "g", path), g_variables(), path + ".g"),
                 std::nullopt, std::nullopt};
        if (j.contains("g_liminf0")) {
            out.g_liminf0 = require_number(j, "g_liminf0", path);
        }
        if (j.contains("g_limsup0")) {
            out.g_limsup0 = require_number(j, "g_limsup0", path);
        }
        if (out.g_liminf0.has_value() != out.g_limsup0.has_value()) {
            throw SchemaError(path, "declare both g_liminf0 and g_limsup0 or neither");
        }
        if (out.g_liminf0 && out.g_limsup0 && *out.g_liminf0 > *out.g_limsup0) {
            throw SchemaError(path, "g_liminf0 must not exceed g_limsup0");
        }
        return out;
    }
    throw SchemaError(path + ".kind", "unknown incidence kind '" + kind + "'");
}

} // namespace siqr
