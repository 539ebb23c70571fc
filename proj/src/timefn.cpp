#include "siqr/timefn.hpp"

#include <algorithm>
#include <limits>

namespace siqr {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw PreconditionError(std::string("TimeFunction: non-finite ") + what);
    }
}

struct Interval {
    double lo, hi;
};

Interval mul(Interval a, Interval b) {
    const double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

} // namespace

struct TimeFunction::Node {
    Kind kind;
    // Constant: a = value. Sinusoid: a = amplitude, b = omega, c = phase.
    // ExpDecay: a = rate. Affine: a = scale, b = offset.
    double a = 0.0, b = 0.0, c = 0.0;
    std::vector<TimeFunction> children;

    // cached at construction
    double lo = 0.0, hi = 0.0;
    bool constant = false;
    double slowest = 0.0;
};

double TimeFunction::operator()(double t) const {
    const Node& n = *root_;
    switch (n.kind) {
    case Kind::Constant:
        return n.a;
    case Kind::Sinusoid:
        return n.a * std::sin(n.b * t + n.c);
    case Kind::ExpDecay:
        return std::exp(-n.a * t);
    case Kind::Sum: {
        double acc = 0.0;
        for (const auto& ch : n.children) {
            acc += ch(t);
        }
        return acc;
    }
    case Kind::Product: {
        double acc = 1.0;
        for (const auto& ch : n.children) {
            acc *= ch(t);
        }
        return acc;
    }
    case Kind::Affine:
        return n.a * n.children.front()(t) + n.b;
    }
    return 0.0; // unreachable
}

TimeFunction::Kind TimeFunction::kind() const {
    return root_->kind;
}

double TimeFunction::value_sup() const {
    return root_->hi;
}

double TimeFunction::value_inf() const {
    return root_->lo;
}

bool TimeFunction::is_constant() const {
    return root_->constant;
}

double TimeFunction::constant_value() const {
    if (!root_->constant) {
        throw PreconditionError("TimeFunction: constant_value() on a time-dependent tree");
    }
    return (*this)(0.0);
}

double TimeFunction::slowest_period() const {
    return root_->slowest;
}

TimeFunction TimeFunction::constant(double value) {
    require_finite(value, "constant value");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->a = value;
    n->lo = n->hi = value;
    n->constant = true;
    return TimeFunction(std::move(n));
}

TimeFunction TimeFunction::sinusoid(double amplitude, double omega, double phase) {
    require_finite(amplitude, "sinusoid amplitude");
    require_finite(omega, "sinusoid angular frequency");
    require_finite(phase, "sinusoid phase");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sinusoid;
    n->a = amplitude;
    n->b = omega;
    n->c = phase;
    if (omega == 0.0) {
        n->lo = n->hi = amplitude * std::sin(phase);
    } else {
        n->lo = -std::abs(amplitude);
        n->hi = std::abs(amplitude);
    }
    n->constant = false;
    n->slowest = omega == 0.0 ? 0.0 : 2.0 * M_PI / std::abs(omega);
    return TimeFunction(std::move(n));
}

TimeFunction TimeFunction::exp_decay(double rate) {
    require_finite(rate, "decay rate");
    if (rate < 0.0) {
        throw PreconditionError("TimeFunction: exp_decay rate must be >= 0 to stay bounded");
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::ExpDecay;
    n->a = rate;
    n->lo = rate == 0.0 ? 1.0 : 0.0;
    n->hi = 1.0;
    n->constant = false;
    return TimeFunction(std::move(n));
}

TimeFunction TimeFunction::sum(std::vector<TimeFunction> parts) {
    if (parts.empty()) {
        throw PreconditionError("TimeFunction: sum of zero terms");
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sum;
    n->lo = 0.0;
    n->hi = 0.0;
    n->constant = true;
    for (const auto& p : parts) {
        n->lo += p.value_inf();
        n->hi += p.value_sup();
        n->constant = n->constant && p.is_constant();
        n->slowest = std::max(n->slowest, p.slowest_period());
    }
    n->children = std::move(parts);
    return TimeFunction(std::move(n));
}

TimeFunction TimeFunction::product(std::vector<TimeFunction> parts) {
    if (parts.empty()) {
        throw PreconditionError("TimeFunction: product of zero factors");
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Product;
    Interval acc{1.0, 1.0};
    n->constant = true;
    for (const auto& p : parts) {
        acc = mul(acc, Interval{p.value_inf(), p.value_sup()});
        n->constant = n->constant && p.is_constant();
        n->slowest = std::max(n->slowest, p.slowest_period());
    }
    n->lo = acc.lo;
    n->hi = acc.hi;
    n->children = std::move(parts);
    return TimeFunction(std::move(n));
}

TimeFunction TimeFunction::affine(double scale, double offset, TimeFunction child) {
    require_finite(scale, "affine scale");
    require_finite(offset, "affine offset");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Affine;
    n->a = scale;
    n->b = offset;
    if (scale >= 0.0) {
        n->lo = scale * child.value_inf() + offset;
        n->hi = scale * child.value_sup() + offset;
    } else {
        n->lo = scale * child.value_sup() + offset;
        n->hi = scale * child.value_inf() + offset;
    }
    n->constant = child.is_constant();
    n->slowest = child.slowest_period();
    n->children.push_back(std::move(child));
    return TimeFunction(std::move(n));
}

nlohmann::json TimeFunction::to_json() const {
    const Node& n = *root_;
    nlohmann::json j;
    switch (n.kind) {
    case Kind::Constant:
        j = {{"kind", "const"}, {"value", n.a}};
        break;
    case Kind::Sinusoid:
        j = {{"kind", "sin"}, {"amp", n.a}, {"omega", n.b}, {"phase", n.c}};
        break;
    case Kind::ExpDecay:
        j = {{"kind", "expdecay"}, {"rate", n.a}};
        break;
    case Kind::Sum:
    case Kind::Product: {
        nlohmann::json args = nlohmann::json::array();
        for (const auto& ch : n.children) {
            args.push_back(ch.to_json());
        }
        j = {{"kind", n.kind == Kind::Sum ? "sum" : "product"}, {"args", std::move(args)}};
        break;
    }
    case Kind::Affine:
        j = {{"kind", "affine"},
             {"scale", n.a},
             {"offset", n.b},
             {"arg", n.children.front().to_json()}};
        break;
    }
    return j;
}

namespace {

double json_number(const nlohmann::json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) {
        throw SchemaError(path.empty() ? key : path + "." + key, "missing field");
    }
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw SchemaError(path.empty() ? key : path + "." + key, "expected a number");
    }
    return v.get<double>();
}

} // namespace

TimeFunction TimeFunction::from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) {
        throw SchemaError(path, "expected a TimeFunction object");
    }
    if (!j.contains("kind")) {
        throw SchemaError(path.empty() ? "kind" : path + ".kind", "missing field");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "const") {
        return constant(json_number(j, "value", path));
    }
    if (kind == "sin") {
        const double amp = json_number(j, "amp", path);
        const double omega = json_number(j, "omega", path);
        const double phase = json_number(j, "phase", path);
        return sinusoid(amp, omega, phase);
    }
    if (kind == "expdecay") {
        return exp_decay(json_number(j, "rate", path));
    }
    if (kind == "sum" || kind == "product") {
        if (!j.contains("args") || !j.at("args").is_array() || j.at("args").empty()) {
            throw SchemaError(path.empty() ? "args" : path + ".args",
                              "expected a non-empty array");
        }
        std::vector<TimeFunction> parts;
        std::size_t i = 0;
        for (const auto& a : j.at("args")) {
            parts.push_back(from_json(a, (path.empty() ? "args" : path + ".args") + "[" +
                                             std::to_string(i++) + "]"));
        }
        return kind == "sum" ? sum(std::move(parts)) : product(std::move(parts));
    }
    if (kind == "affine") {
        const double scale = json_number(j, "scale", path);
        const double offset = json_number(j, "offset", path);
        if (!j.contains("arg")) {
            throw SchemaError(path.empty() ? "arg" : path + ".arg", "missing field");
        }
        return affine(scale, offset, from_json(j.at("arg"), path.empty() ? "arg" : path + ".arg"));
    }
    throw SchemaError(path.empty() ? "kind" : path + ".kind",
                      "unknown TimeFunction kind '" + kind + "'");
}

std::optional<NegativitySample> find_negative_sample(const TimeFunction& f, double t_max,
                                                     std::size_t samples) {
    if (!(t_max > 0.0) || samples < 2) {
        throw PreconditionError("find_negative_sample: need t_max > 0 and at least 2 samples");
    }
    std::optional<NegativitySample> worst;
    const double step = t_max / static_cast<double>(samples - 1);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) * step;
        const double v = f(t);
        if (v < 0.0 && (!worst || v < worst->value)) {
            worst = NegativitySample{t, v};
        }
    }
    return worst;
}

WindowStatConfig WindowStatConfig::resolved(double slowest_period) const {
    WindowStatConfig c = *this;
    if (c.scan_length <= 0.0) {
        c.scan_length = std::max(10.0 * c.lambda, 5.0 * slowest_period);
    }
    if (c.t_step <= 0.0) {
        c.t_step = c.lambda / 64.0;
    }
    if (c.quadrature_step <= 0.0) {
        c.quadrature_step = c.t_step;
    }
    return c;
}

void WindowStatConfig::validate() const {
    if (!(lambda > 0.0)) {
        throw PreconditionError("WindowStatConfig: lambda must be positive");
    }
    if (!(burn_in >= 0.0)) {
        throw PreconditionError("WindowStatConfig: burn_in must be >= 0");
    }
    if (!(scan_length >= 10.0 * lambda - 1e-9)) {
        throw PreconditionError("WindowStatConfig: scan_length must be >= 10*lambda");
    }
    if (!(t_step > 0.0) || t_step > lambda / 8.0 + 1e-12) {
        throw PreconditionError("WindowStatConfig: t_step must be in (0, lambda/8]");
    }
    if (!(quadrature_step > 0.0) || quadrature_step > t_step + 1e-12) {
        throw PreconditionError("WindowStatConfig: quadrature_step must be in (0, t_step]");
    }
}

WindowStatConfig WindowStatConfig::for_window(double lambda, double slowest_period) {
    WindowStatConfig c;
    c.lambda = lambda;
    return c.resolved(slowest_period);
}

double window_integral(const TimeFunction& f, double t, double lambda, double quadrature_step) {
    return detail::window_integral_impl([&](double s) { return f(s); }, t, lambda,
                                        quadrature_step);
}

WindowScanResult liminf_window(const TimeFunction& f, const WindowStatConfig& cfg) {
    const auto c = cfg.resolved(f.slowest_period());
    return detail::scan_windows_impl([&](double s) { return f(s); }, c).first;
}

WindowScanResult limsup_window(const TimeFunction& f, const WindowStatConfig& cfg) {
    const auto c = cfg.resolved(f.slowest_period());
    return detail::scan_windows_impl([&](double s) { return f(s); }, c).second;
}

double period_average(const TimeFunction& f, double T, std::size_t panels) {
    if (!(T > 0.0)) {
        throw PreconditionError("period_average: period must be positive");
    }
    return detail::window_integral_impl([&](double s) { return f(s); }, 0.0, T,
                                        T / static_cast<double>(panels)) /
           T;
}

bool is_periodic(const TimeFunction& f, double T, std::size_t probes, double tol) {
    if (!(T > 0.0)) {
        throw PreconditionError("is_periodic: period must be positive");
    }
    const double scale = std::max({1.0, std::abs(f.value_sup()), std::abs(f.value_inf())});
    for (std::size_t i = 0; i < probes; ++i) {
        const double t = 3.0 * T * static_cast<double>(i) / static_cast<double>(probes);
        if (std::abs(f(t) - f(t + T)) > tol * scale) {
            return false;
        }
    }
    return true;
}

} // namespace siqr
