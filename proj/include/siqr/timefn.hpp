#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "siqr/errors.hpp"

namespace siqr {

/// A deterministic, bounded, time-varying coefficient built from a small
/// closed set of node kinds. Trees are immutable after construction and
/// cheap to copy (nodes are shared), so they are safe to evaluate from
/// several threads at once.
///
/// Every node kind is bounded on [0, inf): sinusoids oscillate, decays
/// relax to zero, and sums/products/affine maps of bounded functions stay
/// bounded. Construction computes a certified interval enclosure of the
/// value over t >= 0.
class TimeFunction {
public:
    enum class Kind { Constant, Sinusoid, ExpDecay, Sum, Product, Affine };

    static TimeFunction constant(double value);
    /// amplitude * sin(omega * t + phase)
    static TimeFunction sinusoid(double amplitude, double omega, double phase);
    /// exp(-rate * t); rate must be >= 0 to stay bounded on [0, inf).
    static TimeFunction exp_decay(double rate);
    static TimeFunction sum(std::vector<TimeFunction> parts);
    static TimeFunction product(std::vector<TimeFunction> parts);
    /// scale * child(t) + offset
    static TimeFunction affine(double scale, double offset, TimeFunction child);

    /// Value at time t. Total and deterministic for every finite t.
    double operator()(double t) const;

    Kind kind() const;

    /// Certified upper bound of the value over all t >= 0.
    double value_sup() const;
    /// Certified lower bound of the value over all t >= 0.
    double value_inf() const;

    /// True when the tree contains no time-dependent node.
    bool is_constant() const;
    /// Value of a constant tree (PreconditionError otherwise).
    double constant_value() const;

    /// Period of the slowest sinusoid anywhere in the tree; 0 when there
    /// is none. Used to size scan horizons.
    double slowest_period() const;

    nlohmann::json to_json() const;
    static TimeFunction from_json(const nlohmann::json& j, const std::string& path = "");

private:
    struct Node;
    explicit TimeFunction(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

/// Sampled nonnegativity violation: f(t) < 0 at the witness time.
struct NegativitySample {
    double t = 0.0;
    double value = 0.0;
};

/// Scans a uniform grid of `samples` points over [0, t_max] and returns the
/// most negative sample, if any. A check, not a proof.
std::optional<NegativitySample> find_negative_sample(const TimeFunction& f, double t_max,
                                                     std::size_t samples = 10000);

/// Scan parameters for the windowed asymptotic statistics
/// h^-_lambda = liminf_{t->inf} int_t^{t+lambda} h, and its limsup mirror.
/// The t -> inf limit is approximated by a finite scan after a burn-in.
struct WindowStatConfig {
    double lambda = 1.0;          ///< window length
    double burn_in = 1000.0;      ///< start of the scan
    double scan_length = 0.0;     ///< 0 = auto: max(10*lambda, 5 * slowest period)
    double t_step = 0.0;          ///< outer grid spacing; 0 = auto: lambda / 64
    double quadrature_step = 0.0; ///< inner Simpson panel width; 0 = t_step

    /// Fills the auto fields against the slowest sinusoid period of the
    /// integrand and returns the concrete config.
    WindowStatConfig resolved(double slowest_period = 0.0) const;

    /// Enforces: lambda > 0, burn_in >= 0, scan_length >= 10*lambda,
    /// t_step <= lambda/8, quadrature_step <= t_step.
    void validate() const;

    static WindowStatConfig for_window(double lambda, double slowest_period = 0.0);
};

/// Extremal window integral found by a scan, with the t that attains it.
struct WindowScanResult {
    double value = 0.0;
    double arg_t = 0.0;
};

namespace detail {

/// Composite Simpson over [t, t+lambda] with panel width q; the last panel
/// is shortened to land exactly on t+lambda.
template <class F>
double window_integral_impl(F&& f, double t, double lambda, double q) {
    if (!(lambda > 0.0)) {
        throw PreconditionError("window_integral: window length must be positive");
    }
    if (!(q > 0.0)) {
        throw PreconditionError("window_integral: quadrature step must be positive");
    }
    const auto panel = [&](double a, double w) {
        return (w / 6.0) * (f(a) + 4.0 * f(a + 0.5 * w) + f(a + w));
    };
    const auto n_full = static_cast<std::size_t>(lambda / q);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_full; ++i) {
        acc += panel(t + static_cast<double>(i) * q, q);
    }
    const double covered = static_cast<double>(n_full) * q;
    const double rem = lambda - covered;
    if (rem > lambda * 1e-12) {
        acc += panel(t + covered, rem);
    }
    if (!std::isfinite(acc)) {
        throw EvaluationError("window_integral: non-finite quadrature value");
    }
    return acc;
}

template <class F>
std::pair<WindowScanResult, WindowScanResult> scan_windows_impl(F&& f, const WindowStatConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.scan_length / cfg.t_step);
    WindowScanResult lo{std::numeric_limits<double>::infinity(), cfg.burn_in};
    WindowScanResult hi{-std::numeric_limits<double>::infinity(), cfg.burn_in};
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = cfg.burn_in + static_cast<double>(k) * cfg.t_step;
        const double w = window_integral_impl(f, t, cfg.lambda, cfg.quadrature_step);
        if (w < lo.value) {
            lo = {w, t};
        }
        if (w > hi.value) {
            hi = {w, t};
        }
    }
    return {lo, hi};
}

} // namespace detail

/// int_t^{t+lambda} f(s) ds by composite Simpson with the given panel width.
double window_integral(const TimeFunction& f, double t, double lambda, double quadrature_step);

/// Finite-scan stand-in for liminf_{t->inf} int_t^{t+lambda} f.
WindowScanResult liminf_window(const TimeFunction& f, const WindowStatConfig& cfg);
/// Finite-scan stand-in for limsup_{t->inf} int_t^{t+lambda} f.
WindowScanResult limsup_window(const TimeFunction& f, const WindowStatConfig& cfg);

/// (1/T) int_0^T f, by composite Simpson with `panels` panels.
double period_average(const TimeFunction& f, double T, std::size_t panels = 512);

/// True when |f(t) - f(t+T)| stays below an absolute+relative tolerance on
/// `probes` sample points spread over [0, 3T].
bool is_periodic(const TimeFunction& f, double T, std::size_t probes = 100, double tol = 1e-9);

} // namespace siqr
