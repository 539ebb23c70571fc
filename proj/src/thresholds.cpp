#include "siqr/thresholds.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace siqr {

namespace {

// Simpson over [a, a+w] for a scalar callable.
template <class F>
double simpson_panel(F&& f, double a, double w) {
    return (w / 6.0) * (f(a) + 4.0 * f(a + 0.5 * w) + f(a + w));
}

} // namespace

double AuxTrajectory::eval(double t) const {
    if (x.size() < 2) {
        throw PreconditionError("AuxTrajectory: too few samples to interpolate");
    }
    if (t < t0 - 1e-12 || t > t_end() + 1e-9) {
        throw PreconditionError("AuxTrajectory: evaluation outside the solved range");
    }
    const auto last = x.size() - 2;
    auto i = static_cast<std::size_t>(std::max(0.0, (t - t0) / step));
    i = std::min(i, last);
    const double u = (t - t_at(i)) / step;
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    const double h10 = u3 - 2.0 * u2 + u;
    const double h01 = -2.0 * u3 + 3.0 * u2;
    const double h11 = u3 - u2;
    return h00 * x[i] + h10 * step * xdot[i] + h01 * x[i + 1] + h11 * step * xdot[i + 1];
}

double AuxTrajectory::contraction_factor() const {
    return std::exp(-cum_death.back());
}

AuxTrajectory solve_auxiliary(const ParameterSet& p, double t0, double x0, const AuxGrid& grid) {
    if (!(x0 >= 0.0)) {
        throw PreconditionError("solve_auxiliary: x0 must be >= 0");
    }
    if (!(grid.step > 0.0) || !(grid.t_end > t0)) {
        throw PreconditionError("solve_auxiliary: need step > 0 and t_end > t0");
    }
    const auto n = static_cast<std::size_t>(std::ceil((grid.t_end - t0) / grid.step));

    AuxTrajectory out;
    out.t0 = t0;
    out.x0 = x0;
    out.step = grid.step;
    out.x.reserve(n + 1);
    out.xdot.reserve(n + 1);
    out.cum_death.reserve(n + 1);

    double xv = x0;
    double cum = 0.0;
    out.x.push_back(xv);
    out.xdot.push_back(p.Lambda(t0) - p.d(t0) * xv);
    out.cum_death.push_back(0.0);

    const double h = grid.step;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = t0 + static_cast<double>(i) * h;
        const double m = a + 0.5 * h;
        const double b = a + h;
        // int d over each half panel, Simpson
        const double d1 = simpson_panel([&](double s) { return p.d(s); }, a, 0.5 * h);
        const double d2 = simpson_panel([&](double s) { return p.d(s); }, m, 0.5 * h);
        const double dD = d1 + d2;
        // variation-of-constants increment int_a^b e^{-(D(b)-D(u))} Lambda(u) du
        const double j = (h / 6.0) * (std::exp(-dD) * p.Lambda(a) +
                                      4.0 * std::exp(-d2) * p.Lambda(m) + p.Lambda(b));
        xv = std::exp(-dD) * xv + j;
        cum += dD;
        if (!std::isfinite(xv)) {
            throw EvaluationError("solve_auxiliary: non-finite state at t=" + std::to_string(b));
        }
        out.x.push_back(xv);
        out.xdot.push_back(p.Lambda(b) - p.d(b) * xv);
        out.cum_death.push_back(cum);
    }
    return out;
}

BDeltaLimits b_delta_limits(const ParameterSet& p, const IncidenceKind& inc, double t, double x) {
    const auto lin = linearized_incidence(inc, t, x);
    const double rem = p.removal_sum(t);
    return {lin.lower - rem, lin.upper - rem};
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Permanent:
        return "Permanent";
    case Verdict::Extinct:
        return "Extinct";
    case Verdict::Inconclusive:
        return "Inconclusive";
    }
    return "Inconclusive";
}

Verdict classify_exponents(double r_p, double r_e, double band) {
    if (r_p > band) {
        return Verdict::Permanent;
    }
    if (r_e < -band) {
        return Verdict::Extinct;
    }
    return Verdict::Inconclusive;
}

namespace {

double incidence_slowest_period(const ParameterSet& p, const IncidenceKind& inc) {
    const TimeFunction* beta = incidence_beta(inc);
    return std::max(p.slowest_period(), beta ? beta->slowest_period() : 0.0);
}

struct PairScan {
    double min_lower = 0.0;
    double argmin_t = 0.0;
    double max_upper = 0.0;
    double argmax_t = 0.0;
};

/// One pass over the scan grid integrating the (lower, upper) integrand
/// pair with the same composite Simpson rule as the scalar scans.
PairScan scan_b_windows(const ParameterSet& p, const IncidenceKind& inc,
                        const AuxTrajectory& aux, const WindowStatConfig& cfg) {
    cfg.validate();
    const auto integrand = [&](double s) { return b_delta_limits(p, inc, s, aux.eval(s)); };
    const auto window = [&](double t) {
        const double lambda = cfg.lambda;
        const double q = cfg.quadrature_step;
        const auto n_full = static_cast<std::size_t>(lambda / q);
        double lo = 0.0, hi = 0.0;
        const auto add_panel = [&](double a, double w) {
            const auto f0 = integrand(a);
            const auto fm = integrand(a + 0.5 * w);
            const auto f1 = integrand(a + w);
            lo += (w / 6.0) * (f0.lower + 4.0 * fm.lower + f1.lower);
            hi += (w / 6.0) * (f0.upper + 4.0 * fm.upper + f1.upper);
        };
        for (std::size_t i = 0; i < n_full; ++i) {
            add_panel(t + static_cast<double>(i) * q, q);
        }
        const double covered = static_cast<double>(n_full) * q;
        if (lambda - covered > lambda * 1e-12) {
            add_panel(t + covered, lambda - covered);
        }
        if (!std::isfinite(lo) || !std::isfinite(hi)) {
            throw EvaluationError("threshold scan: non-finite window integral");
        }
        return std::pair<double, double>{lo, hi};
    };

    PairScan out;
    out.min_lower = std::numeric_limits<double>::infinity();
    out.max_upper = -std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::size_t>(cfg.scan_length / cfg.t_step);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = cfg.burn_in + static_cast<double>(k) * cfg.t_step;
        const auto [lo, hi] = window(t);
        if (lo < out.min_lower) {
            out.min_lower = lo;
            out.argmin_t = t;
        }
        if (hi > out.max_upper) {
            out.max_upper = hi;
            out.argmax_t = t;
        }
    }
    return out;
}

} // namespace

ThresholdReport compute_thresholds(const ParameterSet& p, const IncidenceKind& inc, double lambda,
                                   const WindowStatConfig& cfg, double x0, double band) {
    if (!(lambda > 0.0)) {
        throw PreconditionError("compute_thresholds: lambda must be positive");
    }
    if (!(x0 > 0.0)) {
        throw PreconditionError("compute_thresholds: reference x0 must be positive");
    }
    WindowStatConfig c = cfg;
    c.lambda = lambda;
    c = c.resolved(incidence_slowest_period(p, inc));

    ThresholdReport report;
    report.lambda = lambda;
    report.specialization = "general";
    report.burn_in = c.burn_in;
    report.scan_length = c.scan_length;
    report.t_step = c.t_step;
    report.quadrature_step = c.quadrature_step;
    report.x0 = x0;
    report.inconclusive_band = band;

    const double aux_step = std::min(c.quadrature_step / 2.0, 0.25);
    const AuxGrid grid{aux_step, c.burn_in + c.scan_length + lambda + aux_step};

    try {
        const AuxTrajectory aux = solve_auxiliary(p, 0.0, x0, grid);
        const PairScan scan = scan_b_windows(p, inc, aux, c);
        report.r_p = scan.min_lower;
        report.r_e = scan.max_upper;
        report.R_p = std::exp(report.r_p);
        report.R_e = std::exp(report.r_e);
        report.argmin_t = scan.argmin_t;
        report.argmax_t = scan.argmax_t;
        report.verdict = classify_exponents(report.r_p, report.r_e, band);
    } catch (const LinearizationError& e) {
        report.verdict = Verdict::Inconclusive;
        report.reason = e.what();
    }
    return report;
}

std::pair<double, double> autonomous_thresholds(const ParameterSet& p, const IncidenceKind& inc) {
    if (!p.all_constant()) {
        throw PreconditionError("autonomous_thresholds: all coefficients must be constant");
    }
    if (const TimeFunction* beta = incidence_beta(inc); beta && !beta->is_constant()) {
        throw PreconditionError("autonomous_thresholds: the contact rate must be constant");
    }
    const double x_star = p.Lambda.constant_value() / p.d.constant_value();
    const auto lin = linearized_incidence(inc, 0.0, x_star);
    const double rem = p.removal_sum(0.0);
    return {lin.lower / rem, lin.upper / rem};
}

std::pair<double, double> periodic_thresholds(const ParameterSet& p, const IncidenceKind& inc,
                                              double T) {
    if (!(T > 0.0)) {
        throw PreconditionError("periodic_thresholds: period must be positive");
    }
    if (!p.Lambda.is_constant() || !p.d.is_constant()) {
        throw PreconditionError("periodic_thresholds: Lambda and d must be constant");
    }
    const std::array<std::pair<const char*, const TimeFunction*>, 5> periodic_coeffs = {{
        {"gamma", &p.gamma},
        {"sigma", &p.sigma},
        {"alpha1", &p.alpha1},
        {"alpha2", &p.alpha2},
        {"eps", &p.eps},
    }};
    for (const auto& [name, f] : periodic_coeffs) {
        if (!is_periodic(*f, T)) {
            throw PreconditionError(std::string("periodic_thresholds: ") + name +
                                    " is not T-periodic");
        }
    }
    if (const TimeFunction* beta = incidence_beta(inc); beta && !is_periodic(*beta, T)) {
        throw PreconditionError("periodic_thresholds: the contact rate is not T-periodic");
    }

    const double x_star = p.Lambda.constant_value() / p.d.constant_value();
    constexpr std::size_t panels = 512;
    const double q = T / static_cast<double>(panels);
    double num_lo = 0.0, num_hi = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
        const double a = static_cast<double>(i) * q;
        const auto f0 = linearized_incidence(inc, a, x_star);
        const auto fm = linearized_incidence(inc, a + 0.5 * q, x_star);
        const auto f1 = linearized_incidence(inc, a + q, x_star);
        num_lo += (q / 6.0) * (f0.lower + 4.0 * fm.lower + f1.lower);
        num_hi += (q / 6.0) * (f0.upper + 4.0 * fm.upper + f1.upper);
    }
    num_lo /= T;
    num_hi /= T;
    const double rem_bar = period_average(p.gamma, T) + period_average(p.sigma, T) +
                           p.d.constant_value() + period_average(p.alpha1, T);
    return {num_lo / rem_bar, num_hi / rem_bar};
}

WindowedSpecialReport windowed_special_thresholds(const ParameterSet& p, const IncidenceKind& inc,
                                                  double lambda, const WindowStatConfig& cfg) {
    if (!p.Lambda.is_constant() || !p.d.is_constant()) {
        throw PreconditionError("windowed_special_thresholds: Lambda and d must be constant");
    }
    const TimeFunction* beta = incidence_beta(inc);
    if (beta == nullptr) {
        throw PreconditionError(
            "windowed_special_thresholds: psi*g incidences have no windowed closed form");
    }
    const bool mass_action = std::holds_alternative<MassAction>(inc);

    WindowStatConfig c = cfg;
    c.lambda = lambda;
    c = c.resolved(incidence_slowest_period(p, inc));

    WindowedSpecialReport out;
    out.tag = mass_action ? "mass_action" : "standard_qa";
    out.lambda = lambda;
    out.beta_lo = liminf_window(*beta, c).value;
    out.beta_hi = limsup_window(*beta, c).value;
    out.gamma_lo = liminf_window(p.gamma, c).value;
    out.gamma_hi = limsup_window(p.gamma, c).value;
    out.sigma_lo = liminf_window(p.sigma, c).value;
    out.sigma_hi = limsup_window(p.sigma, c).value;
    out.alpha1_lo = liminf_window(p.alpha1, c).value;
    out.alpha1_hi = limsup_window(p.alpha1, c).value;

    const double dc = p.d.constant_value();
    const double Lc = p.Lambda.constant_value();
    const double bracket_lo = out.gamma_lo + out.sigma_lo + dc + out.alpha1_lo;
    const double bracket_hi = out.gamma_hi + out.sigma_hi + dc + out.alpha1_hi;
    const double bracket_lo_u = out.gamma_lo + out.sigma_lo + dc * lambda + out.alpha1_lo;
    const double bracket_hi_u = out.gamma_hi + out.sigma_hi + dc * lambda + out.alpha1_hi;

    if (mass_action) {
        out.R_lower = Lc * out.beta_lo / (dc * bracket_lo);
        out.R_upper = Lc * out.beta_hi / (dc * bracket_hi);
        out.R_lower_uniform = Lc * out.beta_lo / (dc * bracket_lo_u);
        out.R_upper_uniform = Lc * out.beta_hi / (dc * bracket_hi_u);
    } else {
        out.R_lower = out.beta_lo / bracket_lo;
        out.R_upper = out.beta_hi / bracket_hi;
        out.R_lower_uniform = out.beta_lo / bracket_lo_u;
        out.R_upper_uniform = out.beta_hi / bracket_hi_u;
    }
    out.denominator_note =
        "printed convention keeps the bare d beside window integrals (it scales with lambda); "
        "the uniform variant uses d*lambda so every bracket term is a window integral";
    return out;
}

double lemma1_independence_probe(const ParameterSet& p, const IncidenceKind& inc, double lambda,
                                 const WindowStatConfig& cfg, std::span<const double> x0_list) {
    if (x0_list.empty()) {
        throw PreconditionError("lemma1_independence_probe: need at least one x0");
    }
    std::vector<ThresholdReport> reports;
    reports.reserve(x0_list.size());
    for (double x0 : x0_list) {
        if (!(x0 > 0.0)) {
            throw PreconditionError("lemma1_independence_probe: every x0 must be positive");
        }
        reports.push_back(compute_thresholds(p, inc, lambda, cfg, x0));
    }
    double dev = 0.0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (std::size_t j = i + 1; j < reports.size(); ++j) {
            dev = std::max(dev, std::abs(reports[i].r_p - reports[j].r_p));
            dev = std::max(dev, std::abs(reports[i].r_e - reports[j].r_e));
        }
    }
    return dev;
}

nlohmann::json WindowedSpecialReport::to_json() const {
    return {{"tag", tag},
            {"lambda", lambda},
            {"R_lower", R_lower},
            {"R_upper", R_upper},
            {"R_lower_uniform", R_lower_uniform},
            {"R_upper_uniform", R_upper_uniform},
            {"beta_window", {{"liminf", beta_lo}, {"limsup", beta_hi}}},
            {"gamma_window", {{"liminf", gamma_lo}, {"limsup", gamma_hi}}},
            {"sigma_window", {{"liminf", sigma_lo}, {"limsup", sigma_hi}}},
            {"alpha1_window", {{"liminf", alpha1_lo}, {"limsup", alpha1_hi}}},
            {"denominator_note", denominator_note}};
}

nlohmann::json ThresholdReport::to_json() const {
    nlohmann::json j = {{"lambda", lambda},
                        {"r_p", r_p},
                        {"r_e", r_e},
                        {"R_p", R_p},
                        {"R_e", R_e},
                        {"specialization", specialization},
                        {"verdict", to_string(verdict)},
                        {"inconclusive_band", inconclusive_band},
                        {"scan",
                         {{"burn_in", burn_in},
                          {"scan_length", scan_length},
                          {"t_step", t_step},
                          {"quadrature_step", quadrature_step},
                          {"argmin_t", argmin_t},
                          {"argmax_t", argmax_t},
                          {"x0", x0}}}};
    if (!reason.empty()) {
        j["reason"] = reason;
    }
    if (ratio_form) {
        j["ratio_form"] = {{"R_lower", ratio_form->first}, {"R_upper", ratio_form->second}};
    }
    if (windowed) {
        j["windowed_specialization"] = windowed->to_json();
    }
    return j;
}

} // namespace siqr
