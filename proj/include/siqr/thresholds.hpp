#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "siqr/model.hpp"
#include "siqr/timefn.hpp"

namespace siqr {

/// Grid for the auxiliary-equation solver.
struct AuxGrid {
    double step = 0.05;
    double t_end = 1500.0;
};

/// Dense solution of the disease-free susceptible equation
/// x' = Lambda(t) - d(t) x, evaluated through the variation-of-constants
/// form: the only numerical error is panel quadrature, not ODE stepping.
///
/// Samples sit on the uniform grid t0 + i*step; in-between values come
/// from cubic Hermite interpolation with the exact derivative
/// Lambda(t) - d(t) x at the nodes.
struct AuxTrajectory {
    double t0 = 0.0;
    double x0 = 1.0;
    double step = 0.0;
    std::vector<double> x;          ///< x(t_i)
    std::vector<double> xdot;       ///< Lambda(t_i) - d(t_i) x(t_i)
    std::vector<double> cum_death;  ///< int_{t0}^{t_i} d(s) ds

    double t_at(std::size_t i) const { return t0 + static_cast<double>(i) * step; }
    double t_end() const { return t_at(x.size() - 1); }

    double eval(double t) const;

    /// e^{-int d} over the whole horizon: how much two solutions contract
    /// toward each other.
    double contraction_factor() const;
};

AuxTrajectory solve_auxiliary(const ParameterSet& p, double t0, double x0, const AuxGrid& grid);

/// liminf/limsup over delta of
///   b_delta(t, x) = phi(t,x,0,0,delta)/delta - (gamma+sigma+d+alpha1)(t).
struct BDeltaLimits {
    double lower = 0.0;
    double upper = 0.0;
};

BDeltaLimits b_delta_limits(const ParameterSet& p, const IncidenceKind& inc, double t, double x);

enum class Verdict { Permanent, Extinct, Inconclusive };

std::string to_string(Verdict v);

/// The windowed mass-action / standard / quarantine-adjusted threshold
/// ratios. The denominators are dimensionally mixed as printed (a bare,
/// un-windowed d next to window integrals); the uniformly windowed variant
/// replaces that d with d*lambda so every bracket term is a window
/// integral. Both are reported.
struct WindowedSpecialReport {
    std::string tag;        ///< "mass_action" or "standard_qa"
    double lambda = 0.0;
    double R_lower = 0.0;   ///< printed convention, liminf statistics
    double R_upper = 0.0;   ///< printed convention, limsup statistics
    double R_lower_uniform = 0.0;
    double R_upper_uniform = 0.0;
    double beta_lo = 0.0, beta_hi = 0.0;
    double gamma_lo = 0.0, gamma_hi = 0.0;
    double sigma_lo = 0.0, sigma_hi = 0.0;
    double alpha1_lo = 0.0, alpha1_hi = 0.0;
    std::string denominator_note;

    nlohmann::json to_json() const;
};

/// Threshold estimates for one window length, with the scan provenance
/// needed to reproduce them.
struct ThresholdReport {
    double lambda = 0.0;
    double r_p = 0.0;
    double r_e = 0.0;
    double R_p = 1.0;
    double R_e = 1.0;
    std::string specialization = "general"; ///< general|autonomous|periodic
    double burn_in = 0.0;
    double scan_length = 0.0;
    double t_step = 0.0;
    double quadrature_step = 0.0;
    double argmin_t = 0.0;
    double argmax_t = 0.0;
    double x0 = 1.0;
    Verdict verdict = Verdict::Inconclusive;
    double inconclusive_band = 1e-3;
    std::string reason; ///< set when the verdict was forced (e.g. undefined linearization)
    std::optional<std::pair<double, double>> ratio_form; ///< R^aut / R^per pair when specialized
    std::optional<WindowedSpecialReport> windowed;       ///< attached for beta-kind incidences

    nlohmann::json to_json() const;
};

/// Classifies r_p/r_e against the inconclusive band on the exponent.
Verdict classify_exponents(double r_p, double r_e, double band);

/// The general nonautonomous thresholds: solves the auxiliary equation
/// from x0, scans windowed integrals of the b_delta limits after the
/// burn-in, exponentiates and classifies. An undefined linearization
/// yields verdict Inconclusive with the reason recorded.
ThresholdReport compute_thresholds(const ParameterSet& p, const IncidenceKind& inc, double lambda,
                                   const WindowStatConfig& cfg, double x0 = 1.0,
                                   double band = 1e-3);

/// Closed-form thresholds for constant coefficients:
/// liminf/limsup_{delta->0} phi(Lambda/d,0,0,delta) / (delta * (gamma+sigma+d+alpha1)).
std::pair<double, double> autonomous_thresholds(const ParameterSet& p, const IncidenceKind& inc);

/// Period-averaged thresholds for T-periodic coefficients with constant
/// Lambda and d.
std::pair<double, double> periodic_thresholds(const ParameterSet& p, const IncidenceKind& inc,
                                              double T);

/// The windowed specializations for the three beta-kind incidences with
/// constant Lambda and d.
WindowedSpecialReport windowed_special_thresholds(const ParameterSet& p, const IncidenceKind& inc,
                                                  double lambda, const WindowStatConfig& cfg);

/// Recomputes the general thresholds from every x0 in the list and returns
/// the largest pairwise deviation across both exponents. The thresholds
/// are independent of the auxiliary solution, so this should sit at
/// rounding level once the burn-in has eaten the transient.
double lemma1_independence_probe(const ParameterSet& p, const IncidenceKind& inc, double lambda,
                                 const WindowStatConfig& cfg, std::span<const double> x0_list);

} // namespace siqr
