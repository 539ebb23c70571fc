#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "siqr/model.hpp"

namespace siqr {

enum class StepMethod { RK4Fixed, RK45Adaptive };

struct IntegratorConfig {
    StepMethod method = StepMethod::RK45Adaptive;
    double h = 0.01;    ///< fixed step (RK4Fixed)
    double rtol = 1e-8; ///< the extinction checks track I down to 1e-10, so
    double atol = 1e-12; ///< atol sits below that
    double h_min = 1e-10;
    double h_max = 10.0;
    double t_end = 100.0;
    double sample_stride = 1.0;
    double positivity_tolerance = 1e-10;

    void validate() const;
};

struct TrajectoryStats {
    std::uint64_t steps = 0;
    std::uint64_t rejections = 0;
    double min_step = std::numeric_limits<double>::infinity();
    bool clamped = false; ///< any positivity clamp or positivity rejection
};

/// Dense samples of one solution at t0, t0+stride, ..., plus the end time.
struct Trajectory {
    std::vector<State> samples;
    TrajectoryStats stats;

    const State& final_state() const { return samples.back(); }
    double t_begin() const { return samples.front().t; }
    double t_end() const { return samples.back().t; }

    /// `t,S,I,Q,R,N` header, one row per sample, 17 significant digits.
    void write_csv(std::ostream& os) const;
};

/// Integrates the SIQR system from s0 to cfg.t_end, stepping exactly onto
/// the sample times. A component entering (-positivity_tolerance, 0) is
/// clamped to 0; a step that would go below -positivity_tolerance is
/// rejected and retried at half step (an error in fixed-step mode).
Trajectory integrate(const ParameterSet& p, const IncidenceKind& inc, const State& s0,
                     const IntegratorConfig& cfg);

/// Richardson self-convergence of the fixed RK4 kernel: integrates at h,
/// h/2, h/4 and measures final-state errors against an h/8 reference.
struct ConvergenceProbe {
    double observed_order = 0.0;
    bool degenerate = false; ///< errors at rounding level; order meaningless
};

/// Throws ProbeInvalidError when positivity handling triggered (the error
/// model no longer applies).
ConvergenceProbe convergence_probe(const ParameterSet& p, const IncidenceKind& inc,
                                   const State& s0, double h, double t_end);

} // namespace siqr
