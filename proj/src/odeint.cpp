#include "siqr/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "siqr/numfmt.hpp"

namespace siqr {

void IntegratorConfig::validate() const {
    if (method == StepMethod::RK4Fixed && !(h > 0.0)) {
        throw PreconditionError("IntegratorConfig: fixed step h must be positive");
    }
    if (!(rtol > 0.0) || !(atol > 0.0)) {
        throw PreconditionError("IntegratorConfig: rtol and atol must be positive");
    }
    if (!(h_min > 0.0) || !(h_max >= h_min)) {
        throw PreconditionError("IntegratorConfig: need 0 < h_min <= h_max");
    }
    if (!(sample_stride > 0.0)) {
        throw PreconditionError("IntegratorConfig: sample_stride must be positive");
    }
    if (!(positivity_tolerance >= 0.0)) {
        throw PreconditionError("IntegratorConfig: positivity_tolerance must be >= 0");
    }
}

namespace {

struct V4 {
    double S = 0.0, I = 0.0, Q = 0.0, R = 0.0;
};

V4 axpy(const V4& y, double a, const V4& k) {
    return {y.S + a * k.S, y.I + a * k.I, y.Q + a * k.Q, y.R + a * k.R};
}

const char* nonfinite_component(const V4& v) {
    if (!std::isfinite(v.S)) return "S";
    if (!std::isfinite(v.I)) return "I";
    if (!std::isfinite(v.Q)) return "Q";
    if (!std::isfinite(v.R)) return "R";
    return nullptr;
}

double min_component(const V4& v) {
    return std::min(std::min(v.S, v.I), std::min(v.Q, v.R));
}

class System {
public:
    System(const ParameterSet& p, const IncidenceKind& inc) : p_(p), inc_(inc) {}

    V4 operator()(double t, const V4& y) const {
        State s;
        s.S = y.S;
        s.I = y.I;
        s.Q = y.Q;
        s.R = y.R;
        s.t = t;
        const Derivative d = rhs(p_, inc_, s);
        return {d.dS, d.dI, d.dQ, d.dR};
    }

private:
    const ParameterSet& p_;
    const IncidenceKind& inc_;
};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b(5th) - b(4th): weights of the embedded error estimate
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
    V4 y;
    V4 err; // embedded 5th-vs-4th order difference
};

StepResult dopri_step(const System& f, double t, const V4& y, double h) {
    const V4 k1 = f(t, y);
    const V4 k2 = f(t + c2 * h, axpy(y, h * a21, k1));
    V4 s = axpy(y, h * a31, k1);
    s = axpy(s, h * a32, k2);
    const V4 k3 = f(t + c3 * h, s);
    s = axpy(y, h * a41, k1);
    s = axpy(s, h * a42, k2);
    s = axpy(s, h * a43, k3);
    const V4 k4 = f(t + c4 * h, s);
    s = axpy(y, h * a51, k1);
    s = axpy(s, h * a52, k2);
    s = axpy(s, h * a53, k3);
    s = axpy(s, h * a54, k4);
    const V4 k5 = f(t + c5 * h, s);
    s = axpy(y, h * a61, k1);
    s = axpy(s, h * a62, k2);
    s = axpy(s, h * a63, k3);
    s = axpy(s, h * a64, k4);
    s = axpy(s, h * a65, k5);
    const V4 k6 = f(t + h, s);

    V4 y5 = axpy(y, h * b1, k1);
    y5 = axpy(y5, h * b3, k3);
    y5 = axpy(y5, h * b4, k4);
    y5 = axpy(y5, h * b5, k5);
    y5 = axpy(y5, h * b6, k6);

    const V4 k7 = f(t + h, y5);
    V4 err{};
    err = axpy(err, h * e1, k1);
    err = axpy(err, h * e3, k3);
    err = axpy(err, h * e4, k4);
    err = axpy(err, h * e5, k5);
    err = axpy(err, h * e6, k6);
    err = axpy(err, h * e7, k7);

    return {y5, err};
}

double error_norm(const V4& err, const V4& y_old, const V4& y_new, double rtol, double atol) {
    const auto comp = [&](double e, double a, double b) {
        const double sc = atol + rtol * std::max(std::abs(a), std::abs(b));
        return (e / sc) * (e / sc);
    };
    return std::sqrt(0.25 * (comp(err.S, y_old.S, y_new.S) + comp(err.I, y_old.I, y_new.I) +
                             comp(err.Q, y_old.Q, y_new.Q) + comp(err.R, y_old.R, y_new.R)));
}

V4 rk4_step(const System& f, double t, const V4& y, double h) {
    const V4 k1 = f(t, y);
    const V4 k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const V4 k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const V4 k4 = f(t + h, axpy(y, h, k3));
    V4 out = axpy(y, h / 6.0, k1);
    out = axpy(out, h / 3.0, k2);
    out = axpy(out, h / 3.0, k3);
    out = axpy(out, h / 6.0, k4);
    return out;
}

} // namespace

Trajectory integrate(const ParameterSet& p, const IncidenceKind& inc, const State& s0,
                     const IntegratorConfig& cfg) {
    cfg.validate();
    if (!s0.valid()) {
        throw PreconditionError("integrate: initial state must be finite and nonnegative");
    }
    if (!(cfg.t_end > s0.t)) {
        throw PreconditionError("integrate: t_end must exceed the initial time");
    }

    const System f(p, inc);
    const double ptol = cfg.positivity_tolerance;
    const bool adaptive = cfg.method == StepMethod::RK45Adaptive;

    Trajectory traj;
    V4 y{s0.S, s0.I, s0.Q, s0.R};
    double t = s0.t;
    traj.samples.push_back(s0);

    // Clamp a component lying in (-ptol, 0] to exactly 0; report the first
    // component below -ptol instead. Positive values below the smallest
    // normal double also flush to 0: subnormals cannot track the decay any
    // further (the update rounds away) and would otherwise plateau.
    const auto clamp_or_reject = [&](V4& v) -> const char* {
        const auto fix = [&](double& c, const char* name) -> const char* {
            if (c < -ptol) {
                return name;
            }
            if (c < 0.0 || (c > 0.0 && c < std::numeric_limits<double>::min())) {
                c = 0.0;
                traj.stats.clamped = true;
            }
            return nullptr;
        };
        if (const char* n = fix(v.S, "S")) return n;
        if (const char* n = fix(v.I, "I")) return n;
        if (const char* n = fix(v.Q, "Q")) return n;
        return fix(v.R, "R");
    };

    double h = adaptive ? std::min(cfg.h_max, std::max(cfg.h_min, cfg.sample_stride / 4.0))
                        : cfg.h;

    std::size_t k = 1;
    while (t < cfg.t_end) {
        const double target = std::min(s0.t + static_cast<double>(k) * cfg.sample_stride,
                                       cfg.t_end);
        while (t < target) {
            const bool lands = h >= target - t;
            const double h_try = lands ? target - t : h;

            StepResult step;
            double en = 0.0;
            if (adaptive) {
                step = dopri_step(f, t, y, h_try);
                en = error_norm(step.err, y, step.y, cfg.rtol, cfg.atol);
            } else {
                step.y = rk4_step(f, t, y, h_try);
            }

            if (const char* n = nonfinite_component(step.y)) {
                throw IntegrationError(t, std::string("component ") + n + " became non-finite");
            }

            if (adaptive && en > 1.0) {
                ++traj.stats.rejections;
                h = h_try * std::max(0.2, 0.9 * std::pow(en, -0.2));
                if (h < cfg.h_min) {
                    throw IntegrationError(t, "step size underflow (h < h_min)");
                }
                continue;
            }

            V4 y_new = step.y;
            if (min_component(y_new) < -ptol) {
                ++traj.stats.rejections;
                traj.stats.clamped = true;
                if (!adaptive) {
                    throw IntegrationError(
                        t, "state left the nonnegative orthant under a fixed step");
                }
                h = h_try * 0.5;
                if (h < cfg.h_min) {
                    throw IntegrationError(t, "step size underflow while restoring positivity");
                }
                continue;
            }
            if (const char* n = clamp_or_reject(y_new)) {
                throw IntegrationError(t, std::string("component ") + n +
                                              " fell below the positivity tolerance");
            }

            y = y_new;
            t = lands ? target : t + h_try;
            ++traj.stats.steps;
            traj.stats.min_step = std::min(traj.stats.min_step, h_try);
            if (adaptive) {
                const double grow =
                    en > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2))) : 5.0;
                h = std::min(cfg.h_max, std::max(cfg.h_min, h_try * grow));
            }
        }
        traj.samples.push_back(State{y.S, y.I, y.Q, y.R, t});
        ++k;
    }
    return traj;
}

void Trajectory::write_csv(std::ostream& os) const {
    os << "t,S,I,Q,R,N\n";
    for (const auto& s : samples) {
        os << format_sig17(s.t) << ',' << format_sig17(s.S) << ',' << format_sig17(s.I) << ','
           << format_sig17(s.Q) << ',' << format_sig17(s.R) << ',' << format_sig17(s.total())
           << '\n';
    }
}

ConvergenceProbe convergence_probe(const ParameterSet& p, const IncidenceKind& inc,
                                   const State& s0, double h, double t_end) {
    if (!(h > 0.0)) {
        throw PreconditionError("convergence_probe: h must be positive");
    }
    const auto run = [&](double step) {
        IntegratorConfig cfg;
        cfg.method = StepMethod::RK4Fixed;
        cfg.h = step;
        cfg.t_end = t_end;
        cfg.sample_stride = t_end - s0.t;
        return integrate(p, inc, s0, cfg);
    };
    const Trajectory ref = run(h / 8.0);
    const Trajectory t1 = run(h);
    const Trajectory t2 = run(h / 2.0);
    const Trajectory t4 = run(h / 4.0);
    if (ref.stats.clamped || t1.stats.clamped || t2.stats.clamped || t4.stats.clamped) {
        throw ProbeInvalidError("convergence probe invalid: positivity clamping occurred");
    }
    const auto dist = [](const State& a, const State& b) {
        return std::sqrt((a.S - b.S) * (a.S - b.S) + (a.I - b.I) * (a.I - b.I) +
                         (a.Q - b.Q) * (a.Q - b.Q) + (a.R - b.R) * (a.R - b.R));
    };
    const State& r = ref.final_state();
    const double scale = std::max(1.0, r.total());
    const double err1 = dist(t1.final_state(), r);
    const double err2 = dist(t2.final_state(), r);
    const double err4 = dist(t4.final_state(), r);
    if (err1 <= 1e-13 * scale || err2 <= 1e-14 * scale || err4 <= 1e-15 * scale) {
        return {0.0, true};
    }
    return {0.5 * (std::log2(err1 / err2) + std::log2(err2 / err4)), false};
}

} // namespace siqr
