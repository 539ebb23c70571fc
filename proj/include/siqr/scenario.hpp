#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "siqr/model.hpp"
#include "siqr/odeint.hpp"
#include "siqr/thresholds.hpp"

namespace siqr {

enum class ScenarioKind { General, Autonomous, AsymptoticallyAutonomous, Periodic };

std::string to_string(ScenarioKind k);

struct ThresholdRequest {
    std::vector<double> lambdas = {1.0};
    WindowStatConfig window;
    double band = 1e-3;
    double x0 = 1.0;
};

struct Scenario {
    std::string name;
    ParameterSet params;
    IncidenceKind incidence = MassAction{TimeFunction::constant(0.0)};
    State initial;
    IntegratorConfig integrator;
    ThresholdRequest thresholds;
    ScenarioKind kind = ScenarioKind::General;
    double period = 0.0;                           ///< Periodic scenarios
    std::optional<ParameterSet> limit_params;      ///< AsymptoticallyAutonomous
    std::optional<IncidenceKind> limit_incidence;  ///< ditto
    bool waive_hypotheses = false;
};

/// Parses and fully validates a scenario document. Structural problems
/// raise SchemaError (with the offending path); semantic problems raise
/// ScenarioValidationError listing every violated condition.
Scenario load_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::string& path);

/// Semantic validation used by load_scenario; empty result means valid.
std::vector<std::string> validate_scenario(const Scenario& sc);

enum class TrajectoryVerdict { Persistent, Extinct, Undetermined };

std::string to_string(TrajectoryVerdict v);

/// Persistent: min I over the trailing fraction of [t0, t_end] stays above
/// the floor and the run is long enough to mean something (t_end >= 5000).
/// Extinct: I(t_end) under the ceiling. Undetermined otherwise.
TrajectoryVerdict classify_trajectory(const Trajectory& traj, double persistent_floor = 1e-6,
                                      double extinct_ceiling = 1e-10,
                                      double trailing_fraction = 0.3,
                                      double min_horizon = 5000.0);

struct CrossValidation {
    Verdict threshold_verdict = Verdict::Inconclusive;
    TrajectoryVerdict trajectory_verdict = TrajectoryVerdict::Undetermined;
    bool agreement = false;
    double persistent_floor = 1e-6;
    double extinct_ceiling = 1e-10;
    double trailing_fraction = 0.3;
    double t_end = 0.0;

    nlohmann::json to_json() const;
};

/// agreement is true iff the verdicts match or either side is
/// Inconclusive/Undetermined.
CrossValidation cross_validate(Verdict threshold_verdict, const Trajectory& traj);

/// Checks the extinction envelope: anchored at the first sample past
/// anchor_fraction of the horizon, log I(t) must stay below
/// log I(T1) + (r_e/lambda + band)(t - T1) for every sample past
/// check_fraction of the horizon ("eventually", numerically). Samples at
/// or below zero count as under the envelope.
bool extinction_envelope_holds(const Trajectory& traj, double r_e, double lambda,
                               double band = 1e-3, double anchor_fraction = 0.2,
                               double check_fraction = 0.6);

/// Thresholds for every requested window, dispatching to the autonomous or
/// periodic closed forms when the scenario kind permits; general scans
/// otherwise, with the windowed specializations attached for beta-kind
/// incidences with constant Lambda and d.
std::vector<ThresholdReport> run_thresholds(const Scenario& sc);

/// One verdict across the per-lambda reports: a single decisive window is
/// enough for either conclusion; contradictory windows collapse to
/// Inconclusive.
Verdict combine_verdicts(const std::vector<ThresholdReport>& reports);

struct RunResult {
    Trajectory trajectory;
    std::vector<ThresholdReport> reports;
    Verdict threshold_verdict = Verdict::Inconclusive;
    CrossValidation cross;
};

RunResult run(const Scenario& sc);

/// One row of the seasonal-scenario comparison table.
struct PaperSuiteRow {
    std::string name;
    double alpha = 0.0;
    double lambda = 0.0;
    double paper_reported = 0.0; ///< reported metadata, not a gate
    std::string paper_verdict;
    double r_p = 0.0, r_e = 0.0, R_p = 1.0, R_e = 1.0;
    double R7_printed_lower = 0.0, R7_printed_upper = 0.0;
    double R7_uniform_lower = 0.0, R7_uniform_upper = 0.0;
    std::string threshold_verdict;
    std::string trajectory_verdict;
    bool agreement = false;
    State initial; ///< recorded with the results for reproducibility
};

struct PaperSuite {
    std::vector<Scenario> scenarios;
    std::vector<RunResult> results;
    std::vector<PaperSuiteRow> rows;

    std::string comparison_csv() const;
};

/// The four seasonal scenarios (mass-action alpha=9/8 at lambda=21,
/// quarantine-adjusted alpha=0.25/0.23 at lambda=0.2), run and tabulated
/// against the reported constants.
PaperSuite paper_suite();

struct SweepRow {
    double value = 0.0;
    double r_p = 0.0;
    double r_e = 0.0;
    Verdict verdict = Verdict::Inconclusive;
};

/// Re-runs the thresholds of the scenario document once per value, with
/// the scalar leaf at `dotted_path` (array elements addressed numerically,
/// e.g. "thresholds.lambdas.0") replaced by each value. Rows come back
/// ordered by value. Rows run concurrently.
std::vector<SweepRow> sweep(const nlohmann::json& scenario_doc, const std::string& dotted_path,
                            std::vector<double> values);

std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace siqr
