#include "siqr/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "siqr/plot.hpp"
#include "siqr/scenario.hpp"

namespace siqr {

namespace {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out << content;
}

void write_trajectory_files(const Trajectory& traj, const std::string& name,
                            const fs::path& dir) {
    fs::create_directories(dir);
    {
        std::ofstream csv(dir / (name + ".csv"), std::ios::binary);
        if (!csv) {
            throw Error("cannot open trajectory CSV for writing");
        }
        traj.write_csv(csv);
    }
    PlotSpec spec;
    spec.series = {"I"};
    spec.log_I = classify_trajectory(traj) == TrajectoryVerdict::Extinct;
    spec.title = name;
    spec.output_path = (dir / (name + "_I.svg")).string();
    write_trajectory_svg(traj, spec);
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::ostream& out) {
    const Scenario sc = load_scenario_file(scenario_path);
    const Trajectory traj = integrate(sc.params, sc.incidence, sc.initial, sc.integrator);
    write_trajectory_files(traj, sc.name, out_dir);
    out << "wrote " << (fs::path(out_dir) / (sc.name + ".csv")).string() << " and "
        << (fs::path(out_dir) / (sc.name + "_I.svg")).string() << "\n";
    return 0;
}

int cmd_thresholds(const std::string& scenario_path, const std::vector<double>& lambdas,
                   std::ostream& out) {
    Scenario sc = load_scenario_file(scenario_path);
    if (!lambdas.empty()) {
        sc.thresholds.lambdas = lambdas;
    }
    const auto reports = run_thresholds(sc);
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) {
        j.push_back(r.to_json());
    }
    out << j.dump(2) << "\n";
    return 0;
}

int cmd_classify(const std::string& scenario_path, std::ostream& out) {
    const Scenario sc = load_scenario_file(scenario_path);
    const RunResult result = run(sc);
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : result.reports) {
        reports.push_back(r.to_json());
    }
    const nlohmann::json j = {{"name", sc.name},
                              {"threshold_verdict", to_string(result.threshold_verdict)},
                              {"cross_validation", result.cross.to_json()},
                              {"reports", std::move(reports)}};
    out << j.dump(2) << "\n";
    return 0;
}

int cmd_reproduce_paper(const std::string& out_dir, std::ostream& out) {
    const PaperSuite suite = paper_suite();
    fs::create_directories(out_dir);
    write_text_file(fs::path(out_dir) / "paper_suite.csv", suite.comparison_csv());
    for (std::size_t i = 0; i < suite.scenarios.size(); ++i) {
        PlotSpec spec;
        spec.series = {"I"};
        spec.log_I = suite.results[i].cross.trajectory_verdict == TrajectoryVerdict::Extinct;
        spec.title = suite.scenarios[i].name;
        spec.output_path =
            (fs::path(out_dir) / (suite.scenarios[i].name + "_I.svg")).string();
        write_trajectory_svg(suite.results[i].trajectory, spec);
    }
    out << "wrote " << (fs::path(out_dir) / "paper_suite.csv").string() << " and "
        << suite.scenarios.size() << " trajectory plots\n";
    return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& path,
              const std::vector<double>& values, std::ostream& out) {
    std::ifstream in(scenario_path);
    if (!in) {
        throw SchemaError(scenario_path, "cannot open scenario file");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(scenario_path, std::string("JSON parse error: ") + e.what());
    }
    const auto rows = sweep(doc, path, values);
    out << sweep_csv(rows);
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"nonautonomous SIQR simulation and threshold analysis"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".", sweep_path;
    std::vector<double> lambdas, sweep_values;

    auto* simulate = app.add_subcommand("simulate", "integrate a scenario and write CSV + SVG");
    simulate->add_option("scenario", scenario_path, "scenario document")->required();
    simulate->add_option("-o,--output", out_dir, "output directory");

    auto* thresholds =
        app.add_subcommand("thresholds", "print threshold reports as JSON");
    thresholds->add_option("scenario", scenario_path, "scenario document")->required();
    thresholds->add_option("--lambda", lambdas, "window length(s) overriding the document");

    auto* classify =
        app.add_subcommand("classify", "thresholds plus trajectory cross-validation");
    classify->add_option("scenario", scenario_path, "scenario document")->required();

    auto* reproduce = app.add_subcommand(
        "reproduce-paper", "run the seasonal comparison suite and write its table and plots");
    reproduce->add_option("-o,--output", out_dir, "output directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "thresholds across a parameter range");
    sweep_cmd->add_option("scenario", scenario_path, "scenario document")->required();
    sweep_cmd->add_option("--path", sweep_path, "dotted path of the scalar leaf")->required();
    sweep_cmd->add_option("--values", sweep_values, "values to sweep")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(scenario_path, out_dir, out);
        }
        if (thresholds->parsed()) {
            return cmd_thresholds(scenario_path, lambdas, out);
        }
        if (classify->parsed()) {
            return cmd_classify(scenario_path, out);
        }
        if (reproduce->parsed()) {
            return cmd_reproduce_paper(out_dir, out);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(scenario_path, sweep_path, sweep_values, out);
        }
        err << "error: no subcommand\n";
        return 1;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << "\n";
        return 1;
    } catch (const ScenarioValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const IntegrationError& e) {
        err << "integration error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace siqr
