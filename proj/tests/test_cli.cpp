#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "siqr/cli.hpp"
#include "siqr/scenario.hpp"

using namespace siqr;
namespace fs = std::filesystem;

namespace {

int invoke(std::vector<std::string> args, std::string* out_text = nullptr,
           std::string* err_text = nullptr) {
    std::vector<const char*> argv = {"siqr"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) {
        *out_text = out.str();
    }
    if (err_text) {
        *err_text = err.str();
    }
    return code;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("siqr_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_doc(const fs::path& dir, const std::string& name, const nlohmann::json& doc) {
    const fs::path p = dir / name;
    std::ofstream(p) << doc.dump(2);
    return p;
}

nlohmann::json autonomous_doc(double beta, double t_end = 200.0) {
    nlohmann::json doc;
    doc["name"] = "cli_autonomous";
    doc["kind"] = "autonomous";
    doc["params"] = {{"Lambda", {{"kind", "const"}, {"value", 1.0}}},
                     {"d", {{"kind", "const"}, {"value", 0.1}}},
                     {"gamma", {{"kind", "const"}, {"value", 0.2}}},
                     {"sigma", {{"kind", "const"}, {"value", 0.1}}},
                     {"alpha1", {{"kind", "const"}, {"value", 0.0}}},
                     {"alpha2", {{"kind", "const"}, {"value", 0.0}}},
                     {"eps", {{"kind", "const"}, {"value", 0.1}}}};
    doc["incidence"] = {{"kind", "mass_action"},
                        {"beta", {{"kind", "const"}, {"value", beta}}}};
    doc["initial"] = {{"S", 1.0}, {"I", 1.0}, {"Q", 0.0}, {"R", 0.0}};
    doc["integrator"] = {{"method", "rk45"}, {"t_end", t_end}, {"sample_stride", 1.0}};
    doc["thresholds"] = {{"lambdas", {5.0}}};
    return doc;
}

// A very light XML well-formedness scan: every opened tag closes, no
// external references.
void check_svg_wellformed(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string svg = ss.str();
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("http://") == svg.find("http://www.w3.org/2000/svg")); // namespace only
    CHECK(svg.find("href") == std::string::npos);

    // tag balance
    int depth = 0;
    for (std::size_t i = 0; i < svg.size(); ++i) {
        if (svg[i] != '<') {
            continue;
        }
        const auto end = svg.find('>', i);
        REQUIRE(end != std::string::npos);
        const std::string tag = svg.substr(i, end - i + 1);
        if (tag.rfind("<?", 0) == 0) {
            continue;
        }
        if (tag.rfind("</", 0) == 0) {
            --depth;
        } else if (tag[tag.size() - 2] != '/') {
            ++depth;
        }
        i = end;
    }
    CHECK(depth == 0);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes a CSV and an SVG") {
    const auto dir = fresh_dir("simulate");
    const auto doc_path = write_doc(dir, "scenario.json", autonomous_doc(0.5));
    std::string out;
    const int code = invoke({"simulate", doc_path.string(), "-o", (dir / "out").string()}, &out);
    CHECK(code == 0);
    CHECK(fs::exists(dir / "out" / "cli_autonomous.csv"));
    CHECK(fs::exists(dir / "out" / "cli_autonomous_I.svg"));
    check_svg_wellformed(dir / "out" / "cli_autonomous_I.svg");

    std::ifstream csv(dir / "out" / "cli_autonomous.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,S,I,Q,R,N");
}

TEST_CASE("schema errors exit 1 and name the missing path") {
    const auto dir = fresh_dir("schema");
    auto doc = autonomous_doc(0.5);
    doc["params"].erase("d");
    const auto doc_path = write_doc(dir, "broken.json", doc);
    std::string err;
    const int code = invoke({"simulate", doc_path.string(), "-o", dir.string()}, nullptr, &err);
    CHECK(code == 1);
    CHECK(err.find("params.d") != std::string::npos);
}

TEST_CASE("validation failures exit 1 and cite the violated condition") {
    const auto dir = fresh_dir("validation");
    auto doc = autonomous_doc(0.5);
    doc["params"]["d"] = {{"kind", "const"}, {"value", 0.0}};
    const auto doc_path = write_doc(dir, "invalid.json", doc);
    std::string err;
    const int code = invoke({"classify", doc_path.string()}, nullptr, &err);
    CHECK(code == 1);
    CHECK(err.find("d^-") != std::string::npos);
}

TEST_CASE("integration failures exit 2 and name the failure time") {
    const auto dir = fresh_dir("stiff");
    auto doc = autonomous_doc(0.5);
    doc["incidence"]["beta"]["value"] = 1e4;
    doc["integrator"]["rtol"] = 1e-12;
    doc["integrator"]["h_min"] = 0.5;
    doc["waive_hypotheses"] = true;
    const auto doc_path = write_doc(dir, "stiff.json", doc);
    std::string err;
    const int code = invoke({"simulate", doc_path.string(), "-o", dir.string()}, nullptr, &err);
    CHECK(code == 2);
    CHECK(err.find("integration error") != std::string::npos);
    CHECK(err.find("t=") != std::string::npos);
}

TEST_CASE("thresholds prints reports with the expected verdicts") {
    const auto dir = fresh_dir("thresholds");
    const auto doc_path = write_doc(dir, "scenario.json", autonomous_doc(0.5));
    std::string out;
    CHECK(invoke({"thresholds", doc_path.string()}, &out) == 0);
    const auto reports = nlohmann::json::parse(out);
    REQUIRE(reports.is_array());
    CHECK(reports[0].at("verdict") == "Permanent");

    // a zero-incidence variant flips to Extinct
    auto extinct = autonomous_doc(0.0);
    extinct["name"] = "cli_extinct";
    const auto extinct_path = write_doc(dir, "extinct.json", extinct);
    CHECK(invoke({"thresholds", extinct_path.string()}, &out) == 0);
    CHECK(nlohmann::json::parse(out)[0].at("verdict") == "Extinct");

    // --lambda flags override the document's windows
    CHECK(invoke({"thresholds", doc_path.string(), "--lambda", "1.0", "--lambda", "2.0"},
                 &out) == 0);
    const auto overridden = nlohmann::json::parse(out);
    REQUIRE(overridden.size() == 2);
    CHECK(overridden[0].at("lambda") == 1.0);
    CHECK(overridden[1].at("lambda") == 2.0);
}

TEST_CASE("a critically balanced scenario is inconclusive") {
    const auto dir = fresh_dir("critical");
    // beta * Lambda/d exactly equals the removal sum
    auto doc = autonomous_doc(0.04);
    const auto doc_path = write_doc(dir, "critical.json", doc);
    std::string out;
    CHECK(invoke({"thresholds", doc_path.string()}, &out) == 0);
    CHECK(nlohmann::json::parse(out)[0].at("verdict") == "Inconclusive");
}

TEST_CASE("classify prints the cross-validation verdicts") {
    const auto dir = fresh_dir("classify");
    const auto doc_path =
        write_doc(dir, "scenario.json", autonomous_doc(0.5, 5000.0));
    std::string out;
    CHECK(invoke({"classify", doc_path.string()}, &out) == 0);
    const auto j = nlohmann::json::parse(out);
    CHECK(j.at("threshold_verdict") == "Permanent");
    CHECK(j.at("cross_validation").at("trajectory_verdict") == "Persistent");
    CHECK(j.at("cross_validation").at("agreement") == true);
}

TEST_CASE("sweep prints an ordered CSV") {
    const auto dir = fresh_dir("sweep");
    const auto doc_path = write_doc(dir, "scenario.json", autonomous_doc(0.5, 100.0));
    std::string out;
    const int code = invoke({"sweep", doc_path.string(), "--path", "incidence.beta.value",
                             "--values", "0.5,0.02,0.1"},
                            &out);
    CHECK(code == 0);
    std::istringstream is(out);
    std::string line;
    std::getline(is, line);
    CHECK(line == "value,r_p,r_e,verdict");
    std::getline(is, line);
    CHECK(line.rfind("0.02,", 0) == 0);
    CHECK(line.find("Extinct") != std::string::npos);

    std::string err;
    CHECK(invoke({"sweep", doc_path.string(), "--path", "no.such.leaf", "--values", "1"},
                 nullptr, &err) == 1);
}

TEST_CASE("usage errors exit 1") {
    std::string err;
    CHECK(invoke({"simulate"}, nullptr, &err) == 1);
    CHECK(invoke({"no-such-command"}, nullptr, &err) == 1);
}

TEST_CASE("reproduce-paper writes the comparison table and four plots") {
    const auto dir = fresh_dir("paper");
    std::string out;
    const int code = invoke({"reproduce-paper", "-o", dir.string()}, &out);
    CHECK(code == 0);
    REQUIRE(fs::exists(dir / "paper_suite.csv"));
    for (const char* name : {"ma_alpha9", "ma_alpha8", "qa_alpha025", "qa_alpha023"}) {
        const fs::path svg = dir / (std::string(name) + "_I.svg");
        REQUIRE(fs::exists(svg));
        check_svg_wellformed(svg);
    }

    std::ifstream csv(dir / "paper_suite.csv");
    std::string header, row1;
    std::getline(csv, header);
    std::getline(csv, row1);
    CHECK(header.find("paper_reported") != std::string::npos);
    CHECK(row1.find("1.10599") != std::string::npos);
}

} // TEST_SUITE
