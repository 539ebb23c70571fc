#include "siqr/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "siqr/numfmt.hpp"

namespace siqr {

namespace {

constexpr double kLogFloor = 1e-30;

struct SeriesDef {
    const char* name;
    const char* color;
    double (*get)(const State&);
};

const SeriesDef kSeries[] = {
    {"S", "#1f77b4", [](const State& s) { return s.S; }},
    {"I", "#d62728", [](const State& s) { return s.I; }},
    {"Q", "#9467bd", [](const State& s) { return s.Q; }},
    {"R", "#2ca02c", [](const State& s) { return s.R; }},
    {"N", "#7f7f7f", [](const State& s) { return s.total(); }},
};

const SeriesDef* find_series(const std::string& name) {
    for (const auto& s : kSeries) {
        if (name == s.name) {
            return &s;
        }
    }
    return nullptr;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// largest "nice" step (1/2/5 x 10^k) giving at most `max_ticks` intervals
double nice_step(double span, int max_ticks) {
    const double raw = span / max_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

} // namespace

void PlotSpec::validate() const {
    if (series.empty()) {
        throw PreconditionError("PlotSpec: select at least one series");
    }
    for (const auto& name : series) {
        if (find_series(name) == nullptr) {
            throw PreconditionError("PlotSpec: unknown series '" + name + "'");
        }
    }
}

std::string render_trajectory_svg(const Trajectory& traj, const PlotSpec& spec) {
    spec.validate();
    if (traj.samples.size() < 2) {
        throw PreconditionError("render_trajectory_svg: need at least two samples");
    }

    constexpr double width = 880.0, height = 520.0;
    constexpr double ml = 72.0, mr = 24.0, mt = 42.0, mb = 52.0;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    const bool logy = spec.log_I;
    const auto yval = [&](double v) { return logy ? std::log10(std::max(v, kLogFloor)) : v; };

    double x_lo = spec.x_range ? spec.x_range->first : traj.t_begin();
    double x_hi = spec.x_range ? spec.x_range->second : traj.t_end();
    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -std::numeric_limits<double>::infinity();
    if (spec.y_range) {
        y_lo = yval(spec.y_range->first);
        y_hi = yval(spec.y_range->second);
    } else {
        for (const auto& name : spec.series) {
            const SeriesDef* def = find_series(name);
            for (const auto& s : traj.samples) {
                if (s.t < x_lo || s.t > x_hi) {
                    continue;
                }
                const double v = yval(def->get(s));
                y_lo = std::min(y_lo, v);
                y_hi = std::max(y_hi, v);
            }
        }
    }
    if (!(x_hi > x_lo)) {
        x_hi = x_lo + 1.0;
    }
    if (!(y_hi > y_lo)) {
        y_hi = y_lo + 1.0;
    }
    const double pad = 0.04 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    const auto X = [&](double t) { return ml + (t - x_lo) / (x_hi - x_lo) * plot_w; };
    const auto Y = [&](double v) { return mt + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    if (!spec.title.empty()) {
        svg << "<text x=\"" << px(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"15\">"
            << spec.title << "</text>\n";
    }

    // frame
    svg << "<rect x=\"" << px(ml) << "\" y=\"" << px(mt) << "\" width=\"" << px(plot_w)
        << "\" height=\"" << px(plot_h) << "\" fill=\"none\" stroke=\"#333333\" "
           "stroke-width=\"1\"/>\n";

    // x ticks
    const double xstep = nice_step(x_hi - x_lo, 7);
    for (double t = std::ceil(x_lo / xstep) * xstep; t <= x_hi + 1e-9 * xstep; t += xstep) {
        const double x = X(t);
        svg << "<line x1=\"" << px(x) << "\" y1=\"" << px(mt + plot_h) << "\" x2=\"" << px(x)
            << "\" y2=\"" << px(mt + plot_h + 5) << "\" stroke=\"#333333\"/>\n"
            << "<text x=\"" << px(x) << "\" y=\"" << px(mt + plot_h + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_shortest(t) << "</text>\n";
    }

    // y ticks
    const double ystep = nice_step(y_hi - y_lo, 6);
    for (double v = std::ceil(y_lo / ystep) * ystep; v <= y_hi + 1e-9 * ystep; v += ystep) {
        const double y = Y(v);
        svg << "<line x1=\"" << px(ml - 5) << "\" y1=\"" << px(y) << "\" x2=\"" << px(ml)
            << "\" y2=\"" << px(y) << "\" stroke=\"#333333\"/>\n"
            << "<text x=\"" << px(ml - 9) << "\" y=\"" << px(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">";
        if (logy) {
            svg << "1e" << format_shortest(v);
        } else {
            svg << format_shortest(v);
        }
        svg << "</text>\n";
    }

    // axis labels
    svg << "<text x=\"" << px(ml + plot_w / 2) << "\" y=\"" << px(height - 12)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">t</text>\n";

    // series
    for (const auto& name : spec.series) {
        const SeriesDef* def = find_series(name);
        svg << "<polyline fill=\"none\" stroke=\"" << def->color
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& s : traj.samples) {
            if (s.t < x_lo || s.t > x_hi) {
                continue;
            }
            svg << px(X(s.t)) << ',' << px(Y(yval(def->get(s)))) << ' ';
        }
        svg << "\"/>\n";
    }

    // legend
    double ly = mt + 16.0;
    for (const auto& name : spec.series) {
        const SeriesDef* def = find_series(name);
        svg << "<line x1=\"" << px(ml + plot_w - 70) << "\" y1=\"" << px(ly - 4) << "\" x2=\""
            << px(ml + plot_w - 46) << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << def->color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << px(ml + plot_w - 40) << "\" y=\"" << px(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << name
            << (logy && name == std::string("I") ? " (log10)" : "") << "</text>\n";
        ly += 18.0;
    }

    svg << "</svg>\n";
    return svg.str();
}

void write_trajectory_svg(const Trajectory& traj, const PlotSpec& spec) {
    if (spec.output_path.empty()) {
        throw PreconditionError("write_trajectory_svg: output_path is empty");
    }
    std::ofstream out(spec.output_path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + spec.output_path + "' for writing");
    }
    out << render_trajectory_svg(traj, spec);
}

} // namespace siqr
