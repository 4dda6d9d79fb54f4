#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "netmeasure/errors.hpp"
#include "netmeasure/harness.hpp"
#include "netmeasure/text.hpp"

namespace netmeasure {

namespace {

void write_metadata(std::ostream& out, const Metadata& metadata) {
    for (const auto& [key, value] : metadata) {
        out << "# " << key << '=' << value << '\n';
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    return quoted + '"';
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    write_metadata(out, result.metadata);
    out << "grid_value,realized_rate,mean_estimate,mean_bias,stddev,n_replications,"
           "kappa,flagged,dropped,truth,series\n";
    for (const auto& series : result.series) {
        for (const auto& p : series.points) {
            out << format_number(p.grid_value) << ',' << format_number(p.realized_rate) << ','
                << format_number(p.mean_estimate) << ',' << format_number(p.mean_bias) << ','
                << format_number(p.stddev) << ',' << p.replications << ','
                << format_number(p.kappa) << ',' << (p.flagged ? 1 : 0) << ',' << p.dropped << ','
                << format_number(p.truth) << ',' << csv_field(series.label) << '\n';
        }
    }
}

void write_outdegree_csv(std::ostream& out, const OutdegreeResult& result) {
    write_metadata(out, result.metadata);
    out << "outdegree,realized_rate,mean_estimate,mean_bias,stddev,n_replications,truth,method\n";
    for (const auto& row : result.rows) {
        for (std::size_t m = 0; m < result.methods.size(); ++m) {
            out << row.degree << ',' << format_number(result.realized_rate[m]) << ','
                << format_number(row.mean_estimate[m]) << ',' << format_number(row.mean_bias[m])
                << ',' << format_number(row.stddev[m]) << ',' << result.replications[m] << ','
                << format_number(row.truth) << ',' << csv_field(result.methods[m]) << '\n';
        }
    }
}

void write_geweke_runs_csv(std::ostream& out, const GewekeResult& result) {
    write_metadata(out, result.metadata);
    out << "run,seed_node,k,running_estimate,z_if_computed\n";
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        const auto& run = result.runs[r];
        for (const auto& p : run.profile) {
            out << r << ',' << run.seed_node << ',' << p.k << ','
                << format_number(p.running_estimate) << ','
                << (p.z ? format_number(*p.z) : "") << '\n';
        }
    }
}

void write_calibration_csv(std::ostream& out, std::span<const std::string> labels,
                           std::span<const CalibrationResult> results, const Metadata& metadata) {
    write_metadata(out, metadata);
    out << "series,target_rate,kappa,realized_rate,flagged\n";
    for (std::size_t s = 0; s < results.size(); ++s) {
        for (const auto& p : results[s].points) {
            out << csv_field(labels[s]) << ',' << format_number(p.target_rate) << ','
                << format_number(p.kappa) << ',' << format_number(p.realized_rate) << ','
                << (p.flagged ? 1 : 0) << '\n';
        }
    }
}

void write_kappa_curve_csv(std::ostream& out, std::span<const std::string> labels,
                           std::span<const CalibrationResult> results, const Metadata& metadata) {
    write_metadata(out, metadata);
    out << "series,kappa,realized_rate\n";
    for (std::size_t s = 0; s < results.size(); ++s) {
        for (const auto& p : results[s].curve) {
            out << csv_field(labels[s]) << ',' << format_number(p.kappa) << ','
                << format_number(p.realized_rate) << '\n';
        }
    }
}

ChartSpec kappa_curve_chart(std::span<const std::string> labels,
                            std::span<const CalibrationResult> results) {
    ChartSpec chart{"Realized sampling rate against kappa", "kappa", "realized rate |S|/n",
                    true, true, {}};
    for (std::size_t s = 0; s < results.size(); ++s) {
        ChartSeries line{labels[s], {}, false};
        for (const auto& p : results[s].curve) {
            line.points.emplace_back(p.kappa, p.realized_rate);
        }
        chart.series.push_back(std::move(line));
    }
    return chart;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;
    std::vector<double> ticks;

    [[nodiscard]] double unit(double v) const {
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        const double x = log ? std::log10(v) : v;
        return b > a ? (x - a) / (b - a) : 0.5;
    }
};

Axis make_axis(std::vector<double> values, bool log) {
    Axis axis;
    axis.log = log;
    if (log) {
        std::erase_if(values, [](double v) { return !(v > 0.0); });
    }
    if (values.empty()) {
        values = {log ? 1.0 : 0.0};
    }
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    double lo = *mn;
    double hi = *mx;
    if (log) {
        lo = std::pow(10.0, std::floor(std::log10(lo)));
        hi = std::pow(10.0, std::ceil(std::log10(hi)));
        if (hi <= lo) {
            hi = lo * 10.0;
        }
        for (double t = lo; t <= hi * 1.0000001; t *= 10.0) {
            axis.ticks.push_back(t);
        }
    } else {
        if (hi <= lo) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double f : {1.0, 2.0, 5.0, 10.0}) {
            if (f * mag >= raw) {
                step = f * mag;
                break;
            }
        }
        lo = std::floor(lo / step) * step;
        hi = std::ceil(hi / step) * step;
        for (double t = lo; t <= hi + step * 1e-9; t += step) {
            axis.ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
        }
    }
    axis.lo = lo;
    axis.hi = hi;
    return axis;
}

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_svg_chart(std::ostream& out, const ChartSpec& chart) {
    constexpr double width = 720.0;
    constexpr double height = 440.0;
    constexpr double left = 80.0;
    constexpr double right = 180.0;
    constexpr double top = 40.0;
    constexpr double bottom = 60.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : chart.series) {
        for (const auto& [x, y] : s.points) {
            if (std::isfinite(x) && std::isfinite(y)) {
                xs.push_back(x);
                ys.push_back(y);
            }
        }
    }
    const Axis ax = make_axis(xs, chart.log_x);
    const Axis ay = make_axis(ys, chart.log_y);
    auto px = [&](double x) { return left + ax.unit(x) * plot_w; };
    auto py = [&](double y) { return top + (1.0 - ay.unit(y)) * plot_h; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << coord(left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << xml_escape(chart.title) << "</text>\n";
    out << "<rect x=\"" << coord(left) << "\" y=\"" << coord(top) << "\" width=\""
        << coord(plot_w) << "\" height=\"" << coord(plot_h)
        << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (double t : ax.ticks) {
        const double x = px(t);
        out << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(top + plot_h) << "\" x2=\""
            << coord(x) << "\" y2=\"" << coord(top + plot_h + 5) << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << coord(x) << "\" y=\"" << coord(top + plot_h + 19)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_number(t, 4) << "</text>\n";
    }
    for (double t : ay.ticks) {
        const double y = py(t);
        out << "<line x1=\"" << coord(left - 5) << "\" y1=\"" << coord(y) << "\" x2=\""
            << coord(left + plot_w) << "\" y2=\"" << coord(y) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << coord(left - 8) << "\" y=\"" << coord(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_number(t, 4) << "</text>\n";
    }
    out << "<text x=\"" << coord(left + plot_w / 2) << "\" y=\"" << coord(height - 14)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << xml_escape(chart.x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << coord(top + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << coord(top + plot_h / 2) << ")\">"
        << xml_escape(chart.y_label) << "</text>\n";

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* color = palette[i % std::size(palette)];
        std::string path;
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y) || (chart.log_x && !(x > 0.0)) ||
                (chart.log_y && !(y > 0.0))) {
                continue;
            }
            path += path.empty() ? "M" : " L";
            path += coord(px(x)) + "," + coord(py(y));
        }
        if (!path.empty()) {
            out << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.8\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
                << "/>\n";
        }
        const double ly = top + 14.0 + 20.0 * static_cast<double>(i);
        const double lx = left + plot_w + 14.0;
        out << "<line x1=\"" << coord(lx) << "\" y1=\"" << coord(ly) << "\" x2=\""
            << coord(lx + 24) << "\" y2=\"" << coord(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.8\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
            << "/>\n";
        out << "<text x=\"" << coord(lx + 30) << "\" y=\"" << coord(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(s.label)
            << "</text>\n";
    }
    out << "</svg>\n";
}

// ---------------------------------------------------------------------------
// emit_outputs

namespace {

using FileSet = std::vector<std::pair<std::string, std::string>>;

std::string render_chart(const ChartSpec& chart) {
    std::ostringstream s;
    write_svg_chart(s, chart);
    return s.str();
}

FileSet render(const SweepResult& r) {
    if (r.empty()) {
        throw ParameterError("empty sweep: nothing to write");
    }
    FileSet files;
    std::ostringstream csv;
    write_sweep_csv(csv, r);
    files.emplace_back(r.name + ".csv", csv.str());

    const std::string x_label = r.grid_kind == GridKind::rate ? "sampling rate" : "kappa";
    ChartSpec est{"Mean estimate against " + x_label, x_label, "mean estimate",
                  true, false, {}};
    ChartSpec bias{"Mean absolute bias against " + x_label, x_label, "mean |estimate - truth|",
                   true, false, {}};
    for (const auto& s : r.series) {
        ChartSeries e{s.label, {}, false};
        ChartSeries t{s.label + " truth", {}, true};
        ChartSeries b{s.label, {}, false};
        for (const auto& p : s.points) {
            if (p.replications == 0) {
                continue;
            }
            e.points.emplace_back(p.grid_value, p.mean_estimate);
            t.points.emplace_back(p.grid_value, p.truth);
            b.points.emplace_back(p.grid_value, p.mean_bias);
        }
        est.series.push_back(std::move(e));
        est.series.push_back(std::move(t));
        bias.series.push_back(std::move(b));
    }
    files.emplace_back(r.name + "_estimate.svg", render_chart(est));
    files.emplace_back(r.name + "_bias.svg", render_chart(bias));

    if (!r.calibrations.empty()) {
        std::vector<std::string> labels;
        for (const auto& s : r.series) {
            labels.push_back(s.label);
        }
        const Metadata meta{{"experiment", r.name}};
        std::ostringstream cal;
        write_calibration_csv(cal, labels, r.calibrations, meta);
        files.emplace_back(r.name + "_calibration.csv", cal.str());
        std::ostringstream curve;
        write_kappa_curve_csv(curve, labels, r.calibrations, meta);
        files.emplace_back(r.name + "_kappa_curve.csv", curve.str());
        files.emplace_back(r.name + "_kappa_curve.svg",
                           render_chart(kappa_curve_chart(labels, r.calibrations)));
    }
    return files;
}

FileSet render(const OutdegreeResult& r) {
    if (r.empty()) {
        throw ParameterError("empty outdegree result: nothing to write");
    }
    FileSet files;
    std::ostringstream csv;
    write_outdegree_csv(csv, r);
    files.emplace_back(r.name + ".csv", csv.str());

    ChartSpec bias{"Per-outdegree mean absolute bias", "outdegree", "mean |estimate - truth|",
                   false, true, {}};
    for (std::size_t m = 0; m < r.methods.size(); ++m) {
        ChartSeries s{r.methods[m], {}, false};
        for (const auto& row : r.rows) {
            s.points.emplace_back(static_cast<double>(row.degree), row.mean_bias[m]);
        }
        bias.series.push_back(std::move(s));
    }
    files.emplace_back(r.name + "_bias.svg", render_chart(bias));
    return files;
}

FileSet render(const GewekeResult& r) {
    if (r.empty()) {
        throw ParameterError("empty Geweke result: nothing to write");
    }
    FileSet files;
    std::ostringstream csv;
    write_geweke_runs_csv(csv, r);
    files.emplace_back(r.name + ".csv", csv.str());

    ChartSpec z{"Geweke Z of the running estimate", "sampled nodes", "Z", false, false, {}};
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        ChartSeries s{"run " + std::to_string(i), {}, false};
        for (const auto& p : r.runs[i].profile) {
            if (p.z) {
                s.points.emplace_back(static_cast<double>(p.k), *p.z);
            }
        }
        z.series.push_back(std::move(s));
    }
    files.emplace_back(r.name + "_z.svg", render_chart(z));
    return files;
}

}  // namespace

std::vector<std::filesystem::path> emit_outputs(const ExperimentResult& result,
                                                const std::filesystem::path& directory) {
    const FileSet files = std::visit([](const auto& r) { return render(r); }, result);
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) {
        throw IoError("cannot create output directory " + directory.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [name, content] : files) {
        const auto path = directory / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        written.push_back(path);
    }
    return written;
}

}  // namespace netmeasure
