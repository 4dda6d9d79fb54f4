#include "netmeasure/diagnostics.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "netmeasure/errors.hpp"
#include "netmeasure/text.hpp"

namespace netmeasure {

void GewekeParams::validate() const {
    if (!(first_frac > 0.0) || !(last_frac > 0.0) || first_frac + last_frac > 1.0) {
        throw ParameterError("Geweke fractions must be positive and sum to at most 1");
    }
}

double spectral_density_at_zero(std::span<const double> segment, std::size_t window) {
    const std::size_t n = segment.size();
    if (n == 0) {
        throw UndefinedValueError("empty segment");
    }
    const double mean = std::accumulate(segment.begin(), segment.end(), 0.0) /
                        static_cast<double>(n);
    auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) {
            s += (segment[i] - mean) * (segment[i + lag] - mean);
        }
        return s / static_cast<double>(n);
    };
    double density = autocov(0);
    const std::size_t max_lag = std::min(window, n - 1);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        const double taper = 1.0 - static_cast<double>(k) / static_cast<double>(window + 1);
        density += 2.0 * taper * autocov(k);
    }
    return std::max(density, 0.0);
}

double geweke_z(std::span<const double> sequence, const GewekeParams& params) {
    params.validate();
    const std::size_t n = sequence.size();
    if (n < 20) {
        throw ParameterError("Geweke diagnostic needs at least 20 values");
    }
    const auto n_first = static_cast<std::size_t>(std::floor(params.first_frac * static_cast<double>(n)));
    const auto n_last = static_cast<std::size_t>(std::floor(params.last_frac * static_cast<double>(n)));
    if (n_first == 0 || n_last == 0) {
        throw ParameterError("Geweke segment is empty");
    }
    const auto first = sequence.first(n_first);
    const auto last = sequence.last(n_last);
    auto segment_stats = [&params](std::span<const double> seg) {
        const std::size_t window = params.window != 0
                                       ? params.window
                                       : static_cast<std::size_t>(std::floor(std::sqrt(
                                             static_cast<double>(seg.size()))));
        const double mean =
            std::accumulate(seg.begin(), seg.end(), 0.0) / static_cast<double>(seg.size());
        return std::pair{mean, spectral_density_at_zero(seg, window) /
                                   static_cast<double>(seg.size())};
    };
    const auto [mean_a, var_a] = segment_stats(first);
    const auto [mean_b, var_b] = segment_stats(last);
    const double denom = var_a + var_b;
    if (!(denom > 0.0)) {
        throw UndefinedValueError("both Geweke segments have zero variance");
    }
    return (mean_a - mean_b) / std::sqrt(denom);
}

std::vector<double> running_estimates(const SampleTrace& trace, const LabelFunction& f,
                                      WeightingMode mode) {
    std::vector<double> out;
    out.reserve(trace.size());
    double num = 0.0;
    double den = 0.0;
    for (const TraceEntry& e : trace.entries) {
        if (!(e.weight > 0.0)) {
            throw DegenerateSampleError("trace weight must be positive");
        }
        const double w = mode == WeightingMode::literal ? e.weight : 1.0 / e.weight;
        num += f(e.node) * w;
        den += w;
        out.push_back(num / den);
    }
    return out;
}

std::vector<GewekePoint> geweke_profile(const SampleTrace& trace, const LabelFunction& f,
                                        WeightingMode mode, const GewekeParams& params,
                                        std::size_t stride) {
    const auto running = running_estimates(trace, f, mode);
    std::vector<GewekePoint> points;
    if (stride == 0) {
        stride = 1;
    }
    for (std::size_t k = 1; k <= running.size(); ++k) {
        GewekePoint p{k, running[k - 1], std::nullopt};
        if (k >= 20 && (k % stride == 0 || k == running.size())) {
            try {
                p.z = geweke_z(std::span(running).first(k), params);
            } catch (const UndefinedValueError&) {
                // Constant prefix: no score.
            }
        }
        points.push_back(p);
    }
    return points;
}

void write_geweke_csv(std::ostream& out, std::span<const GewekePoint> points) {
    out << "k,running_estimate,z_if_computed\n";
    for (const auto& p : points) {
        out << p.k << ',' << format_number(p.running_estimate) << ','
            << (p.z ? format_number(*p.z) : "") << '\n';
    }
}

}  // namespace netmeasure
