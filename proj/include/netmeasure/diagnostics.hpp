#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "netmeasure/estimators.hpp"
#include "netmeasure/labels.hpp"
#include "netmeasure/trace.hpp"

namespace netmeasure {

struct GewekeParams {
    double first_frac = 0.1;
    double last_frac = 0.5;
    /// Bartlett lag cutoff per segment; 0 means floor(sqrt(segment length)).
    std::size_t window = 0;

    void validate() const;
};

/// Spectral density at frequency zero from a Bartlett-windowed autocovariance
/// sum: gamma_0 + 2 sum_{k=1..W} (1 - k/(W+1)) gamma_k.
double spectral_density_at_zero(std::span<const double> segment, std::size_t window);

/// Geweke Z = (mean_A - mean_B) / sqrt(S_A(0)/n_A + S_B(0)/n_B) comparing the
/// leading first_frac and trailing last_frac of the sequence. Requires at
/// least 20 values; throws UndefinedValueError when both segments have zero
/// spectral variance.
double geweke_z(std::span<const double> sequence, const GewekeParams& params = {});

/// Element k is the estimate over the first k + 1 trace entries.
std::vector<double> running_estimates(const SampleTrace& trace, const LabelFunction& f,
                                      WeightingMode mode);

struct GewekePoint {
    std::size_t k = 0;  ///< prefix length (sampled nodes)
    double running_estimate = 0.0;
    std::optional<double> z;  ///< computed once the prefix has >= 20 values
};

/// Z recomputed over every growing prefix of the running-estimate sequence.
std::vector<GewekePoint> geweke_profile(const SampleTrace& trace, const LabelFunction& f,
                                        WeightingMode mode, const GewekeParams& params = {},
                                        std::size_t stride = 1);

/// CSV "k,running_estimate,z_if_computed".
void write_geweke_csv(std::ostream& out, std::span<const GewekePoint> points);

}  // namespace netmeasure
