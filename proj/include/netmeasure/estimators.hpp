#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netmeasure/labels.hpp"
#include "netmeasure/rng.hpp"
#include "netmeasure/trace.hpp"

namespace netmeasure {

/// A finite universe {0, ..., |V|-1} with a target measure, a trial
/// distribution to sample from, and an approximate importance weight.
struct FiniteMeasureProblem {
    std::vector<double> target_measure;  ///< unnormalized target, >= 0
    std::vector<double> trial;           ///< trial distribution p, sums to 1
    std::vector<double> approx_weight;   ///< u, >= 0; empty means u = w

    /// Checks supp(target) within supp(trial), supp(u) within supp(w), and that
    /// the trial sums to 1. Throws ParameterError.
    void validate() const;

    [[nodiscard]] std::size_t size() const noexcept { return target_measure.size(); }
    /// Z, the target measure's normalization constant.
    [[nodiscard]] double normalization() const;
    [[nodiscard]] double target_probability(std::size_t x) const;
    /// w(x) = target(x) / trial(x); 0 off the trial's support.
    [[nodiscard]] double importance_weight(std::size_t x) const;
    [[nodiscard]] double approximate_weight(std::size_t x) const;

    /// sum over V of f(x) * target(x).
    [[nodiscard]] double target_sum(std::span<const double> f) const;
    /// target_sum(f) / Z.
    [[nodiscard]] double target_average(std::span<const double> f) const;

    /// n i.i.d. draws from the trial distribution.
    [[nodiscard]] std::vector<std::size_t> draw(std::size_t n, Rng& rng) const;
};

struct IsResult {
    std::vector<double> values;  ///< f(X_i) w(X_i)
    double mean = 0.0;
};

/// Plain importance sampling; unbiased for target_sum(f).
/// Throws ParameterError for a sample outside the trial's support.
IsResult e_is(const FiniteMeasureProblem& problem, std::span<const double> f,
              std::span<const std::size_t> samples);

/// Ratio importance sampling: sum f w / sum w, consistent for target_average(f).
double e_ris(const FiniteMeasureProblem& problem, std::span<const double> f,
             std::span<const std::size_t> samples);

using WeightSkewEstimator = std::function<double(std::size_t)>;

/// Approximate ratio importance sampling: sum f u / sum E_WSE. Without a
/// weight-skew estimator the denominator uses u itself, which is the
/// approximate-importance-sampling-for-averages estimator.
double e_aris(const FiniteMeasureProblem& problem, std::span<const double> f,
              std::span<const std::size_t> samples, const WeightSkewEstimator& skew = {});

enum class WeightingMode {
    literal,  ///< sum f p / sum p
    inverse   ///< sum f / p / sum 1 / p
};

const char* to_string(WeightingMode mode);
WeightingMode weighting_mode_from_string(const std::string& text);

struct EstimateReport {
    std::string estimator = "e_dir";
    WeightingMode mode = WeightingMode::inverse;
    std::size_t n = 0;
    double estimate = 0.0;
    std::optional<double> truth;
    std::optional<double> bias;  ///< |estimate - truth|
    std::optional<double> replication_mean;
    std::optional<double> replication_stddev;
};

/// Estimate of avg(f) from a trace's weighted sample. Throws
/// DegenerateSampleError for an empty trace or a non-positive weight.
double e_dir_value(std::span<const TraceEntry> entries, const LabelFunction& f,
                   WeightingMode mode);

EstimateReport e_dir(const SampleTrace& trace, const LabelFunction& f, WeightingMode mode,
                     std::optional<double> truth = std::nullopt);

/// Aggregates replicated estimates into one report (mean estimate, sample
/// stddev, mean absolute bias when truth is known).
EstimateReport summarize(std::span<const double> estimates, std::optional<double> truth,
                         WeightingMode mode, std::string estimator = "e_dir");

/// CSV header and row: estimator,mode,n,estimate,truth,bias
void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const EstimateReport& report);

/// Exact multiplicative/additive decomposition of the approximate-IS mean,
/// plus a Monte-Carlo check of it.
struct BiasDecomposition {
    double target_sum = 0.0;             ///< sum_target(f)
    double expected_skew = 0.0;          ///< E_pi[u/w], the multiplicative factor
    double skew_covariance = 0.0;        ///< cov_pi(f, u/w)
    double additive_term = 0.0;          ///< Z cov_pi(f, u/w)
    double predicted_mean = 0.0;         ///< target_sum * expected_skew + additive_term
    double reciprocal_skew_covariance = 0.0;  ///< cov_pi(f, w/u), reported only
    double empirical_mean = 0.0;         ///< mean of f(X) u(X) over the trials
    double standard_error = 0.0;
    std::size_t trials = 0;

    [[nodiscard]] bool consistent(double z = 3.0) const;
};

BiasDecomposition bias_decomposition(const FiniteMeasureProblem& problem,
                                     std::span<const double> f, std::size_t n_trials, Rng& rng);

}  // namespace netmeasure
