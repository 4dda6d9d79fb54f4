#include "netmeasure/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "netmeasure/errors.hpp"
#include "netmeasure/text.hpp"

namespace netmeasure {

void FiniteMeasureProblem::validate() const {
    const std::size_t n = target_measure.size();
    if (n == 0) {
        throw ParameterError("empty universe");
    }
    if (trial.size() != n || (!approx_weight.empty() && approx_weight.size() != n)) {
        throw ParameterError("measure vectors differ in length");
    }
    double trial_total = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        if (target_measure[x] < 0.0 || trial[x] < 0.0) {
            throw ParameterError("negative measure entry");
        }
        if (target_measure[x] > 0.0 && trial[x] == 0.0) {
            throw ParameterError("target support is not contained in the trial support");
        }
        if (!approx_weight.empty()) {
            if (approx_weight[x] < 0.0) {
                throw ParameterError("negative approximate weight");
            }
            if (approx_weight[x] > 0.0 && importance_weight(x) == 0.0) {
                throw ParameterError("approximate weight support exceeds the weight support");
            }
        }
        trial_total += trial[x];
    }
    if (std::abs(trial_total - 1.0) > 1e-9) {
        throw ParameterError("trial distribution must sum to 1");
    }
    if (normalization() <= 0.0) {
        throw ParameterError("target measure has zero mass");
    }
}

double FiniteMeasureProblem::normalization() const {
    return std::accumulate(target_measure.begin(), target_measure.end(), 0.0);
}

double FiniteMeasureProblem::target_probability(std::size_t x) const {
    return target_measure[x] / normalization();
}

double FiniteMeasureProblem::importance_weight(std::size_t x) const {
    return trial[x] > 0.0 ? target_measure[x] / trial[x] : 0.0;
}

double FiniteMeasureProblem::approximate_weight(std::size_t x) const {
    return approx_weight.empty() ? importance_weight(x) : approx_weight[x];
}

double FiniteMeasureProblem::target_sum(std::span<const double> f) const {
    double total = 0.0;
    for (std::size_t x = 0; x < size(); ++x) {
        total += f[x] * target_measure[x];
    }
    return total;
}

double FiniteMeasureProblem::target_average(std::span<const double> f) const {
    return target_sum(f) / normalization();
}

std::vector<std::size_t> FiniteMeasureProblem::draw(std::size_t n, Rng& rng) const {
    std::vector<double> cumulative(trial.size());
    std::partial_sum(trial.begin(), trial.end(), cumulative.begin());
    const double total = cumulative.back();
    std::vector<std::size_t> out(n);
    for (auto& x : out) {
        const double u = uniform01(rng) * total;
        x = static_cast<std::size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        // Clamping can only land on trailing zero-probability slots; step back.
        x = std::min(x, trial.size() - 1);
        while (trial[x] == 0.0 && x > 0) {
            --x;
        }
    }
    return out;
}

namespace {

void check_inputs(const FiniteMeasureProblem& problem, std::span<const double> f,
                  std::span<const std::size_t> samples) {
    if (f.size() != problem.size()) {
        throw ParameterError("target function length differs from universe size");
    }
    if (samples.empty()) {
        throw DegenerateSampleError("no samples");
    }
    for (std::size_t x : samples) {
        if (x >= problem.size() || problem.trial[x] <= 0.0) {
            throw ParameterError("sample outside the trial distribution's support");
        }
    }
}

double ratio(double numerator, double denominator) {
    if (denominator == 0.0) {
        throw DegenerateSampleError("ratio estimator denominator is zero");
    }
    return numerator / denominator;
}

}  // namespace

IsResult e_is(const FiniteMeasureProblem& problem, std::span<const double> f,
              std::span<const std::size_t> samples) {
    check_inputs(problem, f, samples);
    IsResult r;
    r.values.reserve(samples.size());
    for (std::size_t x : samples) {
        r.values.push_back(f[x] * problem.importance_weight(x));
    }
    r.mean = std::accumulate(r.values.begin(), r.values.end(), 0.0) /
             static_cast<double>(r.values.size());
    return r;
}

double e_ris(const FiniteMeasureProblem& problem, std::span<const double> f,
             std::span<const std::size_t> samples) {
    check_inputs(problem, f, samples);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t x : samples) {
        const double w = problem.importance_weight(x);
        num += f[x] * w;
        den += w;
    }
    return ratio(num, den);
}

double e_aris(const FiniteMeasureProblem& problem, std::span<const double> f,
              std::span<const std::size_t> samples, const WeightSkewEstimator& skew) {
    check_inputs(problem, f, samples);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t x : samples) {
        const double u = problem.approximate_weight(x);
        num += f[x] * u;
        den += skew ? skew(x) : u;
    }
    return ratio(num, den);
}

const char* to_string(WeightingMode mode) {
    return mode == WeightingMode::literal ? "literal" : "inverse";
}

WeightingMode weighting_mode_from_string(const std::string& text) {
    if (text == "literal") {
        return WeightingMode::literal;
    }
    if (text == "inverse") {
        return WeightingMode::inverse;
    }
    throw ParameterError("unknown weighting mode '" + text + "'");
}

double e_dir_value(std::span<const TraceEntry> entries, const LabelFunction& f,
                   WeightingMode mode) {
    if (entries.empty()) {
        throw DegenerateSampleError("empty trace");
    }
    double num = 0.0;
    double den = 0.0;
    for (const TraceEntry& e : entries) {
        if (!(e.weight > 0.0)) {
            throw DegenerateSampleError("trace weight must be positive");
        }
        const double w = mode == WeightingMode::literal ? e.weight : 1.0 / e.weight;
        num += f(e.node) * w;
        den += w;
    }
    return num / den;
}

EstimateReport e_dir(const SampleTrace& trace, const LabelFunction& f, WeightingMode mode,
                     std::optional<double> truth) {
    EstimateReport r;
    r.mode = mode;
    r.n = trace.size();
    r.estimate = e_dir_value(trace.entries, f, mode);
    r.truth = truth;
    if (truth) {
        r.bias = std::abs(r.estimate - *truth);
    }
    return r;
}

EstimateReport summarize(std::span<const double> estimates, std::optional<double> truth,
                         WeightingMode mode, std::string estimator) {
    if (estimates.empty()) {
        throw DegenerateSampleError("no replications to summarize");
    }
    EstimateReport r;
    r.estimator = std::move(estimator);
    r.mode = mode;
    r.n = estimates.size();
    const auto count = static_cast<double>(estimates.size());
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / count;
    double ss = 0.0;
    double abs_bias = 0.0;
    for (double e : estimates) {
        ss += (e - mean) * (e - mean);
        if (truth) {
            abs_bias += std::abs(e - *truth);
        }
    }
    r.estimate = mean;
    r.replication_mean = mean;
    r.replication_stddev = estimates.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    r.truth = truth;
    if (truth) {
        r.bias = abs_bias / count;
    }
    return r;
}

void write_report_header(std::ostream& out) {
    out << "estimator,mode,n,estimate,truth,bias\n";
}

void write_report_row(std::ostream& out, const EstimateReport& r) {
    out << r.estimator << ',' << to_string(r.mode) << ',' << r.n << ','
        << format_number(r.estimate) << ',' << (r.truth ? format_number(*r.truth) : "") << ','
        << (r.bias ? format_number(*r.bias) : "") << '\n';
}

bool BiasDecomposition::consistent(double z) const {
    return std::abs(empirical_mean - predicted_mean) <= z * standard_error;
}

BiasDecomposition bias_decomposition(const FiniteMeasureProblem& problem,
                                     std::span<const double> f, std::size_t n_trials, Rng& rng) {
    problem.validate();
    if (problem.size() > 10000) {
        throw ParameterError("bias decomposition enumerates the universe; |V| must be <= 1e4");
    }
    if (f.size() != problem.size()) {
        throw ParameterError("target function length differs from universe size");
    }
    if (n_trials < 2) {
        throw ParameterError("need at least two trials");
    }

    BiasDecomposition d;
    const double z = problem.normalization();
    d.target_sum = problem.target_sum(f);

    double mean_f = 0.0;
    double mean_skew = 0.0;
    double mean_f_skew = 0.0;
    double mean_inv = 0.0;
    double mean_f_inv = 0.0;
    bool reciprocal_defined = true;
    for (std::size_t x = 0; x < problem.size(); ++x) {
        const double pi = problem.target_probability(x);
        if (pi == 0.0) {
            continue;
        }
        const double skew = problem.approximate_weight(x) / problem.importance_weight(x);
        mean_f += pi * f[x];
        mean_skew += pi * skew;
        mean_f_skew += pi * f[x] * skew;
        if (skew > 0.0) {
            mean_inv += pi / skew;
            mean_f_inv += pi * f[x] / skew;
        } else {
            reciprocal_defined = false;
        }
    }
    d.expected_skew = mean_skew;
    d.skew_covariance = mean_f_skew - mean_f * mean_skew;
    d.additive_term = z * d.skew_covariance;
    d.predicted_mean = d.target_sum * d.expected_skew + d.additive_term;
    d.reciprocal_skew_covariance = reciprocal_defined
                                       ? mean_f_inv - mean_f * mean_inv
                                       : std::numeric_limits<double>::quiet_NaN();

    const auto samples = problem.draw(n_trials, rng);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t x : samples) {
        const double v = f[x] * problem.approximate_weight(x);
        sum += v;
        sum_sq += v * v;
    }
    const auto n = static_cast<double>(n_trials);
    d.trials = n_trials;
    d.empirical_mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * d.empirical_mean * d.empirical_mean) / (n - 1.0));
    d.standard_error = std::sqrt(var / n);
    return d;
}

}  // namespace netmeasure
