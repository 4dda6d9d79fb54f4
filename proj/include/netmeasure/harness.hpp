#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "netmeasure/diagnostics.hpp"
#include "netmeasure/dnm.hpp"
#include "netmeasure/estimators.hpp"
#include "netmeasure/generators.hpp"
#include "netmeasure/graph.hpp"
#include "netmeasure/sir.hpp"

namespace netmeasure {

// ---------------------------------------------------------------------------
// Configuration

struct DatasetSpec {
    std::variant<GeneratorParams, std::filesystem::path> source = DerParams{};
    /// Reverse every link after construction (puts a generator's in-degree
    /// tail into the out-degrees).
    bool reverse = false;
};

enum class ExperimentKind { infection, outdegree, geweke };
enum class SamplerKind { dnm, rw, durw };
/// Sweep grid: target sampling rates (kappa calibrated, budget as backstop)
/// or raw kappa values (no budget).
enum class GridKind { rate, kappa };

struct ExperimentConfig {
    std::string name = "experiment";
    ExperimentKind kind = ExperimentKind::infection;
    DatasetSpec dataset;
    /// Reciprocity sweep: one series per value, each on its own DER graph.
    /// Empty means a single series on `dataset`.
    std::vector<double> reciprocity_sweep;

    SirParams sir;
    /// Reuse one outbreak across replications instead of a fresh one each.
    bool freeze_outbreak = false;
    std::size_t outbreak_attempts = 20;

    SamplerKind sampler = SamplerKind::dnm;
    double alpha = 0.15;
    double delta = 1e-7;
    double jump_weight = 10.0;
    std::vector<double> jump_costs{1.0, 10.0, 50.0};

    /// Unset means calibrated.
    std::optional<WeightingMode> mode;

    GridKind grid_kind = GridKind::rate;
    std::vector<double> grid{0.01, 0.02, 0.05, 0.1, 0.2, 0.4};
    std::size_t replications = 100;
    std::size_t calibration_replications = 20;
    std::uint64_t seed = 1;
    std::filesystem::path output = "out";

    /// Geweke runs: prefix length from which scores are judged, and threshold.
    std::size_t geweke_from = 200;
    double geweke_threshold = 1.5;

    void validate() const;
};

/// key = value lines; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds the dataset graph. Edge lists and generated graphs that are not
/// weakly connected are cut down to their largest weak component.
DirectedGraph build_dataset(const DatasetSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Concurrency

/// Worker count from NETMEASURE_THREADS, else the hardware concurrency.
std::size_t worker_count();

/// Runs task(i) for i in [0, count) on up to `workers` threads. The first
/// exception by index is rethrown after all tasks finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task,
                  std::size_t workers = worker_count());

// ---------------------------------------------------------------------------
// Kappa calibration

struct KappaCurvePoint {
    double kappa = 0.0;
    double realized_rate = 0.0;
};

struct KappaCalibration {
    double target_rate = 0.0;
    double kappa = 0.0;
    double realized_rate = 0.0;
    /// Target not reachable within tolerance for kappa in [1e-6, 1].
    bool flagged = false;
};

struct CalibrationResult {
    std::vector<KappaCalibration> points;
    /// Every kappa evaluated, ascending.
    std::vector<KappaCurvePoint> curve;
};

/// Mean |S|/n over `replications` seed nodes (fixed across kappa values).
double mean_realized_rate(const DirectedGraph& g, double alpha, double delta, double kappa,
                          std::span<const NodeId> seeds);

/// Log-scale bisection on kappa per target rate until the mean realized rate
/// is within 10% (relative) of the target.
CalibrationResult calibrate_kappa(const DirectedGraph& g, double alpha, double delta,
                                  std::span<const double> rates, std::size_t replications,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Estimator mode calibration

struct ModeCalibration {
    double truth = 0.0;  ///< mean true ratio across replications
    double literal_mean = 0.0;
    double inverse_mean = 0.0;
    double literal_bias = 0.0;  ///< mean |estimate - truth|
    double inverse_bias = 0.0;
    double kappa = 0.0;
    double realized_rate = 0.0;
    std::size_t replications = 0;
    WeightingMode chosen = WeightingMode::inverse;

    [[nodiscard]] std::string describe() const;
};

/// Runs both e_dir modes on the same DNM samples of DER(2000, 0.1, 0.6) with a
/// 20% outbreak at a 20% sampling rate and picks the mode with the smaller
/// mean absolute error. Both modes are close to unbiased when averaged over
/// random seed nodes, so comparing mean estimates alone picks by noise.
/// Memoized per (seed, replications).
ModeCalibration calibrate_mode(std::uint64_t seed, std::size_t replications = 100);

// ---------------------------------------------------------------------------
// Results

struct SweepPoint {
    double grid_value = 0.0;
    double realized_rate = 0.0;
    double mean_estimate = 0.0;
    double mean_bias = 0.0;  ///< mean |estimate - truth|
    double stddev = 0.0;     ///< of the estimates
    std::size_t replications = 0;
    double kappa = 0.0;  ///< DNM only
    bool flagged = false;
    std::size_t dropped = 0;  ///< replications lost to outbreak extinction
    double truth = 0.0;       ///< mean true value
};

struct SweepSeries {
    std::string label;
    std::vector<SweepPoint> points;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct SweepResult {
    std::string name;
    GridKind grid_kind = GridKind::rate;
    Metadata metadata;
    std::vector<SweepSeries> series;
    std::vector<CalibrationResult> calibrations;  ///< per series, rate grids only

    [[nodiscard]] bool empty() const;
};

struct OutdegreeRow {
    std::size_t degree = 0;
    double truth = 0.0;
    std::vector<double> mean_estimate;  ///< per method
    std::vector<double> mean_bias;      ///< per method, mean |estimate - truth|
    std::vector<double> stddev;
};

struct OutdegreeResult {
    std::string name;
    Metadata metadata;
    std::vector<std::string> methods;  ///< "dnm", "durw_c1", ...
    std::vector<double> realized_rate;
    std::vector<std::size_t> replications;
    std::vector<OutdegreeRow> rows;  ///< ascending degree

    [[nodiscard]] bool empty() const { return rows.empty() || methods.empty(); }
    /// Sum over degrees of the per-degree mean bias.
    [[nodiscard]] double aggregate_bias(std::size_t method) const;
    /// Mean per-degree bias over the top / bottom tenth of the distinct
    /// outdegree values (at least one value each).
    [[nodiscard]] double top_decile_bias(std::size_t method) const;
    [[nodiscard]] double bottom_decile_bias(std::size_t method) const;
};

struct GewekeRun {
    NodeId seed_node = 0;
    double truth = 0.0;
    std::vector<GewekePoint> profile;
    /// Largest |Z| over prefixes of at least geweke_from nodes.
    std::optional<double> max_abs_z;
    std::optional<double> final_z;
};

struct GewekeResult {
    std::string name;
    Metadata metadata;
    std::vector<GewekeRun> runs;

    [[nodiscard]] bool empty() const { return runs.empty(); }
    /// Runs whose |Z| stays below the threshold on every judged prefix.
    [[nodiscard]] std::size_t runs_below(double threshold) const;
    [[nodiscard]] std::size_t runs_final_below(double threshold) const;
};

using ExperimentResult = std::variant<SweepResult, OutdegreeResult, GewekeResult>;

// ---------------------------------------------------------------------------
// Experiments

SweepResult run_infection_experiment(const ExperimentConfig& config);
OutdegreeResult run_outdegree_experiment(const ExperimentConfig& config);
/// DNM runs at the first grid rate with the running estimate monitored by
/// the Geweke score over growing prefixes.
GewekeResult run_geweke_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Output

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool dashed = false;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<ChartSeries> series;
};

/// Writes <name>.csv plus SVG charts into `directory` (created if needed) and
/// returns the files written. Throws ParameterError for an empty result before
/// touching the filesystem, IoError when a file cannot be written.
std::vector<std::filesystem::path> emit_outputs(const ExperimentResult& result,
                                                const std::filesystem::path& directory);

/// CSV writers used by emit_outputs: '#'-prefixed "key=value" metadata lines,
/// then a header row.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_outdegree_csv(std::ostream& out, const OutdegreeResult& result);
void write_geweke_runs_csv(std::ostream& out, const GewekeResult& result);
/// "series,target_rate,kappa,realized_rate,flagged", one row per target.
void write_calibration_csv(std::ostream& out, std::span<const std::string> labels,
                           std::span<const CalibrationResult> results,
                           const Metadata& metadata = {});
/// "series,kappa,realized_rate", every evaluated kappa.
void write_kappa_curve_csv(std::ostream& out, std::span<const std::string> labels,
                           std::span<const CalibrationResult> results,
                           const Metadata& metadata = {});
/// Realized rate against kappa (log-log), one line per series.
ChartSpec kappa_curve_chart(std::span<const std::string> labels,
                            std::span<const CalibrationResult> results);

/// Minimal SVG line chart with axes, ticks and a legend.
void write_svg_chart(std::ostream& out, const ChartSpec& chart);

}  // namespace netmeasure
