#include "netmeasure/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "netmeasure/access.hpp"
#include "netmeasure/baselines.hpp"
#include "netmeasure/errors.hpp"
#include "netmeasure/rng.hpp"
#include "netmeasure/text.hpp"

namespace netmeasure {

namespace {

// Stream tags for derive_seed; never renumber, outputs depend on them.
enum Stream : std::uint64_t {
    graph_stream = 1,
    calibration_stream = 2,
    replication_stream = 3,
    outbreak_stream = 4,
    seed_node_stream = 5,
    walker_stream = 6,
    frozen_stream = 7,
    mode_stream = 8,
};

constexpr double min_kappa = 1e-6;
constexpr double max_kappa = 1.0;

std::uint64_t key_of(double value) { return std::bit_cast<std::uint64_t>(value); }

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
    if (replications < 1) {
        throw ParameterError("replications must be at least 1");
    }
    if (calibration_replications < 1) {
        throw ParameterError("calibration_replications must be at least 1");
    }
    if (grid.empty()) {
        throw ParameterError("the sweep grid is empty");
    }
    for (double v : grid) {
        if (grid_kind == GridKind::rate && !(v > 0.0 && v <= 1.0)) {
            throw ParameterError("sampling rates must lie in (0, 1]");
        }
        if (grid_kind == GridKind::kappa && !(v > 0.0)) {
            throw ParameterError("kappa values must be positive");
        }
    }
    if (grid_kind == GridKind::kappa && (sampler != SamplerKind::dnm || kind != ExperimentKind::infection)) {
        throw ParameterError("a kappa grid applies only to DNM infection sweeps");
    }
    if (!(alpha > 0.0 && alpha <= 1.0) || !(delta > 0.0)) {
        throw ParameterError("alpha must lie in (0, 1] and delta must be positive");
    }
    if (!(jump_weight > 0.0)) {
        throw ParameterError("jump_weight must be positive");
    }
    if (jump_costs.empty()) {
        throw ParameterError("jump_costs is empty");
    }
    for (double c : jump_costs) {
        if (!(c >= 1.0)) {
            throw ParameterError("jump costs must be at least 1");
        }
    }
    if (!reciprocity_sweep.empty() && !std::holds_alternative<GeneratorParams>(dataset.source)) {
        throw ParameterError("a reciprocity sweep needs a DER dataset");
    }
    if (!reciprocity_sweep.empty() &&
        !std::holds_alternative<DerParams>(std::get<GeneratorParams>(dataset.source))) {
        throw ParameterError("a reciprocity sweep needs a DER dataset");
    }
    if (!reciprocity_sweep.empty() && kind != ExperimentKind::infection) {
        throw ParameterError("reciprocity sweeps apply to infection experiments");
    }
    if (outbreak_attempts < 1) {
        throw ParameterError("outbreak_attempts must be at least 1");
    }
    if (geweke_from < 20) {
        throw ParameterError("geweke_from must be at least 20");
    }
}

namespace {

struct ConfigValue {
    std::string text;
    std::size_t line = 0;
};

class ConfigReader {
public:
    explicit ConfigReader(std::map<std::string, ConfigValue> values) : values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string text(const std::string& key, std::string fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) {
            return fallback;
        }
        used_.push_back(key);
        return it->second.text;
    }

    double real(const std::string& key, double fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) {
            return fallback;
        }
        used_.push_back(key);
        return parse_real(it->second.text, it->second.line);
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) {
            return fallback;
        }
        used_.push_back(key);
        const double v = parse_real(it->second.text, it->second.line);
        if (v < 0.0 || v != std::floor(v)) {
            throw ParseError(it->second.line, "'" + key + "' must be a non-negative integer");
        }
        return static_cast<std::size_t>(v);
    }

    std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) {
            return fallback;
        }
        used_.push_back(key);
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(it->second.text, &pos);
            if (pos != it->second.text.size()) {
                throw std::invalid_argument("trailing");
            }
            return v;
        } catch (const std::exception&) {
            throw ParseError(it->second.line, "'" + key + "' must be an unsigned integer");
        }
    }

    bool flag(const std::string& key, bool fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) {
            return fallback;
        }
        used_.push_back(key);
        const auto& t = it->second.text;
        if (t == "true" || t == "1" || t == "yes") {
            return true;
        }
        if (t == "false" || t == "0" || t == "no") {
            return false;
        }
        throw ParseError(it->second.line, "'" + key + "' must be true or false");
    }

    std::vector<double> list(const std::string& key, std::vector<double> fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) {
            return fallback;
        }
        used_.push_back(key);
        std::vector<double> out;
        std::string item;
        const std::string& t = it->second.text;
        std::size_t start = 0;
        while (start <= t.size()) {
            const auto comma = t.find(',', start);
            item = trim(t.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (item.empty()) {
                throw ParseError(it->second.line, "empty item in list '" + key + "'");
            }
            out.push_back(parse_real(item, it->second.line));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        return out;
    }

    std::size_t line_of(const std::string& key) const {
        auto it = values_.find(key);
        return it == values_.end() ? 0 : it->second.line;
    }

    void reject_unused() const {
        for (const auto& [key, value] : values_) {
            if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
                throw ParseError(value.line, "unknown or inapplicable key '" + key + "'");
            }
        }
    }

private:
    static double parse_real(const std::string& text, std::size_t line) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(text, &pos);
            if (pos != text.size() || !std::isfinite(v)) {
                throw std::invalid_argument("trailing");
            }
            return v;
        } catch (const std::exception&) {
            throw ParseError(line, "expected a number, got '" + text + "'");
        }
    }

    std::map<std::string, ConfigValue> values_;
    std::vector<std::string> used_;
};

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    std::map<std::string, ConfigValue> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(line.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, "expected 'key = value'");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError(line_no, "expected 'key = value'");
        }
        if (!values.emplace(key, ConfigValue{value, line_no}).second) {
            throw ParseError(line_no, "duplicate key '" + key + "'");
        }
    }

    ConfigReader r(std::move(values));
    ExperimentConfig c;
    c.name = r.text("name", c.name);
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
        throw ParseError(r.line_of("name"), "name must be a plain file stem");
    }

    const std::string kind = r.text("experiment", "infection");
    if (kind == "infection") {
        c.kind = ExperimentKind::infection;
    } else if (kind == "outdegree") {
        c.kind = ExperimentKind::outdegree;
    } else if (kind == "geweke") {
        c.kind = ExperimentKind::geweke;
    } else {
        throw ParseError(r.line_of("experiment"), "experiment must be infection, outdegree or geweke");
    }

    const std::string graph = r.text("graph", "der");
    if (graph == "der") {
        DerParams p;
        p.n = r.count("n", p.n);
        p.p0 = r.real("p0", p.p0);
        p.reciprocity = r.real("reciprocity", p.reciprocity);
        c.dataset.source = GeneratorParams{p};
    } else if (graph == "dws") {
        DwsParams p;
        p.n = r.count("n", p.n);
        p.k = r.count("k", p.k);
        p.p0 = r.real("p0", p.p0);
        c.dataset.source = GeneratorParams{p};
    } else if (graph == "dsf") {
        DsfParams p;
        p.n = r.count("n", p.n);
        p.m0 = r.count("m0", p.m0);
        p.p0_init = r.real("p0_init", p.p0_init);
        p.m = r.count("m", p.m);
        p.beta1 = r.real("beta1", p.beta1);
        p.beta2 = r.real("beta2", p.beta2);
        p.beta3 = r.real("beta3", p.beta3);
        c.dataset.source = GeneratorParams{p};
    } else if (graph == "file") {
        if (!r.has("edge_list")) {
            throw ParseError(r.line_of("graph"), "graph = file needs edge_list");
        }
        c.dataset.source = std::filesystem::path(r.text("edge_list", ""));
    } else {
        throw ParseError(r.line_of("graph"), "graph must be der, dws, dsf or file");
    }
    c.dataset.reverse = r.flag("reverse", false);
    c.reciprocity_sweep = r.list("reciprocity_sweep", {});

    c.sir.theta1 = r.real("theta1", c.sir.theta1);
    c.sir.theta2 = r.real("theta2", c.sir.theta2);
    c.sir.target_ratio = r.real("target_ratio", c.sir.target_ratio);
    c.sir.initial_count = r.count("initial_count", c.sir.initial_count);
    c.sir.exact_stop = r.flag("exact_stop", c.sir.exact_stop);
    c.sir.max_steps = r.count("max_steps", c.sir.max_steps);
    const std::string count = r.text("count", "ever");
    if (count == "ever") {
        c.sir.count = InfectionCount::ever_infected;
    } else if (count == "current") {
        c.sir.count = InfectionCount::currently_infected;
    } else {
        throw ParseError(r.line_of("count"), "count must be ever or current");
    }
    c.freeze_outbreak = r.flag("freeze_outbreak", c.freeze_outbreak);
    c.outbreak_attempts = r.count("outbreak_attempts", c.outbreak_attempts);

    const std::string sampler = r.text("sampler", "dnm");
    if (sampler == "dnm") {
        c.sampler = SamplerKind::dnm;
    } else if (sampler == "rw") {
        c.sampler = SamplerKind::rw;
    } else if (sampler == "durw") {
        c.sampler = SamplerKind::durw;
    } else {
        throw ParseError(r.line_of("sampler"), "sampler must be dnm, rw or durw");
    }
    c.alpha = r.real("alpha", c.alpha);
    c.delta = r.real("delta", c.delta);
    c.jump_weight = r.real("jump_weight", c.jump_weight);
    c.jump_costs = r.list("jump_costs", c.jump_costs);

    const std::string mode = r.text("mode", "auto");
    if (mode != "auto") {
        try {
            c.mode = weighting_mode_from_string(mode);
        } catch (const ParameterError&) {
            throw ParseError(r.line_of("mode"), "mode must be auto, literal or inverse");
        }
    }

    if (r.has("rates") && r.has("kappas")) {
        throw ParseError(r.line_of("kappas"), "give either rates or kappas, not both");
    }
    if (r.has("kappas")) {
        c.grid_kind = GridKind::kappa;
        c.grid = r.list("kappas", {});
    } else {
        c.grid = r.list("rates", c.grid);
    }
    c.replications = r.count("replications", c.replications);
    c.calibration_replications = r.count("calibration_replications", c.calibration_replications);
    c.seed = r.seed("seed", c.seed);
    c.output = r.text("output", c.output.string());
    c.geweke_from = r.count("geweke_from", c.geweke_from);
    c.geweke_threshold = r.real("geweke_threshold", c.geweke_threshold);

    r.reject_unused();
    try {
        c.validate();
    } catch (const ParameterError& e) {
        throw ParseError(line_no, e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    return parse_config(in);
}

DirectedGraph build_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    DirectedGraph g;
    if (const auto* params = std::get_if<GeneratorParams>(&spec.source)) {
        g = generate(*params, seed);
    } else {
        g = load_edge_list(std::get<std::filesystem::path>(spec.source)).graph;
    }
    if (spec.reverse) {
        g = g.transpose();
    }
    if (g.num_nodes() == 0) {
        throw ParameterError("dataset has no nodes");
    }
    if (!is_weakly_connected(g)) {
        g = largest_weak_component(g).graph;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Concurrency

std::size_t worker_count() {
    if (const char* env = std::getenv("NETMEASURE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task,
                  std::size_t workers) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers - 1);
        for (std::size_t t = 1; t < workers; ++t) {
            pool.emplace_back(drain);
        }
        drain();
        for (auto& th : pool) {
            th.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

// ---------------------------------------------------------------------------
// Kappa calibration

namespace {

std::vector<NodeId> seed_nodes(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::vector<NodeId> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, seed_node_stream, i));
        out[i] = static_cast<NodeId>(uniform_index(rng, n));
    }
    return out;
}

}  // namespace

double mean_realized_rate(const DirectedGraph& g, double alpha, double delta, double kappa,
                          std::span<const NodeId> seeds) {
    if (seeds.empty()) {
        throw ParameterError("no seed nodes");
    }
    std::vector<std::size_t> sizes(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        GraphAccess access(g);
        DnmParams p;
        p.alpha = alpha;
        p.delta = delta;
        p.kappa = kappa;
        sizes[i] = dnm_sample(access, seeds[i], p).size();
    });
    const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);
    return total / (static_cast<double>(seeds.size()) * static_cast<double>(g.num_nodes()));
}

CalibrationResult calibrate_kappa(const DirectedGraph& g, double alpha, double delta,
                                  std::span<const double> rates, std::size_t replications,
                                  std::uint64_t seed) {
    if (replications < 1) {
        throw ParameterError("calibration needs at least one replication");
    }
    for (double t : rates) {
        if (!(t > 0.0 && t <= 1.0)) {
            throw ParameterError("target rates must lie in (0, 1]");
        }
    }
    const auto seeds = seed_nodes(g.num_nodes(), replications, seed);
    std::map<double, double> evaluated;
    auto rate_at = [&](double kappa) {
        auto it = evaluated.find(kappa);
        if (it == evaluated.end()) {
            it = evaluated.emplace(kappa, mean_realized_rate(g, alpha, delta, kappa, seeds)).first;
        }
        return it->second;
    };
    auto within = [](double rate, double target) {
        return std::abs(rate - target) <= 0.1 * target;
    };

    CalibrationResult result;
    const double floor_rate = rate_at(max_kappa);
    const double ceiling_rate = rate_at(min_kappa);
    for (double target : rates) {
        KappaCalibration point{target, max_kappa, floor_rate, false};
        if (within(floor_rate, target) || target < floor_rate) {
            point.flagged = !within(floor_rate, target);
        } else if (!within(ceiling_rate, target) && target > ceiling_rate) {
            point = {target, min_kappa, ceiling_rate, true};
        } else {
            // Invariant: rate(lo) >= target > rate(hi).
            double lo = min_kappa;
            double hi = max_kappa;
            bool found = false;
            for (int step = 0; step < 80 && hi / lo > 1.0 + 1e-12; ++step) {
                const double mid = std::sqrt(lo * hi);
                const double rate = rate_at(mid);
                if (within(rate, target)) {
                    point = {target, mid, rate, false};
                    found = true;
                    break;
                }
                (rate > target ? lo : hi) = mid;
            }
            if (!found) {
                const double r_lo = rate_at(lo);
                const double r_hi = rate_at(hi);
                point = std::abs(r_lo - target) <= std::abs(r_hi - target)
                            ? KappaCalibration{target, lo, r_lo, true}
                            : KappaCalibration{target, hi, r_hi, true};
            }
        }
        result.points.push_back(point);
    }
    for (const auto& [kappa, rate] : evaluated) {
        result.curve.push_back({kappa, rate});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Shared replication pieces

namespace {

std::optional<SirOutcome> outbreak(const DirectedGraph& g, const SirParams& params,
                                   std::size_t attempts, std::uint64_t seed) {
    for (std::size_t a = 0; a < attempts; ++a) {
        auto o = run_sir(g, params, derive_seed(seed, a));
        if (o.reached_target) {
            return o;
        }
    }
    return std::nullopt;
}

std::size_t budget_for(double rate, std::size_t n) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n) - 1e-9)));
}

NodeId random_node(std::size_t n, std::uint64_t seed) {
    Rng rng(derive_seed(seed, seed_node_stream));
    return static_cast<NodeId>(uniform_index(rng, n));
}

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
};

Stats stats_of(std::span<const double> values) {
    Stats s;
    if (values.empty()) {
        return s;
    }
    const auto n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.stddev = std::sqrt(ss / (n - 1.0));
    }
    return s;
}

Metadata common_metadata(const ExperimentConfig& c, const DirectedGraph& g,
                         const std::string& dataset, WeightingMode mode,
                         const std::optional<ModeCalibration>& calibration) {
    Metadata m;
    m.emplace_back("experiment", c.name);
    m.emplace_back("dataset", dataset);
    m.emplace_back("nodes", std::to_string(g.num_nodes()));
    m.emplace_back("edges", std::to_string(g.num_edges()));
    if (g.num_edges() > 0) {
        m.emplace_back("reciprocity", format_number(reciprocity(g), 6));
    }
    m.emplace_back("alpha", format_number(c.alpha));
    m.emplace_back("delta", format_number(c.delta));
    m.emplace_back("grid", c.grid_kind == GridKind::rate ? "rate" : "kappa");
    m.emplace_back("estimator_mode", to_string(mode));
    m.emplace_back("mode_calibration",
                   calibration ? calibration->describe() : std::string("not run (mode set in config)"));
    m.emplace_back("replications", std::to_string(c.replications));
    m.emplace_back("calibration_replications", std::to_string(c.calibration_replications));
    m.emplace_back("master_seed", std::to_string(c.seed));
    return m;
}

void add_sir_metadata(Metadata& m, const ExperimentConfig& c) {
    m.emplace_back("theta1", format_number(c.sir.theta1));
    m.emplace_back("theta2", format_number(c.sir.theta2));
    m.emplace_back("target_ratio", format_number(c.sir.target_ratio));
    m.emplace_back("infection_count",
                   c.sir.count == InfectionCount::ever_infected ? "ever_infected" : "currently_infected");
    m.emplace_back("exact_stop", c.sir.exact_stop ? "true" : "false");
    m.emplace_back("outbreak", c.freeze_outbreak ? "frozen" : "fresh per replication");
}

std::string dataset_label(const DatasetSpec& spec) {
    std::string label = std::holds_alternative<GeneratorParams>(spec.source)
                            ? describe(std::get<GeneratorParams>(spec.source))
                            : "edge list " + std::get<std::filesystem::path>(spec.source).string();
    if (spec.reverse) {
        label += " reversed";
    }
    return label;
}

}  // namespace

// ---------------------------------------------------------------------------
// Estimator mode calibration

std::string ModeCalibration::describe() const {
    return std::string("chosen=") + to_string(chosen) + " literal_bias=" +
           format_number(literal_bias, 6) + " inverse_bias=" + format_number(inverse_bias, 6) +
           " literal_mean=" + format_number(literal_mean, 6) +
           " inverse_mean=" + format_number(inverse_mean, 6) +
           " truth=" + format_number(truth, 6) + " rate=" + format_number(realized_rate, 4) +
           " replications=" + std::to_string(replications) + " on DER(2000,0.1,0.6)";
}

ModeCalibration calibrate_mode(std::uint64_t seed, std::size_t replications) {
    static std::mutex memo_mutex;
    static std::map<std::pair<std::uint64_t, std::size_t>, ModeCalibration> memo;
    {
        std::lock_guard lock(memo_mutex);
        if (auto it = memo.find({seed, replications}); it != memo.end()) {
            return it->second;
        }
    }
    if (replications < 1) {
        throw ParameterError("mode calibration needs at least one replication");
    }

    const auto g = gen_der(DerParams{}, derive_seed(seed, mode_stream, graph_stream));
    const double rate = 0.2;
    const std::vector<double> rates{rate};
    const auto cal = calibrate_kappa(g, 0.15, 1e-7, rates, 20,
                                     derive_seed(seed, mode_stream, calibration_stream));
    DnmParams dp;
    dp.kappa = cal.points.front().kappa;
    dp.node_budget = budget_for(rate, g.num_nodes());

    struct Rep {
        bool ok = false;
        double literal = 0.0;
        double inverse = 0.0;
        double truth = 0.0;
        double rate = 0.0;
    };
    std::vector<Rep> reps(replications);
    parallel_for(replications, [&](std::size_t i) {
        const auto rep_seed = derive_seed(seed, mode_stream, replication_stream, i);
        const auto o = outbreak(g, SirParams{}, 20, derive_seed(rep_seed, outbreak_stream));
        if (!o) {
            return;
        }
        GraphAccess access(g);
        const auto trace = dnm_sample(access, random_node(g.num_nodes(), rep_seed), dp);
        reps[i] = {true, e_dir_value(trace.entries, o->labels, WeightingMode::literal),
                   e_dir_value(trace.entries, o->labels, WeightingMode::inverse), o->true_ratio,
                   static_cast<double>(trace.size()) / static_cast<double>(g.num_nodes())};
    });

    ModeCalibration m;
    m.kappa = dp.kappa;
    for (const Rep& r : reps) {
        if (!r.ok) {
            continue;
        }
        ++m.replications;
        m.literal_mean += r.literal;
        m.inverse_mean += r.inverse;
        m.literal_bias += std::abs(r.literal - r.truth);
        m.inverse_bias += std::abs(r.inverse - r.truth);
        m.truth += r.truth;
        m.realized_rate += r.rate;
    }
    if (m.replications == 0) {
        throw DegenerateSampleError("mode calibration: every outbreak died out");
    }
    const auto k = static_cast<double>(m.replications);
    m.literal_mean /= k;
    m.inverse_mean /= k;
    m.truth /= k;
    m.realized_rate /= k;
    m.literal_bias /= k;
    m.inverse_bias /= k;
    m.chosen = m.literal_bias < m.inverse_bias ? WeightingMode::literal : WeightingMode::inverse;

    std::lock_guard lock(memo_mutex);
    memo.emplace(std::pair{seed, replications}, m);
    return m;
}

// ---------------------------------------------------------------------------
// Results

bool SweepResult::empty() const {
    return series.empty() || std::all_of(series.begin(), series.end(),
                                         [](const SweepSeries& s) { return s.points.empty(); });
}

double OutdegreeResult::aggregate_bias(std::size_t method) const {
    double total = 0.0;
    for (const auto& row : rows) {
        total += row.mean_bias.at(method);
    }
    return total;
}

double OutdegreeResult::top_decile_bias(std::size_t method) const {
    if (rows.empty()) {
        throw UndefinedValueError("no outdegree rows");
    }
    const std::size_t k = std::max<std::size_t>(1, rows.size() / 10);
    double total = 0.0;
    for (std::size_t i = rows.size() - k; i < rows.size(); ++i) {
        total += rows[i].mean_bias.at(method);
    }
    return total / static_cast<double>(k);
}

double OutdegreeResult::bottom_decile_bias(std::size_t method) const {
    if (rows.empty()) {
        throw UndefinedValueError("no outdegree rows");
    }
    const std::size_t k = std::max<std::size_t>(1, rows.size() / 10);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        total += rows[i].mean_bias.at(method);
    }
    return total / static_cast<double>(k);
}

std::size_t GewekeResult::runs_below(double threshold) const {
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [&](const GewekeRun& r) {
        return r.max_abs_z && *r.max_abs_z < threshold;
    }));
}

std::size_t GewekeResult::runs_final_below(double threshold) const {
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [&](const GewekeRun& r) {
        return r.final_z && std::abs(*r.final_z) < threshold;
    }));
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

WeightingMode resolve_mode(const ExperimentConfig& c, std::optional<ModeCalibration>& calibration) {
    if (c.mode) {
        return *c.mode;
    }
    calibration = calibrate_mode(c.seed);
    return calibration->chosen;
}

const char* sampler_name(SamplerKind s) {
    switch (s) {
        case SamplerKind::dnm:
            return "dnm";
        case SamplerKind::rw:
            return "rw";
        case SamplerKind::durw:
            return "durw";
    }
    return "?";
}

}  // namespace

SweepResult run_infection_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.kind != ExperimentKind::infection) {
        throw ParameterError("not an infection experiment");
    }
    if (config.sampler != SamplerKind::dnm && config.grid_kind != GridKind::rate) {
        throw ParameterError("walk baselines need a sampling-rate grid");
    }

    std::optional<ModeCalibration> mode_cal;
    const WeightingMode dnm_mode = resolve_mode(config, mode_cal);
    // Walk traces carry weights proportional to their visiting probability.
    const WeightingMode mode =
        config.sampler == SamplerKind::dnm ? dnm_mode : WeightingMode::inverse;

    struct SeriesSpec {
        std::string label;
        DatasetSpec dataset;
        std::uint64_t key = 0;
    };
    std::vector<SeriesSpec> specs;
    if (config.reciprocity_sweep.empty()) {
        specs.push_back({"base", config.dataset, 0});
    } else {
        for (double r : config.reciprocity_sweep) {
            auto params = std::get<DerParams>(std::get<GeneratorParams>(config.dataset.source));
            params.reciprocity = r;
            DatasetSpec d = config.dataset;
            d.source = GeneratorParams{params};
            specs.push_back({"r=" + format_number(r), d, key_of(r)});
        }
    }

    SweepResult result;
    result.name = config.name;
    result.grid_kind = config.grid_kind;

    for (std::size_t s = 0; s < specs.size(); ++s) {
        const auto& spec = specs[s];
        const auto g = build_dataset(spec.dataset, derive_seed(config.seed, graph_stream, spec.key));
        const std::size_t n = g.num_nodes();
        if (s == 0) {
            result.metadata = common_metadata(config, g, dataset_label(config.dataset), mode, mode_cal);
            result.metadata.emplace_back("sampler", sampler_name(config.sampler));
            if (config.sampler == SamplerKind::durw) {
                result.metadata.emplace_back("jump_weight", format_number(config.jump_weight));
                result.metadata.emplace_back("jump_cost", format_number(config.jump_costs.front()));
            }
            if (!config.reciprocity_sweep.empty()) {
                result.metadata.emplace_back("sweep", "reciprocity");
            }
            add_sir_metadata(result.metadata, config);
        }
        if (!config.reciprocity_sweep.empty()) {
            result.metadata.emplace_back("series", spec.label + " " +
                                                   describe(std::get<GeneratorParams>(spec.dataset.source)) +
                                             " measured_reciprocity=" + format_number(reciprocity(g), 6));
        }

        CalibrationResult cal;
        if (config.sampler == SamplerKind::dnm && config.grid_kind == GridKind::rate) {
            cal = calibrate_kappa(g, config.alpha, config.delta, config.grid,
                                  config.calibration_replications,
                                  derive_seed(config.seed, calibration_stream, spec.key));
            result.calibrations.push_back(cal);
        }

        std::optional<SirOutcome> frozen;
        if (config.freeze_outbreak) {
            frozen = outbreak(g, config.sir, config.outbreak_attempts,
                              derive_seed(config.seed, frozen_stream, spec.key));
            if (!frozen) {
                throw DegenerateSampleError("frozen outbreak died out on every attempt");
            }
        }

        struct Rep {
            bool ok = false;
            double estimate = 0.0;
            double truth = 0.0;
            double rate = 0.0;
        };
        const std::size_t points = config.grid.size();
        const std::size_t reps = config.replications;
        std::vector<Rep> out(points * reps);
        parallel_for(points * reps, [&](std::size_t task) {
            const std::size_t gi = task / reps;
            const std::size_t ri = task % reps;
            const double value = config.grid[gi];
            const auto rep_seed =
                derive_seed(config.seed, replication_stream, spec.key, key_of(value), ri);
            std::optional<SirOutcome> fresh;
            const SirOutcome* o = frozen ? &*frozen : nullptr;
            if (!o) {
                fresh = outbreak(g, config.sir, config.outbreak_attempts,
                                 derive_seed(rep_seed, outbreak_stream));
                if (!fresh) {
                    return;
                }
                o = &*fresh;
            }
            GraphAccess access(g);
            SampleTrace trace;
            switch (config.sampler) {
                case SamplerKind::dnm: {
                    DnmParams dp;
                    dp.alpha = config.alpha;
                    dp.delta = config.delta;
                    if (config.grid_kind == GridKind::rate) {
                        dp.kappa = cal.points[gi].kappa;
                        dp.node_budget = budget_for(value, n);
                    } else {
                        dp.kappa = value;
                    }
                    trace = dnm_sample(access, random_node(n, rep_seed), dp);
                    break;
                }
                case SamplerKind::rw: {
                    RwParams rp;
                    rp.length = budget_for(value, n);
                    trace = rw_sample(access, random_node(n, rep_seed), rp,
                                      derive_seed(rep_seed, walker_stream));
                    break;
                }
                case SamplerKind::durw: {
                    DurwParams wp;
                    wp.jump_weight = config.jump_weight;
                    wp.jump_cost = config.jump_costs.front();
                    wp.budget = std::max(value * static_cast<double>(n), wp.jump_cost);
                    trace = durw_sample(access, UniformNodeOracle(n), wp,
                                        derive_seed(rep_seed, walker_stream));
                    break;
                }
            }
            out[task] = {true, e_dir_value(trace.entries, o->labels, mode), o->true_ratio,
                         static_cast<double>(access.num_visited()) / static_cast<double>(n)};
        });

        SweepSeries series;
        series.label = spec.label;
        for (std::size_t gi = 0; gi < points; ++gi) {
            SweepPoint p;
            p.grid_value = config.grid[gi];
            if (!cal.points.empty()) {
                p.kappa = cal.points[gi].kappa;
                p.flagged = cal.points[gi].flagged;
            } else if (config.grid_kind == GridKind::kappa) {
                p.kappa = p.grid_value;
            }
            std::vector<double> estimates;
            double bias = 0.0;
            double truth = 0.0;
            double rate = 0.0;
            for (std::size_t ri = 0; ri < reps; ++ri) {
                const Rep& r = out[gi * reps + ri];
                if (!r.ok) {
                    ++p.dropped;
                    continue;
                }
                estimates.push_back(r.estimate);
                bias += std::abs(r.estimate - r.truth);
                truth += r.truth;
                rate += r.rate;
            }
            p.replications = estimates.size();
            if (p.replications > 0) {
                const auto k = static_cast<double>(p.replications);
                const auto st = stats_of(estimates);
                p.mean_estimate = st.mean;
                p.stddev = st.stddev;
                p.mean_bias = bias / k;
                p.truth = truth / k;
                p.realized_rate = rate / k;
            }
            series.points.push_back(p);
        }
        result.series.push_back(std::move(series));
    }
    return result;
}

OutdegreeResult run_outdegree_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.kind != ExperimentKind::outdegree) {
        throw ParameterError("not an outdegree experiment");
    }
    std::optional<ModeCalibration> mode_cal;
    const WeightingMode mode = resolve_mode(config, mode_cal);
    const double rate = config.grid.front();

    const auto g = build_dataset(config.dataset, derive_seed(config.seed, graph_stream, 0));
    const std::size_t n = g.num_nodes();

    std::map<std::size_t, std::size_t> histogram;
    for (NodeId x = 0; x < n; ++x) {
        ++histogram[g.out_degree(x)];
    }
    std::vector<std::size_t> degrees;
    std::vector<std::size_t> index_of_degree(n, 0);
    for (const auto& [d, count] : histogram) {
        index_of_degree[d] = degrees.size();
        degrees.push_back(d);
    }

    OutdegreeResult result;
    result.name = config.name;
    result.metadata = common_metadata(config, g, dataset_label(config.dataset), mode, mode_cal);
    result.metadata.emplace_back("target", "outdegree distribution");
    result.metadata.emplace_back("sampling_rate", format_number(rate));
    result.metadata.emplace_back("jump_weight", format_number(config.jump_weight));
    result.metadata.emplace_back("durw_budget", format_number(rate * static_cast<double>(n)) +
                                                    " units (walk step 1, jump c)");
    result.metadata.emplace_back("durw_estimator_mode", "inverse");

    const auto cal = calibrate_kappa(g, config.alpha, config.delta, std::vector<double>{rate},
                                     config.calibration_replications,
                                     derive_seed(config.seed, calibration_stream, 0));
    result.metadata.emplace_back("kappa", format_number(cal.points.front().kappa));
    result.metadata.emplace_back("kappa_flagged", cal.points.front().flagged ? "true" : "false");
    result.metadata.emplace_back("dnm_budget", std::to_string(budget_for(rate, n)));

    result.methods.push_back("dnm");
    for (double c : config.jump_costs) {
        result.methods.push_back("durw_c" + format_number(c));
    }
    const std::size_t methods = result.methods.size();
    const std::size_t reps = config.replications;
    const std::size_t dcount = degrees.size();

    // Per (method, replication): estimate per degree index, realized rate.
    std::vector<std::vector<double>> estimates(methods * reps);
    std::vector<double> rates(methods * reps, 0.0);
    parallel_for(methods * reps, [&](std::size_t task) {
        const std::size_t mi = task / reps;
        const std::size_t ri = task % reps;
        const auto rep_seed = derive_seed(config.seed, replication_stream, 0, key_of(rate), ri);
        GraphAccess access(g);
        SampleTrace trace;
        WeightingMode m = mode;
        if (mi == 0) {
            DnmParams dp;
            dp.alpha = config.alpha;
            dp.delta = config.delta;
            dp.kappa = cal.points.front().kappa;
            dp.node_budget = budget_for(rate, n);
            trace = dnm_sample(access, random_node(n, rep_seed), dp);
        } else {
            DurwParams wp;
            wp.jump_weight = config.jump_weight;
            wp.jump_cost = config.jump_costs[mi - 1];
            wp.budget = std::max(rate * static_cast<double>(n), wp.jump_cost);
            trace = durw_sample(access, UniformNodeOracle(n), wp,
                                derive_seed(rep_seed, walker_stream, key_of(wp.jump_cost)));
            m = WeightingMode::inverse;
        }
        // One pass computes e_dir for every outdegree indicator at once.
        std::vector<double> num(dcount, 0.0);
        double den = 0.0;
        for (const TraceEntry& e : trace.entries) {
            if (!(e.weight > 0.0)) {
                throw DegenerateSampleError("trace weight must be positive");
            }
            const double w = m == WeightingMode::literal ? e.weight : 1.0 / e.weight;
            num[index_of_degree[g.out_degree(e.node)]] += w;
            den += w;
        }
        if (trace.empty()) {
            throw DegenerateSampleError("empty trace");
        }
        for (double& v : num) {
            v /= den;
        }
        estimates[task] = std::move(num);
        rates[task] = static_cast<double>(access.num_visited()) / static_cast<double>(n);
    });

    for (std::size_t mi = 0; mi < methods; ++mi) {
        double total = 0.0;
        for (std::size_t ri = 0; ri < reps; ++ri) {
            total += rates[mi * reps + ri];
        }
        result.realized_rate.push_back(total / static_cast<double>(reps));
        result.replications.push_back(reps);
    }
    std::vector<double> column(reps);
    for (std::size_t di = 0; di < dcount; ++di) {
        OutdegreeRow row;
        row.degree = degrees[di];
        row.truth = static_cast<double>(histogram[degrees[di]]) / static_cast<double>(n);
        for (std::size_t mi = 0; mi < methods; ++mi) {
            double bias = 0.0;
            for (std::size_t ri = 0; ri < reps; ++ri) {
                column[ri] = estimates[mi * reps + ri][di];
                bias += std::abs(column[ri] - row.truth);
            }
            const auto st = stats_of(column);
            row.mean_estimate.push_back(st.mean);
            row.stddev.push_back(st.stddev);
            row.mean_bias.push_back(bias / static_cast<double>(reps));
        }
        result.rows.push_back(std::move(row));
    }
    for (std::size_t mi = 0; mi < methods; ++mi) {
        result.metadata.emplace_back(
            "summary_" + result.methods[mi],
            "aggregate_bias=" + format_number(result.aggregate_bias(mi), 6) +
                " top_decile_bias=" + format_number(result.top_decile_bias(mi), 6) +
                " bottom_decile_bias=" + format_number(result.bottom_decile_bias(mi), 6) +
                " realized_rate=" + format_number(result.realized_rate[mi], 6));
    }
    return result;
}

GewekeResult run_geweke_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.kind != ExperimentKind::geweke) {
        throw ParameterError("not a geweke experiment");
    }
    std::optional<ModeCalibration> mode_cal;
    const WeightingMode mode = resolve_mode(config, mode_cal);
    const double rate = config.grid.front();
    const auto g = build_dataset(config.dataset, derive_seed(config.seed, graph_stream, 0));
    const std::size_t n = g.num_nodes();

    const auto cal = calibrate_kappa(g, config.alpha, config.delta, std::vector<double>{rate},
                                     config.calibration_replications,
                                     derive_seed(config.seed, calibration_stream, 0));
    GewekeResult result;
    result.name = config.name;
    result.metadata = common_metadata(config, g, dataset_label(config.dataset), mode, mode_cal);
    add_sir_metadata(result.metadata, config);
    result.metadata.emplace_back("sampling_rate", format_number(rate));
    result.metadata.emplace_back("kappa", format_number(cal.points.front().kappa));
    result.metadata.emplace_back("dnm_budget", std::to_string(budget_for(rate, n)));
    result.metadata.emplace_back("monitored", "running e_dir estimate");
    result.metadata.emplace_back("geweke_segments", "first 10% vs last 50%");
    result.metadata.emplace_back("spectral_estimator",
                                 "Bartlett window, lag cutoff floor(sqrt(segment length))");
    result.metadata.emplace_back("judged_from", std::to_string(config.geweke_from));

    std::vector<std::optional<GewekeRun>> runs(config.replications);
    parallel_for(config.replications, [&](std::size_t i) {
        const auto rep_seed = derive_seed(config.seed, replication_stream, 0, key_of(rate), i);
        const auto o = outbreak(g, config.sir, config.outbreak_attempts,
                                derive_seed(rep_seed, outbreak_stream));
        if (!o) {
            return;
        }
        DnmParams dp;
        dp.alpha = config.alpha;
        dp.delta = config.delta;
        dp.kappa = cal.points.front().kappa;
        dp.node_budget = budget_for(rate, n);
        GraphAccess access(g);
        GewekeRun run;
        run.seed_node = random_node(n, rep_seed);
        run.truth = o->true_ratio;
        const auto trace = dnm_sample(access, run.seed_node, dp);
        run.profile = geweke_profile(trace, o->labels, mode);
        for (const auto& p : run.profile) {
            if (p.k >= config.geweke_from && p.z) {
                run.max_abs_z = std::max(run.max_abs_z.value_or(0.0), std::abs(*p.z));
            }
        }
        if (!run.profile.empty()) {
            run.final_z = run.profile.back().z;
        }
        runs[i] = std::move(run);
    });
    std::size_t dropped = 0;
    for (auto& r : runs) {
        if (r) {
            result.runs.push_back(std::move(*r));
        } else {
            ++dropped;
        }
    }
    result.metadata.emplace_back("dropped_runs", std::to_string(dropped));
    result.metadata.emplace_back(
        "runs_below_threshold",
        std::to_string(result.runs_below(config.geweke_threshold)) + "/" +
            std::to_string(result.runs.size()) + " (|Z| < " +
            format_number(config.geweke_threshold) + " on every judged prefix)");
    result.metadata.emplace_back(
        "runs_final_below_threshold",
        std::to_string(result.runs_final_below(config.geweke_threshold)) + "/" +
            std::to_string(result.runs.size()));
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    switch (config.kind) {
        case ExperimentKind::infection:
            return run_infection_experiment(config);
        case ExperimentKind::outdegree:
            return run_outdegree_experiment(config);
        case ExperimentKind::geweke:
            return run_geweke_experiment(config);
    }
    throw ParameterError("unknown experiment kind");
}

}  // namespace netmeasure
