// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "netmeasure/access.hpp"
#include "netmeasure/dnm.hpp"
#include "netmeasure/estimators.hpp"
#include "netmeasure/generators.hpp"
#include "netmeasure/harness.hpp"
#include "netmeasure/rng.hpp"
#include "netmeasure/text.hpp"

using namespace netmeasure;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t master_seed = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4) { return format_number(v, digits); }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

FiniteMeasureProblem random_problem(std::size_t n, Rng& rng) {
    FiniteMeasureProblem p;
    double total = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        p.target_measure.push_back(0.05 + uniform01(rng) * 2.0);
        p.trial.push_back(0.05 + uniform01(rng));
        total += p.trial.back();
    }
    for (double& t : p.trial) {
        t /= total;
    }
    return p;
}

std::vector<double> random_labels(std::size_t n, Rng& rng) {
    std::vector<double> f(n);
    for (double& v : f) {
        v = uniform01(rng);
    }
    return f;
}

// ---------------------------------------------------------------------------

Outcome bound_holds() {
    const auto start = std::chrono::steady_clock::now();
    const double alpha = 0.15;
    const double delta = 1e-7;
    std::size_t runs = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto g = gen_der({500, 0.05, 0.6}, derive_seed(master_seed, 1, s));
        Rng rng(derive_seed(master_seed, 1, s, 1));
        const auto seed_node = static_cast<NodeId>(uniform_index(rng, g.num_nodes()));
        std::vector<double> sv(g.num_nodes(), 0.0);
        sv[seed_node] = 1.0;
        const auto exact = exact_ppr(g, sv, alpha, 1e-12);
        for (double kappa : {0.2, 0.1, 0.05, 0.01}) {
            DnmParams p;
            p.alpha = alpha;
            p.kappa = kappa;
            p.delta = delta;
            GraphAccess access(g);
            BoundaryPprSampler sampler(access, seed_node, p);
            sampler.run();
            double err = 0.0;
            for (NodeId x = 0; x < g.num_nodes(); ++x) {
                err += std::abs(exact[x] - sampler.value(x));
            }
            const double bound = ppr_error_bound(alpha, kappa, delta);
            ++runs;
            violations += err > bound;
            worst_ratio = std::max(worst_ratio, err / bound);
        }
    }
    const double secs = seconds_since(start);
    return {violations == 0 && secs < 120.0,
            std::to_string(runs - violations) + "/" + std::to_string(runs) +
                " runs within bound, worst error/bound " + fmt(worst_ratio, 3) + ", " +
                fmt(secs, 3) + " s"};
}

Outcome estimators_unbiased() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(derive_seed(master_seed, 2));
    std::size_t is_ok = 0;
    std::size_t rmse_ok = 0;
    double worst_z = 0.0;
    std::string rmse_note;
    for (int problem_index = 0; problem_index < 20; ++problem_index) {
        auto p = random_problem(100, rng);
        const auto f = random_labels(100, rng);

        const auto samples = p.draw(100000, rng);
        const auto r = e_is(p, f, samples);
        double ss = 0.0;
        for (double v : r.values) {
            ss += (v - r.mean) * (v - r.mean);
        }
        const double n = static_cast<double>(r.values.size());
        const double se = std::sqrt(ss / (n - 1.0) / n);
        const double z = std::abs(r.mean - p.target_sum(f)) / se;
        worst_z = std::max(worst_z, z);
        is_ok += z < 3.0;

        // Constant weight skew u = c w: the setting in which the approximate
        // ratio estimator is consistent for the average.
        const double c = 0.5 + 2.0 * uniform01(rng);
        for (std::size_t x = 0; x < p.size(); ++x) {
            p.approx_weight.push_back(c * p.importance_weight(x));
        }
        const double truth = p.target_average(f);
        auto rmse = [&](std::size_t draws, bool approximate) {
            double acc = 0.0;
            for (int rep = 0; rep < 200; ++rep) {
                const auto xs = p.draw(draws, rng);
                const double est = approximate ? e_aris(p, f, xs) : e_ris(p, f, xs);
                acc += (est - truth) * (est - truth);
            }
            return std::sqrt(acc / 200.0);
        };
        const double ris_1000 = rmse(1000, false);
        const double ris_4000 = rmse(4000, false);
        const double aris_1000 = rmse(1000, true);
        const double aris_4000 = rmse(4000, true);
        rmse_ok += (ris_4000 < ris_1000) && (aris_4000 < aris_1000);
        if (problem_index == 0) {
            rmse_note = "first problem RMSE ris " + fmt(ris_1000, 3) + "->" + fmt(ris_4000, 3) +
                        ", aris " + fmt(aris_1000, 3) + "->" + fmt(aris_4000, 3);
        }
    }
    const double secs = seconds_since(start);
    return {is_ok == 20 && rmse_ok == 20 && secs < 180.0,
            "e_is within 3 SE " + std::to_string(is_ok) + "/20 (worst " + fmt(worst_z, 3) +
                " SE), RMSE shrinks " + std::to_string(rmse_ok) + "/20; " + rmse_note + ", " +
                fmt(secs, 3) + " s"};
}

Outcome decomposition_matches() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(derive_seed(master_seed, 3));
    std::size_t ok = 0;
    double worst_z = 0.0;
    for (int i = 0; i < 10; ++i) {
        const std::size_t n = 20 + 10 * static_cast<std::size_t>(i);
        auto p = random_problem(n, rng);
        const auto f = random_labels(n, rng);
        // Skew u/w varies by node; odd problems correlate it with f.
        for (std::size_t x = 0; x < n; ++x) {
            const double skew = (i % 2 == 1) ? 0.5 + f[x] + 0.3 * uniform01(rng)
                                             : 0.5 + uniform01(rng);
            p.approx_weight.push_back(skew * p.importance_weight(x));
        }
        const auto d = bias_decomposition(p, f, 200000, rng);
        const double z = std::abs(d.empirical_mean - d.predicted_mean) / d.standard_error;
        worst_z = std::max(worst_z, z);
        ok += d.consistent(3.0);
    }
    const double secs = seconds_since(start);
    return {ok == 10 && secs < 60.0, std::to_string(ok) + "/10 problems within 3 SE (worst " +
                                         fmt(worst_z, 3) + " SE), " + fmt(secs, 3) + " s"};
}

Outcome constant_exact() {
    const auto g = gen_der({500, 0.05, 0.6}, derive_seed(master_seed, 4));
    Rng rng(derive_seed(master_seed, 4, 1));
    std::size_t ok = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        DnmParams p;
        p.kappa = std::exp(std::log(1e-3) * uniform01(rng));  // log-uniform in [1e-3, 1]
        GraphAccess access(g);
        const auto trace =
            dnm_sample(access, static_cast<NodeId>(uniform_index(rng, g.num_nodes())), p);
        const double c = -5.0 + 10.0 * uniform01(rng);
        const auto f = LabelFunction::constant(g.num_nodes(), c);
        bool both = true;
        for (auto mode : {WeightingMode::literal, WeightingMode::inverse}) {
            const double err = std::abs(e_dir_value(trace.entries, f, mode) - c);
            worst = std::max(worst, err);
            both = both && err <= 1e-12;
        }
        ok += both;
    }
    return {ok == 100, std::to_string(ok) + "/100 traces exact in both modes, worst error " +
                           fmt(worst, 3)};
}

ExperimentConfig infection_config(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.kind = ExperimentKind::infection;
    c.seed = master_seed;
    c.replications = 100;
    c.calibration_replications = 20;
    return c;
}

const SweepPoint& point_at(const SweepSeries& series, double rate) {
    for (const auto& p : series.points) {
        if (p.grid_value == rate) {
            return p;
        }
    }
    throw std::logic_error("grid value missing");
}

std::string describe_point(const SweepPoint& p) {
    return "rate " + fmt(p.grid_value) + ": estimate " + fmt(p.mean_estimate) + " truth " +
           fmt(p.truth) + " bias " + fmt(p.mean_bias) + " (realized " + fmt(p.realized_rate, 3) +
           ", n=" + std::to_string(p.replications) + ")";
}

std::string mode_note(const SweepResult& r) {
    for (const auto& [key, value] : r.metadata) {
        if (key == "estimator_mode") {
            return "mode " + value;
        }
    }
    return "";
}

Outcome end_to_end() {
    const auto start = std::chrono::steady_clock::now();
    auto c = infection_config("der_infection");
    c.grid = {0.02, 0.2};
    const auto r = run_infection_experiment(c);
    const auto& lo = point_at(r.series[0], 0.02);
    const auto& hi = point_at(r.series[0], 0.2);
    const double secs = seconds_since(start);
    const bool close = std::abs(hi.mean_estimate - hi.truth) <= 0.03;
    const bool trend = hi.mean_bias < lo.mean_bias;
    return {close && trend && secs < 600.0 && !hi.flagged && !lo.flagged,
            mode_note(r) + "; " + describe_point(hi) + "; " + describe_point(lo) + ", " +
                fmt(secs, 3) + " s"};
}

Outcome dws_insensitive() {
    auto c = infection_config("dws_infection");
    c.dataset.source = GeneratorParams{DwsParams{2000, 20, 0.1}};
    c.grid = {0.01};
    const auto r = run_infection_experiment(c);
    const auto& p = r.series[0].points[0];
    return {std::abs(p.mean_estimate - p.truth) <= 0.05 && !p.flagged,
            mode_note(r) + "; " + describe_point(p)};
}

Outcome reciprocity_trend() {
    auto c = infection_config("reciprocity_sweep");
    c.reciprocity_sweep = {0.6, 0.7, 0.8, 0.9};
    c.grid = {0.02};
    const auto r = run_infection_experiment(c);
    bool monotone = true;
    std::string detail = mode_note(r) + "; bias by r:";
    for (std::size_t i = 0; i < r.series.size(); ++i) {
        const auto& p = r.series[i].points[0];
        detail += " " + r.series[i].label + " " + fmt(p.mean_bias);
        if (i > 0 && p.mean_bias < r.series[i - 1].points[0].mean_bias) {
            monotone = false;
        }
    }
    return {monotone, detail};
}

Outcome geweke_converges() {
    ExperimentConfig c;
    c.name = "geweke";
    c.kind = ExperimentKind::geweke;
    c.seed = master_seed;
    c.grid = {0.2};
    c.replications = 50;
    c.calibration_replications = 20;
    c.geweke_from = 200;
    c.geweke_threshold = 1.5;
    const auto r = run_geweke_experiment(c);
    const std::size_t runs = r.runs.size();
    const std::size_t below = r.runs_below(1.5);
    const std::size_t final_below = r.runs_final_below(1.5);
    const double share = runs ? static_cast<double>(below) / static_cast<double>(runs) : 0.0;
    return {runs == 50 && share >= 0.8,
            std::to_string(below) + "/" + std::to_string(runs) +
                " runs with |Z| < 1.5 on every prefix of >= 200 nodes (need 80%); " +
                std::to_string(final_below) + "/" + std::to_string(runs) +
                " below 1.5 at the full sample"};
}

Outcome outdegree_trends() {
    ExperimentConfig c;
    c.name = "outdegree";
    c.kind = ExperimentKind::outdegree;
    c.seed = master_seed;
    c.dataset.source = GeneratorParams{DsfParams{}};
    c.dataset.reverse = true;
    c.grid = {0.1};
    c.replications = 100;
    c.calibration_replications = 20;
    c.jump_weight = 10.0;
    c.jump_costs = {1.0, 10.0, 50.0};
    const auto r = run_outdegree_experiment(c);
    bool increasing = true;
    bool tails = true;
    std::string agg = "DURW aggregate bias c=1,10,50:";
    std::string decile = "top/bottom decile bias:";
    for (std::size_t m = 0; m < r.methods.size(); ++m) {
        const double top = r.top_decile_bias(m);
        const double bottom = r.bottom_decile_bias(m);
        tails = tails && top <= bottom;
        decile += " " + r.methods[m] + " " + fmt(top, 3) + "/" + fmt(bottom, 3);
        if (m >= 1) {
            agg += " " + fmt(r.aggregate_bias(m));
            if (m >= 2 && !(r.aggregate_bias(m) > r.aggregate_bias(m - 1))) {
                increasing = false;
            }
        }
    }
    return {increasing && tails, agg + "; " + decile};
}

// --- CLI determinism -------------------------------------------------------

std::map<std::string, std::string> read_csvs(const fs::path& dir) {
    std::map<std::string, std::string> out;
    if (!fs::exists(dir)) {
        return out;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") {
            std::ifstream in(entry.path(), std::ios::binary);
            std::stringstream buf;
            buf << in.rdbuf();
            out[entry.path().filename().string()] = buf.str();
        }
    }
    return out;
}

int run_cli(const fs::path& config, const fs::path& out, const std::string& threads,
            const std::string& extra) {
    const std::string cmd = "NETMEASURE_THREADS=" + threads + " \"" + NETMEASURE_CLI_PATH +
                            "\" experiment \"" + config.string() + "\" -o \"" + out.string() +
                            "\" " + extra + " > /dev/null";
    return std::system(cmd.c_str());
}

Outcome cli_deterministic() {
    const auto work = fs::temp_directory_path() / "netmeasure_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    std::vector<std::pair<std::string, std::string>> configs{
        {"infection_auto",
         "graph = der\nn = 600\np0 = 0.03\nrates = 0.02, 0.1\nreplications = 10\n"
         "calibration_replications = 5\n"},
        {"infection_dws_kappa",
         "graph = dws\nn = 600\nk = 6\nkappas = 0.1, 0.01\nmode = literal\nreplications = 10\n"},
        {"reciprocity",
         "graph = der\nn = 400\np0 = 0.05\nreciprocity_sweep = 0.6, 0.9\nrates = 0.05\n"
         "mode = inverse\nreplications = 10\ncalibration_replications = 5\n"},
        {"walks",
         "graph = der\nn = 400\np0 = 0.05\nsampler = durw\njump_costs = 10\nrates = 0.05, 0.1\n"
         "replications = 10\n"},
        {"random_walk",
         "graph = der\nn = 400\np0 = 0.05\nsampler = rw\nrates = 0.05\nreplications = 10\n"},
        {"outdegree",
         "experiment = outdegree\ngraph = dsf\nn = 400\nm = 8\nreverse = true\nrates = 0.1\n"
         "mode = inverse\nreplications = 10\ncalibration_replications = 5\n"},
        {"geweke",
         "experiment = geweke\ngraph = der\nn = 600\np0 = 0.03\nrates = 0.2\n"
         "mode = inverse\nreplications = 6\ncalibration_replications = 5\ngeweke_from = 60\n"},
    };
    // Shipped configs run with few replications.
    std::vector<fs::path> shipped;
    const fs::path config_dir = fs::path(NETMEASURE_SOURCE_DIR) / "configs";
    if (fs::exists(config_dir)) {
        for (const auto& entry : fs::directory_iterator(config_dir)) {
            if (entry.path().extension() == ".cfg") {
                shipped.push_back(entry.path());
            }
        }
    }
    std::sort(shipped.begin(), shipped.end());

    std::size_t total = 0;
    std::size_t identical = 0;
    std::vector<std::string> mismatched;
    auto check = [&](const std::string& label, const fs::path& config, const std::string& extra) {
        ++total;
        const auto a = work / (label + "_a");
        const auto b = work / (label + "_b");
        const int ra = run_cli(config, a, "1", extra);
        const int rb = run_cli(config, b, "4", extra);
        const auto ca = read_csvs(a);
        const auto cb = read_csvs(b);
        if (ra == 0 && rb == 0 && !ca.empty() && ca == cb) {
            ++identical;
        } else {
            mismatched.push_back(label);
        }
    };
    for (const auto& [label, text] : configs) {
        const auto path = work / (label + ".cfg");
        std::ofstream(path) << "name = " << label << "\nseed = " << master_seed << '\n' << text;
        check(label, path, "");
    }
    for (const auto& path : shipped) {
        check("shipped_" + path.stem().string(), path, "--replications 2");
    }
    fs::remove_all(work);

    std::string detail = std::to_string(identical) + "/" + std::to_string(total) +
                         " experiments byte-identical across reruns (1 vs 4 threads)";
    for (const auto& m : mismatched) {
        detail += "; differs: " + m;
    }
    return {identical == total && total > 0, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"approximation error within the kappa/delta bound", bound_holds},
        {"importance sampling estimators unbiased and consistent", estimators_unbiased},
        {"approximate IS mean matches its bias decomposition", decomposition_matches},
        {"constant labels estimated exactly", constant_exact},
        {"infection ratio on DER(2000) recovered at 20% sampling", end_to_end},
        {"DWS estimate close to truth at 1% sampling", dws_insensitive},
        {"bias non-decreasing in reciprocity at 2% sampling", reciprocity_trend},
        {"Geweke scores settle after 200 sampled nodes", geweke_converges},
        {"outdegree bias trends for DNM and DURW", outdegree_trends},
        {"CLI experiments rerun byte-identically", cli_deterministic},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [title, run] = criteria[i];
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  "
                  << title << "  [" << o.detail << "]" << std::endl;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failures == 0 ? 0 : 1;
}
