// netmeasure: generate graphs, spread outbreaks, crawl, estimate and run
// replicated experiments.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "netmeasure/baselines.hpp"
#include "netmeasure/diagnostics.hpp"
#include "netmeasure/dnm.hpp"
#include "netmeasure/errors.hpp"
#include "netmeasure/estimators.hpp"
#include "netmeasure/generators.hpp"
#include "netmeasure/harness.hpp"
#include "netmeasure/labels.hpp"
#include "netmeasure/sir.hpp"
#include "netmeasure/text.hpp"
#include "netmeasure/trace.hpp"

using namespace netmeasure;

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return in;
}

DirectedGraph load_graph(const std::string& path) {
    auto load = load_edge_list(std::filesystem::path(path));
    if (load.dropped.self_loops + load.dropped.duplicates > 0) {
        std::cerr << "note: dropped " << load.dropped.self_loops << " self-loops and "
                  << load.dropped.duplicates << " duplicate links\n";
    }
    return std::move(load.graph);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measurement of directed networks by boundary-restricted PageRank sampling"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic directed graph as an edge list");
    std::string model = "der";
    std::string gen_out;
    std::uint64_t gen_seed = 1;
    bool gen_reverse = false;
    DerParams der;
    DwsParams dws;
    DsfParams dsf;
    std::size_t n = 0;
    std::optional<double> p0;
    gen->add_option("--model", model, "der, dws or dsf")
        ->check(CLI::IsMember({"der", "dws", "dsf"}))
        ->capture_default_str();
    gen->add_option("--n", n, "number of nodes (model default when omitted)");
    gen->add_option("--p0", p0, "DER link probability or DWS rewiring probability");
    gen->add_option("--reciprocity", der.reciprocity, "DER target reciprocity")->capture_default_str();
    gen->add_option("--k", dws.k, "DWS lattice degree (even)")->capture_default_str();
    gen->add_option("--m0", dsf.m0, "DSF seed graph size")->capture_default_str();
    gen->add_option("--p0-init", dsf.p0_init, "DSF seed graph link probability")->capture_default_str();
    gen->add_option("--m", dsf.m, "DSF links per new node")->capture_default_str();
    gen->add_option("--beta1", dsf.beta1, "DSF in-degree attachment weight")->capture_default_str();
    gen->add_option("--beta2", dsf.beta2, "DSF out-degree attachment weight")->capture_default_str();
    gen->add_option("--beta3", dsf.beta3, "DSF uniform attachment weight")->capture_default_str();
    gen->add_flag("--reverse", gen_reverse, "reverse every link");
    gen->add_option("--seed", gen_seed, "random seed")->capture_default_str();
    gen->add_option("-o,--output", gen_out, "edge list path")->required();

    // sir
    auto* sir = app.add_subcommand("sir", "Spread an SIR outbreak and write node labels");
    std::string sir_graph;
    std::string sir_out;
    std::uint64_t sir_seed = 1;
    std::string sir_count = "ever";
    SirParams sp;
    sir->add_option("--graph", sir_graph, "edge list")->required();
    sir->add_option("--theta1", sp.theta1, "infection probability")->capture_default_str();
    sir->add_option("--theta2", sp.theta2, "recovery probability")->capture_default_str();
    sir->add_option("--target", sp.target_ratio, "stop once this fraction is reached")
        ->capture_default_str();
    sir->add_option("--initial", sp.initial_count, "initially infected nodes")->capture_default_str();
    sir->add_option("--count", sir_count, "ever (I or R) or current (I)")
        ->check(CLI::IsMember({"ever", "current"}))
        ->capture_default_str();
    sir->add_flag("!--no-exact-stop", sp.exact_stop, "let the last step overshoot the target");
    sir->add_option("--seed", sir_seed, "random seed")->capture_default_str();
    sir->add_option("-o,--output", sir_out, "label file")->required();

    // sample
    auto* sample = app.add_subcommand("sample", "Crawl a graph and write the sample trace");
    std::string smp_graph;
    std::string smp_out;
    std::string sampler = "dnm";
    std::uint64_t smp_seed = 1;
    std::optional<NodeId> start;
    DnmParams dp;
    std::optional<std::size_t> budget;
    DurwParams wp;
    std::size_t rw_length = 100;
    sample->add_option("--graph", smp_graph, "edge list")->required();
    sample->add_option("--sampler", sampler, "dnm, rw or durw")
        ->check(CLI::IsMember({"dnm", "rw", "durw"}))
        ->capture_default_str();
    sample->add_option("--start", start, "seed node (random when omitted; unused by durw)");
    sample->add_option("--alpha", dp.alpha, "DNM jump probability")->capture_default_str();
    sample->add_option("--kappa", dp.kappa, "DNM expansion tolerance")->capture_default_str();
    sample->add_option("--delta", dp.delta, "DNM convergence tolerance")->capture_default_str();
    sample->add_option("--budget", budget,
                       "DNM node budget, or DURW budget units (default 100)");
    sample->add_option("--jump-weight", wp.jump_weight, "DURW jump weight w")->capture_default_str();
    sample->add_option("--jump-cost", wp.jump_cost, "DURW jump cost c")->capture_default_str();
    sample->add_option("--length", rw_length, "RW visits")->capture_default_str();
    sample->add_option("--seed", smp_seed, "random seed")->capture_default_str();
    sample->add_option("-o,--output", smp_out, "trace file")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate a label average from a trace");
    std::string est_trace;
    std::string est_labels;
    std::string est_mode = "inverse";
    std::string est_geweke;
    est->add_option("--trace", est_trace, "trace file")->required();
    est->add_option("--labels", est_labels, "label file")->required();
    est->add_option("--mode", est_mode, "literal or inverse weighting")
        ->check(CLI::IsMember({"literal", "inverse"}))
        ->capture_default_str();
    est->add_option("--geweke", est_geweke, "also write the Geweke profile CSV here");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Find kappa values that hit target sampling rates");
    std::string cal_graph;
    std::string cal_out = "out";
    std::vector<double> cal_rates{0.01, 0.02, 0.05, 0.1, 0.2, 0.4};
    std::size_t cal_reps = 20;
    std::uint64_t cal_seed = 1;
    double cal_alpha = 0.15;
    double cal_delta = 1e-7;
    cal->add_option("--graph", cal_graph, "edge list")->required();
    cal->add_option("--rates", cal_rates, "target rates")->delimiter(',')->capture_default_str();
    cal->add_option("--replications", cal_reps, "seed nodes per kappa")->capture_default_str();
    cal->add_option("--alpha", cal_alpha, "jump probability")->capture_default_str();
    cal->add_option("--delta", cal_delta, "convergence tolerance")->capture_default_str();
    cal->add_option("--seed", cal_seed, "random seed")->capture_default_str();
    cal->add_option("-o,--output", cal_out, "output directory")->capture_default_str();

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run a replicated experiment from a config file");
    std::string exp_config;
    std::optional<std::string> exp_out;
    std::optional<std::uint64_t> exp_seed;
    std::optional<std::size_t> exp_reps;
    exp->add_option("config", exp_config, "key = value config file")->required();
    exp->add_option("-o,--output", exp_out, "output directory (overrides the config)");
    exp->add_option("--seed", exp_seed, "master seed (overrides the config)");
    exp->add_option("--replications", exp_reps, "replications (overrides the config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            GeneratorParams params;
            if (model == "der") {
                if (n) der.n = n;
                if (p0) der.p0 = *p0;
                params = der;
            } else if (model == "dws") {
                if (n) dws.n = n;
                if (p0) dws.p0 = *p0;
                params = dws;
            } else {
                if (n) dsf.n = n;
                params = dsf;
            }
            auto g = generate(params, gen_seed);
            if (gen_reverse) {
                g = g.transpose();
            }
            auto out = open_output(gen_out);
            write_edge_list(out, g);
            std::cout << describe(params) << (gen_reverse ? " reversed" : "") << ": "
                      << g.num_nodes() << " nodes, " << g.num_edges() << " links, reciprocity "
                      << format_number(g.num_edges() ? reciprocity(g) : 0.0, 6) << '\n';
        } else if (*sir) {
            const auto g = load_graph(sir_graph);
            sp.count = sir_count == "ever" ? InfectionCount::ever_infected
                                           : InfectionCount::currently_infected;
            const auto o = run_sir(g, sp, sir_seed);
            auto out = open_output(sir_out);
            write_labels(out, o.labels);
            std::cout << "true ratio " << format_number(o.true_ratio, 6) << " after "
                      << o.steps_run << " steps" << (o.extinct ? " (died out)" : "")
                      << (o.reached_target ? "" : " (target not reached)") << '\n';
            return o.reached_target ? 0 : 3;
        } else if (*sample) {
            const auto g = load_graph(smp_graph);
            Rng rng(derive_seed(smp_seed, 0));
            const NodeId s = start ? *start : static_cast<NodeId>(uniform_index(rng, g.num_nodes()));
            GraphAccess access(g);
            SampleTrace trace;
            if (sampler == "dnm") {
                dp.node_budget = budget;
                trace = dnm_sample(access, s, dp);
            } else if (sampler == "rw") {
                RwParams rp;
                rp.length = rw_length;
                trace = rw_sample(access, s, rp, derive_seed(smp_seed, 1));
            } else {
                if (budget) {
                    wp.budget = static_cast<double>(*budget);
                }
                trace = durw_sample(access, UniformNodeOracle(g.num_nodes()), wp,
                                    derive_seed(smp_seed, 1));
            }
            auto out = open_output(smp_out);
            write_trace(out, trace);
            std::cout << trace.size() << " sampled nodes, " << access.num_visited()
                      << " visited, " << trace.query_count << " link queries, rate "
                      << format_number(*trace.sampling_rate, 6)
                      << (trace.converged ? "" : " (not converged)") << '\n';
        } else if (*est) {
            auto tin = open_input(est_trace);
            const auto trace = read_trace(tin);
            auto lin = open_input(est_labels);
            const auto labels = read_labels(lin);
            const auto mode = weighting_mode_from_string(est_mode);
            const auto report = e_dir(trace, labels, mode, labels.average());
            write_report_header(std::cout);
            write_report_row(std::cout, report);
            if (!est_geweke.empty()) {
                auto out = open_output(est_geweke);
                const auto profile = geweke_profile(trace, labels, mode);
                write_geweke_csv(out, profile);
            }
        } else if (*cal) {
            const auto g = load_graph(cal_graph);
            const auto result = calibrate_kappa(g, cal_alpha, cal_delta, cal_rates, cal_reps, cal_seed);
            std::filesystem::create_directories(cal_out);
            const std::vector<std::string> labels{"graph"};
            const std::vector<CalibrationResult> results{result};
            const Metadata meta{{"graph", cal_graph},
                                {"alpha", format_number(cal_alpha)},
                                {"delta", format_number(cal_delta)},
                                {"replications", std::to_string(cal_reps)},
                                {"seed", std::to_string(cal_seed)}};
            {
                auto out = open_output((std::filesystem::path(cal_out) / "calibration.csv").string());
                write_calibration_csv(out, labels, results, meta);
            }
            {
                auto out = open_output((std::filesystem::path(cal_out) / "kappa_curve.csv").string());
                write_kappa_curve_csv(out, labels, results, meta);
            }
            {
                auto out = open_output((std::filesystem::path(cal_out) / "kappa_curve.svg").string());
                write_svg_chart(out, kappa_curve_chart(labels, results));
            }
            for (const auto& p : result.points) {
                std::cout << "rate " << format_number(p.target_rate) << " -> kappa "
                          << format_number(p.kappa, 6) << " (realized "
                          << format_number(p.realized_rate, 4) << ")"
                          << (p.flagged ? " UNREACHABLE" : "") << '\n';
            }
        } else if (*exp) {
            auto config = load_config(exp_config);
            if (exp_out) config.output = *exp_out;
            if (exp_seed) config.seed = *exp_seed;
            if (exp_reps) config.replications = *exp_reps;
            const auto result = run_experiment(config);
            for (const auto& path : emit_outputs(result, config.output)) {
                std::cout << path.string() << '\n';
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
