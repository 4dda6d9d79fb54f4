#include "netmeasure/dnm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "netmeasure/errors.hpp"

namespace netmeasure {

void DnmParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("alpha must lie in (0, 1]");
    }
    if (!(kappa > 0.0)) {
        throw ParameterError("kappa must be positive");
    }
    if (!(delta > 0.0)) {
        throw ParameterError("delta must be positive");
    }
    if (node_budget && *node_budget == 0) {
        throw ParameterError("node budget must be at least 1");
    }
}

BoundaryPprSampler::BoundaryPprSampler(GraphAccess& access, NodeId seed, DnmParams params)
    : access_(&access), params_(params) {
    params_.validate();
    if (!access.contains(seed)) {
        throw ParameterError("seed node " + std::to_string(seed) + " is not in the graph");
    }
    seed_slot_ = slot_for(seed);
    expand(seed_slot_);
    current_[seed_slot_] = 1.0;
    if (params_.node_budget && sample_order_.size() >= *params_.node_budget) {
        budget_reached_ = true;
    }
}

std::size_t BoundaryPprSampler::slot_for(NodeId x) {
    const auto [it, inserted] = slot_of_.try_emplace(x, node_of_.size());
    if (inserted) {
        node_of_.push_back(x);
        in_sample_.push_back(false);
        added_at_.push_back(0);
        links_.emplace_back();
        current_.push_back(0.0);
        next_.push_back(0.0);
    }
    return it->second;
}

void BoundaryPprSampler::expand(std::size_t slot) {
    in_sample_[slot] = true;
    added_at_[slot] = iterations_;
    sample_order_.push_back(slot);
    const NodeId x = node_of_[slot];
    access_->visit(x);
    std::vector<std::size_t> targets;
    for (NodeId y : access_->out_links(x)) {
        targets.push_back(slot_for(y));
    }
    links_[slot] = std::move(targets);
}

BoundaryPprSampler::IterationReport BoundaryPprSampler::iterate() {
    IterationReport report;
    const double keep = 1.0 - params_.alpha;

    std::fill(next_.begin(), next_.end(), 0.0);
    for (std::size_t s : sample_order_) {
        const auto& out = links_[s];
        if (out.empty() || current_[s] == 0.0) {
            continue;
        }
        const double share = keep * current_[s] / static_cast<double>(out.size());
        for (std::size_t t : out) {
            next_[t] += share;
        }
    }
    const double pushed = std::accumulate(next_.begin(), next_.end(), 0.0);
    next_[seed_slot_] += 1.0 - pushed;

    double frontier_mass = 0.0;
    for (std::size_t s = 0; s < next_.size(); ++s) {
        if (!in_sample_[s]) {
            frontier_mass += next_[s];
        }
    }
    report.frontier_mass_before = frontier_mass;

    if (frontier_mass > params_.kappa && !budget_reached_) {
        // Heaviest first, lowest id on ties.
        auto lighter = [this](std::size_t a, std::size_t b) {
            if (next_[a] != next_[b]) {
                return next_[a] < next_[b];
            }
            return node_of_[a] > node_of_[b];
        };
        std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(lighter)> heap(lighter);
        for (std::size_t s = 0; s < next_.size(); ++s) {
            if (!in_sample_[s] && next_[s] > 0.0) {
                heap.push(s);
            }
        }
        // Nodes discovered below carry no mass this round, so the heap stays complete.
        while (frontier_mass > params_.kappa && !heap.empty()) {
            if (params_.node_budget && sample_order_.size() >= *params_.node_budget) {
                budget_reached_ = true;
                break;
            }
            const std::size_t s = heap.top();
            heap.pop();
            expand(s);
            frontier_mass -= next_[s];
            report.expanded.push_back(node_of_[s]);
        }
        if (params_.node_budget && sample_order_.size() >= *params_.node_budget) {
            budget_reached_ = true;
        }
    }
    report.frontier_mass_after = std::max(frontier_mass, 0.0);

    double change = 0.0;
    for (std::size_t s = 0; s < next_.size(); ++s) {
        change += std::abs(next_[s] - current_[s]);
    }
    report.change = change;
    current_.swap(next_);
    ++iterations_;
    if (change < params_.delta) {
        converged_ = true;
    }
    return report;
}

SampleTrace BoundaryPprSampler::run() {
    while (!converged_ && iterations_ < params_.max_iterations) {
        iterate();
    }
    return trace();
}

std::vector<NodeId> BoundaryPprSampler::sample() const {
    std::vector<NodeId> out;
    out.reserve(sample_order_.size());
    for (std::size_t s : sample_order_) {
        out.push_back(node_of_[s]);
    }
    return out;
}

std::vector<NodeId> BoundaryPprSampler::frontier() const {
    std::vector<NodeId> out;
    for (std::size_t s = 0; s < node_of_.size(); ++s) {
        if (!in_sample_[s]) {
            out.push_back(node_of_[s]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double BoundaryPprSampler::value(NodeId x) const {
    const auto it = slot_of_.find(x);
    return it == slot_of_.end() ? 0.0 : current_[it->second];
}

SampleTrace BoundaryPprSampler::trace() const {
    SampleTrace t;
    t.entries.reserve(sample_order_.size());
    for (std::size_t s : sample_order_) {
        t.entries.push_back({node_of_[s], current_[s], added_at_[s]});
    }
    t.query_count = access_->query_count();
    t.sampling_rate = static_cast<double>(sample_order_.size()) /
                      static_cast<double>(access_->universe_size());
    t.iterations = iterations_;
    t.converged = converged_;
    t.budget_reached = budget_reached_;
    t.degenerate = sample_order_.size() == 1;
    return t;
}

SampleTrace dnm_sample(GraphAccess& access, NodeId seed, const DnmParams& params) {
    BoundaryPprSampler sampler(access, seed, params);
    return sampler.run();
}

std::vector<double> exact_ppr(const DirectedGraph& g, std::span<const double> seed_vector,
                              double alpha, double tol, std::size_t max_iterations) {
    const std::size_t n = g.num_nodes();
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("alpha must lie in (0, 1]");
    }
    if (!(tol > 0.0)) {
        throw ParameterError("tolerance must be positive");
    }
    if (seed_vector.size() != n) {
        throw ParameterError("seed vector length differs from node count");
    }
    double seed_total = 0.0;
    for (double v : seed_vector) {
        if (v < 0.0) {
            throw ParameterError("seed vector has a negative entry");
        }
        seed_total += v;
    }
    if (std::abs(seed_total - 1.0) > 1e-9) {
        throw ParameterError("seed vector must sum to 1");
    }

    std::vector<double> p(seed_vector.begin(), seed_vector.end());
    std::vector<double> next(n);
    const double keep = 1.0 - alpha;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (NodeId x = 0; x < n; ++x) {
            const auto out = g.out_neighbors(x);
            if (out.empty() || p[x] == 0.0) {
                continue;
            }
            const double share = keep * p[x] / static_cast<double>(out.size());
            for (NodeId y : out) {
                next[y] += share;
            }
        }
        const double lost = 1.0 - std::accumulate(next.begin(), next.end(), 0.0);
        double change = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            next[x] += lost * seed_vector[x];
            change += std::abs(next[x] - p[x]);
        }
        p.swap(next);
        if (change < tol) {
            break;
        }
    }
    return p;
}

double ppr_error_bound(double alpha, double kappa, double delta) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("alpha must lie in (0, 1]");
    }
    if (kappa < 0.0 || delta < 0.0) {
        throw ParameterError("tolerances must be non-negative");
    }
    return 2.0 * (1.0 - alpha) / alpha * kappa + (2.0 - alpha) / (alpha * alpha) * delta;
}

}  // namespace netmeasure
