#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "netmeasure/access.hpp"
#include "netmeasure/graph.hpp"
#include "netmeasure/trace.hpp"

namespace netmeasure {

struct DnmParams {
    double alpha = 0.15;  ///< jump (teleport) probability, in (0, 1]
    double kappa = 0.1;   ///< expansion tolerance: frontier mass allowed per iteration
    double delta = 1e-7;  ///< stopping tolerance on the L1 change
    /// Hard cap on |S|; once reached expansion stops and the power iteration
    /// finishes on the fixed sample.
    std::optional<std::size_t> node_budget;
    std::size_t max_iterations = 100000;

    void validate() const;
};

/// Boundary-restricted personalized PageRank crawl from a single seed.
///
/// Each iteration pushes (1 - alpha) of every sampled node's mass along its
/// revealed out-links (frontier and sink nodes push nothing), re-injects the
/// lost mass at the seed, then moves the heaviest frontier nodes into the
/// sample until the mass left on the frontier is at most kappa. Iteration
/// stops once the L1 change drops below delta. Ties in the frontier are broken
/// by lowest node id.
class BoundaryPprSampler {
public:
    struct IterationReport {
        double frontier_mass_before = 0.0;  ///< after the push, before expansion
        double frontier_mass_after = 0.0;
        std::vector<NodeId> expanded;
        double change = 0.0;  ///< L1 distance to the previous vector
    };

    BoundaryPprSampler(GraphAccess& access, NodeId seed, DnmParams params);

    IterationReport iterate();
    [[nodiscard]] bool converged() const noexcept { return converged_; }
    [[nodiscard]] std::size_t iterations() const noexcept { return iterations_; }

    /// Runs iterations until convergence (or max_iterations) and returns the trace.
    SampleTrace run();

    /// Sample in insertion order (seed first).
    [[nodiscard]] std::vector<NodeId> sample() const;
    /// Observed but unexpanded nodes, ascending id.
    [[nodiscard]] std::vector<NodeId> frontier() const;
    /// Current approximate PageRank of a known node (0 for unknown nodes).
    [[nodiscard]] double value(NodeId x) const;
    [[nodiscard]] SampleTrace trace() const;

private:
    std::size_t slot_for(NodeId x);
    void expand(std::size_t slot);

    GraphAccess* access_;
    DnmParams params_;
    std::size_t seed_slot_ = 0;

    // Per known node (sample and frontier), indexed by slot.
    std::unordered_map<NodeId, std::size_t> slot_of_;
    std::vector<NodeId> node_of_;
    std::vector<bool> in_sample_;
    std::vector<std::size_t> added_at_;
    std::vector<std::vector<std::size_t>> links_;
    std::vector<double> current_;
    std::vector<double> next_;

    std::vector<std::size_t> sample_order_;
    std::size_t iterations_ = 0;
    bool converged_ = false;
    bool budget_reached_ = false;
};

/// Samples from `seed` with the boundary-restricted PageRank crawl; the trace
/// holds every sampled node with its converged value.
SampleTrace dnm_sample(GraphAccess& access, NodeId seed, const DnmParams& params);

/// Global power iteration p <- (1 - alpha) p D^-1 A + (1 - |p|_1) s until the
/// L1 change falls below tol. Dangling mass returns through the seed vector.
std::vector<double> exact_ppr(const DirectedGraph& g, std::span<const double> seed_vector,
                              double alpha, double tol, std::size_t max_iterations = 1000000);

/// Worst-case L1 error of the boundary-restricted approximation:
/// 2(1 - alpha)/alpha * kappa + (2 - alpha)/alpha^2 * delta.
double ppr_error_bound(double alpha, double kappa, double delta);

}  // namespace netmeasure
