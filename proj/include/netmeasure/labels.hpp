#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "netmeasure/graph.hpp"

namespace netmeasure {

/// Real-valued target function over every node of a graph.
class LabelFunction {
public:
    LabelFunction() = default;
    explicit LabelFunction(std::vector<double> values) : values_(std::move(values)) {}

    static LabelFunction constant(std::size_t n, double c) {
        return LabelFunction(std::vector<double>(n, c));
    }

    [[nodiscard]] double operator()(NodeId x) const { return values_.at(x); }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// Exact average over all nodes (the ground truth an estimator targets).
    [[nodiscard]] double average() const;

private:
    std::vector<double> values_;
};

/// Indicator of d_out(x) == degree.
LabelFunction outdegree_indicator(const DirectedGraph& g, std::size_t degree);

/// "node label" lines, one per node in id order.
void write_labels(std::ostream& out, const LabelFunction& f);
/// Every node in [0, n) must appear exactly once; n is inferred from the max id.
LabelFunction read_labels(std::istream& in);

}  // namespace netmeasure
