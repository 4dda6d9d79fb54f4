#include "netmeasure/labels.hpp"

#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "netmeasure/errors.hpp"
#include "netmeasure/text.hpp"

namespace netmeasure {

double LabelFunction::average() const {
    if (values_.empty()) {
        throw UndefinedValueError("average of an empty label function");
    }
    return std::accumulate(values_.begin(), values_.end(), 0.0) /
           static_cast<double>(values_.size());
}

LabelFunction outdegree_indicator(const DirectedGraph& g, std::size_t degree) {
    std::vector<double> values(g.num_nodes());
    for (NodeId x = 0; x < g.num_nodes(); ++x) {
        values[x] = g.out_degree(x) == degree ? 1.0 : 0.0;
    }
    return LabelFunction(std::move(values));
}

void write_labels(std::ostream& out, const LabelFunction& f) {
    for (std::size_t x = 0; x < f.size(); ++x) {
        out << x << ' ' << format_number(f.values()[x]) << '\n';
    }
}

LabelFunction read_labels(std::istream& in) {
    std::vector<double> values;
    std::vector<bool> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::istringstream fields(line);
        long long node = -1;
        double label = 0.0;
        if (!(fields >> node >> label) || node < 0) {
            throw ParseError(line_no, "expected 'node label'");
        }
        const auto idx = static_cast<std::size_t>(node);
        if (idx >= values.size()) {
            values.resize(idx + 1, 0.0);
            seen.resize(idx + 1, false);
        }
        if (seen[idx]) {
            throw ParseError(line_no, "duplicate label for node " + std::to_string(idx));
        }
        seen[idx] = true;
        values[idx] = label;
    }
    for (std::size_t x = 0; x < seen.size(); ++x) {
        if (!seen[x]) {
            throw ParseError(line_no, "missing label for node " + std::to_string(x));
        }
    }
    return LabelFunction(std::move(values));
}

}  // namespace netmeasure
