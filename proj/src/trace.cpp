#include "netmeasure/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "netmeasure/errors.hpp"
#include "netmeasure/text.hpp"

namespace netmeasure {

void write_trace(std::ostream& out, const SampleTrace& trace) {
    for (const TraceEntry& e : trace.entries) {
        out << e.node << ' ' << format_number(e.weight, 17) << ' ' << e.step << '\n';
    }
}

SampleTrace read_trace(std::istream& in) {
    SampleTrace trace;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::istringstream fields(line);
        long long node = -1;
        TraceEntry entry;
        if (!(fields >> node >> entry.weight >> entry.step) || node < 0) {
            throw ParseError(line_no, "expected 'node weight step'");
        }
        entry.node = static_cast<NodeId>(node);
        trace.entries.push_back(entry);
    }
    return trace;
}

}  // namespace netmeasure
