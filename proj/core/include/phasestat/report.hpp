#pragma once

// JSON and plain-text rendering of analysis and cluster results.
//
// JSON conventions: complex values are [re, im] pairs, absent optionals are
// omitted, and non-finite numbers are written as null.

#include <string>
#include <string_view>

#include "phasestat/cluster.hpp"
#include "phasestat/flowchart.hpp"

namespace phasestat {

std::string to_json(const AnalysisReport& report);
/// Inverse of to_json. Throws ParseError.
AnalysisReport report_from_json(std::string_view text);
std::string to_text(const AnalysisReport& report);

std::string to_json(const ClusterResult& result);
std::string to_text(const ClusterResult& result);

}  // namespace phasestat
