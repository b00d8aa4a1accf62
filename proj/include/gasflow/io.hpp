#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gasflow/eos.hpp"
#include "gasflow/network.hpp"
#include "gasflow/nondim.hpp"
#include "gasflow/solver.hpp"

namespace gasflow {

/// Contents of a native network file.
struct NetworkDocument {
    Network network;
    EosParameters eos;
    NominalOverrides nominal;
    std::vector<Diagnostic> diagnostics;
};

/// Parses the native format. Syntax problems and dangling references raise
/// ParseError with line context. Validation errors raise ValidationFailed unless `lenient`.
NetworkDocument parse_network(std::istream& in, const std::string& source = "<input>", bool lenient = false);
NetworkDocument read_network(const std::string& path, bool lenient = false);

void write_network(std::ostream& out, const NetworkDocument& doc);
void write_network(const std::string& path, const NetworkDocument& doc);

enum class OutputFormat { Csv, Json };
OutputFormat parse_output_format(std::string_view text);

/// Flat key/value view of a solve report, in a fixed key order.
std::vector<std::pair<std::string, std::string>> report_fields(const SolveReport& report);

void write_solution(std::ostream& out, const NetworkSolution& solution, const SolveReport& report,
                    OutputFormat format = OutputFormat::Csv);

struct SolutionDocument {
    NetworkSolution solution;
    std::map<std::string, std::string> report;
};

/// Reads either format back (JSON is detected by a leading '{').
SolutionDocument parse_solution(std::istream& in, const std::string& source = "<input>");
SolutionDocument read_solution(const std::string& path);

/// Shortest decimal text (at most 17 significant digits) that parses back to the same double.
std::string format_double(double value);

}  // namespace gasflow
