#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppp/bounds.hpp"
#include "ppp/coupling.hpp"
#include "ppp/distributions.hpp"
#include "ppp/idf.hpp"
#include "ppp/models.hpp"

namespace ppp {

using Json = nlohmann::ordered_json;

// File could not be opened, read or written.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// {"kind": "uniform" | "beta22"} or {"kind": "p2alpha", "alpha": a} or
// {"kind": "mixture", "atoms": [{"location", "mass"}], "uniform_pieces": [{"lo", "hi", "mass"}]}.
// Parsing throws std::invalid_argument on malformed input.
Json to_json(const SubUniformDist& d);
SubUniformDist dist_from_json(const Json& j);

// {"kind": "analytic", "family": "uniform" | "beta22"} or
// {"kind": "piecewise", "breakpoints", "cdf", "cdf_left"}.
Json to_json(const IntegratedDF& idf);
IntegratedDF idf_from_json(const Json& j);

// Bounds that do not apply are null, with the reason in "<name>_reason".
Json to_json(const FisherReport& r);

Json to_json(const RunSummary& s);

// Target, coupling tables, G and seed; model_from_json rebuilds a model
// that reproduces the same draws.
Json to_json(const SyntheticPPPModel& m);
SyntheticPPPModel model_from_json(const Json& j);

// One value per line; blank lines and lines starting with '#' are skipped.
// IoError when unreadable, std::invalid_argument on a non-numeric line.
std::vector<double> read_values_csv(const std::string& path);
void write_values_csv(std::ostream& os, std::span<const double> values);
void write_values_csv(const std::string& path, std::span<const double> values);

// One row per theta, comma-separated port probabilities.
std::vector<std::vector<double>> read_pmf_csv(const std::string& path);

Json read_json_file(const std::string& path);

// Shortest text that reads back to the same double.
std::string format_double(double v);

} // namespace ppp
