#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rhoest/approx.hpp"
#include "rhoest/bench.hpp"
#include "rhoest/density.hpp"
#include "rhoest/models.hpp"
#include "rhoest/rho.hpp"
#include "rhoest/select.hpp"

namespace rhoest {

using Json = nlohmann::json;

// {"knots": [...], "segments": [{"form": "constant", "params": [c]}, ...]}
// with one segment per interval, i.e. knots + 1 segments. Forms are
// "constant" [c], "sqrt_affine" [p, q] and "exp_affine" [alpha, beta].
Json density_to_json(const PiecewiseDensity& d);
PiecewiseDensity density_from_json(const Json& j);

Json model_to_json(const ShapeModel& m);
ShapeModel model_from_json(const Json& j);

Json candidates_to_json(const CandidateSet& set);
CandidateSet candidates_from_json(const Json& j);

Json diagnostics_to_json(const RhoDiagnostics& d, double kappa);
// Row-major matrix T(X, S[i], S[j]) as CSV, empty when it was not kept.
std::string pairwise_csv(const RhoDiagnostics& d);

Json functional_to_json(const FunctionalReport& r);
Json selection_report_to_json(const SelectionReport& r);

// {"members": [{"model": {...}, "weight": 1.0}, ...]}
Json plan_to_json(const SelectionPlan& p);
SelectionPlan plan_from_json(const Json& j);

Json spec_to_json(const ExperimentSpec& s);
ExperimentSpec spec_from_json(const Json& j);
Json result_to_json(const ExperimentResult& r);

// File helpers; failures raise FormatError or Error naming the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Json read_json_file(const std::string& path);
PiecewiseDensity read_density_file(const std::string& path);
// One decimal number per line; blank lines are skipped.
std::vector<double> read_sample_file(const std::string& path);

// Fixed 12-decimal rendering used for every printed number.
std::string fixed12(double v);

} // namespace rhoest
