#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rhoest/approx.hpp"
#include "rhoest/density.hpp"
#include "rhoest/models.hpp"
#include "rhoest/vc.hpp"

namespace rhoest {

enum class ExperimentKind { contamination, rate, superminimax, approx_audit, vc_audit };

std::string kind_name(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

struct ExperimentSpec {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::rate;
  std::string truth = "uniform";
  std::string comparison_truth = "triangular"; // superminimax only
  ShapeModel model = ShapeModel::piecewise_monotone(2);
  std::vector<std::size_t> n_grid{128, 512, 2048};
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  std::size_t budget = 64;
  double kappa = 35.7;
  std::vector<int> d_grid{1, 2, 4, 8, 16}; // approx_audit
  int max_k = 6;                           // vc_audit
  unsigned threads = 1;
  bool record_timing = false; // wall_ms stays 0 otherwise, keeping CSVs byte-stable
  std::string output_dir;     // nothing is written when empty

  void validate() const;
};

// One CSV row. For the audit kinds `n` holds D (approx_audit) or k
// (vc_audit), `h2` the measured h^2 or the largest level-set count, and
// `estimator_pieces` the approximant pieces or the level-set bound.
struct ExperimentRow {
  std::string series;
  std::size_t n = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  double h2 = 0.0;
  std::size_t estimator_pieces = 0;
  double wall_ms = 0.0;
  double sample_max = 0.0; // contamination only
  double bound = 0.0;      // audits only
  bool violation = false;  // audits only
};

struct SeriesSummary {
  std::string series;
  std::size_t n = 0;
  std::size_t count = 0;
  double mean = 0.0, median = 0.0, q10 = 0.0, q25 = 0.0, q75 = 0.0, q90 = 0.0;
};

struct SlopeFit {
  std::string series;
  double slope = 0.0;
  double std_error = 0.0; // NaN with fewer than three grid points
  std::size_t points = 0;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ExperimentRow> rows;
  std::vector<SeriesSummary> summaries;
  std::vector<SlopeFit> slopes;
  std::map<std::string, double> metrics;
  std::uint64_t config_hash = 0;
};

// Truth densities addressable by name: uniform, two_step, triangular,
// parabola, contaminated, laplace.
struct Truth {
  std::string name;
  std::optional<PiecewiseDensity> piecewise;
  std::optional<FunctionDensity> function;

  Sample draw(std::size_t n, std::uint64_t seed) const;
  double h2(const PiecewiseDensity& estimate) const;
};
Truth named_truth(const std::string& name);

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n, std::size_t replicate);

// Rows of a single replicate, identical to the ones run_experiment produces.
std::vector<ExperimentRow> run_replicate(const ExperimentSpec& spec, std::size_t n,
                                         std::size_t replicate);
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Linear-interpolation quantile of the values (q in [0, 1]).
double quantile_of(std::vector<double> v, double q);
std::vector<SeriesSummary> summarize(std::span<const ExperimentRow> rows);
// Least squares of log(median) on log(n) with the slope's standard error.
SlopeFit fit_loglog_slope(std::span<const double> n, std::span<const double> median);

std::string rows_csv(const ExperimentResult& r);
// Writes <dir>/<name>.csv and <dir>/<name>.summary.json.
void write_outputs(const ExperimentResult& r, const std::string& dir);

// Random instances shared by the audits and the tests.
struct MonotoneInstance {
  std::vector<MonotonePiece> sqrt_pieces; // normalized sqrt(t)
  FunctionDensity density;
};
MonotoneInstance random_monotone_instance(std::mt19937_64& rng);

struct CurvedInstance {
  std::vector<CurvedPiece> sqrt_pieces; // normalized sqrt(t)
  FunctionDensity density;
};
CurvedInstance random_curved_instance(std::mt19937_64& rng);

PiecewiseMonotoneSpec random_monotone_spec(std::mt19937_64& rng, std::size_t k);

} // namespace rhoest
