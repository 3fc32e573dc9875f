#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rhoest/error.hpp"
#include "rhoest/json_io.hpp"

using namespace rhoest;

namespace {

std::string data(const char* name) { return std::string(RHOEST_TEST_DATA) + "/" + name; }

bool same_bits(const PiecewiseDensity& a, const PiecewiseDensity& b) {
  return density_to_json(a).dump() == density_to_json(b).dump() && a.partition() == b.partition();
}

} // namespace

TEST_SUITE("json") {

TEST_CASE("density round trip through text") {
  const double r3 = std::sqrt(3.0);
  std::vector<PiecewiseDensity> ds{
      uniform_density(0, 1), laplace_density(0.3, 1.7),
      PiecewiseDensity(Partition({0.0, 1.0}), {Constant{0.0}, SqrtAffine{r3, -r3}, Constant{0.0}})};
  std::mt19937_64 rng(61);
  for (int i = 0; i < 20; ++i) ds.push_back(oracle::grid_histogram(rng));
  for (const auto& d : ds) {
    auto back = density_from_json(Json::parse(density_to_json(d).dump()));
    CHECK(same_bits(d, back));
    for (double x : {-0.5, 0.1, 0.77, 1.5, 3.9}) CHECK(back(x) == d(x));
  }
}

TEST_CASE("density json layout") {
  auto j = density_to_json(uniform_density(0, 2));
  CHECK(j["knots"].size() == 2);
  CHECK(j["segments"].size() == 3);
  CHECK(j["segments"][1]["form"] == "constant");
}

TEST_CASE("malformed densities name the field") {
  CHECK_THROWS_WITH_AS(read_density_file(data("bad_segments.json")),
                       doctest::Contains("segments"), FormatError);
  auto j = density_to_json(uniform_density(0, 1));
  j["segments"][1]["form"] = "cubic";
  CHECK_THROWS_WITH_AS(density_from_json(j), doctest::Contains("segments[1].form"), FormatError);
  j = density_to_json(uniform_density(0, 1));
  j["segments"][1]["params"] = {1.0, 2.0};
  CHECK_THROWS_WITH_AS(density_from_json(j), doctest::Contains("segments[1].params"), FormatError);
  j = density_to_json(uniform_density(0, 1));
  j.erase("knots");
  CHECK_THROWS_WITH_AS(density_from_json(j), doctest::Contains("knots"), FormatError);
}

TEST_CASE("mixtures are not serializable") {
  auto m = mixture_half(uniform_density(0, 1), laplace_density());
  CHECK_THROWS_AS(density_to_json(m), InvalidArgument);
}

TEST_CASE("model round trip") {
  for (auto m : {ShapeModel::histogram(3), ShapeModel::piecewise_monotone(2),
                 ShapeModel::piecewise_convex_concave(5), ShapeModel::log_concave()})
    CHECK(model_from_json(Json::parse(model_to_json(m).dump())) == m);
  CHECK(model_from_json(read_json_file(data("monotone.json"))) == ShapeModel::piecewise_monotone(2));
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"kind":"histogram","D":0})")), FormatError);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"kind":"spline"})")), FormatError);
}

TEST_CASE("candidate sets round trip") {
  Sample s = sample(uniform_density(0, 1), 50, 2);
  auto set = build_candidates(s, ShapeModel::histogram(2), 10, 1);
  auto back = candidates_from_json(Json::parse(candidates_to_json(set).dump()));
  CHECK(back.model == set.model);
  REQUIRE(back.size() == set.size());
  for (std::size_t i = 0; i < set.size(); ++i) CHECK(same_bits(set.densities[i], back.densities[i]));
  CHECK(back.provenance == set.provenance);
}

TEST_CASE("spec round trip and strictness") {
  ExperimentSpec s;
  s.name = "x";
  s.kind = ExperimentKind::superminimax;
  s.n_grid = {10, 20};
  s.seed = 12345678901234ULL;
  s.model = ShapeModel::histogram(2);
  auto back = spec_from_json(Json::parse(spec_to_json(s).dump()));
  CHECK(spec_to_json(back) == spec_to_json(s));
  CHECK(back.seed == s.seed);
  auto j = spec_to_json(s);
  j["replicats"] = 3;
  CHECK_THROWS_WITH_AS(spec_from_json(j), doctest::Contains("replicats"), FormatError);
  CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"name":"a"})")), FormatError);
  auto minimal = spec_from_json(Json::parse(R"({"kind":"vc_audit"})"));
  CHECK(minimal.kind == ExperimentKind::vc_audit);
  CHECK(minimal.replicates == 200);
}

TEST_CASE("plan round trip") {
  auto p = SelectionPlan::laplace_plan();
  auto back = plan_from_json(Json::parse(plan_to_json(p).dump()));
  REQUIRE(back.members.size() == p.members.size());
  for (std::size_t i = 0; i < p.members.size(); ++i) {
    CHECK(back.members[i].model == p.members[i].model);
    CHECK(back.members[i].weight == p.members[i].weight);
  }
}

TEST_CASE("diagnostics export") {
  Sample s({0.1, 0.3, 0.5, 0.7});
  std::vector<PiecewiseDensity> c{uniform_density(0, 1), uniform_density(0, 2)};
  auto r = rho_estimate(s, c);
  auto j = diagnostics_to_json(r.diagnostics, 35.7);
  CHECK(j["argmin"] == 0);
  CHECK(j["upsilon"].size() == 2);
  auto csv = pairwise_csv(r.diagnostics);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 2);
}

TEST_CASE("sample files") {
  auto xs = read_sample_file(data("triangular_200.txt"));
  CHECK(xs.size() == 200);
  CHECK_THROWS_AS(read_sample_file(data("u01.json")), FormatError);
  CHECK_THROWS_AS(read_json_file(data("missing.json")), Error);
  CHECK(fixed12(1.0 - 1.0 / std::sqrt(2.0)) == "0.292893218813");
}

} // TEST_SUITE
