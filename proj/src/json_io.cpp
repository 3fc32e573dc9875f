#include "rhoest/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rhoest/error.hpp"

namespace rhoest {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw FormatError("field '" + field + "': " + what);
}

const Json& member(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) bad(where.empty() ? "<root>" : where, "expected an object");
  auto it = j.find(key);
  std::string field = where.empty() ? key : where + "." + key;
  if (it == j.end()) bad(field, "missing");
  return *it;
}

double number(const Json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) bad(field, "expected a finite number");
  return v;
}

std::uint64_t unsigned_int(const Json& j, const std::string& field) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    bad(field, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

int positive_int(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "expected an integer");
  auto v = j.get<std::int64_t>();
  if (v < 1 || v > 1000000) bad(field, "expected a positive integer");
  return static_cast<int>(v);
}

std::vector<double> number_array(const Json& j, const std::string& field) {
  if (!j.is_array()) bad(field, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

} // namespace

std::string fixed12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Densities
// ---------------------------------------------------------------------------

Json density_to_json(const PiecewiseDensity& d) {
  Json j;
  j["knots"] = std::vector<double>(d.partition().endpoints().begin(),
                                   d.partition().endpoints().end());
  Json segs = Json::array();
  for (const Form& f : d.forms()) {
    Json s;
    if (const auto* c = std::get_if<Constant>(&f)) {
      s["form"] = "constant";
      s["params"] = {c->c};
    } else if (const auto* a = std::get_if<SqrtAffine>(&f)) {
      s["form"] = "sqrt_affine";
      s["params"] = {a->p, a->q};
    } else if (const auto* e = std::get_if<ExpAffine>(&f)) {
      s["form"] = "exp_affine";
      s["params"] = {e->alpha, e->beta};
    } else {
      throw InvalidArgument("density_to_json: mixture segments have no serialized form");
    }
    segs.push_back(std::move(s));
  }
  j["segments"] = std::move(segs);
  return j;
}

PiecewiseDensity density_from_json(const Json& j) {
  std::vector<double> knots = number_array(member(j, "knots", ""), "knots");
  const Json& segs = member(j, "segments", "");
  if (!segs.is_array()) bad("segments", "expected an array");
  if (segs.size() != knots.size() + 1)
    bad("segments", "expected " + std::to_string(knots.size() + 1) + " entries (knots + 1), got " +
                        std::to_string(segs.size()));
  std::vector<Form> forms;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    std::string where = "segments[" + std::to_string(i) + "]";
    const Json& kind = member(segs[i], "form", where);
    if (!kind.is_string()) bad(where + ".form", "expected a string");
    std::vector<double> p = number_array(member(segs[i], "params", where), where + ".params");
    std::string name = kind.get<std::string>();
    std::size_t want = name == "constant" ? 1 : 2;
    if (name != "constant" && name != "sqrt_affine" && name != "exp_affine")
      bad(where + ".form", "unknown form '" + name + "'");
    if (p.size() != want)
      bad(where + ".params", "expected " + std::to_string(want) + " numbers");
    if (name == "constant") forms.push_back(Constant{p[0]});
    else if (name == "sqrt_affine") forms.push_back(SqrtAffine{p[0], p[1]});
    else forms.push_back(ExpAffine{p[0], p[1]});
  }
  try {
    return PiecewiseDensity(Partition(std::move(knots)), std::move(forms));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("field 'segments': ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Models and candidate sets
// ---------------------------------------------------------------------------

Json model_to_json(const ShapeModel& m) {
  Json j;
  switch (m.kind) {
  case ModelKind::histogram: j = {{"kind", "histogram"}, {"D", m.param}}; break;
  case ModelKind::piecewise_monotone: j = {{"kind", "piecewise_monotone"}, {"k", m.param}}; break;
  case ModelKind::piecewise_convex_concave:
    j = {{"kind", "piecewise_convex_concave"}, {"k", m.param}};
    break;
  case ModelKind::log_concave: j = {{"kind", "log_concave"}}; break;
  }
  return j;
}

ShapeModel model_from_json(const Json& j) {
  const Json& kind = member(j, "kind", "model");
  if (!kind.is_string()) bad("model.kind", "expected a string");
  std::string k = kind.get<std::string>();
  try {
    if (k == "histogram") return ShapeModel::histogram(positive_int(member(j, "D", "model"), "model.D"));
    if (k == "piecewise_monotone")
      return ShapeModel::piecewise_monotone(positive_int(member(j, "k", "model"), "model.k"));
    if (k == "piecewise_convex_concave")
      return ShapeModel::piecewise_convex_concave(positive_int(member(j, "k", "model"), "model.k"));
    if (k == "log_concave") return ShapeModel::log_concave();
  } catch (const InvalidArgument& e) {
    bad("model", e.what());
  }
  bad("model.kind", "unknown model kind '" + k + "'");
}

Json candidates_to_json(const CandidateSet& set) {
  Json j;
  j["model"] = model_to_json(set.model);
  Json list = Json::array();
  for (std::size_t i = 0; i < set.size(); ++i)
    list.push_back({{"provenance", set.provenance[i]}, {"density", density_to_json(set.densities[i])}});
  j["candidates"] = std::move(list);
  return j;
}

CandidateSet candidates_from_json(const Json& j) {
  CandidateSet set;
  set.model = model_from_json(member(j, "model", ""));
  const Json& list = member(j, "candidates", "");
  if (!list.is_array()) bad("candidates", "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::string where = "candidates[" + std::to_string(i) + "]";
    const Json& tag = member(list[i], "provenance", where);
    if (!tag.is_string()) bad(where + ".provenance", "expected a string");
    set.provenance.push_back(tag.get<std::string>());
    try {
      set.densities.push_back(density_from_json(member(list[i], "density", where)));
    } catch (const FormatError& e) {
      throw FormatError(where + ".density: " + e.what());
    }
  }
  return set;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

Json diagnostics_to_json(const RhoDiagnostics& d, double kappa) {
  Json j;
  j["candidate_count"] = d.candidate_count;
  j["argmin"] = d.argmin;
  j["kappa"] = kappa;
  j["upsilon"] = d.upsilon;
  j["near_minimizers"] = d.near_minimizers;
  j["pairwise_kept"] = !d.pairwise.empty();
  return j;
}

std::string pairwise_csv(const RhoDiagnostics& d) {
  if (d.pairwise.empty()) return {};
  const std::size_t m = d.candidate_count;
  std::string out;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      if (k) out += ',';
      out += fixed12(d.pairwise[i * m + k]);
    }
    out += '\n';
  }
  return out;
}

Json functional_to_json(const FunctionalReport& r) {
  Json j;
  j["order"] = r.order;
  j["lengths"] = r.lengths;
  j["variations"] = r.variations;
  j["terms"] = r.terms;
  j["value"] = r.value;
  return j;
}

Json selection_report_to_json(const SelectionReport& r) {
  Json j;
  Json fits = Json::array();
  for (const auto& f : r.fits)
    fits.push_back({{"model", f.model},
                    {"candidates", f.candidates},
                    {"pieces", f.pieces},
                    {"fit_upsilon", f.fit_upsilon}});
  j["fits"] = std::move(fits);
  j["holdout_upsilon"] = r.holdout_upsilon;
  j["selected"] = r.selected;
  j["method"] = r.method;
  return j;
}

Json plan_to_json(const SelectionPlan& p) {
  Json members = Json::array();
  for (const auto& m : p.members)
    members.push_back({{"model", model_to_json(m.model)}, {"weight", m.weight}});
  return {{"members", members}};
}

SelectionPlan plan_from_json(const Json& j) {
  const Json& list = member(j, "members", "");
  if (!list.is_array()) bad("members", "expected an array");
  SelectionPlan p;
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::string where = "members[" + std::to_string(i) + "]";
    FamilyMember m;
    m.model = model_from_json(member(list[i], "model", where));
    m.weight = number(member(list[i], "weight", where), where + ".weight");
    p.members.push_back(m);
  }
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    bad("members", e.what());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

Json spec_to_json(const ExperimentSpec& s) {
  Json j;
  j["name"] = s.name;
  j["kind"] = kind_name(s.kind);
  j["truth"] = s.truth;
  j["comparison_truth"] = s.comparison_truth;
  j["model"] = model_to_json(s.model);
  j["n_grid"] = s.n_grid;
  j["replicates"] = s.replicates;
  j["seed"] = s.seed;
  j["budget"] = s.budget;
  j["kappa"] = s.kappa;
  j["d_grid"] = s.d_grid;
  j["max_k"] = s.max_k;
  j["threads"] = s.threads;
  j["record_timing"] = s.record_timing;
  j["output_dir"] = s.output_dir;
  return j;
}

ExperimentSpec spec_from_json(const Json& j) {
  if (!j.is_object()) bad("<root>", "expected an object");
  static const char* known[] = {"name",   "kind",   "truth",  "comparison_truth", "model",
                                "n_grid", "replicates", "seed", "budget", "kappa", "d_grid",
                                "max_k",  "threads", "record_timing", "output_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) bad(it.key(), "unknown field");
  }
  ExperimentSpec s;
  auto str = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) bad(key, "expected a string");
    dst = j[key].get<std::string>();
  };
  str("name", s.name);
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) bad("kind", "expected a string");
    try {
      s.kind = parse_kind(j["kind"].get<std::string>());
    } catch (const InvalidArgument& e) {
      bad("kind", e.what());
    }
  } else {
    bad("kind", "missing");
  }
  str("truth", s.truth);
  str("comparison_truth", s.comparison_truth);
  str("output_dir", s.output_dir);
  if (j.contains("model")) s.model = model_from_json(j["model"]);
  if (j.contains("n_grid")) {
    if (!j["n_grid"].is_array()) bad("n_grid", "expected an array");
    s.n_grid.clear();
    for (std::size_t i = 0; i < j["n_grid"].size(); ++i)
      s.n_grid.push_back(unsigned_int(j["n_grid"][i], "n_grid[" + std::to_string(i) + "]"));
  }
  if (j.contains("d_grid")) {
    if (!j["d_grid"].is_array()) bad("d_grid", "expected an array");
    s.d_grid.clear();
    for (std::size_t i = 0; i < j["d_grid"].size(); ++i)
      s.d_grid.push_back(positive_int(j["d_grid"][i], "d_grid[" + std::to_string(i) + "]"));
  }
  if (j.contains("replicates")) s.replicates = unsigned_int(j["replicates"], "replicates");
  if (j.contains("seed")) s.seed = unsigned_int(j["seed"], "seed");
  if (j.contains("budget")) s.budget = unsigned_int(j["budget"], "budget");
  if (j.contains("kappa")) s.kappa = number(j["kappa"], "kappa");
  if (j.contains("max_k")) s.max_k = positive_int(j["max_k"], "max_k");
  if (j.contains("threads")) s.threads = static_cast<unsigned>(unsigned_int(j["threads"], "threads"));
  if (j.contains("record_timing")) {
    if (!j["record_timing"].is_boolean()) bad("record_timing", "expected a boolean");
    s.record_timing = j["record_timing"].get<bool>();
  }
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  return s;
}

Json result_to_json(const ExperimentResult& r) {
  Json j;
  j["spec"] = spec_to_json(r.spec);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.config_hash));
  j["fingerprint"] = {{"seed", r.spec.seed}, {"config_hash", hash}};
  Json sums = Json::array();
  for (const auto& s : r.summaries)
    sums.push_back({{"series", s.series},
                    {"n", s.n},
                    {"count", s.count},
                    {"mean", s.mean},
                    {"median", s.median},
                    {"q10", s.q10},
                    {"q25", s.q25},
                    {"q75", s.q75},
                    {"q90", s.q90}});
  j["summaries"] = std::move(sums);
  Json slopes = Json::array();
  for (const auto& f : r.slopes) {
    Json s = {{"series", f.series}, {"slope", f.slope}, {"points", f.points}};
    s["std_error"] = std::isfinite(f.std_error) ? Json(f.std_error) : Json(nullptr);
    slopes.push_back(std::move(s));
  }
  j["slopes"] = std::move(slopes);
  j["metrics"] = r.metrics;
  j["rows"] = r.rows.size();
  return j;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

Json read_json_file(const std::string& path) {
  std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

PiecewiseDensity read_density_file(const std::string& path) {
  try {
    return density_from_json(read_json_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::vector<double> read_sample_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<double> xs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string tok = line.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v))
      throw FormatError(path + ": line " + std::to_string(lineno) + " is not a finite number");
    xs.push_back(v);
  }
  return xs;
}

} // namespace rhoest
