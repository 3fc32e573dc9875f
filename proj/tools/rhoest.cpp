#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rhoest/approx.hpp"
#include "rhoest/bench.hpp"
#include "rhoest/error.hpp"
#include "rhoest/json_io.hpp"
#include "rhoest/kernels.hpp"
#include "rhoest/models.hpp"
#include "rhoest/rho.hpp"
#include "rhoest/select.hpp"
#include "rhoest/vc.hpp"

namespace {

using namespace rhoest;

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
  std::optional<std::size_t> budget;
  double kappa = 35.7;
};

std::filesystem::path out_path(const Globals& g, const std::string& file) {
  std::filesystem::path dir = g.out.empty() ? std::filesystem::path(".") : std::filesystem::path(g.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir / file;
}

RhoConfig rho_config(const Globals& g) {
  RhoConfig cfg;
  cfg.kappa = g.kappa;
  return cfg;
}

int cmd_fit(const Globals& g, const std::string& sample_path, const std::string& model_path) {
  Sample s(read_sample_file(sample_path));
  ShapeModel m = model_from_json(read_json_file(model_path));
  std::size_t budget = g.budget.value_or(64);
  CandidateSet set = build_candidates(s, m, budget, g.seed);
  RhoConfig cfg = rho_config(g);
  cfg.candidate_budget = std::max(cfg.candidate_budget, set.size());
  RhoResult r = rho_estimate(s, set, cfg);

  Json est = density_to_json(r.estimate);
  write_text_file(out_path(g, "estimate.json").string(), est.dump(2) + "\n");
  Json diag = diagnostics_to_json(r.diagnostics, cfg.kappa);
  diag["model"] = model_to_json(m);
  diag["selected_provenance"] = set.provenance[r.diagnostics.argmin];
  write_text_file(out_path(g, "diagnostics.json").string(), diag.dump(2) + "\n");
  std::string pw = pairwise_csv(r.diagnostics);
  if (!pw.empty()) write_text_file(out_path(g, "pairwise.csv").string(), pw);

  // The written estimate must read back as a valid density.
  density_from_json(Json::parse(est.dump()));
  std::cout << "candidates " << set.size() << "\n"
            << "selected " << r.diagnostics.argmin << " (" << set.provenance[r.diagnostics.argmin]
            << ")\n"
            << "upsilon " << fixed12(r.diagnostics.upsilon[r.diagnostics.argmin]) << "\n";
  return 0;
}

int cmd_hellinger(const std::string& a, const std::string& b) {
  PiecewiseDensity t = read_density_file(a);
  PiecewiseDensity u = read_density_file(b);
  std::cout << fixed12(hellinger2(t, u)) << "\n";
  return 0;
}

int cmd_approx(const Globals& g, const std::string& shape, int D) {
  ApproxResult r = [&] {
    if (shape == "triangular") return histogram_approx(triangular_sqrt_pieces(), D);
    if (shape == "parabola") return affine_approx(concave_parabola_sqrt_pieces(), D);
    throw InvalidArgument("unknown shape '" + shape + "' (triangular or parabola)");
  }();
  FunctionDensity truth = shape == "triangular" ? triangular_density() : concave_parabola_density();
  double measured = hellinger2(truth, r.density);
  std::cout << "shape " << shape << "\n"
            << "D " << D << "\n"
            << "functional " << fixed12(r.functional.value) << "\n"
            << "bound " << fixed12(r.bound) << "\n"
            << "measured " << fixed12(measured) << "\n"
            << "pieces " << r.pieces << "\n"
            << (measured <= r.bound + 1e-9 ? "within bound" : "BOUND EXCEEDED") << "\n";
  if (!g.out.empty()) {
    Json j;
    j["shape"] = shape;
    j["D"] = D;
    j["functional"] = functional_to_json(r.functional);
    j["bound"] = r.bound;
    j["measured"] = measured;
    j["density"] = density_to_json(r.density);
    write_text_file(out_path(g, "approx.json").string(), j.dump(2) + "\n");
  }
  return measured <= r.bound + 1e-9 ? 0 : 1;
}

int cmd_vc_check(const Globals& g, std::size_t replicates) {
  ExperimentSpec spec;
  spec.name = "vc_check";
  spec.kind = ExperimentKind::vc_audit;
  spec.seed = g.seed;
  spec.replicates = replicates;
  spec.output_dir = g.out;
  ExperimentResult r = run_experiment(spec);
  bool ok = true;
  double violations = r.metrics.at("violations");
  std::cout << "level-set bound violations " << static_cast<long long>(violations) << " of "
            << r.rows.size() << "\n";
  ok = ok && violations == 0.0;
  for (int k = 1; k <= 3; ++k) {
    std::vector<double> pts;
    for (int i = 0; i < 2 * k + 1; ++i) pts.push_back(static_cast<double>(i));
    bool odd = brute_shatter(interval_union_oracle(pts, k), pts);
    pts.pop_back();
    bool even = brute_shatter(interval_union_oracle(pts, k), pts);
    std::cout << "unions of <= " << k << " intervals: shatter " << 2 * k << " points "
              << (even ? "yes" : "no") << ", shatter " << 2 * k + 1 << " points "
              << (odd ? "yes" : "no") << "\n";
    ok = ok && even && !odd;
  }
  {
    std::vector<double> pts{1.0, 2.0, 3.0};
    bool iv = brute_shatter(interval_union_oracle(pts, 1), pts);
    bool ps = brute_shatter(power_set_oracle(pts), pts);
    std::cout << "intervals shatter 3 points " << (iv ? "yes" : "no") << "\n"
              << "power set shatters 3 points " << (ps ? "yes" : "no") << "\n";
    ok = ok && !iv && ps;
  }
  std::cout << (ok ? "all checks passed" : "CHECK FAILED") << "\n";
  return ok ? 0 : 1;
}

int cmd_select(const Globals& g, const std::string& sample_path) {
  Sample s(read_sample_file(sample_path));
  SelectionPlan plan = g.config.empty() ? SelectionPlan::default_plan()
                                        : plan_from_json(read_json_file(g.config));
  SelectionResult r = split_select(s, plan, rho_config(g), g.seed, g.budget.value_or(48));
  write_text_file(out_path(g, "selected.json").string(), density_to_json(r.estimate).dump(2) + "\n");
  Json rep = selection_report_to_json(r.report);
  write_text_file(out_path(g, "selection_report.json").string(), rep.dump(2) + "\n");
  std::cout << "selected " << r.report.selected << " (" << r.report.fits[r.report.selected].model
            << ")\n"
            << "holdout_upsilon " << fixed12(r.report.holdout_upsilon[r.report.selected]) << "\n";
  return 0;
}

int cmd_bench(const Globals& g, const std::string& spec_path_arg) {
  std::string path = spec_path_arg.empty() ? g.config : spec_path_arg;
  if (path.empty()) throw CLI::ValidationError("bench", "needs a spec file (positional or --config)");
  ExperimentSpec spec = spec_from_json(read_json_file(path));
  if (!g.out.empty()) spec.output_dir = g.out;
  if (spec.output_dir.empty()) spec.output_dir = ".";
  if (g.budget) spec.budget = *g.budget;
  ExperimentResult r = run_experiment(spec);
  std::cout << "experiment " << spec.name << " (" << kind_name(spec.kind) << "), " << r.rows.size()
            << " rows\n";
  for (const auto& s : r.summaries)
    std::cout << "  " << s.series << " n=" << s.n << " median " << fixed12(s.median) << " mean "
              << fixed12(s.mean) << "\n";
  for (const auto& f : r.slopes)
    std::cout << "  slope " << f.series << " " << fixed12(f.slope) << "\n";
  for (const auto& [k, v] : r.metrics) std::cout << "  " << k << " " << fixed12(v) << "\n";
  std::cout << "wrote " << (std::filesystem::path(spec.output_dir) / (spec.name + ".csv")).string()
            << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust shape-restricted density estimation by rho-estimators"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::string kappa_text;
  app.add_option("--seed", g.seed, "Random seed (default 0)");
  app.add_option("--config", g.config, "JSON configuration (bench spec or selection plan)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--budget", g.budget, "Candidate budget per model");
  app.add_option("--kappa", g.kappa, "Near-minimizer slack (default 35.7)")
      ->check(CLI::PositiveNumber);

  std::string sample_path, model_path, a_path, b_path, shape = "triangular", spec_path;
  int D = 4;
  std::size_t replicates = 200;

  auto* fit = app.add_subcommand("fit", "Fit a rho-estimate over a shape model");
  fit->add_option("sample", sample_path, "Sample file, one number per line")->required();
  fit->add_option("model", model_path, "Model JSON, e.g. {\"kind\": \"histogram\", \"D\": 3}")
      ->required();

  auto* hel = app.add_subcommand("hellinger", "Squared Hellinger distance of two density files");
  hel->add_option("first", a_path, "Density JSON")->required();
  hel->add_option("second", b_path, "Density JSON")->required();

  auto* apx = app.add_subcommand("approx", "Approximation bound versus measured h^2");
  apx->add_option("--shape", shape, "triangular (histogram) or parabola (affine)");
  apx->add_option("--D", D, "Piece budget")->check(CLI::PositiveNumber);

  auto* vcc = app.add_subcommand("vc-check", "Level-set and shattering audits");
  vcc->add_option("--replicates", replicates, "Random specs per k")->check(CLI::PositiveNumber);

  auto* sel = app.add_subcommand("select", "Split-sample selection across model families");
  sel->add_option("sample", sample_path, "Sample file, one number per line")->required();

  auto* bench = app.add_subcommand("bench", "Run an experiment spec");
  bench->add_option("spec", spec_path, "Experiment spec JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*fit) return cmd_fit(g, sample_path, model_path);
    if (*hel) return cmd_hellinger(a_path, b_path);
    if (*apx) return cmd_approx(g, shape, D);
    if (*vcc) return cmd_vc_check(g, replicates);
    if (*sel) return cmd_select(g, sample_path);
    if (*bench) return cmd_bench(g, spec_path);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
