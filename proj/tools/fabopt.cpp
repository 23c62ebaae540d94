// Command-line front end: check, generate, optimize, export.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fabopt/config.hpp"
#include "fabopt/generator.hpp"
#include "fabopt/io.hpp"
#include "fabopt/morphology.hpp"
#include "fabopt/optimize.hpp"

namespace fs = std::filesystem;
using namespace fabopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;    // infeasible design, bad input, I/O error
constexpr int kExitSpecMissed = 2;  // optimize: spec never met within budget
constexpr int kExitSolver = 3;      // optimize: simulation failure
constexpr const char* kOutputRootEnv = "FABOPT_OUTPUT_ROOT";

// Relative output paths resolve under $FABOPT_OUTPUT_ROOT when it is set.
fs::path output_path(const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / path;
  }
  return path;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::pair<int, int> parse_shape(const std::string& s) {
  const auto sep = s.find_first_of("x,X");
  if (sep == std::string::npos) throw std::invalid_argument("shape must look like ROWSxCOLS");
  const int rows = std::stoi(s.substr(0, sep));
  const int cols = std::stoi(s.substr(sep + 1));
  if (rows < 1 || cols < 1) throw std::invalid_argument("shape must be positive");
  return {rows, cols};
}

int cmd_check(const std::string& design_file, const std::string& brush_spec) {
  const BinaryGrid x = read_design(design_file);
  const Brush b = parse_brush(brush_spec);
  const bool ok = is_feasible(x, b);
  const int mls = minimum_length_scale(x, b.shape());
  const RunLengthStats rl = run_length_stats(x);
  std::cout << "design: " << design_file << " (" << x.rows() << "x" << x.cols() << ")\n"
            << "brush: " << b.spec() << "\n"
            << "feasible: " << (ok ? "yes" : "no") << "\n"
            << "minimum_length_scale(" << brush_shape_name(b.shape()) << "): " << mls << "\n"
            << "min_solid_run: " << rl.min_solid_run << " (" << rl.solid_runs << " interior runs)\n"
            << "min_void_run: " << rl.min_void_run << " (" << rl.void_runs << " interior runs)\n";
  return ok ? kExitOk : kExitFailure;
}

int cmd_generate(const std::string& brush_spec, const std::string& shape, std::uint64_t seed,
                 const std::string& out, const std::string& trace) {
  const Brush b = parse_brush(brush_spec);
  const auto [rows, cols] = parse_shape(shape);
  const RealGrid theta = random_reward(rows, cols, seed);
  std::ostringstream lines;
  const BinaryGrid x = generate(theta, b, BorderMode::padded(), {}, [&](const StepRecord& r) {
    if (!trace.empty()) lines << to_json(r).dump() << '\n';
  });
  if (!is_feasible(x, b)) throw std::logic_error("generator produced an infeasible design");
  const fs::path path = output_path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_design(path, x);
  if (!trace.empty()) write_text(output_path(trace), lines.str());
  std::cout << "wrote " << path.string() << " (" << rows << "x" << cols << ", " << b.spec() << ", seed " << seed
            << ")\n";
  return kExitOk;
}

int cmd_export(const std::string& design_file, const std::string& out, double pitch_nm) {
  if (!(pitch_nm > 0)) throw std::invalid_argument("pitch must be positive");
  const BinaryGrid x = read_design(design_file);
  const auto loops = outline(x);
  const fs::path path = output_path(out);
  write_text(path, contours_to_json(loops, x, pitch_nm).dump(1) + "\n");
  std::size_t holes = 0;
  for (const auto& l : loops) holes += l.hole;
  std::cout << "wrote " << path.string() << " (" << loops.size() - holes << " outer loops, " << holes
            << " holes)\n";
  return kExitOk;
}

std::string step_name(int step) {
  std::ostringstream s;
  s << "step_" << std::setw(4) << std::setfill('0') << step << ".pgm";
  return s.str();
}

int cmd_optimize(const std::string& config_file, const std::optional<std::string>& out,
                 const std::optional<std::uint64_t>& seed, const std::optional<std::string>& brush,
                 const std::string& trace, bool all_steps) {
  std::ifstream in(config_file);
  if (!in) throw IoError("cannot open " + config_file);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("config is not valid JSON: " + std::string(e.what()));
  }
  if (seed) j["seed"] = *seed;
  if (brush) j["brush"] = *brush;
  RunConfig cfg = run_config_from_json(j);
  if (out) cfg.output_dir = *out;
  const fs::path dir = output_path(cfg.output_dir);
  fs::create_directories(dir);
  const fs::path marker = dir / "INCOMPLETE";
  fs::remove(dir / "FAILED");
  write_text(marker, "run in progress or interrupted\n");

  const ProblemDefinition problem = cfg.problem();
  write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
  std::ofstream trace_out;
  if (!trace.empty()) {
    const fs::path tp = fs::path(trace).is_absolute() ? fs::path(trace) : dir / trace;
    if (tp.has_parent_path()) fs::create_directories(tp.parent_path());
    trace_out.open(tp, std::ios::binary);
    if (!trace_out) throw IoError("cannot write " + tp.string());
  }
  if (all_steps) fs::create_directories(dir / "designs");

  std::cout << "optimizing " << problem.name() << " (" << problem.design_rows() << "x" << problem.design_cols()
            << " at " << cfg.pitch_nm << " nm) with " << cfg.optimize.transform.brush.spec() << ", seed "
            << cfg.optimize.seed << ", budget " << cfg.optimize.budget << "\n";
  const Trajectory t = run_optimization(problem, cfg.optimize, [&](const StepResult& s) {
    std::cout << "step " << s.step << " loss " << format_double(s.loss) << (s.spec_met ? " spec met" : "") << "\n"
              << std::flush;
    if (trace_out.is_open()) trace_out << to_json(s).dump() << '\n' << std::flush;
    if (all_steps) write_design(dir / "designs" / step_name(s.step), s.design);
  });

  {
    std::ostringstream csv;
    write_trajectory_csv(csv, t);
    write_text(dir / "trajectory.csv", csv.str());
  }
  nlohmann::json summary{{"steps", t.steps.size()}, {"failed", t.failed}, {"initial_bias", t.initial_bias}};
  if (!t.steps.empty()) {
    const StepResult& best = t.best();
    write_design(dir / "best.pgm", best.design);
    write_design(dir / "final.pgm", t.steps.back().design);
    std::ostringstream csv;
    write_spectra_csv(csv, best.s);
    write_text(dir / "spectra.csv", csv.str());
    summary["best_step"] = best.step;
    summary["best_loss"] = best.loss;
  }
  const auto met = t.first_met();
  summary["first_spec_step"] = met ? nlohmann::json(*met) : nlohmann::json(nullptr);
  if (met) write_design(dir / "first_spec.pgm", t.steps[*met].design);
  if (t.failed) summary["error"] = t.error;
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  if (t.failed) {
    write_text(dir / "FAILED", t.error + "\n");
    fs::remove(marker);
    std::cerr << "simulation failed: " << t.error << "\n";
    return kExitSolver;
  }
  fs::remove(marker);
  std::cout << (met ? "spec met at step " + std::to_string(*met) : std::string("spec not met")) << "; artifacts in "
            << dir.string() << "\n";
  return met ? kExitOk : kExitSpecMissed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fabrication-constrained inverse design with always-feasible designs"};
  app.require_subcommand(1);
  app.footer(std::string("Relative output paths are placed under $") + kOutputRootEnv + " when it is set.");

  std::string design, brush = "circle:5", shape = "64x64", out, trace, config;
  std::uint64_t seed = 0;
  double pitch = 10.0;
  bool all_steps = false;

  auto* check = app.add_subcommand("check", "Design rule check of a design file; exit 0 iff feasible");
  check->add_option("design", design, "Design file (.pgm or .csv)")->required();
  check->add_option("--brush", brush, "Brush spec, e.g. circle:13 or notched:10")->required();

  auto* gen = app.add_subcommand("generate", "Random feasible design from a seeded reward array");
  gen->add_option("--brush", brush, "Brush spec")->required();
  gen->add_option("--shape", shape, "Design size ROWSxCOLS")->capture_default_str();
  gen->add_option("--seed", seed, "Reward array seed")->capture_default_str();
  gen->add_option("--out", out, "Output design file (.pgm or .csv)")->required();
  gen->add_option("--trace", trace, "Write per-iteration generator records as JSON lines");

  std::optional<std::uint64_t> opt_seed;
  std::optional<std::string> opt_brush, opt_out;
  auto* opt = app.add_subcommand("optimize", "Run an optimization from a JSON config; exit 0 if the spec is met");
  opt->add_option("--config", config, "Run config (JSON)")->required();
  opt->add_option("--out", opt_out, "Output directory (overrides the config)");
  opt->add_option("--seed", opt_seed, "Seed (overrides the config)");
  opt->add_option("--brush", opt_brush, "Brush spec (overrides the config)");
  opt->add_option("--trace", trace, "Per-step JSON lines file, relative to the output directory");
  opt->add_flag("--all-steps", all_steps, "Also write every step's design under designs/");

  auto* exp = app.add_subcommand("export", "Outline solid regions as polygon loops (JSON, nm)");
  exp->add_option("design", design, "Design file (.pgm or .csv)")->required();
  exp->add_option("--out", out, "Output JSON file")->required();
  exp->add_option("--pitch", pitch, "Pixel pitch in nm")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*check) return cmd_check(design, brush);
    if (*gen) return cmd_generate(brush, shape, seed, out, trace);
    if (*opt) return cmd_optimize(config, opt_out, opt_seed, opt_brush, trace, all_steps);
    if (*exp) return cmd_export(design, out, pitch);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
