#include "hmnc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "hmnc/element.hpp"
#include "hmnc/parallel.hpp"
#include "hmnc/problems.hpp"

namespace hmnc {

namespace {

const std::map<std::string, Variant> kElements{
    {"wuxu", Variant::Standard}, {"standard", Variant::Standard}, {"robust", Variant::Robust}};
const std::map<std::string, FormConvention> kConventions{{"multiindex", FormConvention::MultiIndex},
                                                         {"frobenius", FormConvention::Frobenius}};
const std::map<std::string, ReportFormat> kFormats{{"table", ReportFormat::Table}, {"csv", ReportFormat::Csv}};
const std::vector<std::string> kProblems{"triharmonic-square", "triharmonic-lshape", "robust", "perturbed"};

bool needs_robust(const std::string& problem) { return problem == "robust" || problem == "perturbed"; }

void add_common(CLI::App& sub, RunConfig& cfg, std::string& format, std::optional<int>& threads) {
  sub.add_option("--output,-o", cfg.output, "write the report to this file instead of stdout");
  sub.add_option("--format", format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
  sub.add_option("--threads", threads, "worker threads (default: HMNC_THREADS or 1)")->check(CLI::PositiveNumber);
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"H^m nonconforming element lab and tri-harmonic solver", "hmnc"};
  app.require_subcommand(1);

  std::string format = "table";
  std::optional<int> threads;
  std::string element_name;
  std::string convention_name = kDefaultConvention == FormConvention::Frobenius ? "frobenius" : "multiindex";
  std::string error_convention_name;

  auto* uni = app.add_subcommand("unisolvency", "DOF-matrix conditioning lab");
  auto* conv = app.add_subcommand("converge", "convergence study for one problem");
  auto* sweep = app.add_subcommand("sweep", "epsilon sweep for the perturbed problem");

  std::optional<int> n;
  bool no_robust = false;
  uni->add_option("--n", n, "space dimension (default: 1, 2 and 3)")->check(CLI::Range(1, 3));
  uni->add_option("--trials", cfg.trials, "random simplices per dimension")->check(CLI::NonNegativeNumber);
  uni->add_option("--seed", cfg.seed, "random seed");
  uni->add_flag("--no-robust", no_robust, "skip the robust 2D element");
  add_common(*uni, cfg, format, threads);

  conv->add_option("--problem", cfg.problem, "problem id")->check(CLI::IsMember(kProblems));
  conv->add_option("--element", element_name, "wuxu or robust")->check(CLI::IsMember({"wuxu", "standard", "robust"}));
  conv->add_option("--levels", cfg.levels, "comma separated 1/h values")->delimiter(',')->check(CLI::PositiveNumber);
  conv->add_option("--quad-degree", cfg.quad_degree, "assembly quadrature degree")->check(CLI::Range(0, 20));
  conv->add_option("--convention", convention_name, "multiindex or frobenius")
      ->check(CLI::IsMember({"multiindex", "frobenius"}));
  conv->add_option("--error-convention", error_convention_name, "weighting of the error norms (default: --convention)")
      ->check(CLI::IsMember({"multiindex", "frobenius"}));
  conv->add_option("--b0", cfg.b0, "mass coefficient of the robust problem")->check(CLI::PositiveNumber);
  conv->add_option("--dump-mesh", cfg.dump_mesh, "write the finest mesh to this file");
  add_common(*conv, cfg, format, threads);

  sweep->add_option("--epsilons", cfg.epsilons, "comma separated epsilon values")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sweep->add_option("--level", cfg.sweep_level, "1/h")->check(CLI::PositiveNumber);
  sweep->add_option("--quad-degree", cfg.quad_degree, "assembly quadrature degree")->check(CLI::Range(0, 20));
  sweep->add_option("--convention", convention_name, "multiindex or frobenius")
      ->check(CLI::IsMember({"multiindex", "frobenius"}));
  add_common(*sweep, cfg, format, threads);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), 0);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    msg << e.what();
    throw UsageError(msg.str(), e.get_exit_code() == 0 ? 2 : e.get_exit_code());
  }

  if (uni->parsed()) cfg.command = Command::Unisolvency;
  else if (sweep->parsed()) cfg.command = Command::Sweep;
  else cfg.command = Command::Converge;

  cfg.format = kFormats.at(format);
  cfg.convention = kConventions.at(convention_name);
  if (!error_convention_name.empty()) cfg.error_convention = kConventions.at(error_convention_name);
  cfg.threads = threads ? *threads : default_thread_count();
  if (n) cfg.dims = {*n};
  cfg.include_robust = !no_robust;

  if (cfg.command == Command::Sweep) {
    cfg.problem = "perturbed";
    cfg.element = Variant::Robust;
    if (cfg.epsilons.empty()) throw UsageError("--epsilons: at least one value required", 2);
  }
  if (cfg.command == Command::Converge) {
    if (!element_name.empty()) cfg.element = kElements.at(element_name);
    else if (needs_robust(cfg.problem)) cfg.element = Variant::Robust;
    if (needs_robust(cfg.problem) && cfg.element != Variant::Robust)
      throw UsageError("problem '" + cfg.problem + "' requires --element robust", 2);
    if (cfg.levels.empty()) throw UsageError("--levels: at least one level required", 2);
    for (std::size_t i = 1; i < cfg.levels.size(); ++i)
      if (cfg.levels[i] <= cfg.levels[i - 1]) throw UsageError("--levels must be strictly increasing", 2);
  }
  return cfg;
}

RunConfig parse_args(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_args(args);
}

namespace {

ProblemCase make_case(const RunConfig& cfg) {
  ProblemCase pc;
  if (cfg.problem == "triharmonic-square") pc = example1(cfg.convention);
  else if (cfg.problem == "triharmonic-lshape") pc = example2(cfg.convention);
  else if (cfg.problem == "robust") pc = robust_case(cfg.b0, cfg.convention);
  else throw UsageError("problem '" + cfg.problem + "' is only available through the sweep command", 2);
  pc.variant = cfg.element;
  return pc;
}

bool all_finite(const std::vector<ErrorRecord>& rs) {
  for (const auto& r : rs)
    for (double e : r.errors)
      if (!std::isfinite(e)) return false;
  return true;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) {
      err << "cannot open output file " << cfg.output << '\n';
      return 2;
    }
    sink = &file;
  }

  StudyOptions opts;
  opts.threads = cfg.threads;
  if (cfg.quad_degree) opts.assembly_degree = *cfg.quad_degree;
  opts.error_convention = cfg.error_convention;

  try {
    switch (cfg.command) {
      case Command::Unisolvency: {
        std::vector<UnisolvencyReport> reports;
        for (int n : cfg.dims) reports.push_back(check_unisolvency(n, Variant::Standard, cfg.trials, cfg.seed));
        const bool wants_2d =
            std::find(cfg.dims.begin(), cfg.dims.end(), 2) != cfg.dims.end() || cfg.dims.size() == 3;
        if (cfg.include_robust && wants_2d)
          reports.push_back(check_unisolvency(2, Variant::Robust, cfg.trials, cfg.seed));
        *sink << emit_unisolvency(reports, cfg.format);
        return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass(); }) ? 0 : 1;
      }
      case Command::Converge: {
        const ProblemCase pc = make_case(cfg);
        if (!cfg.dump_mesh.empty()) {
          std::ofstream m(cfg.dump_mesh);
          if (!m) {
            err << "cannot open mesh file " << cfg.dump_mesh << '\n';
            return 2;
          }
          dump_mesh(build_mesh(pc, cfg.levels.back()), m);
        }
        const auto records = run_convergence_study(pc, cfg.levels, opts);
        if (cfg.format == ReportFormat::Table)
          *sink << pc.label << " (element " << to_string(pc.variant) << ")\n";
        *sink << emit_report(records, cfg.format);
        return all_finite(records) ? 0 : 1;
      }
      case Command::Sweep: {
        const auto records = run_perturbed_sweep(cfg.epsilons, cfg.sweep_level, cfg.convention, opts);
        if (cfg.format == ReportFormat::Table)
          *sink << "constructed benchmark: eps^2 D^3 + grad-grad, mixed normal data, one pinned value\n";
        *sink << emit_sweep(records, cfg.format);
        for (const auto& r : records)
          if (!std::isfinite(r.energy)) return 1;
        return 0;
      }
    }
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace hmnc
