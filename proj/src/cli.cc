// Copyright 2026 The PWM Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pwm/cli.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pwm/allocation.h"
#include "pwm/error.h"
#include "pwm/evaluation.h"
#include "pwm/ewm_solver.h"
#include "pwm/penalties.h"
#include "pwm/pwm.h"
#include "pwm/random.h"
#include "pwm/sample.h"

namespace pwm {
namespace {

using nlohmann::json;

struct Options {
  std::string command;
  // Input.
  std::string data;
  std::string dgp;
  std::size_t n = 500;
  double dgp_e = 0.5;
  std::optional<double> e_const;
  bool estimated_e = false;
  double trim_alpha = 0.25;
  bool drop_education_99 = false;
  std::string education_column = "education";
  // Sieve.
  std::string sieve = "threshold";
  std::optional<int> max_k;
  std::string direction = "non-decreasing";
  std::vector<double> domain = {0.0, 1.0};
  std::optional<double> theta_bound;
  std::string tk_term = "on";
  // Penalty.
  std::string penalty = "holdout";
  double ell = 0.25;
  int draws = 100;
  bool independent_draws = false;
  bool shuffle = false;
  // Fitting.
  std::optional<int> k;
  bool demean = false;
  bool refit = false;
  std::uint64_t seed = 0;
  int threads = 1;
  // Regret.
  std::vector<std::string> rules = {"ewm:6", "ewm:3", "pwm-holdout"};
  std::string n_grid = "100:500:100";
  std::size_t reps = 200;
  // Constants.
  double M = 1.0;
  double kappa = 0.25;
  std::optional<double> bound_ell;
  // Simulate.
  bool with_e = false;
  // Outputs.
  std::string out;
  std::string classification;
  std::string out_json;
};

struct Input {
  Sample sample;
  PropensitySpec prop = KnownConstant{0.5};
  json echo;
};

void WriteText(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw DataError("failed writing '" + path + "'");
}

std::string Dump(const json& doc) { return doc.dump(2) + "\n"; }

void RequireOneSource(const Options& o) {
  if (o.data.empty() == o.dgp.empty()) {
    throw ValidationError("give exactly one of --data and --dgp");
  }
}

Input ResolveInput(const Options& o) {
  RequireOneSource(o);
  Input in;
  if (!o.dgp.empty()) {
    const DgpSpec spec = MakeDgp(o.dgp, o.dgp_e);
    in.sample = Simulate(spec, o.n, o.seed);
    in.prop = KnownConstant{spec.propensity};
    in.echo = {{"dgp", spec.name}, {"n", o.n}, {"dgp_e", spec.propensity},
               {"sample_seed", o.seed}};
    return in;
  }
  LoadOptions load;
  load.drop_education_99 = o.drop_education_99;
  load.education_column = o.education_column;
  Dataset ds = LoadDataset(o.data, load);
  in.sample = std::move(ds.sample);
  in.echo = {{"data", o.data}, {"rows", in.sample.size()},
             {"dropped_rows", ds.dropped_rows}};
  if (o.e_const) {
    in.prop = KnownConstant{*o.e_const};
  } else if (ds.propensity) {
    if (o.estimated_e) {
      in.prop = EstimatedPerUnit{*ds.propensity, o.trim_alpha};
    } else {
      in.prop = KnownPerUnit{*ds.propensity};
    }
  } else {
    throw ValidationError(
        "the propensity score is required: add an 'e' column to the data or "
        "pass --e-const");
  }
  if (IsKnown(in.prop)) KappaHat(in.prop, in.sample.size());
  return in;
}

SieveSequence BuildSieve(const Options& o, std::size_t dim) {
  SieveSequence sieve;
  if (o.sieve == "threshold") {
    sieve = ThresholdSieve(dim, o.max_k);
  } else if (o.sieve == "monotone") {
    if (dim != 2) {
      throw ValidationError("the monotone sieve needs exactly two covariates");
    }
    if (o.domain.size() != 2) throw ValidationError("--domain takes lo,hi");
    sieve = MonotoneSieve(o.max_k.value_or(5), ParseDirection(o.direction),
                          Domain{o.domain[0], o.domain[1]});
    sieve.theta_bound = o.theta_bound;
  } else {
    throw ValidationError("--sieve must be threshold or monotone");
  }
  if (o.tk_term != "on" && o.tk_term != "off") {
    throw ValidationError("--tk-term must be on or off");
  }
  sieve.include_tk_term = o.tk_term == "on";
  return sieve;
}

PenaltyConfig BuildPenalty(const Options& o) {
  PenaltyConfig p;
  if (o.penalty == "holdout") {
    p.kind = PenaltyKind::kHoldout;
  } else if (o.penalty == "rademacher") {
    p.kind = PenaltyKind::kRademacher;
  } else {
    throw ValidationError("--penalty must be holdout or rademacher");
  }
  p.holdout = {.ell = o.ell, .seed = DeriveSeed(o.seed, "split"),
               .shuffle = o.shuffle};
  p.rademacher = {.draws = o.draws, .seed = DeriveSeed(o.seed, "rademacher"),
                  .shared_draws = !o.independent_draws, .threads = o.threads};
  Validate(p);
  return p;
}

json EchoSieve(const Options& o, const SieveSequence& sieve) {
  json echo = {{"sieve", o.sieve}, {"classes", sieve.size()},
               {"tk_term", o.tk_term}};
  if (sieve.family == Family::kMonotone) {
    echo["direction"] = DirectionName(sieve.direction);
    echo["domain"] = {sieve.domain.lo, sieve.domain.hi};
    echo["theta_bound"] = o.theta_bound ? json(*o.theta_bound) : json("default");
  }
  return echo;
}

json EchoPenalty(const Options& o, const PenaltyConfig& p) {
  json echo = {{"penalty", PenaltyKindName(p.kind)}};
  if (p.kind == PenaltyKind::kHoldout) {
    echo["ell"] = o.ell;
    echo["shuffle"] = o.shuffle;
    echo["split_seed"] = p.holdout.seed;
  } else {
    echo["B"] = o.draws;
    echo["shared_draws"] = !o.independent_draws;
    echo["rademacher_seed"] = p.rademacher.seed;
  }
  return echo;
}

json BaseEcho(const Options& o, const Input& in) {
  json echo = {{"command", o.command}, {"seed", o.seed}, {"input", in.echo},
               {"demean", o.demean}};
  if (!o.data.empty()) {
    echo["e_const"] = o.e_const ? json(*o.e_const) : json(nullptr);
    echo["estimated_e"] = o.estimated_e;
    echo["trim_alpha"] = o.trim_alpha;
    echo["drop_education_99"] = o.drop_education_99;
    echo["education_column"] = o.education_column;
  } else {
    echo["assumptions"] = {
        "the source design does not state the assignment propensity; "
        "dgp_e is an assumption (default 0.5)"};
  }
  return echo;
}

std::string ClassificationCsv(const Sample& sample, const Allocation& alloc) {
  std::string csv = "unit";
  const auto& names = sample.covariate_names();
  for (std::size_t a = 0; a < sample.dim(); ++a) {
    csv += "," + (a < names.size() ? names[a] : "x" + std::to_string(a + 1));
  }
  csv += ",treat\n";
  const std::vector<bool> member = Classify(alloc, sample);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    csv += std::to_string(i + 1);
    for (std::size_t a = 0; a < sample.dim(); ++a) {
      csv += "," + FormatNumber(sample.x(i, a));
    }
    csv += member[i] ? ",1\n" : ",0\n";
  }
  return csv;
}

int CmdFit(const Options& o, std::ostream& out) {
  Input in = ResolveInput(o);
  const SieveSequence sieve = BuildSieve(o, in.sample.dim());
  json doc;
  doc["config"] = BaseEcho(o, in);
  doc["config"]["sieve"] = EchoSieve(o, sieve);
  Allocation chosen;
  if (o.k) {
    doc["config"]["mode"] = "ewm";
    doc["config"]["k"] = *o.k;
    EwmSolution sol = FitEwm(in.sample, in.prop, sieve, *o.k, o.demean);
    doc["ewm"] = ToJson(sol);
    chosen = sol.allocation;
  } else {
    const PenaltyConfig penalty = BuildPenalty(o);
    doc["config"]["mode"] = "pwm";
    doc["config"]["penalty"] = EchoPenalty(o, penalty);
    doc["config"]["refit"] = o.refit;
    PwmResult result = FitPwm(in.sample, in.prop, sieve, penalty,
                              {.demean = o.demean, .refit = o.refit});
    doc["result"] = ToJson(result);
    chosen = result.allocation;
  }
  WriteText(o.out, Dump(doc), out);
  if (!o.classification.empty()) {
    WriteText(o.classification, ClassificationCsv(in.sample, chosen), out);
  }
  return kExitOk;
}

int CmdPenalty(const Options& o, std::ostream& out) {
  Input in = ResolveInput(o);
  const SieveSequence sieve = BuildSieve(o, in.sample.dim());
  const PenaltyConfig penalty = BuildPenalty(o);
  const Sample data = o.demean ? DemeanOutcomes(in.sample) : in.sample;
  PenaltyReport report;
  if (penalty.kind == PenaltyKind::kRademacher) {
    report = RademacherPenalties(MakeScores(data, in.prop, data.size()), data,
                                 sieve, penalty.rademacher);
  } else {
    report = HoldoutPenalties(data, in.prop, sieve, penalty.holdout);
  }
  json doc;
  doc["config"] = BaseEcho(o, in);
  doc["config"]["sieve"] = EchoSieve(o, sieve);
  doc["config"]["penalty"] = EchoPenalty(o, penalty);
  doc["report"] = ToJson(report);
  WriteText(o.out, Dump(doc), out);
  return kExitOk;
}

std::size_t ParseSize(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("'" + s + "' is not a non-negative integer");
  }
  return v;
}

std::vector<std::size_t> ParseGrid(const std::string& spec) {
  std::vector<std::size_t> grid;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream in(spec);
    for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("--n takes start:stop:step");
    const std::size_t start = ParseSize(parts[0]);
    const std::size_t stop = ParseSize(parts[1]);
    const std::size_t step = ParseSize(parts[2]);
    if (step == 0 || start > stop) throw ValidationError("--n needs start <= stop and step > 0");
    for (std::size_t v = start; v <= stop; v += step) grid.push_back(v);
  } else {
    std::stringstream in(spec);
    for (std::string p; std::getline(in, p, ',');) grid.push_back(ParseSize(p));
  }
  if (grid.empty()) throw ValidationError("--n grid is empty");
  return grid;
}

int CmdRegret(const Options& o, std::ostream& out) {
  RegretConfig config;
  config.rules = o.rules;
  config.n_grid = ParseGrid(o.n_grid);
  config.reps = o.reps;
  config.seed = o.seed;
  config.dgp = MakeDgp(o.dgp.empty() ? "sim5" : o.dgp, o.dgp_e);
  config.holdout = {.ell = o.ell, .seed = 0, .shuffle = o.shuffle};
  config.rademacher = {.draws = o.draws, .seed = 0,
                       .shared_draws = !o.independent_draws, .threads = 1};
  config.threads = o.threads;
  const RegretTable table = RegretCurve(config);
  WriteText(o.out, RegretCsv(table), out);
  if (!o.out_json.empty()) {
    json doc = ToJson(table);
    doc["config"] = {{"command", "regret"},
                     {"rules", o.rules},
                     {"n", config.n_grid},
                     {"reps", o.reps},
                     {"seed", o.seed},
                     {"dgp", config.dgp.name},
                     {"dgp_e", config.dgp.propensity},
                     {"ell", o.ell},
                     {"shuffle", o.shuffle},
                     {"B", o.draws},
                     {"shared_draws", !o.independent_draws},
                     {"assumptions",
                      {"the source design does not state the assignment "
                       "propensity; dgp_e is an assumption (default 0.5)"}}};
    WriteText(o.out_json, Dump(doc), out);
  }
  return kExitOk;
}

int CmdSimulate(const Options& o, std::ostream& out) {
  const DgpSpec spec = MakeDgp(o.dgp.empty() ? "sim5" : o.dgp, o.dgp_e);
  const Sample sample = Simulate(spec, o.n, o.seed);
  std::optional<std::vector<double>> e;
  if (o.with_e) e = std::vector<double>(sample.size(), spec.propensity);
  WriteText(o.out, FormatDataset(sample, e), out);
  return kExitOk;
}

int CmdExportMilp(const Options& o, std::ostream& out) {
  if (!o.k) throw ValidationError("export-milp needs --k");
  if (o.out.empty()) throw ValidationError("export-milp needs --out <file.lp>");
  Input in = ResolveInput(o);
  const SieveSequence sieve = BuildSieve(o, in.sample.dim());
  const Sample data = o.demean ? DemeanOutcomes(in.sample) : in.sample;
  const ScoreVector scores = MakeScores(data, in.prop, data.size());
  SolverOptions solver;
  solver.theta_bound = o.theta_bound;
  const auto files = ExportMilp(scores.scores, data, sieve, *o.k, o.out, solver);
  json doc;
  doc["config"] = BaseEcho(o, in);
  doc["config"]["sieve"] = EchoSieve(o, sieve);
  doc["config"]["k"] = *o.k;
  doc["files"] = json::array();
  for (const auto& f : files) doc["files"].push_back(f.string());
  out << Dump(doc);
  return kExitOk;
}

int CmdConstants(const Options& o, std::ostream& out) {
  BoundConfig config{.M = o.M, .kappa = o.kappa, .ell = o.bound_ell};
  json doc = {{"config",
               {{"command", "constants"},
                {"M", o.M},
                {"kappa", o.kappa},
                {"ell", o.bound_ell ? json(*o.bound_ell) : json(nullptr)}}},
              {"constants", ToJson(ComputeBoundConstants(config))}};
  WriteText(o.out, Dump(doc), out);
  return kExitOk;
}

void AddInputFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data, "CSV with columns y, d, covariates and optional e");
  cmd->add_option("--dgp", o.dgp, "Simulate instead: sim5 or mono2");
  cmd->add_option("--n", o.n, "Sample size for --dgp")->capture_default_str();
  cmd->add_option("--dgp-e", o.dgp_e, "Assignment probability for --dgp")
      ->capture_default_str();
  cmd->add_option("--e-const", o.e_const, "Known constant propensity for --data");
  cmd->add_flag("--estimated-e", o.estimated_e,
                "Treat the e column as estimated (trimmed hybrid scores)");
  cmd->add_option("--trim-alpha", o.trim_alpha, "Trimming exponent, eps_n = n^-alpha")
      ->capture_default_str();
  cmd->add_flag("--drop-education-99", o.drop_education_99,
                "Drop rows whose education column equals 99");
  cmd->add_option("--education-column", o.education_column,
                  "Column used by --drop-education-99")
      ->capture_default_str();
}

void AddSieveFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--sieve", o.sieve, "threshold or monotone")->capture_default_str();
  cmd->add_option("--K", o.max_k, "Number of sieve classes (monotone default 5)");
  cmd->add_option("--direction", o.direction, "non-decreasing or non-increasing")
      ->capture_default_str();
  cmd->add_option("--domain", o.domain, "Monotone x1 domain lo,hi")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  cmd->add_option("--theta-bound", o.theta_bound,
                  "Box |theta_j| <= bound (default 10 max(1, max|x2|))");
  cmd->add_option("--tk-term", o.tk_term, "Include sqrt(t_k/n): on or off")
      ->capture_default_str();
}

void AddPenaltyFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--penalty", o.penalty, "holdout or rademacher")->capture_default_str();
  cmd->add_option("--ell", o.ell, "Holdout testing fraction")->capture_default_str();
  cmd->add_flag("--shuffle", o.shuffle, "Shuffle before the holdout split");
  cmd->add_option("--B", o.draws, "Rademacher draws")->capture_default_str();
  cmd->add_flag("--independent-draws", o.independent_draws,
                "Fresh Rademacher draws per class instead of shared draws");
}

void AddCommonFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  cmd->add_flag("--demean", o.demean, "Replace y by y - mean(y)");
  cmd->add_option("--out", o.out, "Output file (default stdout)");
}

int Dispatch(const Options& o, std::ostream& out) {
  if (o.threads < 1) throw ValidationError("--threads must be >= 1");
  if (o.command == "fit") return CmdFit(o, out);
  if (o.command == "penalty") return CmdPenalty(o, out);
  if (o.command == "regret") return CmdRegret(o, out);
  if (o.command == "simulate") return CmdSimulate(o, out);
  if (o.command == "export-milp") return CmdExportMilp(o, out);
  return CmdConstants(o, out);
}

void ReportError(std::ostream& err, const char* kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Options o;
  CLI::App app{"Penalized and empirical welfare maximization for treatment rules",
               "pwm"};
  app.require_subcommand(1);

  CLI::App* fit = app.add_subcommand("fit", "Fit PWM (or EWM in one class with --k)");
  AddInputFlags(fit, o);
  AddSieveFlags(fit, o);
  AddPenaltyFlags(fit, o);
  AddCommonFlags(fit, o);
  fit->add_option("--k", o.k, "Fit EWM in class k only");
  fit->add_flag("--refit", o.refit, "Holdout: refit the chosen class on the full sample");
  fit->add_option("--classification", o.classification, "Per-unit classification CSV");

  CLI::App* penalty = app.add_subcommand("penalty", "Per-class penalties");
  AddInputFlags(penalty, o);
  AddSieveFlags(penalty, o);
  AddPenaltyFlags(penalty, o);
  AddCommonFlags(penalty, o);

  CLI::App* regret = app.add_subcommand("regret", "Regret curves on a simulation DGP");
  regret->add_option("--rules", o.rules, "ewm:<k>, pwm-holdout, pwm-rademacher, oracle")
      ->delimiter(',')
      ->capture_default_str();
  regret->add_option("--n", o.n_grid, "start:stop:step or a comma list")
      ->capture_default_str();
  regret->add_option("--reps", o.reps, "Replications per cell")->capture_default_str();
  regret->add_option("--dgp", o.dgp, "Simulation DGP (sim5)");
  regret->add_option("--dgp-e", o.dgp_e, "Assignment probability")->capture_default_str();
  regret->add_option("--ell", o.ell, "Holdout testing fraction")->capture_default_str();
  regret->add_flag("--shuffle", o.shuffle, "Shuffle before the holdout split");
  regret->add_option("--B", o.draws, "Rademacher draws")->capture_default_str();
  regret->add_flag("--independent-draws", o.independent_draws,
                   "Fresh Rademacher draws per class");
  regret->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  regret->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  regret->add_option("--out", o.out, "CSV output (default stdout)");
  regret->add_option("--out-json", o.out_json, "JSON output");

  CLI::App* simulate = app.add_subcommand("simulate", "Draw a sample from a DGP as CSV");
  simulate->add_option("--dgp", o.dgp, "sim5 or mono2");
  simulate->add_option("--n", o.n, "Sample size")->capture_default_str();
  simulate->add_option("--dgp-e", o.dgp_e, "Assignment probability")->capture_default_str();
  simulate->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  simulate->add_flag("--with-e", o.with_e, "Write the propensity as column e");
  simulate->add_option("--out", o.out, "CSV output (default stdout)");

  CLI::App* milp = app.add_subcommand("export-milp", "Write class k as LP file(s)");
  AddInputFlags(milp, o);
  AddSieveFlags(milp, o);
  AddCommonFlags(milp, o);
  milp->add_option("--k", o.k, "Class index");

  CLI::App* constants = app.add_subcommand("constants", "Bound constants C and g");
  constants->add_option("--M", o.M, "Outcome support width")->capture_default_str();
  constants->add_option("--kappa", o.kappa, "Overlap constant")->capture_default_str();
  constants->add_option("--ell", o.bound_ell, "Holdout fraction for g(M, kappa, ell)");
  constants->add_option("--out", o.out, "JSON output (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    ReportError(err, "validation", e.what());
    return kExitValidation;
  }
  for (const auto* sub : app.get_subcommands()) o.command = sub->get_name();

  try {
    return Dispatch(o, out);
  } catch (const ValidationError& e) {
    ReportError(err, "validation", e.what());
    return kExitValidation;
  } catch (const DataError& e) {
    ReportError(err, "data", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    ReportError(err, "internal", e.what());
    return kExitInternal;
  }
}

}  // namespace pwm
