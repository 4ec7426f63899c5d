#include "cowalk/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cowalk/decomposition.hpp"
#include "cowalk/exact_oracle.hpp"
#include "cowalk/finance.hpp"
#include "cowalk/mc_stats.hpp"
#include "cowalk/report.hpp"
#include "cowalk/walk_models.hpp"

namespace cowalk::cli {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inline shorthand, inline JSON, "@path", or a path to a file holding either.
ModelSpec load_model(const std::string& text) {
  if (text.empty()) throw UsageError("--model is required");
  if (text.front() == '@') return validate_model(parse_model(read_file(text.substr(1))));
  std::error_code ec;
  if (text.front() != '{' && std::filesystem::is_regular_file(text, ec)) {
    return validate_model(parse_model(read_file(text)));
  }
  return validate_model(parse_model(text));
}

struct Globals {
  std::string format;
  std::string out_path;
  unsigned threads = 1;
  double significance = kDefaultSignificance;
};

unsigned worker_count(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

OutputFormat format_or(const Globals& g, OutputFormat fallback) {
  return g.format.empty() ? fallback : output_format_from_string(g.format);
}

void write_output(const Globals& g, std::ostream& out, const std::string& content) {
  if (g.out_path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(g.out_path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + g.out_path + "'");
  f << content;
}

int finish_reports(const Globals& g, const ReportSet& set, std::ostream& out, std::ostream& err) {
  const OutputFormat format = format_or(g, OutputFormat::json);
  write_output(g, out, emit_report(set, format));
  if (set.all_as_expected()) return kExitOk;
  // The failure report is always available as JSON.
  if (format != OutputFormat::json || !g.out_path.empty()) err << emit_report(set, OutputFormat::json);
  err << "error: one or more checks failed\n";
  return kExitCheckFailed;
}

std::string aligned(const std::string& csv) {
  std::vector<std::vector<std::string>> rows = read_csv_rows(csv);
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream os;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      line += std::string(width[c] - r[c].size(), ' ') + r[c];
      if (c + 1 < r.size()) line += "  ";
    }
    os << line << '\n';
  }
  return os.str();
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string model;
  std::size_t horizon = 0;
  std::uint64_t reps = 1;
  std::uint64_t seed = 0;
};

int do_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out) {
  const ModelSpec model = load_model(a.model);
  const OutputFormat format = format_or(g, OutputFormat::json);
  nlohmann::json paths = nlohmann::json::array();
  std::ostringstream csv;
  csv << "rep,n,xi,eta,B,W\n";
  for (std::uint64_t r = 0; r < a.reps; ++r) {
    SplitMix64 rng = derive_stream(a.seed, StreamDomain::path, r);
    const JointPath path = simulate(model, a.horizon, rng);
    std::vector<int> xi, eta;
    for (SignPair s : path.pairs()) {
      xi.push_back(s.xi);
      eta.push_back(s.eta);
    }
    for (std::size_t n = 1; n <= path.size(); ++n) {
      csv << r << ',' << n << ',' << xi[n - 1] << ',' << eta[n - 1] << ',' << path.B()[n] << ',' << path.W()[n]
          << '\n';
    }
    paths.push_back({{"rep", r},
                     {"xi", xi},
                     {"eta", eta},
                     {"B", std::vector<int>(path.B().begin() + 1, path.B().end())},
                     {"W", std::vector<int>(path.W().begin() + 1, path.W().end())}});
  }
  std::string content;
  if (format == OutputFormat::json) {
    nlohmann::json doc{{"model", model_to_json(model)}, {"N", a.horizon}, {"seed", a.seed}, {"paths", paths}};
    content = doc.dump(2) + "\n";
  } else if (format == OutputFormat::csv) {
    content = csv.str();
  } else {
    content = aligned(csv.str());
  }
  write_output(g, out, content);
  return kExitOk;
}

// --- decompose --------------------------------------------------------------

struct DecomposeArgs {
  bool table1 = false;
  std::string input;
  std::string timestamp_col, first_col, second_col;
  std::string model;
  std::size_t horizon = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> completion_seed;
};

int do_decompose(const Globals& g, const DecomposeArgs& a, std::ostream& out) {
  const int sources = (a.table1 ? 1 : 0) + (a.input.empty() ? 0 : 1) + (a.model.empty() ? 0 : 1);
  if (sources != 1) throw UsageError("decompose needs exactly one of --from-table1, --input or --model");
  JointPath path;
  if (a.table1) {
    path = table1_path();
  } else if (!a.input.empty()) {
    const auto [s1, s2] = parse_csv(read_file(a.input), {a.timestamp_col, a.first_col, a.second_col});
    path = price_path(s1, s2);
  } else {
    if (!a.seed) throw UsageError("--seed is required when decomposing a simulated path");
    if (a.horizon == 0) throw UsageError("--N must be positive");
    path = simulate(load_model(a.model), a.horizon, *a.seed);
  }
  std::optional<Completion> completion;
  if (a.completion_seed) completion = Completion::from_seed(*a.completion_seed, 0, 0);
  const Decomposition d = decompose(path, completion);

  const OutputFormat format = format_or(g, OutputFormat::csv);
  std::string content;
  if (format == OutputFormat::csv) {
    content = decomposition_csv(path, d);
  } else if (format == OutputFormat::json) {
    content = decomposition_to_json(path, d).dump(2) + "\n";
  } else {
    content = aligned(decomposition_csv(path, d));
  }
  write_output(g, out, content);
  return kExitOk;
}

// --- oracle-check -----------------------------------------------------------

struct OracleArgs {
  std::string model;
  int horizon = 0;
  bool all = false;
  std::vector<std::string> checks;
  int cap = 10;
  std::vector<std::size_t> n_indices;
  std::vector<std::size_t> m_indices;
  std::size_t max_index = 0;
};

int do_oracle(const Globals& g, const OracleArgs& a, std::ostream& out, std::ostream& err) {
  const ModelSpec model = load_model(a.model);
  const bool fair = model.exact() && model.exact_p() == Rational(1, 2);
  for (const auto& c : a.checks) {
    if (c != "total-mass" && c != "sign-symmetry" && c != "halving" && c != "c1" && c != "biased") {
      throw UsageError("unknown check '" + c + "' (total-mass, sign-symmetry, halving, c1, biased)");
    }
    if (!fair && (c == "sign-symmetry" || c == "halving" || c == "c1")) {
      throw UsageError("check '" + c + "' needs a p = 1/2 model");
    }
    if (c == "biased" && fair) throw UsageError("check 'biased' needs a model with p != 1/2");
  }
  EnumerationOptions eo;
  eo.cap = a.cap;
  eo.threads = worker_count(g.threads);
  const ExactLaw law(model, a.horizon, eo);

  ReportSet set;
  OracleSuiteOptions so;
  so.max_index = a.max_index;
  const bool single_tuple = !a.n_indices.empty() || !a.m_indices.empty();
  if (a.all || a.checks.empty()) {
    if (single_tuple) throw UsageError("--n-indices/--m-indices select a tuple for --check halving or c1");
    set.exact = run_oracle_suite(law, so);
  } else {
    const std::size_t max_index = a.max_index ? std::min<std::size_t>(a.max_index, a.horizon)
                                              : static_cast<std::size_t>(a.horizon);
    for (const auto& c : a.checks) {
      if (c == "total-mass") {
        set.exact.push_back(check_total_mass(law));
      } else if (c == "sign-symmetry") {
        set.exact.push_back(check_sign_symmetry_all(law));
      } else if (c == "biased") {
        set.exact.push_back(check_biased_formula_all(law));
      } else if (c == "halving") {
        if (single_tuple) {
          set.exact.push_back(check_halving_recursion(law, a.n_indices, a.m_indices));
        } else {
          for (auto [k, l] : so.halving_shapes) set.exact.push_back(check_halving_suite(law, k, l, max_index));
        }
      } else if (c == "c1") {
        if (single_tuple) {
          set.exact.push_back(check_c1_factorization(law, a.n_indices, a.m_indices));
        } else {
          for (auto [k, l] : so.c1_shapes) set.exact.push_back(check_c1_suite(law, k, l, max_index));
        }
      }
    }
  }
  return finish_reports(g, set, out, err);
}

// --- mc-test ----------------------------------------------------------------

struct McArgs {
  double rho = 0.0;
  std::string model;
  std::size_t k = 3;
  std::size_t l = 3;
  std::size_t pattern_length = 2;
  std::size_t horizon = 64;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> completion_seed;
  std::string emit;
  std::string p;
  std::string theta;
};

McOptions mc_options(const Globals& g, const McArgs& a) {
  McOptions o;
  o.threads = worker_count(g.threads);
  o.completion_seed = a.completion_seed;
  return o;
}

// --- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  std::string input;
  std::string input2;
  std::string timestamp_col, first_col, second_col;
  std::size_t window = 0;
  std::optional<double> synthetic_rho;
  std::size_t steps = 0;
  std::optional<std::uint64_t> seed;
  std::string emit;
};

int do_analyze(const Globals& g, const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  PriceSeries s1, s2;
  if (a.synthetic_rho) {
    if (!a.input.empty()) throw UsageError("--synthetic-rho and --input are exclusive");
    if (!a.seed) throw UsageError("--seed is required with --synthetic-rho");
    if (a.steps == 0) throw UsageError("--steps must be positive with --synthetic-rho");
    std::tie(s1, s2) = synthetic_gaussian_series(*a.synthetic_rho, a.steps, *a.seed);
  } else if (!a.input.empty() && !a.input2.empty()) {
    const PriceSeries x = parse_series_csv(read_file(a.input), a.timestamp_col, a.first_col);
    const PriceSeries y = parse_series_csv(read_file(a.input2), a.timestamp_col, a.second_col);
    std::tie(s1, s2) = inner_join(x, y);
  } else if (!a.input.empty()) {
    std::tie(s1, s2) = parse_csv(read_file(a.input), {a.timestamp_col, a.first_col, a.second_col});
  } else {
    throw UsageError("analyze needs --input (optionally with --input2) or --synthetic-rho");
  }

  if (a.emit == "decomposition") {
    const JointPath path = price_path(s1, s2);
    write_output(g, out, decomposition_csv(path, decompose(path)));
    return kExitOk;
  }
  if (a.emit == "series") {
    write_output(g, out, series_pair_csv(s1, s2));
    return kExitOk;
  }
  if (!a.emit.empty()) throw UsageError("unknown --emit value '" + a.emit + "' (decomposition, series)");
  ReportSet set;
  set.trends.push_back(analyze(s1, s2, a.window));
  return finish_reports(g, set, out, err);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Common decomposition of correlated random walks: simulation, exact checks, tests and data analysis",
               "cowalk"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read option defaults from this file (also COWALK_CONFIG)")->envname("COWALK_CONFIG");

  Globals g;
  app.add_option("--format", g.format, "Output format: json, csv or table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--out", g.out_path, "Write the primary output to this file instead of stdout");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores); results do not depend on it")
      ->capture_default_str();
  app.add_option("--alpha", g.significance, "Significance level for test verdicts")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  const std::string model_help =
      "Model: constant:1/4, q-history:1/4,1/8, adversarial:1/4,2/5,1/10, biased:7/10,1/2, gaussian:0.5, "
      "a JSON object, or a file (@path)";

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate joint paths (B, W)");
  simulate_cmd->add_option("--model", sim.model, model_help)->required();
  simulate_cmd->add_option("--N", sim.horizon, "Horizon")->required()->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--reps", sim.reps, "Number of paths")->capture_default_str()->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim.seed, "Root seed")->required();

  DecomposeArgs dec;
  auto* decompose_cmd = app.add_subcommand("decompose", "Decompose a path into X, Y, T, S and hitting times");
  decompose_cmd->add_flag("--from-table1", dec.table1, "Use the built-in 10-step worked example");
  decompose_cmd->add_option("--input", dec.input, "Price CSV (timestamp and two price columns)");
  decompose_cmd->add_option("--timestamp-col", dec.timestamp_col, "Timestamp column name");
  decompose_cmd->add_option("--first-col", dec.first_col, "First price column name");
  decompose_cmd->add_option("--second-col", dec.second_col, "Second price column name");
  decompose_cmd->add_option("--model", dec.model, model_help);
  decompose_cmd->add_option("--N", dec.horizon, "Horizon of the simulated path");
  decompose_cmd->add_option("--seed", dec.seed, "Root seed of the simulated path");
  decompose_cmd->add_option("--completion-seed", dec.completion_seed,
                            "Fill unreached X/Y entries with fair signs from this seed");

  OracleArgs orc;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Exact finite-horizon identity checks by enumeration");
  oracle_cmd->add_option("--model", orc.model, model_help)->required();
  oracle_cmd->add_option("--N", orc.horizon, "Horizon")->required()->check(CLI::Range(1, kMaxEnumerationHorizon));
  oracle_cmd->add_flag("--all", orc.all, "Run every applicable check (default when no --check is given)");
  oracle_cmd->add_option("--check", orc.checks, "total-mass, sign-symmetry, halving, c1 or biased (repeatable)");
  oracle_cmd->add_option("--cap", orc.cap, "Largest horizon accepted")->capture_default_str();
  oracle_cmd->add_option("--n-indices", orc.n_indices, "Increasing alpha indices for a single halving/c1 tuple");
  oracle_cmd->add_option("--m-indices", orc.m_indices, "Increasing beta indices for a single halving/c1 tuple");
  oracle_cmd->add_option("--max-index", orc.max_index, "Largest index in tuple suites (default N)");

  McArgs mc;
  auto* mc_cmd = app.add_subcommand("mc-test", "Monte Carlo tests");
  mc_cmd->require_subcommand(1);
  auto* delta_cmd = mc_cmd->add_subcommand("delta-t", "Frequency of common moves under the Gaussian driver");
  delta_cmd->add_option("--rho", mc.rho, "Correlation")->required()->check(CLI::Range(-1.0, 1.0));
  delta_cmd->add_option("--reps", mc.reps, "Steps")->required()->check(CLI::PositiveNumber);
  delta_cmd->add_option("--seed", mc.seed, "Root seed")->required();

  auto* block_cmd = mc_cmd->add_subcommand("block-pmf", "Chi-square uniformity of the first k X and l Y signs");
  block_cmd->add_option("--model", mc.model, model_help)->required();
  block_cmd->add_option("--k", mc.k, "X increments")->capture_default_str();
  block_cmd->add_option("--l", mc.l, "Y increments")->capture_default_str();
  block_cmd->add_option("--N", mc.horizon, "Horizon")->capture_default_str()->check(CLI::PositiveNumber);
  block_cmd->add_option("--reps", mc.reps, "Replications")->required()->check(CLI::PositiveNumber);
  block_cmd->add_option("--seed", mc.seed, "Root seed")->required();
  block_cmd->add_option("--completion-seed", mc.completion_seed, "Root of the completion streams (default --seed)");
  block_cmd->add_option("--emit", mc.emit, "plotdata: CSV of cell frequencies and targets")
      ->check(CLI::IsMember({"plotdata"}));

  auto* indep_cmd = mc_cmd->add_subcommand("independence", "G-test of sign block vs initial Q-pattern");
  indep_cmd->add_option("--model", mc.model, model_help)->required();
  indep_cmd->add_option("--k", mc.k, "X increments")->capture_default_str();
  indep_cmd->add_option("--l", mc.l, "Y increments")->capture_default_str();
  indep_cmd->add_option("--pattern-length", mc.pattern_length, "Q-pattern length")->capture_default_str();
  indep_cmd->add_option("--N", mc.horizon, "Horizon")->capture_default_str()->check(CLI::PositiveNumber);
  indep_cmd->add_option("--reps", mc.reps, "Replications")->required()->check(CLI::PositiveNumber);
  indep_cmd->add_option("--seed", mc.seed, "Root seed")->required();
  indep_cmd->add_option("--completion-seed", mc.completion_seed, "Root of the completion streams (default --seed)");

  auto* biased_cmd = mc_cmd->add_subcommand("biased", "Trend of X and fairness of Y under a biased model");
  biased_cmd->add_option("--p", mc.p, "P(xi = +1), rational or decimal")->required();
  biased_cmd->add_option("--theta", mc.theta, "P(xi = eta = +1), rational or decimal")->required();
  biased_cmd->add_option("--N", mc.horizon, "Horizon")->capture_default_str()->check(CLI::PositiveNumber);
  biased_cmd->add_option("--reps", mc.reps, "Replications")->required()->check(CLI::PositiveNumber);
  biased_cmd->add_option("--seed", mc.seed, "Root seed")->required();
  biased_cmd->add_option("--completion-seed", mc.completion_seed, "Root of the completion streams (default --seed)");

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Trend and co-movement report for two price series");
  analyze_cmd->add_option("--input", an.input, "CSV with a timestamp and two price columns, or the first series");
  analyze_cmd->add_option("--input2", an.input2, "Second series file; the two are inner-joined on timestamps");
  analyze_cmd->add_option("--timestamp-col", an.timestamp_col, "Timestamp column name");
  analyze_cmd->add_option("--first-col", an.first_col, "First price column name");
  analyze_cmd->add_option("--second-col", an.second_col, "Second price column name");
  analyze_cmd->add_option("--window", an.window, "Trailing window in steps (default: all)");
  analyze_cmd->add_option("--synthetic-rho", an.synthetic_rho, "Generate Gaussian-driven series with this correlation")
      ->check(CLI::Range(-1.0, 1.0));
  analyze_cmd->add_option("--steps", an.steps, "Steps of the synthetic series");
  analyze_cmd->add_option("--seed", an.seed, "Root seed of the synthetic series");
  analyze_cmd->add_option("--emit", an.emit, "decomposition: Table-1 style CSV; series: the price CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate_cmd->parsed()) return do_simulate(g, sim, out);
    if (decompose_cmd->parsed()) return do_decompose(g, dec, out);
    if (oracle_cmd->parsed()) return do_oracle(g, orc, out, err);
    if (analyze_cmd->parsed()) return do_analyze(g, an, out, err);
    if (mc_cmd->parsed()) {
      const McOptions options = mc_options(g, mc);
      ReportSet set;
      if (delta_cmd->parsed()) {
        set.tests.push_back(estimate_delta_T(mc.rho, mc.reps, mc.seed, g.significance));
      } else if (block_cmd->parsed()) {
        const ModelSpec model = load_model(mc.model);
        const BlockCounts counts = mc_block_pmf(model, mc.k, mc.l, mc.horizon, mc.reps, mc.seed, options);
        if (mc.emit == "plotdata") {
          write_output(g, out, block_plotdata_csv(counts));
          return kExitOk;
        }
        TestReport r = chi_square_uniform(counts, g.significance);
        r.model = model.describe();
        set.tests.push_back(std::move(r));
      } else if (indep_cmd->parsed()) {
        const ModelSpec model = load_model(mc.model);
        TestReport r = independence_test_xyt(model, mc.k, mc.l, mc.pattern_length, mc.horizon, mc.reps, mc.seed,
                                             g.significance, options);
        set.tests.push_back(std::move(r));
      } else if (biased_cmd->parsed()) {
        const auto reports = biased_walk_tests(parse_rational(mc.p), parse_rational(mc.theta), mc.horizon, mc.reps,
                                               mc.seed, g.significance, options);
        set.tests.push_back(reports.x_bias);
        set.tests.push_back(reports.y_fairness);
      }
      return finish_reports(g, set, out, err);
    }
  } catch (const InsufficientSamples& e) {
    err << "error: refused: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace cowalk::cli
