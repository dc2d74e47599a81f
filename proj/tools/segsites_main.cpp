#include <cmath>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "segsites/asymptotics.hpp"
#include "segsites/cumulants.hpp"
#include "segsites/errors.hpp"
#include "segsites/io.hpp"
#include "segsites/numeric.hpp"
#include "segsites/params.hpp"
#include "segsites/sim.hpp"
#include "segsites/special_functions.hpp"
#include "segsites/verify.hpp"
#include "segsites/version.hpp"

namespace {

namespace io = segsites::io;
using segsites::MutationParams;

using Params = std::vector<std::pair<std::string, std::string>>;

std::string fd(double x) { return io::format_double(x); }

// CSV cells are never quoted, so free-text details drop their commas.
std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n') c = ';';
  }
  return s;
}

std::string render(const io::Table& table, const std::string& format) {
  return format == "json" ? io::to_json(table) : io::to_csv(table);
}

// Data goes to --out (or stdout when empty); the manifest goes alongside as
// <out>.manifest.json (or to stderr so stdout stays parseable).
void emit(const std::string& content, const std::string& out,
          const io::RunManifest& manifest) {
  const std::string manifest_json = io::to_json(manifest);
  if (out.empty()) {
    std::cout << content;
    std::cerr << manifest_json;
  } else {
    io::write_file(out, content);
    io::write_file(out + ".manifest.json", manifest_json);
  }
}

struct CumulantsArgs {
  int n = 0;
  double theta = 1.0;
  int max_order = 4;
  std::string format = "csv";
  std::string out;
};

void run_cumulants(const CumulantsArgs& args) {
  const MutationParams params{args.theta, args.n};
  params.validate();
  if (args.max_order < 1) {
    throw std::invalid_argument("--max-order must be at least 1");
  }
  io::Table table;
  table.header = {"order", "polylog_form", "stirling_harmonic_form",
                  "relative_difference"};
  for (int i = 1; i <= args.max_order; ++i) {
    const auto forms = segsites::cumulants::segsites_cumulant_forms(params, i);
    segsites::cumulants::segsites_cumulant(params, i);  // integrity check
    table.rows.push_back({std::to_string(i), fd(forms.polylog_sum),
                          fd(forms.stirling_harmonic),
                          fd(segsites::relative_difference(
                              forms.polylog_sum, forms.stirling_harmonic))});
  }
  emit(render(table, args.format), args.out,
       io::make_manifest("cumulants", {{"n", std::to_string(args.n)},
                                       {"theta", fd(args.theta)},
                                       {"max_order",
                                        std::to_string(args.max_order)},
                                       {"format", args.format},
                                       {"out", args.out}}));
}

struct PmfArgs {
  int n = 0;
  double theta = 1.0;
  double mass_cutoff = 1e-6;
  std::string format = "csv";
  std::string out;
};

void run_pmf(const PmfArgs& args) {
  const MutationParams params{args.theta, args.n};
  params.validate();
  if (!(args.mass_cutoff > 0.0 && args.mass_cutoff < 1.0)) {
    throw std::invalid_argument("--mass-cutoff must lie in (0, 1)");
  }
  io::Table table;
  table.header = {"m", "pmf", "cumulative", "cancellation", "precision_ok"};
  segsites::CompensatedSum cumulative;
  bool precision_lost = false;
  bool tail_bounded = false;
  std::uint64_t m = 0;
  while (cumulative.value() < 1.0 - args.mass_cutoff) {
    if (m > 50'000'000) {
      throw segsites::truncation_error(
          "pmf cumulative failed to reach 1 - mass_cutoff by m = " +
          std::to_string(m));
    }
    const auto r = segsites::cumulants::segsites_pmf(params, m);
    cumulative.add(r.value);
    precision_lost = precision_lost || !r.precision_ok;
    table.rows.push_back({std::to_string(m), fd(r.value),
                          fd(cumulative.value()), fd(r.cancellation),
                          r.precision_ok ? "true" : "false"});
    // Cancellation noise can pin the computed cumulative permanently below
    // the cutoff even though the exact mass is exhausted; once the rigorous
    // tail bound is safely below the cutoff, the exact cumulative has
    // passed 1 - cutoff and emission stops.
    if (cumulative.value() < 1.0 - args.mass_cutoff &&
        segsites::cumulants::segsites_pmf_tail_bound(params, m) <
            0.5 * args.mass_cutoff) {
      tail_bounded = true;
      ++m;
      break;
    }
    ++m;
  }
  if (precision_lost) {
    std::cerr << "warning: alternating-sum cancellation exceeded "
              << fd(segsites::cumulants::kPmfCancellationLimit)
              << "; rows with precision_ok=false are unreliable\n";
  }
  if (tail_bounded) {
    std::cerr << "warning: stopped at m = " << m - 1
              << ": the exact tail is below the cutoff but the computed "
                 "cumulative column is noise-limited at "
              << fd(cumulative.value()) << "\n";
  }
  emit(render(table, args.format), args.out,
       io::make_manifest("pmf", {{"n", std::to_string(args.n)},
                                 {"theta", fd(args.theta)},
                                 {"mass_cutoff", fd(args.mass_cutoff)},
                                 {"format", args.format},
                                 {"out", args.out}}));
}

struct PgfArgs {
  int n = 0;
  double theta = 1.0;
  std::vector<double> s{0.0, 0.25, 0.5, 0.75, 1.0};
  std::string format = "csv";
  std::string out;
};

void run_pgf(const PgfArgs& args) {
  const MutationParams params{args.theta, args.n};
  params.validate();
  io::Table table;
  table.header = {"s", "pgf"};
  for (double s : args.s) {
    table.rows.push_back(
        {fd(s), fd(segsites::cumulants::segsites_pgf(params, s))});
  }
  std::string s_list;
  for (std::size_t i = 0; i < args.s.size(); ++i) {
    if (i > 0) s_list += ' ';
    s_list += fd(args.s[i]);
  }
  emit(render(table, args.format), args.out,
       io::make_manifest("pgf", {{"n", std::to_string(args.n)},
                                 {"theta", fd(args.theta)},
                                 {"s", s_list},
                                 {"format", args.format},
                                 {"out", args.out}}));
}

struct SimulateArgs {
  int n = 0;
  double theta = 1.0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  std::string method = "geometric-sum";
  std::string counts_format = "text";
  std::string out;
};

void run_simulate(const SimulateArgs& args) {
  const segsites::sim::SimConfig config{
      MutationParams{args.theta, args.n}, args.replicates, args.seed,
      segsites::sim::parse_method(args.method)};
  config.validate();
  if (config.replicates < 4) {
    throw std::invalid_argument(
        "--replicates must be at least 4 (the summary estimates cumulants "
        "through order 4)");
  }

  const auto batch = segsites::sim::simulate(config);
  const auto stats = segsites::sim::summarize(batch);
  const double mean = segsites::cumulants::segsites_mean(config.params);
  const double var = segsites::cumulants::segsites_var(config.params);
  const double z_mean =
      stats.se_mean > 0.0 ? (stats.mean - mean) / stats.se_mean
                          : std::numeric_limits<double>::quiet_NaN();
  const double z_var =
      stats.se_k2 > 0.0 ? (stats.variance - var) / stats.se_k2
                        : std::numeric_limits<double>::quiet_NaN();

  std::string counts;
  if (args.counts_format == "binary") {
    counts.resize(batch.counts.size() * sizeof(std::uint64_t));
    std::memcpy(counts.data(), batch.counts.data(), counts.size());
  } else {
    for (std::uint64_t c : batch.counts) {
      counts += std::to_string(c);
      counts.push_back('\n');
    }
  }
  io::write_file(args.out, counts);

  nlohmann::ordered_json summary;
  summary["config"] = {{"n", config.params.n},
                       {"theta", config.params.theta},
                       {"replicates", config.replicates},
                       {"seed", config.seed},
                       {"method", segsites::sim::method_name(config.method)}};
  summary["stats"] = {{"mean", stats.mean},       {"variance", stats.variance},
                      {"k3", stats.k3},           {"k4", stats.k4},
                      {"se_mean", stats.se_mean}, {"se_k2", stats.se_k2},
                      {"se_k3", stats.se_k3},     {"se_k4", stats.se_k4}};
  summary["analytic"] = {{"mean", mean}, {"variance", var}};
  summary["comparison"] = {{"z_mean", z_mean}, {"z_variance", z_var}};
  io::write_file(args.out + ".summary.json", summary.dump(2) + "\n");

  const auto manifest = io::make_manifest(
      "simulate", {{"n", std::to_string(args.n)},
                   {"theta", fd(args.theta)},
                   {"replicates", std::to_string(args.replicates)},
                   {"seed", std::to_string(args.seed)},
                   {"method", args.method},
                   {"counts_format", args.counts_format},
                   {"out", args.out}});
  io::write_file(args.out + ".manifest.json", io::to_json(manifest));

  std::cout << "replicates " << stats.replicates << "\n"
            << "mean " << fd(stats.mean) << " vs analytic " << fd(mean)
            << " (z = " << fd(z_mean) << ")\n"
            << "variance " << fd(stats.variance) << " vs analytic " << fd(var)
            << " (z = " << fd(z_var) << ")\n";
}

struct VerifyArgs {
  std::string level = "fast";
  std::string format = "csv";
  std::string out;
  bool inject_stirling_fault = false;
};

int run_verify(const VerifyArgs& args) {
  using segsites::verify::Level;
  if (args.level != "fast" && args.level != "full") {
    throw std::invalid_argument("--level must be fast or full");
  }
  if (args.inject_stirling_fault) {
    // Doubles {8, 3} = 966: every identity built on Stirling numbers must
    // notice. Exists so the failure path itself stays tested.
    segsites::special::stirling_table().perturb(8, 3, 966);
  }
  const auto results = segsites::verify::run_checks(
      args.level == "full" ? Level::full : Level::fast,
      [](const segsites::verify::CheckResult& r) {
        std::cerr << (r.passed ? "ok   " : "FAIL ") << r.name << "\n";
      });
  if (args.inject_stirling_fault) {
    segsites::special::stirling_table().reset_perturbations();
  }
  io::Table table;
  table.header = {"check", "status", "detail"};
  for (const auto& r : results) {
    table.rows.push_back(
        {r.name, r.passed ? "pass" : "fail", csv_safe(r.detail)});
  }
  emit(render(table, args.format), args.out,
       io::make_manifest(
           "verify",
           {{"level", args.level},
            {"format", args.format},
            {"out", args.out},
            {"inject_stirling_fault",
             args.inject_stirling_fault ? "true" : "false"}}));
  return segsites::verify::all_passed(results) ? 0 : 3;
}

struct AsymptoticsArgs {
  double theta = 1.0;
  std::string grid = "2^1..2^20";
  int max_order = 4;
  std::string format = "csv";
  std::string out;
  bool clt_check = false;
  int n = 1000;
  std::uint64_t replicates = 1'000'000;
  std::uint64_t seed = 0;
};

std::vector<int> parse_grid(const std::string& spec) {
  std::vector<int> grid;
  const auto range = spec.find("..");
  auto parse_n = [](const std::string& tok) -> long long {
    std::size_t pos = 0;
    long long value;
    if (tok.rfind("2^", 0) == 0) {
      const long long e = std::stoll(tok.substr(2), &pos);
      if (pos + 2 != tok.size() || e < 0 || e > 30) {
        throw std::invalid_argument("bad grid exponent '" + tok + "'");
      }
      return 1ll << e;
    }
    value = std::stoll(tok, &pos);
    if (pos != tok.size()) {
      throw std::invalid_argument("bad grid entry '" + tok + "'");
    }
    return value;
  };
  try {
    if (range != std::string::npos) {
      const long long lo = parse_n(spec.substr(0, range));
      const long long hi = parse_n(spec.substr(range + 2));
      if (spec.rfind("2^", 0) != 0 || spec.find("2^", range) == std::string::npos) {
        throw std::invalid_argument("range grids use the form 2^a..2^b");
      }
      for (long long v = lo; v <= hi; v *= 2) grid.push_back(static_cast<int>(v));
    } else {
      std::size_t start = 0;
      while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        const std::string tok =
            spec.substr(start, comma == std::string::npos ? std::string::npos
                                                          : comma - start);
        if (tok.empty()) throw std::invalid_argument("empty grid entry");
        grid.push_back(static_cast<int>(parse_n(tok)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("could not parse --grid '" + spec +
                                "'; use 2^a..2^b or a comma-separated list");
  }
  return grid;
}

void run_asymptotics(const AsymptoticsArgs& args) {
  if (args.clt_check) {
    const auto report = segsites::asymptotics::monte_carlo_clt_check(
        args.theta, args.n, args.replicates, args.seed);
    nlohmann::ordered_json doc;
    doc["replicates"] = report.replicates;
    doc["ks_distance"] = report.ks_distance;
    doc["skewness"] = report.skewness;
    doc["excess_kurtosis"] = report.excess_kurtosis;
    doc["analytic_skewness"] = report.analytic_skewness;
    doc["analytic_excess_kurtosis"] = report.analytic_excess_kurtosis;
    emit(doc.dump(2) + "\n", args.out,
         io::make_manifest("asymptotics",
                           {{"clt_check", "true"},
                            {"theta", fd(args.theta)},
                            {"n", std::to_string(args.n)},
                            {"replicates", std::to_string(args.replicates)},
                            {"seed", std::to_string(args.seed)},
                            {"out", args.out}}));
    return;
  }

  const auto grid = parse_grid(args.grid);
  const auto lln = segsites::asymptotics::lln_table(args.theta, grid);
  const auto clt =
      segsites::asymptotics::clt_table(args.theta, grid, args.max_order);

  io::Table lln_table;
  lln_table.header = {"n", "sigma2", "asymptote", "ratio"};
  for (const auto& row : lln) {
    lln_table.rows.push_back({std::to_string(row.n), fd(row.sigma2),
                              fd(row.asymptote), fd(row.ratio)});
  }
  io::Table clt_table;
  clt_table.header = {"n"};
  for (int i = 3; i <= args.max_order; ++i) {
    clt_table.header.push_back("normalized_k" + std::to_string(i));
    clt_table.header.push_back("comparator_k" + std::to_string(i));
  }
  for (const auto& row : clt) {
    std::vector<std::string> cells{std::to_string(row.n)};
    for (std::size_t j = 0; j < row.normalized.size(); ++j) {
      cells.push_back(fd(row.normalized[j]));
      cells.push_back(fd(row.comparator[j]));
    }
    clt_table.rows.push_back(std::move(cells));
  }

  const auto manifest = io::make_manifest(
      "asymptotics", {{"theta", fd(args.theta)},
                      {"grid", args.grid},
                      {"max_order", std::to_string(args.max_order)},
                      {"format", args.format},
                      {"out", args.out}});
  if (args.out.empty()) {
    std::cout << "# lln\n"
              << render(lln_table, args.format) << "# clt\n"
              << render(clt_table, args.format);
    std::cerr << io::to_json(manifest);
  } else {
    const std::string ext = args.format == "json" ? ".json" : ".csv";
    io::write_file(args.out + ".lln" + ext, render(lln_table, args.format));
    io::write_file(args.out + ".clt" + ext, render(clt_table, args.format));
    io::write_file(args.out + ".manifest.json", io::to_json(manifest));
  }
}

struct WattersonArgs {
  std::uint64_t s_observed = 0;
  int n = 0;
  std::string format = "csv";
  std::string out;
};

void run_watterson(const WattersonArgs& args) {
  MutationParams{1.0, args.n}.validate();
  const double estimate =
      segsites::cumulants::watterson_estimator(args.s_observed, args.n);
  io::Table table;
  table.header = {"s_observed", "n", "harmonic_n_minus_1", "theta_hat"};
  table.rows.push_back(
      {std::to_string(args.s_observed), std::to_string(args.n),
       fd(segsites::special::harmonic(
           static_cast<std::uint64_t>(args.n) - 1, 1)),
       fd(estimate)});
  emit(render(table, args.format), args.out,
       io::make_manifest("watterson",
                         {{"s_observed", std::to_string(args.s_observed)},
                          {"n", std::to_string(args.n)},
                          {"format", args.format},
                          {"out", args.out}}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Exact cumulants, pmf, and pgf of the number of segregating sites "
      "under the Kingman coalescent, with a seeded simulator and a "
      "self-verification suite"};
  app.set_version_flag("--version", segsites::kVersion);
  app.require_subcommand(1);
  int exit_code = 0;

  auto add_format = [](CLI::App* cmd, std::string& target) {
    cmd->add_option("--format", target, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  CumulantsArgs cumulants_args;
  auto* cmd_cumulants = app.add_subcommand(
      "cumulants", "Cumulants of S_n by both analytic forms");
  cmd_cumulants->add_option("--n", cumulants_args.n, "Sample size (>= 2)")
      ->required();
  cmd_cumulants
      ->add_option("--theta", cumulants_args.theta, "Scaled mutation rate")
      ->capture_default_str();
  cmd_cumulants
      ->add_option("--max-order", cumulants_args.max_order,
                   "Highest cumulant order")
      ->capture_default_str();
  add_format(cmd_cumulants, cumulants_args.format);
  cmd_cumulants->add_option("--out", cumulants_args.out,
                            "Write here instead of stdout");
  cmd_cumulants->callback([&] { run_cumulants(cumulants_args); });

  PmfArgs pmf_args;
  auto* cmd_pmf = app.add_subcommand(
      "pmf", "Probability mass function of S_n until the cumulative mass "
             "reaches 1 - mass-cutoff");
  cmd_pmf->add_option("--n", pmf_args.n, "Sample size (>= 2)")->required();
  cmd_pmf->add_option("--theta", pmf_args.theta, "Scaled mutation rate")
      ->capture_default_str();
  cmd_pmf
      ->add_option("--mass-cutoff", pmf_args.mass_cutoff,
                   "Stop once this much mass remains")
      ->capture_default_str();
  add_format(cmd_pmf, pmf_args.format);
  cmd_pmf->add_option("--out", pmf_args.out, "Write here instead of stdout");
  cmd_pmf->callback([&] { run_pmf(pmf_args); });

  PgfArgs pgf_args;
  auto* cmd_pgf = app.add_subcommand(
      "pgf", "Probability generating function E s^{S_n}");
  cmd_pgf->add_option("--n", pgf_args.n, "Sample size (>= 2)")->required();
  cmd_pgf->add_option("--theta", pgf_args.theta, "Scaled mutation rate")
      ->capture_default_str();
  cmd_pgf->add_option("s", pgf_args.s,
                      "Evaluation points (default 0 0.25 0.5 0.75 1)");
  add_format(cmd_pgf, pgf_args.format);
  cmd_pgf->add_option("--out", pgf_args.out, "Write here instead of stdout");
  cmd_pgf->callback([&] { run_pgf(pgf_args); });

  SimulateArgs sim_args;
  auto* cmd_simulate = app.add_subcommand(
      "simulate", "Draw replicates of S_n and summarize them against the "
                  "analytic moments");
  cmd_simulate->add_option("--n", sim_args.n, "Sample size (>= 2)")
      ->required();
  cmd_simulate->add_option("--theta", sim_args.theta, "Scaled mutation rate")
      ->capture_default_str();
  cmd_simulate
      ->add_option("--replicates", sim_args.replicates,
                   "Number of replicates (>= 4)")
      ->required();
  cmd_simulate->add_option("--seed", sim_args.seed, "Philox seed")
      ->envname("SEGSITES_SEED")
      ->capture_default_str();
  cmd_simulate
      ->add_option("--method", sim_args.method,
                   "geometric-sum, exponential-mixture, or full-tree")
      ->capture_default_str();
  cmd_simulate
      ->add_option("--counts-format", sim_args.counts_format,
                   "Replicate file layout")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();
  cmd_simulate
      ->add_option("--out", sim_args.out,
                   "Counts file; summary and manifest are written alongside")
      ->required();
  cmd_simulate->callback([&] { run_simulate(sim_args); });

  VerifyArgs verify_args;
  auto* cmd_verify = app.add_subcommand(
      "verify", "Run the self-verification suite (fast: identities; full: "
                "adds the Monte Carlo suites)");
  cmd_verify->add_option("--level", verify_args.level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}))
      ->capture_default_str();
  add_format(cmd_verify, verify_args.format);
  cmd_verify->add_option("--out", verify_args.out,
                         "Write here instead of stdout");
  cmd_verify
      ->add_flag("--inject-stirling-fault", verify_args.inject_stirling_fault,
                 "Corrupt one Stirling entry to prove the suite detects it")
      ->group("");  // hidden test hook
  cmd_verify->callback([&] { exit_code = run_verify(verify_args); });

  AsymptoticsArgs asym_args;
  auto* cmd_asymptotics = app.add_subcommand(
      "asymptotics", "Law-of-large-numbers and CLT diagnostic tables");
  cmd_asymptotics
      ->add_option("--theta", asym_args.theta, "Scaled mutation rate")
      ->capture_default_str();
  cmd_asymptotics
      ->add_option("--grid", asym_args.grid,
                   "Sample sizes: 2^a..2^b or a comma-separated list")
      ->capture_default_str();
  cmd_asymptotics
      ->add_option("--max-order", asym_args.max_order,
                   "Highest normalized cumulant order (>= 3)")
      ->capture_default_str();
  add_format(cmd_asymptotics, asym_args.format);
  cmd_asymptotics->add_option(
      "--out", asym_args.out,
      "Prefix for <out>.lln.csv, <out>.clt.csv, <out>.manifest.json");
  cmd_asymptotics->add_flag(
      "--clt-check", asym_args.clt_check,
      "Instead of tables, simulate S_n and report the KS distance of the "
      "standardized counts from the normal (JSON)");
  cmd_asymptotics->add_option("--n", asym_args.n, "Sample size for --clt-check")
      ->capture_default_str();
  cmd_asymptotics
      ->add_option("--replicates", asym_args.replicates,
                   "Replicates for --clt-check")
      ->capture_default_str();
  cmd_asymptotics->add_option("--seed", asym_args.seed, "Seed for --clt-check")
      ->envname("SEGSITES_SEED")
      ->capture_default_str();
  cmd_asymptotics->callback([&] { run_asymptotics(asym_args); });

  WattersonArgs watterson_args;
  auto* cmd_watterson = app.add_subcommand(
      "watterson", "Watterson's estimator s / H_{n-1}");
  cmd_watterson
      ->add_option("s_observed", watterson_args.s_observed,
                   "Observed number of segregating sites")
      ->required();
  cmd_watterson->add_option("--n", watterson_args.n, "Sample size (>= 2)")
      ->required();
  add_format(cmd_watterson, watterson_args.format);
  cmd_watterson->add_option("--out", watterson_args.out,
                            "Write here instead of stdout");
  cmd_watterson->callback([&] { run_watterson(watterson_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const io::io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const segsites::truncation_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  } catch (const segsites::integrity_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  } catch (const segsites::capacity_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  }
  return exit_code;
}
