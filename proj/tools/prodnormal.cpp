// prodnormal: point evaluations, table reproduction and simulation runs for the
// product of two correlated normal variables.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <prodnormal/asymptotics.hpp>
#include <prodnormal/cdf.hpp>
#include <prodnormal/errors.hpp>
#include <prodnormal/exact.hpp>
#include <prodnormal/montecarlo.hpp>
#include <prodnormal/output.hpp>
#include <prodnormal/risk.hpp>
#include <prodnormal/tables.hpp>

namespace {

using namespace prodnormal;
using output::Method;
using output::OutputRecord;
using output::Quantity;

constexpr int exit_invalid = 2;
constexpr int exit_strict = 3;
constexpr int exit_resource = 4;

struct ParamFlags {
  double mu_x = 0, mu_y = 0, sigma_x = 1, sigma_y = 1, rho = 0;

  void attach(CLI::App& cmd) {
    cmd.add_option("--mu-x", mu_x, "Mean of X")->capture_default_str();
    cmd.add_option("--mu-y", mu_y, "Mean of Y")->capture_default_str();
    cmd.add_option("--sigma-x", sigma_x, "Standard deviation of X")->capture_default_str();
    cmd.add_option("--sigma-y", sigma_y, "Standard deviation of Y")->capture_default_str();
    cmd.add_option("--rho", rho, "Correlation of X and Y")->capture_default_str();
  }
  ProductParams build() const { return {mu_x, mu_y, sigma_x, sigma_y, rho}; }
};

struct SimFlags {
  std::uint64_t n = 10'000'000;
  std::uint64_t seed = 0;
  unsigned chunks = 0;
  std::uint64_t max_block_values = montecarlo::SimulationConfig{}.max_block_values;

  void attach(CLI::App& cmd, std::uint64_t default_n) {
    n = default_n;
    cmd.add_option("--n", n, "Number of samples")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--seed", seed, "Generator seed")->capture_default_str();
    cmd.add_option("--chunks", chunks, "Independent substreams (0: hardware parallelism)")
        ->capture_default_str();
    cmd.add_option("--max-block-values", max_block_values, "Memory budget for order-statistic blocks")
        ->capture_default_str();
  }
  montecarlo::SimulationConfig config() const {
    montecarlo::SimulationConfig c;
    c.n_samples = n;
    c.seed = seed;
    c.n_chunks = chunks;
    c.max_block_values = max_block_values;
    return c;
  }
};

struct Writer {
  std::string format;
  std::ostream& os;
  bool header_done = false;

  void operator()(const OutputRecord& r) {
    if (format == "json") {
      output::write_json(os, r);
    } else if (format == "human") {
      output::write_human(os, r);
    } else {
      if (!header_done) os << output::csv_header << '\n';
      header_done = true;
      output::write_csv(os, r);
    }
  }
};

void check_level(double p) {
  if (!(p > 0 && p < 1)) throw domain_error("probability level must lie in (0, 1)");
}

asymptotics::ApproxValidity invalid(std::string reason) { return {false, std::move(reason), ""}; }

OutputRecord eval_exact(const ProductParams& prm, Quantity q, double in, const TruncationPolicy& pol) {
  OutputRecord r{Method::exact, q, prm, in, 0, {}, std::nullopt};
  switch (q) {
    case Quantity::pdf:
      if (in == 0) {
        r.validity = invalid("density is unbounded at 0");
        break;
      }
      r.diagnostics = exact::pdf_exact(prm, in, pol);
      r.value = r.diagnostics->value;
      break;
    case Quantity::cdf: r.value = exact::cdf(prm, in, pol); break;
    case Quantity::survival: r.value = exact::survival(prm, in, pol); break;
    case Quantity::quantile:
    case Quantity::var: r.value = risk::quantile_numeric(prm, {in}); break;
    case Quantity::tvar: r.value = risk::tvar_numeric(prm, {in}); break;
  }
  return r;
}

OutputRecord eval_asymptotic(const ProductParams& prm, Quantity q, double in) {
  using asymptotics::TailSide;
  OutputRecord r{Method::asymptotic, q, prm, in, 0, {}, std::nullopt};
  asymptotics::Approx a;
  const TailSide side = in >= 0 ? TailSide::right : TailSide::left;
  switch (q) {
    case Quantity::pdf: a = asymptotics::pdf_asym(prm, in, side); break;
    case Quantity::cdf:
    case Quantity::survival: {
      a = asymptotics::tail_asym(prm, in, side);
      // The formula gives the mass beyond x on its own side.
      const bool direct = (q == Quantity::survival) == (side == TailSide::right);
      if (a.validity.valid && !direct) a.value = 1 - a.value;
      break;
    }
    case Quantity::quantile: a = asymptotics::quantile_asym(prm, in); break;
    case Quantity::var: a = asymptotics::var_asym(prm, in); break;
    case Quantity::tvar: a = asymptotics::tvar_asym(prm, in); break;
  }
  r.value = a.value;
  r.validity = a.validity;
  return r;
}

std::vector<OutputRecord> eval_mc(const ProductParams& prm, Quantity q, const std::vector<double>& inputs,
                                  montecarlo::SimulationConfig cfg) {
  std::vector<OutputRecord> out;
  if (q == Quantity::pdf) {
    for (double in : inputs)
      out.push_back({Method::mc, q, prm, in, 0, invalid("no Monte Carlo density estimator"), std::nullopt});
    return out;
  }
  (output::takes_level(q) ? cfg.levels : cfg.thresholds) = inputs;
  const auto s = montecarlo::simulate(prm, cfg);
  for (double in : inputs) {
    OutputRecord r{Method::mc, q, prm, in, 0, {}, std::nullopt};
    switch (q) {
      case Quantity::survival: r.value = montecarlo::empirical_tail_prob(s, in); break;
      case Quantity::cdf: r.value = 1 - montecarlo::empirical_tail_prob(s, in); break;
      case Quantity::quantile:
      case Quantity::var: r.value = montecarlo::empirical_quantile(s, in); break;
      case Quantity::tvar: r.value = montecarlo::empirical_tvar(s, in); break;
      case Quantity::pdf: break;
    }
    out.push_back(r);
  }
  return out;
}

int run_eval(const ParamFlags& pf, const std::string& quantity, const std::string& method,
             const std::vector<double>& xs, const std::vector<double>& ps, int n_max, double tol,
             const SimFlags& sim, const std::string& format, bool strict) {
  static const std::map<std::string, Quantity> quantities{
      {"pdf", Quantity::pdf},           {"cdf", Quantity::cdf}, {"survival", Quantity::survival},
      {"quantile", Quantity::quantile}, {"var", Quantity::var}, {"tvar", Quantity::tvar}};
  const Quantity q = quantities.at(quantity);
  const auto prm = pf.build();
  const bool level = output::takes_level(q);
  const auto& inputs = level ? ps : xs;
  if (inputs.empty()) throw domain_error(level ? "--p is required for this quantity" : "--x is required for this quantity");
  if (level)
    for (double p : inputs) check_level(p);
  TruncationPolicy pol;
  pol.n_max = n_max;
  pol.rel_tol = tol;

  std::vector<OutputRecord> recs;
  if (method == "mc") {
    recs = eval_mc(prm, q, inputs, sim.config());
  } else {
    for (double in : inputs)
      recs.push_back(method == "exact" ? eval_exact(prm, q, in, pol) : eval_asymptotic(prm, q, in));
  }
  Writer w{format, std::cout};
  bool any_invalid = false;
  for (const auto& r : recs) {
    w(r);
    any_invalid = any_invalid || !r.validity.valid;
  }
  return strict && method == "asymptotic" && any_invalid ? exit_strict : 0;
}

int run_tables(int table, const std::string& scale, std::vector<int> rows, const SimFlags& sim,
               const std::string& out_path) {
  const auto grid = tables::grid();
  if (rows.empty())
    for (int i = 0; i < static_cast<int>(grid.size()); ++i) rows.push_back(i);
  for (int i : rows)
    if (i < 0 || i >= static_cast<int>(grid.size())) throw domain_error("--rows index out of range");

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot open " + out_path);
  }
  std::ostream& os = out_path.empty() ? std::cout : file;
  os << "mu_x,mu_y,rho";
  for (double c : tables::columns(table)) os << ',' << tables::column_name(table, c);
  os << '\n';

  for (int i : rows) {
    const auto& row = grid[i];
    std::vector<tables::Cell> cells;
    if (scale == "desk" || table == 1) {
      cells = tables::row_cells(table, row);
    } else {
      auto cfg = sim.config();
      cfg.levels = tables::level_columns();
      const auto s = montecarlo::simulate(row.params(), cfg);
      for (double level : tables::level_columns())
        cells.push_back(tables::pick(
            tables::level_cells(row, level, tables::simulated_reference(s, level)), table));
    }
    os << output::format_real(row.mu_x) << ',' << output::format_real(row.mu_y) << ','
       << output::format_real(row.rho);
    for (const auto& c : cells) os << ',' << (c.valid ? tables::format_2sf(c.rel_error) : "N/A");
    os << '\n';
  }
  return 0;
}

int run_simulate(const ParamFlags& pf, const SimFlags& sim, const std::vector<double>& levels,
                 const std::vector<double>& xs, const std::string& format, const std::string& out_path,
                 const std::string& summary_path) {
  for (double p : levels) check_level(p);
  const auto prm = pf.build();
  auto cfg = sim.config();
  cfg.levels = levels;
  cfg.thresholds = xs;
  const auto s = montecarlo::simulate(prm, cfg);

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot open " + out_path);
  }
  Writer w{format, out_path.empty() ? std::cout : file};
  for (double p : levels) {
    w({Method::mc, Quantity::quantile, prm, p, montecarlo::empirical_quantile(s, p), {}, std::nullopt});
    w({Method::mc, Quantity::tvar, prm, p, montecarlo::empirical_tvar(s, p), {}, std::nullopt});
  }
  for (double x : xs)
    w({Method::mc, Quantity::survival, prm, x, montecarlo::empirical_tail_prob(s, x), {}, std::nullopt});

  if (!summary_path.empty()) {
    std::ofstream sf(summary_path);
    if (!sf) throw std::runtime_error("cannot open " + summary_path);
    sf << "{\"n\":" << s.n << ",\"seed\":" << sim.seed << ",\"chunks\":" << sim.chunks
       << ",\"mean\":" << output::format_real(s.mean) << ",\"variance\":" << output::format_real(s.variance())
       << ",\"top_block_size\":" << s.sorted_top_block.size()
       << ",\"bottom_block_size\":" << s.sorted_bottom_block.size() << "}\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution of the product of two correlated normal variables"};
  app.require_subcommand(1);

  ParamFlags eval_params;
  SimFlags eval_sim;
  std::string quantity = "pdf", method = "exact", format = "csv";
  std::vector<double> xs, ps;
  int n_max = 50;
  double tol = 1e-12;
  bool strict = false;
  auto* eval = app.add_subcommand("eval", "Evaluate a distributional quantity at points or levels");
  eval_params.attach(*eval);
  eval->add_option("--quantity", quantity, "pdf, cdf, survival, quantile, var or tvar")
      ->check(CLI::IsMember({"pdf", "cdf", "survival", "quantile", "var", "tvar"}))
      ->capture_default_str();
  eval->add_option("--method", method, "exact, asymptotic or mc")
      ->check(CLI::IsMember({"exact", "asymptotic", "mc"}))
      ->capture_default_str();
  auto* x_opt = eval->add_option("--x", xs, "Evaluation points (comma list)")->delimiter(',');
  eval->add_option("--p", ps, "Probability levels (comma list)")->delimiter(',')->excludes(x_opt);
  eval->add_option("--n-max", n_max, "Series truncation limit")->capture_default_str();
  eval->add_option("--tol", tol, "Series relative tolerance")->capture_default_str();
  eval->add_option("--format", format, "csv, json or human")
      ->check(CLI::IsMember({"csv", "json", "human"}))
      ->capture_default_str();
  eval->add_flag("--strict", strict, "Exit with status 3 if any asymptotic value is invalid");
  eval_sim.attach(*eval, 10'000'000);

  int table = 1;
  std::string scale = "desk", tables_out;
  std::vector<int> rows;
  SimFlags table_sim;
  auto* tab = app.add_subcommand("tables", "Reproduce the relative-error tables");
  tab->add_option("--table", table, "Table number")->required()->check(CLI::Range(1, 4));
  tab->add_option("--scale", scale, "desk (quadrature references) or full-row-subset (simulation references)")
      ->check(CLI::IsMember({"desk", "full-row-subset"}))
      ->capture_default_str();
  tab->add_option("--rows", rows, "Row indices 0-29 (comma list; default all)")->delimiter(',');
  tab->add_option("--out", tables_out, "Output CSV file (default stdout)");
  table_sim.attach(*tab, 100'000'000);

  ParamFlags sim_params;
  SimFlags sim;
  std::vector<double> levels, sim_xs;
  std::string sim_format = "csv", sim_out, summary_out;
  auto* simc = app.add_subcommand("simulate", "Run a seeded simulation and report empirical estimates");
  sim_params.attach(*simc);
  sim.attach(*simc, 10'000'000);
  simc->add_option("--levels", levels, "Levels for quantile and TVaR (comma list)")->delimiter(',');
  simc->add_option("--x", sim_xs, "Points for tail probabilities (comma list)")->delimiter(',');
  simc->add_option("--format", sim_format, "csv, json or human")
      ->check(CLI::IsMember({"csv", "json", "human"}))
      ->capture_default_str();
  simc->add_option("--out", sim_out, "Record file (default stdout)");
  simc->add_option("--summary", summary_out, "Summary JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_invalid;
  }

  try {
    if (*eval)
      return run_eval(eval_params, quantity, method, xs, ps, n_max, tol, eval_sim, format, strict);
    if (*tab) return run_tables(table, scale, rows, table_sim, tables_out);
    return run_simulate(sim_params, sim, levels, sim_xs, sim_format, sim_out, summary_out);
  } catch (const prodnormal::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  } catch (const prodnormal::resource_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_resource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
