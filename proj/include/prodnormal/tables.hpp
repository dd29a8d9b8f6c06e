#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "cdf.hpp"
#include "exact.hpp"
#include "montecarlo.hpp"
#include "params.hpp"
#include "risk.hpp"

namespace prodnormal::tables {

/// One parameter triple of the error tables; sigma_x = sigma_y = 1.
struct Row {
  double mu_x;
  double mu_y;
  double rho;
  ProductParams params() const { return {mu_x, mu_y, 1.0, 1.0, rho}; }
};

/// Signed relative error (approximation - reference) / reference, or an invalid marker.
struct Cell {
  bool valid = false;
  double rel_error = 0;
  std::string reason;
};

inline const std::vector<double>& pdf_columns() {
  static const std::vector<double> xs{2.5, 5, 7.5, 10, 12.5, 15};
  return xs;
}

inline const std::vector<double>& level_columns() {
  static const std::vector<double> ps{0.95, 0.975, 0.99, 0.995, 0.999, 0.9999};
  return ps;
}

inline const std::vector<double>& columns(int table) {
  return table == 1 ? pdf_columns() : level_columns();
}

/// Column header prefix used in CSV output: x for Table 1, q or p otherwise.
inline std::string column_name(int table, double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%g", table == 1 ? "x" : table == 2 ? "q" : "p", c);
  return buf;
}

/// The 30 rows: six mean pairs, each at five correlations.
inline std::vector<Row> grid() {
  const std::array<std::array<double, 2>, 6> means{{{0, 0}, {1, -1}, {2, -2}, {1, 0}, {1, 1}, {2, 1}}};
  const std::array<double, 5> rhos{-0.5, -0.25, 0, 0.25, 0.5};
  std::vector<Row> rows;
  for (const auto& m : means)
    for (double r : rhos) rows.push_back({m[0], m[1], r});
  return rows;
}

inline Cell relative(const asymptotics::Approx& approx, double reference) {
  if (!approx.validity.valid) return {false, 0, approx.validity.reason};
  return {true, (approx.value - reference) / reference, ""};
}

inline Cell pdf_cell(const Row& row, double x) {
  const auto p = row.params();
  const double ref = exact::pdf_exact(p, x).value;
  return relative(asymptotics::pdf_asym(p, x, asymptotics::TailSide::right), ref);
}

/// Reference values at one level: quantile, its tail mass, and TVaR.
struct LevelReference {
  double quantile;
  double tail;
  double tvar;
};

inline LevelReference quadrature_reference(const ProductParams& p, double level) {
  const double q = risk::quantile_numeric(p, {level});
  return {q, exact::survival(p, q), risk::tvar_at(p, level, q)};
}

/// Cells of Tables 2, 3 and 4 at one level, sharing one reference computation.
struct LevelCells {
  Cell tail;
  Cell quantile;
  Cell tvar;
};

inline LevelCells level_cells(const Row& row, double level, const LevelReference& ref) {
  const auto p = row.params();
  return {relative(asymptotics::tail_asym(p, ref.quantile, asymptotics::TailSide::right), ref.tail),
          relative(asymptotics::quantile_asym(p, level), ref.quantile),
          relative(asymptotics::tvar_asym(p, level), ref.tvar)};
}

inline LevelCells level_cells(const Row& row, double level) {
  return level_cells(row, level, quadrature_reference(row.params(), level));
}

/// Monte Carlo reference built from one simulation per row.
inline LevelReference simulated_reference(const montecarlo::EmpiricalSummary& s, double level) {
  const double q = montecarlo::empirical_quantile(s, level);
  return {q, montecarlo::empirical_tail_prob(s, q), montecarlo::empirical_tvar(s, level)};
}

inline Cell pick(const LevelCells& c, int table) {
  return table == 2 ? c.tail : table == 3 ? c.quantile : c.tvar;
}

/// A whole table row against deterministic references.
inline std::vector<Cell> row_cells(int table, const Row& row) {
  if (table < 1 || table > 4) throw domain_error("table must be 1, 2, 3 or 4");
  std::vector<Cell> out;
  for (double c : columns(table)) out.push_back(table == 1 ? pdf_cell(row, c) : pick(level_cells(row, c), table));
  return out;
}

/// Two significant figures in the tables' notation, e.g. 4.4E-02.
inline std::string format_2sf(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1E", v);
  return buf;
}

/// Parses a table entry; returns NaN for N/A.
inline double parse_entry(const std::string& s) {
  if (s == "N/A") return std::nan("");
  return std::stod(s);
}

/// Whether `computed`, printed to two figures, lies within `units` units of the
/// published `entry` in its second significant figure (first, when sig_figs == 1).
inline bool matches_entry(double computed, const std::string& entry, double units, int sig_figs = 2) {
  const double ref = parse_entry(entry);
  if (std::isnan(ref) || !std::isfinite(computed)) return false;
  const double printed = parse_entry(format_2sf(computed));
  if (ref == 0) return printed == 0;
  const int e = static_cast<int>(std::floor(std::log10(std::abs(ref))));
  const double unit = std::pow(10.0, e - (sig_figs - 1));
  return std::abs(printed - ref) <= units * unit * (1 + 1e-9);
}

}  // namespace prodnormal::tables
