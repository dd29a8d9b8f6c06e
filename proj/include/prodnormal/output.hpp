#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "asymptotics.hpp"
#include "params.hpp"

namespace prodnormal::output {

enum class Method { exact, asymptotic, mc };
enum class Quantity { pdf, cdf, survival, quantile, var, tvar };

inline std::string_view name(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::asymptotic: return "asymptotic";
    case Method::mc: return "mc";
  }
  return "";
}

inline std::string_view name(Quantity q) {
  switch (q) {
    case Quantity::pdf: return "pdf";
    case Quantity::cdf: return "cdf";
    case Quantity::survival: return "survival";
    case Quantity::quantile: return "quantile";
    case Quantity::var: return "var";
    case Quantity::tvar: return "tvar";
  }
  return "";
}

/// Quantities indexed by probability level rather than by x.
inline bool takes_level(Quantity q) {
  return q == Quantity::quantile || q == Quantity::var || q == Quantity::tvar;
}

struct OutputRecord {
  Method method = Method::exact;
  Quantity quantity = Quantity::pdf;
  ProductParams params{0, 0, 1, 1, 0};
  double input = 0;
  double value = 0;
  asymptotics::ApproxValidity validity;
  /// Series diagnostics; present for exact density evaluations.
  std::optional<EvalResult> diagnostics;
};

/// Fixed CSV column order.
inline constexpr std::string_view csv_header =
    "method,quantity,mu_x,mu_y,sigma_x,sigma_y,rho,input,value,valid,reason,warning,"
    "n_used,est_trunc_error,est_round_error,working_digits,scaled";

/// 17 significant digits; nan and infinities spelled out.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Quotes a CSV field when it holds a delimiter, quote or line break.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline void write_csv(std::ostream& os, const OutputRecord& r) {
  const auto& p = r.params;
  os << name(r.method) << ',' << name(r.quantity) << ',' << format_real(p.mu_x()) << ','
     << format_real(p.mu_y()) << ',' << format_real(p.sigma_x()) << ',' << format_real(p.sigma_y())
     << ',' << format_real(p.rho()) << ',' << format_real(r.input) << ','
     << (r.validity.valid ? format_real(r.value) : "") << ',' << (r.validity.valid ? "true" : "false")
     << ',' << csv_field(r.validity.reason) << ',' << csv_field(r.validity.warning) << ',';
  if (r.diagnostics) {
    const auto& d = *r.diagnostics;
    os << d.n_used << ',' << format_real(d.est_trunc_error) << ',' << format_real(d.est_round_error)
       << ',' << d.working_digits << ',' << (d.scaled ? "true" : "false");
  } else {
    os << ",,,,";
  }
  os << '\n';
}

namespace detail {

inline std::string json_real(double v) { return std::isfinite(v) ? format_real(v) : "null"; }
inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace detail

/// One JSON object per line. Numbers keep 17 significant digits; invalid values are null.
inline void write_json(std::ostream& os, const OutputRecord& r) {
  using detail::json_real;
  using detail::json_string;
  const auto& p = r.params;
  os << "{\"method\":\"" << name(r.method) << "\",\"quantity\":\"" << name(r.quantity)
     << "\",\"params\":{\"mu_x\":" << json_real(p.mu_x()) << ",\"mu_y\":" << json_real(p.mu_y())
     << ",\"sigma_x\":" << json_real(p.sigma_x()) << ",\"sigma_y\":" << json_real(p.sigma_y())
     << ",\"rho\":" << json_real(p.rho()) << "},\"input\":" << json_real(r.input)
     << ",\"value\":" << (r.validity.valid ? json_real(r.value) : "null")
     << ",\"validity\":{\"valid\":" << (r.validity.valid ? "true" : "false")
     << ",\"reason\":" << json_string(r.validity.reason)
     << ",\"warning\":" << json_string(r.validity.warning) << '}';
  if (r.diagnostics) {
    const auto& d = *r.diagnostics;
    os << ",\"diagnostics\":{\"n_used\":" << d.n_used << ",\"est_trunc_error\":" << json_real(d.est_trunc_error)
       << ",\"est_round_error\":" << json_real(d.est_round_error) << ",\"working_digits\":" << d.working_digits
       << ",\"scaled\":" << (d.scaled ? "true" : "false") << ",\"log_value\":" << json_real(d.log_value) << '}';
  }
  os << "}\n";
}

/// Aligned text for people; invalid values print as N/A.
inline void write_human(std::ostream& os, const OutputRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %-8s %s=%-12.6g %s", std::string(name(r.method)).c_str(),
                std::string(name(r.quantity)).c_str(), takes_level(r.quantity) ? "p" : "x", r.input,
                r.validity.valid ? format_real(r.value).c_str() : "N/A");
  os << buf;
  if (!r.validity.valid) os << "  (" << r.validity.reason << ')';
  if (!r.validity.warning.empty()) os << "  [" << r.validity.warning << ']';
  os << '\n';
}

}  // namespace prodnormal::output
