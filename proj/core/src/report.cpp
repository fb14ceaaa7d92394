#include "descent/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace descent {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

template <typename Int>
Int parse_integer(std::string_view text, std::string_view key) {
  Int value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("config: " + std::string(key) + " expects a nonnegative integer, got '" +
                                std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string_view family_label(OrderingKind kind) { return to_string(kind); }

OrderingKind parse_family(std::string_view s) {
  if (s == "linear") return OrderingKind::linear;
  if (s == "optimal") return OrderingKind::optimal;
  throw std::invalid_argument("unknown family '" + std::string(s) + "'");
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

struct Series {
  std::string label;
  std::string color;
  std::vector<double> values;  // index i <-> order i + 1
};

// Log-scale line chart; non-positive and non-finite points break the line.
std::string render_log_chart(const std::string& title, const std::string& y_label,
                             const std::vector<Series>& series, std::size_t max_order,
                             std::size_t marker_order) {
  constexpr double W = 720, H = 420, left = 80, right = 170, top = 40, bottom = 50;
  const double pw = W - left - right;
  const double ph = H - top - bottom;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (const double v : s.values) {
      if (v > 0.0 && std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!std::isfinite(lo)) {
    lo = 1e-1;
    hi = 1e1;
  }
  double dlo = std::floor(std::log10(lo));
  double dhi = std::ceil(std::log10(hi));
  if (dhi <= dlo) dhi = dlo + 1;

  const double span_x = max_order > 1 ? static_cast<double>(max_order - 1) : 1.0;
  auto px = [&](double order) { return left + (order - 1.0) / span_x * pw; };
  auto py = [&](double v) { return top + (dhi - std::log10(v)) / (dhi - dlo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";

  const int decades = static_cast<int>(dhi - dlo);
  const int label_step = std::max(1, decades / 8);
  for (int d = 0; d <= decades; ++d) {
    const double exponent = dlo + d;
    const double y = top + (dhi - exponent) / (dhi - dlo) * ph;
    svg << "<line x1=\"" << left << "\" y1=\"" << fixed(y) << "\" x2=\"" << left + pw << "\" y2=\""
        << fixed(y) << "\" stroke=\"#dddddd\"/>\n";
    if (d % label_step == 0) {
      svg << "<text x=\"" << left - 6 << "\" y=\"" << fixed(y + 4)
          << "\" text-anchor=\"end\">1e" << static_cast<int>(exponent) << "</text>\n";
    }
  }
  const std::size_t tick = max_order > 20 ? 5 : (max_order > 10 ? 2 : 1);
  for (std::size_t n = 1; n <= max_order; ++n) {
    if (n != 1 && n % tick != 0) continue;
    const double x = px(static_cast<double>(n));
    svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << top + ph << "\" x2=\"" << fixed(x)
        << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fixed(x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << n << "</text>\n";
  }
  if (marker_order >= 1 && marker_order <= max_order) {
    const double x = px(static_cast<double>(marker_order));
    svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << top << "\" x2=\"" << fixed(x) << "\" y2=\""
        << top + ph << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\">model order n</text>\n";
  svg << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    std::vector<std::string> segments;
    std::string current;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double v = s.values[i];
      if (!(v > 0.0) || !std::isfinite(v)) {
        if (!current.empty()) segments.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (!current.empty()) current += ' ';
      current += fixed(px(static_cast<double>(i + 1))) + "," + fixed(py(v));
    }
    if (!current.empty()) segments.push_back(std::move(current));
    for (const auto& seg : segments) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\" points=\""
          << seg << "\"/>\n";
    }
    const double ly = top + 16 + 18 * static_cast<double>(si);
    svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 34
        << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + pw + 40 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "case_id=" << cfg.case_id << '\n'
      << "epsilon=" << format_double(cfg.epsilon) << '\n'
      << "generator_kind=" << to_string(cfg.generator_kind) << '\n'
      << "N=" << cfg.N << '\n'
      << "n_max=" << cfg.n_max << '\n'
      << "r_z=" << format_double(cfg.noise_variance) << '\n'
      << "replicates=" << cfg.replicates << '\n'
      << "base_seed=" << cfg.base_seed << '\n';
  if (cfg.estimator.is_ridge()) {
    out << "estimator=ridge\n"
        << "lambda=" << format_double(cfg.estimator.lambda()) << '\n';
  } else {
    out << "estimator=min_norm\n";
  }
  out << "alpha_mode=" << to_string(cfg.alpha_mode) << '\n';
  return out.str();
}

ExperimentConfig parse_config(std::string_view text, std::set<std::string>* present) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + std::string(line) + "'");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (!kv.emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": duplicate key '" +
                                  key + "'");
    }
  }

  ExperimentConfig cfg;
  if (auto it = kv.find("case_id"); it != kv.end()) {
    const auto& id = it->second;
    if (id == "A" || id == "B" || id == "C" || id == "D") {
      cfg = preset(id);
    } else {
      cfg.case_id = id;
    }
  }

  std::optional<std::string> estimator;
  std::optional<double> lambda;
  for (const auto& [key, value] : kv) {
    if (present) present->insert(key);
    if (key == "case_id") {
      continue;
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(value);
    } else if (key == "generator_kind") {
      if (value == "lin") cfg.generator_kind = GeneratorKind::lin;
      else if (value == "opt") cfg.generator_kind = GeneratorKind::opt;
      else throw std::invalid_argument("config: generator_kind must be lin or opt, got '" + value + "'");
    } else if (key == "N") {
      cfg.N = parse_integer<std::size_t>(value, key);
    } else if (key == "n_max") {
      cfg.n_max = parse_integer<std::size_t>(value, key);
    } else if (key == "r_z") {
      cfg.noise_variance = parse_double(value);
    } else if (key == "replicates") {
      cfg.replicates = parse_integer<std::size_t>(value, key);
    } else if (key == "base_seed") {
      cfg.base_seed = parse_integer<std::uint64_t>(value, key);
    } else if (key == "estimator") {
      if (value != "min_norm" && value != "ridge") {
        throw std::invalid_argument("config: estimator must be min_norm or ridge, got '" + value + "'");
      }
      estimator = value;
    } else if (key == "lambda") {
      lambda = parse_double(value);
    } else if (key == "alpha_mode") {
      if (value == "fixed_per_case") cfg.alpha_mode = AlphaMode::fixed_per_case;
      else if (value == "resample_per_replicate") cfg.alpha_mode = AlphaMode::resample_per_replicate;
      else throw std::invalid_argument("config: unknown alpha_mode '" + value + "'");
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

  if (estimator == "min_norm" && lambda) {
    throw std::invalid_argument("config: lambda given with estimator=min_norm");
  }
  if (estimator == "ridge" && !lambda) {
    throw std::invalid_argument("config: estimator=ridge requires lambda");
  }
  cfg.estimator = lambda ? Estimator::ridge(*lambda) : Estimator::min_norm();
  validate(cfg);
  return cfg;
}

std::string case_csv(const CaseResult& result) {
  std::string out(kCaseCsvHeader);
  out += '\n';
  const auto id = csv_field(result.config.case_id);
  for (const FamilyCurve* curve : {&result.linear, &result.optimal}) {
    const auto fam = family_label(curve->family);
    for (const auto& o : curve->orders) {
      out += id;
      out += ',';
      out += fam;
      out += ',';
      out += std::to_string(o.order);
      for (const double v : {o.nmse_noisy_mean, o.nmse_noisefree_mean, o.inv_sigma_min,
                             o.theta_star_norm}) {
        out += ',';
        out += format_double(v);
      }
      out += '\n';
    }
  }
  return out;
}

std::string diagnostics_csv(const CaseResult& result) {
  std::string out(kDiagnosticsCsvHeader);
  out += '\n';
  const auto id = csv_field(result.config.case_id);
  for (const FamilyCurve* curve : {&result.linear, &result.optimal}) {
    for (const auto& o : curve->orders) {
      out += id + ',' + std::string(family_label(curve->family)) + ',' + std::to_string(o.order) +
             ',' + format_double(o.nmse_noisy_median) + ',' + csv_field(o.failure.value_or("")) +
             '\n';
    }
  }
  return out;
}

std::string spectrum_csv(const SpectrumSweep& sweep, OrderingKind family) {
  std::string out(kSpectrumCsvHeader);
  out += '\n';
  const std::size_t peak = sweep.size() ? sweep.peak_order() : 0;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    out += std::string(family_label(family)) + ',' + std::to_string(sweep.orders[i]) + ',' +
           format_double(sweep.sigma_min[i]) + ',' + format_double(sweep.inv_sigma_min[i]) + ',';
    if (sweep.theta_star_norm) out += format_double((*sweep.theta_star_norm)[i]);
    out += sweep.orders[i] == peak ? ",1\n" : ",0\n";
  }
  return out;
}

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

CaseResult parse_case_csv(std::string_view text) {
  CaseResult result;
  result.linear.family = OrderingKind::linear;
  result.optimal.family = OrderingKind::optimal;
  bool header = true;
  bool have_id = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    if (header) {
      if (line != kCaseCsvHeader) throw std::invalid_argument("csv: unexpected header");
      header = false;
      continue;
    }
    const auto f = split_csv_record(line);
    if (f.size() != 7) throw std::invalid_argument("csv: expected 7 fields per row");
    if (!have_id) {
      result.config.case_id = f[0];
      have_id = true;
    }
    OrderResult o;
    o.order = parse_integer<std::size_t>(f[2], "order");
    o.nmse_noisy_mean = parse_double(f[3]);
    o.nmse_noisefree_mean = parse_double(f[4]);
    o.inv_sigma_min = parse_double(f[5]);
    o.theta_star_norm = parse_double(f[6]);
    auto& curve = parse_family(f[1]) == OrderingKind::linear ? result.linear : result.optimal;
    curve.orders.push_back(std::move(o));
  }
  return result;
}

std::string nmse_svg(const CaseResult& result, OrderingKind family) {
  const auto& curve = result.family(family);
  Series noisy{"noisy data", "#d62728", {}};
  Series clean{"noise-free data", "#1f77b4", {}};
  for (const auto& o : curve.orders) {
    noisy.values.push_back(o.nmse_noisy_mean);
    clean.values.push_back(o.nmse_noisefree_mean);
  }
  const std::string title = "Case " + result.config.case_id + ": NMSE, " +
                            std::string(family_label(family)) + " ordering";
  return render_log_chart(title, "NMSE", {noisy, clean}, curve.orders.size(), result.config.N);
}

std::string spectrum_svg(const SpectrumSweep& sweep, OrderingKind family, std::size_t N) {
  Series inv{"1 / sigma_min", "#2ca02c", sweep.inv_sigma_min};
  const std::string title = "Inverse smallest singular value, " +
                            std::string(family_label(family)) + " ordering";
  return render_log_chart(title, "1 / sigma_min", {inv}, sweep.size(), N);
}

std::string manifest_text(const RunManifest& manifest) {
  std::string out = "# descent-lab run manifest\n";
  out += "# tool_version=" + manifest.tool_version + '\n';
  out += "# timestamp=" + manifest.timestamp + '\n';
  for (const auto& o : manifest.outputs) out += "# output=" + o + '\n';
  out += serialize_config(manifest.config);
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace descent
