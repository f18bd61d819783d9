// Copyright 2026 The csmdc Authors.
//
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

#include "csmdc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "csmdc/error.hpp"
#include "csmdc/random.hpp"
#include "csmdc/signal_file.hpp"

namespace csmdc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& where) {
  T v{};
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || text.empty()) {
    throw ConfigError(where + ": cannot parse '" + text + "'");
  }
  return v;
}

SchemeConfig parse_scheme(const std::string& value, const std::string& where) {
  const auto w = words(value);
  if (w.empty()) throw ConfigError(where + ": empty scheme");
  auto arg = [&](std::size_t i) { return parse_number<int>(w[i], where); };
  if (w[0] == "gq" && w.size() == 3) return SchemeConfig::gq(arg(1), arg(2));
  if (w[0] == "split" && w.size() == 2) return SchemeConfig::split(arg(1));
  if (w[0] == "mdsq" && (w.size() == 2 || w.size() == 3)) {
    return SchemeConfig::mdsq(arg(1), w.size() == 3 ? arg(2) : 1);
  }
  throw ConfigError(where + ": expected 'gq B b', 'split R' or 'mdsq R [spread]'");
}

std::vector<Index> parse_m(const std::string& value, const std::string& where) {
  std::vector<Index> out;
  if (value.find(':') != std::string::npos) {
    const auto p = split(value, ':');
    if (p.size() != 3) throw ConfigError(where + ": m range must be first:last:step");
    const auto first = parse_number<long>(p[0], where);
    const auto last = parse_number<long>(p[1], where);
    const auto step = parse_number<long>(p[2], where);
    if (step < 1 || last < first) throw ConfigError(where + ": empty m range");
    for (long m = first; m <= last; m += step) out.push_back(m);
    return out;
  }
  for (const auto& part : split(value, ',')) out.push_back(parse_number<long>(part, where));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* scheme_name(const SchemeConfig& s) { return to_string(s.scheme); }

}  // namespace

HarnessConfig parse_config(const std::string& text) {
  HarnessConfig cfg;
  auto& e = cfg.experiment;
  e.schemes.clear();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto real = [&] { return parse_number<double>(value, where); };
    auto count = [&] { return parse_number<long>(value, where); };
    if (key == "scheme") {
      e.schemes.push_back(parse_scheme(value, where));
    } else if (key == "n") {
      e.n = count();
    } else if (key == "k") {
      e.k = count();
    } else if (key == "m") {
      e.m_values = parse_m(value, where);
    } else if (key == "sigma_x2") {
      e.sigma_x2 = real();
    } else if (key == "trials") {
      const long t = count();
      if (t < 1) throw ConfigError(where + ": trials must be at least 1");
      e.trials = static_cast<std::size_t>(t);
    } else if (key == "seed") {
      e.master_seed = parse_number<std::uint64_t>(value, where);
    } else if (key == "p") {
      e.loss_p = real();
    } else if (key == "kappa") {
      e.kappa = real();
    } else if (key == "max_iters") {
      e.solver.max_iters = static_cast<int>(count());
    } else if (key == "abs_tol") {
      e.solver.abs_tol = real();
    } else if (key == "rel_tol") {
      e.solver.rel_tol = real();
    } else if (key == "penalty") {
      e.solver.penalty = real();
    } else if (key == "feasibility_slack") {
      e.solver.feasibility_slack = real();
    } else if (key == "lloyd_iters") {
      e.lloyd_iters = static_cast<int>(count());
    } else if (key == "training_vectors") {
      const long t = count();
      if (t < 0) throw ConfigError(where + ": training_vectors must be non-negative");
      e.codebook_training_vectors = static_cast<std::size_t>(t);
    } else if (key == "threads") {
      const long t = count();
      if (t < 0) throw ConfigError(where + ": threads must be non-negative");
      e.threads = static_cast<unsigned>(t);
    } else if (key == "rate") {
      cfg.rate = static_cast<int>(count());
    } else if (key == "out") {
      cfg.out = value;
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  if (e.schemes.empty()) e.schemes.push_back(SchemeConfig::gq(6, 2));
  e.validate();
  return cfg;
}

HarnessConfig load_config(const std::string& path) {
  const auto bytes = read_file(path);
  return parse_config(std::string(bytes.begin(), bytes.end()));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string records_csv(const std::vector<TrialRecord>& records, const CsvOptions& opts) {
  std::ostringstream out;
  out << "config_index,scheme,fine_bits,coarse_bits,spread,total_rate,m,trial,signal_seed,"
         "matrix_seed,channel_seed,received_mask,case,rel_distortion,sq_rel_distortion,"
         "iterations,status,boxes_dropped";
  if (opts.timing) out << ",wall_seconds";
  out << '\n';
  for (const auto& r : records) {
    const auto& s = r.point.scheme;
    out << r.config_index << ',' << scheme_name(s) << ',' << s.fine_bits << ',' << s.coarse_bits
        << ',' << s.spread << ',' << s.total_rate() << ',' << r.point.m << ',' << r.trial << ','
        << r.signal_seed << ',' << r.matrix_seed << ',' << r.channel_seed << ','
        << int(r.received_mask) << ',' << to_string(r.decoder_case) << ','
        << format_double(r.rel_distortion) << ',' << format_double(r.sq_rel_distortion) << ','
        << r.iterations << ',' << csv_field(r.status) << ',' << (r.boxes_dropped ? 1 : 0);
    if (opts.timing) out << ',' << format_double(r.wall_seconds);
    out << '\n';
  }
  return out.str();
}

std::string records_json(const std::vector<TrialRecord>& records, const CsvOptions& opts) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    const auto& s = r.point.scheme;
    nlohmann::ordered_json j;
    j["config_index"] = r.config_index;
    j["scheme"] = scheme_name(s);
    j["fine_bits"] = s.fine_bits;
    j["coarse_bits"] = s.coarse_bits;
    j["spread"] = s.spread;
    j["total_rate"] = s.total_rate();
    j["m"] = r.point.m;
    j["trial"] = r.trial;
    j["signal_seed"] = r.signal_seed;
    j["matrix_seed"] = r.matrix_seed;
    j["channel_seed"] = r.channel_seed;
    j["received_mask"] = r.received_mask;
    j["case"] = to_string(r.decoder_case);
    j["rel_distortion"] = r.rel_distortion;
    j["sq_rel_distortion"] = r.sq_rel_distortion;
    j["iterations"] = r.iterations;
    j["status"] = r.status;
    j["boxes_dropped"] = r.boxes_dropped;
    if (opts.timing) j["wall_seconds"] = r.wall_seconds;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string summary_csv(const std::vector<CaseSummary>& summary) {
  std::ostringstream out;
  out << "config_index,scheme,label,total_rate,m,case,count,mean_rel,ci_rel,mean_sq_rel,ci_sq_rel,failures\n";
  for (const auto& s : summary) {
    out << s.config_index << ',' << scheme_name(s.point.scheme) << ',' << csv_field(s.point.scheme.label())
        << ',' << s.point.scheme.total_rate() << ',' << s.point.m << ',' << to_string(s.decoder_case)
        << ',' << s.rel.count << ',' << format_double(s.rel.mean) << ',' << format_double(s.rel.half_width)
        << ',' << format_double(s.sq_rel.mean) << ',' << format_double(s.sq_rel.half_width) << ','
        << s.failures << '\n';
  }
  return out.str();
}

std::string summary_text(const std::vector<CaseSummary>& summary) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %5s %-8s %6s %22s %9s\n", "scheme", "m", "case", "count",
                "rel distortion (95%)", "failures");
  out << buf;
  for (const auto& s : summary) {
    std::snprintf(buf, sizeof buf, "%-24s %5ld %-8s %6zu %12.6f +- %-7.5f %9zu\n",
                  s.point.scheme.label().c_str(), static_cast<long>(s.point.m), to_string(s.decoder_case),
                  s.rel.count, s.rel.mean, s.rel.half_width, s.failures);
    out << buf;
  }
  return out.str();
}

OptimizerReport run_optimizer(const HarnessConfig& cfg, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("optimize: p must be in [0, 1)");
  OptimizerReport rep;
  rep.p = p;
  rep.rate = cfg.rate ? *cfg.rate : cfg.experiment.schemes.front().total_rate();
  rep.curve = tradeoff_curve(cfg.experiment, rep.rate);
  rep.hull = lower_left_hull(rep.curve);
  rep.selected = optimal_operating_point(rep.hull, p);
  return rep;
}

std::string curve_csv(const OptimizerReport& report) {
  std::ostringstream out;
  out << "label,fine_bits,coarse_bits,trials,d_side,ci_side,d_central,ci_central,mean_rel_side,"
         "mean_rel_central,failures,on_hull,d_avg,selected\n";
  for (const auto& pt : report.curve) {
    const bool on_hull = std::any_of(report.hull.begin(), report.hull.end(),
                                     [&](const TradeoffPoint& h) { return h.config == pt.config; });
    const int coarse = pt.config.scheme == Scheme::split ? 0 : pt.config.coarse_bits;
    out << csv_field(pt.config.label()) << ',' << pt.config.fine_bits << ',' << coarse << ','
        << pt.trials << ',' << format_double(pt.d_side) << ',' << format_double(pt.side_sq.half_width)
        << ',' << format_double(pt.d_central) << ',' << format_double(pt.central_sq.half_width) << ','
        << format_double(pt.side_rel.mean) << ',' << format_double(pt.central_rel.mean) << ','
        << pt.failures << ',' << (on_hull ? 1 : 0) << ','
        << format_double(avg_distortion(pt.d_side, pt.d_central, report.p)) << ','
        << (pt.config == report.selected.config ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string optimizer_text(const OptimizerReport& report) {
  std::ostringstream out;
  const auto& s = report.selected;
  const int coarse = s.config.scheme == Scheme::split ? 0 : s.config.coarse_bits;
  out << "rate " << report.rate << ", p " << format_double(report.p) << ": selected B=" << s.config.fine_bits
      << " b=" << coarse << " (" << s.config.label() << ")\n"
      << "  d_side " << format_double(s.d_side) << ", d_central " << format_double(s.d_central)
      << ", d_avg " << format_double(avg_distortion(s.d_side, s.d_central, report.p)) << '\n'
      << "  hull size " << report.hull.size() << " of " << report.curve.size() << " points\n";
  return out.str();
}

std::optional<double> default_d_sm_side(const BoundInputs& in, std::uint64_t seed) {
  if (in.R > kMaxMdsqSideBits) return std::nullopt;
  const double sd = std::sqrt(static_cast<double>(in.k) * in.sigma_x2 / static_cast<double>(in.m));
  Rng rng(derive_seed(seed, 0, SeedPurpose::codebook));
  std::vector<double> samples(10000);
  for (auto& v : samples) v = sd * rng.normal();
  const auto cb = mdsq_design(in.R, 1, 4.0 * sd, 0, samples);
  return estimate_d_sm_side(cb, samples);
}

std::vector<BoundsRow> run_bounds(const BoundInputs& in, int r_first, int r_last) {
  if (r_first < 1 || r_last < r_first) throw ConfigError("bounds: R range must satisfy 1 <= first <= last");
  std::vector<BoundsRow> rows;
  BoundInputs cur = in;
  // Coherence is shared by every row.
  if (!cur.mu) cur.mu = coherence(gen_sensing_matrix(cur.m, cur.n, cur.matrix_seed));
  for (int r = r_first; r <= r_last; ++r) {
    cur.R = r;
    BoundsRow row;
    row.R = r;
    row.thm1_side = thm1_side(cur);
    row.thm1_central = thm1_central(cur);
    row.thm2_side = thm2_side(cur);
    BoundInputs c2 = cur;
    c2.d_sm_side = in.d_sm_side ? in.d_sm_side : default_d_sm_side(cur, cur.matrix_seed);
    row.d_sm_side = c2.d_sm_side;
    if (c2.d_sm_side) row.thm2_central = thm2_central(c2);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
  return out;
}

void bounds_line(std::ostringstream& out, int r, const char* name, const BoundReport& rep,
                 const std::optional<double>& dsm) {
  out << r << ',' << name << ',' << format_double(rep.lower) << ',' << format_double(rep.upper) << ','
      << (rep.hypotheses_ok ? 1 : 0) << ',' << csv_field(join(rep.violated)) << ','
      << (dsm ? format_double(*dsm) : "") << ',' << (rep.gamma_d ? format_double(*rep.gamma_d) : "")
      << '\n';
}

}  // namespace

std::string bounds_csv(const std::vector<BoundsRow>& rows) {
  std::ostringstream out;
  out << "R,bound,lower,upper,hypotheses_ok,violated,d_sm_side,gamma_d\n";
  for (const auto& row : rows) {
    bounds_line(out, row.R, "thm1_side", row.thm1_side, std::nullopt);
    bounds_line(out, row.R, "thm1_central", row.thm1_central, std::nullopt);
    bounds_line(out, row.R, "thm2_side", row.thm2_side, std::nullopt);
    if (row.thm2_central) bounds_line(out, row.R, "thm2_central", *row.thm2_central, row.d_sm_side);
  }
  return out.str();
}

std::string bounds_text(const BoundInputs& in, const std::vector<BoundsRow>& rows) {
  std::ostringstream out;
  out << "n=" << in.n << " m=" << in.m << " k=" << in.k << " sigma_x2=" << format_double(in.sigma_x2) << '\n';
  if (!rows.empty()) {
    BoundInputs first = in;
    first.R = rows.front().R;
    out << "hypotheses:\n";
    for (const auto& c : check_hypotheses(first)) {
      out << "  [" << (c.passed ? "ok" : "FAILED") << "] " << c.name << "  (lhs " << format_double(c.lhs)
          << ", rhs " << format_double(c.rhs) << ", margin " << format_double(c.margin) << ")\n";
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "%3s %-13s %14s %14s %4s %12s\n", "R", "bound", "lower", "upper", "ok", "gamma_D");
  out << buf;
  auto line = [&](int r, const char* name, const BoundReport& rep) {
    std::snprintf(buf, sizeof buf, "%3d %-13s %14.6e %14.6e %4s %12s\n", r, name, rep.lower, rep.upper,
                  rep.hypotheses_ok ? "yes" : "no", rep.gamma_d ? format_double(*rep.gamma_d).c_str() : "-");
    out << buf;
  };
  for (const auto& row : rows) {
    line(row.R, "thm1_side", row.thm1_side);
    line(row.R, "thm1_central", row.thm1_central);
    line(row.R, "thm2_side", row.thm2_side);
    if (row.thm2_central) line(row.R, "thm2_central", *row.thm2_central);
  }
  return out.str();
}

}  // namespace csmdc
