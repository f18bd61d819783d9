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

#include "csmdc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>

#include "csmdc/channel.hpp"
#include "csmdc/error.hpp"
#include "csmdc/random.hpp"

namespace csmdc {

int SchemeConfig::total_rate() const {
  switch (scheme) {
    case Scheme::gq: return fine_bits + coarse_bits;
    case Scheme::split: return fine_bits;
    case Scheme::mdsq: return 2 * fine_bits;
  }
  return 0;
}

std::string SchemeConfig::label() const {
  switch (scheme) {
    case Scheme::gq: return "gq(B=" + std::to_string(fine_bits) + ",b=" + std::to_string(coarse_bits) + ")";
    case Scheme::split: return "split(R=" + std::to_string(fine_bits) + ")";
    case Scheme::mdsq:
      return "mdsq(R=" + std::to_string(fine_bits) + ",spread=" + std::to_string(spread) + ")";
  }
  return "unknown";
}

const char* to_string(DecoderCase c) noexcept {
  switch (c) {
    case DecoderCase::side1: return "side1";
    case DecoderCase::side2: return "side2";
    case DecoderCase::central: return "central";
    case DecoderCase::lost_all: return "lost-all";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (schemes.empty()) throw ConfigError("no scheme configured");
  if (m_values.empty()) throw ConfigError("no m value configured");
  if (n < 1 || k < 1 || k > n) throw ConfigError("need 1 <= k <= n");
  if (!(sigma_x2 > 0.0)) throw ConfigError("sigma_x2 must be positive");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (loss_p && !(*loss_p >= 0.0 && *loss_p <= 1.0)) throw ConfigError("p must be in [0, 1]");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (solver.max_iters < 1 || !(solver.abs_tol > 0.0) || !(solver.rel_tol > 0.0) ||
      !(solver.penalty > 0.0) || !(solver.feasibility_slack >= 0.0)) {
    throw ConfigError("invalid solver options");
  }
  for (Index m : m_values) {
    if (m < 2) throw ConfigError("every m must be at least 2");
  }
  for (const auto& s : schemes) {
    switch (s.scheme) {
      case Scheme::gq:
        if (s.fine_bits < 1 || s.fine_bits > kMaxQuantizerBits || s.coarse_bits < 0 ||
            s.coarse_bits > s.fine_bits) {
          throw ConfigError("gq needs 0 <= b <= B <= 16 and B >= 1");
        }
        break;
      case Scheme::split:
        if (s.fine_bits < 1 || s.fine_bits > kMaxQuantizerBits) throw ConfigError("split needs 1 <= R <= 16");
        break;
      case Scheme::mdsq:
        if (s.fine_bits < 1 || s.fine_bits > kMaxMdsqSideBits) throw ConfigError("mdsq needs 1 <= R <= 8");
        if (s.spread < 0 || s.spread >= (1 << s.fine_bits)) throw ConfigError("mdsq spread out of range");
        if (lloyd_iters > 0 && codebook_training_vectors < 1) {
          throw ConfigError("mdsq Lloyd refinement needs training vectors");
        }
        break;
    }
  }
}

std::vector<ConfigPoint> expand(const ExperimentConfig& cfg) {
  std::vector<ConfigPoint> out;
  for (const auto& s : cfg.schemes) {
    for (Index m : cfg.m_values) out.push_back({s, m});
  }
  return out;
}

MdsqCodebook train_codebook(const ExperimentConfig& cfg, const SchemeConfig& scheme, Index m) {
  std::vector<double> samples;
  if (cfg.lloyd_iters > 0) {
    samples.reserve(cfg.codebook_training_vectors * static_cast<std::size_t>(m));
    // Trial numbers are offset so that training never reuses evaluation seeds.
    const std::uint64_t base = std::uint64_t{1} << 40;
    for (std::size_t t = 0; t < cfg.codebook_training_vectors; ++t) {
      const auto trial = base + t;
      const auto x = gen_sparse_signal(
          {cfg.n, cfg.k, cfg.sigma_x2, derive_seed(cfg.master_seed, trial, SeedPurpose::codebook)});
      const auto phi = gen_sensing_matrix(m, cfg.n, derive_seed(cfg.master_seed, trial, SeedPurpose::matrix));
      const auto y = sense(phi, x);
      const double s = vector_scale(y.y);
      for (Index i = 0; i < m; ++i) samples.push_back(y.y(i) / s);
    }
  }
  return mdsq_design(scheme.fine_bits, scheme.spread, 1.0, cfg.lloyd_iters, samples);
}

Matrix select_rows(const Matrix& phi, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), phi.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = phi.row(rows[r]);
  return out;
}

SolverResult<double> decode_bpdn(const DecoderInput& in, const Matrix& phi, double kappa,
                                 const SolverOptions& opts) {
  std::vector<Index> rows;
  std::vector<double> values;
  double eps2 = 0.0;
  for (const auto& g : in.groups) {
    rows.insert(rows.end(), g.rows.begin(), g.rows.end());
    values.insert(values.end(), g.values.begin(), g.values.end());
    const double e = default_epsilon(g.delta, static_cast<Index>(g.rows.size()), kappa);
    eps2 += e * e;
  }
  BpdnProblem<double> p;
  p.A = select_rows(phi, rows);
  p.y = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  p.epsilon = std::sqrt(eps2);
  return bpdn(p, opts);
}

SolverResult<double> decode_gq_side(const DecoderInput& in, const Matrix& phi, double kappa,
                                    const SolverOptions& opts) {
  if (in.groups.empty() || in.groups.size() > 2) {
    throw ConfigError("decode_gq_side: expects one or two measurement groups");
  }
  GqSideProblem<double> p;
  auto fill = [&](const MeasurementGroup& g, QuantizedGroup<double>& q) {
    q.A = select_rows(phi, g.rows);
    q.y = g.values;
    q.epsilon = default_epsilon(g.delta, static_cast<Index>(g.rows.size()), kappa);
    q.delta = g.consistent ? g.delta : std::numeric_limits<double>::infinity();
  };
  fill(in.groups[0], p.group1);
  if (in.groups.size() == 2) {
    fill(in.groups[1], p.group2);
  } else {
    p.group2.A.resize(0, phi.cols());
    p.group2.y.resize(0);
  }
  return gq_side_solve(p, opts);
}

SolverResult<double> decode_received(const std::optional<Description>& first,
                                     const std::optional<Description>& second,
                                     const Matrix& phi, const MdsqCodebook* cb, double kappa,
                                     const SolverOptions& opts) {
  if (!first && !second) {
    SolverResult<double> none;
    none.theta_hat = Vector::Zero(phi.cols());
    none.status = SolverStatus::converged;
    none.converged = true;
    return none;
  }
  const Scheme scheme = first ? first->scheme : second->scheme;
  if (scheme == Scheme::mdsq && cb == nullptr) throw ConfigError("MDSQ decoding needs a codebook");
  if (first && second) {
    const auto in = scheme == Scheme::mdsq ? mdsq_central_merge(*first, *second, *cb)
                                           : gq_central_merge(*first, *second);
    return decode_bpdn(in, phi, kappa, opts);
  }
  const Description& d = first ? *first : *second;
  switch (scheme) {
    case Scheme::gq: return decode_gq_side(gq_side_extract(d), phi, kappa, opts);
    case Scheme::split: return decode_bpdn(gq_side_extract(d), phi, kappa, opts);
    case Scheme::mdsq: return decode_bpdn(mdsq_side_extract(d, *cb), phi, kappa, opts);
  }
  throw ConfigError("unknown scheme");
}

namespace {

DescriptionPair encode(const Measurements& y, const SchemeConfig& s, const MdsqCodebook* cb) {
  switch (s.scheme) {
    case Scheme::gq: return gq_encode(y, s.fine_bits, s.coarse_bits);
    case Scheme::split: return split_encode(y, s.fine_bits);
    case Scheme::mdsq: return mdsq_encode_vec(y, *cb);
  }
  throw ConfigError("unknown scheme");
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, const ConfigPoint& point,
                                   std::size_t config_index, std::size_t trial,
                                   const MdsqCodebook* cb) {
  TrialRecord proto;
  proto.config_index = config_index;
  proto.point = point;
  proto.trial = trial;
  proto.signal_seed = derive_seed(cfg.master_seed, trial, SeedPurpose::signal);
  proto.matrix_seed = derive_seed(cfg.master_seed, trial, SeedPurpose::matrix);
  proto.channel_seed = derive_seed(cfg.master_seed, 0, SeedPurpose::channel);

  const auto x = gen_sparse_signal({cfg.n, cfg.k, cfg.sigma_x2, proto.signal_seed});
  const auto phi = gen_sensing_matrix(point.m, cfg.n, proto.matrix_seed);
  const auto y = sense(phi, x);
  const auto pair = encode(y, point.scheme, cb);

  std::vector<Received> cases;
  if (cfg.loss_p) {
    cases.push_back(transmit(pair, LossModel{*cfg.loss_p, proto.channel_seed}, trial));
  } else {
    cases = {Received{true, false}, Received{false, true}, Received{true, true}};
  }

  std::vector<TrialRecord> out;
  for (const auto& rx : cases) {
    TrialRecord rec = proto;
    rec.received_mask = rx.mask();
    rec.decoder_case = rx.count() == 2 ? DecoderCase::central
                       : rx.first      ? DecoderCase::side1
                       : rx.second     ? DecoderCase::side2
                                       : DecoderCase::lost_all;
    if (rec.decoder_case == DecoderCase::lost_all) {
      rec.rel_distortion = 1.0;
      rec.sq_rel_distortion = 1.0;
      rec.status = "skipped";
      out.push_back(rec);
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto res = decode_received(rx.first ? std::optional(pair.first) : std::nullopt,
                                       rx.second ? std::optional(pair.second) : std::nullopt,
                                       phi.entries, cb, cfg.kappa, cfg.solver);
      rec.rel_distortion = relative_distortion(x.x(), res.theta_hat);
      rec.sq_rel_distortion = rec.rel_distortion * rec.rel_distortion;
      rec.iterations = res.iterations;
      rec.status = to_string(res.status);
      rec.boxes_dropped = res.boxes_dropped;
      if (!std::isfinite(rec.rel_distortion)) rec.status = "error: non-finite reconstruction";
    } catch (const std::exception& e) {
      rec.rel_distortion = 1.0;
      rec.sq_rel_distortion = 1.0;
      rec.status = std::string("error: ") + e.what();
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(rec);
  }
  return out;
}

}  // namespace

std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto points = expand(cfg);

  std::vector<std::optional<MdsqCodebook>> codebooks(points.size());
  for (std::size_t c = 0; c < points.size(); ++c) {
    if (points[c].scheme.scheme == Scheme::mdsq) {
      codebooks[c] = train_codebook(cfg, points[c].scheme, points[c].m);
    }
  }

  const std::size_t jobs = points.size() * cfg.trials;
  std::vector<std::vector<TrialRecord>> results(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t c = j / cfg.trials;
      const std::size_t t = j % cfg.trials;
      results[j] = run_trial(cfg, points[c], c, t, codebooks[c] ? &*codebooks[c] : nullptr);
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  // Job order is (config, trial); within a trial, cases are emitted in order.
  std::vector<TrialRecord> out;
  for (auto& r : results) {
    std::sort(r.begin(), r.end(), [](const TrialRecord& a, const TrialRecord& b) {
      return a.decoder_case < b.decoder_case;
    });
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

MeanCi mean_ci(const std::vector<double>& values) {
  MeanCi out;
  out.count = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    out.half_width = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
  }
  return out;
}

std::vector<CaseSummary> summarize(const std::vector<TrialRecord>& records) {
  std::map<std::pair<std::size_t, DecoderCase>, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) groups[{r.config_index, r.decoder_case}].push_back(&r);
  std::vector<CaseSummary> out;
  for (const auto& [key, recs] : groups) {
    CaseSummary s;
    s.config_index = key.first;
    s.decoder_case = key.second;
    s.point = recs.front()->point;
    std::vector<double> rel, sq;
    for (const auto* r : recs) {
      rel.push_back(r->rel_distortion);
      sq.push_back(r->sq_rel_distortion);
      if (r->failed()) ++s.failures;
    }
    s.rel = mean_ci(rel);
    s.sq_rel = mean_ci(sq);
    out.push_back(s);
  }
  return out;
}

}  // namespace csmdc
