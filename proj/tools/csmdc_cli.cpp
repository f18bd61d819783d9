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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "csmdc/bounds.hpp"
#include "csmdc/codecs.hpp"
#include "csmdc/core_model.hpp"
#include "csmdc/error.hpp"
#include "csmdc/harness.hpp"
#include "csmdc/random.hpp"
#include "csmdc/signal_file.hpp"

using namespace csmdc;

namespace {

enum Exit { kOk = 0, kInvalidConfig = 2, kIoError = 3, kParseError = 4 };

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

std::pair<int, int> parse_r_range(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      const int r = std::stoi(s);
      return {r, r};
    }
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::logic_error&) {
    throw ConfigError("--R must be an integer or first:last");
  }
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out;
  bool json = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed");
  app->add_option("--trials", c.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "Output path (default: stdout)");
  app->add_flag("--json", c.json, "Emit JSON instead of CSV");
}

void apply_common(HarnessConfig& cfg, const Common& c) {
  if (c.seed) cfg.experiment.master_seed = *c.seed;
  if (c.trials) cfg.experiment.trials = *c.trials;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple-description coding of compressed-sensing measurements"};
  app.require_subcommand(1);

  // gen
  Common gen_c;
  long gen_n = 256, gen_k = 10, gen_m = 50;
  double gen_sigma2 = 1.0;
  std::uint64_t gen_trial = 0;
  auto* gen = app.add_subcommand("gen", "Generate a sparse signal and its measurements");
  gen->add_option("--n", gen_n, "Signal length");
  gen->add_option("--k", gen_k, "Sparsity");
  gen->add_option("--m", gen_m, "Measurements");
  gen->add_option("--sigma2", gen_sigma2, "Variance of nonzero coefficients");
  gen->add_option("--trial", gen_trial, "Trial index used in seed derivation");
  add_common(gen, gen_c);

  // encode
  Common enc_c;
  std::string enc_in, enc_scheme = "gq";
  int enc_B = 6, enc_b = 2, enc_R = 8, enc_side_bits = 4, enc_spread = 1, enc_lloyd = kDefaultLloydIterations;
  auto* enc = app.add_subcommand("encode", "Encode measurements into two descriptions");
  enc->add_option("--in", enc_in, "Signal file from gen")->required();
  enc->add_option("--scheme", enc_scheme, "gq, split or mdsq")->check(CLI::IsMember({"gq", "split", "mdsq"}));
  enc->add_option("--B", enc_B, "GQ fine bits");
  enc->add_option("--b", enc_b, "GQ coarse bits");
  auto* enc_r_opt = enc->add_option("--R", enc_R, "SPLIT rate, or MDSQ side bits");
  auto* enc_sb_opt = enc->add_option("--side-bits", enc_side_bits, "MDSQ side bits");
  enc_r_opt->excludes(enc_sb_opt);
  enc->add_option("--spread", enc_spread, "MDSQ band spread");
  enc->add_option("--lloyd-iters", enc_lloyd, "MDSQ codebook refinement iterations");
  add_common(enc, enc_c);

  // transmit
  Common tx_c;
  std::string tx_d1, tx_d2;
  double tx_p = 0.0;
  std::uint64_t tx_trial = 0;
  auto* tx = app.add_subcommand("transmit", "Simulate independent losses of the two descriptions");
  tx->add_option("--d1", tx_d1, "Description 1")->required();
  tx->add_option("--d2", tx_d2, "Description 2")->required();
  tx->add_option("--p", tx_p, "Loss probability")->required();
  tx->add_option("--trial", tx_trial, "Trial index");
  add_common(tx, tx_c);

  // decode
  Common dec_c;
  std::string dec_d1, dec_d2, dec_cb, dec_ref;
  SolverOptions dec_opts;
  double dec_kappa = 1.0;
  auto* dec = app.add_subcommand("decode", "Reconstruct from the received descriptions");
  dec->add_option("--d1", dec_d1, "Description 1 file");
  dec->add_option("--d2", dec_d2, "Description 2 file");
  dec->add_option("--codebook", dec_cb, "MDSQ codebook file");
  dec->add_option("--ref", dec_ref, "Signal file to measure distortion against");
  dec->add_option("--kappa", dec_kappa, "Noise-ball scale");
  dec->add_option("--max-iters", dec_opts.max_iters, "Solver iteration cap");
  add_common(dec, dec_c);

  // sweep
  Common sw_c;
  std::string sw_config, sw_summary;
  bool sw_timing = false;
  auto* sw = app.add_subcommand("sweep", "Run a Monte Carlo sweep from a config file");
  sw->add_option("--config", sw_config, "Key-value config file")->required();
  sw->add_option("--summary", sw_summary, "Write per-case summary CSV here");
  sw->add_flag("--timing", sw_timing, "Include wall-clock seconds per record");
  add_common(sw, sw_c);

  // optimize
  Common opt_c;
  std::string opt_config;
  double opt_p = 0.0;
  std::optional<int> opt_rate;
  auto* opt = app.add_subcommand("optimize", "Select (B, b) for a loss probability");
  opt->add_option("--config", opt_config, "Key-value config file")->required();
  opt->add_option("--p", opt_p, "Loss probability in [0, 1)")->required();
  opt->add_option("--rate", opt_rate, "Total rate B + b");
  add_common(opt, opt_c);

  // bounds
  Common bd_c;
  BoundInputs bd_in;
  std::string bd_r = "1:8";
  std::optional<double> bd_mu, bd_dsm;
  auto* bd = app.add_subcommand("bounds", "Evaluate the rate-distortion bounds");
  bd->add_option("--n", bd_in.n, "Signal length");
  bd->add_option("--m", bd_in.m, "Measurements");
  bd->add_option("--k", bd_in.k, "Sparsity");
  bd->add_option("--sigma2", bd_in.sigma_x2, "Variance of nonzero coefficients");
  bd->add_option("--R", bd_r, "Rate or range first:last");
  bd->add_option("--mu", bd_mu, "Coherence (computed from a Gaussian matrix if absent)");
  bd->add_option("--dsm", bd_dsm, "Side quantizer MSE (estimated if absent)");
  add_common(bd, bd_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalidConfig;
  }

  try {
    if (*gen) {
      const std::uint64_t seed = gen_c.seed.value_or(1);
      const auto x = gen_sparse_signal({gen_n, gen_k, gen_sigma2, derive_seed(seed, gen_trial, SeedPurpose::signal)});
      const auto phi = gen_sensing_matrix(gen_m, gen_n, derive_seed(seed, gen_trial, SeedPurpose::matrix));
      const SignalFile f{x, sense(phi, x)};
      if (gen_c.out.empty()) throw ConfigError("gen: --out is required");
      write_file(gen_c.out, serialize_signal_file(f));
    } else if (*enc) {
      if (enc_c.out.empty()) throw ConfigError("encode: --out prefix is required");
      const auto f = parse_signal_file(read_file(enc_in));
      DescriptionPair pair;
      if (enc_scheme == "gq") {
        pair = gq_encode(f.measurements, enc_B, enc_b);
      } else if (enc_scheme == "split") {
        pair = split_encode(f.measurements, enc_R);
      } else {
        ExperimentConfig cfg;
        cfg.n = f.signal.n;
        cfg.k = f.signal.k;
        cfg.master_seed = enc_c.seed.value_or(1);
        cfg.lloyd_iters = enc_lloyd;
        const int side_bits = enc_r_opt->count() > 0 ? enc_R : enc_side_bits;
        const auto cb = train_codebook(cfg, SchemeConfig::mdsq(side_bits, enc_spread), f.measurements.m);
        write_file(enc_c.out + ".cb", serialize_codebook(cb));
        pair = mdsq_encode_vec(f.measurements, cb);
      }
      write_file(enc_c.out + ".d1", serialize(pair.first));
      write_file(enc_c.out + ".d2", serialize(pair.second));
    } else if (*tx) {
      DescriptionPair pair{parse(read_file(tx_d1)), parse(read_file(tx_d2))};
      const auto rx = transmit(pair, LossModel{tx_p, tx_c.seed.value_or(1)}, tx_trial);
      std::string text;
      if (rx.first) text += tx_d1 + "\n";
      if (rx.second) text += tx_d2 + "\n";
      if (rx.count() == 0) text += "none\n";
      emit(text, tx_c.out);
    } else if (*dec) {
      std::optional<Description> d1, d2;
      if (!dec_d1.empty()) d1 = parse(read_file(dec_d1));
      if (!dec_d2.empty()) d2 = parse(read_file(dec_d2));
      if (!d1 && !d2) throw ConfigError("decode: give --d1 and/or --d2");
      const Description& any = d1 ? *d1 : *d2;
      if (d1 && d1->desc_id != 1) throw ConfigError("decode: --d1 is not description 1");
      if (d2 && d2->desc_id != 2) throw ConfigError("decode: --d2 is not description 2");
      std::optional<MdsqCodebook> cb;
      if (!dec_cb.empty()) cb = parse_codebook(read_file(dec_cb));
      const auto phi = gen_sensing_matrix(any.m, any.n, any.matrix_seed);
      const auto res = decode_received(d1, d2, phi.entries, cb ? &*cb : nullptr, dec_kappa, dec_opts);
      std::string text;
      for (Index i = 0; i < res.theta_hat.size(); ++i) text += format_double(res.theta_hat(i)) + "\n";
      emit(text, dec_c.out);
      std::cerr << "status " << to_string(res.status) << ", iterations " << res.iterations;
      if (!dec_ref.empty()) {
        const auto ref = parse_signal_file(read_file(dec_ref));
        std::cerr << ", relative distortion " << format_double(relative_distortion(ref.signal.x(), res.theta_hat));
      }
      std::cerr << '\n';
    } else if (*sw) {
      auto cfg = load_config(sw_config);
      apply_common(cfg, sw_c);
      cfg.experiment.validate();
      const auto records = run_sweep(cfg.experiment);
      const CsvOptions opts{sw_timing};
      const std::string out = !sw_c.out.empty() ? sw_c.out : cfg.out.value_or("");
      emit(sw_c.json ? records_json(records, opts) : records_csv(records, opts), out);
      const auto summary = summarize(records);
      if (!sw_summary.empty()) write_text_file(sw_summary, summary_csv(summary));
      std::cerr << summary_text(summary);
    } else if (*opt) {
      auto cfg = load_config(opt_config);
      apply_common(cfg, opt_c);
      if (opt_rate) cfg.rate = opt_rate;
      const auto rep = run_optimizer(cfg, opt_p);
      const std::string out = !opt_c.out.empty() ? opt_c.out : cfg.out.value_or("");
      emit(curve_csv(rep), out);
      std::cerr << optimizer_text(rep);
    } else if (*bd) {
      const auto [r0, r1] = parse_r_range(bd_r);
      bd_in.mu = bd_mu;
      bd_in.d_sm_side = bd_dsm;
      bd_in.matrix_seed = bd_c.seed.value_or(1);
      const auto rows = run_bounds(bd_in, r0, r1);
      emit(bounds_csv(rows), bd_c.out);
      std::cerr << bounds_text(bd_in, rows);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  }
  return kOk;
}
