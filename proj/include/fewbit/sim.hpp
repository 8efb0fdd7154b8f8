#pragma once

// Monte Carlo experiment engine. A trial is a pure function of
// (config, physical grid point, seed): it samples one block-fading frame,
// quantizes it, and runs the requested algorithm. Seeds are derived from a
// stable hash of the physical point only -- never the algorithm -- so every
// algorithm at a grid point sees exactly the same frames and comparisons are
// paired by construction. Aggregation is slot-indexed, which makes sweep
// output independent of worker count and scheduling.

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fewbit/channel.hpp"
#include "fewbit/constellation.hpp"
#include "fewbit/detect.hpp"
#include "fewbit/jed.hpp"
#include "fewbit/quantizer.hpp"
#include "fewbit/rng.hpp"

namespace fewbit {

inline double snr_to_noise_var(double snr_db, int k) {
  if (k < 1) throw std::invalid_argument("snr_to_noise_var: K must be >= 1");
  return double(k) / std::pow(10.0, snr_db / 10.0);
}

enum class Algorithm { MFQVB, LMMSEQVB, ConvQVB, MFJED, LMMSEJED, ConvJED };

inline bool is_jed(Algorithm a) {
  return a == Algorithm::MFJED || a == Algorithm::LMMSEJED || a == Algorithm::ConvJED;
}

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::MFQVB: return "mf-qvb";
    case Algorithm::LMMSEQVB: return "lmmse-qvb";
    case Algorithm::ConvQVB: return "conv-qvb";
    case Algorithm::MFJED: return "mf-qvb-jed";
    case Algorithm::LMMSEJED: return "lmmse-qvb-jed";
    case Algorithm::ConvJED: return "conv-qvb-jed";
  }
  return "?";
}

inline Algorithm algorithm_by_name(const std::string& s) {
  for (Algorithm a : {Algorithm::MFQVB, Algorithm::LMMSEQVB, Algorithm::ConvQVB, Algorithm::MFJED,
                      Algorithm::LMMSEJED, Algorithm::ConvJED}) {
    if (s == algorithm_name(a)) return a;
  }
  throw std::invalid_argument("unknown algorithm: " + s);
}

enum class ChannelKind { IID, Laplacian };

struct ChannelSpec {
  ChannelKind kind = ChannelKind::IID;
  double spread_deg = 10.0;
  double aoa_min_deg = -60.0;
  double aoa_max_deg = 60.0;

  std::string label() const {
    if (kind == ChannelKind::IID) return "iid";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "laplacian-%gdeg", spread_deg);
    return buf;
  }
};

struct ExperimentConfig {
  int k = 16;
  int m = 64;
  int t_p = 0;  // 0 means the default T_p = 2K
  std::vector<int> t_d = {100};
  std::vector<int> bits = {3};
  std::string constellation = "qpsk";
  ChannelSpec channel;
  std::vector<double> snr_db = {10.0};
  std::vector<Algorithm> algorithms = {Algorithm::MFQVB};
  int trials = 2000;
  uint64_t base_seed = 1;
  CdfMode cdf_mode = CdfMode::LogisticSurrogate;
  std::optional<bool> lite;
  std::optional<double> step_size;  // overrides the calibrated quantizer step
  int max_iters = 50;

  int resolved_tp() const { return t_p > 0 ? t_p : 2 * k; }

  void validate() const {
    if (k < 1) throw std::invalid_argument("config: k must be >= 1");
    if (m < 1) throw std::invalid_argument("config: m must be >= 1");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("config: max_iters must be >= 1");
    if (snr_db.empty()) throw std::invalid_argument("config: snr_db must be non-empty");
    if (bits.empty()) throw std::invalid_argument("config: bits must be non-empty");
    if (t_d.empty()) throw std::invalid_argument("config: t_d must be non-empty");
    if (algorithms.empty()) throw std::invalid_argument("config: algorithms must be non-empty");
    for (int b : bits) {
      if (b < 1 || b > 12) throw std::invalid_argument("config: bits out of [1,12]");
    }
    for (int td : t_d) {
      if (td < 1) throw std::invalid_argument("config: t_d must be >= 1");
    }
    if (t_p != 0 && t_p < k) throw std::invalid_argument("config: t_p must be >= k");
    if (step_size && !(*step_size > 0.0)) throw std::invalid_argument("config: step_size must be > 0");
    Constellation::by_name(constellation);
  }
};

// One physical grid point; the algorithm axis is deliberately not part of it.
struct GridPoint {
  double snr_db = 10.0;
  int bits = 3;
  int t_d = 100;
};

struct TrialRecord {
  long symbols = 0;
  long errors = 0;
  double nmse = 0.0;
  bool has_nmse = false;
  int iters = 0;
  bool failed = false;
  std::string error;
};

inline uint64_t stable_string_hash(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

// Frame seed for (cfg, point, trial). Algorithms consume no randomness, so
// keeping them out of the hash is what makes paired-seed comparisons valid.
inline uint64_t trial_seed(const ExperimentConfig& cfg, const GridPoint& pt, int trial_idx) {
  uint64_t h = splitmix64(cfg.base_seed);
  h = hash_combine(h, uint64_t(cfg.k));
  h = hash_combine(h, uint64_t(cfg.m));
  h = hash_combine(h, uint64_t(cfg.resolved_tp()));
  h = hash_combine(h, uint64_t(pt.t_d));
  h = hash_combine(h, uint64_t(pt.bits));
  h = hash_combine(h, pt.snr_db);
  h = hash_combine(h, stable_string_hash(cfg.constellation));
  h = hash_combine(h, uint64_t(cfg.channel.kind == ChannelKind::IID ? 0 : 1));
  if (cfg.channel.kind == ChannelKind::Laplacian) {
    h = hash_combine(h, cfg.channel.spread_deg);
    h = hash_combine(h, cfg.channel.aoa_min_deg);
    h = hash_combine(h, cfg.channel.aoa_max_deg);
  }
  if (cfg.step_size) h = hash_combine(h, *cfg.step_size);
  h = hash_combine(h, uint64_t(trial_idx));
  return h;
}

namespace detail {

struct FrameSetup {
  ChannelModel model;
  FrameRealization frame;
  QuantizerSpec quant;
  QuantizedBlock yp, yd;
  double n0 = 0.0;
};

inline FrameSetup make_frame(const ExperimentConfig& cfg, const GridPoint& pt, uint64_t seed) {
  FrameSetup fs;
  fs.n0 = snr_to_noise_var(pt.snr_db, cfg.k);
  Rng rng(seed);
  if (cfg.channel.kind == ChannelKind::IID) {
    fs.model = ChannelModel::iid(cfg.m, cfg.k);
  } else {
    const double d2r = std::numbers::pi / 180.0;
    std::vector<CMat> covs;
    covs.reserve(cfg.k);
    for (int i = 0; i < cfg.k; ++i) {
      double aoa = cfg.channel.aoa_min_deg +
                   (cfg.channel.aoa_max_deg - cfg.channel.aoa_min_deg) * rng.uniform();
      covs.push_back(laplacian_covariance(cfg.m, aoa * d2r, cfg.channel.spread_deg * d2r));
    }
    fs.model = ChannelModel::correlated(std::move(covs));
  }
  Constellation cons = Constellation::by_name(cfg.constellation);
  fs.frame = sample_frame(fs.model, cons, cfg.resolved_tp(), pt.t_d, fs.n0, rng);
  // Received power per complex sample is K + N0 under unit-diagonal channel
  // covariances and unit-energy symbols; the step is calibrated analytically.
  double step = cfg.step_size.value_or(calibrate_step_size(double(cfg.k) + fs.n0, pt.bits));
  fs.quant = build_quantizer(pt.bits, step);
  fs.yp = quantize(fs.frame.Rp, fs.quant);
  fs.yd = quantize(fs.frame.Rd, fs.quant);
  return fs;
}

inline TrialRecord run_algorithm_on_frame(const ExperimentConfig& cfg, Algorithm algo,
                                          const FrameSetup& fs) {
  const Constellation cons = Constellation::by_name(cfg.constellation);
  TrialRecord rec;
  try {
    if (is_jed(algo)) {
      JedOptions opts;
      opts.max_iters = cfg.max_iters;
      opts.cdf_mode = cfg.cdf_mode;
      opts.lite = cfg.lite;
      JedResult res;
      const std::vector<CMat>& cs = fs.model.covs;  // empty => identity priors
      switch (algo) {
        case Algorithm::MFJED:
          opts.algorithm = JedAlgo::MFJED;
          res = JedEngine(fs.yp, fs.yd, fs.frame.Xp, cs, cons, opts).run();
          break;
        case Algorithm::LMMSEJED:
          opts.algorithm = JedAlgo::LMMSEJED;
          res = JedEngine(fs.yp, fs.yd, fs.frame.Xp, cs, cons, opts).run();
          break;
        default:
          opts.algorithm = JedAlgo::ConvJED;
          res = JedEngine(fs.yp, fs.yd, fs.frame.Xp, cs, cons, opts, fs.n0).run();
      }
      rec.symbols = long(fs.frame.Xd_idx.size());
      rec.errors = (res.Xd_idx.array() != fs.frame.Xd_idx.array()).count();
      rec.nmse = (fs.frame.H - res.H_hat).squaredNorm() / fs.frame.H.squaredNorm();
      rec.has_nmse = true;
      rec.iters = res.iters_run;
    } else {
      DetectorOptions opts;
      opts.max_iters = cfg.max_iters;
      opts.cdf_mode = cfg.cdf_mode;
      long iters_total = 0;
      for (Eigen::Index t = 0; t < fs.frame.Xd.cols(); ++t) {
        DetectionResult res;
        switch (algo) {
          case Algorithm::MFQVB:
            res = mf_qvb_detect(fs.yd, t, fs.frame.H, cons, opts);
            break;
          case Algorithm::LMMSEQVB:
            res = lmmse_qvb_detect(fs.yd, t, fs.frame.H, cons, opts);
            break;
          default:
            res = conv_qvb_detect(fs.yd, t, fs.frame.H, cons, fs.n0, opts);
        }
        for (int i = 0; i < cfg.k; ++i) {
          rec.symbols += 1;
          if (res.hard_idx[i] != fs.frame.Xd_idx(i, t)) rec.errors += 1;
        }
        iters_total += res.iters_run;
      }
      rec.iters = fs.frame.Xd.cols() > 0 ? int(iters_total / fs.frame.Xd.cols()) : 0;
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace detail

// Deterministic function of (cfg, algorithm, point, seed).
inline TrialRecord run_trial(const ExperimentConfig& cfg, Algorithm algo, const GridPoint& pt,
                             uint64_t seed) {
  detail::FrameSetup fs = detail::make_frame(cfg, pt, seed);
  return detail::run_algorithm_on_frame(cfg, algo, fs);
}

// ---- exhaustive MAP oracle ---------------------------------------------------
//
// Enumerates S^K in lexicographic index order and maximizes
// prior * prod_m P(bin_m | (Hx)_m) in the log domain. Exact by construction;
// ties resolve to the lexicographically smallest index vector because only a
// strictly larger score replaces the incumbent.

inline std::vector<int> map_oracle_detect(const QuantizedBlock& obs, Eigen::Index col,
                                          const CMat& h, const Constellation& cons, double n0) {
  const Eigen::Index m = h.rows();
  const Eigen::Index k = h.cols();
  const size_t ncand = cons.size();
  double combos = std::pow(double(ncand), double(k));
  if (combos > 65536.0) throw TooLarge("map_oracle_detect: |S|^K exceeds 65536");
  if (!(n0 > 0.0)) throw std::invalid_argument("map_oracle_detect: N0 must be positive");

  const double scale = std::sqrt(2.0 / n0);
  std::vector<double> log_prior(ncand);
  for (size_t a = 0; a < ncand; ++a) {
    log_prior[a] = std::log(std::max(cons.priors()[a], 1e-300));
  }

  auto log_bin_prob = [&](double lo, double up, double s) {
    double a = (lo == -kInf) ? -kInf : scale * (lo - s);
    double b = (up == kInf) ? kInf : scale * (up - s);
    double z = norm_cdf_diff(a, b);
    return z > 0.0 ? std::log(z) : -kInf;
  };

  std::vector<int> idx(k, 0), best(k, 0);
  double best_score = -kInf;
  CVec s = CVec::Zero(m);  // running Hx for the current candidate
  for (Eigen::Index i = 0; i < k; ++i) s += h.col(i) * cons.points()[0];

  while (true) {
    double score = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) score += log_prior[idx[i]];
    for (Eigen::Index r = 0; r < m; ++r) {
      score += log_bin_prob(obs.lo_re(r, col), obs.up_re(r, col), s[r].real());
      score += log_bin_prob(obs.lo_im(r, col), obs.up_im(r, col), s[r].imag());
      if (score == -kInf) break;
    }
    if (score > best_score) {
      best_score = score;
      best = idx;
    }
    // odometer increment, least-significant digit last => lexicographic order
    Eigen::Index pos = k - 1;
    while (pos >= 0) {
      if (idx[pos] + 1 < int(ncand)) {
        s += h.col(pos) * (cons.points()[idx[pos] + 1] - cons.points()[idx[pos]]);
        idx[pos] += 1;
        break;
      }
      s += h.col(pos) * (cons.points()[0] - cons.points()[idx[pos]]);
      idx[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return best;
}

// ---- sweep -------------------------------------------------------------------

struct MetricsRow {
  std::string algorithm;
  std::string channel;
  double snr_db = 0.0;
  int bits = 0;
  int t_p = 0;
  int t_d = 0;
  long trials = 0;
  long symbols = 0;
  long errors = 0;
  double ser = 0.0;
  double nmse = 0.0;
  bool has_nmse = false;
  long failures = 0;
  double fail_rate = 0.0;
  double mean_iters = 0.0;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
};

inline int worker_count() {
  if (const char* env = std::getenv("FEWBIT_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

// Runs f(i) for i in [0, n) on a bounded worker pool. Work items write to
// caller-owned slots, so the result is schedule-independent.
template <typename F>
void parallel_for(long n, F&& f) {
  int workers = std::min<long>(worker_count(), n);
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        long i = next.fetch_add(1);
        if (i >= n) return;
        f(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// All requested algorithms run against the same frame per (point, trial); the
// frame is a function of the physical point and trial index only.
inline MetricsTable run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<GridPoint> points;
  for (int b : cfg.bits) {
    for (int td : cfg.t_d) {
      for (double snr : cfg.snr_db) points.push_back({snr, b, td});
    }
  }
  const long n_algo = long(cfg.algorithms.size());
  const long n_pts = long(points.size());
  const long n_work = n_pts * cfg.trials;

  std::vector<TrialRecord> records(size_t(n_work * n_algo));
  parallel_for(n_work, [&](long w) {
    long p = w / cfg.trials;
    int trial = int(w % cfg.trials);
    detail::FrameSetup fs = detail::make_frame(cfg, points[p], trial_seed(cfg, points[p], trial));
    for (long a = 0; a < n_algo; ++a) {
      records[size_t((p * n_algo + a) * cfg.trials + trial)] =
          detail::run_algorithm_on_frame(cfg, cfg.algorithms[a], fs);
    }
  });

  MetricsTable table;
  for (long a = 0; a < n_algo; ++a) {
    for (long p = 0; p < n_pts; ++p) {
      MetricsRow row;
      row.algorithm = algorithm_name(cfg.algorithms[a]);
      row.channel = cfg.channel.label();
      row.snr_db = points[p].snr_db;
      row.bits = points[p].bits;
      row.t_p = cfg.resolved_tp();
      row.t_d = points[p].t_d;
      row.trials = cfg.trials;
      double nmse_sum = 0.0;
      long nmse_n = 0, iters_sum = 0, ok = 0;
      for (int t = 0; t < cfg.trials; ++t) {
        const TrialRecord& rec = records[size_t((p * n_algo + a) * cfg.trials + t)];
        if (rec.failed) {
          row.failures += 1;
          continue;
        }
        ok += 1;
        row.symbols += rec.symbols;
        row.errors += rec.errors;
        iters_sum += rec.iters;
        if (rec.has_nmse) {
          nmse_sum += rec.nmse;
          nmse_n += 1;
        }
      }
      row.ser = row.symbols > 0 ? double(row.errors) / double(row.symbols) : 0.0;
      row.fail_rate = double(row.failures) / double(cfg.trials);
      row.mean_iters = ok > 0 ? double(iters_sum) / double(ok) : 0.0;
      if (nmse_n > 0) {
        row.nmse = nmse_sum / double(nmse_n);
        row.has_nmse = true;
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace fewbit
