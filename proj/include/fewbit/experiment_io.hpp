#pragma once

// Config files, presets, and run outputs. The config is a flat JSON document
// whose keys mirror ExperimentConfig; unknown keys are rejected by name.
// Run outputs: metrics.csv (fixed column order, 9 significant digits),
// curve-<algorithm>.dat plot data, manifest.json echoing the resolved config.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fewbit/sim.hpp"

namespace fewbit {

struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string f, const std::string& msg)
      : std::runtime_error("config field '" + f + "': " + msg), field(std::move(f)) {}
};

namespace io_detail {

template <typename T>
std::vector<T> scalar_or_array(const nlohmann::json& j, const std::string& field) {
  std::vector<T> out;
  try {
    if (j.is_array()) {
      for (const auto& v : j) out.push_back(v.get<T>());
    } else {
      out.push_back(j.get<T>());
    }
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(field, "expected a value or array of values");
  }
  if (out.empty()) throw ConfigError(field, "array must be non-empty");
  return out;
}

}  // namespace io_detail

inline ExperimentConfig parse_config_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!j.is_object()) throw ConfigError("<document>", "top level must be an object");

  static const std::set<std::string> known = {
      "k",      "m",          "t_p",        "t_d",      "bits",      "constellation",
      "channel", "snr_db",    "algorithms", "trials",   "base_seed", "cdf_mode",
      "lite",    "step_size", "max_iters"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(it.key(), "unknown key");
  }

  ExperimentConfig cfg;
  auto get_int = [&](const char* f, int& dst) {
    if (!j.contains(f)) return;
    if (!j[f].is_number_integer()) throw ConfigError(f, "expected an integer");
    dst = j[f].get<int>();
  };
  get_int("k", cfg.k);
  get_int("m", cfg.m);
  get_int("t_p", cfg.t_p);
  get_int("trials", cfg.trials);
  get_int("max_iters", cfg.max_iters);
  if (j.contains("t_d")) cfg.t_d = io_detail::scalar_or_array<int>(j["t_d"], "t_d");
  if (j.contains("bits")) cfg.bits = io_detail::scalar_or_array<int>(j["bits"], "bits");
  if (j.contains("snr_db")) cfg.snr_db = io_detail::scalar_or_array<double>(j["snr_db"], "snr_db");
  if (j.contains("constellation")) {
    if (!j["constellation"].is_string()) throw ConfigError("constellation", "expected a string");
    cfg.constellation = j["constellation"].get<std::string>();
  }
  if (j.contains("base_seed")) {
    if (!j["base_seed"].is_number_unsigned() && !j["base_seed"].is_number_integer()) {
      throw ConfigError("base_seed", "expected an unsigned integer");
    }
    cfg.base_seed = j["base_seed"].get<uint64_t>();
  }
  if (j.contains("algorithms")) {
    if (!j["algorithms"].is_array()) throw ConfigError("algorithms", "expected an array");
    cfg.algorithms.clear();
    for (const auto& v : j["algorithms"]) {
      if (!v.is_string()) throw ConfigError("algorithms", "expected strings");
      try {
        cfg.algorithms.push_back(algorithm_by_name(v.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("algorithms", e.what());
      }
    }
  }
  if (j.contains("channel")) {
    const auto& ch = j["channel"];
    if (ch.is_string()) {
      std::string s = ch.get<std::string>();
      if (s == "iid") {
        cfg.channel.kind = ChannelKind::IID;
      } else if (s == "laplacian") {
        cfg.channel.kind = ChannelKind::Laplacian;
      } else {
        throw ConfigError("channel", "expected 'iid' or 'laplacian'");
      }
    } else if (ch.is_object()) {
      for (auto it = ch.begin(); it != ch.end(); ++it) {
        if (it.key() != "kind" && it.key() != "spread_deg" && it.key() != "aoa_range_deg") {
          throw ConfigError("channel." + it.key(), "unknown key");
        }
      }
      std::string kind = ch.value("kind", "iid");
      if (kind == "iid") {
        cfg.channel.kind = ChannelKind::IID;
      } else if (kind == "laplacian") {
        cfg.channel.kind = ChannelKind::Laplacian;
      } else {
        throw ConfigError("channel.kind", "expected 'iid' or 'laplacian'");
      }
      if (ch.contains("spread_deg")) cfg.channel.spread_deg = ch["spread_deg"].get<double>();
      if (ch.contains("aoa_range_deg")) {
        if (!ch["aoa_range_deg"].is_array() || ch["aoa_range_deg"].size() != 2) {
          throw ConfigError("channel.aoa_range_deg", "expected [lo, hi]");
        }
        cfg.channel.aoa_min_deg = ch["aoa_range_deg"][0].get<double>();
        cfg.channel.aoa_max_deg = ch["aoa_range_deg"][1].get<double>();
      }
    } else {
      throw ConfigError("channel", "expected a string or object");
    }
  }
  if (j.contains("cdf_mode")) {
    std::string s = j["cdf_mode"].is_string() ? j["cdf_mode"].get<std::string>() : "";
    if (s == "logistic") {
      cfg.cdf_mode = CdfMode::LogisticSurrogate;
    } else if (s == "exact-normal") {
      cfg.cdf_mode = CdfMode::ExactNormal;
    } else {
      throw ConfigError("cdf_mode", "expected 'logistic' or 'exact-normal'");
    }
  }
  if (j.contains("lite")) {
    if (!j["lite"].is_boolean()) throw ConfigError("lite", "expected a boolean");
    cfg.lite = j["lite"].get<bool>();
  }
  if (j.contains("step_size")) {
    if (!j["step_size"].is_number()) throw ConfigError("step_size", "expected a number");
    cfg.step_size = j["step_size"].get<double>();
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    // validate() messages look like "config: <field> <explanation>".
    std::string what = e.what();
    std::string field = what;
    const std::string prefix = "config: ";
    if (what.rfind(prefix, 0) == 0) {
      size_t start = prefix.size();
      size_t end = what.find(' ', start);
      field = what.substr(start, end == std::string::npos ? std::string::npos : end - start);
    }
    throw ConfigError(field, what);
  }
  return cfg;
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["k"] = cfg.k;
  j["m"] = cfg.m;
  j["t_p"] = cfg.resolved_tp();
  j["t_d"] = cfg.t_d;
  j["bits"] = cfg.bits;
  j["constellation"] = cfg.constellation;
  if (cfg.channel.kind == ChannelKind::IID) {
    j["channel"] = {{"kind", "iid"}};
  } else {
    j["channel"] = {{"kind", "laplacian"},
                    {"spread_deg", cfg.channel.spread_deg},
                    {"aoa_range_deg", {cfg.channel.aoa_min_deg, cfg.channel.aoa_max_deg}}};
  }
  j["snr_db"] = cfg.snr_db;
  std::vector<std::string> names;
  for (Algorithm a : cfg.algorithms) names.push_back(algorithm_name(a));
  j["algorithms"] = names;
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["cdf_mode"] = cfg.cdf_mode == CdfMode::LogisticSurrogate ? "logistic" : "exact-normal";
  if (cfg.lite.has_value()) {
    j["lite"] = *cfg.lite;
  } else {
    j["lite"] = nullptr;  // per-algorithm default (lite for lmmse-qvb-jed)
  }
  if (cfg.step_size.has_value()) j["step_size"] = *cfg.step_size;
  j["max_iters"] = cfg.max_iters;
  return j;
}

// The six built-in sweeps mirror the reference experiment set at desk-scale
// trial counts; every field can be overridden from the command line.
inline ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.trials = 2000;
  cfg.t_p = 32;
  if (name == "fig-detect-iid") {
    cfg.k = 16, cfg.m = 32;
    cfg.constellation = "qpsk";
    cfg.bits = {3};
    cfg.channel.kind = ChannelKind::IID;
    cfg.snr_db = {0, 5, 10, 15, 20, 25, 30};
    cfg.algorithms = {Algorithm::ConvQVB, Algorithm::MFQVB, Algorithm::LMMSEQVB};
  } else if (name == "fig-detect-corr") {
    cfg.k = 16, cfg.m = 64;
    cfg.constellation = "16qam";
    cfg.bits = {3};
    cfg.channel.kind = ChannelKind::Laplacian;
    cfg.snr_db = {5, 10, 15, 20, 25, 30};
    cfg.algorithms = {Algorithm::ConvQVB, Algorithm::MFQVB, Algorithm::LMMSEQVB};
  } else if (name == "fig-jed-iid") {
    cfg.k = 16, cfg.m = 32;
    cfg.constellation = "qpsk";
    cfg.bits = {3};
    cfg.channel.kind = ChannelKind::IID;
    cfg.snr_db = {0, 5, 10, 15, 20};
    cfg.algorithms = {Algorithm::ConvJED, Algorithm::MFJED, Algorithm::LMMSEJED};
  } else if (name == "fig-jed-corr") {
    cfg.k = 16, cfg.m = 64;
    cfg.constellation = "16qam";
    cfg.bits = {3};
    cfg.channel.kind = ChannelKind::Laplacian;
    cfg.snr_db = {10, 15, 20, 25, 30};
    cfg.algorithms = {Algorithm::ConvJED, Algorithm::MFJED, Algorithm::LMMSEJED};
  } else if (name == "fig-ser-vs-td") {
    cfg.k = 16, cfg.m = 64;
    cfg.constellation = "16qam";
    cfg.bits = {3};
    cfg.channel.kind = ChannelKind::Laplacian;
    cfg.snr_db = {10, 15};
    cfg.t_d = {20, 50, 100, 150};
    cfg.algorithms = {Algorithm::MFJED, Algorithm::LMMSEJED};
  } else if (name == "fig-ser-vs-bits") {
    cfg.k = 16, cfg.m = 64;
    cfg.constellation = "16qam";
    cfg.bits = {1, 2, 3, 4, 5, 6};
    cfg.channel.kind = ChannelKind::Laplacian;
    cfg.snr_db = {0, 5, 10, 15};
    cfg.algorithms = {Algorithm::MFJED, Algorithm::LMMSEJED};
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return cfg;
}

inline std::string format_sig9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Fixed schema; nmse is blank for known-CSI rows. wall_ms is blank always:
// output must be byte-identical across reruns and worker counts, so measured
// time cannot appear in it (timing goes to stderr instead).
inline std::string metrics_csv(const MetricsTable& table) {
  std::ostringstream os;
  os << "algorithm,channel,snr_db,bits,t_p,t_d,trials,symbols,errors,ser,nmse,fail_rate,"
        "mean_iters,wall_ms\n";
  for (const MetricsRow& r : table.rows) {
    os << r.algorithm << ',' << r.channel << ',' << format_sig9(r.snr_db) << ',' << r.bits << ','
       << r.t_p << ',' << r.t_d << ',' << r.trials << ',' << r.symbols << ',' << r.errors << ','
       << format_sig9(r.ser) << ',' << (r.has_nmse ? format_sig9(r.nmse) : std::string()) << ','
       << format_sig9(r.fail_rate) << ',' << format_sig9(r.mean_iters) << ",\n";
  }
  return os.str();
}

inline void write_run_outputs(const MetricsTable& table, const ExperimentConfig& cfg,
                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream f(fs::path(out_dir) / "metrics.csv", std::ios::binary);
    f << metrics_csv(table);
  }
  {
    nlohmann::ordered_json manifest;
    manifest["config"] = config_to_json(cfg);
    manifest["base_seed"] = cfg.base_seed;
    std::ofstream f(fs::path(out_dir) / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << "\n";
  }
  for (Algorithm a : cfg.algorithms) {
    std::ofstream f(fs::path(out_dir) / (std::string("curve-") + algorithm_name(a) + ".dat"),
                    std::ios::binary);
    f << "# snr_db ser\n";
    bool multi = cfg.bits.size() > 1 || cfg.t_d.size() > 1;
    for (int b : cfg.bits) {
      for (int td : cfg.t_d) {
        if (multi) f << "\n\n# bits=" << b << " t_d=" << td << "\n";
        for (const MetricsRow& r : table.rows) {
          if (r.algorithm == algorithm_name(a) && r.bits == b && r.t_d == td) {
            f << format_sig9(r.snr_db) << ' ' << format_sig9(r.ser) << "\n";
          }
        }
      }
    }
  }
}

}  // namespace fewbit
