#include "bdrelay/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bdrelay/benchmarks.hpp"
#include "bdrelay/error.hpp"

namespace bdrelay {

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double tdbc_power_residual(const RateReport& r, double p_total) {
  return std::abs(r.avg_power - p_total) / p_total;
}

SweepRow proposed_row(const RunSpec& spec, const ChannelTrace& trace, double pt_db,
                      CalibrationCache* cache) {
  CalibrationConfig cfg;
  cfg.stats = trace.stats();
  cfg.p_total = db_to_linear(pt_db);
  cfg.n_slots = spec.n_slots;
  cfg.seed = spec.seed;
  cfg.tol_rate = spec.tol_rate;
  cfg.tol_power = spec.tol_power;
  cfg.max_iters = spec.max_iters;
  const CalibrationResult cal = cache ? cache->get(cfg, trace) : calibrate(cfg, trace);

  SweepRow row;
  row.protocol = std::string(protocol_name_proposed());
  row.pt_db = pt_db;
  row.report = run(trace, ProposedProtocol(cal.thresholds, cfg.stats));
  row.mu1 = cal.thresholds.mu1;
  row.mu2 = cal.thresholds.mu2;
  row.gamma = cal.thresholds.gamma;
  row.converged = cal.converged;
  row.residual_c1 = cal.residual_c1;
  row.residual_c2 = cal.residual_c2;
  row.residual_c3 = cal.residual_c3;
  return row;
}

SweepRow benchmark_row(const RunSpec& spec, const ChannelTrace& trace, double pt_db,
                       BenchmarkKind kind) {
  BenchmarkConfig cfg;
  cfg.kind = kind;
  cfg.p_total = db_to_linear(pt_db);
  cfg.tol_rate = spec.tol_rate;
  cfg.tol_power = spec.tol_power;

  SweepRow row;
  row.protocol = std::string(benchmark_name(kind));
  row.pt_db = pt_db;
  if (kind == BenchmarkKind::tdbc_no_pa || kind == BenchmarkKind::tdbc_pa) {
    const TdbcProtocol p = tdbc_policy(cfg, trace);
    row.report = run(trace, p);
    row.gamma = p.gamma();
    row.residual_c3 = tdbc_power_residual(row.report, cfg.p_total);
    row.converged = row.residual_c3 <= spec.tol_power;
  } else {
    const FixedPowerProtocol p = fixed_power_policy(cfg, trace);
    row.report = run(trace, p);
    row.mu1 = p.mu1();
    row.mu2 = p.mu2();
    row.converged = p.calibration().converged;
    row.residual_c1 = p.calibration().residual_c1;
    row.residual_c2 = p.calibration().residual_c2;
    row.residual_c3 = p.calibration().residual_power;
  }
  return row;
}

}  // namespace

std::string_view protocol_name_proposed() { return "proposed"; }

const std::vector<std::string>& known_protocols() {
  static const std::vector<std::string> names{
      "proposed", "tdbc_no_pa", "tdbc_pa", "fixed_power_six_mode", "fixed_power_three_mode"};
  return names;
}

void RunSpec::validate() const {
  FadingStatistics{omega1, omega2}.validate();
  if (pt_db_sweep.empty()) throw ParameterError("P_t sweep is empty");
  for (double v : pt_db_sweep) {
    if (!std::isfinite(v)) throw ParameterError("P_t values must be finite");
  }
  if (protocols.empty()) throw ParameterError("no protocols selected");
  std::set<std::string> seen;
  for (const std::string& p : protocols) {
    const auto& known = known_protocols();
    if (std::find(known.begin(), known.end(), p) == known.end()) {
      throw ParameterError("unknown protocol '" + p + "'");
    }
    if (!seen.insert(p).second) throw ParameterError("protocol '" + p + "' listed twice");
  }
  if (n_slots < 1) throw ParameterError("n_slots must be at least 1");
  if (seen.count("proposed") && n_slots < 1000) {
    throw ParameterError("the proposed protocol calibrates on at least 1000 slots");
  }
  if (!(tol_rate > 0.0 && tol_rate <= 0.1) || !(tol_power > 0.0 && tol_power <= 0.1)) {
    throw ParameterError("tolerances must lie in (0, 0.1]");
  }
  if (max_iters < 1) throw ParameterError("max_iters must be at least 1");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<double> db_range(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !(step > 0.0) || !std::isfinite(step)) {
    throw ParameterError("dB range needs finite bounds and a positive step");
  }
  if (stop < start) throw ParameterError("dB range stop is below start");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v > stop + 1e-9 * step) break;
    out.push_back(v);
  }
  return out;
}

bool SweepTable::all_converged() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.converged; });
}

const CalibrationResult& CalibrationCache::get(const CalibrationConfig& cfg,
                                               const ChannelTrace& trace) {
  const Key key{cfg.stats.omega1, cfg.stats.omega2, cfg.p_total, cfg.seed, cfg.n_slots,
                cfg.tol_rate,     cfg.tol_power,    cfg.max_iters};
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    it = entries_.emplace(key, calibrate(cfg, trace)).first;
  }
  return it->second;
}

SweepTable run_sweep(const RunSpec& spec, CalibrationCache* cache) {
  spec.validate();
  const FadingStatistics stats{spec.omega1, spec.omega2};
  const ChannelTrace trace = sample_trace(stats, spec.n_slots, spec.seed);
  SweepTable table;
  for (const std::string& name : spec.protocols) {
    for (double pt_db : spec.pt_db_sweep) {
      if (name == protocol_name_proposed()) {
        table.rows.push_back(proposed_row(spec, trace, pt_db, cache));
      } else {
        table.rows.push_back(benchmark_row(spec, trace, pt_db, *parse_benchmark(name)));
      }
    }
  }
  return table;
}

std::string format_csv(const SweepTable& table) {
  std::string out =
      "protocol,pt_db,sum_rate,r1r,r2r,rr1,rr2,avg_power,freq_m1,freq_m2,freq_m3,freq_m4,"
      "freq_m5,freq_m6,mu1,mu2,gamma,converged\n";
  for (const SweepRow& r : table.rows) {
    const RateReport& p = r.report;
    out += r.protocol;
    for (double v : {r.pt_db, p.sum_rate, p.r_1r, p.r_2r, p.r_r1, p.r_r2, p.avg_power}) {
      out += ',' + num(v);
    }
    for (double f : p.mode_freq) out += ',' + num(f);
    for (double v : {r.mu1, r.mu2, r.gamma}) out += ',' + num(v);
    out += r.converged ? ",true\n" : ",false\n";
  }
  return out;
}

std::string format_json(const SweepTable& table) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const SweepRow& r : table.rows) {
    const RateReport& p = r.report;
    nlohmann::ordered_json o;
    o["protocol"] = r.protocol;
    o["pt_db"] = r.pt_db;
    o["sum_rate"] = p.sum_rate;
    o["r1r"] = p.r_1r;
    o["r2r"] = p.r_2r;
    o["rr1"] = p.r_r1;
    o["rr2"] = p.r_r2;
    o["avg_power"] = p.avg_power;
    for (std::size_t k = 0; k < 6; ++k) o["freq_m" + std::to_string(k + 1)] = p.mode_freq[k];
    o["mu1"] = r.mu1;
    o["mu2"] = r.mu2;
    o["gamma"] = r.gamma;
    o["converged"] = r.converged;
    doc.push_back(std::move(o));
  }
  return doc.dump(2) + "\n";
}

void emit(const SweepTable& table, OutputFormat format, const std::string& path) {
  if (table.rows.empty()) throw ParameterError("nothing to emit: the table is empty");
  const std::string text = format == OutputFormat::csv ? format_csv(table) : format_json(table);
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

void apply_config_json(const std::string& json_text, RunSpec& spec) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("config must be a JSON object");

  std::optional<double> start, stop, step;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const nlohmann::json& v = it.value();
      if (k == "omega1") spec.omega1 = v.get<double>();
      else if (k == "omega2") spec.omega2 = v.get<double>();
      else if (k == "pt_db_list") spec.pt_db_sweep = v.get<std::vector<double>>();
      else if (k == "pt_db_start") start = v.get<double>();
      else if (k == "pt_db_stop") stop = v.get<double>();
      else if (k == "pt_db_step") step = v.get<double>();
      else if (k == "slots") spec.n_slots = v.get<std::size_t>();
      else if (k == "seed") spec.seed = v.get<std::uint64_t>();
      else if (k == "protocols") spec.protocols = v.get<std::vector<std::string>>();
      else if (k == "out") spec.out = v.get<std::string>();
      else if (k == "tol_rate") spec.tol_rate = v.get<double>();
      else if (k == "tol_power") spec.tol_power = v.get<double>();
      else if (k == "max_iters") spec.max_iters = v.get<int>();
      else if (k == "format") {
        const auto f = v.get<std::string>();
        if (f == "csv") spec.format = OutputFormat::csv;
        else if (f == "json") spec.format = OutputFormat::json;
        else throw ParameterError("config format must be csv or json");
      } else {
        throw ParameterError("unknown config key '" + k + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("bad config value: ") + e.what());
  }
  if (start || stop || step) {
    if (!(start && stop && step)) {
      throw ParameterError("pt_db_start, pt_db_stop and pt_db_step go together");
    }
    if (j.contains("pt_db_list")) throw ParameterError("give pt_db_list or a range, not both");
    spec.pt_db_sweep = db_range(*start, *stop, *step);
  }
}

}  // namespace bdrelay
