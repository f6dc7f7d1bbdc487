#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "bdrelay/calibrate.hpp"
#include "bdrelay/engine.hpp"

namespace bdrelay {

enum class OutputFormat { csv, json };

std::string_view protocol_name_proposed();
/// All protocol names accepted by a RunSpec, proposed first.
const std::vector<std::string>& known_protocols();

struct RunSpec {
  double omega1 = 1.0;
  double omega2 = 1.0;
  std::vector<double> pt_db_sweep;
  std::size_t n_slots = 10000;
  std::uint64_t seed = 1;
  std::vector<std::string> protocols{"proposed"};
  std::string out;
  OutputFormat format = OutputFormat::csv;
  double tol_rate = 1e-2;
  double tol_power = 1e-2;
  int max_iters = 200;

  void validate() const;
};

/// P_t in dB relative to the unit noise power.
double db_to_linear(double db);

/// Inclusive arithmetic sweep start, start + step, ... up to stop.
std::vector<double> db_range(double start, double stop, double step);

struct SweepRow {
  std::string protocol;
  double pt_db = 0.0;
  RateReport report;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double gamma = 0.0;
  bool converged = true;
  double residual_c1 = 0.0;
  double residual_c2 = 0.0;
  double residual_c3 = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  [[nodiscard]] bool all_converged() const;
};

/// Calibrated thresholds keyed by (omega1, omega2, P_t, seed, n_slots) plus
/// the tolerances, so one cache can serve specs with different settings.
class CalibrationCache {
 public:
  using Key = std::tuple<double, double, double, std::uint64_t, std::size_t, double, double, int>;

  const CalibrationResult& get(const CalibrationConfig& cfg, const ChannelTrace& trace);
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] std::size_t misses() const { return misses_; }

 private:
  std::map<Key, CalibrationResult> entries_;
  std::size_t misses_ = 0;
};

SweepTable run_sweep(const RunSpec& spec, CalibrationCache* cache = nullptr);

/// Header: protocol,pt_db,sum_rate,r1r,r2r,rr1,rr2,avg_power,freq_m1..freq_m6,
/// mu1,mu2,gamma,converged. Numbers use the shortest round-trip form.
std::string format_csv(const SweepTable& table);
/// Array of objects with the same keys and values as the CSV.
std::string format_json(const SweepTable& table);

/// Writes the table; throws ParameterError on an empty table and IoError when
/// the path cannot be written.
void emit(const SweepTable& table, OutputFormat format, const std::string& path);

/// Applies a JSON config object onto `spec` (keys mirror the CLI flags).
void apply_config_json(const std::string& json_text, RunSpec& spec);

}  // namespace bdrelay
