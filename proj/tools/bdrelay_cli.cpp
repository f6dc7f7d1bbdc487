// bdrelay: sweeps, calibration and the oracle suite from the command line.
//
//   bdrelay sweep --pt-db-start=-20 --pt-db-stop=20 --pt-db-step=5
//                 --protocols proposed,tdbc_no_pa --out fig.csv
//   bdrelay calibrate --pt-db 10
//   bdrelay verify
//
// Exit status: 0 all converged / passed, 1 partial, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bdrelay/calibrate.hpp"
#include "bdrelay/error.hpp"
#include "bdrelay/kernels.hpp"
#include "bdrelay/oracle.hpp"
#include "bdrelay/sweep.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw bdrelay::ParameterError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct SweepFlags {
  std::string config;
  double omega1 = 1.0, omega2 = 1.0;
  double start = 0, stop = 0, step = 0;
  std::vector<double> list;
  std::size_t slots = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> protocols;
  std::string format;
  std::string out;
  double tol_rate = 0, tol_power = 0;
  int max_iters = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Buffer-aided two-way relay simulator"};
  app.require_subcommand(1);

  SweepFlags sf;
  auto* sweep = app.add_subcommand("sweep", "simulate protocols over a P_t sweep");
  sweep->add_option("--config", sf.config, "JSON config; flags override its values");
  auto* o_om1 = sweep->add_option("--omega1", sf.omega1, "mean of S1");
  auto* o_om2 = sweep->add_option("--omega2", sf.omega2, "mean of S2");
  auto* o_start = sweep->add_option("--pt-db-start", sf.start, "first P_t in dB");
  auto* o_stop = sweep->add_option("--pt-db-stop", sf.stop, "last P_t in dB");
  auto* o_step = sweep->add_option("--pt-db-step", sf.step, "P_t step in dB");
  auto* o_list = sweep->add_option("--pt-db-list", sf.list, "comma-separated P_t values in dB")
                     ->delimiter(',');
  o_list->excludes(o_start)->excludes(o_stop)->excludes(o_step);
  auto* o_slots = sweep->add_option("--slots", sf.slots, "slots per run");
  auto* o_seed = sweep->add_option("--seed", sf.seed, "channel seed");
  auto* o_prot = sweep->add_option("--protocols", sf.protocols, "comma-separated protocols")
                     ->delimiter(',');
  auto* o_fmt = sweep->add_option("--format", sf.format, "csv or json")
                    ->check(CLI::IsMember({"csv", "json"}));
  auto* o_out = sweep->add_option("--out", sf.out, "output file (stdout when omitted)");
  auto* o_tr = sweep->add_option("--tol-rate", sf.tol_rate, "relative rate-balance tolerance");
  auto* o_tp = sweep->add_option("--tol-power", sf.tol_power, "relative power tolerance");
  auto* o_mi = sweep->add_option("--max-iters", sf.max_iters, "calibration iteration cap");

  double cal_db = 0.0;
  bdrelay::CalibrationConfig cc;
  auto* cal = app.add_subcommand("calibrate", "print calibrated thresholds for one P_t");
  cal->add_option("--pt-db", cal_db, "P_t in dB")->required();
  cal->add_option("--omega1", cc.stats.omega1, "mean of S1");
  cal->add_option("--omega2", cc.stats.omega2, "mean of S2");
  cal->add_option("--slots", cc.n_slots, "calibration slots");
  cal->add_option("--seed", cc.seed, "channel seed");
  cal->add_option("--tol-rate", cc.tol_rate, "relative rate-balance tolerance");
  cal->add_option("--tol-power", cc.tol_power, "relative power tolerance");
  cal->add_option("--max-iters", cc.max_iters, "iteration cap");

  bdrelay::oracle::VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "run the brute-force property suite");
  verify->add_option("--draws", vo.draws, "random draws per property");
  verify->add_option("--seed", vo.seed, "draw seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*sweep) {
      bdrelay::RunSpec spec;
      if (!sf.config.empty()) bdrelay::apply_config_json(read_file(sf.config), spec);
      if (o_om1->count()) spec.omega1 = sf.omega1;
      if (o_om2->count()) spec.omega2 = sf.omega2;
      const std::size_t range_flags = o_start->count() + o_stop->count() + o_step->count();
      if (range_flags != 0) {
        if (range_flags != 3) {
          std::cerr << "error: --pt-db-start, --pt-db-stop and --pt-db-step go together\n";
          return kUsage;
        }
        spec.pt_db_sweep = bdrelay::db_range(sf.start, sf.stop, sf.step);
      }
      if (o_list->count()) spec.pt_db_sweep = sf.list;
      if (o_slots->count()) spec.n_slots = sf.slots;
      if (o_seed->count()) spec.seed = sf.seed;
      if (o_prot->count()) spec.protocols = sf.protocols;
      if (o_fmt->count()) {
        spec.format = sf.format == "json" ? bdrelay::OutputFormat::json : bdrelay::OutputFormat::csv;
      }
      if (o_out->count()) spec.out = sf.out;
      if (o_tr->count()) spec.tol_rate = sf.tol_rate;
      if (o_tp->count()) spec.tol_power = sf.tol_power;
      if (o_mi->count()) spec.max_iters = sf.max_iters;

      bdrelay::CalibrationCache cache;
      const bdrelay::SweepTable table = bdrelay::run_sweep(spec, &cache);
      bdrelay::emit(table, spec.format, spec.out);
      if (!table.all_converged()) {
        std::cerr << "warning: some rows did not converge\n";
        return kPartial;
      }
      return kOk;
    }

    if (*cal) {
      cc.p_total = bdrelay::db_to_linear(cal_db);
      const bdrelay::CalibrationResult r = bdrelay::calibrate(cc);
      std::printf("mu1=%.9g mu2=%.9g gamma=%.9g\n", r.thresholds.mu1, r.thresholds.mu2,
                  r.thresholds.gamma);
      std::printf("residual_c1=%.3e residual_c2=%.3e residual_c3=%.3e\n", r.residual_c1,
                  r.residual_c2, r.residual_c3);
      std::printf("iterations=%d converged=%s%s\n", r.iterations, r.converged ? "true" : "false",
                  r.grid_restarted ? " (grid restart)" : "");
      return r.converged ? kOk : kPartial;
    }

    if (*verify) {
      std::printf("kernel isa: %s\n",
                  std::string(bdrelay::kernels::isa_name(bdrelay::kernels::active_isa())).c_str());
      bool all = true;
      for (const auto& p : bdrelay::oracle::run_verification(vo)) {
        std::printf("%s %s worst=%.3e %s\n", p.pass ? "PASS" : "FAIL", p.name.c_str(), p.worst,
                    p.detail.c_str());
        all = all && p.pass;
      }
      return all ? kOk : kPartial;
    }
  } catch (const bdrelay::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPartial;
  }
  return kUsage;
}
