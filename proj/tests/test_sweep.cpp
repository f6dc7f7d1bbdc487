#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "bdrelay/error.hpp"
#include "bdrelay/sweep.hpp"

using namespace bdrelay;

namespace {

const char* kHeader =
    "protocol,pt_db,sum_rate,r1r,r2r,rr1,rr2,avg_power,freq_m1,freq_m2,freq_m3,freq_m4,"
    "freq_m5,freq_m6,mu1,mu2,gamma,converged";

RunSpec small_spec() {
  RunSpec s;
  s.pt_db_sweep = {0.0, 10.0};
  s.n_slots = 2000;
  s.protocols = {"proposed", "tdbc_no_pa"};
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("dB conversion and ranges") {
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
  CHECK(db_to_linear(-10.0) == doctest::Approx(0.1));
  const auto r = db_range(-20, 20, 5);
  CHECK(r.size() == 9);
  CHECK(r.front() == -20.0);
  CHECK(r.back() == 20.0);
  CHECK_THROWS_AS(db_range(0, 10, 0), ParameterError);
}

TEST_CASE("run settings validation") {
  auto s = small_spec();
  CHECK_NOTHROW(s.validate());
  s.protocols = {"nope"};
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = small_spec();
  s.pt_db_sweep.clear();
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = small_spec();
  s.omega1 = 0;
  CHECK_THROWS_AS(s.validate(), ParameterError);
}

TEST_CASE("csv and json carry the same rows") {
  CalibrationCache cache;
  const auto table = run_sweep(small_spec(), &cache);
  REQUIRE(table.rows.size() == 4);
  CHECK(table.rows[0].protocol == "proposed");
  CHECK(table.rows[2].protocol == "tdbc_no_pa");
  CHECK(cache.misses() == 2);

  const std::string csv = format_csv(table);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == kHeader);
  int n = 0;
  while (std::getline(lines, line)) ++n;
  CHECK(n == 4);

  const auto doc = nlohmann::ordered_json::parse(format_json(table));
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& row = table.rows[i];
    CHECK(doc[i]["protocol"] == row.protocol);
    CHECK(doc[i]["sum_rate"].get<double>() == row.report.sum_rate);
    CHECK(doc[i]["freq_m6"].get<double>() == row.report.mode_freq[5]);
    CHECK(doc[i]["gamma"].get<double>() == row.gamma);
    CHECK(doc[i]["converged"].get<bool>() == row.converged);
  }
  std::string keys;
  for (auto it = doc[0].begin(); it != doc[0].end(); ++it) keys += (keys.empty() ? "" : ",") + it.key();
  CHECK(keys == std::string(kHeader));
}

TEST_CASE("one-row table is two lines") {
  auto s = small_spec();
  s.pt_db_sweep = {0.0};
  s.protocols = {"tdbc_no_pa"};
  const std::string csv = format_csv(run_sweep(s));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("identical specs give byte-identical files") {
  const auto dir = std::filesystem::temp_directory_path() / "bdrelay_sweep_test";
  std::filesystem::create_directories(dir);
  const auto a = run_sweep(small_spec());
  const auto b = run_sweep(small_spec());
  emit(a, OutputFormat::csv, (dir / "a.csv").string());
  emit(b, OutputFormat::csv, (dir / "b.csv").string());
  emit(a, OutputFormat::json, (dir / "a.json").string());
  emit(a, OutputFormat::json, (dir / "b.json").string());
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(slurp(dir / "a.csv") == format_csv(a));
  std::filesystem::remove_all(dir);
}

TEST_CASE("emit errors") {
  CHECK_THROWS_AS(emit(SweepTable{}, OutputFormat::csv, "-"), ParameterError);
  auto s = small_spec();
  s.pt_db_sweep = {0.0};
  s.protocols = {"tdbc_no_pa"};
  CHECK_THROWS_AS(emit(run_sweep(s), OutputFormat::csv, "/nonexistent-dir/x/out.csv"), IoError);
}

TEST_CASE("json config") {
  RunSpec s;
  apply_config_json(R"({"omega1": 2, "pt_db_list": [0, 5], "slots": 3000, "seed": 4,
                        "protocols": ["proposed", "tdbc_pa"], "format": "json"})",
                    s);
  CHECK(s.omega1 == 2.0);
  CHECK(s.pt_db_sweep == std::vector<double>{0, 5});
  CHECK(s.n_slots == 3000);
  CHECK(s.seed == 4);
  CHECK(s.protocols.size() == 2);
  CHECK(s.format == OutputFormat::json);

  apply_config_json(R"({"pt_db_start": -10, "pt_db_stop": 0, "pt_db_step": 5})", s);
  CHECK(s.pt_db_sweep == std::vector<double>{-10, -5, 0});

  CHECK_THROWS_AS(apply_config_json(R"({"bogus": 1})", s), ParameterError);
  CHECK_THROWS_AS(apply_config_json("not json", s), ParameterError);
  CHECK_THROWS_AS(apply_config_json(R"({"format": "xml"})", s), ParameterError);
}

TEST_CASE("proposed rate grows with the budget") {
  RunSpec s;
  s.pt_db_sweep = db_range(-20, 20, 10);
  s.n_slots = 5000;
  const auto t = run_sweep(s);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    CHECK(t.rows[i].report.sum_rate >= t.rows[i - 1].report.sum_rate);
  }
}
