#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "boundstate/io.hpp"

using namespace boundstate;
namespace fs = std::filesystem;

namespace {

const FieldParams kCubic{3, 3.0};

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("boundstate_io_" + std::to_string(::getpid()) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

RunConfig base(const std::string& command) {
  RunConfig cfg;
  cfg.command = command;
  return cfg;
}

TEST(FormatReal, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 4.337387679963, -2.5e-300, 1e300, 14.103584404153527}) {
    const std::string s = format_real(x);
    EXPECT_EQ(std::stod(s), x) << s;
  }
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
}

TEST(Parsing, Ranges) {
  EXPECT_EQ(parse_real_range("0.1:20"), (std::pair<double, double>{0.1, 20.0}));
  EXPECT_EQ(parse_real_range("1.5..20"), (std::pair<double, double>{1.5, 20.0}));
  EXPECT_THROW(parse_real_range("1.5"), ParameterError);
  EXPECT_THROW(parse_real_range("a:b"), ParameterError);
  EXPECT_THROW(parse_real_range("1:2x"), ParameterError);
  EXPECT_EQ(parse_k_range("2"), (std::pair<int, int>{2, 2}));
  EXPECT_EQ(parse_k_range("0..2"), (std::pair<int, int>{0, 2}));
  EXPECT_THROW(parse_k_range("0-2"), ParameterError);
  EXPECT_EQ(split_list(" tango, ladder_jump ,,x"), (std::vector<std::string>{"tango", "ladder_jump", "x"}));
  EXPECT_TRUE(split_list("").empty());
}

TEST(RunConfig, Validation) {
  RunConfig cfg = base("solve");
  EXPECT_NO_THROW(cfg.validate());
  cfg.controls.rel_tol = 1e-2;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = base("solve");
  cfg.tol = 1e-16;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = base("solve");
  cfg.field.p = 5.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = base("sweep");
  cfg.alpha_range = {2.0, 1.0};
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = base("ladder");
  cfg.k_lo = 2;
  cfg.k_hi = 1;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = base("solve");
  cfg.format = "xml";
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(RunConfig, FileThenOverrides) {
  TempDir dir;
  const fs::path file = dir.path() / "run.cfg";
  write_file(file, "# reference point\nn = 4\np = 2   # subcritical\nalpha-range = 0.5:3\nk = 1..3\n\nchecks = tango, ladder_jump\n");
  RunConfig cfg = base("sweep");
  for (const auto& [k, v] : read_config_file(file.string())) apply_setting(cfg, k, v);
  EXPECT_EQ(cfg.field.n, 4);
  EXPECT_EQ(cfg.field.p, 2.0);
  ASSERT_TRUE(cfg.alpha_range);
  EXPECT_EQ(cfg.alpha_range->second, 3.0);
  EXPECT_EQ(cfg.k_lo, 1);
  EXPECT_EQ(cfg.k_hi, 3);
  EXPECT_EQ(cfg.checks.size(), 2u);
  apply_setting(cfg, "p", "1.5");
  EXPECT_EQ(cfg.field.p, 1.5);
  EXPECT_THROW(apply_setting(cfg, "bogus", "1"), ParameterError);
  EXPECT_THROW(apply_setting(cfg, "n", "3.5"), ParameterError);
  EXPECT_THROW(apply_setting(cfg, "alpha", "five"), ParameterError);

  write_file(file, "n 3\n");
  EXPECT_THROW(read_config_file(file.string()), ParameterError);
  EXPECT_THROW(read_config_file((dir.path() / "missing.cfg").string()), IoError);
}

TEST(Files, UnwritablePathIsIoError) {
  TempDir dir;
  const fs::path blocker = dir.path() / "file";
  write_file(blocker, "x");
  EXPECT_THROW(write_file(blocker / "sub" / "out.json", "{}"), IoError);
  EXPECT_THROW(read_file(dir.path() / "none"), IoError);
}

TEST(Portrait, JsonRoundTrip) {
  TempDir dir;
  for (double alpha : {0.5, 1.0, 10.0, 30.0}) {
    const Trajectory t = integrate({kCubic, alpha, {}}, StopPolicy::verification());
    const PhasePortrait pp = detect_events(t);
    const fs::path file = dir.path() / "portrait.json";
    write_file(file, portrait_document(pp, t, base("solve")).dump(2) + "\n");
    const PhasePortrait back = read_portrait_document(file);
    EXPECT_EQ(back, pp) << alpha;
  }
}

TEST(Portrait, RejectsWrongSchema) {
  TempDir dir;
  const fs::path file = dir.path() / "p.json";
  write_file(file, R"({"schema": "other/9", "portrait": {}})");
  EXPECT_THROW(read_portrait_document(file), IoError);
  write_file(file, "{not json");
  EXPECT_THROW(read_portrait_document(file), IoError);
  write_file(file, R"({"schema": "boundstate-lab/1", "portrait": {"phase_kind": "SemiTail"}})");
  EXPECT_THROW(read_portrait_document(file), IoError);
}

TEST(TrajectoryCsv, HeaderConfigAndPrecision) {
  const Trajectory t = integrate({kCubic, 1.0, {}}, StopPolicy::verification());
  RunConfig cfg = base("solve");
  cfg.alpha = 1.0;
  const std::string csv = trajectory_csv(t, cfg);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  ASSERT_EQ(line.rfind("# config: ", 0), 0u);
  const Json echo = Json::parse(line.substr(10));
  EXPECT_EQ(echo["command"], "solve");
  EXPECT_EQ(echo["alpha"], 1.0);
  EXPECT_EQ(echo["rel_tol"], cfg.controls.rel_tol);
  std::getline(in, line);
  EXPECT_EQ(line, "r,u,up,v,vp");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    ASSERT_EQ(vals.size(), 5u);
    EXPECT_EQ(vals[1], 1.0);
    EXPECT_EQ(vals[0], t.samples()[rows].r);
    ++rows;
  }
  EXPECT_EQ(rows, t.samples().size());
}

TEST(Ladder, DocumentSchema) {
  const AlphaLadder lad = build_ladder(kCubic, {0, 1}, 1e-8, {});
  RunConfig cfg = base("ladder");
  cfg.k_lo = 0;
  cfg.k_hi = 1;
  const Json j = ladder_document(lad, cfg);
  EXPECT_EQ(j["schema"], kSchema);
  EXPECT_EQ(j["n"], 3);
  EXPECT_EQ(j["p"], 3.0);
  EXPECT_EQ(j["tol"], 1e-8);
  ASSERT_EQ(j["entries"].size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(j["entries"][i]["k"], lad.entries[i].k);
    EXPECT_EQ(j["entries"][i]["alpha_lo"].get<double>(), lad.entries[i].alpha_lo);
    EXPECT_EQ(j["entries"][i]["alpha_hi"].get<double>(), lad.entries[i].alpha_hi);
    EXPECT_EQ(j["entries"][i]["status"], "ok");
  }
  EXPECT_EQ(j["config"]["command"], "ladder");
  EXPECT_EQ(Json::parse(j.dump()), j);
  const std::string csv = ladder_csv(lad, cfg);
  EXPECT_NE(csv.find("k,alpha_lo,alpha_hi"), std::string::npos);
  EXPECT_NE(csv.find(format_real(lad.entries[1].alpha_hi)), std::string::npos);
}

TEST(Sweep, CsvColumns) {
  const SweepResult res = run_sweep(kCubic, {0.5, 1.0, 5.0, 20.0}, {});
  const std::string csv = sweep_csv(res, base("sweep"));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  const int zmax = res.rows.back().cls.node_count;
  std::string want = "alpha,node_count,class_tag";
  for (int i = 1; i <= zmax; ++i) want += ",z_" + std::to_string(i);
  EXPECT_EQ(line, want + ",E_negative_radius");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("0.5,0,Oscillatory,", 0), 0u) << line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("1,0,Constant,", 0), 0u) << line;
  const Json doc = sweep_document(res, base("sweep"));
  EXPECT_EQ(doc["rows"].size(), 4u);
  EXPECT_TRUE(doc["monotone"].get<bool>());
}

TEST(Report, Outputs) {
  VerificationReport rep;
  rep.records.push_back({"tango", "n=3,p=3,BoundBracket(1)", CheckStatus::Pass, 1.0, 6, ""});
  rep.records.push_back({"bridge_integral", "n=3,p=1.5,BoundBracket(1)", CheckStatus::SkippedUndefined, 0.0, 0,
                         "I_1: \"tau < b\""});
  rep.records.push_back({"tail_asymptotics", "x", CheckStatus::Fail, -0.03, 1, "gap"});
  const Json j = report_document(rep, base("verify"));
  EXPECT_EQ(j["failures"], 1);
  EXPECT_EQ(j["records"][1]["status"], "skipped-undefined");
  const std::string csv = report_csv(rep, base("verify"));
  EXPECT_NE(csv.find("'tau < b'"), std::string::npos);
  const std::string table = report_table(rep);
  EXPECT_NE(table.find("3 records, 1 failed"), std::string::npos);
}

TEST(AuxTrace, UndefinedCellsAreEmpty) {
  const Trajectory t = integrate({kCubic, 1.0, {}}, StopPolicy::verification());
  const std::string csv = aux_trace_csv(t, base("export"));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line, "r,u,up,v,vp,E,E_hat,P,P1,P2,omega,rho,Q,Q1,Q2,Qn,M,T1,T2,B0,phi_n,varpi");
  std::getline(in, line);
  // u' = 0 on the constant solution, so B0, phi_n and varpi are absent.
  EXPECT_EQ(line.substr(line.size() - 3), ",,,");
}

TEST(Environment, OutDirOverride) {
  ::setenv(kOutDirEnv, "/tmp/somewhere", 1);
  EXPECT_EQ(default_out_dir(), "/tmp/somewhere");
  ::unsetenv(kOutDirEnv);
  EXPECT_EQ(default_out_dir(), ".");
}

}  // namespace
