#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "shiftlab/io.hpp"
#include "shiftlab/rng.hpp"

using namespace shiftlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path sandbox() {
  fs::path dir = fs::temp_directory_path() / "shiftlab-cli-test";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SHIFTLAB_CLI_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& contents) {
  std::ofstream out(p);
  out << contents;
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("operator json round trip") {
  StreamRng rng(5, 0);
  Operator op(rng.gaussian_matrix(3), "roundtrip");
  fs::path p = sandbox() / "op.json";
  write_operator(op, p);
  Operator back = read_operator(p);
  CHECK((back.mat - op.mat).norm() == 0.0);
  CHECK(back.label == "roundtrip");
}

TEST_CASE("ragged operator files are rejected with the row named") {
  fs::path p = sandbox() / "ragged.json";
  write_file(p, R"({"n": 2, "re": [[1, 0], [0]], "im": [[0, 0], [0, 0]], "label": "bad"})");
  try {
    read_operator(p);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("step function csv round trip through the exporters") {
  StepFunctionCircle f;
  f.breakpoints = {0.5, 1.25, 4.0};
  f.values = {1.0, -1.0, 0.0};
  f.normalization = Normalization::kRaw;
  fs::path csv = sandbox() / "step.csv";
  fs::path sidecar = sandbox() / "step.json";
  write_file(csv, step_circle_csv(f));
  write_file(sidecar, step_circle_sidecar(f).dump());
  StepFunctionCircle back = read_step_circle_csv(csv, sidecar);
  REQUIRE(back.breakpoints.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(back.breakpoints[i] == doctest::Approx(f.breakpoints[i]).epsilon(1e-16));
    CHECK(back.values[i] == doctest::Approx(f.values[i]).epsilon(1e-16));
  }
}

TEST_CASE("cli: config errors exit 2") {
  fs::path dir = sandbox();
  CHECK(run_cli("--config " + (dir / "missing.json").string()) == 2);
  write_file(dir / "badjson.json", "{nope");
  CHECK(run_cli("--config " + (dir / "badjson.json").string()) == 2);
  write_file(dir / "badcmd.json", R"({"command": "fly"})");
  CHECK(run_cli("--config " + (dir / "badcmd.json").string()) == 2);
}

TEST_CASE("cli: schema and role failures exit 3") {
  fs::path dir = sandbox();
  write_file(dir / "ragged2.json",
             R"({"n": 2, "re": [[1, 0]], "im": [[0, 0], [0, 0]], "label": "x"})");
  Operator ok(Matrix::Zero(2, 2), "zero");
  write_operator(ok, dir / "zero.json");
  json cfg{{"command", "ssf-contraction"},
           {"inputs", {{"t0", (dir / "ragged2.json").string()}, {"t1", (dir / "zero.json").string()}}},
           {"out", (dir / "o_schema").string()}};
  write_file(dir / "c_schema.json", cfg.dump());
  CHECK(run_cli("--config " + (dir / "c_schema.json").string()) == 3);

  // A near-unitary input failing the unitary role by 1e-3.
  Matrix almost = Matrix::Identity(2, 2);
  almost(0, 0) = Complex(1.0 + 1e-3, 0.0);
  write_operator(Operator(almost, "near-unitary"), dir / "near_unitary.json");
  json ucfg{{"command", "ssf-unitary"},
            {"inputs",
             {{"u0", (dir / "near_unitary.json").string()},
              {"u1", (dir / "near_unitary.json").string()}}},
            {"out", (dir / "o_role").string()}};
  write_file(dir / "c_role.json", ucfg.dump());
  CHECK(run_cli("--config " + (dir / "c_role.json").string()) == 3);
}

TEST_CASE("cli: hypothesis failure exits 4") {
  fs::path dir = sandbox();
  write_operator(Operator(StreamRng(9, 0).haar_unitary(2), "u"), dir / "haar.json");
  write_operator(Operator(Matrix::Zero(2, 2), "z"), dir / "zero2.json");
  json cfg{{"command", "ssf-contraction"},
           {"inputs", {{"t0", (dir / "haar.json").string()}, {"t1", (dir / "zero2.json").string()}}},
           {"out", (dir / "o_hyp").string()}};
  write_file(dir / "c_hyp.json", cfg.dump());
  CHECK(run_cli("--config " + (dir / "c_hyp.json").string()) == 4);
}

TEST_CASE("cli: run + verify + corrupted csv fails with exit 1") {
  fs::path dir = sandbox();
  Matrix t0(1, 1), t1(1, 1);
  t0(0, 0) = Complex(0.3, 0.0);
  t1(0, 0) = Complex(0.5, 0.0);
  write_operator(Operator(t0, "t0"), dir / "t0.json");
  write_operator(Operator(t1, "t1"), dir / "t1.json");
  fs::path out = dir / "o_run";
  json cfg{{"command", "ssf-contraction"},
           {"inputs", {{"t0", (dir / "t0.json").string()}, {"t1", (dir / "t1.json").string()}}},
           {"pipeline", {{"N", 64}}},
           {"out", out.string()}};
  write_file(dir / "c_run.json", cfg.dump());
  REQUIRE(run_cli("--config " + (dir / "c_run.json").string()) == 0);
  REQUIRE(fs::exists(out / "trial-000.ssf.csv"));

  json vcfg{{"command", "verify"},
            {"inputs",
             {{"t0", (dir / "t0.json").string()},
              {"t1", (dir / "t1.json").string()},
              {"ssf_csv", (out / "trial-000.ssf.csv").string()},
              {"ssf_sidecar", (out / "trial-000.ssf.json").string()}}},
            {"out", (dir / "o_verify").string()}};
  write_file(dir / "c_verify.json", vcfg.dump());
  CHECK(run_cli("--config " + (dir / "c_verify.json").string()) == 0);

  // Corrupt the value column: shift every value by one row.
  std::ifstream in(out / "trial-000.ssf.csv");
  std::string header, line;
  std::getline(in, header);
  std::vector<std::pair<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  REQUIRE(rows.size() >= 2);
  std::ostringstream corrupted;
  corrupted << header << "\n";
  for (size_t i = 0; i < rows.size(); ++i)
    corrupted << rows[i].first << "," << rows[(i + 1) % rows.size()].second << "\n";
  write_file(dir / "corrupted.csv", corrupted.str());
  json bad = vcfg;
  bad["inputs"]["ssf_csv"] = (dir / "corrupted.csv").string();
  bad["out"] = (dir / "o_verify_bad").string();
  write_file(dir / "c_verify_bad.json", bad.dump());
  CHECK(run_cli("--config " + (dir / "c_verify_bad.json").string()) == 1);
}

TEST_CASE("cli: hashed report section is rerun-identical") {
  fs::path dir = sandbox();
  json cfg{{"command", "ssf-unitary"},
           {"ensemble", {{"dim", 3}}},
           {"pipeline", {{"max_degree", 8}}},
           {"master_seed", 77},
           {"trials", 2},
           {"out", (dir / "o_det1").string()}};
  write_file(dir / "c_det.json", cfg.dump());
  REQUIRE(run_cli("--config " + (dir / "c_det.json").string()) == 0);
  REQUIRE(run_cli("--config " + (dir / "c_det.json").string() + " --out " +
                  (dir / "o_det2").string()) == 0);
  json a = load_json(dir / "o_det1" / "report.json");
  json b = load_json(dir / "o_det2" / "report.json");
  CHECK(a["hashed_sha256"] == b["hashed_sha256"]);
  CHECK(a["hashed"].dump() == b["hashed"].dump());
  // Timings live outside the hashed section.
  CHECK(a.contains("timings"));
  CHECK_FALSE(a["hashed"].contains("timings"));
}
