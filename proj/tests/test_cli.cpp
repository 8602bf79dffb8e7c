#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stark/app.hpp"
#include "stark/coordinate_io.hpp"
#include "stark/serial.hpp"

using namespace stark;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

struct TempFiles {
  std::vector<std::string> paths;
  std::string make(const std::string& name) {
    paths.push_back("cli_test_" + name);
    return paths.back();
  }
  ~TempFiles() {
    for (const auto& p : paths) std::remove(p.c_str());
  }
};

}  // namespace

TEST_CASE("gen is deterministic and honors density") {
  TempFiles tmp;
  const auto f1 = tmp.make("gen1.txt"), f2 = tmp.make("gen2.txt");

  CHECK(app::run_cli({"gen", "--n", "8", "--density", "1", "--seed", "42", "--out", f1}) == 0);
  CHECK(app::run_cli({"gen", "--n", "8", "--density", "1", "--seed", "42", "--out", f2}) == 0);
  CHECK(slurp(f1) == slurp(f2));
  CHECK(blockmat::read_coordinate_file(f1).entries.size() == 64);

  const auto f3 = tmp.make("gen3.txt");
  CHECK(app::run_cli({"gen", "--n", "8", "--density", "0", "--seed", "1", "--out", f3}) == 0);
  CHECK(blockmat::read_coordinate_file(f3).entries.empty());
}

TEST_CASE("multiply agrees across algorithms and reports stage counts") {
  TempFiles tmp;
  const auto fa = tmp.make("a.txt"), fb = tmp.make("b.txt");
  REQUIRE(app::run_cli({"gen", "--n", "16", "--seed", "1", "--out", fa}) == 0);
  REQUIRE(app::run_cli({"gen", "--n", "16", "--seed", "2", "--out", fb}) == 0);

  auto multiply = [&](const std::string& algo, const std::string& bs,
                      const std::string& out, const std::string& metrics) {
    return app::run_multiply({fa, fb, algo, static_cast<std::int32_t>(std::stoi(bs)), 2, 0,
                              out, metrics, std::nullopt, false});
  };

  SUBCASE("stark vs serial-naive within 1e-9") {
    const auto out_stark = tmp.make("c_stark.txt");
    const auto out_naive = tmp.make("c_naive.txt");
    multiply("stark", "4", out_stark, "");
    multiply("serial-naive", "0", out_naive, "");
    const auto ca = blockmat::read_coordinate_file(out_stark);
    const auto cb = blockmat::read_coordinate_file(out_naive);
    const auto da = blockmat::from_coordinate_entries(ca.entries, 16, 16).to_dense();
    const auto db = blockmat::from_coordinate_entries(cb.entries, 16, 16).to_dense();
    CHECK(max_rel_error(da, db) <= 1e-9);
  }
  SUBCASE("block_size = n reports 2 stages") {
    CHECK(multiply("stark", "16", "", "").stages == 2);
  }
  SUBCASE("one split level reports 4 stages, and the metrics file matches") {
    const auto metrics = tmp.make("m.csv");
    const auto report = multiply("stark", "8", "", metrics);
    CHECK(report.stages == 4);
    CHECK(count_lines(slurp(metrics)) == 5);  // header + 4 stages
  }
  SUBCASE("serial strassen reports its base multiplications") {
    const auto report = multiply("serial-strassen", "4", "", "");
    CHECK(report.leaf_multiplications == 49);  // (16/4)^log2 -> 7^2
  }
}

TEST_CASE("result files are byte-identical across worker counts") {
  TempFiles tmp;
  const auto fa = tmp.make("da.txt"), fb = tmp.make("db.txt");
  REQUIRE(app::run_cli({"gen", "--n", "32", "--seed", "5", "--out", fa}) == 0);
  REQUIRE(app::run_cli({"gen", "--n", "32", "--seed", "6", "--out", fb}) == 0);

  std::string reference;
  std::uint64_t ref_flops = 0, ref_shuffled = 0;
  for (const std::size_t workers : {1u, 2u, 4u}) {
    const auto out = tmp.make("c_w" + std::to_string(workers) + ".txt");
    const auto report = app::run_multiply(
        {fa, fb, "stark", 4, workers, 7, out, "", std::nullopt, false});
    if (reference.empty()) {
      reference = slurp(out);
      ref_flops = report.flops;
      ref_shuffled = report.shuffled_elements;
    } else {
      CHECK(slurp(out) == reference);
      CHECK(report.flops == ref_flops);
      CHECK(report.shuffled_elements == ref_shuffled);
    }
  }
}

TEST_CASE("usage errors exit with code 1") {
  TempFiles tmp;
  const auto fa = tmp.make("ua.txt"), fb = tmp.make("ub.txt");
  REQUIRE(app::run_cli({"gen", "--n", "4", "--seed", "1", "--out", fa}) == 0);
  REQUIRE(app::run_cli({"gen", "--n", "4", "--seed", "2", "--out", fb}) == 0);

  CHECK(app::run_cli({"multiply", "--a", fa, "--b", fb, "--algo", "nonsense",
                      "--block-size", "2"}) == app::kExitUsage);
  CHECK(app::run_cli({"multiply", "--a", fa, "--b", fb, "--algo", "stark",
                      "--block-size", "3"}) == app::kExitUsage);
  CHECK(app::run_cli({"no-such-command"}) == app::kExitUsage);

  SUBCASE("mismatched dimensions are reported") {
    const auto fc = tmp.make("uc.txt");
    REQUIRE(app::run_cli({"gen", "--n", "8", "--seed", "3", "--out", fc}) == 0);
    CHECK(app::run_cli({"multiply", "--a", fa, "--b", fc, "--algo", "stark",
                        "--block-size", "2"}) == app::kExitUsage);
  }
}

TEST_CASE("the memory guard refuses oversized runs with exit code 3") {
  TempFiles tmp;
  const auto fa = tmp.make("ga.txt"), fb = tmp.make("gb.txt");
  REQUIRE(app::run_cli({"gen", "--n", "64", "--seed", "1", "--out", fa}) == 0);
  REQUIRE(app::run_cli({"gen", "--n", "64", "--seed", "2", "--out", fb}) == 0);

  setenv("STARK_MEM_CAP_BYTES", "1024", 1);
  CHECK(app::run_cli({"multiply", "--a", fa, "--b", fb, "--algo", "stark",
                      "--block-size", "8"}) == app::kExitResourceGuard);
  unsetenv("STARK_MEM_CAP_BYTES");

  CHECK(app::memory_guard_bytes("stark", 64, 8) ==
        27ull * 64 * 64 * 2 * sizeof(double));  // 3^3 n^2 elements, 2 matrices
  CHECK(app::memory_guard_bytes("naive-block-join", 64, 8) ==
        8ull * 64 * 64 * 2 * sizeof(double));
}

TEST_CASE("cost subcommand emits the documented csv") {
  TempFiles tmp;
  const auto out = tmp.make("cost.csv");
  CHECK(app::run_cli({"cost", "--algo", "all", "--n", "16", "--b", "2", "--cores", "4",
                      "--out", out}) == 0);
  const auto text = slurp(out);
  CHECK(text.rfind("algo,n,b,cores,stage,computation,communication,pf,wall_units\n", 0) == 0);
  CHECK(text.find("mllib,16,2,4,TOTAL,,,,1540") != std::string::npos);
  CHECK(text.find("marlin,16,2,4,TOTAL,,,,1800") != std::string::npos);
  CHECK(text.find("stark,16,2,4,TOTAL") != std::string::npos);

  SUBCASE("b ranges expand to one block per power of two") {
    const auto ranged = tmp.make("cost_range.csv");
    CHECK(app::run_cli({"cost", "--algo", "marlin", "--n", "64", "--b-range", "2:8",
                        "--cores", "4", "--out", ranged}) == 0);
    const auto body = slurp(ranged);
    for (const char* needle : {"marlin,64,2,4,TOTAL", "marlin,64,4,4,TOTAL",
                               "marlin,64,8,4,TOTAL"})
      CHECK(body.find(needle) != std::string::npos);
  }
}

TEST_CASE("verify passes on sound configurations") {
  CHECK(app::run_cli({"verify", "--n-list", "64,128", "--block-sizes", "8,4", "--seed",
                      "11"}) == 0);
}

TEST_CASE("bench emits measured rows joined with the model") {
  TempFiles tmp;
  const auto out = tmp.make("bench.csv");
  CHECK(app::run_cli({"bench", "--sizes", "16", "--block-sizes", "4", "--workers-list",
                      "1,2", "--reps", "2", "--out", out}) == 0);
  const auto text = slurp(out);
  // 3 algorithms x 1 size x 1 block size x 2 worker counts x 2 reps + header
  CHECK(count_lines(text) == 13);
  CHECK(text.find("stark,16,4,4,1,0,") != std::string::npos);
  CHECK(text.find("naive-block-cogroup,16,4,4,2,1,") != std::string::npos);
}
