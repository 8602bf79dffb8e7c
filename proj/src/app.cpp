#include "stark/app.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "stark/baseline.hpp"
#include "stark/coordinate_io.hpp"
#include "stark/costmodel.hpp"
#include "stark/serial.hpp"
#include "stark/strassen_dist.hpp"

namespace stark::app {
namespace {

using blockmat::BlockMatrix;
using blockmat::CoordinateEntry;

double u01(std::mt19937_64& rng) {
  // 53-bit mantissa draw; stable across standard libraries
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::int64_t infer_dimension(const blockmat::CoordinateFile& file,
                             std::optional<std::int64_t> override_n) {
  if (override_n) return *override_n;
  if (file.n_hint) return *file.n_hint;
  std::int64_t max_index = -1;
  for (const CoordinateEntry& e : file.entries)
    max_index = std::max({max_index, e.row, e.col});
  std::int64_t n = 1;
  while (n <= max_index) n *= 2;
  return n;
}

std::uint64_t pow_int(std::uint64_t base, int exp) {
  std::uint64_t v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

void write_result(const std::string& path, const BlockMatrix& product) {
  if (path.empty()) return;
  blockmat::write_coordinate_file(path, product.to_dense());
}

std::vector<std::int64_t> parse_b_range(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("--b-range expects lo:hi");
  const std::int64_t lo = std::stoll(spec.substr(0, colon));
  const std::int64_t hi = std::stoll(spec.substr(colon + 1));
  if (lo <= 0 || hi < lo || !is_power_of_two(static_cast<std::uint64_t>(lo)) ||
      !is_power_of_two(static_cast<std::uint64_t>(hi)))
    throw std::invalid_argument("--b-range bounds must be powers of two with lo <= hi");
  std::vector<std::int64_t> out;
  for (std::int64_t b = lo; b <= hi; b *= 2) out.push_back(b);
  return out;
}

costmodel::Rational parse_weight(const std::string& spec) {
  const auto slash = spec.find('/');
  if (slash == std::string::npos) return costmodel::Rational(std::stoll(spec));
  return costmodel::Rational(std::stoll(spec.substr(0, slash)),
                             std::stoll(spec.substr(slash + 1)));
}

struct EngineRun {
  BlockMatrix product;
  std::uint64_t leafs = 0;
  std::vector<dataflow::StageMetrics> stages;
  double wall_ms = 0.0;
};

EngineRun run_engine_algo(const std::string& algo, const BlockMatrix& a, const BlockMatrix& b,
                          std::size_t workers, std::uint64_t seed, bool strassen_leaf) {
  dataflow::Engine engine({workers, seed});
  const auto t0 = std::chrono::steady_clock::now();
  if (algo == "stark") {
    auto outcome = strassen::dist_strassen(
        engine, a, b,
        strassen_leaf ? strassen::LeafKernel::strassen : strassen::LeafKernel::naive);
    const double wall = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0).count();
    return {std::move(outcome.product), outcome.leaf_multiplications, engine.metrics(), wall};
  }
  const auto strategy = algo == "naive-block-join" ? baseline::Strategy::replicate_join
                                                   : baseline::Strategy::cogroup;
  auto outcome = baseline::naive_block_multiply(engine, a, b, strategy);
  const double wall = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0).count();
  return {std::move(outcome.product), outcome.leaf_multiplications, engine.metrics(), wall};
}

bool is_engine_algo(const std::string& algo) {
  return algo == "stark" || algo == "naive-block-join" || algo == "naive-block-cogroup";
}

}  // namespace

std::vector<CoordinateEntry> random_entries(std::int64_t n, double density,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CoordinateEntry> entries;
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t c = 0; c < n; ++c) {
      if (u01(rng) < density) entries.push_back({r, c, 2.0 * u01(rng) - 1.0});
    }
  }
  return entries;
}

std::uint64_t memory_cap_bytes() {
  if (const char* env = std::getenv("STARK_MEM_CAP_BYTES")) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::string_view(env).size(), v);
    if (ec == std::errc() && v > 0) return v;
  }
  return 4ull << 30;
}

std::uint64_t memory_guard_bytes(const std::string& algo, std::int64_t n,
                                 std::int32_t block_size) {
  const std::uint64_t elements = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  if (algo == "stark") {
    const int levels = log2_exact(static_cast<std::uint64_t>(n / block_size));
    return pow_int(3, levels) * elements * 2 * sizeof(double);
  }
  if (is_engine_algo(algo)) {
    const std::uint64_t b = static_cast<std::uint64_t>(n / block_size);
    return b * elements * 2 * sizeof(double);
  }
  return 4 * elements * sizeof(double);  // serial: inputs, product, scratch
}

MultiplyReport run_multiply(const MultiplyRequest& request) {
  const bool engine_algo = is_engine_algo(request.algo);
  const bool serial_strassen_algo = request.algo == "serial-strassen";
  const bool serial_naive_algo = request.algo == "serial-naive";
  if (!engine_algo && !serial_strassen_algo && !serial_naive_algo)
    throw std::invalid_argument("unknown algorithm: " + request.algo);

  // Probe dimensions first so the guard and block checks see the real n.
  const auto file_a = blockmat::read_coordinate_file(request.a_path);
  const auto file_b = blockmat::read_coordinate_file(request.b_path);
  const std::int64_t n_a = infer_dimension(file_a, request.n_override);
  const std::int64_t n_b = infer_dimension(file_b, request.n_override);
  if (n_a != n_b)
    throw std::invalid_argument("input dimensions differ: " + std::to_string(n_a) + " vs " +
                                std::to_string(n_b));
  const std::int64_t n = n_a;

  std::int32_t block_size = request.block_size;
  if (!engine_algo) {
    block_size = static_cast<std::int32_t>(n);  // serial paths densify
  } else if (block_size <= 0) {
    throw std::invalid_argument("--block-size is required for distributed algorithms");
  }

  const std::uint64_t need = memory_guard_bytes(request.algo, n, block_size);
  const std::uint64_t cap = memory_cap_bytes();
  if (need > cap)
    throw ResourceGuardError("estimated peak footprint " + std::to_string(need) +
                             " bytes exceeds cap " + std::to_string(cap) +
                             " (STARK_MEM_CAP_BYTES overrides)");

  BlockMatrix a = blockmat::from_coordinate_entries(file_a.entries, n, block_size,
                                                    blockmat::MatLabel::A);
  BlockMatrix b = blockmat::from_coordinate_entries(file_b.entries, n, block_size,
                                                    blockmat::MatLabel::B);

  MultiplyReport report;
  report.n = n;

  if (engine_algo) {
    EngineRun run = run_engine_algo(request.algo, a, b, request.workers, request.seed,
                                    request.strassen_leaf);
    report.wall_ms = run.wall_ms;
    report.leaf_multiplications = run.leafs;
    report.stages = run.stages.size();
    for (const auto& s : run.stages) {
      report.flops += s.flops;
      report.shuffled_elements += s.shuffled_elements;
    }
    write_result(request.result_out, run.product);
    if (!request.metrics_out.empty())
      dataflow::write_metrics_csv(request.metrics_out, run.stages);
    return report;
  }

  const DenseMatrix da = a.to_dense();
  const DenseMatrix db = b.to_dense();
  const std::uint64_t f0 = kernels::thread_flops();
  const auto t0 = std::chrono::steady_clock::now();
  DenseMatrix product;
  std::uint64_t leafs = 1;
  if (serial_naive_algo) {
    product = serial::naive_multiply(da, db);
  } else {
    const int threshold =
        request.block_size > 0
            ? request.block_size
            : std::min<std::int64_t>(serial::kDefaultStrassenThreshold, n);
    serial::StrassenStats stats;
    product = serial::serial_strassen(da, db, threshold, &stats);
    leafs = stats.base_multiplies;
  }
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0).count();
  report.leaf_multiplications = leafs;
  report.stages = 1;
  report.flops = kernels::thread_flops() - f0;

  if (!request.result_out.empty()) blockmat::write_coordinate_file(request.result_out, product);
  if (!request.metrics_out.empty()) {
    dataflow::StageMetrics sm;
    sm.stage_id = 1;
    sm.label = request.algo;
    sm.tasks = 1;
    sm.records_in = 2 * static_cast<std::uint64_t>(n) * n;
    sm.records_out = static_cast<std::uint64_t>(n) * n;
    sm.flops = report.flops;
    sm.wall_ms = report.wall_ms;
    dataflow::write_metrics_csv(request.metrics_out, {&sm, 1});
  }
  return report;
}

namespace {

int cmd_gen(std::int64_t n, double density, std::uint64_t seed, const std::string& out) {
  if (n <= 0 || !is_power_of_two(static_cast<std::uint64_t>(n))) {
    std::cerr << "gen: n must be a power of two\n";
    return kExitUsage;
  }
  const auto entries = random_entries(n, density, seed);
  blockmat::write_coordinate_file(out, n, entries);
  std::cout << "wrote " << entries.size() << " entries for n=" << n << " to " << out << "\n";
  return kExitOk;
}

int cmd_multiply(const MultiplyRequest& request) {
  const MultiplyReport report = run_multiply(request);
  std::cout << "algo=" << request.algo << " n=" << report.n
            << " wall_ms=" << report.wall_ms
            << " leaf_multiplications=" << report.leaf_multiplications
            << " stages=" << report.stages << " flops=" << report.flops
            << " shuffled_elements=" << report.shuffled_elements << "\n";
  return kExitOk;
}

int cmd_cost(const std::string& algo, std::int64_t n, std::int64_t b_single,
             const std::string& b_range, std::int64_t cores, const std::string& weight,
             const std::string& out) {
  std::vector<std::int64_t> bs;
  if (!b_range.empty())
    bs = parse_b_range(b_range);
  else
    bs.push_back(b_single);

  const costmodel::Rational w = parse_weight(weight);
  std::vector<costmodel::Algo> algos;
  if (algo == "all")
    algos = {costmodel::Algo::mllib, costmodel::Algo::marlin, costmodel::Algo::stark};
  else if (algo == "mllib")
    algos = {costmodel::Algo::mllib};
  else if (algo == "marlin")
    algos = {costmodel::Algo::marlin};
  else if (algo == "stark")
    algos = {costmodel::Algo::stark};
  else
    throw std::invalid_argument("cost: --algo must be mllib|marlin|stark|all");

  std::string csv = costmodel::cost_csv_header();
  for (const auto a : algos) {
    for (const std::int64_t b : bs) {
      const auto params = costmodel::CostParams::make(n, b, cores);
      costmodel::append_cost_csv(csv, a, params, costmodel::cost_for(a, params, w));
    }
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << csv;
  }
  return kExitOk;
}

int cmd_bench(const std::vector<std::int64_t>& sizes, const std::vector<std::int64_t>& block_sizes,
              const std::vector<std::size_t>& workers_list, int reps, std::uint64_t seed,
              const std::string& out) {
  const std::vector<std::string> algos{"stark", "naive-block-join", "naive-block-cogroup"};

  // Refuse up front if any requested combination blows the memory bound.
  for (const auto& algo : algos)
    for (const std::int64_t n : sizes)
      for (const std::int64_t bs : block_sizes) {
        if (bs > n) continue;
        const std::uint64_t need =
            memory_guard_bytes(algo, n, static_cast<std::int32_t>(bs));
        if (need > memory_cap_bytes())
          throw ResourceGuardError("bench combination algo=" + algo + " n=" +
                                   std::to_string(n) + " block_size=" + std::to_string(bs) +
                                   " needs " + std::to_string(need) + " bytes > cap " +
                                   std::to_string(memory_cap_bytes()));
      }

  std::ostringstream csv;
  csv << "algo,n,block_size,b,workers,rep,leaf_multiplications,flops,shuffled_elements,"
         "stages,wall_ms,model_wall_units\n";
  for (const std::int64_t n : sizes) {
    const auto entries_a = random_entries(n, 1.0, seed * 2 + 1);
    const auto entries_b = random_entries(n, 1.0, seed * 2 + 2);
    for (const std::int64_t bs : block_sizes) {
      if (bs > n) continue;
      const auto a = blockmat::from_coordinate_entries(entries_a, n,
                                                       static_cast<std::int32_t>(bs),
                                                       blockmat::MatLabel::A);
      const auto b = blockmat::from_coordinate_entries(entries_b, n,
                                                       static_cast<std::int32_t>(bs),
                                                       blockmat::MatLabel::B);
      for (const auto& algo : algos) {
        for (const std::size_t workers : workers_list) {
          const auto params = costmodel::CostParams::make(n, n / bs,
                                                          static_cast<std::int64_t>(workers));
          const auto model_algo = algo == "stark" ? costmodel::Algo::stark
                                  : algo == "naive-block-join" ? costmodel::Algo::marlin
                                                               : costmodel::Algo::mllib;
          const double model = costmodel::cost_for(model_algo, params).total.to_double();
          for (int rep = 0; rep < reps; ++rep) {
            EngineRun run = run_engine_algo(algo, a, b, workers, seed + rep, false);
            std::uint64_t flops = 0, shuffled = 0;
            for (const auto& s : run.stages) {
              flops += s.flops;
              shuffled += s.shuffled_elements;
            }
            csv << algo << ',' << n << ',' << bs << ',' << (n / bs) << ',' << workers << ','
                << rep << ',' << run.leafs << ',' << flops << ',' << shuffled << ','
                << run.stages.size() << ',' << run.wall_ms << ',' << model << "\n";
          }
        }
      }
    }
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << csv.str();
  }
  return kExitOk;
}

int cmd_verify(const std::vector<std::int64_t>& n_list,
               const std::vector<std::int64_t>& block_sizes, std::uint64_t seed,
               std::size_t workers) {
  bool all_ok = true;
  const auto check = [&](const std::string& what, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << "\n";
    all_ok = all_ok && ok;
  };

  for (const std::int64_t n : n_list) {
    const auto entries_a = random_entries(n, 1.0, seed * 2 + 1);
    const auto entries_b = random_entries(n, 1.0, seed * 2 + 2);
    const auto dense_a = blockmat::from_coordinate_entries(entries_a, n,
                                                           static_cast<std::int32_t>(n),
                                                           blockmat::MatLabel::A)
                             .to_dense();
    const auto dense_b = blockmat::from_coordinate_entries(entries_b, n,
                                                           static_cast<std::int32_t>(n),
                                                           blockmat::MatLabel::B)
                             .to_dense();
    const DenseMatrix oracle = serial::naive_multiply(dense_a, dense_b);

    for (const std::int64_t bs : block_sizes) {
      if (bs > n) continue;
      const std::string tag = "n=" + std::to_string(n) + " block_size=" + std::to_string(bs);
      const auto a = blockmat::from_coordinate_entries(entries_a, n,
                                                       static_cast<std::int32_t>(bs),
                                                       blockmat::MatLabel::A);
      const auto b = blockmat::from_coordinate_entries(entries_b, n,
                                                       static_cast<std::int32_t>(bs),
                                                       blockmat::MatLabel::B);
      const std::int64_t splits = n / bs;
      const int levels = log2_exact(static_cast<std::uint64_t>(splits));

      EngineRun stark_run = run_engine_algo("stark", a, b, workers, seed, false);
      check(tag + " stark matches oracle (rel err <= 1e-9)",
            max_rel_error(stark_run.product.to_dense(), oracle) <= 1e-9);
      check(tag + " stark leaf multiplications == 7^" + std::to_string(levels),
            stark_run.leafs == pow_int(7, levels));
      const int model_stages = costmodel::stages_stark(
          costmodel::CostParams::make(n, splits, static_cast<std::int64_t>(workers)));
      check(tag + " stark stages == model " + std::to_string(model_stages),
            stark_run.stages.size() == static_cast<std::size_t>(model_stages) &&
                model_stages == 2 * levels + 2);
      std::uint64_t stark_flops = 0;
      for (const auto& s : stark_run.stages) stark_flops += s.flops;
      check(tag + " stark flops == 7^l (n/b)^3",
            stark_flops == pow_int(7, levels) * pow_int(static_cast<std::uint64_t>(bs), 3));

      for (const std::string algo : {"naive-block-join", "naive-block-cogroup"}) {
        EngineRun run = run_engine_algo(algo, a, b, workers, seed, false);
        check(tag + " " + algo + " matches oracle (rel err <= 1e-9)",
              max_rel_error(run.product.to_dense(), oracle) <= 1e-9);
        check(tag + " " + algo + " leaf multiplications == b^3",
              run.leafs == pow_int(static_cast<std::uint64_t>(splits), 3));
        check(tag + " " + algo + " stages == 3", run.stages.size() == 3);
      }

      // determinism across worker counts: bit-identical payloads
      EngineRun one = run_engine_algo("stark", a, b, 1, seed, false);
      bool identical = one.product.blocks().size() == stark_run.product.blocks().size();
      for (std::size_t i = 0; identical && i < one.product.blocks().size(); ++i)
        identical = *one.product.blocks()[i].data == *stark_run.product.blocks()[i].data;
      check(tag + " stark payload bits identical for workers 1 vs " + std::to_string(workers),
            identical);
    }
  }
  return all_ok ? kExitOk : kExitVerification;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App cli{"block-matrix multiplication engine with Strassen and naive plans"};
  cli.require_subcommand(1);

  // gen
  auto* gen = cli.add_subcommand("gen", "write a random coordinate matrix file");
  std::int64_t gen_n = 0;
  double gen_density = 1.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n, "matrix dimension (power of two)")->required();
  gen->add_option("--density", gen_density, "probability a cell is present")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output path")->required();

  // multiply
  auto* mul = cli.add_subcommand("multiply", "multiply two coordinate matrix files");
  MultiplyRequest req;
  std::int64_t mul_n = 0;
  mul->add_option("--a", req.a_path, "left matrix file")->required();
  mul->add_option("--b", req.b_path, "right matrix file")->required();
  mul->add_option("--algo", req.algo,
                  "stark | naive-block-join | naive-block-cogroup | serial-strassen | "
                  "serial-naive");
  mul->add_option("--block-size", req.block_size,
                  "tile side (power of two; serial-strassen: recursion threshold)");
  mul->add_option("--workers", req.workers, "engine worker threads");
  mul->add_option("--seed", req.seed, "engine scheduling seed");
  mul->add_option("--out", req.result_out, "product coordinate file");
  mul->add_option("--metrics-out", req.metrics_out, "per-stage metrics CSV");
  mul->add_option("--n", mul_n, "override the matrix dimension");
  mul->add_flag("--leaf-strassen", req.strassen_leaf,
                "use serial Strassen for leaf multiplications");

  // cost
  auto* cost = cli.add_subcommand("cost", "evaluate the analytical cost model");
  std::string cost_algo = "all";
  std::int64_t cost_n = 0, cost_b = 0, cost_cores = 1;
  std::string cost_b_range, cost_weight = "1", cost_out;
  cost->add_option("--algo", cost_algo, "mllib | marlin | stark | all");
  cost->add_option("--n", cost_n, "matrix dimension")->required();
  cost->add_option("--b", cost_b, "split count");
  cost->add_option("--b-range", cost_b_range, "lo:hi split counts (powers of two)");
  cost->add_option("--cores", cost_cores, "physical core count")->required();
  cost->add_option("--comm-weight", cost_weight,
                   "weight of communication vs computation (integer or p/q)");
  cost->add_option("--out", cost_out, "CSV path (default stdout)");

  // bench
  auto* bench = cli.add_subcommand("bench", "measured runs joined with model predictions");
  std::vector<std::int64_t> bench_sizes, bench_block_sizes;
  std::vector<std::size_t> bench_workers{1};
  int bench_reps = 1;
  std::uint64_t bench_seed = 42;
  std::string bench_out;
  bench->add_option("--sizes", bench_sizes, "matrix dimensions")->required()->delimiter(',');
  bench->add_option("--block-sizes", bench_block_sizes, "tile sides")->required()->delimiter(',');
  bench->add_option("--workers-list", bench_workers, "worker counts")->delimiter(',');
  bench->add_option("--reps", bench_reps, "repetitions per point");
  bench->add_option("--seed", bench_seed, "input generator seed");
  bench->add_option("--out", bench_out, "CSV path (default stdout)");

  // verify
  auto* verify = cli.add_subcommand("verify", "oracle equivalence and counter checks");
  std::vector<std::int64_t> verify_n{64, 128};
  std::vector<std::int64_t> verify_bs{8, 4};
  std::uint64_t verify_seed = 7;
  std::size_t verify_workers = 2;
  verify->add_option("--n-list", verify_n, "matrix dimensions")->delimiter(',');
  verify->add_option("--block-sizes", verify_bs, "tile sides")->delimiter(',');
  verify->add_option("--seed", verify_seed, "input generator seed");
  verify->add_option("--workers", verify_workers, "engine worker threads");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    cli.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << cli.help();
      return kExitOk;
    }
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_n, gen_density, gen_seed, gen_out);
    if (mul->parsed()) {
      if (mul_n > 0) req.n_override = mul_n;
      return cmd_multiply(req);
    }
    if (cost->parsed()) {
      if (cost_b <= 0 && cost_b_range.empty())
        throw std::invalid_argument("cost: provide --b or --b-range");
      return cmd_cost(cost_algo, cost_n, cost_b, cost_b_range, cost_cores, cost_weight,
                      cost_out);
    }
    if (bench->parsed())
      return cmd_bench(bench_sizes, bench_block_sizes, bench_workers, bench_reps, bench_seed,
                       bench_out);
    if (verify->parsed()) return cmd_verify(verify_n, verify_bs, verify_seed, verify_workers);
  } catch (const ResourceGuardError& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return kExitResourceGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace stark::app
