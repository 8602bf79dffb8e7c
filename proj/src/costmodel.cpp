#include "stark/costmodel.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "stark/dense.hpp"

namespace stark::costmodel {
namespace {

Int ipow(Int base, int exp) {
  Int v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

Int imin(Int a, Int b) { return a < b ? a : b; }

StageCost make_row(std::string label, Int comp, Int comm, Int pf,
                   const Rational& comm_weight, bool informational = false) {
  StageCost row;
  row.label = std::move(label);
  row.computation = comp;
  row.communication = comm;
  row.pf = pf;
  row.wall_units = (Rational(comp) + comm_weight * Rational(comm)) / Rational(pf);
  row.informational = informational;
  return row;
}

CostBreakdown finish(std::vector<StageCost> rows) {
  CostBreakdown out;
  out.stages = std::move(rows);
  for (const StageCost& row : out.stages)
    if (!row.informational) out.total += row.wall_units;
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace

const char* algo_name(Algo algo) {
  switch (algo) {
    case Algo::mllib: return "mllib";
    case Algo::marlin: return "marlin";
    case Algo::stark: return "stark";
  }
  return "?";
}

CostParams CostParams::make(std::int64_t n, std::int64_t b, std::int64_t cores) {
  if (n <= 0 || !is_power_of_two(static_cast<std::uint64_t>(n)))
    throw std::invalid_argument("cost model: n must be a power of two");
  if (b <= 0 || !is_power_of_two(static_cast<std::uint64_t>(b)))
    throw std::invalid_argument("cost model: b must be a power of two");
  if (b > n) throw std::invalid_argument("cost model: b must not exceed n");
  if (cores < 1) throw std::invalid_argument("cost model: cores must be >= 1");
  CostParams params;
  params.n = n;
  params.b = b;
  params.cores = cores;
  params.p = log2_exact(static_cast<std::uint64_t>(n));
  params.q = params.p - log2_exact(static_cast<std::uint64_t>(b));
  return params;
}

int stages_stark(const CostParams& params) { return 2 * params.levels() + 2; }

CostBreakdown cost_mllib(const CostParams& params, const Rational& comm_weight) {
  const Int n = params.n, b = params.b, c = params.cores;
  const Int nb = params.block_side();
  const Int pf = imin(b * b, c);

  std::vector<StageCost> rows;
  rows.push_back(make_row("simulation", 0, 2 * n * n / (b * b), 1, comm_weight));
  rows.push_back(make_row("stage1-flatmap-a", b * b * b, 0, pf, comm_weight));
  rows.push_back(make_row("stage1-flatmap-b", b * b * b, 0, pf, comm_weight));
  rows.push_back(make_row("stage3-cogroup", 0, 2 * imin(b, c) * n * n, pf, comm_weight));
  rows.push_back(make_row("stage3-flatmap", b * b * b * nb * nb * nb, 0, pf, comm_weight));
  rows.push_back(make_row("stage4-reducebykey", b * n * n, 0, pf, comm_weight));
  return finish(std::move(rows));
}

CostBreakdown cost_marlin(const CostParams& params, const Rational& comm_weight) {
  const Int n = params.n, b = params.b, c = params.cores;
  const Int nb = params.block_side();
  const Int pf1 = imin(2 * b * b, c);
  const Int pf3 = imin(b * b * b, c);
  const Int pf4 = imin(b * b, c);

  std::vector<StageCost> rows;
  rows.push_back(make_row("stage1-flatmap-a", 2 * b * b * b, 2 * b * n * n, pf1, comm_weight));
  rows.push_back(make_row("stage1-flatmap-b", 2 * b * b * b, 2 * b * n * n, pf1, comm_weight));
  rows.push_back(make_row("stage3-join", 0, b * n * n, pf3, comm_weight));
  // the bn^2 spill after the leaf multiplications is charged to the next
  // shuffle, not here, to keep the lemma's total
  rows.push_back(make_row("stage3-mappartition", b * b * b * nb * nb * nb, 0, pf3, comm_weight));
  rows.push_back(make_row("stage4-reducebykey", 0, b * n * n, pf4, comm_weight));
  return finish(std::move(rows));
}

CostBreakdown cost_stark(const CostParams& params, const Rational& comm_weight) {
  if (params.p < params.q) throw std::invalid_argument("cost model: p < q");
  const Int n = params.n, b = params.b, c = params.cores;
  const Int nb = params.block_side();
  const int levels = params.levels();
  const Int leaf_count = ipow(7, levels);

  std::vector<StageCost> rows;
  rows.push_back(make_row("stage1-input", 0, 6 * n * n, imin(1, c), comm_weight,
                          /*informational=*/true));

  for (int i = 0; i < levels; ++i) {
    const std::string suffix = "-L" + std::to_string(i);
    const Int pf_group = imin(ipow(7, i + 1), c);
    const Int rep_comp = 2 * b * b * ipow(7, i) / ipow(4, i);
    rows.push_back(make_row("divide-flatmap" + suffix, rep_comp, 0, imin(rep_comp, c),
                            comm_weight));
    rows.push_back(make_row("divide-groupbykey" + suffix, 0,
                            3 * 2 * n * n * ipow(7, i) / ipow(2, i), pf_group, comm_weight));
    rows.push_back(make_row("divide-add" + suffix,
                            2 * b * b * ipow(7, i + 1) / ipow(2, i + 1), 0, pf_group,
                            comm_weight));
  }

  const Int pf_leaf = imin(leaf_count, c);
  rows.push_back(make_row("leaf-exchange", 0, 2 * leaf_count * nb * nb, pf_leaf, comm_weight));
  rows.push_back(make_row("leaf-groupbykey", 0, 2 * leaf_count * nb * nb, pf_leaf, comm_weight));
  rows.push_back(make_row("leaf-multiply", leaf_count * nb * nb * nb, 0, pf_leaf, comm_weight));

  for (int i = 0; i < levels; ++i) {
    const std::string suffix = "-L" + std::to_string(i);
    const Int pf_group = imin(ipow(7, i + 1), c);
    rows.push_back(make_row("combine-map" + suffix, b * b * ipow(7, i + 1) / ipow(4, i + 1),
                            n * n * ipow(7, i + 1) / ipow(4, i + 1), pf_group, comm_weight));
    rows.push_back(make_row("combine-groupbykey" + suffix, 0,
                            n * n * ipow(7, i + 1) / ipow(4, i + 1), pf_group, comm_weight));
    rows.push_back(make_row("combine-add" + suffix, ipow(7, i + 1) * 12 * nb * nb, 0,
                            pf_group, comm_weight));
  }
  return finish(std::move(rows));
}

CostBreakdown cost_for(Algo algo, const CostParams& params, const Rational& comm_weight) {
  switch (algo) {
    case Algo::mllib: return cost_mllib(params, comm_weight);
    case Algo::marlin: return cost_marlin(params, comm_weight);
    case Algo::stark: return cost_stark(params, comm_weight);
  }
  throw std::invalid_argument("unknown algorithm");
}

std::uint64_t leaf_multiplications_stark(const CostParams& params) {
  return static_cast<std::uint64_t>(ipow(7, params.levels()));
}

std::uint64_t leaf_multiplications_naive(const CostParams& params) {
  return static_cast<std::uint64_t>(params.b) * params.b * params.b;
}

Int peak_block_footprint(const CostParams& params, int level) {
  if (level < 0 || level > params.levels())
    throw std::invalid_argument("peak_block_footprint: level out of range");
  return ipow(3, level) * Int(params.n) * params.n;
}

std::int64_t optimal_partition(Algo algo, std::int64_t n, std::int64_t cores,
                               std::span<const std::int64_t> b_values) {
  if (b_values.empty()) throw std::invalid_argument("optimal_partition: empty range");
  std::vector<std::int64_t> sorted(b_values.begin(), b_values.end());
  std::sort(sorted.begin(), sorted.end());
  std::int64_t best_b = 0;
  Rational best_cost;
  bool have = false;
  for (std::int64_t b : sorted) {
    const Rational total = cost_for(algo, CostParams::make(n, b, cores)).total;
    if (!have || total < best_cost) {  // strict: ties keep the smaller b
      best_b = b;
      best_cost = total;
      have = true;
    }
  }
  return best_b;
}

std::string cost_csv_header() {
  return "algo,n,b,cores,stage,computation,communication,pf,wall_units\n";
}

void append_cost_csv(std::string& out, Algo algo, const CostParams& params,
                     const CostBreakdown& breakdown) {
  const std::string prefix = std::string(algo_name(algo)) + "," +
                             std::to_string(params.n) + "," + std::to_string(params.b) + "," +
                             std::to_string(params.cores) + ",";
  for (const StageCost& row : breakdown.stages) {
    out += prefix + row.label + (row.informational ? "(excluded)" : "") + "," +
           int_to_string(row.computation) + "," + int_to_string(row.communication) + "," +
           int_to_string(row.pf) + "," + fmt_double(row.wall_units.to_double()) + "\n";
  }
  out += prefix + "TOTAL,,,," + fmt_double(breakdown.total.to_double()) + "\n";
}

}  // namespace stark::costmodel
