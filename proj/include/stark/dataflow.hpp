#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <concepts>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "stark/kernels.hpp"

namespace stark::dataflow {

struct EngineConfig {
  std::size_t workers = 1;
  std::uint64_t seed = 0;  // drives the in-stage task execution order
};

struct StageMetrics {
  std::uint64_t stage_id = 0;
  std::string label;
  std::uint64_t tasks = 0;
  std::uint64_t records_in = 0;
  std::uint64_t records_out = 0;
  std::uint64_t shuffled_elements = 0;  // scalar payload crossing the shuffle
  std::uint64_t flops = 0;              // scalar multiply-adds
  double wall_ms = 0.0;
};

/// `stage_id,label,tasks,records_in,records_out,shuffled_elements,flops,wall_ms`
void write_metrics_csv(const std::string& path, std::span<const StageMetrics> stages);

// Customization points. Types shuffled as group values provide canonical_less
// (the deterministic within-group order) and scalar_volume (payload scalars
// charged at shuffle boundaries) as ADL-visible free functions; these
// fallbacks cover plain comparable / unit-volume elements.
template <class T>
  requires std::totally_ordered<T>
bool canonical_less(const T& a, const T& b) {
  return a < b;
}

template <class T>
std::uint64_t scalar_volume(const T&) {
  return 1;
}

namespace detail {

/// Fixed pool of worker threads; tasks of one stage run concurrently, stages
/// strictly serially. Bodies must not throw (the engine wraps them).
class TaskPool {
 public:
  explicit TaskPool(std::size_t workers);
  ~TaskPool();
  TaskPool(const TaskPool&) = delete;
  TaskPool& operator=(const TaskPool&) = delete;

  void run(std::span<const std::uint32_t> order,
           const std::function<void(std::uint32_t)>& body);
  std::size_t workers() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

/// Lineage node: a chain of pending narrow transformations over materialized
/// source partitions. run(task, sink) streams one task's elements through the
/// pipelined chain.
template <class T>
struct Plan {
  virtual ~Plan() = default;
  virtual std::size_t tasks() const = 0;
  virtual std::uint64_t source_records(std::size_t task) const = 0;
  virtual void run(std::size_t task, const std::function<void(T&&)>& sink) const = 0;
};

template <class T>
using PlanPtr = std::shared_ptr<const Plan<T>>;

template <class T>
struct SourcePlan final : Plan<T> {
  std::vector<std::vector<T>> parts;

  std::size_t tasks() const override { return parts.size(); }
  std::uint64_t source_records(std::size_t task) const override { return parts[task].size(); }
  void run(std::size_t task, const std::function<void(T&&)>& sink) const override {
    for (const T& item : parts[task]) sink(T(item));
  }
};

template <class U, class T, class F>
struct MapPlan final : Plan<T> {
  PlanPtr<U> parent;
  F fn;
  MapPlan(PlanPtr<U> p, F f) : parent(std::move(p)), fn(std::move(f)) {}

  std::size_t tasks() const override { return parent->tasks(); }
  std::uint64_t source_records(std::size_t task) const override {
    return parent->source_records(task);
  }
  void run(std::size_t task, const std::function<void(T&&)>& sink) const override {
    parent->run(task, [&](U&& u) { sink(fn(std::move(u))); });
  }
};

template <class U, class T, class F>
struct FlatMapPlan final : Plan<T> {
  PlanPtr<U> parent;
  F fn;
  FlatMapPlan(PlanPtr<U> p, F f) : parent(std::move(p)), fn(std::move(f)) {}

  std::size_t tasks() const override { return parent->tasks(); }
  std::uint64_t source_records(std::size_t task) const override {
    return parent->source_records(task);
  }
  void run(std::size_t task, const std::function<void(T&&)>& sink) const override {
    parent->run(task, [&](U&& u) {
      for (T& item : fn(std::move(u))) sink(std::move(item));
    });
  }
};

template <class T, class F>
struct FilterPlan final : Plan<T> {
  PlanPtr<T> parent;
  F pred;
  FilterPlan(PlanPtr<T> p, F f) : parent(std::move(p)), pred(std::move(f)) {}

  std::size_t tasks() const override { return parent->tasks(); }
  std::uint64_t source_records(std::size_t task) const override {
    return parent->source_records(task);
  }
  void run(std::size_t task, const std::function<void(T&&)>& sink) const override {
    parent->run(task, [&](T&& item) {
      if (pred(std::as_const(item))) sink(std::move(item));
    });
  }
};

template <class T>
struct UnionPlan final : Plan<T> {
  std::vector<PlanPtr<T>> branches;

  std::size_t tasks() const override {
    std::size_t n = 0;
    for (const auto& b : branches) n += b->tasks();
    return n;
  }
  std::uint64_t source_records(std::size_t task) const override {
    for (const auto& b : branches) {
      if (task < b->tasks()) return b->source_records(task);
      task -= b->tasks();
    }
    throw std::out_of_range("union task index");
  }
  void run(std::size_t task, const std::function<void(T&&)>& sink) const override {
    for (const auto& b : branches) {
      if (task < b->tasks()) { b->run(task, sink); return; }
      task -= b->tasks();
    }
    throw std::out_of_range("union task index");
  }
};

template <class P>
struct pair_traits;
template <class K, class V>
struct pair_traits<std::pair<K, V>> {
  using key_type = K;
  using value_type = V;
};

}  // namespace detail

template <class T>
class Dataset;

/// Single-process stand-in for a cluster: a pool of `workers` executors runs
/// the tasks of each stage; shuffles (group_by_key / reduce_by_key) close
/// stages and record metrics. Collected results do not depend on the worker
/// count or the scheduling seed.
class Engine {
 public:
  explicit Engine(EngineConfig cfg);

  template <class T>
  Dataset<T> source(std::vector<T> items);

  const std::vector<StageMetrics>& metrics() const { return stages_; }
  const EngineConfig& config() const { return cfg_; }

 private:
  template <class T>
  friend class Dataset;

  // Runs `count` tasks in a seeded order, collecting flops deltas and the
  // first failure; returns elapsed wall ms.
  double run_tasks(std::size_t count, const std::string& label,
                   const std::function<void(std::size_t)>& body,
                   std::atomic<std::uint64_t>& flops);

  template <class T>
  std::vector<std::vector<T>> run_narrow(const detail::Plan<T>& plan,
                                         const std::string& label, StageMetrics& sm);

  StageMetrics& open_stage(std::string label);

  EngineConfig cfg_;
  std::unique_ptr<detail::TaskPool> pool_;
  std::vector<StageMetrics> stages_;
};

/// Immutable partitioned collection plus its pending narrow lineage. All
/// transformation callables must be pure.
template <class T>
class Dataset {
 public:
  Dataset() = default;

  template <class F, class U = std::invoke_result_t<F, T&&>>
  Dataset<U> map(F fn) const {
    return Dataset<U>(engine_,
                      std::make_shared<detail::MapPlan<T, U, F>>(plan_, std::move(fn)));
  }

  /// map under a name that reads like its use: element -> (key, value).
  template <class F>
  auto map_to_pair(F fn) const {
    return map(std::move(fn));
  }

  template <class F, class R = std::invoke_result_t<F, T&&>,
            class U = typename R::value_type>
  Dataset<U> flat_map(F fn) const {
    return Dataset<U>(engine_,
                      std::make_shared<detail::FlatMapPlan<T, U, F>>(plan_, std::move(fn)));
  }

  template <class F>
  Dataset<T> filter(F pred) const {
    return Dataset<T>(engine_,
                      std::make_shared<detail::FilterPlan<T, F>>(plan_, std::move(pred)));
  }

  template <class F>
  auto map_values(F fn) const {
    using K = typename detail::pair_traits<T>::key_type;
    using V = typename detail::pair_traits<T>::value_type;
    return map([fn = std::move(fn)](T&& kv) {
      return std::pair<K, std::invoke_result_t<F, V&&>>(std::move(kv.first),
                                                        fn(std::move(kv.second)));
    });
  }

  /// Multiset concatenation; merges lineages without closing a stage.
  Dataset<T> union_with(const Dataset<T>& other) const {
    if (engine_ != other.engine_)
      throw std::invalid_argument("union_with: datasets belong to different engines");
    auto u = std::make_shared<detail::UnionPlan<T>>();
    u->branches = {plan_, other.plan_};
    return Dataset<T>(engine_, std::move(u));
  }

  /// Closes the current stage. Output holds one element (and one partition)
  /// per distinct key, keys in ascending order, group members in canonical
  /// order; that ordering is part of the contract (floating-point
  /// determinism across worker counts).
  auto group_by_key(std::string label = "group_by_key") const {
    using K = typename detail::pair_traits<T>::key_type;
    using V = typename detail::pair_traits<T>::value_type;
    using Group = std::pair<K, std::vector<V>>;

    StageMetrics& sm = engine_->open_stage(std::move(label));
    const auto t0 = std::chrono::steady_clock::now();
    auto outputs = engine_->run_narrow(*plan_, sm.label, sm);

    std::map<K, std::vector<V>> grouped;
    for (auto& part : outputs) {
      for (auto& kv : part) {
        sm.records_out += 1;
        sm.shuffled_elements += scalar_volume(kv.second);
        grouped[kv.first].push_back(std::move(kv.second));
      }
    }
    auto plan = std::make_shared<detail::SourcePlan<Group>>();
    plan->parts.reserve(grouped.size());
    for (auto& [key, values] : grouped) {
      std::stable_sort(values.begin(), values.end(),
                       [](const V& a, const V& b) { return canonical_less(a, b); });
      std::vector<Group> part;
      part.emplace_back(key, std::move(values));
      plan->parts.push_back(std::move(part));
    }
    sm.wall_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0).count();
    return Dataset<Group>(engine_, std::move(plan));
  }

  /// group_by_key followed by a left fold of each group in canonical order.
  /// `op` must be associative and commutative up to fp reassociation.
  template <class F>
  auto reduce_by_key(F op, std::string label = "reduce_by_key") const {
    using V = typename detail::pair_traits<T>::value_type;
    return group_by_key(std::move(label)).map_values([op = std::move(op)](std::vector<V>&& vs) {
      if (vs.empty()) throw std::logic_error("reduce_by_key: empty group");
      V acc = std::move(vs.front());
      for (std::size_t i = 1; i < vs.size(); ++i) acc = op(std::move(acc), std::move(vs[i]));
      return acc;
    });
  }

  /// Materializes the dataset, closing the open stage. Element order is the
  /// deterministic partition order of the lineage sources.
  std::vector<T> collect(std::string label = "collect") const {
    StageMetrics& sm = engine_->open_stage(std::move(label));
    const auto t0 = std::chrono::steady_clock::now();
    auto outputs = engine_->run_narrow(*plan_, sm.label, sm);
    std::vector<T> all;
    for (auto& part : outputs) {
      sm.records_out += part.size();
      all.insert(all.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
    }
    sm.wall_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0).count();
    return all;
  }

  std::size_t partitions() const { return plan_->tasks(); }
  Engine& engine() const { return *engine_; }

 private:
  template <class U>
  friend class Dataset;
  friend class Engine;

  Dataset(Engine* engine, detail::PlanPtr<T> plan)
      : engine_(engine), plan_(std::move(plan)) {}

  Engine* engine_ = nullptr;
  detail::PlanPtr<T> plan_;
};

template <class T>
Dataset<T> Engine::source(std::vector<T> items) {
  auto plan = std::make_shared<detail::SourcePlan<T>>();
  if (!items.empty()) {
    const std::size_t parts = std::min(cfg_.workers, items.size());
    const std::size_t base = items.size() / parts, extra = items.size() % parts;
    auto it = std::make_move_iterator(items.begin());
    for (std::size_t p = 0; p < parts; ++p) {
      const std::size_t len = base + (p < extra ? 1 : 0);
      plan->parts.emplace_back(it, it + static_cast<std::ptrdiff_t>(len));
      it += static_cast<std::ptrdiff_t>(len);
    }
  }
  return Dataset<T>(this, std::move(plan));
}

template <class T>
std::vector<std::vector<T>> Engine::run_narrow(const detail::Plan<T>& plan,
                                               const std::string& label, StageMetrics& sm) {
  const std::size_t count = plan.tasks();
  std::vector<std::vector<T>> outputs(count);
  sm.tasks = count;
  for (std::size_t i = 0; i < count; ++i) sm.records_in += plan.source_records(i);

  std::atomic<std::uint64_t> flops{0};
  run_tasks(count, label,
            [&](std::size_t i) {
              auto& out = outputs[i];
              plan.run(i, [&](T&& item) { out.push_back(std::move(item)); });
            },
            flops);
  sm.flops = flops.load();
  return outputs;
}

}  // namespace stark::dataflow
