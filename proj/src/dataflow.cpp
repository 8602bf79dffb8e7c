#include "stark/dataflow.hpp"

#include <algorithm>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace stark::dataflow {

namespace detail {

struct TaskPool::State {
  std::mutex mu;
  std::condition_variable cv_work;
  std::condition_variable cv_done;
  std::uint64_t generation = 0;
  bool stop = false;

  // all cursor state guarded by mu; tasks are coarse enough that the
  // per-task lock is noise
  std::span<const std::uint32_t> order;
  const std::function<void(std::uint32_t)>* body = nullptr;
  std::size_t cursor = 0;
  std::size_t remaining = 0;

  std::vector<std::thread> threads;

  void worker_loop() {
    std::unique_lock lk(mu);
    std::uint64_t seen = 0;
    for (;;) {
      cv_work.wait(lk, [&] { return stop || generation != seen; });
      if (stop) return;
      seen = generation;
      while (cursor < order.size()) {
        const std::uint32_t task = order[cursor++];
        const auto* fn = body;
        lk.unlock();
        (*fn)(task);
        lk.lock();
        if (--remaining == 0) cv_done.notify_all();
      }
    }
  }
};

TaskPool::TaskPool(std::size_t workers) : state_(std::make_unique<State>()) {
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");
  state_->threads.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i)
    state_->threads.emplace_back([s = state_.get()] { s->worker_loop(); });
}

TaskPool::~TaskPool() {
  {
    std::lock_guard lk(state_->mu);
    state_->stop = true;
  }
  state_->cv_work.notify_all();
  for (auto& t : state_->threads) t.join();
}

std::size_t TaskPool::workers() const { return state_->threads.size(); }

void TaskPool::run(std::span<const std::uint32_t> order,
                   const std::function<void(std::uint32_t)>& body) {
  if (order.empty()) return;
  std::unique_lock lk(state_->mu);
  state_->order = order;
  state_->body = &body;
  state_->cursor = 0;
  state_->remaining = order.size();
  ++state_->generation;
  state_->cv_work.notify_all();
  state_->cv_done.wait(lk, [&] { return state_->remaining == 0; });
  state_->body = nullptr;
}

}  // namespace detail

Engine::Engine(EngineConfig cfg)
    : cfg_(cfg), pool_(std::make_unique<detail::TaskPool>(cfg.workers)) {
  if (cfg_.workers == 0) throw std::invalid_argument("EngineConfig.workers must be >= 1");
}

StageMetrics& Engine::open_stage(std::string label) {
  StageMetrics sm;
  sm.stage_id = stages_.size() + 1;
  sm.label = std::move(label);
  stages_.push_back(std::move(sm));
  return stages_.back();
}

double Engine::run_tasks(std::size_t count, const std::string& label,
                         const std::function<void(std::size_t)>& body,
                         std::atomic<std::uint64_t>& flops) {
  std::vector<std::uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0u);
  std::mt19937_64 rng(cfg_.seed * 0x9E3779B97F4A7C15ull + stages_.size());
  std::shuffle(order.begin(), order.end(), rng);

  std::mutex err_mu;
  std::exception_ptr first_error;
  std::size_t first_error_task = 0;

  const auto t0 = std::chrono::steady_clock::now();
  const std::function<void(std::uint32_t)> wrapped = [&](std::uint32_t i) {
    const std::uint64_t f0 = kernels::thread_flops();
    try {
      body(i);
    } catch (...) {
      std::lock_guard lk(err_mu);
      if (!first_error) {
        first_error = std::current_exception();
        first_error_task = i;
      }
    }
    flops.fetch_add(kernels::thread_flops() - f0, std::memory_order_relaxed);
  };
  pool_->run(order, wrapped);
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const std::exception& e) {
      throw std::runtime_error("stage '" + label + "' task " +
                               std::to_string(first_error_task) + ": " + e.what());
    }
  }
  return wall;
}

void write_metrics_csv(const std::string& path, std::span<const StageMetrics> stages) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "stage_id,label,tasks,records_in,records_out,shuffled_elements,flops,wall_ms\n";
  for (const StageMetrics& s : stages) {
    out << s.stage_id << ',' << s.label << ',' << s.tasks << ',' << s.records_in << ','
        << s.records_out << ',' << s.shuffled_elements << ',' << s.flops << ','
        << s.wall_ms << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace stark::dataflow
