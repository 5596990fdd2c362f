#include "contagion/kernels.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace contagion {

namespace {
int configured_jobs = 0;
}

void set_worker_count(int jobs) { configured_jobs = jobs < 0 ? 0 : jobs; }

int worker_count() {
  if (configured_jobs > 0) return configured_jobs;
  if (const char* env = std::getenv("CONTAGION_JOBS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body,
                    Execution exec) {
  std::vector<std::exception_ptr> errors(count);
  if (exec == Execution::Serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        body(std::size_t(i));
      } catch (...) {
        errors[std::size_t(i)] = std::current_exception();
      }
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<CascadeRecord> run_batch(const WeightedGraph& g, std::span<const CascadeJob> jobs,
                                     const SimParams& p, Execution exec) {
  p.validate();
  std::vector<CascadeRecord> out(jobs.size());
  for_each_index(
      jobs.size(),
      [&](std::size_t i) {
        out[i] = run_cascade(g, jobs[i].propagation, jobs[i].seeds, p, jobs[i].rng_seed);
      },
      exec);
  return out;
}

std::vector<double> step_probs_scalar(const CascadeState& s, const Propagation& c,
                                      const WeightedGraph& g, const SimParams& p) {
  std::vector<double> out(g.node_count());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = activation_prob(NodeId(v), s, c, g, p);
  return out;
}

std::vector<double> step_probs_parallel(const CascadeState& s, const Propagation& c,
                                        const WeightedGraph& g, const SimParams& p) {
  std::vector<double> out(g.node_count());
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::int64_t v = 0; v < n; ++v) out[std::size_t(v)] = activation_prob(NodeId(v), s, c, g, p);
  return out;
}

}  // namespace contagion
