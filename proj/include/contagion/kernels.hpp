#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <vector>

#include "contagion/dynamics.hpp"

namespace contagion {

enum class Execution { Serial, Parallel };

// Worker cap for Parallel execution. 0 -> CONTAGION_JOBS or the OpenMP default.
void set_worker_count(int jobs);
int worker_count();

// Calls body(i) for i in [0, count). Exceptions thrown by any iteration are
// rethrown (first by index) after the loop completes.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body,
                    Execution exec = Execution::Parallel);

struct CascadeJob {
  Propagation propagation;
  std::vector<NodeId> seeds;
  std::uint64_t rng_seed = 0;
};

// Runs every job independently; output order matches job order and is
// identical for Serial and Parallel execution.
std::vector<CascadeRecord> run_batch(const WeightedGraph& g, std::span<const CascadeJob> jobs,
                                     const SimParams& p, Execution exec = Execution::Parallel);

// Reference: one activation_prob call per node.
std::vector<double> step_probs_scalar(const CascadeState& s, const Propagation& c,
                                      const WeightedGraph& g, const SimParams& p);
// Same values as step_probs_scalar, nodes split across OpenMP threads.
std::vector<double> step_probs_parallel(const CascadeState& s, const Propagation& c,
                                        const WeightedGraph& g, const SimParams& p);

}  // namespace contagion
