#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtcoal/model.hpp"
#include "mtcoal/partition.hpp"
#include "mtcoal/rational.hpp"

namespace mtcoal {

// Exact one-step transition matrix of the ancestral process over the
// canonical enumeration of P_{n,E}. Lower block-triangular by block count;
// rows sum to 1 exactly.
struct ExactMatrix {
  std::vector<LabeledPartition> states;
  std::vector<std::vector<Rational>> p;
  std::string provenance = "exact";
};

// Empirical one-step matrix with per-entry binomial standard errors.
struct McMatrix {
  std::vector<LabeledPartition> states;
  std::vector<std::vector<double>> freq;
  std::vector<std::vector<double>> std_error;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::string provenance = "monte-carlo";
};

// Phi_j(T): the transition probability of a merge structure, i.e. the
// descending-factorial prefactor times the joint factorial moment.
// Requires i_l <= N_l and j_k <= N_k.
Rational phi(const CanningsModel& model, const MergeTensor& tensor);

ExactMatrix transition_matrix(const CanningsModel& model, int n);

// c_{k,l}(N_k,N_l) when l1 == l2, c_{k,l1,l2}(...) otherwise.
Rational coalescence_probability(const CanningsModel& model, int k, int l1, int l2);

// Block counting process over {i in N_0^d : sum_k i_k <= n}.
struct BlockCountingMatrix {
  std::vector<std::vector<int>> states;
  std::vector<std::vector<Rational>> p;
};

BlockCountingMatrix block_counting_matrix(const CanningsModel& model, int n);

struct AncestryTrajectory {
  std::vector<LabeledPartition> states;  // states[r] after r generations
  std::uint64_t seed = 0;

  const LabeledPartition& initial() const { return states.front(); }
};

// Backward simulation: one generation merges the current l-blocks into child
// offspring slots via a uniform random injection, independently per type l;
// blocks landing on the same parent merge and adopt the parent's type.
AncestryTrajectory simulate_ancestry(const CanningsModel& model,
                                     const LabeledPartition& initial,
                                     int generations, SplitMix64& rng);

// Empirical one-step matrix from `reps` replicates per starting state.
McMatrix mc_transition_estimate(const CanningsModel& model, int n,
                                std::uint64_t reps, std::uint64_t seed);

}  // namespace mtcoal
