#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mtcoal/ancestry.hpp"
#include "mtcoal/model.hpp"
#include "mtcoal/report.hpp"

namespace mtcoal {

// Consistency recursion of Phi: for every in-range tensor and every type l
// with i_l < N_l, Phi_j(T) = sum_k Phi_{j+e_k}(T(k,l)) + sum_k sum_s
// Phi_j(T(k,l,s)); the right side is also checked to be l-independent.
// Tensors are taken from merge structures of all partition pairs up to depth
// n_max plus 100 seeded random in-range tensors per depth level.
LawReport check_consistency(const CanningsModel& model, int n_max);

// Phi_{j'}(T') <= Phi_j(T) over all comparable tensor pairs within depth.
LawReport check_monotonicity(const CanningsModel& model, int n_max);

// Exact lumpability of the n-sample chain onto the m-sample chain under the
// natural restriction.
LawReport check_natural_coupling(const CanningsModel& model, int n, int m);

// p_{pi,pi'} = p_{sigma(pi),sigma(pi')} for all sigma in S_n, plus the
// distribution-level corollary: orbit-uniform initial laws stay orbit-uniform.
LawReport check_permutation_symmetry(const CanningsModel& model, int n);

// Along a sequence of models with growing N_min: P_N -> I holds iff
// E(nu_{k,k,1}) -> 1 and E(nu_{k,k,1} nu_{k,k,2}) -> 1; also tracks the side
// conclusion (N_k/N_l)^2 E(nu_{k,l,1} nu_{k,l,2}) -> delta_{k,l}. Trends are
// judged by monotone decrease of residuals across the sequence.
LawReport check_identity_limit(const std::vector<CanningsModel>& models);

// Finite table of a candidate multi-type partition probability function:
// positional tensor keys (symmetry between per-cell permutations is one of
// the axioms under test, so keys are not canonicalized).
class PpfTable {
 public:
  PpfTable(int d, int depth);

  int d() const { return d_; }
  int depth() const { return depth_; }

  void set(const MergeTensor& tensor, Rational value);
  std::optional<Rational> get(const MergeTensor& tensor) const;
  std::size_t size() const { return values_.size(); }
  const std::map<MergeTensor, Rational>& entries() const { return values_; }

  // Table of Phi values of a deterministic-count model over all tensors with
  // sum_k j_k <= depth and sum_l i_l <= depth (requires depth <= min_k N_k).
  static PpfTable from_model(const CanningsModel& model, int depth);

 private:
  int d_;
  int depth_;
  std::map<MergeTensor, Rational> values_;
};

// Axioms checked in order: normalization p(T_0) = 1, symmetry under per-cell
// permutations, and the consistency recursion at every interior node for
// every type l. The report names the first failing axiom and the offending
// keys; the certified depth is stated explicitly.
LawReport check_meppf(const PpfTable& table);

}  // namespace mtcoal
