#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mtcoal/ancestry.hpp"
#include "mtcoal/model.hpp"
#include "mtcoal/partition.hpp"
#include "mtcoal/rational.hpp"
#include "mtcoal/rng.hpp"

namespace mtcoal {

// Limiting merge rates phi_j(T), keyed by the per-cell-sorted canonical
// tensor. Unlisted tensors within the covered depth have rate zero; lookups
// beyond the covered depth raise IncompleteTableError. Diagonal deficits
// phi_j(1_j) may be stored but are never used as off-diagonal rates.
class RateTable {
 public:
  RateTable(int d, int covered_depth);

  int d() const { return d_; }
  int covered_depth() const { return covered_depth_; }

  void set(const MergeTensor& tensor, double rate);
  double rate(const MergeTensor& tensor) const;
  bool contains(const MergeTensor& tensor) const;
  const std::map<MergeTensor, double>& entries() const { return rates_; }

 private:
  int d_;
  int covered_depth_;  // lookups with sum_l i_l above this are errors
  std::map<MergeTensor, double> rates_;
};

// Total binary merge rate sum_k phi_{e_k}(2_k).
double total_binary_merge_rate(const RateTable& rates);

// Discrete measure on (Delta \ {0}) x E^N: Kingman weights a_k plus finitely
// many atoms. Atom frequencies x are stored as the nonincreasing nonzero
// prefix; y labels (0-based internally, 1-based in files) cover the prefix.
struct XiAtom {
  double mass = 0.0;
  std::vector<double> x;
  std::vector<int> y;
};

struct XiSpec {
  std::vector<double> a;
  std::vector<XiAtom> atoms;

  int d() const { return static_cast<int>(a.size()); }
  void validate() const;
};

// Standard time scaling c_N: the maximum of all d^3 coalescence
// probabilities. Zero for merger-free laws (flagged by the caller).
double standard_scaling(const CanningsModel& model);

// Rates of the multi-type Kingman coalescent: same-type binary mergers of
// type k at rate a_k, everything else zero.
RateTable kingman_rates(const std::vector<double>& a);

// Rate of a diagonal merge structure with all entries >= 2 under (a, Xi):
// Kingman part plus, per atom, mass/(x,x) times the sum over pairwise
// distinct support indices with matching labels of prod x^{i_{k,s}}.
double xi_rate(const XiSpec& spec, const MergeTensor& tensor);

// All >=2-entry diagonal canonical tensors with sum i <= depth.
RateTable xi_rate_table(const XiSpec& spec, int depth);

// Extends a >=2-entry diagonal table to diagonal tensors containing ones by
// the reduced consistency recursion, by induction on the number of ones.
RateTable complete_rates_by_consistency(const RateTable& partial, int depth);

struct GeneratorMatrix {
  std::vector<LabeledPartition> states;
  std::vector<std::vector<double>> q;
};

// q_{pi,pi'} = rate of the merge structure for pi proper-subset pi', zero
// otherwise; diagonal entries complete the rows to zero sum.
GeneratorMatrix limit_generator(const RateTable& rates, int n);

// Finitely supported measure on Delta_j; points are flattened (k,s) grids.
struct WeightedPoint {
  double weight = 0.0;
  std::vector<std::vector<double>> x;  // x[k] has length j_k
};

struct FiniteMeasure {
  std::vector<int> j;
  std::vector<WeightedPoint> points;

  // integral of prod x_{k,s}^{i_{k,s}-2} (0^0 = 1) for a diagonal tensor
  // with entries >= 2 and child block counts j.
  double moment_integral(const MergeTensor& tensor) const;
};

// The moment measure Q_j induced by (a, Xi): the Kingman part contributes a
// Dirac mass a_k at 0 when j = e_k; each atom contributes one weighted point
// per pairwise-distinct label-matching index assignment.
FiniteMeasure qj_from_xi(const XiSpec& spec, const std::vector<int>& j);

struct QjMomentCheck {
  double integral = 0.0;  // moment integral of the induced Q_j
  double rate = 0.0;      // direct xi_rate target
};

QjMomentCheck qj_moment_check(const XiSpec& spec, const MergeTensor& tensor);

// Uniform-count Wright-Fisher expansion P_N = A + c_N B + o(c_N) with
// c_N = 1/(dM): exact P_N, the projection A, the correction B and the exact
// sup-norm residual ||P_N - A - c_N B||.
struct StrongMutationExpansion {
  std::vector<LabeledPartition> states;
  ExactMatrix p_n;
  ExactMatrix a;
  ExactMatrix b;
  Rational c_n;
  Rational residual;
};

StrongMutationExpansion strong_mutation_expansion(long M, int n, int d);

struct RealMatrix {
  std::vector<LabeledPartition> states;
  std::vector<std::vector<double>> p;
  std::string provenance = "limit";
};

// Discrete-time limit of the mutation model: entries prod_{k,l}
// rho_{k,l}^{i_{k,l}} between partitions with identical unlabeled blocks.
// Columns of rho must sum to 1 (limits of the constant-size ratios).
RealMatrix discrete_limit_matrix(const std::vector<std::vector<double>>& rho, int n);

struct TimedTrajectory {
  std::vector<std::pair<double, LabeledPartition>> path;  // (jump time, state)
  std::uint64_t seed = 0;
};

// Jump-chain simulation of the limiting coalescent up to t_max; stops early
// in absorbing states.
TimedTrajectory simulate_coalescent(const GeneratorMatrix& generator,
                                    const LabeledPartition& initial, double t_max,
                                    SplitMix64& rng);

}  // namespace mtcoal
