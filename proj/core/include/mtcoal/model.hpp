#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mtcoal/rational.hpp"
#include "mtcoal/report.hpp"
#include "mtcoal/rng.hpp"
#include "mtcoal/tensor.hpp"

namespace mtcoal {

// One realized generation: nu[k][l][i] = number of type-l offspring of the
// i-th individual of type k.
struct GenerationSample {
  std::vector<std::vector<std::vector<int>>> nu;

  long type_total(int k, int l) const;  // sum_i nu[k][l][i] = N_{k,l}
};

enum class OffspringLaw { kWrightFisher, kMutation, kCustom };

std::string law_name(OffspringLaw law);

struct CustomLaw {
  std::function<GenerationSample(SplitMix64&)> sampler;
  // Optional exact oracle for joint descending factorial moments.
  std::function<Rational(const MergeTensor&)> moment_oracle;
};

// Multi-type Cannings model: type count d, subpopulation sizes N_k, and an
// offspring law. counts[k][l] = N_{k,l} is the number of type-l offspring of
// all type-k parents; rows are parent types, columns offspring types, so the
// constant-size constraint is the column-sum constraint sum_k N_{k,l} = N_l.
class CanningsModel {
 public:
  static CanningsModel wright_fisher(std::vector<long> sizes,
                                     std::vector<std::vector<long>> counts);
  static CanningsModel mutation(std::vector<long> sizes,
                                std::vector<std::vector<long>> counts);
  static CanningsModel custom(std::vector<long> sizes, CustomLaw law);

  int d() const { return static_cast<int>(sizes_.size()); }
  const std::vector<long>& sizes() const { return sizes_; }
  long size(int k) const { return sizes_[k]; }
  long min_size() const;

  OffspringLaw law() const { return law_; }
  bool deterministic_counts() const { return law_ != OffspringLaw::kCustom; }
  const std::vector<std::vector<long>>& counts() const { return counts_; }
  long count(int k, int l) const { return counts_[k][l]; }
  const CustomLaw& custom_law() const { return custom_; }

  std::string describe() const;

 private:
  CanningsModel(OffspringLaw law, std::vector<long> sizes,
                std::vector<std::vector<long>> counts, CustomLaw custom);

  OffspringLaw law_;
  std::vector<long> sizes_;
  std::vector<std::vector<long>> counts_;
  CustomLaw custom_;
};

// E[ prod_{k,l} prod_s (nu_{k,l,s})_{i_{k,l,s}} ], exact for the built-in
// laws; a Custom law needs a moment oracle. Requires j_k <= N_k.
Rational joint_factorial_moment(const CanningsModel& model, const MergeTensor& tensor);

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
};

// Monte-Carlo estimate of the same moment, usable for any law.
MomentEstimate estimate_joint_factorial_moment(const CanningsModel& model,
                                               const MergeTensor& tensor,
                                               std::uint64_t reps, SplitMix64& rng);

GenerationSample sample_generation(const CanningsModel& model, SplitMix64& rng);

// Mean backward mutation matrix m_{k,l} = E(N_{l,k}) / N_k; rows sum to 1.
std::vector<std::vector<Rational>> backward_mutation_matrix(const CanningsModel& model);

// Verifies the first- and second-moment identities and the coalescence
// probability bounds on a deterministic-count model, in exact arithmetic.
LawReport moment_identities_check(const CanningsModel& model);

// Desk-scale instances used across tests and documentation.
CanningsModel wf_desk_model();        // d=2, N=(4,6), counts ((3,2),(1,4))
CanningsModel mutation_desk_model();  // d=3, N=(4,5,7), counts ((1,2,1),(1,0,4),(2,3,2))

}  // namespace mtcoal
