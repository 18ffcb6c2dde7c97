#include "mtcoal/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mtcoal/errors.hpp"

namespace mtcoal {

long GenerationSample::type_total(int k, int l) const {
  return std::accumulate(nu[k][l].begin(), nu[k][l].end(), 0L);
}

std::string law_name(OffspringLaw law) {
  switch (law) {
    case OffspringLaw::kWrightFisher: return "wright-fisher";
    case OffspringLaw::kMutation: return "mutation";
    case OffspringLaw::kCustom: return "custom";
  }
  return "unknown";
}

namespace {

void validate_sizes(const std::vector<long>& sizes) {
  if (sizes.empty()) throw std::invalid_argument("model needs d >= 1 subpopulations");
  for (long nk : sizes) {
    if (nk < 1) throw std::invalid_argument("every subpopulation size N_k must be >= 1");
  }
}

// Column constraint sum_k N_{k,l} = N_l; the failure message names the
// violated column 1-based.
void validate_size1(const std::vector<long>& sizes, const std::vector<std::vector<long>>& counts) {
  const int d = static_cast<int>(sizes.size());
  if (static_cast<int>(counts.size()) != d) {
    throw std::invalid_argument("counts must be a d x d matrix");
  }
  for (int k = 0; k < d; ++k) {
    if (static_cast<int>(counts[k].size()) != d) {
      throw std::invalid_argument("counts must be a d x d matrix");
    }
    for (long c : counts[k]) {
      if (c < 0) throw std::invalid_argument("offspring counts N_{k,l} must be >= 0");
    }
  }
  for (int l = 0; l < d; ++l) {
    long column = 0;
    for (int k = 0; k < d; ++k) column += counts[k][l];
    if (column != sizes[l]) {
      std::ostringstream msg;
      msg << "size1 column " << l + 1 << ": ";
      for (int k = 0; k < d; ++k) msg << (k ? "+" : "") << counts[k][l];
      msg << " != " << sizes[l];
      throw std::invalid_argument(msg.str());
    }
  }
}

void validate_mutation_rows(const std::vector<long>& sizes,
                            const std::vector<std::vector<long>>& counts) {
  const int d = static_cast<int>(sizes.size());
  for (int k = 0; k < d; ++k) {
    long row = std::accumulate(counts[k].begin(), counts[k].end(), 0L);
    if (row != sizes[k]) {
      std::ostringstream msg;
      msg << "mutation row " << k + 1 << ": ";
      for (int l = 0; l < d; ++l) msg << (l ? "+" : "") << counts[k][l];
      msg << " != " << sizes[k];
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

CanningsModel::CanningsModel(OffspringLaw law, std::vector<long> sizes,
                             std::vector<std::vector<long>> counts, CustomLaw custom)
    : law_(law), sizes_(std::move(sizes)), counts_(std::move(counts)), custom_(std::move(custom)) {}

CanningsModel CanningsModel::wright_fisher(std::vector<long> sizes,
                                           std::vector<std::vector<long>> counts) {
  validate_sizes(sizes);
  validate_size1(sizes, counts);
  return CanningsModel(OffspringLaw::kWrightFisher, std::move(sizes), std::move(counts), {});
}

CanningsModel CanningsModel::mutation(std::vector<long> sizes,
                                      std::vector<std::vector<long>> counts) {
  validate_sizes(sizes);
  validate_size1(sizes, counts);
  validate_mutation_rows(sizes, counts);
  return CanningsModel(OffspringLaw::kMutation, std::move(sizes), std::move(counts), {});
}

CanningsModel CanningsModel::custom(std::vector<long> sizes, CustomLaw law) {
  validate_sizes(sizes);
  if (!law.sampler) throw std::invalid_argument("custom law needs a sampler");
  return CanningsModel(OffspringLaw::kCustom, std::move(sizes), {}, std::move(law));
}

long CanningsModel::min_size() const {
  return *std::min_element(sizes_.begin(), sizes_.end());
}

std::string CanningsModel::describe() const {
  std::ostringstream out;
  out << law_name(law_) << " d=" << d() << " N=(";
  for (int k = 0; k < d(); ++k) out << (k ? "," : "") << sizes_[k];
  out << ")";
  return out.str();
}

namespace {

void require_moment_domain(const CanningsModel& model, const MergeTensor& tensor) {
  if (tensor.d() != model.d()) {
    throw std::invalid_argument("tensor type count does not match the model");
  }
  for (int k = 0; k < model.d(); ++k) {
    if (tensor.child_blocks(k) > model.size(k)) {
      std::ostringstream msg;
      msg << "j_" << k + 1 << " = " << tensor.child_blocks(k) << " > N_" << k + 1 << " = "
          << model.size(k);
      throw std::domain_error(msg.str());
    }
  }
}

Rational wright_fisher_moment(const CanningsModel& model, const MergeTensor& tensor) {
  // Independent multinomial cells: E prod_s (nu_{k,l,s})_{i_{k,l,s}} =
  // (N_{k,l})_{i_{k,l}} / N_k^{i_{k,l}}.
  Rational result = 1;
  for (int k = 0; k < model.d(); ++k) {
    for (int l = 0; l < model.d(); ++l) {
      const long ikl = tensor.cell_sum(k, l);
      if (ikl == 0) continue;
      result *= ratio(falling_factorial(model.count(k, l), ikl),
                         integer_pow(model.size(k), static_cast<unsigned long>(ikl)));
    }
  }
  result.canonicalize();
  return result;
}

Rational mutation_moment(const CanningsModel& model, const MergeTensor& tensor) {
  // One offspring per parent: the product vanishes as soon as one individual
  // slot carries total exponent >= 2.
  for (int k = 0; k < model.d(); ++k) {
    for (int s = 0; s < tensor.child_blocks(k); ++s) {
      int slot_total = 0;
      for (int l = 0; l < model.d(); ++l) slot_total += tensor.entry(k, l, s);
      if (slot_total >= 2) return 0;
    }
  }
  Rational result = 1;
  for (int k = 0; k < model.d(); ++k) {
    long ik = 0;
    Integer numerator = 1;
    for (int l = 0; l < model.d(); ++l) {
      const long ikl = tensor.cell_sum(k, l);
      numerator *= falling_factorial(model.count(k, l), ikl);
      ik += ikl;
    }
    if (ik == 0) continue;
    result *= ratio(numerator, falling_factorial(model.size(k), ik));
  }
  result.canonicalize();
  return result;
}

}  // namespace

Rational joint_factorial_moment(const CanningsModel& model, const MergeTensor& tensor) {
  require_moment_domain(model, tensor);
  switch (model.law()) {
    case OffspringLaw::kWrightFisher:
      return wright_fisher_moment(model, tensor);
    case OffspringLaw::kMutation:
      return mutation_moment(model, tensor);
    case OffspringLaw::kCustom:
      if (model.custom_law().moment_oracle) return model.custom_law().moment_oracle(tensor);
      throw UnsupportedOperation(
          "custom law has no moment oracle; use estimate_joint_factorial_moment");
  }
  throw std::logic_error("unreachable");
}

MomentEstimate estimate_joint_factorial_moment(const CanningsModel& model,
                                               const MergeTensor& tensor,
                                               std::uint64_t reps, SplitMix64& rng) {
  require_moment_domain(model, tensor);
  if (reps == 0) throw std::invalid_argument("need reps >= 1");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t r = 0; r < reps; ++r) {
    GenerationSample sample = sample_generation(model, rng);
    double product = 1.0;
    for (int k = 0; k < model.d() && product != 0.0; ++k) {
      for (int l = 0; l < model.d() && product != 0.0; ++l) {
        for (int s = 0; s < tensor.child_blocks(k); ++s) {
          const int order = tensor.entry(k, l, s);
          const int nu = sample.nu[k][l][s];
          for (int i = 0; i < order; ++i) product *= nu - i;
          if (product == 0.0) break;
        }
      }
    }
    sum += product;
    sum_sq += product * product;
  }
  const double mean = sum / static_cast<double>(reps);
  const double var = std::max(0.0, sum_sq / static_cast<double>(reps) - mean * mean);
  MomentEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(var / static_cast<double>(reps));
  est.reps = reps;
  est.seed = rng.seed();
  return est;
}

GenerationSample sample_generation(const CanningsModel& model, SplitMix64& rng) {
  if (model.law() == OffspringLaw::kCustom) return model.custom_law().sampler(rng);

  const int d = model.d();
  GenerationSample sample;
  sample.nu.assign(d, std::vector<std::vector<int>>(d));
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) sample.nu[k][l].assign(model.size(k), 0);
  }

  if (model.law() == OffspringLaw::kWrightFisher) {
    // Each (k,l) cell independently: N_{k,l} offspring choose their parent
    // uniformly among the N_k type-k individuals.
    for (int k = 0; k < d; ++k) {
      for (int l = 0; l < d; ++l) {
        for (long c = 0; c < model.count(k, l); ++c) {
          ++sample.nu[k][l][rng.next_below(static_cast<std::uint64_t>(model.size(k)))];
        }
      }
    }
    return sample;
  }

  // Mutation law: uniformly shuffle the multiset with N_{k,l} copies of each
  // label l over the N_k individuals of type k.
  for (int k = 0; k < d; ++k) {
    std::vector<int> labels;
    labels.reserve(model.size(k));
    for (int l = 0; l < d; ++l) labels.insert(labels.end(), model.count(k, l), l);
    for (size_t i = labels.size(); i > 1; --i) {
      std::swap(labels[i - 1], labels[rng.next_below(i)]);
    }
    for (long i = 0; i < model.size(k); ++i) sample.nu[k][labels[i]][i] = 1;
  }
  return sample;
}

std::vector<std::vector<Rational>> backward_mutation_matrix(const CanningsModel& model) {
  if (!model.deterministic_counts()) {
    throw UnsupportedOperation("backward mutation matrix needs deterministic counts");
  }
  const int d = model.d();
  std::vector<std::vector<Rational>> m(d, std::vector<Rational>(d));
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      m[k][l] = ratio(model.count(l, k), model.size(k));
      m[k][l].canonicalize();
    }
  }
  return m;
}

namespace {

// Single-slot joint moments used by the identity checks, exact per law.
Rational moment_e_nu(const CanningsModel& model, int k, int l) {
  std::vector<int> j(model.d(), 0);
  j[k] = 1;
  return joint_factorial_moment(model, MergeTensor(j).incremented(k, l, 0));
}

Rational moment_e_nu2(const CanningsModel& model, int k, int l) {
  std::vector<int> j(model.d(), 0);
  j[k] = 1;
  // E(nu^2) = E((nu)_2) + E(nu).
  MergeTensor pair = MergeTensor(j).incremented(k, l, 0).incremented(k, l, 0);
  return joint_factorial_moment(model, pair) + moment_e_nu(model, k, l);
}

Rational moment_e_nu1nu2(const CanningsModel& model, int k, int l) {
  std::vector<int> j(model.d(), 0);
  j[k] = 2;
  return joint_factorial_moment(model,
                                MergeTensor(j).incremented(k, l, 0).incremented(k, l, 1));
}

}  // namespace

LawReport moment_identities_check(const CanningsModel& model) {
  if (!model.deterministic_counts()) {
    throw UnsupportedOperation("moment identities need deterministic counts");
  }
  LawReport report;
  report.law = "moment-identities";
  report.instance = model.describe();
  Rational worst = 0;

  auto record = [&](const Rational& lhs, const Rational& rhs, const std::string& name) {
    ++report.cases_checked;
    Rational residual = abs(lhs - rhs);
    if (residual > worst) worst = residual;
    if (residual != 0) {
      report.violations.push_back(name + ": " + to_fraction_string(lhs) +
                                  " != " + to_fraction_string(rhs));
    }
  };
  auto record_leq = [&](const Rational& lhs, const Rational& rhs, const std::string& name) {
    ++report.cases_checked;
    if (lhs > rhs) {
      Rational residual = lhs - rhs;
      if (residual > worst) worst = residual;
      report.violations.push_back(name + ": " + to_fraction_string(lhs) + " > " +
                                  to_fraction_string(rhs));
    }
  };

  const int d = model.d();
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const Rational e_nu = moment_e_nu(model, k, l);
      const std::string kl = "(" + std::to_string(k + 1) + "," + std::to_string(l + 1) + ")";

      // First moment: E(nu_{k,l,1}) = E(N_{k,l}) / N_k.
      record(e_nu, ratio(model.count(k, l), model.size(k)), "mean" + kl);

      // Second joint moment, deterministic counts so Var(N_{k,l}) = 0:
      // E(nu_1 nu_2) = (E N_{k,l}/N_k)^2 - Var(nu_1)/(N_k - 1).
      if (model.size(k) > 1) {
        const Rational mean = ratio(model.count(k, l), model.size(k));
        const Rational var_nu = moment_e_nu2(model, k, l) - e_nu * e_nu;
        record(moment_e_nu1nu2(model, k, l), mean * mean - var_nu / ratio(model.size(k) - 1, 1),
               "pair-moment" + kl);
      } else {
        report.note("N_" + std::to_string(k + 1) + " = 1: pair-moment identity skipped");
      }

      // Same-type coalescence bounds, defined only when N_l > 1.
      if (model.size(l) > 1) {
        const Rational c_kl = ratio(Integer(model.size(k)), falling_factorial(model.size(l), 2)) *
                              (moment_e_nu2(model, k, l) - e_nu);
        const Rational mid = ratio(falling_factorial(model.count(k, l), 2),
                                      falling_factorial(model.size(l), 2));
        const Rational top = ratio(model.count(k, l), model.size(l));
        record_leq(c_kl, mid, "coalescence-bound-1" + kl);
        record_leq(mid, top, "coalescence-bound-2" + kl);
      }
    }
    // Cross-type coalescence bounds.
    for (int l1 = 0; l1 < d; ++l1) {
      for (int l2 = 0; l2 < d; ++l2) {
        if (l1 == l2) continue;
        std::vector<int> j(model.d(), 0);
        j[k] = 1;
        const Rational e_prod = joint_factorial_moment(
            model, MergeTensor(j).incremented(k, l1, 0).incremented(k, l2, 0));
        const Rational c = ratio(model.size(k), model.size(l1)) * e_prod / ratio(model.size(l2), 1);
        const Rational mid =
            ratio(model.count(k, l1) * model.count(k, l2), model.size(l1) * model.size(l2));
        const Rational top1 = ratio(model.count(k, l1), model.size(l1));
        const Rational top2 = ratio(model.count(k, l2), model.size(l2));
        const std::string kll = "(" + std::to_string(k + 1) + "," + std::to_string(l1 + 1) + "," +
                                std::to_string(l2 + 1) + ")";
        record_leq(c, mid, "cross-bound-1" + kll);
        record_leq(mid, top1 < top2 ? top1 : top2, "cross-bound-2" + kll);
      }
    }
  }

  report.worst_residual = to_fraction_string(worst);
  report.worst_residual_value = worst.get_d();
  return report;
}

CanningsModel wf_desk_model() {
  return CanningsModel::wright_fisher({4, 6}, {{3, 2}, {1, 4}});
}

CanningsModel mutation_desk_model() {
  return CanningsModel::mutation({4, 5, 7}, {{1, 2, 1}, {1, 0, 4}, {2, 3, 2}});
}

}  // namespace mtcoal
