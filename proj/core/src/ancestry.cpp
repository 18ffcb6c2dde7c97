#include "mtcoal/ancestry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mtcoal {

Rational phi(const CanningsModel& model, const MergeTensor& tensor) {
  if (tensor.d() != model.d()) {
    throw std::invalid_argument("tensor type count does not match the model");
  }
  const auto parent = tensor.parent_counts();
  for (int l = 0; l < model.d(); ++l) {
    if (parent[l] > model.size(l)) {
      std::ostringstream msg;
      msg << "i_" << l + 1 << " = " << parent[l] << " > N_" << l + 1 << " = " << model.size(l);
      throw std::domain_error(msg.str());
    }
  }
  Integer numerator = 1;
  Integer denominator = 1;
  for (int k = 0; k < model.d(); ++k) {
    numerator *= falling_factorial(model.size(k), tensor.child_blocks(k));
    denominator *= falling_factorial(model.size(k), parent[k]);
  }
  Rational prefactor(numerator, denominator);
  prefactor.canonicalize();
  return prefactor * joint_factorial_moment(model, tensor);
}

ExactMatrix transition_matrix(const CanningsModel& model, int n) {
  const long total = std::accumulate(model.sizes().begin(), model.sizes().end(), 0L);
  if (n < 1 || n > total) {
    throw std::invalid_argument("sample size must satisfy 1 <= n <= sum_k N_k");
  }
  ExactMatrix matrix;
  matrix.states = enumerate_partitions(n, model.d());
  const size_t m = matrix.states.size();
  matrix.p.assign(m, std::vector<Rational>(m, Rational(0)));
  for (size_t row = 0; row < m; ++row) {
    for (size_t col = 0; col < m; ++col) {
      auto tensor = merge_structure(matrix.states[row], matrix.states[col]);
      if (tensor) matrix.p[row][col] = phi(model, *tensor);
    }
  }
  return matrix;
}

Rational coalescence_probability(const CanningsModel& model, int k, int l1, int l2) {
  if (l1 == l2 && model.size(l1) <= 1) {
    throw std::domain_error("same-type coalescence probability needs N_l > 1");
  }
  return phi(model, pair_coalescence_tensor(k, l1, l2, model.d()));
}

namespace {

void enumerate_count_vectors(int d, int remaining, std::vector<int>& current,
                             std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == d) {
    out.push_back(current);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    current.push_back(v);
    enumerate_count_vectors(d, remaining - v, current, out);
    current.pop_back();
  }
}

// All compositions of `total` into `parts` nonnegative summands.
void enumerate_compositions(int total, int parts, std::vector<int>& current,
                            std::vector<std::vector<int>>& out) {
  if (parts == 0) {
    if (total == 0) out.push_back(current);
    return;
  }
  for (int v = 0; v <= total; ++v) {
    current.push_back(v);
    enumerate_compositions(total - v, parts - 1, current, out);
    current.pop_back();
  }
}

}  // namespace

BlockCountingMatrix block_counting_matrix(const CanningsModel& model, int n) {
  const long total = std::accumulate(model.sizes().begin(), model.sizes().end(), 0L);
  if (n < 1 || n > total) {
    throw std::invalid_argument("sample size must satisfy 1 <= n <= sum_k N_k");
  }
  const int d = model.d();

  BlockCountingMatrix matrix;
  {
    std::vector<int> current;
    enumerate_count_vectors(d, n, current, matrix.states);
    std::stable_sort(matrix.states.begin(), matrix.states.end(),
                     [](const std::vector<int>& a, const std::vector<int>& b) {
                       return std::accumulate(a.begin(), a.end(), 0) <
                              std::accumulate(b.begin(), b.end(), 0);
                     });
  }
  const size_t m = matrix.states.size();
  matrix.p.assign(m, std::vector<Rational>(m, Rational(0)));

  for (size_t row = 0; row < m; ++row) {
    const auto& iv = matrix.states[row];
    const int i_total = std::accumulate(iv.begin(), iv.end(), 0);
    for (size_t col = 0; col < m; ++col) {
      const auto& jv = matrix.states[col];
      const int j_total = std::accumulate(jv.begin(), jv.end(), 0);
      if (j_total > i_total || (i_total > 0 && j_total == 0)) continue;
      bool feasible = true;
      for (int k = 0; k < d; ++k) {
        if (jv[k] > model.size(k)) feasible = false;
      }
      for (int l = 0; l < d; ++l) {
        if (iv[l] > model.size(l)) feasible = false;
      }
      if (!feasible) continue;

      // Slots in row-major (k, s) order; per type l enumerate compositions of
      // i_l over the slots, keeping only tensors whose slots all absorb at
      // least one block.
      std::vector<std::vector<std::vector<int>>> per_type(d);
      for (int l = 0; l < d; ++l) {
        std::vector<int> current;
        enumerate_compositions(iv[l], j_total, current, per_type[l]);
        if (per_type[l].empty()) feasible = false;
      }
      if (!feasible) continue;

      Rational sum(0);
      std::vector<size_t> pick(d, 0);
      while (true) {
        bool slots_nonempty = true;
        for (int slot = 0; slot < j_total && slots_nonempty; ++slot) {
          int slot_total = 0;
          for (int l = 0; l < d; ++l) slot_total += per_type[l][pick[l]][slot];
          if (slot_total == 0) slots_nonempty = false;
        }
        if (slots_nonempty) {
          std::vector<std::vector<std::vector<int>>> cells(
              d, std::vector<std::vector<int>>(d));
          int slot = 0;
          for (int k = 0; k < d; ++k) {
            for (int l = 0; l < d; ++l) cells[k][l].resize(jv[k]);
            for (int s = 0; s < jv[k]; ++s, ++slot) {
              for (int l = 0; l < d; ++l) cells[k][l][s] = per_type[l][pick[l]][slot];
            }
          }
          MergeTensor tensor(d, std::move(cells));
          Integer factorials = 1;
          for (int k = 0; k < d; ++k) {
            for (int l = 0; l < d; ++l) {
              for (int s = 0; s < jv[k]; ++s) {
                Integer f;
                mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(tensor.entry(k, l, s)));
                factorials *= f;
              }
            }
          }
          Rational term = joint_factorial_moment(model, tensor) / Rational(factorials);
          term.canonicalize();
          sum += term;
        }
        int pos = d - 1;
        while (pos >= 0 && ++pick[pos] == per_type[pos].size()) {
          pick[pos] = 0;
          --pos;
        }
        if (pos < 0) break;
      }

      Integer numer = 1;
      Integer denom = 1;
      for (int k = 0; k < d; ++k) {
        numer *= binomial_coeff(static_cast<unsigned long>(model.size(k)),
                                static_cast<unsigned long>(jv[k]));
        denom *= binomial_coeff(static_cast<unsigned long>(model.size(k)),
                                static_cast<unsigned long>(iv[k]));
      }
      Rational prefactor(numer, denom);
      prefactor.canonicalize();
      matrix.p[row][col] = prefactor * sum;
    }
    if (i_total == 0) matrix.p[row][row] = 1;  // no lineages, nothing happens
  }
  return matrix;
}

namespace {

LabeledPartition ancestry_step(const CanningsModel& model, const LabeledPartition& state,
                               SplitMix64& rng) {
  const int d = model.d();
  GenerationSample sample = sample_generation(model, rng);

  // parent id = k * max_size + i identifies one individual of the parent
  // generation; blocks assigned to the same parent merge and take its type.
  const long max_size = *std::max_element(model.sizes().begin(), model.sizes().end());
  std::map<long, std::vector<int>> merged;  // parent id -> merged elements
  std::map<long, int> parent_type;

  for (int l = 0; l < d; ++l) {
    std::vector<int> block_ids;
    for (int b = 0; b < state.block_count(); ++b) {
      if (state.labels()[b] == l) block_ids.push_back(b);
    }
    if (block_ids.empty()) continue;

    std::vector<long> slots;  // one entry per type-l offspring, value = parent id
    for (int k = 0; k < d; ++k) {
      for (long i = 0; i < model.size(k); ++i) {
        for (int c = 0; c < sample.nu[k][l][i]; ++c) slots.push_back(k * max_size + i);
      }
    }
    if (block_ids.size() > slots.size()) {
      throw std::domain_error("more blocks of a type than offspring slots");
    }
    // Uniform injection via partial Fisher-Yates.
    for (size_t b = 0; b < block_ids.size(); ++b) {
      const size_t pick = b + rng.next_below(slots.size() - b);
      std::swap(slots[b], slots[pick]);
      const long parent = slots[b];
      auto& bucket = merged[parent];
      const auto& elems = state.blocks()[block_ids[b]];
      bucket.insert(bucket.end(), elems.begin(), elems.end());
      parent_type[parent] = static_cast<int>(parent / max_size);
    }
  }

  std::vector<std::vector<int>> blocks;
  std::vector<int> labels;
  for (auto& [parent, elems] : merged) {
    blocks.push_back(std::move(elems));
    labels.push_back(parent_type[parent]);
  }
  return LabeledPartition(state.n(), d, std::move(blocks), std::move(labels));
}

}  // namespace

AncestryTrajectory simulate_ancestry(const CanningsModel& model,
                                     const LabeledPartition& initial, int generations,
                                     SplitMix64& rng) {
  if (initial.d() != model.d()) {
    throw std::invalid_argument("initial partition type count does not match the model");
  }
  const auto counts = initial.label_counts();
  for (int l = 0; l < model.d(); ++l) {
    if (counts[l] > model.size(l)) {
      throw std::domain_error("more blocks of type " + std::to_string(l + 1) +
                              " than subpopulation size");
    }
  }
  if (generations < 0) throw std::invalid_argument("generations must be >= 0");

  AncestryTrajectory trajectory;
  trajectory.seed = rng.seed();
  trajectory.states.push_back(initial);
  for (int r = 0; r < generations; ++r) {
    trajectory.states.push_back(ancestry_step(model, trajectory.states.back(), rng));
  }
  return trajectory;
}

McMatrix mc_transition_estimate(const CanningsModel& model, int n, std::uint64_t reps,
                                std::uint64_t seed) {
  if (reps == 0) throw std::invalid_argument("need reps >= 1");
  McMatrix matrix;
  matrix.states = enumerate_partitions(n, model.d());
  matrix.reps = reps;
  matrix.seed = seed;
  const size_t m = matrix.states.size();
  matrix.freq.assign(m, std::vector<double>(m, 0.0));
  matrix.std_error.assign(m, std::vector<double>(m, 0.0));

  std::map<LabeledPartition, size_t> index;
  for (size_t i = 0; i < m; ++i) index.emplace(matrix.states[i], i);

  SplitMix64 master(seed);
  for (size_t row = 0; row < m; ++row) {
    bool feasible = true;
    const auto counts = matrix.states[row].label_counts();
    for (int l = 0; l < model.d(); ++l) {
      if (counts[l] > model.size(l)) feasible = false;
    }
    if (!feasible) continue;  // unreachable sample configuration, row left zero

    SplitMix64 rng = master.split(row);
    std::vector<std::uint64_t> hits(m, 0);
    for (std::uint64_t r = 0; r < reps; ++r) {
      ++hits[index.at(ancestry_step(model, matrix.states[row], rng))];
    }
    for (size_t col = 0; col < m; ++col) {
      const double p = static_cast<double>(hits[col]) / static_cast<double>(reps);
      matrix.freq[row][col] = p;
      matrix.std_error[row][col] = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    }
  }
  return matrix;
}

}  // namespace mtcoal
