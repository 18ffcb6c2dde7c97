#include "mtcoal/limits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mtcoal/errors.hpp"

namespace mtcoal {

RateTable::RateTable(int d, int covered_depth) : d_(d), covered_depth_(covered_depth) {
  if (d < 1) throw std::invalid_argument("RateTable needs d >= 1");
}

void RateTable::set(const MergeTensor& tensor, double rate) {
  if (tensor.d() != d_) throw std::invalid_argument("tensor type count mismatch");
  rates_[tensor.canonical()] = rate;
}

bool RateTable::contains(const MergeTensor& tensor) const {
  return rates_.count(tensor.canonical()) > 0;
}

double RateTable::rate(const MergeTensor& tensor) const {
  if (tensor.d() != d_) throw std::invalid_argument("tensor type count mismatch");
  auto it = rates_.find(tensor.canonical());
  if (it != rates_.end()) return it->second;
  if (tensor.total_parent_blocks() <= covered_depth_) return 0.0;
  throw IncompleteTableError("rate table does not cover " + tensor.describe(),
                             {tensor.describe()});
}

double total_binary_merge_rate(const RateTable& rates) {
  double total = 0.0;
  for (int k = 0; k < rates.d(); ++k) {
    total += rates.rate(pair_coalescence_tensor(k, k, k, rates.d()));
  }
  return total;
}

void XiSpec::validate() const {
  if (a.empty()) throw std::invalid_argument("Xi spec needs at least one type weight");
  for (double ak : a) {
    if (ak < 0 || !std::isfinite(ak)) throw std::invalid_argument("Kingman weight a_k must be >= 0");
  }
  for (const auto& atom : atoms) {
    if (!(atom.mass > 0)) throw std::invalid_argument("atom mass must be > 0");
    if (atom.x.empty() || atom.x.front() <= 0) {
      throw std::invalid_argument("atom needs a nonincreasing x with x_1 > 0");
    }
    double sum = 0;
    for (size_t i = 0; i < atom.x.size(); ++i) {
      if (atom.x[i] < 0) throw std::invalid_argument("atom frequencies must be >= 0");
      if (i + 1 < atom.x.size() && atom.x[i] < atom.x[i + 1]) {
        throw std::invalid_argument("atom frequencies must be nonincreasing");
      }
      sum += atom.x[i];
    }
    if (sum > 1 + 1e-12) throw std::invalid_argument("atom frequencies must sum to <= 1");
    if (atom.y.size() < atom.x.size()) {
      throw std::invalid_argument("atom labels must cover the frequency support");
    }
    for (int label : atom.y) {
      if (label < 0 || label >= d()) throw std::invalid_argument("atom label outside type space");
    }
  }
}

double standard_scaling(const CanningsModel& model) {
  for (int l = 0; l < model.d(); ++l) {
    if (model.size(l) <= 1) {
      throw std::domain_error("standard scaling needs N_l > 1 for every type");
    }
  }
  Rational best(0);
  for (int k = 0; k < model.d(); ++k) {
    for (int l1 = 0; l1 < model.d(); ++l1) {
      for (int l2 = 0; l2 < model.d(); ++l2) {
        Rational c = coalescence_probability(model, k, l1, l2);
        if (c > best) best = c;
      }
    }
  }
  return best.get_d();
}

RateTable kingman_rates(const std::vector<double>& a) {
  const int d = static_cast<int>(a.size());
  if (d < 1) throw std::invalid_argument("need at least one type weight");
  for (double ak : a) {
    if (ak < 0) throw std::invalid_argument("Kingman weight a_k must be >= 0");
  }
  RateTable table(d, std::numeric_limits<int>::max());
  for (int k = 0; k < d; ++k) {
    table.set(pair_coalescence_tensor(k, k, k, d), a[k]);
  }
  return table;
}

namespace {

void require_diagonal_ge2(const MergeTensor& tensor) {
  if (!tensor.is_diagonal()) {
    throw std::invalid_argument("rate representation needs a diagonal tensor");
  }
  for (int k = 0; k < tensor.d(); ++k) {
    for (int s = 0; s < tensor.child_blocks(k); ++s) {
      if (tensor.entry(k, k, s) < 2) {
        throw std::invalid_argument("rate representation needs entries >= 2");
      }
    }
  }
}

// Sum over pairwise distinct support indices with matching labels of
// prod x_m^{i_{k,s}}, recursively over the flattened (k, s) slots.
double atom_assignment_sum(const XiAtom& atom, const std::vector<std::pair<int, int>>& slots,
                           const MergeTensor& tensor, std::vector<char>& used, size_t pos) {
  if (pos == slots.size()) return 1.0;
  const auto [k, s] = slots[pos];
  const int power = tensor.entry(k, k, s);
  double total = 0.0;
  for (size_t m = 0; m < atom.x.size(); ++m) {
    if (used[m] || atom.y[m] != k) continue;
    double factor = 1.0;
    for (int e = 0; e < power; ++e) factor *= atom.x[m];
    if (factor == 0.0) continue;
    used[m] = 1;
    total += factor * atom_assignment_sum(atom, slots, tensor, used, pos + 1);
    used[m] = 0;
  }
  return total;
}

}  // namespace

double xi_rate(const XiSpec& spec, const MergeTensor& tensor) {
  spec.validate();
  if (tensor.d() != spec.d()) throw std::invalid_argument("tensor type count mismatch");
  require_diagonal_ge2(tensor);

  double rate = 0.0;
  // Kingman part: only a single binary same-type merger.
  if (tensor.total_child_blocks() == 1 && tensor.total_parent_blocks() == 2) {
    for (int k = 0; k < spec.d(); ++k) {
      if (tensor.child_blocks(k) == 1) rate += spec.a[k];
    }
  }

  std::vector<std::pair<int, int>> slots;
  for (int k = 0; k < tensor.d(); ++k) {
    for (int s = 0; s < tensor.child_blocks(k); ++s) slots.emplace_back(k, s);
  }
  for (const auto& atom : spec.atoms) {
    double xx = 0.0;
    for (double xi : atom.x) xx += xi * xi;
    std::vector<char> used(atom.x.size(), 0);
    rate += atom.mass / xx * atom_assignment_sum(atom, slots, tensor, used, 0);
  }
  return rate;
}

namespace {

// Canonical (sorted descending) diagonal entry vectors per type with
// entries >= min_entry and total sum <= budget.
void enumerate_diagonals(int d, int min_entry, int budget,
                         std::vector<std::vector<int>>& diag, int k,
                         std::vector<MergeTensor>& out) {
  if (k == d) {
    out.push_back(MergeTensor::diagonal(d, diag));
    return;
  }
  std::function<void(int, int)> grow = [&](int remaining, int max_entry) {
    enumerate_diagonals(d, min_entry, remaining, diag, k + 1, out);
    for (int e = min_entry; e <= std::min(remaining, max_entry); ++e) {
      diag[k].push_back(e);
      grow(remaining - e, e);
      diag[k].pop_back();
    }
  };
  grow(budget, budget);
}

int count_ones(const MergeTensor& tensor) {
  int ones = 0;
  for (int k = 0; k < tensor.d(); ++k) {
    for (int s = 0; s < tensor.child_blocks(k); ++s) {
      if (tensor.entry(k, k, s) == 1) ++ones;
    }
  }
  return ones;
}

}  // namespace

RateTable xi_rate_table(const XiSpec& spec, int depth) {
  spec.validate();
  if (depth < 2) throw std::invalid_argument("need depth >= 2");
  RateTable table(spec.d(), depth);
  std::vector<std::vector<int>> diag(spec.d());
  std::vector<MergeTensor> tensors;
  enumerate_diagonals(spec.d(), 2, depth, diag, 0, tensors);
  for (const auto& t : tensors) {
    if (t.total_child_blocks() == 0) continue;  // T_0 carries no rate
    table.set(t, xi_rate(spec, t));
  }
  return table;
}

RateTable complete_rates_by_consistency(const RateTable& partial, int depth) {
  if (depth < 1) throw std::invalid_argument("need depth >= 1");
  if (partial.covered_depth() < depth) {
    throw IncompleteTableError("partial table covers depth " +
                                   std::to_string(partial.covered_depth()) +
                                   " but completion to depth " + std::to_string(depth) +
                                   " was requested",
                               {});
  }
  const int d = partial.d();
  RateTable table(d, depth);
  for (const auto& [tensor, rate] : partial.entries()) {
    if (tensor.total_parent_blocks() <= depth) table.set(tensor, rate);
  }

  std::vector<std::vector<int>> diag(d);
  std::vector<MergeTensor> tensors;
  enumerate_diagonals(d, 1, depth, diag, 0, tensors);
  std::stable_sort(tensors.begin(), tensors.end(), [](const auto& a, const auto& b) {
    return count_ones(a) < count_ones(b);
  });

  for (const auto& tensor : tensors) {
    if (tensor.total_child_blocks() == 0) continue;
    if (count_ones(tensor) == 0) {
      if (!table.contains(tensor)) {
        throw IncompleteTableError("partial table misses " + tensor.describe(),
                                   {tensor.describe()});
      }
      continue;
    }
    // Find a type whose canonical entry list ends in a 1, remove that slot:
    // the tensor is then base(l,l), and the reduced consistency recursion
    // phi(base) = phi(base(l,l)) + sum_s phi(base(l,l,s)) solves for it.
    int l = -1;
    for (int k = 0; k < d; ++k) {
      const int jk = tensor.child_blocks(k);
      if (jk > 0 && tensor.entry(k, k, jk - 1) == 1) {
        l = k;
        break;
      }
    }
    std::vector<std::vector<int>> base_diag(d);
    for (int k = 0; k < d; ++k) {
      for (int s = 0; s < tensor.child_blocks(k); ++s) {
        base_diag[k].push_back(tensor.entry(k, k, s));
      }
    }
    base_diag[l].pop_back();
    const MergeTensor base = MergeTensor::diagonal(d, base_diag);

    double value = table.rate(base);
    for (int s = 0; s < base.child_blocks(l); ++s) {
      value -= table.rate(base.incremented(l, l, s));
    }
    table.set(tensor, value);
  }
  return table;
}

GeneratorMatrix limit_generator(const RateTable& rates, int n) {
  GeneratorMatrix generator;
  generator.states = enumerate_partitions(n, rates.d());
  const size_t m = generator.states.size();
  generator.q.assign(m, std::vector<double>(m, 0.0));
  for (size_t row = 0; row < m; ++row) {
    double sum = 0.0;
    double compensation = 0.0;
    for (size_t col = 0; col < m; ++col) {
      if (row == col) continue;
      auto tensor = merge_structure(generator.states[row], generator.states[col]);
      if (!tensor) continue;
      const double rate = rates.rate(*tensor);
      generator.q[row][col] = rate;
      const double y = rate - compensation;
      const double t = sum + y;
      compensation = (t - sum) - y;
      sum = t;
    }
    generator.q[row][row] = -sum;
  }
  return generator;
}

double FiniteMeasure::moment_integral(const MergeTensor& tensor) const {
  require_diagonal_ge2(tensor);
  for (int k = 0; k < tensor.d(); ++k) {
    if (tensor.child_blocks(k) != j[k]) {
      throw std::invalid_argument("tensor child block counts do not match the measure's j");
    }
  }
  double total = 0.0;
  for (const auto& point : points) {
    double product = point.weight;
    for (int k = 0; k < tensor.d() && product != 0.0; ++k) {
      for (int s = 0; s < j[k]; ++s) {
        const int power = tensor.entry(k, k, s) - 2;  // 0^0 = 1
        for (int e = 0; e < power; ++e) product *= point.x[k][s];
      }
    }
    total += product;
  }
  return total;
}

FiniteMeasure qj_from_xi(const XiSpec& spec, const std::vector<int>& j) {
  spec.validate();
  if (static_cast<int>(j.size()) != spec.d()) {
    throw std::invalid_argument("j must have one block count per type");
  }
  FiniteMeasure measure;
  measure.j = j;

  const int total_blocks = std::accumulate(j.begin(), j.end(), 0);
  // Kingman part: Dirac mass a_k at the origin when j = e_k.
  if (total_blocks == 1) {
    for (int k = 0; k < spec.d(); ++k) {
      if (j[k] == 1 && spec.a[k] > 0) {
        WeightedPoint point;
        point.weight = spec.a[k];
        point.x.assign(spec.d(), {});
        point.x[k] = {0.0};
        measure.points.push_back(std::move(point));
      }
    }
  }

  std::vector<std::pair<int, int>> slots;
  for (int k = 0; k < spec.d(); ++k) {
    for (int s = 0; s < j[k]; ++s) slots.emplace_back(k, s);
  }
  for (const auto& atom : spec.atoms) {
    double xx = 0.0;
    for (double xi : atom.x) xx += xi * xi;
    std::vector<int> assignment(slots.size(), -1);
    std::vector<char> used(atom.x.size(), 0);
    std::function<void(size_t)> assign = [&](size_t pos) {
      if (pos == slots.size()) {
        WeightedPoint point;
        point.weight = atom.mass / xx;
        point.x.assign(spec.d(), {});
        for (int k = 0; k < spec.d(); ++k) point.x[k].assign(j[k], 0.0);
        for (size_t i = 0; i < slots.size(); ++i) {
          const double freq = atom.x[assignment[i]];
          point.weight *= freq * freq;
          point.x[slots[i].first][slots[i].second] = freq;
        }
        if (point.weight > 0) measure.points.push_back(std::move(point));
        return;
      }
      for (size_t m = 0; m < atom.x.size(); ++m) {
        if (used[m] || atom.y[m] != slots[pos].first) continue;
        used[m] = 1;
        assignment[pos] = static_cast<int>(m);
        assign(pos + 1);
        used[m] = 0;
      }
    };
    assign(0);
  }
  return measure;
}

QjMomentCheck qj_moment_check(const XiSpec& spec, const MergeTensor& tensor) {
  QjMomentCheck check;
  check.integral = qj_from_xi(spec, tensor.child_block_counts()).moment_integral(tensor);
  check.rate = xi_rate(spec, tensor);
  return check;
}

namespace {

Integer binom2(long x) { return Integer(x) * Integer(x - 1) / 2; }

}  // namespace

StrongMutationExpansion strong_mutation_expansion(long M, int n, int d) {
  if (M < 1) throw std::invalid_argument("need M >= 1");
  if (d < 1) throw std::invalid_argument("need d >= 1");
  const std::vector<long> sizes(d, d * M);
  const std::vector<std::vector<long>> counts(d, std::vector<long>(d, M));
  const CanningsModel model = CanningsModel::wright_fisher(sizes, counts);

  StrongMutationExpansion expansion;
  expansion.p_n = transition_matrix(model, n);
  expansion.states = expansion.p_n.states;
  expansion.c_n = ratio(1, static_cast<long>(d) * M);

  const size_t m = expansion.states.size();
  expansion.a.states = expansion.states;
  expansion.a.provenance = "limit";
  expansion.a.p.assign(m, std::vector<Rational>(m, Rational(0)));
  expansion.b = expansion.a;

  for (size_t row = 0; row < m; ++row) {
    const auto& pi = expansion.states[row];
    const auto pi_blocks = pi.unlabeled();
    const Rational weight =
        ratio(Integer(1), integer_pow(d, static_cast<unsigned long>(pi.block_count())));
    for (size_t col = 0; col < m; ++col) {
      const auto& pi_prime = expansion.states[col];
      if (pi_prime.unlabeled() == pi_blocks) {
        expansion.a.p[row][col] = weight;

        // kappa = sum_l C(i_l,2) - sum_k C(j_k,2) - d sum_{k,l} C(i_{k,l},2)
        // with i_{k,l} counting blocks that are l-blocks of pi and k-blocks
        // of pi'.
        const auto il = pi.label_counts();
        const auto jk = pi_prime.label_counts();
        std::vector<std::vector<long>> ikl(d, std::vector<long>(d, 0));
        for (int b = 0; b < pi.block_count(); ++b) {
          ++ikl[pi_prime.labels()[b]][pi.labels()[b]];
        }
        Integer kappa = 0;
        for (int l = 0; l < d; ++l) kappa += binom2(il[l]);
        for (int k = 0; k < d; ++k) kappa -= binom2(jk[k]);
        for (int k = 0; k < d; ++k) {
          for (int l = 0; l < d; ++l) kappa -= Integer(d) * binom2(ikl[k][l]);
        }
        expansion.b.p[row][col] = weight * Rational(kappa);
      } else if (pi_prime.block_count() == pi.block_count() - 1) {
        // One binary merger, labels free: B entry d^{-|pi|} when the
        // unlabeled partitions are properly nested.
        auto tensor = merge_structure(pi, pi_prime);
        if (tensor) expansion.b.p[row][col] = weight;
      }
    }
  }

  Rational worst(0);
  for (size_t row = 0; row < m; ++row) {
    for (size_t col = 0; col < m; ++col) {
      Rational gap = abs(expansion.p_n.p[row][col] - expansion.a.p[row][col] -
                         expansion.c_n * expansion.b.p[row][col]);
      if (gap > worst) worst = gap;
    }
  }
  expansion.residual = worst;
  return expansion;
}

RealMatrix discrete_limit_matrix(const std::vector<std::vector<double>>& rho, int n) {
  const int d = static_cast<int>(rho.size());
  if (d < 1) throw std::invalid_argument("rho must be a d x d matrix");
  for (const auto& row : rho) {
    if (static_cast<int>(row.size()) != d) {
      throw std::invalid_argument("rho must be a d x d matrix");
    }
  }
  for (int l = 0; l < d; ++l) {
    double column = 0.0;
    for (int k = 0; k < d; ++k) {
      if (rho[k][l] < 0) throw std::invalid_argument("rho entries must be >= 0");
      column += rho[k][l];
    }
    if (std::abs(column - 1.0) > 1e-12) {
      throw std::invalid_argument("rho column " + std::to_string(l + 1) +
                                  " must sum to 1 (limit of the size constraint)");
    }
  }

  RealMatrix matrix;
  matrix.states = enumerate_partitions(n, d);
  const size_t m = matrix.states.size();
  matrix.p.assign(m, std::vector<double>(m, 0.0));
  for (size_t row = 0; row < m; ++row) {
    const auto blocks = matrix.states[row].unlabeled();
    for (size_t col = 0; col < m; ++col) {
      if (matrix.states[col].unlabeled() != blocks) continue;
      double entry = 1.0;
      for (int b = 0; b < matrix.states[row].block_count(); ++b) {
        entry *= rho[matrix.states[col].labels()[b]][matrix.states[row].labels()[b]];
      }
      matrix.p[row][col] = entry;
    }
  }
  return matrix;
}

TimedTrajectory simulate_coalescent(const GeneratorMatrix& generator,
                                    const LabeledPartition& initial, double t_max,
                                    SplitMix64& rng) {
  size_t current = generator.states.size();
  for (size_t i = 0; i < generator.states.size(); ++i) {
    if (generator.states[i] == initial) {
      current = i;
      break;
    }
  }
  if (current == generator.states.size()) {
    throw std::invalid_argument("initial state is not in the generator's state list");
  }
  if (t_max < 0) throw std::invalid_argument("need t_max >= 0");

  TimedTrajectory trajectory;
  trajectory.seed = rng.seed();
  trajectory.path.emplace_back(0.0, generator.states[current]);
  double t = 0.0;
  while (true) {
    const double rate = -generator.q[current][current];
    if (rate <= 0.0) break;  // absorbing
    t += rng.next_exponential(rate);
    if (t > t_max) break;
    double u = rng.next_double() * rate;
    size_t next = current;
    for (size_t col = 0; col < generator.states.size(); ++col) {
      if (col == current) continue;
      u -= generator.q[current][col];
      if (u <= 0) {
        next = col;
        break;
      }
    }
    if (next == current) break;  // numerical corner: no positive rate found
    current = next;
    trajectory.path.emplace_back(t, generator.states[current]);
  }
  return trajectory;
}

}  // namespace mtcoal
