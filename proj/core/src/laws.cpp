#include "mtcoal/laws.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mtcoal/errors.hpp"
#include "mtcoal/rng.hpp"

namespace mtcoal {

namespace {

std::string pair_name(const MergeTensor& t, int l) {
  return t.describe() + " @ l=" + std::to_string(l + 1);
}

// Tensors realized by actual transitions: merge structures of all partition
// pairs at sample sizes 1..n_max, deduplicated positionally.
std::set<MergeTensor> reachable_tensors(const CanningsModel& model, int n_max) {
  std::set<MergeTensor> tensors;
  tensors.insert(MergeTensor::empty(model.d()));
  for (int n = 1; n <= n_max; ++n) {
    auto states = enumerate_partitions(n, model.d());
    for (const auto& from : states) {
      for (const auto& to : states) {
        if (auto t = merge_structure(from, to)) tensors.insert(*t);
      }
    }
  }
  return tensors;
}

// Abstract in-range tensors not necessarily arising from partitions (zero
// slots, slack between sum_l i_l and sum_k j_k). Child counts stay below N_k
// so that coalescence extensions remain inside the Phi domain.
std::vector<MergeTensor> sampled_tensors(const CanningsModel& model, int depth,
                                         int per_depth, SplitMix64& rng) {
  const int d = model.d();
  std::vector<MergeTensor> out;
  for (int target = 1; target <= depth; ++target) {
    for (int produced = 0; produced < per_depth;) {
      std::vector<int> j(d, 0);
      int slots = 0;
      for (int k = 0; k < d; ++k) {
        const long cap = std::min<long>({3, model.size(k) - 1, target});
        j[k] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cap + 1)));
        slots += j[k];
      }
      if (slots == 0) continue;
      MergeTensor tensor{j};
      std::vector<int> margin(d, 0);
      bool ok = true;
      for (int unit = 0; unit < target; ++unit) {
        int attempts = 0;
        while (true) {
          if (++attempts > 64) {
            ok = false;
            break;
          }
          const int l = static_cast<int>(rng.next_below(d));
          if (margin[l] + 1 > model.size(l)) continue;
          int k = static_cast<int>(rng.next_below(d));
          if (j[k] == 0) continue;
          const int s = static_cast<int>(rng.next_below(j[k]));
          tensor = tensor.incremented(k, l, s);
          ++margin[l];
          break;
        }
        if (!ok) break;
      }
      if (!ok) continue;
      out.push_back(tensor);
      ++produced;
    }
  }
  return out;
}

struct ExactResidual {
  Rational worst = 0;

  void update(LawReport& report, const Rational& residual, const std::string& where) {
    ++report.cases_checked;
    if (residual > worst) worst = residual;
    if (residual != 0) report.violations.push_back(where);
  }

  void finish(LawReport& report) const {
    report.worst_residual = to_fraction_string(worst);
    report.worst_residual_value = worst.get_d();
  }
};

}  // namespace

LawReport check_consistency(const CanningsModel& model, int n_max) {
  if (n_max < 1) throw std::invalid_argument("need depth >= 1");
  LawReport report;
  report.law = "consistency";
  report.instance = model.describe() + " depth=" + std::to_string(n_max);
  ExactResidual residual;

  std::set<MergeTensor> tensors = reachable_tensors(model, n_max);
  std::erase_if(tensors,
                [&](const MergeTensor& t) { return t.total_parent_blocks() >= n_max; });
  SplitMix64 rng(0x636f6e736973ull);  // fixed stream: sampled cases are part of the law's domain
  for (auto& t : sampled_tensors(model, n_max - 1, 100, rng)) tensors.insert(t);

  for (const auto& tensor : tensors) {
    const auto parents = tensor.parent_counts();
    const Rational lhs = phi(model, tensor);
    bool have_reference = false;
    Rational reference;
    for (int l = 0; l < model.d(); ++l) {
      if (parents[l] >= model.size(l)) continue;
      Rational rhs = 0;
      for (int k = 0; k < model.d(); ++k) {
        rhs += phi(model, tensor.coalescence_extension(k, l));
        for (int s = 0; s < tensor.child_blocks(k); ++s) {
          rhs += phi(model, tensor.incremented(k, l, s));
        }
      }
      residual.update(report, abs(lhs - rhs), "recursion at " + pair_name(tensor, l));
      if (!have_reference) {
        reference = rhs;
        have_reference = true;
      } else {
        residual.update(report, abs(rhs - reference),
                        "l-dependence at " + pair_name(tensor, l));
      }
    }
  }

  report.note("tensors checked: " + std::to_string(tensors.size()) +
              " (reachable + 100 sampled per depth)");
  residual.finish(report);
  return report;
}

namespace {

// The order the monotonicity statement quantifies over: entrywise <= on the
// common slot range, and every appended slot absorbs at least one block
// (slots are created by the consistency recursion as one-hot columns, so an
// all-zero extra slot is outside the induction and genuinely violates the
// inequality: Phi_{e_k} of the zero tensor is N_k).
bool monotone_comparable(const MergeTensor& a, const MergeTensor& b) {
  if (!tensor_leq(a, b)) return false;
  for (int k = 0; k < a.d(); ++k) {
    for (int s = a.child_blocks(k); s < b.child_blocks(k); ++s) {
      int column = 0;
      for (int l = 0; l < a.d(); ++l) column += b.entry(k, l, s);
      if (column == 0) return false;
    }
  }
  return true;
}

}  // namespace

LawReport check_monotonicity(const CanningsModel& model, int n_max) {
  if (n_max < 1) throw std::invalid_argument("need depth >= 1");
  LawReport report;
  report.law = "monotonicity";
  report.instance = model.describe() + " depth=" + std::to_string(n_max);
  ExactResidual residual;

  std::set<MergeTensor> tensor_set = reachable_tensors(model, n_max);
  SplitMix64 rng(0x6d6f6e6full);
  for (auto& t : sampled_tensors(model, n_max, 40, rng)) tensor_set.insert(t);
  std::vector<MergeTensor> tensors(tensor_set.begin(), tensor_set.end());

  std::vector<Rational> values;
  values.reserve(tensors.size());
  for (const auto& t : tensors) values.push_back(phi(model, t));

  for (size_t a = 0; a < tensors.size(); ++a) {
    for (size_t b = 0; b < tensors.size(); ++b) {
      if (a == b) continue;
      if (!monotone_comparable(tensors[a], tensors[b])) continue;
      // T_a <= T_b: Phi must not increase.
      Rational gap = values[b] - values[a];
      residual.update(report, gap > 0 ? gap : Rational(0),
                      tensors[a].describe() + " vs " + tensors[b].describe());
    }
  }
  residual.finish(report);
  return report;
}

LawReport check_natural_coupling(const CanningsModel& model, int n, int m) {
  if (m < 1 || m > n) throw std::invalid_argument("need 1 <= m <= n");
  LawReport report;
  report.law = "natural-coupling";
  report.instance =
      model.describe() + " n=" + std::to_string(n) + " m=" + std::to_string(m);
  ExactResidual residual;

  const ExactMatrix big = transition_matrix(model, n);
  const ExactMatrix small = transition_matrix(model, m);

  std::map<LabeledPartition, size_t> small_index;
  for (size_t i = 0; i < small.states.size(); ++i) small_index.emplace(small.states[i], i);

  std::vector<size_t> restriction(big.states.size());
  for (size_t i = 0; i < big.states.size(); ++i) {
    restriction[i] = small_index.at(big.states[i].restrict_to(m));
  }

  for (size_t row = 0; row < big.states.size(); ++row) {
    std::vector<Rational> lumped(small.states.size(), Rational(0));
    for (size_t col = 0; col < big.states.size(); ++col) {
      lumped[restriction[col]] += big.p[row][col];
    }
    const size_t target_row = restriction[row];
    for (size_t tau = 0; tau < small.states.size(); ++tau) {
      residual.update(report, abs(lumped[tau] - small.p[target_row][tau]),
                      big.states[row].encode() + " -> " + small.states[tau].encode());
    }
  }
  residual.finish(report);
  return report;
}

namespace {

void all_permutations(int n, std::vector<std::vector<int>>& out) {
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 1);
  do {
    out.push_back(sigma);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
}

}  // namespace

LawReport check_permutation_symmetry(const CanningsModel& model, int n) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  LawReport report;
  report.law = "permutation-symmetry";
  report.instance = model.describe() + " n=" + std::to_string(n);
  ExactResidual residual;

  const ExactMatrix matrix = transition_matrix(model, n);
  const size_t m = matrix.states.size();
  std::map<LabeledPartition, size_t> index;
  for (size_t i = 0; i < m; ++i) index.emplace(matrix.states[i], i);

  std::vector<std::vector<int>> sigmas;
  all_permutations(n, sigmas);

  std::vector<std::vector<size_t>> action(sigmas.size(), std::vector<size_t>(m));
  for (size_t s = 0; s < sigmas.size(); ++s) {
    for (size_t i = 0; i < m; ++i) {
      action[s][i] = index.at(matrix.states[i].permuted(sigmas[s]));
    }
  }

  for (size_t s = 0; s < sigmas.size(); ++s) {
    for (size_t row = 0; row < m; ++row) {
      for (size_t col = 0; col < m; ++col) {
        residual.update(report,
                        abs(matrix.p[row][col] - matrix.p[action[s][row]][action[s][col]]),
                        "entry (" + matrix.states[row].encode() + ", " +
                            matrix.states[col].encode() + ") under sigma #" +
                            std::to_string(s));
      }
    }
  }

  // Distribution-level corollary: an initial law that is uniform on a
  // permutation orbit stays constant on orbits after one step.
  std::vector<char> seen(m, 0);
  for (size_t i = 0; i < m; ++i) {
    if (seen[i]) continue;
    std::set<size_t> orbit;
    for (size_t s = 0; s < sigmas.size(); ++s) orbit.insert(action[s][i]);
    for (size_t o : orbit) seen[o] = 1;

    std::vector<Rational> next(m, Rational(0));
    const Rational mass(1, static_cast<long>(orbit.size()));
    for (size_t o : orbit) {
      for (size_t col = 0; col < m; ++col) next[col] += mass * matrix.p[o][col];
    }
    for (size_t s = 0; s < sigmas.size(); ++s) {
      for (size_t col = 0; col < m; ++col) {
        residual.update(report, abs(next[col] - next[action[s][col]]),
                        "orbit distribution of " + matrix.states[i].encode());
      }
    }
  }
  residual.finish(report);
  return report;
}

namespace {

Rational pair_moment(const CanningsModel& model, int k, int l) {
  std::vector<int> j(model.d(), 0);
  j[k] = 2;
  return joint_factorial_moment(model,
                                MergeTensor(j).incremented(k, l, 0).incremented(k, l, 1));
}

Rational single_moment(const CanningsModel& model, int k, int l) {
  std::vector<int> j(model.d(), 0);
  j[k] = 1;
  return joint_factorial_moment(model, MergeTensor(j).incremented(k, l, 0));
}

bool trending_to_zero(const std::vector<double>& residuals) {
  // Monotone decrease alone is not enough (a sequence can decrease toward a
  // positive limit); demand at least a halving over the sequence as well.
  for (size_t i = 1; i < residuals.size(); ++i) {
    if (residuals[i] > residuals[i - 1] + 1e-15) return false;
  }
  return residuals.back() <= 0.5 * residuals.front();
}

std::string sequence_string(const std::vector<double>& xs) {
  std::ostringstream out;
  out << "(";
  for (size_t i = 0; i < xs.size(); ++i) out << (i ? ", " : "") << xs[i];
  out << ")";
  return out.str();
}

}  // namespace

LawReport check_identity_limit(const std::vector<CanningsModel>& models) {
  if (models.size() < 2) throw std::invalid_argument("need at least two models in the sequence");
  const int d = models.front().d();
  for (const auto& m : models) {
    if (m.d() != d) throw std::invalid_argument("models must share the type space");
  }

  LawReport report;
  report.law = "identity-limit";
  report.instance = "sequence of " + std::to_string(models.size()) + " models, d=" +
                    std::to_string(d);
  if (models.size() < 3) report.note("fewer than 3 models: trends are weak evidence");

  std::vector<double> mean_residual, pair_residual, entry_residual, side_residual;
  for (const auto& model : models) {
    double r_mean = 0.0, r_pair = 0.0, r_side = 0.0;
    for (int k = 0; k < d; ++k) {
      r_mean = std::max(r_mean, std::abs(single_moment(model, k, k).get_d() - 1.0));
      r_pair = std::max(r_pair, std::abs(pair_moment(model, k, k).get_d() - 1.0));
      for (int l = 0; l < d; ++l) {
        const double ratio = static_cast<double>(model.size(k)) / model.size(l);
        const double value = ratio * ratio * pair_moment(model, k, l).get_d();
        r_side = std::max(r_side, std::abs(value - (k == l ? 1.0 : 0.0)));
      }
    }
    mean_residual.push_back(r_mean);
    pair_residual.push_back(r_pair);
    side_residual.push_back(r_side);

    const ExactMatrix p = transition_matrix(model, 2);
    double off = 0.0;
    for (size_t row = 0; row < p.states.size(); ++row) {
      for (size_t col = 0; col < p.states.size(); ++col) {
        const double entry = p.p[row][col].get_d();
        off = std::max(off, std::abs(entry - (row == col ? 1.0 : 0.0)));
      }
    }
    entry_residual.push_back(off);
  }

  const bool criteria_trend =
      trending_to_zero(mean_residual) && trending_to_zero(pair_residual);
  const bool entries_trend = trending_to_zero(entry_residual);

  report.cases_checked = models.size();
  report.note(std::string("moment criteria trend to 1: ") + (criteria_trend ? "yes" : "no"));
  report.note(std::string("matrix entries trend to identity: ") + (entries_trend ? "yes" : "no"));
  report.note("|E(nu_kk1)-1| = " + sequence_string(mean_residual));
  report.note("|E(nu_kk1 nu_kk2)-1| = " + sequence_string(pair_residual));
  report.note("||P_N - I||_max = " + sequence_string(entry_residual));
  report.note("side conclusion residual = " + sequence_string(side_residual));

  if (criteria_trend != entries_trend) {
    report.violations.push_back("criteria trend and entry trend disagree");
    report.worst_residual = "1";
    report.worst_residual_value = 1.0;
  }
  if (criteria_trend && entries_trend && !trending_to_zero(side_residual)) {
    report.violations.push_back("side conclusion (N_k/N_l)^2 E(nu1 nu2) -> delta does not trend");
    report.worst_residual = "1";
    report.worst_residual_value = 1.0;
  }
  return report;
}

PpfTable::PpfTable(int d, int depth) : d_(d), depth_(depth) {
  if (d < 1) throw std::invalid_argument("PpfTable needs d >= 1");
  if (depth < 1) throw std::invalid_argument("PpfTable needs depth >= 1");
}

void PpfTable::set(const MergeTensor& tensor, Rational value) {
  if (tensor.d() != d_) throw std::invalid_argument("tensor type count mismatch");
  values_[tensor] = std::move(value);
}

std::optional<Rational> PpfTable::get(const MergeTensor& tensor) const {
  auto it = values_.find(tensor);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

namespace {

// All tensors with sum_k j_k <= j_budget and sum of entries <= i_budget,
// positional (every entry layout, including zero slots).
void enumerate_all_tensors(int d, int j_budget, int i_budget,
                           std::vector<MergeTensor>& out) {
  std::vector<int> j(d, 0);
  std::function<void(int, int)> assign_j = [&](int k, int remaining) {
    if (k == d) {
      const int slots = std::accumulate(j.begin(), j.end(), 0);
      const int positions = slots * d;
      std::vector<int> flat(positions, 0);
      std::function<void(int, int)> fill = [&](int pos, int left) {
        if (pos == positions) {
          std::vector<std::vector<std::vector<int>>> cells(d,
                                                           std::vector<std::vector<int>>(d));
          int cursor = 0;
          for (int kk = 0; kk < d; ++kk) {
            for (int ll = 0; ll < d; ++ll) cells[kk][ll].resize(j[kk]);
          }
          for (int kk = 0; kk < d; ++kk) {
            for (int s = 0; s < j[kk]; ++s) {
              for (int ll = 0; ll < d; ++ll) cells[kk][ll][s] = flat[cursor++];
            }
          }
          out.emplace_back(d, std::move(cells));
          return;
        }
        for (int v = 0; v <= left; ++v) {
          flat[pos] = v;
          fill(pos + 1, left - v);
        }
        flat[pos] = 0;
      };
      fill(0, i_budget);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      j[k] = v;
      assign_j(k + 1, remaining - v);
    }
    j[k] = 0;
  };
  assign_j(0, j_budget);
}

}  // namespace

PpfTable PpfTable::from_model(const CanningsModel& model, int depth) {
  if (depth > model.min_size()) {
    throw std::invalid_argument("table depth must not exceed the smallest subpopulation");
  }
  PpfTable table(model.d(), depth);
  std::vector<MergeTensor> tensors;
  enumerate_all_tensors(model.d(), depth, depth, tensors);
  for (const auto& t : tensors) table.set(t, phi(model, t));
  return table;
}

LawReport check_meppf(const PpfTable& table) {
  LawReport report;
  report.law = "m-eppf";
  report.instance = "table d=" + std::to_string(table.d()) + " certified depth " +
                    std::to_string(table.depth());
  ExactResidual residual;
  std::string first_failed;

  auto fail_axiom = [&](const std::string& axiom) {
    if (first_failed.empty()) first_failed = axiom;
  };

  // Normalization.
  const MergeTensor t0 = MergeTensor::empty(table.d());
  auto p0 = table.get(t0);
  if (!p0) {
    throw IncompleteTableError("table does not contain the empty tensor T_0", {t0.describe()});
  }
  residual.update(report, abs(*p0 - 1), "normalization: p(T_0) = " + to_fraction_string(*p0));
  if (*p0 != 1) fail_axiom("normalization");

  // Symmetry under independent per-cell permutations: group keys by their
  // canonical representative.
  std::map<MergeTensor, std::pair<MergeTensor, Rational>> classes;
  for (const auto& [tensor, value] : table.entries()) {
    auto key = tensor.canonical();
    auto it = classes.find(key);
    if (it == classes.end()) {
      classes.emplace(key, std::make_pair(tensor, value));
    } else {
      Rational gap = abs(value - it->second.second);
      residual.update(report, gap,
                      "symmetry: p(" + it->second.first.describe() + ") != p(" +
                          tensor.describe() + ")");
      if (gap != 0) fail_axiom("symmetry");
    }
  }

  // Consistency at every interior node, for every type l.
  std::vector<std::string> missing;
  for (const auto& [tensor, value] : table.entries()) {
    if (tensor.total_child_blocks() >= table.depth()) continue;
    if (tensor.total_parent_blocks() >= table.depth()) continue;
    for (int l = 0; l < table.d(); ++l) {
      Rational rhs = 0;
      bool complete = true;
      auto add = [&](const MergeTensor& t) {
        auto v = table.get(t);
        if (!v) {
          missing.push_back(t.describe());
          complete = false;
          return;
        }
        rhs += *v;
      };
      for (int k = 0; k < table.d(); ++k) {
        add(tensor.coalescence_extension(k, l));
        for (int s = 0; s < tensor.child_blocks(k); ++s) add(tensor.incremented(k, l, s));
      }
      if (!complete) continue;
      Rational gap = abs(value - rhs);
      residual.update(report, gap, "consistency at " + pair_name(tensor, l));
      if (gap != 0) fail_axiom("consistency");
    }
  }
  if (!missing.empty()) {
    throw IncompleteTableError("table is not closed under the consistency recursion", missing);
  }

  if (!first_failed.empty()) report.note("first failing axiom: " + first_failed);
  residual.finish(report);
  return report;
}

}  // namespace mtcoal
