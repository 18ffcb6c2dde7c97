#include "mtcoal/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mtcoal {

namespace {

// Canonicalize: sort the elements of each block, order blocks by least
// element, keep labels attached to their blocks.
void canonicalize(std::vector<std::vector<int>>& blocks, std::vector<int>& labels) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::vector<size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return blocks[a].front() < blocks[b].front(); });
  std::vector<std::vector<int>> nb(blocks.size());
  std::vector<int> nl(labels.size());
  for (size_t i = 0; i < order.size(); ++i) {
    nb[i] = std::move(blocks[order[i]]);
    nl[i] = labels[order[i]];
  }
  blocks = std::move(nb);
  labels = std::move(nl);
}

}  // namespace

LabeledPartition::LabeledPartition(int n, int d, std::vector<std::vector<int>> blocks,
                                   std::vector<int> labels)
    : n_(n), d_(d), blocks_(std::move(blocks)), labels_(std::move(labels)) {
  if (n_ < 1) throw std::invalid_argument("partition needs n >= 1");
  if (d_ < 1) throw std::invalid_argument("partition needs d >= 1");
  if (blocks_.size() != labels_.size()) {
    throw std::invalid_argument("one label per block required");
  }
  std::vector<char> seen(static_cast<size_t>(n_) + 1, 0);
  size_t covered = 0;
  for (const auto& b : blocks_) {
    if (b.empty()) throw std::invalid_argument("empty block");
    for (int e : b) {
      if (e < 1 || e > n_) throw std::invalid_argument("element outside [1, n]");
      if (seen[e]) throw std::invalid_argument("blocks must be disjoint");
      seen[e] = 1;
      ++covered;
    }
  }
  if (covered != static_cast<size_t>(n_)) {
    throw std::invalid_argument("blocks must cover [1, n]");
  }
  for (int l : labels_) {
    if (l < 0 || l >= d_) throw std::invalid_argument("label outside [0, d)");
  }
  canonicalize(blocks_, labels_);
}

LabeledPartition LabeledPartition::singletons(int n, int d, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("singletons: need one label per element");
  }
  std::vector<std::vector<int>> blocks(n);
  for (int i = 0; i < n; ++i) blocks[i] = {i + 1};
  return LabeledPartition(n, d, std::move(blocks), labels);
}

LabeledPartition LabeledPartition::parse(const std::string& text, int d) {
  std::vector<std::vector<int>> blocks;
  std::vector<int> labels;
  int n = 0;
  std::istringstream stream(text);
  std::string block_text;
  while (std::getline(stream, block_text, '|')) {
    auto colon = block_text.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("block without ':label' in partition text");
    }
    std::vector<int> block;
    std::istringstream elems(block_text.substr(0, colon));
    std::string e;
    while (std::getline(elems, e, ',')) {
      block.push_back(std::stoi(e));
      n = std::max(n, block.back());
    }
    blocks.push_back(std::move(block));
    labels.push_back(std::stoi(block_text.substr(colon + 1)) - 1);
  }
  return LabeledPartition(n, d, std::move(blocks), std::move(labels));
}

std::vector<int> LabeledPartition::label_counts() const {
  std::vector<int> counts(d_, 0);
  for (int l : labels_) ++counts[l];
  return counts;
}

std::vector<std::vector<int>> LabeledPartition::unlabeled() const { return blocks_; }

std::vector<int> LabeledPartition::restricted_growth_string() const {
  std::vector<int> rgs(n_);
  for (size_t b = 0; b < blocks_.size(); ++b) {
    for (int e : blocks_[b]) rgs[e - 1] = static_cast<int>(b);
  }
  return rgs;
}

LabeledPartition LabeledPartition::restrict_to(int m) const {
  if (m < 1 || m > n_) throw std::invalid_argument("restriction target outside [1, n]");
  std::vector<std::vector<int>> blocks;
  std::vector<int> labels;
  for (size_t b = 0; b < blocks_.size(); ++b) {
    std::vector<int> kept;
    for (int e : blocks_[b]) {
      if (e <= m) kept.push_back(e);
    }
    if (!kept.empty()) {
      blocks.push_back(std::move(kept));
      labels.push_back(labels_[b]);
    }
  }
  return LabeledPartition(m, d_, std::move(blocks), std::move(labels));
}

LabeledPartition LabeledPartition::permuted(const std::vector<int>& sigma) const {
  if (static_cast<int>(sigma.size()) != n_) {
    throw std::invalid_argument("permutation must act on [1, n]");
  }
  std::vector<char> hit(static_cast<size_t>(n_) + 1, 0);
  for (int img : sigma) {
    if (img < 1 || img > n_ || hit[img]) {
      throw std::invalid_argument("permutation is not a bijection of [1, n]");
    }
    hit[img] = 1;
  }
  std::vector<std::vector<int>> blocks(blocks_.size());
  for (size_t b = 0; b < blocks_.size(); ++b) {
    for (int e : blocks_[b]) blocks[b].push_back(sigma[e - 1]);
  }
  return LabeledPartition(n_, d_, std::move(blocks), labels_);
}

LabeledPartition LabeledPartition::relabeled(const std::vector<int>& labels) const {
  return LabeledPartition(n_, d_, blocks_, labels);
}

std::string LabeledPartition::encode() const {
  std::ostringstream out;
  for (size_t b = 0; b < blocks_.size(); ++b) {
    if (b) out << '|';
    for (size_t i = 0; i < blocks_[b].size(); ++i) {
      if (i) out << ',';
      out << blocks_[b][i];
    }
    out << ':' << labels_[b] + 1;
  }
  return out.str();
}

std::vector<std::vector<std::vector<int>>> enumerate_unlabeled_partitions(int n) {
  // Restricted growth strings in lexicographic order.
  std::vector<std::vector<std::vector<int>>> result;
  std::vector<int> rgs(n, 0);
  std::vector<int> maxima(n, 0);  // maxima[i] = max(rgs[0..i])
  while (true) {
    int blocks = maxima[n - 1] + 1;
    std::vector<std::vector<int>> partition(blocks);
    for (int i = 0; i < n; ++i) partition[rgs[i]].push_back(i + 1);
    result.push_back(std::move(partition));

    int i = n - 1;
    while (i > 0 && rgs[i] == maxima[i - 1] + 1) --i;
    if (i == 0) break;
    ++rgs[i];
    maxima[i] = std::max(maxima[i - 1], rgs[i]);
    for (int t = i + 1; t < n; ++t) {
      rgs[t] = 0;
      maxima[t] = maxima[i];
    }
  }
  return result;
}

std::vector<LabeledPartition> enumerate_partitions(int n, int d) {
  return enumerate_partitions(n, d, kDefaultEnumerationCapN, kDefaultEnumerationCapD);
}

std::vector<LabeledPartition> enumerate_partitions(int n, int d, int cap_n, int cap_d) {
  if (n < 1 || d < 1) throw std::invalid_argument("enumerate_partitions needs n >= 1, d >= 1");
  if (n > cap_n || d > cap_d) {
    std::ostringstream msg;
    msg << "enumeration of P_{" << n << ",E} with d=" << d
        << " exceeds the cap (n <= " << cap_n << ", d <= " << cap_d
        << "); exact state spaces are desk scale only";
    throw std::invalid_argument(msg.str());
  }
  auto unlabeled = enumerate_unlabeled_partitions(n);
  std::stable_sort(unlabeled.begin(), unlabeled.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });

  std::vector<LabeledPartition> result;
  result.reserve(labeled_partition_count(n, d));
  for (const auto& blocks : unlabeled) {
    const int j = static_cast<int>(blocks.size());
    std::vector<int> labels(j, 0);
    while (true) {
      result.emplace_back(n, d, blocks, labels);
      int pos = j - 1;
      while (pos >= 0 && labels[pos] == d - 1) {
        labels[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++labels[pos];
    }
  }
  return result;
}

std::optional<MergeTensor> merge_structure(const LabeledPartition& from,
                                           const LabeledPartition& to) {
  if (from.n() != to.n() || from.d() != to.d()) {
    throw std::invalid_argument("merge_structure: partitions over different [n] or types");
  }
  const int d = from.d();
  const auto rgs_from = from.restricted_growth_string();
  const auto rgs_to = to.restricted_growth_string();

  // Every block of `to` must be a union of blocks of `from`: all elements of
  // a `from` block must share their `to` block.
  std::vector<int> from_to_parent(from.block_count(), -1);
  for (int e = 1; e <= from.n(); ++e) {
    int fb = rgs_from[e - 1];
    int tb = rgs_to[e - 1];
    if (from_to_parent[fb] == -1) {
      from_to_parent[fb] = tb;
    } else if (from_to_parent[fb] != tb) {
      return std::nullopt;
    }
  }
  std::vector<char> covered(to.block_count(), 0);
  for (int tb : from_to_parent) covered[tb] = 1;
  for (char c : covered) {
    if (!c) return std::nullopt;  // cannot happen for genuine partitions
  }

  // Slot index of each `to` block: position among same-labeled blocks in
  // order of appearance.
  std::vector<int> slot(to.block_count());
  std::vector<int> next_slot(d, 0);
  for (int tb = 0; tb < to.block_count(); ++tb) {
    slot[tb] = next_slot[to.labels()[tb]]++;
  }

  MergeTensor tensor{next_slot};  // j_k = number of k-blocks of `to`
  for (int fb = 0; fb < from.block_count(); ++fb) {
    const int tb = from_to_parent[fb];
    const int k = to.labels()[tb];
    const int l = from.labels()[fb];
    tensor = tensor.incremented(k, l, slot[tb]);
  }
  return tensor;
}

std::uint64_t stirling2(int n, int j) {
  if (n < 0 || j < 0) throw std::invalid_argument("stirling2: negative argument");
  if (n > 25) throw std::invalid_argument("stirling2: n too large for 64-bit arithmetic");
  if (j > n) return 0;
  if (n == 0) return j == 0 ? 1 : 0;
  std::vector<std::vector<std::uint64_t>> s(n + 1, std::vector<std::uint64_t>(n + 1, 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int m = 1; m <= i; ++m) {
      s[i][m] = s[i - 1][m - 1] + static_cast<std::uint64_t>(m) * s[i - 1][m];
    }
  }
  return s[n][j];
}

std::uint64_t labeled_partition_count(int n, int d) {
  std::uint64_t total = 0;
  std::uint64_t dpow = 1;
  for (int j = 1; j <= n; ++j) {
    dpow *= static_cast<std::uint64_t>(d);
    total += dpow * stirling2(n, j);
  }
  return total;
}

double labeled_partition_count_dobinski(int n, int d) {
  // e^{-d} sum_{j>=0} d^j j^n / j!, summed in long double until the terms die.
  long double sum = 0.0L;
  long double compensation = 0.0L;
  long double term = 1.0L;  // j = 0: d^0 0^n / 0! = 0^n (1 when n == 0)
  if (n > 0) term = 0.0L;
  sum = term;
  long double djfact = 1.0L;  // d^j / j!
  for (int j = 1; j < 400; ++j) {
    djfact *= static_cast<long double>(d) / j;
    long double t = djfact * std::pow(static_cast<long double>(j), n);
    long double y = t - compensation;
    long double next = sum + y;
    compensation = (next - sum) - y;
    sum = next;
    if (j > 4 * d + n && t < sum * 1e-22L) break;
  }
  return static_cast<double>(sum * std::exp(static_cast<long double>(-d)));
}

}  // namespace mtcoal
