#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtcoal/tensor.hpp"

namespace mtcoal {

// Partition of [n] = {1,...,n} whose blocks carry a type in {0,...,d-1}.
// Canonical form: elements sorted within each block, blocks listed in order
// of appearance (ascending least element). Types are 0-based internally and
// 1-based in encode()/parse() and all file formats.
class LabeledPartition {
 public:
  LabeledPartition(int n, int d, std::vector<std::vector<int>> blocks,
                   std::vector<int> labels);

  static LabeledPartition singletons(int n, int d, const std::vector<int>& labels);
  // Inverse of encode(), e.g. parse("1,2:1|3:2", d=2).
  static LabeledPartition parse(const std::string& text, int d);

  int n() const { return n_; }
  int d() const { return d_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  const std::vector<int>& labels() const { return labels_; }

  // i_k = number of k-blocks, k = 0..d-1.
  std::vector<int> label_counts() const;
  // r_n(pi): block structure with labels removed.
  std::vector<std::vector<int>> unlabeled() const;
  // Block index (order of appearance) per element 1..n.
  std::vector<int> restricted_growth_string() const;

  LabeledPartition restrict_to(int m) const;
  // sigma given as images: sigma[i-1] is the image of element i.
  LabeledPartition permuted(const std::vector<int>& sigma) const;
  LabeledPartition relabeled(const std::vector<int>& labels) const;

  std::string encode() const;  // "1,2:1|3:2"

  bool operator==(const LabeledPartition&) const = default;
  auto operator<=>(const LabeledPartition&) const = default;

 private:
  int n_;
  int d_;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> labels_;
};

inline constexpr int kDefaultEnumerationCapN = 8;
inline constexpr int kDefaultEnumerationCapD = 4;

// Every element of P_{n,E} exactly once, ordered by ascending block count,
// then lexicographically on the unlabeled restricted growth string, then
// lexicographically on the label tuple. Refuses above the cap.
std::vector<LabeledPartition> enumerate_partitions(int n, int d);
std::vector<LabeledPartition> enumerate_partitions(int n, int d, int cap_n, int cap_d);

std::vector<std::vector<std::vector<int>>> enumerate_unlabeled_partitions(int n);

// The merge structure of a transition pi -> to: absent unless every block of
// `to` is a union of blocks of `from` (labels disregarded). The s-th k-block
// of `to` is the s-th in order of appearance among its k-blocks.
std::optional<MergeTensor> merge_structure(const LabeledPartition& from,
                                           const LabeledPartition& to);

std::uint64_t stirling2(int n, int j);
// |P_{n,E}| = sum_{j=1}^n d^j S(n,j).
std::uint64_t labeled_partition_count(int n, int d);
// Dobinski-style series e^{-d} sum_{j>=0} d^j j^n / j!.
double labeled_partition_count_dobinski(int n, int d);

}  // namespace mtcoal
