#pragma once

#include <string>
#include <vector>

namespace mtcoal {

// Merge tensor T = (t_{k,l}): cell (k,l) holds a vector of length j_k whose
// s-th entry counts the l-blocks of the finer partition merging into the s-th
// k-block of the coarser one. Rows k with j_k = 0 hold empty vectors. Types
// are 0-based internally; describe() and JSON render them 1-based.
class MergeTensor {
 public:
  // All entries zero, child block counts j (j.size() determines d).
  explicit MergeTensor(std::vector<int> j);
  MergeTensor(int d, std::vector<std::vector<std::vector<int>>> cells);

  static MergeTensor empty(int d);                                // T_0
  static MergeTensor unit(const std::vector<int>& j);             // 1_j
  static MergeTensor filled_diagonal(const std::vector<int>& j, int value);  // e.g. 2_j
  // Diagonal tensor with given per-type diagonal entry vectors.
  static MergeTensor diagonal(int d, const std::vector<std::vector<int>>& diag);

  int d() const { return d_; }
  const std::vector<int>& child_block_counts() const { return j_; }  // j
  int child_blocks(int k) const { return j_[k]; }                    // j_k
  int total_child_blocks() const;                                    // sum_k j_k

  const std::vector<int>& cell(int k, int l) const { return cells_[k][l]; }  // t_{k,l}
  int entry(int k, int l, int s) const { return cells_[k][l][s]; }           // s is 0-based
  int cell_sum(int k, int l) const;                                          // i_{k,l}

  std::vector<int> parent_counts() const;  // i_l = sum_k sum_s i_{k,l,s}
  int total_parent_blocks() const;         // sum_l i_l

  bool is_diagonal() const;
  bool is_unit() const;  // T == 1_j

  // T(k,l): append 1 to t_{k,l} and 0 to every t_{k,l'}, l' != l.
  MergeTensor coalescence_extension(int k, int l) const;
  // T(k,l,s): bump the single entry i_{k,l,s}.
  MergeTensor incremented(int k, int l, int s) const;
  // Append one child block of type k whose merge-group row is `column`
  // (column[l] = number of l-blocks absorbed). Generalizes T(k,l).
  MergeTensor extended(int k, const std::vector<int>& column) const;

  // Representative of the per-cell permutation class (each cell sorted
  // descending); two tensors have equal Phi iff their canonicals are equal.
  MergeTensor canonical() const;

  std::string describe() const;  // e.g. "j=(1,0); t[1,1]=(2); t[1,2]=(0)"

  bool operator==(const MergeTensor&) const = default;
  auto operator<=>(const MergeTensor&) const = default;

 private:
  int d_;
  std::vector<int> j_;
  std::vector<std::vector<std::vector<int>>> cells_;  // [k][l] -> length j_k
};

// Partial order: j(a) <= j(b) componentwise and entrywise <= on the common
// slot range; false when the j-vectors are incomparable.
bool tensor_leq(const MergeTensor& a, const MergeTensor& b);

// Tensor of the pair-coalescence event: two lineages of types l1, l2 merge
// into one type-k parent (entry 2 when l1 == l2, two entries 1 otherwise).
MergeTensor pair_coalescence_tensor(int k, int l1, int l2, int d);

// Equality modulo independent per-cell permutations of the slot entries.
bool symmetric_equal(const MergeTensor& a, const MergeTensor& b);

}  // namespace mtcoal
