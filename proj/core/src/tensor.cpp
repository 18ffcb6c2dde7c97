#include "mtcoal/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mtcoal {

namespace {

void require_type(int t, int d, const char* what) {
  if (t < 0 || t >= d) {
    throw std::invalid_argument(std::string(what) + " out of range [0, d)");
  }
}

}  // namespace

MergeTensor::MergeTensor(std::vector<int> j) : d_(static_cast<int>(j.size())), j_(std::move(j)) {
  if (d_ < 1) throw std::invalid_argument("tensor needs d >= 1");
  for (int jk : j_) {
    if (jk < 0) throw std::invalid_argument("negative child block count");
  }
  cells_.assign(d_, {});
  for (int k = 0; k < d_; ++k) {
    cells_[k].assign(d_, std::vector<int>(j_[k], 0));
  }
}

MergeTensor::MergeTensor(int d, std::vector<std::vector<std::vector<int>>> cells)
    : d_(d), cells_(std::move(cells)) {
  if (d_ < 1) throw std::invalid_argument("tensor needs d >= 1");
  if (static_cast<int>(cells_.size()) != d_) {
    throw std::invalid_argument("cell grid must be d x d");
  }
  j_.assign(d_, 0);
  for (int k = 0; k < d_; ++k) {
    if (static_cast<int>(cells_[k].size()) != d_) {
      throw std::invalid_argument("cell grid must be d x d");
    }
    j_[k] = static_cast<int>(cells_[k][0].size());
    for (int l = 0; l < d_; ++l) {
      if (static_cast<int>(cells_[k][l].size()) != static_cast<size_t>(j_[k])) {
        throw std::invalid_argument("cell (k,l) must have length j_k for every l");
      }
      for (int v : cells_[k][l]) {
        if (v < 0) throw std::invalid_argument("negative tensor entry");
      }
    }
  }
}

MergeTensor MergeTensor::empty(int d) { return MergeTensor(std::vector<int>(d, 0)); }

MergeTensor MergeTensor::unit(const std::vector<int>& j) { return filled_diagonal(j, 1); }

MergeTensor MergeTensor::filled_diagonal(const std::vector<int>& j, int value) {
  MergeTensor t{j};
  for (int k = 0; k < t.d_; ++k) {
    std::fill(t.cells_[k][k].begin(), t.cells_[k][k].end(), value);
  }
  return t;
}

MergeTensor MergeTensor::diagonal(int d, const std::vector<std::vector<int>>& diag) {
  if (static_cast<int>(diag.size()) != d) {
    throw std::invalid_argument("diagonal() needs one entry vector per type");
  }
  std::vector<int> j(d);
  for (int k = 0; k < d; ++k) j[k] = static_cast<int>(diag[k].size());
  MergeTensor t{j};
  for (int k = 0; k < d; ++k) t.cells_[k][k] = diag[k];
  return t;
}

int MergeTensor::total_child_blocks() const {
  return std::accumulate(j_.begin(), j_.end(), 0);
}

int MergeTensor::cell_sum(int k, int l) const {
  const auto& v = cells_[k][l];
  return std::accumulate(v.begin(), v.end(), 0);
}

std::vector<int> MergeTensor::parent_counts() const {
  std::vector<int> il(d_, 0);
  for (int k = 0; k < d_; ++k) {
    for (int l = 0; l < d_; ++l) il[l] += cell_sum(k, l);
  }
  return il;
}

int MergeTensor::total_parent_blocks() const {
  auto il = parent_counts();
  return std::accumulate(il.begin(), il.end(), 0);
}

bool MergeTensor::is_diagonal() const {
  for (int k = 0; k < d_; ++k) {
    for (int l = 0; l < d_; ++l) {
      if (k == l) continue;
      for (int v : cells_[k][l]) {
        if (v != 0) return false;
      }
    }
  }
  return true;
}

bool MergeTensor::is_unit() const {
  if (!is_diagonal()) return false;
  for (int k = 0; k < d_; ++k) {
    for (int v : cells_[k][k]) {
      if (v != 1) return false;
    }
  }
  return true;
}

MergeTensor MergeTensor::coalescence_extension(int k, int l) const {
  require_type(k, d_, "type k");
  require_type(l, d_, "type l");
  MergeTensor t = *this;
  ++t.j_[k];
  for (int lp = 0; lp < d_; ++lp) {
    t.cells_[k][lp].push_back(lp == l ? 1 : 0);
  }
  return t;
}

MergeTensor MergeTensor::incremented(int k, int l, int s) const {
  require_type(k, d_, "type k");
  require_type(l, d_, "type l");
  if (s < 0 || s >= j_[k]) throw std::invalid_argument("slot s out of range [0, j_k)");
  MergeTensor t = *this;
  ++t.cells_[k][l][s];
  return t;
}

MergeTensor MergeTensor::extended(int k, const std::vector<int>& column) const {
  require_type(k, d_, "type k");
  if (static_cast<int>(column.size()) != d_) {
    throw std::invalid_argument("column must have one entry per type");
  }
  MergeTensor t = *this;
  ++t.j_[k];
  for (int lp = 0; lp < d_; ++lp) {
    if (column[lp] < 0) throw std::invalid_argument("negative tensor entry");
    t.cells_[k][lp].push_back(column[lp]);
  }
  return t;
}

MergeTensor MergeTensor::canonical() const {
  MergeTensor t = *this;
  for (int k = 0; k < d_; ++k) {
    for (int l = 0; l < d_; ++l) {
      std::sort(t.cells_[k][l].begin(), t.cells_[k][l].end(), std::greater<int>());
    }
  }
  return t;
}

std::string MergeTensor::describe() const {
  std::ostringstream out;
  out << "j=(";
  for (int k = 0; k < d_; ++k) out << (k ? "," : "") << j_[k];
  out << ")";
  for (int k = 0; k < d_; ++k) {
    if (j_[k] == 0) continue;
    for (int l = 0; l < d_; ++l) {
      out << "; t[" << k + 1 << "," << l + 1 << "]=(";
      for (int s = 0; s < j_[k]; ++s) out << (s ? "," : "") << cells_[k][l][s];
      out << ")";
    }
  }
  return out.str();
}

bool tensor_leq(const MergeTensor& a, const MergeTensor& b) {
  if (a.d() != b.d()) throw std::invalid_argument("tensor_leq: mismatched type counts");
  for (int k = 0; k < a.d(); ++k) {
    if (a.child_blocks(k) > b.child_blocks(k)) return false;
  }
  for (int k = 0; k < a.d(); ++k) {
    for (int l = 0; l < a.d(); ++l) {
      for (int s = 0; s < a.child_blocks(k); ++s) {
        if (a.entry(k, l, s) > b.entry(k, l, s)) return false;
      }
    }
  }
  return true;
}

MergeTensor pair_coalescence_tensor(int k, int l1, int l2, int d) {
  require_type(k, d, "type k");
  require_type(l1, d, "type l1");
  require_type(l2, d, "type l2");
  std::vector<int> j(d, 0);
  j[k] = 1;
  MergeTensor t{j};
  if (l1 == l2) {
    t = t.incremented(k, l1, 0).incremented(k, l1, 0);
  } else {
    t = t.incremented(k, l1, 0).incremented(k, l2, 0);
  }
  return t;
}

bool symmetric_equal(const MergeTensor& a, const MergeTensor& b) {
  if (a.d() != b.d()) return false;
  return a.canonical() == b.canonical();
}

}  // namespace mtcoal
