#pragma once

#include <Eigen/Dense>
#include <vector>

#include "loglin/complex.hpp"

namespace loglin {

/// Largest table handled with dense design matrices.
inline constexpr long kMaxCells = 4096;

/// Factor count and level counts (I_1..I_K). Cells are linearly indexed with
/// the last factor varying fastest, i.e. index = sum_k (i_k - 1) * prod_{j>k} I_j.
class TableShape {
 public:
  explicit TableShape(std::vector<int> levels);

  int K() const { return static_cast<int>(levels_.size()); }
  const std::vector<int>& levels() const { return levels_; }
  long cell_count() const { return cells_; }

  long linear_index(const std::vector<int>& cell) const;
  std::vector<int> cell_at(long index) const;

  friend bool operator==(const TableShape& a, const TableShape& b) {
    return a.levels_ == b.levels_;
  }

 private:
  std::vector<int> levels_;
  long cells_;
};

/// The I_k x (I_k - 1) bidiagonal contrast basis: entry (j,j) = 1,
/// entry (j+1,j) = -1, else 0.
Eigen::MatrixXi contrast_matrix(int levels);

/// Contrast basis for one interaction subset: the Kronecker product over all
/// factors, the contrast basis where the factor belongs to the subset and the
/// all-ones column elsewhere. Row order matches TableShape linear indexing
/// (factor 1 slowest).
struct DesignBlock {
  FactorSet subset;
  Eigen::MatrixXi matrix;  // entries in {-1,0,1}

  int dim() const { return static_cast<int>(matrix.cols()); }
};

DesignBlock block_matrix(const TableShape& shape, const FactorSet& h);

/// Parameter vector partitioned into per-subset blocks, aligned with a
/// Design's block order.
struct BlockedVector {
  std::vector<Eigen::VectorXd> blocks;

  long total_size() const;
  Eigen::VectorXd flat() const;
  double max_abs() const;
  double l2_norm() const;
};

/// Concatenation of the contrast blocks for an interaction class, in
/// canonical subset order.
class Design {
 public:
  Design(TableShape shape, InteractionClass cls, std::vector<DesignBlock> blocks);

  const TableShape& shape() const { return shape_; }
  const InteractionClass& interaction_class() const { return cls_; }
  const std::vector<DesignBlock>& blocks() const { return blocks_; }
  const DesignBlock& block(std::size_t i) const { return blocks_[i]; }
  std::size_t block_count() const { return blocks_.size(); }
  int block_offset(std::size_t i) const { return offsets_[i]; }
  long total_cols() const { return total_cols_; }

  /// U theta, accumulated block by block.
  Eigen::VectorXd apply(const BlockedVector& theta) const;
  /// U^T x, one block at a time.
  BlockedVector apply_transpose(const Eigen::VectorXd& x) const;

  /// Dense real copy of the concatenated U (debugging / small shapes).
  Eigen::MatrixXd dense() const;

  BlockedVector zero_vector() const;
  BlockedVector from_flat(const Eigen::VectorXd& v) const;

 private:
  TableShape shape_;
  InteractionClass cls_;
  std::vector<DesignBlock> blocks_;
  std::vector<int> offsets_;
  long total_cols_;
};

Design assemble_design(const TableShape& shape, const InteractionClass& cls);
Design saturated_design(const TableShape& shape);

/// dim M_Delta including the grand mean: 1 + sum of block dimensions over the
/// downward closure.
long model_dimension(const TableShape& shape, const SimplicialComplex& delta);

/// Orthogonal projector onto the interaction subspace of h (h may be empty:
/// grand-mean projector).
Eigen::MatrixXd projector(const TableShape& shape, const FactorSet& h);

}  // namespace loglin
