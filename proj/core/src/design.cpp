#include "loglin/design.hpp"

#include <cmath>
#include <stdexcept>

namespace loglin {

TableShape::TableShape(std::vector<int> levels) : levels_(std::move(levels)) {
  if (levels_.empty() || levels_.size() > static_cast<std::size_t>(kMaxFactors)) {
    throw std::invalid_argument("table must have between 1 and 32 factors");
  }
  long cells = 1;
  for (int lk : levels_) {
    if (lk < 2) throw std::invalid_argument("every factor needs at least 2 levels");
    cells *= lk;
    if (cells > kMaxCells) {
      throw std::invalid_argument("table has more than " + std::to_string(kMaxCells) + " cells");
    }
  }
  cells_ = cells;
}

long TableShape::linear_index(const std::vector<int>& cell) const {
  if (cell.size() != levels_.size()) throw std::invalid_argument("cell arity mismatch");
  long index = 0;
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    if (cell[k] < 1 || cell[k] > levels_[k]) throw std::invalid_argument("cell level out of range");
    index = index * levels_[k] + (cell[k] - 1);
  }
  return index;
}

std::vector<int> TableShape::cell_at(long index) const {
  if (index < 0 || index >= cells_) throw std::invalid_argument("cell index out of range");
  std::vector<int> cell(levels_.size());
  for (std::size_t k = levels_.size(); k-- > 0;) {
    cell[k] = static_cast<int>(index % levels_[k]) + 1;
    index /= levels_[k];
  }
  return cell;
}

Eigen::MatrixXi contrast_matrix(int levels) {
  if (levels < 2) throw std::invalid_argument("contrast basis needs at least 2 levels");
  Eigen::MatrixXi z = Eigen::MatrixXi::Zero(levels, levels - 1);
  for (int j = 0; j < levels - 1; ++j) {
    z(j, j) = 1;
    z(j + 1, j) = -1;
  }
  return z;
}

DesignBlock block_matrix(const TableShape& shape, const FactorSet& h) {
  if (h.empty()) throw std::invalid_argument("grand-mean block is excluded by design");
  if (h.max_member() > shape.K()) {
    throw std::invalid_argument("subset " + h.key() + " out of range for K=" +
                                std::to_string(shape.K()));
  }
  // Kronecker accumulation, factor 1 slowest-varying.
  Eigen::MatrixXi acc = Eigen::MatrixXi::Ones(1, 1);
  for (int k = 1; k <= shape.K(); ++k) {
    Eigen::MatrixXi factor;
    if (h.contains(k)) {
      factor = contrast_matrix(shape.levels()[k - 1]);
    } else {
      factor = Eigen::MatrixXi::Ones(shape.levels()[k - 1], 1);
    }
    Eigen::MatrixXi next(acc.rows() * factor.rows(), acc.cols() * factor.cols());
    for (long r = 0; r < acc.rows(); ++r) {
      for (long c = 0; c < acc.cols(); ++c) {
        next.block(r * factor.rows(), c * factor.cols(), factor.rows(), factor.cols()) =
            acc(r, c) * factor;
      }
    }
    acc = std::move(next);
  }
  return DesignBlock{h, std::move(acc)};
}

long BlockedVector::total_size() const {
  long n = 0;
  for (const auto& b : blocks) n += b.size();
  return n;
}

Eigen::VectorXd BlockedVector::flat() const {
  Eigen::VectorXd v(total_size());
  long at = 0;
  for (const auto& b : blocks) {
    v.segment(at, b.size()) = b;
    at += b.size();
  }
  return v;
}

double BlockedVector::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks) {
    if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  }
  return m;
}

double BlockedVector::l2_norm() const {
  double ss = 0.0;
  for (const auto& b : blocks) ss += b.squaredNorm();
  return std::sqrt(ss);
}

Design::Design(TableShape shape, InteractionClass cls, std::vector<DesignBlock> blocks)
    : shape_(std::move(shape)), cls_(std::move(cls)), blocks_(std::move(blocks)) {
  if (cls_.size() != blocks_.size()) throw std::invalid_argument("block/class size mismatch");
  offsets_.resize(blocks_.size());
  long at = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].subset != cls_.sets()[i]) {
      throw std::invalid_argument("blocks not in canonical class order");
    }
    offsets_[i] = static_cast<int>(at);
    at += blocks_[i].dim();
  }
  total_cols_ = at;
}

Eigen::VectorXd Design::apply(const BlockedVector& theta) const {
  if (theta.blocks.size() != blocks_.size()) throw std::invalid_argument("block count mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(shape_.cell_count());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (theta.blocks[i].size() != blocks_[i].dim()) {
      throw std::invalid_argument("block length mismatch at " + blocks_[i].subset.key());
    }
    out.noalias() += blocks_[i].matrix.cast<double>() * theta.blocks[i];
  }
  return out;
}

BlockedVector Design::apply_transpose(const Eigen::VectorXd& x) const {
  if (x.size() != shape_.cell_count()) throw std::invalid_argument("vector length mismatch");
  BlockedVector out;
  out.blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    out.blocks.emplace_back(b.matrix.cast<double>().transpose() * x);
  }
  return out;
}

Eigen::MatrixXd Design::dense() const {
  Eigen::MatrixXd u(shape_.cell_count(), total_cols_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    u.middleCols(offsets_[i], blocks_[i].dim()) = blocks_[i].matrix.cast<double>();
  }
  return u;
}

BlockedVector Design::zero_vector() const {
  BlockedVector v;
  v.blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) v.blocks.emplace_back(Eigen::VectorXd::Zero(b.dim()));
  return v;
}

BlockedVector Design::from_flat(const Eigen::VectorXd& v) const {
  if (v.size() != total_cols_) throw std::invalid_argument("flat vector length mismatch");
  BlockedVector out;
  out.blocks.reserve(blocks_.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    out.blocks.emplace_back(v.segment(offsets_[i], blocks_[i].dim()));
  }
  return out;
}

Design assemble_design(const TableShape& shape, const InteractionClass& cls) {
  if (cls.K() != shape.K()) throw std::invalid_argument("class/shape factor count mismatch");
  std::vector<DesignBlock> blocks;
  blocks.reserve(cls.size());
  for (const auto& h : cls.sets()) blocks.push_back(block_matrix(shape, h));
  return Design(shape, cls, std::move(blocks));
}

Design saturated_design(const TableShape& shape) {
  return assemble_design(shape, saturated_class(shape.K()));
}

long model_dimension(const TableShape& shape, const SimplicialComplex& delta) {
  long dim = 1;
  const InteractionClass cls = downward_closure(delta);
  for (const auto& h : cls.sets()) {
    long dh = 1;
    for (int k : h.members()) dh *= shape.levels()[k - 1] - 1;
    dim += dh;
  }
  return dim;
}

Eigen::MatrixXd projector(const TableShape& shape, const FactorSet& h) {
  if (h.max_member() > shape.K()) {
    throw std::invalid_argument("subset " + h.key() + " out of range for K=" +
                                std::to_string(shape.K()));
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Ones(1, 1);
  for (int k = 1; k <= shape.K(); ++k) {
    const int lk = shape.levels()[k - 1];
    Eigen::MatrixXd mean = Eigen::MatrixXd::Constant(lk, lk, 1.0 / lk);
    Eigen::MatrixXd factor =
        h.contains(k) ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(lk, lk) - mean) : mean;
    Eigen::MatrixXd next(acc.rows() * lk, acc.cols() * lk);
    for (long r = 0; r < acc.rows(); ++r) {
      for (long c = 0; c < acc.cols(); ++c) {
        next.block(r * lk, c * lk, lk, lk) = acc(r, c) * factor;
      }
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace loglin
