#include "bem2d/preconditioner.hpp"

#include "bem2d/errors.hpp"
#include "bem2d/kernel.hpp"

namespace bem2d {

PrecondKind parse_precond_kind(std::string_view name) {
  if (name == "aswz") return PrecondKind::aswz;
  if (name == "diag") return PrecondKind::diag;
  if (name == "none") return PrecondKind::none;
  throw InvalidInput("unknown preconditioner '" + std::string(name) + "' (expected aswz, diag or none)");
}

std::string to_string(PrecondKind kind) {
  switch (kind) {
    case PrecondKind::aswz:
      return "aswz";
    case PrecondKind::diag:
      return "diag";
    case PrecondKind::none:
      return "none";
  }
  return "?";
}

DiagonalPreconditioner::DiagonalPreconditioner(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw InvalidInput("diagonal preconditioner: matrix is not square");
  inv_diag_.resize(matrix.rows());
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    if (!(matrix(i, i) > 0.0))
      throw InvalidInput("diagonal preconditioner: nonpositive diagonal entry at " + std::to_string(i));
    inv_diag_[i] = 1.0 / matrix(i, i);
  }
}

void DiagonalPreconditioner::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  if (in.size() != inv_diag_.size()) throw InvalidInput("diagonal preconditioner: length mismatch");
  out = inv_diag_.cwiseProduct(in);
}

MultilevelPreconditioner::MultilevelPreconditioner(const MeshHierarchy& hierarchy, const Eigen::MatrixXd& coarse_matrix,
                                                   int outer_order)
    : outer_order_(outer_order) {
  const Mesh& coarse = hierarchy.level(0);
  if (coarse_matrix.rows() != static_cast<Eigen::Index>(coarse.size()) || coarse_matrix.cols() != coarse_matrix.rows())
    throw InvalidInput("coarse matrix does not match the coarse mesh");
  coarse_.compute(coarse_matrix);
  if (coarse_.info() != Eigen::Success)
    throw NonEllipticGeometry("coarse Galerkin matrix is not positive definite; rescale the geometry so that diam < 1");
  coarse_slots_.resize(coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) coarse_slots_[i] = static_cast<int>(i);
  finest_slots_ = coarse_slots_;
  slot_count_ = coarse.size();
  built_levels_ = 1;
  extend(hierarchy);
}

void MultilevelPreconditioner::extend(const MeshHierarchy& hierarchy) {
  for (int l = built_levels_; l <= hierarchy.finest_level(); ++l) {
    const Mesh& mesh = hierarchy.level(l);
    const auto& parent = hierarchy.parent(l);
    const auto& fresh = hierarchy.is_new(l);
    std::vector<int> slots(mesh.size());
    Level level;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const int father_slot = finest_slots_[static_cast<std::size_t>(parent[i])];
      if (!fresh[i]) {
        slots[i] = father_slot;
        continue;
      }
      slots[i] = static_cast<int>(slot_count_++);
      // Sons are stored consecutively: record the refinement at the second son.
      if (mesh[i].key.code & 1u) level.refined.push_back({father_slot, slots[i - 1], slots[i]});
    }
    for (const Node& nd : hierarchy.new_node_set(l)) {
      const Element& p = mesh[static_cast<std::size_t>(nd.plus)];
      const Element& m = mesh[static_cast<std::size_t>(nd.minus)];
      const double energy = haar_energy(p.segment, m.segment, outer_order_);
      if (!(energy > 0.0))
        throw NonEllipticGeometry("Haar energy is not positive at level " + std::to_string(l) +
                                  "; rescale the geometry so that diam < 1");
      level.nodes.push_back({slots[static_cast<std::size_t>(nd.plus)], slots[static_cast<std::size_t>(nd.minus)],
                             1.0 / p.h, -1.0 / m.h, energy});
    }
    levels_.push_back(std::move(level));
    finest_slots_ = std::move(slots);
  }
  built_levels_ = hierarchy.finest_level() + 1;
}

void MultilevelPreconditioner::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  if (in.size() != size()) throw InvalidInput("preconditioner: residual length does not match the finest mesh");
  std::vector<double> w(slot_count_, 0.0);
  for (std::size_t i = 0; i < finest_slots_.size(); ++i) w[static_cast<std::size_t>(finest_slots_[i])] = in[static_cast<Eigen::Index>(i)];

  // Fine to coarse: Haar coefficients D H^T w, then son sums into fathers.
  std::vector<std::vector<double>> coeff(levels_.size());
  for (std::size_t l = levels_.size(); l-- > 0;) {
    const Level& lev = levels_[l];
    auto& c = coeff[l];
    c.resize(lev.nodes.size());
    for (std::size_t k = 0; k < lev.nodes.size(); ++k) {
      const HaarNode& nd = lev.nodes[k];
      c[k] = (nd.a * w[static_cast<std::size_t>(nd.plus)] + nd.b * w[static_cast<std::size_t>(nd.minus)]) / nd.energy;
    }
    for (const Refinement& r : lev.refined)
      w[static_cast<std::size_t>(r.father)] = w[static_cast<std::size_t>(r.son0)] + w[static_cast<std::size_t>(r.son1)];
  }

  Eigen::VectorXd r0(static_cast<Eigen::Index>(coarse_slots_.size()));
  for (std::size_t i = 0; i < coarse_slots_.size(); ++i) r0[static_cast<Eigen::Index>(i)] = w[static_cast<std::size_t>(coarse_slots_[i])];
  const Eigen::VectorXd y0 = coarse_.solve(r0);
  std::fill(w.begin(), w.end(), 0.0);
  for (std::size_t i = 0; i < coarse_slots_.size(); ++i) w[static_cast<std::size_t>(coarse_slots_[i])] = y0[static_cast<Eigen::Index>(i)];

  // Coarse to fine: copy fathers to sons, add the Haar contributions.
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const Level& lev = levels_[l];
    for (const Refinement& r : lev.refined)
      w[static_cast<std::size_t>(r.son0)] = w[static_cast<std::size_t>(r.son1)] = w[static_cast<std::size_t>(r.father)];
    for (std::size_t k = 0; k < lev.nodes.size(); ++k) {
      const HaarNode& nd = lev.nodes[k];
      w[static_cast<std::size_t>(nd.plus)] += nd.a * coeff[l][k];
      w[static_cast<std::size_t>(nd.minus)] += nd.b * coeff[l][k];
    }
  }
  out.resize(size());
  for (std::size_t i = 0; i < finest_slots_.size(); ++i) out[static_cast<Eigen::Index>(i)] = w[static_cast<std::size_t>(finest_slots_[i])];
}

std::vector<double> MultilevelPreconditioner::haar_energies(int l) const {
  if (l < 1 || l > levels()) throw InvalidInput("haar_energies: level " + std::to_string(l) + " out of range");
  std::vector<double> e;
  for (const HaarNode& nd : levels_[static_cast<std::size_t>(l - 1)].nodes) e.push_back(nd.energy);
  return e;
}

std::unique_ptr<LinearOperator> make_preconditioner(PrecondKind kind, const MeshHierarchy& hierarchy,
                                                    const Eigen::MatrixXd& finest_matrix,
                                                    const Eigen::MatrixXd& coarse_matrix, int outer_order) {
  switch (kind) {
    case PrecondKind::aswz:
      return std::make_unique<MultilevelPreconditioner>(hierarchy, coarse_matrix, outer_order);
    case PrecondKind::diag:
      return std::make_unique<DiagonalPreconditioner>(finest_matrix);
    case PrecondKind::none:
      return std::make_unique<IdentityOperator>(finest_matrix.rows());
  }
  throw InvalidInput("unknown preconditioner kind");
}

}  // namespace bem2d
