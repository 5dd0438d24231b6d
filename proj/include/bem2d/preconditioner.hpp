#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bem2d/linear_operator.hpp"
#include "bem2d/mesh.hpp"

namespace bem2d {

enum class PrecondKind { aswz, diag, none };

PrecondKind parse_precond_kind(std::string_view name);
std::string to_string(PrecondKind kind);

// P^{-1} = diag(A)^{-1}
class DiagonalPreconditioner final : public LinearOperator {
 public:
  explicit DiagonalPreconditioner(const Eigen::MatrixXd& matrix);
  Eigen::Index size() const override { return inv_diag_.size(); }
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const override;

 private:
  Eigen::VectorXd inv_diag_;
};

// Local multilevel additive Schwarz preconditioner
//   P^{-1} = I_0 A_0^{-1} I_0^T + sum_{l=1..L} I_l H_l D_l H_l^T I_l^T
// with Haar functions on the new nodes of every level. Every element that
// ever appears in the hierarchy owns one slot of the work vectors, so an
// application costs O(total number of elements) plus the coarse solve.
class MultilevelPreconditioner final : public LinearOperator {
 public:
  MultilevelPreconditioner(const MeshHierarchy& hierarchy, const Eigen::MatrixXd& coarse_matrix, int outer_order = 16);

  // Takes over the levels of `hierarchy` beyond the ones already built.
  void extend(const MeshHierarchy& hierarchy);

  int levels() const { return static_cast<int>(levels_.size()); }
  Eigen::Index size() const override { return static_cast<Eigen::Index>(finest_slots_.size()); }
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const override;

  // Haar energies <V phi_E, phi_E> of the new nodes of level l >= 1, in node order.
  std::vector<double> haar_energies(int l) const;
  std::size_t slot_count() const { return slot_count_; }

 private:
  struct Refinement {
    int father, son0, son1;
  };
  struct HaarNode {
    int plus, minus;
    double a, b;  // 1/|T+|, -1/|T-|
    double energy;
  };
  struct Level {
    std::vector<Refinement> refined;
    std::vector<HaarNode> nodes;
  };

  int outer_order_;
  Eigen::LLT<Eigen::MatrixXd> coarse_;
  std::vector<int> coarse_slots_;
  std::vector<int> finest_slots_;
  std::vector<Level> levels_;
  std::size_t slot_count_ = 0;
  int built_levels_ = 0;  // hierarchy levels consumed, including level 0
};

// Preconditioner of the requested kind for the finest level of a hierarchy.
std::unique_ptr<LinearOperator> make_preconditioner(PrecondKind kind, const MeshHierarchy& hierarchy,
                                                    const Eigen::MatrixXd& finest_matrix,
                                                    const Eigen::MatrixXd& coarse_matrix, int outer_order = 16);

}  // namespace bem2d
