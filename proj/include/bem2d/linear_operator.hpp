#pragma once

#include <Eigen/Dense>

namespace bem2d {

// Symmetric operator on R^n; apply must be safe to call concurrently.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Eigen::Index size() const = 0;
  virtual void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const = 0;

  Eigen::VectorXd operator()(const Eigen::VectorXd& in) const {
    Eigen::VectorXd out(size());
    apply(in, out);
    return out;
  }
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(const Eigen::MatrixXd& matrix) : matrix_(matrix) {}
  Eigen::Index size() const override { return matrix_.rows(); }
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const override { out.noalias() = matrix_ * in; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  const Eigen::MatrixXd& matrix_;
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(Eigen::Index n) : n_(n) {}
  Eigen::Index size() const override { return n_; }
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const override { out = in; }

 private:
  Eigen::Index n_;
};

}  // namespace bem2d
