#pragma once

#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace phasebal::lp::detail {

/// LU factorization of a refactored basis matrix.
class BasisLu {
 public:
  virtual ~BasisLu() = default;
  /// Returns false when the matrix is (numerically) singular.
  virtual bool factor(const Eigen::SparseMatrix<double>& basis) = 0;
  virtual void solve(Eigen::VectorXd& rhs) const = 0;
  virtual void solve_transpose(Eigen::VectorXd& rhs) const = 0;
};

class DenseLu final : public BasisLu {
 public:
  bool factor(const Eigen::SparseMatrix<double>& basis) override {
    lu_.compute(Eigen::MatrixXd(basis));
    return lu_.rcond() > 1e-13;
  }
  void solve(Eigen::VectorXd& rhs) const override { rhs = lu_.solve(rhs); }
  void solve_transpose(Eigen::VectorXd& rhs) const override { rhs = lu_.transpose().solve(rhs); }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

class SparseLu final : public BasisLu {
 public:
  bool factor(const Eigen::SparseMatrix<double>& basis) override {
    lu_ = std::make_unique<Solver>();
    lu_->compute(basis);
    return lu_->info() == Eigen::Success;
  }
  void solve(Eigen::VectorXd& rhs) const override { rhs = lu_->solve(rhs); }
  void solve_transpose(Eigen::VectorXd& rhs) const override {
    Eigen::VectorXd out = lu_->transpose().solve(rhs);
    rhs = std::move(out);
  }

 private:
  using Solver = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;
  std::unique_ptr<Solver> lu_;
};

}  // namespace phasebal::lp::detail
