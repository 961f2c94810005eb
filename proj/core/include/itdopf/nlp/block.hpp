#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

namespace itdopf::nlp {

/// Accumulating sink for sparse Jacobian entries. Entries with equal
/// (row, col) are summed by the consumer.
struct TripletSink {
  struct Entry {
    int row;
    int col;
    double value;
  };
  std::vector<Entry> entries;
  int row_offset = 0;

  void add(int row, int col, double value) {
    entries.push_back({row + row_offset, col, value});
  }
  void clear() { entries.clear(); }
};

/// Sink for lambda-weighted constraint Hessians (and objective Hessians).
/// `pair` records a formal mixed partial between two distinct slots: the
/// symmetric matrix gets v at (a,b) and (b,a), or 2v on the diagonal when
/// both slots are the same variable. `diag` records a plain diagonal term.
class HessianSink {
 public:
  virtual ~HessianSink() = default;
  virtual void pair(int a, int b, double v) = 0;
  virtual void diag(int a, double v) = 0;
};

enum class BlockOwner { Transmission, Distribution, Boundary };

/// One family of smooth constraint rows lo <= r(x) <= hi. Rows with
/// lo == hi are equalities. Evaluators must be reentrant; blocks are
/// immutable after construction.
class ConstraintBlock {
 public:
  ConstraintBlock(std::string name, BlockOwner owner, Eigen::VectorXd lo,
                  Eigen::VectorXd hi, bool affine)
      : name_(std::move(name)),
        owner_(owner),
        lo_(std::move(lo)),
        hi_(std::move(hi)),
        affine_(affine) {}
  virtual ~ConstraintBlock() = default;

  const std::string& name() const { return name_; }
  BlockOwner owner() const { return owner_; }
  int rows() const { return static_cast<int>(lo_.size()); }
  const Eigen::VectorXd& lower() const { return lo_; }
  const Eigen::VectorXd& upper() const { return hi_; }
  bool affine() const { return affine_; }

  virtual void eval(const double* x, double* r) const = 0;
  /// Rows are local (0 .. rows()-1) before the sink's row_offset.
  virtual void jacobian(const double* x, TripletSink& sink) const = 0;
  /// Adds sum_i lambda[i] * hess(r_i) for local lambda. No-op for affine blocks.
  virtual void hessian(const double* x, const double* lambda, HessianSink& sink) const {
    (void)x;
    (void)lambda;
    (void)sink;
  }

 private:
  std::string name_;
  BlockOwner owner_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
  bool affine_;
};

using BlockPtr = std::shared_ptr<const ConstraintBlock>;

}  // namespace itdopf::nlp
