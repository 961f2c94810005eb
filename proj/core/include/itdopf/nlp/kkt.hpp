#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>
#include <vector>

#include "itdopf/nlp/block.hpp"

namespace itdopf::nlp {

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
  bool factorized = false;
};

/// Symmetric indefinite factorization of the KKT system, fed as
/// lower-triangle triplets (duplicates are summed). Deterministic for
/// identical input.
class KktFactor {
 public:
  explicit KktFactor(int dim, bool dense);
  ~KktFactor();
  KktFactor(KktFactor&&) noexcept;
  KktFactor& operator=(KktFactor&&) noexcept;

  int dim() const;
  bool dense() const;

  Inertia factorize(const std::vector<TripletSink::Entry>& lower);

  /// Solve M x = b in place with one step of iterative refinement.
  /// Requires a successful factorize.
  void solve(Eigen::VectorXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace itdopf::nlp
