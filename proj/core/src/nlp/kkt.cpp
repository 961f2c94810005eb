#include "itdopf/nlp/kkt.hpp"

#include <lapacke.h>

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace itdopf::nlp {

struct KktFactor::Impl {
  int n = 0;
  bool dense = true;

  // dense path
  Eigen::MatrixXd full;    // symmetric matrix kept for refinement products
  Eigen::MatrixXd factor;  // dsytrf output
  std::vector<lapack_int> ipiv;

  // sparse path
  Eigen::SparseMatrix<double> lower;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;
  bool pattern_analyzed = false;
  bool sparse_ok = false;
};

KktFactor::KktFactor(int dim, bool dense) : impl_(std::make_unique<Impl>()) {
  impl_->n = dim;
  impl_->dense = dense;
}

KktFactor::~KktFactor() = default;
KktFactor::KktFactor(KktFactor&&) noexcept = default;
KktFactor& KktFactor::operator=(KktFactor&&) noexcept = default;

int KktFactor::dim() const { return impl_->n; }
bool KktFactor::dense() const { return impl_->dense; }

Inertia KktFactor::factorize(const std::vector<TripletSink::Entry>& lower) {
  Impl& im = *impl_;
  const int n = im.n;
  Inertia out;

  if (im.dense) {
    im.full.setZero(n, n);
    for (const auto& e : lower) {
      im.full(e.row, e.col) += e.value;
      if (e.row != e.col) im.full(e.col, e.row) += e.value;
    }
    im.factor = im.full;
    im.ipiv.assign(n, 0);
    const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, im.factor.data(),
                                           n, im.ipiv.data());
    if (info < 0) throw std::runtime_error("dsytrf: invalid argument");
    if (info > 0) {
      out.zero = 1;  // exactly singular D block
      return out;
    }
    // Inertia from the block-diagonal D of the Bunch-Kaufman factorization.
    int k = 0;
    while (k < n) {
      if (im.ipiv[k] > 0) {
        const double d = im.factor(k, k);
        if (d > 0)
          ++out.positive;
        else if (d < 0)
          ++out.negative;
        else
          ++out.zero;
        ++k;
      } else {
        const double a = im.factor(k, k);
        const double c = im.factor(k + 1, k + 1);
        const double b = im.factor(k + 1, k);
        const double det = a * c - b * b;
        const double tr = a + c;
        if (det < 0) {
          ++out.positive;
          ++out.negative;
        } else if (det > 0) {
          if (tr > 0)
            out.positive += 2;
          else
            out.negative += 2;
        } else {
          ++out.zero;
          if (tr > 0)
            ++out.positive;
          else if (tr < 0)
            ++out.negative;
          else
            ++out.zero;
        }
        k += 2;
      }
    }
    out.factorized = true;
    return out;
  }

  // sparse path: quasi-definite system, simplicial LDLT without pivoting
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(lower.size());
  for (const auto& e : lower) trips.emplace_back(e.row, e.col, e.value);
  im.lower.resize(n, n);
  im.lower.setFromTriplets(trips.begin(), trips.end());
  im.sparse_ok = false;

  if (!im.pattern_analyzed) {
    im.ldlt.analyzePattern(im.lower);
    im.pattern_analyzed = true;
  }
  im.ldlt.factorize(im.lower);
  if (im.ldlt.info() != Eigen::Success) {
    out.zero = 1;
    return out;
  }
  const Eigen::VectorXd d = im.ldlt.vectorD();
  for (int i = 0; i < n; ++i) {
    const double v = d[i];
    if (!std::isfinite(v) || std::abs(v) < 1e-300)
      ++out.zero;
    else if (v > 0)
      ++out.positive;
    else
      ++out.negative;
  }
  if (out.zero > 0) return out;
  out.factorized = true;
  im.sparse_ok = true;
  return out;
}

void KktFactor::solve(Eigen::VectorXd& b) const {
  const Impl& im = *impl_;
  const int n = im.n;
  if (im.dense) {
    Eigen::VectorXd x = b;
    lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, 1, im.factor.data(), n,
                                     im.ipiv.data(), x.data(), n);
    if (info != 0) throw std::runtime_error("dsytrs failed");
    // one refinement step
    Eigen::VectorXd r = b - im.full.selfadjointView<Eigen::Lower>() * x;
    info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, 1, im.factor.data(), n,
                          im.ipiv.data(), r.data(), n);
    if (info != 0) throw std::runtime_error("dsytrs failed");
    b = x + r;
    return;
  }
  if (!im.sparse_ok) throw std::runtime_error("solve called without a factorization");
  Eigen::VectorXd x = im.ldlt.solve(b);
  Eigen::VectorXd r = b - im.lower.selfadjointView<Eigen::Lower>() * x;
  x += im.ldlt.solve(r).eval();
  b = x;
}

}  // namespace itdopf::nlp
