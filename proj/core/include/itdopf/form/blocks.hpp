#pragma once

#include <vector>

#include "itdopf/nlp/block.hpp"

namespace itdopf::form {

struct LinearTerm {
  int var;
  double coef;
};

struct LinearRow {
  std::vector<LinearTerm> terms;
  double constant = 0;
};

/// r_i = sum a_ij x_j + c_i
class LinearBlock final : public nlp::ConstraintBlock {
 public:
  LinearBlock(std::string name, nlp::BlockOwner owner, std::vector<LinearRow> rows,
              Eigen::VectorXd lo, Eigen::VectorXd hi)
      : ConstraintBlock(std::move(name), owner, std::move(lo), std::move(hi), true),
        rows_(std::move(rows)) {}
  void eval(const double* x, double* r) const override;
  void jacobian(const double* x, nlp::TripletSink& sink) const override;

 private:
  std::vector<LinearRow> rows_;
};

struct QuadTerm {
  int var;
  double coef;  ///< coef * x^2
};

struct QuadLinRow {
  std::vector<LinearTerm> lin;
  std::vector<QuadTerm> quad;
  double constant = 0;
};

/// r_i = sum a x + sum q x^2 + c (diagonal quadratic)
class QuadLinBlock final : public nlp::ConstraintBlock {
 public:
  QuadLinBlock(std::string name, nlp::BlockOwner owner, std::vector<QuadLinRow> rows,
               Eigen::VectorXd lo, Eigen::VectorXd hi)
      : ConstraintBlock(std::move(name), owner, std::move(lo), std::move(hi), false),
        rows_(std::move(rows)) {}
  void eval(const double* x, double* r) const override;
  void jacobian(const double* x, nlp::TripletSink& sink) const override;
  void hessian(const double* x, const double* lambda, nlp::HessianSink& sink) const override;

 private:
  std::vector<QuadLinRow> rows_;
};

/// One product term of a polar power-flow expression:
///   v1 v2 (g cos(a1 - a2) + b sin(a1 - a2))          (active)
///   v1 v2 (g sin(a1 - a2) - b cos(a1 - a2))          (reactive)
struct PolarTerm {
  int vm1, va1, vm2, va2;
  double g, b;
};

struct PolarFlowRow {
  int target;  ///< flow variable
  bool reactive;
  std::vector<PolarTerm> terms;
};

/// r = x[target] - sum of terms (flow-definition equality)
class PolarFlowBlock final : public nlp::ConstraintBlock {
 public:
  PolarFlowBlock(std::string name, nlp::BlockOwner owner, std::vector<PolarFlowRow> rows)
      : ConstraintBlock(std::move(name), owner,
                        Eigen::VectorXd::Zero(static_cast<int>(rows.size())),
                        Eigen::VectorXd::Zero(static_cast<int>(rows.size())), false),
        rows_(std::move(rows)) {}
  void eval(const double* x, double* r) const override;
  void jacobian(const double* x, nlp::TripletSink& sink) const override;
  void hessian(const double* x, const double* lambda, nlp::HessianSink& sink) const override;

 private:
  std::vector<PolarFlowRow> rows_;
};

/// Rectangular analogue of PolarTerm over voltages (e1, f1), (e2, f2):
///   g (e1 e2 + f1 f2) + b (f1 e2 - e1 f2)            (active)
///   g (f1 e2 - e1 f2) - b (e1 e2 + f1 f2)            (reactive)
struct RectTerm {
  int e1, f1, e2, f2;
  double g, b;
};

struct RectFlowRow {
  int target;
  bool reactive;
  std::vector<RectTerm> terms;
};

class RectFlowBlock final : public nlp::ConstraintBlock {
 public:
  RectFlowBlock(std::string name, nlp::BlockOwner owner, std::vector<RectFlowRow> rows)
      : ConstraintBlock(std::move(name), owner,
                        Eigen::VectorXd::Zero(static_cast<int>(rows.size())),
                        Eigen::VectorXd::Zero(static_cast<int>(rows.size())), false),
        rows_(std::move(rows)) {}
  void eval(const double* x, double* r) const override;
  void jacobian(const double* x, nlp::TripletSink& sink) const override;
  void hessian(const double* x, const double* lambda, nlp::HessianSink& sink) const override;

 private:
  std::vector<RectFlowRow> rows_;
};

/// Angle-difference row in rectangular coordinates:
///   r = (f1 e2 - e1 f2) - tan_bound (e1 e2 + f1 f2), one-sided bounds.
struct PadTanRow {
  int e1, f1, e2, f2;
  double tan_bound;
};

class PadTanBlock final : public nlp::ConstraintBlock {
 public:
  PadTanBlock(std::string name, nlp::BlockOwner owner, std::vector<PadTanRow> rows,
              Eigen::VectorXd lo, Eigen::VectorXd hi)
      : ConstraintBlock(std::move(name), owner, std::move(lo), std::move(hi), false),
        rows_(std::move(rows)) {}
  void eval(const double* x, double* r) const override;
  void jacobian(const double* x, nlp::TripletSink& sink) const override;
  void hessian(const double* x, const double* lambda, nlp::HessianSink& sink) const override;

 private:
  std::vector<PadTanRow> rows_;
};

/// Bilinear voltage-current product (coef applied to the whole product):
///   vr ir + vi ii   (active)     vi ir - vr ii   (reactive)
struct VICombo {
  int vr, vi, ir, ii;
  bool reactive;
  double coef;
};

struct VIRow {
  double constant = 0;
  std::vector<LinearTerm> lin;
  std::vector<VICombo> combos;
};

/// r = c + sum lin + sum combos  (current-voltage power expressions)
class BilinearVIBlock final : public nlp::ConstraintBlock {
 public:
  BilinearVIBlock(std::string name, nlp::BlockOwner owner, std::vector<VIRow> rows,
                  Eigen::VectorXd lo, Eigen::VectorXd hi)
      : ConstraintBlock(std::move(name), owner, std::move(lo), std::move(hi), false),
        rows_(std::move(rows)) {}
  void eval(const double* x, double* r) const override;
  void jacobian(const double* x, nlp::TripletSink& sink) const override;
  void hessian(const double* x, const double* lambda, nlp::HessianSink& sink) const override;

 private:
  std::vector<VIRow> rows_;
};

/// Boundary phase-offset tie in rectangular coordinates:
///   r = f_x - tan(atan(f_a / e_a) + offset) e_x.
/// The atan argument is guarded by an e_a >= 0.1 variable bound at build
/// time; near e_a = 0 the row is ill-conditioned but not evaluated there.
struct TangentRow {
  int e_a, f_a, e_x, f_x;
  double offset;  ///< -120 deg or +120 deg in radians
};

class TangentOffsetBlock final : public nlp::ConstraintBlock {
 public:
  TangentOffsetBlock(std::string name, nlp::BlockOwner owner, std::vector<TangentRow> rows)
      : ConstraintBlock(std::move(name), owner,
                        Eigen::VectorXd::Zero(static_cast<int>(rows.size())),
                        Eigen::VectorXd::Zero(static_cast<int>(rows.size())), false),
        rows_(std::move(rows)) {}
  void eval(const double* x, double* r) const override;
  void jacobian(const double* x, nlp::TripletSink& sink) const override;
  void hessian(const double* x, const double* lambda, nlp::HessianSink& sink) const override;

 private:
  std::vector<TangentRow> rows_;
};

}  // namespace itdopf::form
