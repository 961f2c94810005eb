#include "itdopf/form/blocks.hpp"

#include <cmath>

namespace itdopf::form {

// ---------------------------------------------------------------- Linear

void LinearBlock::eval(const double* x, double* r) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    double v = rows_[i].constant;
    for (const auto& t : rows_[i].terms) v += t.coef * x[t.var];
    r[i] = v;
  }
}

void LinearBlock::jacobian(const double*, nlp::TripletSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i)
    for (const auto& t : rows_[i].terms) sink.add(static_cast<int>(i), t.var, t.coef);
}

// --------------------------------------------------------------- QuadLin

void QuadLinBlock::eval(const double* x, double* r) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    double v = rows_[i].constant;
    for (const auto& t : rows_[i].lin) v += t.coef * x[t.var];
    for (const auto& t : rows_[i].quad) v += t.coef * x[t.var] * x[t.var];
    r[i] = v;
  }
}

void QuadLinBlock::jacobian(const double* x, nlp::TripletSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const int row = static_cast<int>(i);
    for (const auto& t : rows_[i].lin) sink.add(row, t.var, t.coef);
    for (const auto& t : rows_[i].quad) sink.add(row, t.var, 2.0 * t.coef * x[t.var]);
  }
}

void QuadLinBlock::hessian(const double*, const double* lambda,
                           nlp::HessianSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const double lam = lambda[i];
    if (lam == 0.0) {
      // keep the sparsity pattern stable across iterations
      for (const auto& t : rows_[i].quad) sink.diag(t.var, 0.0);
      continue;
    }
    for (const auto& t : rows_[i].quad) sink.diag(t.var, 2.0 * t.coef * lam);
  }
}

// ------------------------------------------------------------- PolarFlow

namespace {

inline void polar_k(const PolarTerm& t, const double* x, bool reactive, double& value,
                    double& k, double& kp, double& v1, double& v2) {
  v1 = x[t.vm1];
  v2 = x[t.vm2];
  const double d = x[t.va1] - x[t.va2];
  const double c = std::cos(d), s = std::sin(d);
  if (!reactive) {
    k = t.g * c + t.b * s;
    kp = -t.g * s + t.b * c;
  } else {
    k = t.g * s - t.b * c;
    kp = t.g * c + t.b * s;
  }
  value = v1 * v2 * k;
}

}  // namespace

void PolarFlowBlock::eval(const double* x, double* r) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    double sum = 0;
    double value, k, kp, v1, v2;
    for (const auto& t : rows_[i].terms) {
      polar_k(t, x, rows_[i].reactive, value, k, kp, v1, v2);
      sum += value;
    }
    r[i] = x[rows_[i].target] - sum;
  }
}

void PolarFlowBlock::jacobian(const double* x, nlp::TripletSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const int row = static_cast<int>(i);
    sink.add(row, rows_[i].target, 1.0);
    double value, k, kp, v1, v2;
    for (const auto& t : rows_[i].terms) {
      polar_k(t, x, rows_[i].reactive, value, k, kp, v1, v2);
      sink.add(row, t.vm1, -v2 * k);
      sink.add(row, t.vm2, -v1 * k);
      sink.add(row, t.va1, -v1 * v2 * kp);
      sink.add(row, t.va2, v1 * v2 * kp);
    }
  }
}

void PolarFlowBlock::hessian(const double* x, const double* lambda,
                             nlp::HessianSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const double lam = lambda[i];
    double value, k, kp, v1, v2;
    for (const auto& t : rows_[i].terms) {
      polar_k(t, x, rows_[i].reactive, value, k, kp, v1, v2);
      // second derivatives of -T, T = v1 v2 K(a1 - a2)
      sink.pair(t.vm1, t.vm2, -lam * k);
      sink.pair(t.vm1, t.va1, -lam * v2 * kp);
      sink.pair(t.vm1, t.va2, lam * v2 * kp);
      sink.pair(t.vm2, t.va1, -lam * v1 * kp);
      sink.pair(t.vm2, t.va2, lam * v1 * kp);
      sink.pair(t.va1, t.va2, -lam * value);
      sink.diag(t.va1, lam * value);
      sink.diag(t.va2, lam * value);
    }
  }
}

// -------------------------------------------------------------- RectFlow

void RectFlowBlock::eval(const double* x, double* r) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    double sum = 0;
    for (const auto& t : rows_[i].terms) {
      const double re = x[t.e1] * x[t.e2] + x[t.f1] * x[t.f2];
      const double im = x[t.f1] * x[t.e2] - x[t.e1] * x[t.f2];
      sum += rows_[i].reactive ? t.g * im - t.b * re : t.g * re + t.b * im;
    }
    r[i] = x[rows_[i].target] - sum;
  }
}

void RectFlowBlock::jacobian(const double* x, nlp::TripletSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const int row = static_cast<int>(i);
    sink.add(row, rows_[i].target, 1.0);
    for (const auto& t : rows_[i].terms) {
      const double e1 = x[t.e1], f1 = x[t.f1], e2 = x[t.e2], f2 = x[t.f2];
      if (!rows_[i].reactive) {
        sink.add(row, t.e1, -(t.g * e2 - t.b * f2));
        sink.add(row, t.f1, -(t.g * f2 + t.b * e2));
        sink.add(row, t.e2, -(t.g * e1 + t.b * f1));
        sink.add(row, t.f2, -(t.g * f1 - t.b * e1));
      } else {
        sink.add(row, t.e1, -(-t.g * f2 - t.b * e2));
        sink.add(row, t.f1, -(t.g * e2 - t.b * f2));
        sink.add(row, t.e2, -(t.g * f1 - t.b * e1));
        sink.add(row, t.f2, -(-t.g * e1 - t.b * f1));
      }
    }
  }
}

void RectFlowBlock::hessian(const double*, const double* lambda,
                            nlp::HessianSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const double lam = lambda[i];
    for (const auto& t : rows_[i].terms) {
      if (!rows_[i].reactive) {
        sink.pair(t.e1, t.e2, -lam * t.g);
        sink.pair(t.f1, t.f2, -lam * t.g);
        sink.pair(t.f1, t.e2, -lam * t.b);
        sink.pair(t.e1, t.f2, lam * t.b);
      } else {
        sink.pair(t.f1, t.e2, -lam * t.g);
        sink.pair(t.e1, t.f2, lam * t.g);
        sink.pair(t.e1, t.e2, lam * t.b);
        sink.pair(t.f1, t.f2, lam * t.b);
      }
    }
  }
}

// ---------------------------------------------------------------- PadTan

void PadTanBlock::eval(const double* x, double* r) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const auto& t = rows_[i];
    const double re = x[t.e1] * x[t.e2] + x[t.f1] * x[t.f2];
    const double im = x[t.f1] * x[t.e2] - x[t.e1] * x[t.f2];
    r[i] = im - t.tan_bound * re;
  }
}

void PadTanBlock::jacobian(const double* x, nlp::TripletSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const auto& t = rows_[i];
    const int row = static_cast<int>(i);
    const double e1 = x[t.e1], f1 = x[t.f1], e2 = x[t.e2], f2 = x[t.f2];
    sink.add(row, t.e1, -f2 - t.tan_bound * e2);
    sink.add(row, t.f1, e2 - t.tan_bound * f2);
    sink.add(row, t.e2, f1 - t.tan_bound * e1);
    sink.add(row, t.f2, -e1 - t.tan_bound * f1);
  }
}

void PadTanBlock::hessian(const double*, const double* lambda,
                          nlp::HessianSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const auto& t = rows_[i];
    const double lam = lambda[i];
    sink.pair(t.f1, t.e2, lam);
    sink.pair(t.e1, t.f2, -lam);
    sink.pair(t.e1, t.e2, -lam * t.tan_bound);
    sink.pair(t.f1, t.f2, -lam * t.tan_bound);
  }
}

// ------------------------------------------------------------ BilinearVI

void BilinearVIBlock::eval(const double* x, double* r) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    double v = rows_[i].constant;
    for (const auto& t : rows_[i].lin) v += t.coef * x[t.var];
    for (const auto& c : rows_[i].combos)
      v += c.coef * (c.reactive ? x[c.vi] * x[c.ir] - x[c.vr] * x[c.ii]
                                : x[c.vr] * x[c.ir] + x[c.vi] * x[c.ii]);
    r[i] = v;
  }
}

void BilinearVIBlock::jacobian(const double* x, nlp::TripletSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const int row = static_cast<int>(i);
    for (const auto& t : rows_[i].lin) sink.add(row, t.var, t.coef);
    for (const auto& c : rows_[i].combos) {
      if (!c.reactive) {
        sink.add(row, c.vr, c.coef * x[c.ir]);
        sink.add(row, c.vi, c.coef * x[c.ii]);
        sink.add(row, c.ir, c.coef * x[c.vr]);
        sink.add(row, c.ii, c.coef * x[c.vi]);
      } else {
        sink.add(row, c.vr, -c.coef * x[c.ii]);
        sink.add(row, c.vi, c.coef * x[c.ir]);
        sink.add(row, c.ir, c.coef * x[c.vi]);
        sink.add(row, c.ii, -c.coef * x[c.vr]);
      }
    }
  }
}

void BilinearVIBlock::hessian(const double*, const double* lambda,
                              nlp::HessianSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const double lam = lambda[i];
    for (const auto& c : rows_[i].combos) {
      if (!c.reactive) {
        sink.pair(c.vr, c.ir, lam * c.coef);
        sink.pair(c.vi, c.ii, lam * c.coef);
      } else {
        sink.pair(c.vi, c.ir, lam * c.coef);
        sink.pair(c.vr, c.ii, -lam * c.coef);
      }
    }
  }
}

// --------------------------------------------------------- TangentOffset

void TangentOffsetBlock::eval(const double* x, double* r) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const auto& t = rows_[i];
    const double u = std::atan(x[t.f_a] / x[t.e_a]);
    r[i] = x[t.f_x] - std::tan(u + t.offset) * x[t.e_x];
  }
}

void TangentOffsetBlock::jacobian(const double* x, nlp::TripletSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const auto& t = rows_[i];
    const int row = static_cast<int>(i);
    const double ea = x[t.e_a], fa = x[t.f_a], ex = x[t.e_x];
    const double u = std::atan(fa / ea);
    const double tn = std::tan(u + t.offset);
    const double sc = 1.0 + tn * tn;
    const double r2 = ea * ea + fa * fa;
    const double ue = -fa / r2, uf = ea / r2;
    sink.add(row, t.f_x, 1.0);
    sink.add(row, t.e_x, -tn);
    sink.add(row, t.e_a, -ex * sc * ue);
    sink.add(row, t.f_a, -ex * sc * uf);
  }
}

void TangentOffsetBlock::hessian(const double* x, const double* lambda,
                                 nlp::HessianSink& sink) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const auto& t = rows_[i];
    const double lam = lambda[i];
    const double ea = x[t.e_a], fa = x[t.f_a], ex = x[t.e_x];
    const double u = std::atan(fa / ea);
    const double tn = std::tan(u + t.offset);
    const double sc = 1.0 + tn * tn;
    const double r2 = ea * ea + fa * fa;
    const double ue = -fa / r2, uf = ea / r2;
    const double uee = 2.0 * ea * fa / (r2 * r2);
    const double uff = -2.0 * ea * fa / (r2 * r2);
    const double uef = (fa * fa - ea * ea) / (r2 * r2);
    sink.pair(t.e_x, t.e_a, -lam * sc * ue);
    sink.pair(t.e_x, t.f_a, -lam * sc * uf);
    sink.diag(t.e_a, -lam * ex * (2.0 * tn * sc * ue * ue + sc * uee));
    sink.diag(t.f_a, -lam * ex * (2.0 * tn * sc * uf * uf + sc * uff));
    sink.pair(t.e_a, t.f_a, -lam * ex * (2.0 * tn * sc * ue * uf + sc * uef));
  }
}

}  // namespace itdopf::form
