// Copyright (c) 2026, the tabembed authors
// SPDX-License-Identifier: Apache-2.0
#include "tabembed/ops.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace tabembed {
namespace ops {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw DimensionError(std::string(op) + ": shape mismatch");
}

bool any_tracked(std::initializer_list<const Tensor*> ts) {
  for (const Tensor* t : ts)
    if (t->tracked()) return true;
  return false;
}

double stable_sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

}  // namespace

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  Tensor out = Tensor::zeros(a.shape(), any_tracked({&a, &b}));
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.at(i) = a.at(i) + b.at(i);
  if (out.tracked()) {
    tape.record(out, [out, a, b]() mutable {
      const auto& g = out.grad();
      if (a.tracked()) {
        auto& ga = a.grad();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      }
      if (b.tracked()) {
        auto& gb = b.grad();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
      }
    });
  }
  return out;
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  Tensor out = Tensor::zeros(a.shape(), any_tracked({&a, &b}));
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.at(i) = a.at(i) * b.at(i);
  if (out.tracked()) {
    tape.record(out, [out, a, b]() mutable {
      const auto& g = out.grad();
      if (a.tracked()) {
        auto& ga = a.grad();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b.at(i);
      }
      if (b.tracked()) {
        auto& gb = b.grad();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a.at(i);
      }
    });
  }
  return out;
}

Tensor scale(Tape& tape, const Tensor& a, double c) {
  Tensor out = Tensor::zeros(a.shape(), a.tracked());
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.at(i) = a.at(i) * c;
  if (out.tracked()) {
    tape.record(out, [out, a, c]() mutable {
      const auto& g = out.grad();
      auto& ga = a.grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c;
    });
  }
  return out;
}

Tensor relu(Tape& tape, const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape(), x.tracked());
  const std::size_t n = x.numel();
  for (std::size_t i = 0; i < n; ++i) out.at(i) = x.at(i) > 0.0 ? x.at(i) : 0.0;
  if (out.tracked()) {
    tape.record(out, [out, x]() mutable {
      const auto& g = out.grad();
      auto& gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i)
        if (x.at(i) > 0.0) gx[i] += g[i];
    });
  }
  return out;
}

Tensor sigmoid(Tape& tape, const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape(), x.tracked());
  const std::size_t n = x.numel();
  for (std::size_t i = 0; i < n; ++i) out.at(i) = stable_sigmoid(x.at(i));
  if (out.tracked()) {
    tape.record(out, [out, x]() mutable {
      const auto& g = out.grad();
      auto& gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double s = out.at(i);
        gx[i] += g[i] * s * (1.0 - s);
      }
    });
  }
  return out;
}

Tensor exu(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b,
           double cap) {
  if (cap <= 0.0) throw ConfigError("exu: cap must be positive");
  check_same_shape(w, b, "exu");
  const bool broadcast = (x.rank() == 2 && w.rank() == 1);
  if (broadcast) {
    if (w.numel() != x.cols())
      throw DimensionError("exu: w length must match matrix columns");
  } else {
    check_same_shape(x, w, "exu");
  }
  Tensor out = Tensor::zeros(x.shape(), any_tracked({&x, &w, &b}));
  const std::size_t n = x.numel();
  const std::size_t width = broadcast ? x.cols() : n;
  // exp(w) depends only on the column; hoist it out of the element loop.
  std::vector<double> ew(width);
  for (std::size_t k = 0; k < width; ++k) ew[k] = std::exp(w.at(k));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = broadcast ? i % width : i;
    const double z = (x.at(i) - b.at(k)) * ew[k];
    out.at(i) = z <= 0.0 ? 0.0 : (z >= cap ? cap : z);
  }
  if (out.tracked()) {
    tape.record(out, [out, x, w, b, cap, broadcast, width,
                      ew = std::move(ew)]() mutable {
      const auto& g = out.grad();
      const double* xd = x.values().data();
      const double* bd = b.values().data();
      double* gx = x.tracked() ? x.grad().data() : nullptr;
      double* gw = w.tracked() ? w.grad().data() : nullptr;
      double* gb = b.tracked() ? b.grad().data() : nullptr;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t k = broadcast ? i % width : i;
        const double z = (xd[i] - bd[k]) * ew[k];
        if (z <= 0.0 || z >= cap) continue;  // flat outside the active band
        if (gx) gx[i] += g[i] * ew[k];
        if (gw) gw[k] += g[i] * z;
        if (gb) gb[k] -= g[i] * ew[k];
      }
    });
  }
  return out;
}

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw DimensionError("matmul: both operands must be matrices");
  if (a.cols() != b.rows())
    throw DimensionError("matmul: inner dimensions disagree");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out = Tensor::zeros({m, n}, any_tracked({&a, &b}));
  {
    const double* ad = a.values().data();
    const double* bd = b.values().data();
    double* od = out.values().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        const double av = ad[i * k + p];
        if (av == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) od[i * n + j] += av * bd[p * n + j];
      }
  }
  if (out.tracked()) {
    tape.record(out, [out, a, b, m, k, n]() mutable {
      // dA = dC * B^T, dB = A^T * dC
      const double* g = out.grad().data();
      const double* ad = a.values().data();
      const double* bd = b.values().data();
      if (a.tracked()) {
        double* ga = a.grad().data();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
              acc += g[i * n + j] * bd[p * n + j];
            ga[i * k + p] += acc;
          }
      }
      if (b.tracked()) {
        double* gb = b.grad().data();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            const double av = ad[i * k + p];
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j)
              gb[p * n + j] += av * g[i * n + j];
          }
      }
    });
  }
  return out;
}

Tensor matmul_nt(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw DimensionError("matmul_nt: both operands must be matrices");
  if (a.cols() != b.cols())
    throw DimensionError("matmul_nt: inner dimensions disagree");
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Tensor out = Tensor::zeros({m, n}, any_tracked({&a, &b}));
  {
    const double* ad = a.values().data();
    const double* bd = b.values().data();
    double* od = out.values().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t p = 0; p < k; ++p) acc += ad[i * k + p] * bd[j * k + p];
        od[i * n + j] = acc;
      }
  }
  if (out.tracked()) {
    tape.record(out, [out, a, b, m, k, n]() mutable {
      // dA = dC * B, dB = dC^T * A
      const double* g = out.grad().data();
      const double* ad = a.values().data();
      const double* bd = b.values().data();
      if (a.tracked()) {
        double* ga = a.grad().data();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const double gij = g[i * n + j];
            if (gij == 0.0) continue;
            for (std::size_t p = 0; p < k; ++p)
              ga[i * k + p] += gij * bd[j * k + p];
          }
      }
      if (b.tracked()) {
        double* gb = b.grad().data();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const double gij = g[i * n + j];
            if (gij == 0.0) continue;
            for (std::size_t p = 0; p < k; ++p)
              gb[j * k + p] += gij * ad[i * k + p];
          }
      }
    });
  }
  return out;
}

Tensor affine(Tape& tape, const Tensor& x, const Tensor& W, const Tensor& b) {
  if (x.rank() != 1 || W.rank() != 2 || b.rank() != 1)
    throw DimensionError("affine: expected vector, matrix, vector");
  const std::size_t d_out = W.rows(), d_in = W.cols();
  if (x.numel() != d_in || b.numel() != d_out)
    throw DimensionError("affine: shape mismatch");
  Tensor out = Tensor::zeros({d_out}, any_tracked({&x, &W, &b}));
  for (std::size_t i = 0; i < d_out; ++i) {
    double acc = b.at(i);
    for (std::size_t j = 0; j < d_in; ++j) acc += W.at(i, j) * x.at(j);
    out.at(i) = acc;
  }
  if (out.tracked()) {
    tape.record(out, [out, x, W, b, d_out, d_in]() mutable {
      const auto& g = out.grad();
      for (std::size_t i = 0; i < d_out; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        if (b.tracked()) b.grad()[i] += gi;
        for (std::size_t j = 0; j < d_in; ++j) {
          if (W.tracked()) W.grad()[i * d_in + j] += gi * x.at(j);
          if (x.tracked()) x.grad()[j] += gi * W.at(i, j);
        }
      }
    });
  }
  return out;
}

Tensor add_rowvec(Tape& tape, const Tensor& m, const Tensor& v) {
  if (m.rank() != 2 || v.rank() != 1 || v.numel() != m.cols())
    throw DimensionError("add_rowvec: shape mismatch");
  const std::size_t rows = m.rows(), cols = m.cols();
  Tensor out = Tensor::zeros({rows, cols}, any_tracked({&m, &v}));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out.at(i, j) = m.at(i, j) + v.at(j);
  if (out.tracked()) {
    tape.record(out, [out, m, v, rows, cols]() mutable {
      const auto& g = out.grad();
      if (m.tracked()) {
        auto& gm = m.grad();
        for (std::size_t i = 0; i < g.size(); ++i) gm[i] += g[i];
      }
      if (v.tracked()) {
        auto& gv = v.grad();
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t j = 0; j < cols; ++j) gv[j] += g[i * cols + j];
      }
    });
  }
  return out;
}

Tensor expand_batch(Tape& tape, std::span<const double> xs,
                    const Tensor& gamma, const Tensor& beta) {
  check_same_shape(gamma, beta, "expand_batch");
  const std::size_t b = xs.size(), d = gamma.numel();
  Tensor out = Tensor::zeros({b, d}, any_tracked({&gamma, &beta}));
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t k = 0; k < d; ++k)
      out.at(i, k) = xs[i] * gamma.at(k) + beta.at(k);
  if (out.tracked()) {
    std::vector<double> xcopy(xs.begin(), xs.end());
    tape.record(out, [out, xcopy = std::move(xcopy), gamma, beta, b,
                      d]() mutable {
      const auto& g = out.grad();
      for (std::size_t i = 0; i < b; ++i)
        for (std::size_t k = 0; k < d; ++k) {
          const double gik = g[i * d + k];
          if (gamma.tracked()) gamma.grad()[k] += gik * xcopy[i];
          if (beta.tracked()) beta.grad()[k] += gik;
        }
    });
  }
  return out;
}

Tensor sum(Tape& tape, const Tensor& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) acc += x.at(i);
  Tensor out = Tensor::scalar(acc, x.tracked());
  if (out.tracked()) {
    tape.record(out, [out, x]() mutable {
      const double g = out.grad()[0];
      auto& gx = x.grad();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
    });
  }
  return out;
}

Tensor as_row(Tape& tape, const Tensor& x) {
  if (x.rank() != 1) throw DimensionError("as_row: expected a vector");
  Tensor out = Tensor::from({1, x.numel()}, x.values(), x.tracked());
  if (out.tracked()) {
    tape.record(out, [out, x]() mutable {
      const auto& g = out.grad();
      auto& gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    });
  }
  return out;
}

Tensor concat(Tape& tape, const std::vector<Tensor>& parts) {
  std::size_t total = 0;
  bool tracked = false;
  for (const Tensor& p : parts) {
    if (p.rank() != 1) throw DimensionError("concat: parts must be vectors");
    total += p.numel();
    tracked = tracked || p.tracked();
  }
  Tensor out = Tensor::zeros({total}, tracked);
  std::size_t off = 0;
  for (const Tensor& p : parts) {
    std::memcpy(out.values().data() + off, p.values().data(),
                p.numel() * sizeof(double));
    off += p.numel();
  }
  if (tracked) {
    tape.record(out, [out, parts]() mutable {
      const auto& g = out.grad();
      std::size_t off = 0;
      for (const Tensor& p : parts) {
        if (p.tracked()) {
          auto& gp = p.grad();
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[off + i];
        }
        off += p.numel();
      }
    });
  }
  return out;
}

Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no parts");
  const std::size_t rows = parts.front().rows();
  std::size_t total = 0;
  bool tracked = false;
  for (const Tensor& p : parts) {
    if (p.rank() != 2 || p.rows() != rows)
      throw DimensionError("concat_cols: row counts disagree");
    total += p.cols();
    tracked = tracked || p.tracked();
  }
  Tensor out = Tensor::zeros({rows, total}, tracked);
  std::size_t off = 0;
  for (const Tensor& p : parts) {
    for (std::size_t i = 0; i < rows; ++i)
      std::memcpy(&out.at(i, off), &p.at(i, 0), p.cols() * sizeof(double));
    off += p.cols();
  }
  if (tracked) {
    tape.record(out, [out, parts, rows, total]() mutable {
      const auto& g = out.grad();
      std::size_t off = 0;
      for (const Tensor& p : parts) {
        const std::size_t pc = p.cols();
        if (p.tracked()) {
          auto& gp = p.grad();
          for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < pc; ++j)
              gp[i * pc + j] += g[i * total + off + j];
        }
        off += pc;
      }
    });
  }
  return out;
}

Tensor row_lookup(Tape& tape, const Tensor& table, std::size_t index) {
  if (table.rank() != 2) throw DimensionError("row_lookup: table not a matrix");
  if (index >= table.rows())
    throw OovError("row_lookup: index " + std::to_string(index) +
                   " out of range for cardinality " +
                   std::to_string(table.rows()));
  const std::size_t d = table.cols();
  Tensor out = Tensor::zeros({d}, table.tracked());
  std::memcpy(out.values().data(), &table.at(index, 0), d * sizeof(double));
  if (out.tracked()) {
    tape.record(out, [out, table, index, d]() mutable {
      const auto& g = out.grad();
      auto& gt = table.grad();
      for (std::size_t j = 0; j < d; ++j) gt[index * d + j] += g[j];
    });
  }
  return out;
}

Tensor gather_rows(Tape& tape, const Tensor& table,
                   std::span<const std::uint32_t> indices) {
  if (table.rank() != 2)
    throw DimensionError("gather_rows: table not a matrix");
  const std::size_t d = table.cols(), b = indices.size();
  const std::size_t rows = table.rows();
  // Index == rows() is the reserved out-of-vocabulary slot: a frozen zero
  // row that receives no gradient.
  for (std::uint32_t idx : indices)
    if (idx > rows) throw OovError("gather_rows: index out of range");
  Tensor out = Tensor::zeros({b, d}, table.tracked());
  for (std::size_t i = 0; i < b; ++i)
    if (indices[i] < rows)
      std::memcpy(&out.at(i, 0), &table.at(indices[i], 0), d * sizeof(double));
  if (out.tracked()) {
    std::vector<std::uint32_t> icopy(indices.begin(), indices.end());
    tape.record(out, [out, table, icopy = std::move(icopy), d,
                      rows]() mutable {
      const auto& g = out.grad();
      auto& gt = table.grad();
      for (std::size_t i = 0; i < icopy.size(); ++i) {
        if (icopy[i] >= rows) continue;
        for (std::size_t j = 0; j < d; ++j)
          gt[icopy[i] * d + j] += g[i * d + j];
      }
    });
  }
  return out;
}

namespace {
// Softmax of one row in place; returns nothing. Stable via max subtraction.
void softmax_row(const double* in, double* out, std::size_t n) {
  double mx = in[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, in[i]);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(in[i] - mx);
    z += out[i];
  }
  for (std::size_t i = 0; i < n; ++i) out[i] /= z;
}

void softmax_row_backward(const double* s, const double* g, double* gx,
                          std::size_t n) {
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += s[i] * g[i];
  for (std::size_t i = 0; i < n; ++i) gx[i] += s[i] * (g[i] - dot);
}
}  // namespace

Tensor softmax(Tape& tape, const Tensor& x) {
  if (x.rank() != 1) throw DimensionError("softmax: expected a vector");
  const std::size_t n = x.numel();
  Tensor out = Tensor::zeros({n}, x.tracked());
  softmax_row(x.values().data(), out.values().data(), n);
  if (out.tracked()) {
    tape.record(out, [out, x, n]() mutable {
      softmax_row_backward(out.values().data(), out.grad().data(),
                           x.grad().data(), n);
    });
  }
  return out;
}

Tensor softmax_rows(Tape& tape, const Tensor& m) {
  if (m.rank() != 2) throw DimensionError("softmax_rows: expected a matrix");
  const std::size_t rows = m.rows(), cols = m.cols();
  Tensor out = Tensor::zeros({rows, cols}, m.tracked());
  for (std::size_t i = 0; i < rows; ++i)
    softmax_row(&m.at(i, 0), &out.at(i, 0), cols);
  if (out.tracked()) {
    tape.record(out, [out, m, rows, cols]() mutable {
      for (std::size_t i = 0; i < rows; ++i)
        softmax_row_backward(&out.values()[i * cols], &out.grad()[i * cols],
                             &m.grad()[i * cols], cols);
    });
  }
  return out;
}

Tensor scale_by_element(Tape& tape, const Tensor& a, const Tensor& s,
                        std::size_t index) {
  if (index >= s.numel())
    throw DimensionError("scale_by_element: index out of range");
  const double c = s.at(index);
  Tensor out = Tensor::zeros(a.shape(), any_tracked({&a, &s}));
  for (std::size_t i = 0; i < a.numel(); ++i) out.at(i) = a.at(i) * c;
  if (out.tracked()) {
    tape.record(out, [out, a, s, index, c]() mutable {
      const auto& g = out.grad();
      if (a.tracked()) {
        auto& ga = a.grad();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c;
      }
      if (s.tracked()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * a.at(i);
        s.grad()[index] += acc;
      }
    });
  }
  return out;
}

Tensor bce_loss(Tape& tape, const Tensor& p, const Tensor& y) {
  if (p.numel() != y.numel())
    throw DimensionError("bce_loss: prediction/label length mismatch");
  const std::size_t n = p.numel();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pc = std::min(std::max(p.at(i), kBceEps), 1.0 - kBceEps);
    acc -= y.at(i) * std::log(pc) + (1.0 - y.at(i)) * std::log(1.0 - pc);
  }
  Tensor out = Tensor::scalar(acc / static_cast<double>(n), p.tracked());
  if (out.tracked()) {
    tape.record(out, [out, p, y, n]() mutable {
      const double g = out.grad()[0] / static_cast<double>(n);
      auto& gp = p.grad();
      for (std::size_t i = 0; i < n; ++i) {
        const double pv = p.at(i);
        if (pv <= kBceEps || pv >= 1.0 - kBceEps) continue;  // clamped: flat
        gp[i] += g * (-y.at(i) / pv + (1.0 - y.at(i)) / (1.0 - pv));
      }
    });
  }
  return out;
}

}  // namespace ops
}  // namespace tabembed
