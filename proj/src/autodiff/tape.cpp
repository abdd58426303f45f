// Copyright 2026 The hero-desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "hero/autodiff/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hero::ad {

namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + shape_str(a) +
                              " and " + shape_str(b));
}

[[noreturn]] void shape_error(const char* op, const Shape& a) {
  throw std::invalid_argument(std::string(op) + ": unsupported shape " + shape_str(a));
}

void require_2d(const char* op, const Tensor& t) {
  if (t.rank() > 2) shape_error(op, t.shape);
}

// out[m,n] += a[m,k] * b[k,n]
void gemm_acc(const double* a, const double* b, double* out, std::size_t m, std::size_t k,
              std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
}

// out[m,k] += g[m,n] * b[k,n]^T
void gemm_acc_bt(const double* g, const double* b, double* out, std::size_t m, std::size_t k,
                 std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double* brow = b + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
      out[i * k + p] += acc;
    }
  }
}

// out[k,n] += a[m,k]^T * g[m,n]
void gemm_acc_at(const double* a, const double* g, double* out, std::size_t m, std::size_t k,
                 std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      double* orow = out + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * grow[j];
    }
  }
}

}  // namespace

std::vector<double>& Tape::grad_buffer(std::size_t index) {
  auto& n = nodes_[index];
  if (n.grad.empty()) n.grad.assign(n.value.numel(), 0.0);
  return n.grad;
}

Var Tape::push(Tensor value, std::vector<std::size_t> parents,
               std::function<void(Tape&, Node&)> backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = std::any_of(parents.begin(), parents.end(),
                                [&](std::size_t p) { return nodes_[p].requires_grad; });
  n.parents = std::move(parents);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = Tensor(std::move(value.shape), std::move(value.data));
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::param(const ParamStore& store, const std::string& name) {
  const auto& t = store.at(name);
  Node n;
  n.value = Tensor(t.shape, t.data);
  n.requires_grad = store.trainable(name);
  n.store = &store;
  n.param_name = name;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::matmul(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  require_2d("matmul", av);
  require_2d("matmul", bv);
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  if (bv.rows() != k) shape_error("matmul", av.shape, bv.shape);
  Tensor out = Tensor::zeros({m, n});
  gemm_acc(av.data.data(), bv.data.data(), out.data.data(), m, k, n);
  const auto ia = a.index, ib = b.index;
  return push(std::move(out), {ia, ib}, [ia, ib, m, k, n](Tape& tp, Node& self) {
    if (tp.nodes_[ia].requires_grad) {
      auto& ga = tp.grad_buffer(ia);
      gemm_acc_bt(self.grad.data(), tp.nodes_[ib].value.data.data(), ga.data(), m, k, n);
    }
    if (tp.nodes_[ib].requires_grad) {
      auto& gb = tp.grad_buffer(ib);
      gemm_acc_at(tp.nodes_[ia].value.data.data(), self.grad.data(), gb.data(), m, k, n);
    }
  });
}

Var Tape::add(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  const auto ia = a.index, ib = b.index;
  if (av.shape == bv.shape) {
    Tensor out = av;
    out.grad.reset();
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += bv.data[i];
    return push(std::move(out), {ia, ib}, [ia, ib](Tape& tp, Node& self) {
      for (auto idx : {ia, ib}) {
        if (!tp.nodes_[idx].requires_grad) continue;
        auto& g = tp.grad_buffer(idx);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
      }
    });
  }
  // row-vector broadcast
  if (av.rank() == 2 && bv.rank() == 1 && bv.shape[0] == av.shape[1]) {
    const std::size_t m = av.shape[0], n = av.shape[1];
    Tensor out(av.shape, av.data);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) out.data[i * n + j] += bv.data[j];
    return push(std::move(out), {ia, ib}, [ia, ib, m, n](Tape& tp, Node& self) {
      if (tp.nodes_[ia].requires_grad) {
        auto& g = tp.grad_buffer(ia);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
      }
      if (tp.nodes_[ib].requires_grad) {
        auto& g = tp.grad_buffer(ib);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
      }
    });
  }
  shape_error("add", av.shape, bv.shape);
}

Var Tape::sub(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  if (av.shape != bv.shape) shape_error("sub", av.shape, bv.shape);
  Tensor out(av.shape, av.data);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] -= bv.data[i];
  const auto ia = a.index, ib = b.index;
  return push(std::move(out), {ia, ib}, [ia, ib](Tape& tp, Node& self) {
    if (tp.nodes_[ia].requires_grad) {
      auto& g = tp.grad_buffer(ia);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (tp.nodes_[ib].requires_grad) {
      auto& g = tp.grad_buffer(ib);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Var Tape::mul(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  if (av.shape != bv.shape) shape_error("mul", av.shape, bv.shape);
  Tensor out(av.shape, av.data);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] *= bv.data[i];
  const auto ia = a.index, ib = b.index;
  return push(std::move(out), {ia, ib}, [ia, ib](Tape& tp, Node& self) {
    if (tp.nodes_[ia].requires_grad) {
      auto& g = tp.grad_buffer(ia);
      const auto& other = tp.nodes_[ib].value.data;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * other[i];
    }
    if (tp.nodes_[ib].requires_grad) {
      auto& g = tp.grad_buffer(ib);
      const auto& other = tp.nodes_[ia].value.data;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * other[i];
    }
  });
}

Var Tape::scale(Var a, double factor) {
  const auto& av = value(a);
  Tensor out(av.shape, av.data);
  for (auto& x : out.data) x *= factor;
  const auto ia = a.index;
  return push(std::move(out), {ia}, [ia, factor](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * factor;
  });
}

Var Tape::add_scalar(Var a, double offset) {
  const auto& av = value(a);
  Tensor out(av.shape, av.data);
  for (auto& x : out.data) x += offset;
  const auto ia = a.index;
  return push(std::move(out), {ia}, [ia](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Var Tape::relu(Var a) {
  const auto& av = value(a);
  Tensor out(av.shape, av.data);
  for (auto& x : out.data) x = x > 0.0 ? x : 0.0;
  const auto ia = a.index;
  return push(std::move(out), {ia}, [ia](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    const auto& in = tp.nodes_[ia].value.data;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (in[i] > 0.0) g[i] += self.grad[i];
  });
}

Var Tape::tanh(Var a) {
  const auto& av = value(a);
  Tensor out(av.shape, av.data);
  for (auto& x : out.data) x = std::tanh(x);
  const auto ia = a.index;
  return push(std::move(out), {ia}, [ia](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    const auto& y = self.value.data;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * (1.0 - y[i] * y[i]);
  });
}

Var Tape::exp(Var a) {
  const auto& av = value(a);
  Tensor out(av.shape, av.data);
  for (auto& x : out.data) x = std::exp(x);
  const auto ia = a.index;
  return push(std::move(out), {ia}, [ia](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    const auto& y = self.value.data;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * y[i];
  });
}

Var Tape::sum(Var a) {
  const auto& av = value(a);
  double s = 0.0;
  for (double x : av.data) s += x;
  const auto ia = a.index;
  return push(Tensor::scalar(s), {ia}, [ia](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    for (auto& x : g) x += self.grad[0];
  });
}

Var Tape::mean(Var a) {
  const auto& av = value(a);
  if (av.numel() == 0) shape_error("mean", av.shape);
  double s = 0.0;
  for (double x : av.data) s += x;
  const double inv = 1.0 / static_cast<double>(av.numel());
  const auto ia = a.index;
  return push(Tensor::scalar(s * inv), {ia}, [ia, inv](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    for (auto& x : g) x += self.grad[0] * inv;
  });
}

Var Tape::row_sum(Var a) {
  const auto& av = value(a);
  require_2d("row_sum", av);
  const std::size_t m = av.rows(), n = av.cols();
  Tensor out = Tensor::zeros({m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.data[i] += av.data[i * n + j];
  const auto ia = a.index;
  return push(std::move(out), {ia}, [ia, m, n](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[i];
  });
}

Var Tape::squared_error(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  if (av.shape != bv.shape || av.numel() == 0) shape_error("squared_error", av.shape, bv.shape);
  double s = 0.0;
  for (std::size_t i = 0; i < av.numel(); ++i) {
    const double d = av.data[i] - bv.data[i];
    s += d * d;
  }
  const double inv = 1.0 / static_cast<double>(av.numel());
  const auto ia = a.index, ib = b.index;
  return push(Tensor::scalar(s * inv), {ia, ib}, [ia, ib, inv](Tape& tp, Node& self) {
    const auto& x = tp.nodes_[ia].value.data;
    const auto& y = tp.nodes_[ib].value.data;
    const double g0 = self.grad[0] * 2.0 * inv;
    if (tp.nodes_[ia].requires_grad) {
      auto& g = tp.grad_buffer(ia);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += g0 * (x[i] - y[i]);
    }
    if (tp.nodes_[ib].requires_grad) {
      auto& g = tp.grad_buffer(ib);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= g0 * (x[i] - y[i]);
    }
  });
}

Var Tape::cosine_similarity(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  require_2d("cosine_similarity", av);
  if (av.shape != bv.shape) shape_error("cosine_similarity", av.shape, bv.shape);
  const std::size_t m = av.rows(), n = av.cols();
  // Norm product is floored so zero vectors yield similarity 0 rather than NaN.
  constexpr double kFloor = 1e-12;
  std::vector<double> na(m), nb(m), dot(m);
  Tensor out = Tensor::zeros({m});
  for (std::size_t i = 0; i < m; ++i) {
    double d = 0, sa = 0, sb = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = av.data[i * n + j], y = bv.data[i * n + j];
      d += x * y;
      sa += x * x;
      sb += y * y;
    }
    na[i] = std::sqrt(sa);
    nb[i] = std::sqrt(sb);
    dot[i] = d;
    const double c = d / std::max(na[i] * nb[i], kFloor);
    out.data[i] = std::clamp(c, -1.0, 1.0);
  }
  const auto ia = a.index, ib = b.index;
  return push(std::move(out), {ia, ib},
              [ia, ib, m, n, na, nb, dot](Tape& tp, Node& self) {
                const auto& x = tp.nodes_[ia].value.data;
                const auto& y = tp.nodes_[ib].value.data;
                const bool ga_on = tp.nodes_[ia].requires_grad;
                const bool gb_on = tp.nodes_[ib].requires_grad;
                for (std::size_t i = 0; i < m; ++i) {
                  const double denom = na[i] * nb[i];
                  if (denom <= kFloor) continue;
                  const double c = dot[i] / denom;
                  const double gi = self.grad[i];
                  if (ga_on) {
                    auto& g = tp.grad_buffer(ia);
                    const double sa2 = na[i] * na[i];
                    for (std::size_t j = 0; j < n; ++j)
                      g[i * n + j] += gi * (y[i * n + j] / denom - c * x[i * n + j] / sa2);
                  }
                  if (gb_on) {
                    auto& g = tp.grad_buffer(ib);
                    const double sb2 = nb[i] * nb[i];
                    for (std::size_t j = 0; j < n; ++j)
                      g[i * n + j] += gi * (x[i * n + j] / denom - c * y[i * n + j] / sb2);
                  }
                }
              });
}

Var Tape::max_const(Var a, double c) {
  const auto& av = value(a);
  Tensor out(av.shape, av.data);
  for (auto& x : out.data) x = std::max(x, c);
  const auto ia = a.index;
  return push(std::move(out), {ia}, [ia, c](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    const auto& in = tp.nodes_[ia].value.data;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (in[i] > c) g[i] += self.grad[i];
  });
}

Var Tape::min_const(Var a, double c) {
  const auto& av = value(a);
  Tensor out(av.shape, av.data);
  for (auto& x : out.data) x = std::min(x, c);
  const auto ia = a.index;
  return push(std::move(out), {ia}, [ia, c](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    const auto& in = tp.nodes_[ia].value.data;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (in[i] < c) g[i] += self.grad[i];
  });
}

Var Tape::clamp(Var a, double lo, double hi) {
  const auto& av = value(a);
  Tensor out(av.shape, av.data);
  for (auto& x : out.data) x = std::clamp(x, lo, hi);
  const auto ia = a.index;
  return push(std::move(out), {ia}, [ia, lo, hi](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    const auto& in = tp.nodes_[ia].value.data;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (in[i] > lo && in[i] < hi) g[i] += self.grad[i];
  });
}

Var Tape::minimum(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  if (av.shape != bv.shape) shape_error("minimum", av.shape, bv.shape);
  Tensor out(av.shape, av.data);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] = std::min(av.data[i], bv.data[i]);
  const auto ia = a.index, ib = b.index;
  return push(std::move(out), {ia, ib}, [ia, ib](Tape& tp, Node& self) {
    const auto& x = tp.nodes_[ia].value.data;
    const auto& y = tp.nodes_[ib].value.data;
    // ties route the gradient to the first operand
    if (tp.nodes_[ia].requires_grad) {
      auto& g = tp.grad_buffer(ia);
      for (std::size_t i = 0; i < g.size(); ++i)
        if (x[i] <= y[i]) g[i] += self.grad[i];
    }
    if (tp.nodes_[ib].requires_grad) {
      auto& g = tp.grad_buffer(ib);
      for (std::size_t i = 0; i < g.size(); ++i)
        if (y[i] < x[i]) g[i] += self.grad[i];
    }
  });
}

Var Tape::concat(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no operands");
  const std::size_t m = value(parts[0]).rows();
  std::vector<std::size_t> widths, parents;
  std::size_t total = 0;
  for (auto p : parts) {
    const auto& v = value(p);
    require_2d("concat", v);
    if (v.rows() != m) shape_error("concat", value(parts[0]).shape, v.shape);
    widths.push_back(v.cols());
    parents.push_back(p.index);
    total += v.cols();
  }
  Tensor out = Tensor::zeros({m, total});
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& v = value(parts[k]);
    for (std::size_t i = 0; i < m; ++i)
      std::copy_n(v.data.begin() + i * widths[k], widths[k],
                  out.data.begin() + i * total + offset);
    offset += widths[k];
  }
  auto ps = parents;
  return push(std::move(out), std::move(parents),
              [ps, widths, m, total](Tape& tp, Node& self) {
                std::size_t off = 0;
                for (std::size_t k = 0; k < ps.size(); ++k) {
                  if (tp.nodes_[ps[k]].requires_grad) {
                    auto& g = tp.grad_buffer(ps[k]);
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t j = 0; j < widths[k]; ++j)
                        g[i * widths[k] + j] += self.grad[i * total + off + j];
                  }
                  off += widths[k];
                }
              });
}

Var Tape::concat(Var a, Var b) {
  const Var parts[] = {a, b};
  return concat(std::span<const Var>(parts));
}

Var Tape::gather_rows(Var a, std::span<const std::size_t> rows) {
  const auto& av = value(a);
  require_2d("gather_rows", av);
  const std::size_t m = av.rows(), n = av.cols();
  Tensor out = Tensor::zeros({rows.size(), n});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= m) {
      throw std::invalid_argument("gather_rows: row " + std::to_string(rows[r]) +
                                  " out of range for shape " + shape_str(av.shape));
    }
    std::copy_n(av.data.begin() + rows[r] * n, n, out.data.begin() + r * n);
  }
  const auto ia = a.index;
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return push(std::move(out), {ia}, [ia, idx, n](Tape& tp, Node& self) {
    auto& g = tp.grad_buffer(ia);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t j = 0; j < n; ++j) g[idx[r] * n + j] += self.grad[r * n + j];
  });
}

void Tape::backward(Var loss, ParamStore& store) {
  ParamStore* stores[] = {&store};
  backward(loss, std::span<ParamStore* const>(stores));
}

void Tape::backward(Var loss, std::span<ParamStore* const> stores) {
  if (loss.index >= nodes_.size()) throw std::invalid_argument("backward: unknown node");
  if (node(loss).value.numel() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                shape_str(node(loss).value.shape));
  }
  for (auto& n : nodes_) n.grad.clear();
  if (node(loss).requires_grad) {
    grad_buffer(loss.index)[0] = 1.0;
    for (std::size_t i = loss.index + 1; i-- > 0;) {
      auto& n = nodes_[i];
      if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
      n.backward(*this, n);
    }
  }
  for (ParamStore* store : stores) {
    for (auto& [name, entry] : store->entries()) {
      if (entry.trainable) entry.tensor.grad.emplace(entry.tensor.numel(), 0.0);
    }
    for (const auto& n : nodes_) {
      if (n.store != store || !n.requires_grad || n.grad.empty()) continue;
      auto& entry = store->entries().at(n.param_name);
      if (!entry.trainable) continue;
      auto& g = *entry.tensor.grad;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
  }
}

}  // namespace hero::ad
