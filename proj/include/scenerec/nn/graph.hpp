// Copyright 2026 the scenerec authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal dense tape autodiff on Eigen row-major matrices. Nodes are
// appended in topological order; backward walks the tape in reverse and
// accumulates exact gradients. The op set is closed: just what the models
// in this project need.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "scenerec/common.hpp"
#include "scenerec/rng.hpp"

namespace scenerec::nn {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Named parameter tensors with Adam moment buffers. Values persist across
// graphs; graphs borrow them through leaf nodes and accumulate into `grad`.
template <class S>
struct ParamStore {
  struct Entry {
    Mat<S> value;
    Mat<S> grad;
    Mat<S> m;
    Mat<S> v;
  };
  std::map<std::string, Entry> entries;
  int64_t step = 0;

  Entry& add(const std::string& name, Mat<S> value) {
    require(!entries.count(name), "param store: duplicate name " + name);
    Entry e;
    e.grad = Mat<S>::Zero(value.rows(), value.cols());
    e.m = Mat<S>::Zero(value.rows(), value.cols());
    e.v = Mat<S>::Zero(value.rows(), value.cols());
    e.value = std::move(value);
    return entries.emplace(name, std::move(e)).first->second;
  }

  Entry& at(const std::string& name) {
    auto it = entries.find(name);
    require(it != entries.end(), "param store: unknown name " + name);
    return it->second;
  }
  const Entry& at(const std::string& name) const {
    auto it = entries.find(name);
    require(it != entries.end(), "param store: unknown name " + name);
    return it->second;
  }

  // Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)); applies to weight matrices and
  // embedding tables alike, special rows included.
  Entry& add_uniform(const std::string& name, int rows, int cols, int fan_in, Rng& rng) {
    Mat<S> value(rows, cols);
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) value(i, j) = static_cast<S>(rng.uniform(-bound, bound));
    return add(name, std::move(value));
  }

  Entry& add_zeros(const std::string& name, int rows, int cols) {
    return add(name, Mat<S>::Zero(rows, cols));
  }
  Entry& add_ones(const std::string& name, int rows, int cols) {
    return add(name, Mat<S>::Ones(rows, cols));
  }

  void zero_grads() {
    for (auto& [name, e] : entries) e.grad.setZero();
  }
};

template <class S>
class Graph;

template <class S>
struct Tensor {
  Graph<S>* g = nullptr;
  int id = -1;

  bool valid() const { return g != nullptr && id >= 0; }
  const Mat<S>& value() const;
  const Mat<S>& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  S scalar() const {
    require(rows() == 1 && cols() == 1, "tensor is not scalar");
    return value()(0, 0);
  }
};

template <class S>
class Graph {
 public:
  explicit Graph(bool checked = false) : checked_(checked) {}

  bool checked() const { return checked_; }

  Tensor<S> leaf(Mat<S> value, bool needs_grad = false) {
    check_values(value);
    return make(std::move(value), needs_grad, {});
  }

  Tensor<S> constant(Mat<S> value) { return leaf(std::move(value), false); }

  Tensor<S> scalar_constant(S v) {
    Mat<S> m(1, 1);
    m(0, 0) = v;
    return constant(std::move(m));
  }

  // One leaf per parameter per graph; backward adds into the store's grad.
  Tensor<S> param(ParamStore<S>& store, const std::string& name) {
    auto key = std::make_pair(&store, name);
    auto it = param_cache_.find(key);
    if (it != param_cache_.end()) return {this, it->second};
    typename ParamStore<S>::Entry* entry = &store.at(name);
    Tensor<S> t = make(entry->value, true, [entry](Graph& g, int id) {
      entry->grad += g.nodes_[static_cast<size_t>(id)].grad;
    });
    param_cache_.emplace(key, t.id);
    return t;
  }

  const Mat<S>& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Mat<S>& grad(int id) const {
    const Node& n = nodes_[static_cast<size_t>(id)];
    require(n.grad.size() > 0, "gradient not computed for this node");
    return n.grad;
  }

  bool has_grad(int id) const { return nodes_[static_cast<size_t>(id)].grad.size() > 0; }

  // Reverse pass from a scalar loss; `upstream` seeds d(total)/d(loss) so
  // callers can accumulate scaled contributions across graphs.
  void backward(Tensor<S> loss, S upstream = S(1)) {
    require(loss.g == this, "backward: tensor belongs to another graph");
    const Mat<S>& lv = value(loss.id);
    require(lv.rows() == 1 && lv.cols() == 1, "backward: loss must be a scalar");
    grad_buf(loss.id)(0, 0) += upstream;
    for (int i = loss.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<size_t>(i)];
      if (n.grad.size() == 0 || !n.back) continue;
      n.back(*this, i);
    }
  }

  Mat<S>& grad_buf(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.size() == 0) n.grad = Mat<S>::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  size_t size() const { return nodes_.size(); }

  // --- op building blocks (used by the free functions below) ---

  using BackFn = std::function<void(Graph&, int)>;

  Tensor<S> make(Mat<S> value, bool needs_grad, BackFn back) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    if (needs_grad) n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return {this, static_cast<int>(nodes_.size()) - 1};
  }

  void check_values(const Mat<S>& m) const {
    if (!checked_) return;
    require(m.allFinite(), "checked mode: non-finite values in tensor");
  }

 private:
  struct Node {
    Mat<S> value;
    Mat<S> grad;
    bool needs_grad = false;
    BackFn back;
  };

  std::vector<Node> nodes_;
  std::map<std::pair<void*, std::string>, int> param_cache_;
  bool checked_ = false;

  template <class T>
  friend struct Tensor;
};

template <class S>
const Mat<S>& Tensor<S>::value() const {
  return g->value(id);
}
template <class S>
const Mat<S>& Tensor<S>::grad() const {
  return g->grad(id);
}

namespace detail {

template <class S>
bool wants_grad(const Graph<S>& g, std::initializer_list<Tensor<S>> parents) {
  for (const auto& p : parents) {
    (void)g;
    if (p.g->has_needs_grad(p.id)) return true;
  }
  return false;
}

}  // namespace detail

// needs_grad lookup helper; kept on Graph for friend access.
template <class S>
inline bool tensor_needs_grad(const Tensor<S>& t);

// --- elementwise / structural ops ---

template <class S>
Tensor<S> add(Tensor<S> a, Tensor<S> b) {
  Graph<S>& g = *a.g;
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
  Mat<S> v = a.value() + b.value();
  g.check_values(v);
  int ia = a.id, ib = b.id;
  return g.make(std::move(v), true, [ia, ib](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    g.grad_buf(ia) += go;
    g.grad_buf(ib) += go;
  });
}

template <class S>
Tensor<S> sub(Tensor<S> a, Tensor<S> b) {
  Graph<S>& g = *a.g;
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub: shape mismatch");
  Mat<S> v = a.value() - b.value();
  int ia = a.id, ib = b.id;
  return g.make(std::move(v), true, [ia, ib](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    g.grad_buf(ia) += go;
    g.grad_buf(ib) -= go;
  });
}

// Hadamard product.
template <class S>
Tensor<S> cmul(Tensor<S> a, Tensor<S> b) {
  Graph<S>& g = *a.g;
  require(a.rows() == b.rows() && a.cols() == b.cols(), "cmul: shape mismatch");
  Mat<S> v = a.value().cwiseProduct(b.value());
  int ia = a.id, ib = b.id;
  return g.make(std::move(v), true, [ia, ib](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    g.grad_buf(ia) += go.cwiseProduct(g.value(ib));
    g.grad_buf(ib) += go.cwiseProduct(g.value(ia));
  });
}

template <class S>
Tensor<S> scale(Tensor<S> a, S c) {
  Graph<S>& g = *a.g;
  Mat<S> v = a.value() * c;
  int ia = a.id;
  return g.make(std::move(v), true,
                [ia, c](Graph<S>& g, int id) { g.grad_buf(ia) += g.grad(id) * c; });
}

template <class S>
Tensor<S> matmul(Tensor<S> a, Tensor<S> b) {
  Graph<S>& g = *a.g;
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Mat<S> v = a.value() * b.value();
  g.check_values(v);
  int ia = a.id, ib = b.id;
  return g.make(std::move(v), true, [ia, ib](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    g.grad_buf(ia) += go * g.value(ib).transpose();
    g.grad_buf(ib) += g.value(ia).transpose() * go;
  });
}

// a * b^T without materializing the transpose node.
template <class S>
Tensor<S> matmul_nt(Tensor<S> a, Tensor<S> b) {
  Graph<S>& g = *a.g;
  require(a.cols() == b.cols(), "matmul_nt: column dimensions differ");
  Mat<S> v = a.value() * b.value().transpose();
  int ia = a.id, ib = b.id;
  return g.make(std::move(v), true, [ia, ib](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    g.grad_buf(ia) += go * g.value(ib);
    g.grad_buf(ib) += go.transpose() * g.value(ia);
  });
}

// Adds a 1 x m row vector to every row of an n x m matrix.
template <class S>
Tensor<S> add_rowvec(Tensor<S> x, Tensor<S> row) {
  Graph<S>& g = *x.g;
  require(row.rows() == 1 && row.cols() == x.cols(), "add_rowvec: bias shape mismatch");
  Mat<S> v = x.value().rowwise() + row.value().row(0);
  int ix = x.id, ir = row.id;
  return g.make(std::move(v), true, [ix, ir](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    g.grad_buf(ix) += go;
    g.grad_buf(ir).row(0) += go.colwise().sum();
  });
}

template <class S>
Tensor<S> slice_rows(Tensor<S> x, int first, int count) {
  Graph<S>& g = *x.g;
  require(first >= 0 && count >= 1 && first + count <= x.rows(), "slice_rows: out of range");
  Mat<S> v = x.value().middleRows(first, count);
  int ix = x.id;
  return g.make(std::move(v), true, [ix, first, count](Graph<S>& g, int id) {
    g.grad_buf(ix).middleRows(first, count) += g.grad(id);
  });
}

template <class S>
Tensor<S> slice_cols(Tensor<S> x, int first, int count) {
  Graph<S>& g = *x.g;
  require(first >= 0 && count >= 1 && first + count <= x.cols(), "slice_cols: out of range");
  Mat<S> v = x.value().middleCols(first, count);
  int ix = x.id;
  return g.make(std::move(v), true, [ix, first, count](Graph<S>& g, int id) {
    g.grad_buf(ix).middleCols(first, count) += g.grad(id);
  });
}

template <class S>
Tensor<S> concat_rows(const std::vector<Tensor<S>>& parts) {
  require(!parts.empty(), "concat_rows: no parts");
  Graph<S>& g = *parts[0].g;
  Eigen::Index cols = parts[0].cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    require(p.cols() == cols, "concat_rows: column mismatch");
    rows += p.rows();
  }
  Mat<S> v(rows, cols);
  std::vector<int> ids;
  std::vector<int> offsets;
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    v.middleRows(off, p.rows()) = p.value();
    ids.push_back(p.id);
    offsets.push_back(static_cast<int>(off));
    off += p.rows();
  }
  return g.make(std::move(v), true, [ids, offsets](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    for (size_t i = 0; i < ids.size(); ++i) {
      Mat<S>& gb = g.grad_buf(ids[i]);
      gb += go.middleRows(offsets[i], gb.rows());
    }
  });
}

template <class S>
Tensor<S> concat_cols(const std::vector<Tensor<S>>& parts) {
  require(!parts.empty(), "concat_cols: no parts");
  Graph<S>& g = *parts[0].g;
  Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    require(p.rows() == rows, "concat_cols: row mismatch");
    cols += p.cols();
  }
  Mat<S> v(rows, cols);
  std::vector<int> ids;
  std::vector<int> offsets;
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    v.middleCols(off, p.cols()) = p.value();
    ids.push_back(p.id);
    offsets.push_back(static_cast<int>(off));
    off += p.cols();
  }
  return g.make(std::move(v), true, [ids, offsets](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    for (size_t i = 0; i < ids.size(); ++i) {
      Mat<S>& gb = g.grad_buf(ids[i]);
      gb += go.middleCols(offsets[i], gb.cols());
    }
  });
}

// --- nonlinearities ---

template <class S>
Tensor<S> gelu(Tensor<S> x) {
  Graph<S>& g = *x.g;
  const Mat<S>& xv = x.value();
  Mat<S> v = xv.unaryExpr([](S t) {
    return static_cast<S>(0.5 * static_cast<double>(t) *
                          (1.0 + std::erf(static_cast<double>(t) / std::sqrt(2.0))));
  });
  int ix = x.id;
  return g.make(std::move(v), true, [ix](Graph<S>& g, int id) {
    const Mat<S>& xv = g.value(ix);
    Mat<S> d = xv.unaryExpr([](S t) {
      double td = static_cast<double>(t);
      double phi = 0.5 * (1.0 + std::erf(td / std::sqrt(2.0)));
      double pdf = std::exp(-0.5 * td * td) / std::sqrt(2.0 * M_PI);
      return static_cast<S>(phi + td * pdf);
    });
    g.grad_buf(ix) += g.grad(id).cwiseProduct(d);
  });
}

template <class S>
Tensor<S> sigmoid(Tensor<S> x) {
  Graph<S>& g = *x.g;
  Mat<S> v = x.value().unaryExpr(
      [](S t) { return static_cast<S>(1.0 / (1.0 + std::exp(-static_cast<double>(t)))); });
  int ix = x.id;
  Mat<S> cached = v;
  return g.make(std::move(v), true, [ix, cached](Graph<S>& g, int id) {
    Mat<S> d = cached.cwiseProduct(Mat<S>::Ones(cached.rows(), cached.cols()) - cached);
    g.grad_buf(ix) += g.grad(id).cwiseProduct(d);
  });
}

template <class S>
Tensor<S> softmax_rows(Tensor<S> x) {
  Graph<S>& g = *x.g;
  const Mat<S>& xv = x.value();
  Mat<S> v(xv.rows(), xv.cols());
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    S mx = xv.row(i).maxCoeff();
    Eigen::Array<S, 1, Eigen::Dynamic> e = (xv.row(i).array() - mx).exp();
    v.row(i) = e / e.sum();
  }
  int ix = x.id;
  Mat<S> cached = v;
  return g.make(std::move(v), true, [ix, cached](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    Mat<S>& gx = g.grad_buf(ix);
    for (Eigen::Index i = 0; i < cached.rows(); ++i) {
      S dot = go.row(i).dot(cached.row(i));
      gx.row(i) += cached.row(i).cwiseProduct(
          go.row(i) - Eigen::Matrix<S, 1, Eigen::Dynamic>::Constant(cached.cols(), dot));
    }
  });
}

// Row-wise layer normalization with learned gain/bias (1 x m each).
template <class S>
Tensor<S> layernorm_rows(Tensor<S> x, Tensor<S> gain, Tensor<S> bias, S eps = S(1e-5)) {
  Graph<S>& g = *x.g;
  require(gain.rows() == 1 && gain.cols() == x.cols(), "layernorm: gain shape mismatch");
  require(bias.rows() == 1 && bias.cols() == x.cols(), "layernorm: bias shape mismatch");
  const Mat<S>& xv = x.value();
  Eigen::Index n = xv.rows(), m = xv.cols();
  Mat<S> xhat(n, m);
  Eigen::Matrix<S, Eigen::Dynamic, 1> inv_sd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    S mu = xv.row(i).mean();
    Eigen::Array<S, 1, Eigen::Dynamic> c = xv.row(i).array() - mu;
    S var = (c * c).mean();
    S isd = S(1) / std::sqrt(var + eps);
    inv_sd(i) = isd;
    xhat.row(i) = (c * isd).matrix();
  }
  Mat<S> v = (xhat.array().rowwise() * gain.value().row(0).array()).matrix();
  v.rowwise() += bias.value().row(0);
  int ix = x.id, igain = gain.id, ibias = bias.id;
  return g.make(std::move(v), true, [ix, igain, ibias, xhat, inv_sd](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    const Mat<S>& gainv = g.value(igain);
    Eigen::Index n = go.rows(), m = go.cols();
    Mat<S>& gx = g.grad_buf(ix);
    Mat<S>& ggain = g.grad_buf(igain);
    Mat<S>& gbias = g.grad_buf(ibias);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Array<S, 1, Eigen::Dynamic> dxhat =
          go.row(i).array() * gainv.row(0).array();
      S mean_dxhat = dxhat.mean();
      S mean_dxhat_xhat = (dxhat * xhat.row(i).array()).mean();
      gx.row(i) += (inv_sd(i) *
                    (dxhat - mean_dxhat - xhat.row(i).array() * mean_dxhat_xhat))
                       .matrix();
      (void)m;
    }
    ggain.row(0) += (go.array() * xhat.array()).colwise().sum().matrix();
    gbias.row(0) += go.colwise().sum();
  });
}

// Rows of `table` gathered by ids; backward scatter-adds.
template <class S>
Tensor<S> embed_rows(Tensor<S> table, const std::vector<int>& ids) {
  Graph<S>& g = *table.g;
  require(!ids.empty(), "embed_rows: empty id list");
  Mat<S> v(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    require(ids[i] >= 0 && ids[i] < table.rows(), "embed_rows: id out of range");
    v.row(static_cast<Eigen::Index>(i)) = table.value().row(ids[i]);
  }
  int it = table.id;
  return g.make(std::move(v), true, [it, ids](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    Mat<S>& gt = g.grad_buf(it);
    for (size_t i = 0; i < ids.size(); ++i)
      gt.row(ids[i]) += go.row(static_cast<Eigen::Index>(i));
  });
}

// Rows normalized to unit L2 norm. Zero rows are a contract violation.
template <class S>
Tensor<S> l2_normalize_rows(Tensor<S> x) {
  Graph<S>& g = *x.g;
  const Mat<S>& xv = x.value();
  Eigen::Index n = xv.rows();
  Mat<S> v(n, xv.cols());
  Eigen::Matrix<S, Eigen::Dynamic, 1> inv_norm(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    S nrm = xv.row(i).norm();
    require(nrm > S(1e-30), "l2_normalize: zero-norm row");
    inv_norm(i) = S(1) / nrm;
    v.row(i) = xv.row(i) * inv_norm(i);
  }
  int ix = x.id;
  Mat<S> cached = v;
  return g.make(std::move(v), true, [ix, cached, inv_norm](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    Mat<S>& gx = g.grad_buf(ix);
    for (Eigen::Index i = 0; i < cached.rows(); ++i) {
      S dot = go.row(i).dot(cached.row(i));
      gx.row(i) += inv_norm(i) * (go.row(i) - cached.row(i) * dot);
    }
  });
}

template <class S>
Tensor<S> mean_rows(Tensor<S> x) {
  Graph<S>& g = *x.g;
  Mat<S> v = x.value().colwise().mean();
  int ix = x.id;
  return g.make(std::move(v), true, [ix](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    Mat<S>& gx = g.grad_buf(ix);
    gx.rowwise() += (go.row(0) / static_cast<S>(gx.rows()));
  });
}

template <class S>
Tensor<S> sum_all(Tensor<S> x) {
  Graph<S>& g = *x.g;
  Mat<S> v(1, 1);
  v(0, 0) = x.value().sum();
  int ix = x.id;
  return g.make(std::move(v), true, [ix](Graph<S>& g, int id) {
    S go = g.grad(id)(0, 0);
    Mat<S>& gx = g.grad_buf(ix);
    gx.array() += go;
  });
}

// --- losses ---

// Sum over rows with target >= 0 of (logsumexp(row) - row[target]).
// Rows with target -1 contribute no loss term at all.
template <class S>
Tensor<S> cross_entropy_sum(Tensor<S> logits, const std::vector<int>& targets) {
  Graph<S>& g = *logits.g;
  const Mat<S>& lv = logits.value();
  require(static_cast<Eigen::Index>(targets.size()) == lv.rows(),
          "cross_entropy: one target per row required");
  S total = S(0);
  for (Eigen::Index i = 0; i < lv.rows(); ++i) {
    int t = targets[static_cast<size_t>(i)];
    if (t < 0) continue;
    require(t < lv.cols(), "cross_entropy: target out of range");
    S mx = lv.row(i).maxCoeff();
    S lse = mx + std::log((lv.row(i).array() - mx).exp().sum());
    total += lse - lv(i, t);
  }
  Mat<S> v(1, 1);
  v(0, 0) = total;
  int il = logits.id;
  return g.make(std::move(v), true, [il, targets](Graph<S>& g, int id) {
    S go = g.grad(id)(0, 0);
    const Mat<S>& lv = g.value(il);
    Mat<S>& gl = g.grad_buf(il);
    for (Eigen::Index i = 0; i < lv.rows(); ++i) {
      int t = targets[static_cast<size_t>(i)];
      if (t < 0) continue;
      S mx = lv.row(i).maxCoeff();
      Eigen::Array<S, 1, Eigen::Dynamic> e = (lv.row(i).array() - mx).exp();
      Eigen::Array<S, 1, Eigen::Dynamic> p = e / e.sum();
      gl.row(i) += (p * go).matrix();
      gl(i, t) -= go;
    }
  });
}

// Numerically stable binary cross entropy with logits, summed over entries.
template <class S>
Tensor<S> bce_with_logits_sum(Tensor<S> logits, const std::vector<double>& labels) {
  Graph<S>& g = *logits.g;
  const Mat<S>& lv = logits.value();
  require(lv.cols() == 1 && static_cast<Eigen::Index>(labels.size()) == lv.rows(),
          "bce: logits must be n x 1 with one label per row");
  S total = S(0);
  for (Eigen::Index i = 0; i < lv.rows(); ++i) {
    double z = static_cast<double>(lv(i, 0));
    double y = labels[static_cast<size_t>(i)];
    total += static_cast<S>(std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z))));
  }
  Mat<S> v(1, 1);
  v(0, 0) = total;
  int il = logits.id;
  return g.make(std::move(v), true, [il, labels](Graph<S>& g, int id) {
    S go = g.grad(id)(0, 0);
    const Mat<S>& lv = g.value(il);
    Mat<S>& gl = g.grad_buf(il);
    for (Eigen::Index i = 0; i < lv.rows(); ++i) {
      double z = static_cast<double>(lv(i, 0));
      double y = labels[static_cast<size_t>(i)];
      double s = 1.0 / (1.0 + std::exp(-z));
      gl(i, 0) += go * static_cast<S>(s - y);
    }
  });
}

// --- attention ---

enum class AttnMode { kCausal, kBidirectional };

// Single-head scaled dot-product attention over one sequence.
// Rows at positions >= valid_len are padding: they produce zero output and
// receive zero attention weight, so padded and unpadded forwards agree
// exactly on the valid prefix. In causal mode position i attends to
// positions <= i only; the masked score entries are never computed, which
// makes future-position gradients exactly zero.
template <class S>
Tensor<S> attention_core(Tensor<S> q, Tensor<S> k, Tensor<S> v, AttnMode mode, int valid_len) {
  Graph<S>& g = *q.g;
  require(q.rows() == k.rows() && q.rows() == v.rows(), "attention: sequence length mismatch");
  require(q.cols() == k.cols(), "attention: q/k head dimension mismatch");
  require(valid_len >= 1 && valid_len <= q.rows(), "attention: valid_len out of range");
  const Mat<S>& qv = q.value();
  const Mat<S>& kv = k.value();
  const Mat<S>& vv = v.value();
  Eigen::Index L = qv.rows();
  S inv_sqrt_d = S(1) / std::sqrt(static_cast<S>(qv.cols()));

  Mat<S> weights = Mat<S>::Zero(L, L);  // only allowed entries filled
  Mat<S> out = Mat<S>::Zero(L, vv.cols());
  for (Eigen::Index i = 0; i < valid_len; ++i) {
    Eigen::Index allowed =
        mode == AttnMode::kCausal ? std::min<Eigen::Index>(i + 1, valid_len) : valid_len;
    Eigen::Array<S, 1, Eigen::Dynamic> scores =
        (qv.row(i) * kv.topRows(allowed).transpose()).array() * inv_sqrt_d;
    S mx = scores.maxCoeff();
    Eigen::Array<S, 1, Eigen::Dynamic> e = (scores - mx).exp();
    e /= e.sum();
    weights.row(i).head(allowed) = e.matrix();
    out.row(i) = weights.row(i).head(allowed) * vv.topRows(allowed);
  }
  int iq = q.id, ik = k.id, iv = v.id;
  return g.make(std::move(out), true,
                [iq, ik, iv, mode, valid_len, weights, inv_sqrt_d](Graph<S>& g, int id) {
    const Mat<S>& go = g.grad(id);
    const Mat<S>& qv = g.value(iq);
    const Mat<S>& kv = g.value(ik);
    const Mat<S>& vv = g.value(iv);
    Mat<S>& gq = g.grad_buf(iq);
    Mat<S>& gk = g.grad_buf(ik);
    Mat<S>& gv = g.grad_buf(iv);
    for (Eigen::Index i = 0; i < valid_len; ++i) {
      Eigen::Index allowed =
          mode == AttnMode::kCausal ? std::min<Eigen::Index>(i + 1, valid_len) : valid_len;
      auto p = weights.row(i).head(allowed);
      // dP = dO . V^T over the allowed range
      Eigen::Matrix<S, 1, Eigen::Dynamic> dp = go.row(i) * vv.topRows(allowed).transpose();
      S dot = dp.dot(p);
      Eigen::Matrix<S, 1, Eigen::Dynamic> ds =
          p.cwiseProduct(dp - Eigen::Matrix<S, 1, Eigen::Dynamic>::Constant(allowed, dot));
      gq.row(i) += ds * kv.topRows(allowed) * inv_sqrt_d;
      gk.topRows(allowed) += ds.transpose() * qv.row(i) * inv_sqrt_d;
      gv.topRows(allowed) += p.transpose() * go.row(i);
    }
  });
}

// --- optimizer ---

// Bias-corrected Adam over every entry of the store; grads are consumed
// (zeroed) by the call. Deterministic: entries update in name order.
template <class S>
void adam_step(ParamStore<S>& store, double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8) {
  require(!store.entries.empty(), "adam: empty parameter store");
  store.step += 1;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(store.step));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(store.step));
  for (auto& [name, e] : store.entries) {
    require(e.grad.rows() == e.value.rows() && e.grad.cols() == e.value.cols(),
            "adam: missing or misshapen gradient for " + name);
    e.m = S(beta1) * e.m + S(1.0 - beta1) * e.grad;
    e.v = S(beta2) * e.v + S(1.0 - beta2) * e.grad.cwiseProduct(e.grad).eval();
    Mat<S> mhat = e.m / S(bc1);
    Mat<S> vhat = e.v / S(bc2);
    e.value -=
        (S(lr) * mhat.array() / (vhat.array().sqrt() + S(eps))).matrix();
    e.grad.setZero();
  }
}

}  // namespace scenerec::nn
