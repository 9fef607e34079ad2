#include "egodoa/autodiff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace egodoa::ad {

namespace {

std::atomic<std::uint64_t> g_next_id{1};

std::shared_ptr<Node> make_node(Eigen::MatrixXd v, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->val = std::move(v);
  n->requires_grad = requires_grad;
  n->id = g_next_id.fetch_add(1);
  return n;
}

bool track(const Tensor& t) { return t.node()->requires_grad; }

Tensor from_op(Eigen::MatrixXd v, std::vector<Tensor> parents,
               std::function<void(Node&)> backprop) {
  bool rg = false;
  for (const auto& p : parents) rg = rg || track(p);
  auto n = make_node(std::move(v), rg);
  if (rg) {
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backprop = std::move(backprop);
  }
  return Tensor(std::move(n));
}

void accum(Node& parent, const Eigen::MatrixXd& g) {
  if (!parent.requires_grad) return;
  parent.ensure_grad();
  parent.grad += g;
}

}  // namespace

Tensor::Tensor(Eigen::MatrixXd v, bool requires_grad)
    : node_(make_node(std::move(v), requires_grad)) {}

Tensor parameter(Eigen::MatrixXd v) { return Tensor(std::move(v), true); }
Tensor constant(Eigen::MatrixXd v) { return Tensor(std::move(v), false); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  return from_op(a.value() * b.value(), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) accum(pa, n.grad * pb.val.transpose());
    if (pb.requires_grad) accum(pb, pa.val.transpose() * n.grad);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("add: shape mismatch");
  }
  return from_op(a.value() + b.value(), {a, b}, [](Node& n) {
    accum(*n.parents[0], n.grad);
    accum(*n.parents[1], n.grad);
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("sub: shape mismatch");
  }
  return from_op(a.value() - b.value(), {a, b}, [](Node& n) {
    accum(*n.parents[0], n.grad);
    accum(*n.parents[1], -n.grad);
  });
}

Tensor add_rowvec(const Tensor& a, const Tensor& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw std::invalid_argument("add_rowvec: bad row vector shape");
  }
  Eigen::MatrixXd v = a.value();
  v.rowwise() += row.value().row(0);
  return from_op(std::move(v), {a, row}, [](Node& n) {
    accum(*n.parents[0], n.grad);
    accum(*n.parents[1], n.grad.colwise().sum());
  });
}

Tensor scale(const Tensor& a, double s) {
  return from_op(a.value() * s, {a}, [s](Node& n) {
    accum(*n.parents[0], n.grad * s);
  });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("hadamard: shape mismatch");
  }
  return from_op(a.value().cwiseProduct(b.value()), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) accum(pa, n.grad.cwiseProduct(pb.val));
    if (pb.requires_grad) accum(pb, n.grad.cwiseProduct(pa.val));
  });
}

Tensor transpose(const Tensor& a) {
  return from_op(a.value().transpose(), {a}, [](Node& n) {
    accum(*n.parents[0], n.grad.transpose());
  });
}

Tensor relu(const Tensor& a) {
  return from_op(a.value().cwiseMax(0.0), {a}, [](Node& n) {
    Node& pa = *n.parents[0];
    Eigen::MatrixXd mask =
        (pa.val.array() > 0.0).cast<double>().matrix();
    accum(pa, n.grad.cwiseProduct(mask));
  });
}

Tensor sigmoid(const Tensor& a) {
  Eigen::MatrixXd y =
      (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  return from_op(y, {a}, [](Node& n) {
    Eigen::MatrixXd d = n.val.array() * (1.0 - n.val.array());
    accum(*n.parents[0], n.grad.cwiseProduct(d));
  });
}

Tensor softmax_rows(const Tensor& a) {
  Eigen::MatrixXd y = a.value();
  for (long r = 0; r < y.rows(); ++r) {
    const double m = y.row(r).maxCoeff();
    y.row(r) = (y.row(r).array() - m).exp();
    y.row(r) /= y.row(r).sum();
  }
  return from_op(std::move(y), {a}, [](Node& n) {
    Eigen::MatrixXd dx(n.val.rows(), n.val.cols());
    for (long r = 0; r < n.val.rows(); ++r) {
      const double dot = n.grad.row(r).dot(n.val.row(r));
      dx.row(r) = n.val.row(r).cwiseProduct(
          (n.grad.row(r).array() - dot).matrix());
    }
    accum(*n.parents[0], dx);
  });
}

Tensor layernorm_rows(const Tensor& a, const Tensor& gain, const Tensor& bias,
                      double eps) {
  if (gain.rows() != 1 || gain.cols() != a.cols() || bias.rows() != 1 ||
      bias.cols() != a.cols()) {
    throw std::invalid_argument("layernorm_rows: gain/bias shape mismatch");
  }
  const long rows = a.rows(), cols = a.cols();
  Eigen::MatrixXd xhat(rows, cols);
  Eigen::VectorXd inv_std(rows);
  for (long r = 0; r < rows; ++r) {
    const double mu = a.value().row(r).mean();
    const Eigen::RowVectorXd centered =
        a.value().row(r).array() - mu;
    const double var = centered.squaredNorm() / cols;
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = centered * inv_std(r);
  }
  Eigen::MatrixXd y = xhat;
  y.array().rowwise() *= gain.value().row(0).array();
  y.rowwise() += bias.value().row(0);

  return from_op(std::move(y), {a, gain, bias},
                 [xhat, inv_std](Node& n) {
                   Node& pa = *n.parents[0];
                   Node& pg = *n.parents[1];
                   Node& pb = *n.parents[2];
                   const long rows = xhat.rows(), cols = xhat.cols();
                   if (pg.requires_grad) {
                     accum(pg, n.grad.cwiseProduct(xhat).colwise().sum());
                   }
                   if (pb.requires_grad) accum(pb, n.grad.colwise().sum());
                   if (pa.requires_grad) {
                     Eigen::MatrixXd dx(rows, cols);
                     for (long r = 0; r < rows; ++r) {
                       const Eigen::RowVectorXd dxhat =
                           n.grad.row(r).cwiseProduct(pg.val.row(0));
                       const double m1 = dxhat.mean();
                       const double m2 =
                           dxhat.cwiseProduct(xhat.row(r)).mean();
                       dx.row(r) =
                           inv_std(r) *
                           (dxhat.array() - m1 - xhat.row(r).array() * m2);
                     }
                     accum(pa, dx);
                   }
                 });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: empty");
  long rows = 0;
  const long cols = parts[0].cols();
  for (const auto& p : parts) {
    if (p.cols() != cols) throw std::invalid_argument("concat_rows: col mismatch");
    rows += p.rows();
  }
  Eigen::MatrixXd v(rows, cols);
  long at = 0;
  for (const auto& p : parts) {
    v.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return from_op(std::move(v), parts, [](Node& n) {
    long at = 0;
    for (auto& p : n.parents) {
      accum(*p, n.grad.middleRows(at, p->val.rows()));
      at += p->val.rows();
    }
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
  long cols = 0;
  const long rows = parts[0].rows();
  for (const auto& p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += p.cols();
  }
  Eigen::MatrixXd v(rows, cols);
  long at = 0;
  for (const auto& p : parts) {
    v.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return from_op(std::move(v), parts, [](Node& n) {
    long at = 0;
    for (auto& p : n.parents) {
      accum(*p, n.grad.middleCols(at, p->val.cols()));
      at += p->val.cols();
    }
  });
}

Tensor slice_rows(const Tensor& a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw std::invalid_argument("slice_rows: range out of bounds");
  }
  return from_op(a.value().middleRows(start, count), {a},
                 [start, count](Node& n) {
                   Node& pa = *n.parents[0];
                   if (pa.requires_grad) {
                     pa.ensure_grad();
                     pa.grad.middleRows(start, count) += n.grad;
                   }
                 });
}

Tensor slice_cols(const Tensor& a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw std::invalid_argument("slice_cols: range out of bounds");
  }
  return from_op(a.value().middleCols(start, count), {a},
                 [start, count](Node& n) {
                   Node& pa = *n.parents[0];
                   if (pa.requires_grad) {
                     pa.ensure_grad();
                     pa.grad.middleCols(start, count) += n.grad;
                   }
                 });
}

Tensor reshape(const Tensor& a, int rows, int cols) {
  if (static_cast<long>(rows) * cols != a.rows() * a.cols()) {
    throw std::invalid_argument("reshape: element count mismatch");
  }
  const long in_cols = a.cols();
  Eigen::MatrixXd v(rows, cols);
  for (long k = 0; k < v.size(); ++k) {
    v(k / cols, k % cols) = a.value()(k / in_cols, k % in_cols);
  }
  return from_op(std::move(v), {a}, [in_cols](Node& n) {
    Node& pa = *n.parents[0];
    Eigen::MatrixXd g(pa.val.rows(), pa.val.cols());
    const long cols = n.val.cols();
    for (long k = 0; k < g.size(); ++k) {
      g(k / in_cols, k % in_cols) = n.grad(k / cols, k % cols);
    }
    accum(pa, g);
  });
}

namespace {

struct Bilinear {
  int i0, i1;
  double w0, w1;
};

Bilinear axis_weights(int out_idx, int in_len) {
  // Center-aligned 2x upsampling with edge clamping.
  const double src = (out_idx + 0.5) / 2.0 - 0.5;
  const double lo = std::floor(src);
  Bilinear b;
  b.i0 = std::clamp(static_cast<int>(lo), 0, in_len - 1);
  b.i1 = std::clamp(static_cast<int>(lo) + 1, 0, in_len - 1);
  b.w1 = src - lo;
  b.w0 = 1.0 - b.w1;
  return b;
}

}  // namespace

Tensor upsample_bilinear_2x(const Tensor& a) {
  const int h = static_cast<int>(a.rows());
  const int w = static_cast<int>(a.cols());
  Eigen::MatrixXd v(2 * h, 2 * w);
  for (int i = 0; i < 2 * h; ++i) {
    const Bilinear bi = axis_weights(i, h);
    for (int j = 0; j < 2 * w; ++j) {
      const Bilinear bj = axis_weights(j, w);
      v(i, j) = bi.w0 * (bj.w0 * a.value()(bi.i0, bj.i0) +
                         bj.w1 * a.value()(bi.i0, bj.i1)) +
                bi.w1 * (bj.w0 * a.value()(bi.i1, bj.i0) +
                         bj.w1 * a.value()(bi.i1, bj.i1));
    }
  }
  return from_op(std::move(v), {a}, [h, w](Node& n) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(h, w);
    for (int i = 0; i < 2 * h; ++i) {
      const Bilinear bi = axis_weights(i, h);
      for (int j = 0; j < 2 * w; ++j) {
        const Bilinear bj = axis_weights(j, w);
        const double d = n.grad(i, j);
        g(bi.i0, bj.i0) += bi.w0 * bj.w0 * d;
        g(bi.i0, bj.i1) += bi.w0 * bj.w1 * d;
        g(bi.i1, bj.i0) += bi.w1 * bj.w0 * d;
        g(bi.i1, bj.i1) += bi.w1 * bj.w1 * d;
      }
    }
    accum(*n.parents[0], g);
  });
}

Tensor sum_sq_diff(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("sum_sq_diff: shape mismatch");
  }
  Eigen::MatrixXd v(1, 1);
  v(0, 0) = (a.value() - b.value()).squaredNorm();
  return from_op(std::move(v), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    const double g = n.grad(0, 0);
    Eigen::MatrixXd d = 2.0 * g * (pa.val - pb.val);
    if (pa.requires_grad) accum(pa, d);
    if (pb.requires_grad) accum(pb, -d);
  });
}

Tensor binary_cross_entropy(const Tensor& prob, double label) {
  if (prob.rows() != 1 || prob.cols() != 1) {
    throw std::invalid_argument("binary_cross_entropy: expects 1x1 probability");
  }
  const double eps = 1e-12;
  const double p = std::clamp(prob.value()(0, 0), eps, 1.0 - eps);
  Eigen::MatrixXd v(1, 1);
  v(0, 0) = -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
  return from_op(std::move(v), {prob}, [label, eps](Node& n) {
    const double p = std::clamp(n.parents[0]->val(0, 0), eps, 1.0 - eps);
    Eigen::MatrixXd d(1, 1);
    d(0, 0) = n.grad(0, 0) * (-(label / p) + (1.0 - label) / (1.0 - p));
    accum(*n.parents[0], d);
  });
}

void backward(const Tensor& root) {
  if (root.rows() != 1 || root.cols() != 1) {
    throw std::invalid_argument("backward: root must be a 1x1 scalar");
  }
  auto r = root.node();
  if (!r->requires_grad) return;
  r->ensure_grad();
  r->grad(0, 0) += 1.0;

  // Parents are always created before children, so descending creation id
  // is a valid reverse topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{r.get()};
  seen.insert(r.get());
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (auto& p : n->parents) {
      if (p->requires_grad && seen.insert(p.get()).second) {
        stack.push_back(p.get());
      }
    }
  }
  std::sort(order.begin(), order.end(),
            [](Node* a, Node* b) { return a->id > b->id; });
  for (Node* n : order) {
    if (n->backprop && n->grad.size() != 0) {
      n->ensure_grad();
      n->backprop(*n);
    }
  }
}

}  // namespace egodoa::ad
