#ifndef EGODOA_AUTODIFF_HPP_
#define EGODOA_AUTODIFF_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace egodoa::ad {

// Reverse-mode accumulation over dense double matrices. Each op records
// its parents and a closure that pushes the node's gradient back to them;
// backward() replays closures in reverse creation order.
class Node {
 public:
  Eigen::MatrixXd val;
  Eigen::MatrixXd grad;
  bool requires_grad = false;
  std::uint64_t id = 0;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;

  void ensure_grad() {
    if (grad.size() == 0) grad = Eigen::MatrixXd::Zero(val.rows(), val.cols());
  }
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Eigen::MatrixXd v, bool requires_grad = false);
  explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  bool defined() const { return node_ != nullptr; }
  const Eigen::MatrixXd& value() const { return node_->val; }
  Eigen::MatrixXd& value() { return node_->val; }
  const Eigen::MatrixXd& grad() const { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  long rows() const { return node_->val.rows(); }
  long cols() const { return node_->val.cols(); }

  void zero_grad() {
    node_->grad = Eigen::MatrixXd::Zero(node_->val.rows(), node_->val.cols());
  }

  std::shared_ptr<Node> node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// A leaf with requires_grad set; gradients accumulate across steps until
// zero_grad().
Tensor parameter(Eigen::MatrixXd v);
Tensor constant(Eigen::MatrixXd v);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor add_rowvec(const Tensor& a, const Tensor& row);  // broadcast over rows
Tensor scale(const Tensor& a, double s);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softmax_rows(const Tensor& a);
Tensor layernorm_rows(const Tensor& a, const Tensor& gain, const Tensor& bias,
                      double eps = 1e-5);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor slice_rows(const Tensor& a, int start, int count);
Tensor slice_cols(const Tensor& a, int start, int count);
Tensor reshape(const Tensor& a, int rows, int cols);  // row-major order
Tensor upsample_bilinear_2x(const Tensor& a);
Tensor sum_sq_diff(const Tensor& a, const Tensor& b);  // 1x1 scalar
Tensor binary_cross_entropy(const Tensor& prob, double label);  // prob is 1x1

// Seeds the root gradient with 1 (root must be 1x1) and propagates.
void backward(const Tensor& root);

}  // namespace egodoa::ad

#endif  // EGODOA_AUTODIFF_HPP_
