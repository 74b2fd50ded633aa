#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace volgraph::ad {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

/// Dense row-major tensor of doubles. Rank 0 (scalar), 1 or 2.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor scalar(double v);
    static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    static Tensor from_matrix(const Eigen::MatrixXd& m);

    [[nodiscard]] const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t rank() const noexcept { return shape_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    /// Rows/cols of the 2-D view (rank 1 is a row vector, rank 0 is 1x1).
    [[nodiscard]] std::size_t rows() const noexcept;
    [[nodiscard]] std::size_t cols() const noexcept;

    [[nodiscard]] double* data() noexcept { return data_.data(); }
    [[nodiscard]] const double* data() const noexcept { return data_.data(); }
    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols() + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols() + c]; }

    [[nodiscard]] MatrixMap mat() noexcept;
    [[nodiscard]] ConstMatrixMap mat() const noexcept;
    [[nodiscard]] Eigen::MatrixXd to_matrix() const;
    [[nodiscard]] double item() const;

    [[nodiscard]] bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }
    [[nodiscard]] std::string shape_string() const;
    [[nodiscard]] bool all_finite() const noexcept;
    void fill(double v) noexcept;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// Trainable tensor with its accumulated gradient.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;
    bool trainable = true;

    Parameter() = default;
    Parameter(std::string n, Tensor v);
    void zero_grad();
};

class Tape;

/// Handle to a node recorded on a tape.
class Var {
public:
    Var() = default;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    [[nodiscard]] const Tensor& value() const;
    [[nodiscard]] const Tensor& grad() const;
    [[nodiscard]] std::size_t id() const noexcept { return id_; }
    [[nodiscard]] Tape& tape() const noexcept { return *tape_; }
    [[nodiscard]] bool valid() const noexcept { return tape_ != nullptr; }

private:
    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Records operations in creation order (a topological order) and replays them in reverse.
///
/// A tape and its values form a single-threaded unit of work.
class Tape {
public:
    using BackwardFn = std::function<void(Tape&, std::size_t)>;

    Var constant(Tensor value);
    Var parameter(Parameter& p);

    /// Seeds d(loss)/d(loss) = 1 and accumulates into every Parameter reached.
    /// Repeated calls add to Parameter::grad; node gradients are reset on each call.
    void backward(const Var& loss);

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] const Tensor& value(std::size_t id) const { return nodes_[id].value; }
    [[nodiscard]] const Tensor& grad(std::size_t id) const { return nodes_[id].grad; }
    /// Gradient buffer of `id`, allocated as zeros on first use.
    Tensor& grad_buffer(std::size_t id);
    [[nodiscard]] bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
    /// Node ids in the order the most recent backward pass visited them.
    [[nodiscard]] const std::vector<std::size_t>& last_backward_order() const noexcept { return visit_order_; }

    /// Appends a node; `fn` propagates the node's gradient into its inputs.
    Var record(const char* op, Tensor value, std::vector<std::size_t> inputs, BackwardFn fn);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::vector<std::size_t> inputs;
        BackwardFn backward;
        Parameter* param = nullptr;
        bool requires_grad = false;
    };
    std::vector<Node> nodes_;
    std::vector<std::size_t> visit_order_;
};

// Elementwise and linear-algebra ops. Shapes must match exactly unless stated;
// there is no implicit broadcasting.
Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var mul_scalar(const Var& a, double s);
/// a (m x n) plus row vector b (1 x n) on every row.
Var add_bias(const Var& a, const Var& b);
Var relu(const Var& a);
Var leaky_relu(const Var& a, double slope = 0.2);
Var exp(const Var& a);
Var log(const Var& a);
Var square(const Var& a);
Var sum(const Var& a);
Var mean(const Var& a);
Var transpose(const Var& a);
Var concat(std::span<const Var> parts, std::size_t axis);
/// Rows [begin, begin + count) of a 2-D tensor.
Var slice_rows(const Var& a, std::size_t begin, std::size_t count);

/// Row softmax restricted to entries where `mask` is non-zero; masked entries are exactly 0.
/// `scores` is (B*N) x N and the N x N mask applies to each block of N rows.
Var masked_row_softmax(const Var& scores, const Eigen::MatrixXd& mask);

// Batched graph ops. Inputs stack B graphs of N nodes as (B*N) x d.

/// out_b = adj * x_b for every block, with a fixed N x N operator.
Var propagate(const Eigen::MatrixXd& adj, const Var& x);
/// out[b*N + i, j] = src[b*N + i] + dst[b*N + j]; src, dst are (B*N) x 1.
Var pairwise_sum(const Var& src, const Var& dst, std::size_t n);
/// out_b = left_b * right_b with left (B*N) x N and right (B*N) x d.
Var block_matmul(const Var& left, const Var& right, std::size_t n);

/// Central differences of `f` with respect to every coordinate of `p.value`.
Tensor finite_difference_gradient(const std::function<double()>& f, Parameter& p, double step = 1e-5);

}  // namespace volgraph::ad
