#include "volgraph/tensor.hpp"

#include "volgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace volgraph::ad {

// ---------------------------------------------------------------- Tensor

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
    if (shape_.size() > 2) throw std::invalid_argument("tensors are limited to rank 2");
    data_.assign(product(shape_), fill);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.size() > 2) throw std::invalid_argument("tensors are limited to rank 2");
    if (data_.size() != product(shape_)) {
        throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                                    shape_string());
    }
}

Tensor Tensor::scalar(double v) { return Tensor({}, std::vector<double>{v}); }

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, double fill) { return Tensor({rows, cols}, fill); }

Tensor Tensor::from_matrix(const Eigen::MatrixXd& m) {
    Tensor t = matrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    t.mat() = m;
    return t;
}

std::size_t Tensor::rows() const noexcept { return shape_.size() == 2 ? shape_[0] : 1; }

std::size_t Tensor::cols() const noexcept {
    if (shape_.size() == 2) return shape_[1];
    if (shape_.size() == 1) return shape_[0];
    return 1;
}

MatrixMap Tensor::mat() noexcept {
    return {data_.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
}

ConstMatrixMap Tensor::mat() const noexcept {
    return {data_.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
}

Eigen::MatrixXd Tensor::to_matrix() const { return mat(); }

double Tensor::item() const {
    if (data_.size() != 1) throw std::invalid_argument("item() on tensor of shape " + shape_string());
    return data_[0];
}

std::string Tensor::shape_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape_.size(); ++i) os << (i ? "x" : "") << shape_[i];
    os << ']';
    return os.str();
}

bool Tensor::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) noexcept { std::fill(data_.begin(), data_.end(), v); }

Parameter::Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape(), 0.0) {}

void Parameter::zero_grad() {
    if (!grad.same_shape(value)) grad = Tensor(value.shape(), 0.0);
    grad.fill(0.0);
}

// ---------------------------------------------------------------- Tape

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }

Var Tape::constant(Tensor value) {
    if (!value.all_finite()) throw NumericalError("constant tensor contains non-finite values");
    Node node;
    node.value = std::move(value);
    nodes_.push_back(std::move(node));
    return {this, nodes_.size() - 1};
}

Var Tape::parameter(Parameter& p) {
    if (!p.value.all_finite()) throw NumericalError("parameter '" + p.name + "' contains non-finite values");
    Node node;
    node.value = p.value;
    node.param = &p;
    node.requires_grad = p.trainable;
    nodes_.push_back(std::move(node));
    return {this, nodes_.size() - 1};
}

Tensor& Tape::grad_buffer(std::size_t id) {
    Node& n = nodes_[id];
    if (n.grad.empty() && !n.value.empty()) n.grad = Tensor(n.value.shape(), 0.0);
    return n.grad;
}

Var Tape::record(const char* op, Tensor value, std::vector<std::size_t> inputs, BackwardFn fn) {
    if (!value.all_finite()) throw NumericalError(std::string(op) + " produced a non-finite value");
    Node node;
    node.value = std::move(value);
    node.requires_grad = std::any_of(inputs.begin(), inputs.end(), [&](std::size_t i) { return nodes_[i].requires_grad; });
    if (node.requires_grad) node.backward = std::move(fn);
    node.inputs = std::move(inputs);
    nodes_.push_back(std::move(node));
    return {this, nodes_.size() - 1};
}

void Tape::backward(const Var& loss) {
    if (loss.value().size() != 1) {
        throw std::invalid_argument("backward needs a scalar loss, got shape " + loss.value().shape_string());
    }
    for (auto& n : nodes_) n.grad = Tensor();
    visit_order_.clear();
    grad_buffer(loss.id())[0] = 1.0;
    for (std::size_t k = loss.id() + 1; k-- > 0;) {
        Node& n = nodes_[k];
        if (!n.requires_grad || n.grad.empty()) continue;
        visit_order_.push_back(k);
        if (n.param != nullptr) {
            if (!n.param->grad.same_shape(n.param->value)) n.param->zero_grad();
            n.param->grad.mat() += n.grad.mat();
        }
        if (n.backward) n.backward(*this, k);
    }
}

// ---------------------------------------------------------------- ops

namespace {

[[noreturn]] void shape_mismatch(const char* op, const Tensor& a, const Tensor& b) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " + b.shape_string());
}

void require_same_tape(const Var& a, const Var& b) {
    if (&a.tape() != &b.tape()) throw std::invalid_argument("operands live on different tapes");
}

template <typename F, typename G>
Var unary(const char* op, const Var& a, F forward, G derivative) {
    const Tensor& x = a.value();
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = forward(x[i]);
    const std::size_t ia = a.id();
    return a.tape().record(op, std::move(out), {ia}, [ia, derivative](Tape& t, std::size_t self) {
        if (!t.requires_grad(ia)) return;
        const Tensor& g = t.grad(self);
        const Tensor& x = t.value(ia);
        const Tensor& y = t.value(self);
        Tensor& gx = t.grad_buffer(ia);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * derivative(x[i], y[i]);
    });
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
    require_same_tape(a, b);
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    if (x.rank() != 2 || y.rank() != 2 || x.cols() != y.rows()) shape_mismatch("matmul", x, y);
    Tensor out = Tensor::matrix(x.rows(), y.cols());
    out.mat().noalias() = x.mat() * y.mat();
    const std::size_t ia = a.id();
    const std::size_t ib = b.id();
    return a.tape().record("matmul", std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
        const auto g = t.grad(self).mat();
        if (t.requires_grad(ia)) t.grad_buffer(ia).mat().noalias() += g * t.value(ib).mat().transpose();
        if (t.requires_grad(ib)) t.grad_buffer(ib).mat().noalias() += t.value(ia).mat().transpose() * g;
    });
}

Var add(const Var& a, const Var& b) {
    require_same_tape(a, b);
    if (!a.value().same_shape(b.value())) shape_mismatch("add", a.value(), b.value());
    Tensor out = a.value();
    out.mat() += b.value().mat();
    const std::size_t ia = a.id();
    const std::size_t ib = b.id();
    return a.tape().record("add", std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
        const auto g = t.grad(self).mat();
        if (t.requires_grad(ia)) t.grad_buffer(ia).mat() += g;
        if (t.requires_grad(ib)) t.grad_buffer(ib).mat() += g;
    });
}

Var sub(const Var& a, const Var& b) {
    require_same_tape(a, b);
    if (!a.value().same_shape(b.value())) shape_mismatch("sub", a.value(), b.value());
    Tensor out = a.value();
    out.mat() -= b.value().mat();
    const std::size_t ia = a.id();
    const std::size_t ib = b.id();
    return a.tape().record("sub", std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
        const auto g = t.grad(self).mat();
        if (t.requires_grad(ia)) t.grad_buffer(ia).mat() += g;
        if (t.requires_grad(ib)) t.grad_buffer(ib).mat() -= g;
    });
}

Var mul(const Var& a, const Var& b) {
    require_same_tape(a, b);
    if (!a.value().same_shape(b.value())) shape_mismatch("mul", a.value(), b.value());
    Tensor out = a.value();
    out.mat().array() *= b.value().mat().array();
    const std::size_t ia = a.id();
    const std::size_t ib = b.id();
    return a.tape().record("mul", std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
        const auto g = t.grad(self).mat().array();
        if (t.requires_grad(ia)) t.grad_buffer(ia).mat().array() += g * t.value(ib).mat().array();
        if (t.requires_grad(ib)) t.grad_buffer(ib).mat().array() += g * t.value(ia).mat().array();
    });
}

Var mul_scalar(const Var& a, double s) {
    Tensor out = a.value();
    out.mat() *= s;
    const std::size_t ia = a.id();
    return a.tape().record("mul_scalar", std::move(out), {ia}, [ia, s](Tape& t, std::size_t self) {
        if (t.requires_grad(ia)) t.grad_buffer(ia).mat() += s * t.grad(self).mat();
    });
}

Var add_bias(const Var& a, const Var& b) {
    require_same_tape(a, b);
    const Tensor& x = a.value();
    const Tensor& bias = b.value();
    if (x.rank() != 2 || bias.rows() != 1 || bias.cols() != x.cols()) shape_mismatch("add_bias", x, bias);
    Tensor out = x;
    out.mat().rowwise() += bias.mat().row(0);
    const std::size_t ia = a.id();
    const std::size_t ib = b.id();
    return a.tape().record("add_bias", std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
        const auto g = t.grad(self).mat();
        if (t.requires_grad(ia)) t.grad_buffer(ia).mat() += g;
        if (t.requires_grad(ib)) t.grad_buffer(ib).mat().row(0) += g.colwise().sum();
    });
}

Var relu(const Var& a) {
    return unary(
        "relu", a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& a, double slope) {
    return unary(
        "leaky_relu", a, [slope](double x) { return x > 0.0 ? x : slope * x; },
        [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var exp(const Var& a) {
    return unary(
        "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
    return unary(
        "log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var square(const Var& a) {
    return unary(
        "square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var sum(const Var& a) {
    const std::size_t ia = a.id();
    return a.tape().record("sum", Tensor::scalar(a.value().mat().sum()), {ia}, [ia](Tape& t, std::size_t self) {
        if (t.requires_grad(ia)) t.grad_buffer(ia).mat().array() += t.grad(self)[0];
    });
}

Var mean(const Var& a) {
    const std::size_t ia = a.id();
    const auto n = static_cast<double>(a.value().size());
    if (a.value().size() == 0) throw std::invalid_argument("mean of an empty tensor");
    return a.tape().record("mean", Tensor::scalar(a.value().mat().sum() / n), {ia}, [ia, n](Tape& t, std::size_t self) {
        if (t.requires_grad(ia)) t.grad_buffer(ia).mat().array() += t.grad(self)[0] / n;
    });
}

Var transpose(const Var& a) {
    const Tensor& x = a.value();
    if (x.rank() != 2) throw std::invalid_argument("transpose needs a rank-2 tensor, got " + x.shape_string());
    Tensor out = Tensor::matrix(x.cols(), x.rows());
    out.mat() = x.mat().transpose();
    const std::size_t ia = a.id();
    return a.tape().record("transpose", std::move(out), {ia}, [ia](Tape& t, std::size_t self) {
        if (t.requires_grad(ia)) t.grad_buffer(ia).mat() += t.grad(self).mat().transpose();
    });
}

Var concat(std::span<const Var> parts, std::size_t axis) {
    if (parts.empty()) throw std::invalid_argument("concat of zero tensors");
    if (axis > 1) throw std::invalid_argument("concat axis must be 0 or 1");
    const Tensor& first = parts.front().value();
    std::size_t rows = 0;
    std::size_t cols = 0;
    for (const auto& p : parts) {
        require_same_tape(parts.front(), p);
        const Tensor& v = p.value();
        if (v.rank() != 2) throw std::invalid_argument("concat needs rank-2 tensors, got " + v.shape_string());
        if (axis == 0) {
            if (v.cols() != first.cols()) shape_mismatch("concat", first, v);
            rows += v.rows();
            cols = v.cols();
        } else {
            if (v.rows() != first.rows()) shape_mismatch("concat", first, v);
            cols += v.cols();
            rows = v.rows();
        }
    }
    Tensor out = Tensor::matrix(rows, cols);
    std::vector<std::size_t> ids;
    std::vector<std::size_t> offsets;
    std::size_t offset = 0;
    for (const auto& p : parts) {
        const Tensor& v = p.value();
        const auto r = static_cast<Eigen::Index>(v.rows());
        const auto c = static_cast<Eigen::Index>(v.cols());
        const auto o = static_cast<Eigen::Index>(offset);
        if (axis == 0) {
            out.mat().middleRows(o, r) = v.mat();
            offset += v.rows();
        } else {
            out.mat().middleCols(o, c) = v.mat();
            offset += v.cols();
        }
        ids.push_back(p.id());
        offsets.push_back(static_cast<std::size_t>(o));
    }
    auto inputs = ids;
    return parts.front().tape().record(
        "concat", std::move(out), std::move(inputs), [ids, offsets, axis](Tape& t, std::size_t self) {
            const auto g = t.grad(self).mat();
            for (std::size_t k = 0; k < ids.size(); ++k) {
                if (!t.requires_grad(ids[k])) continue;
                Tensor& gk = t.grad_buffer(ids[k]);
                const auto o = static_cast<Eigen::Index>(offsets[k]);
                if (axis == 0) {
                    gk.mat() += g.middleRows(o, static_cast<Eigen::Index>(gk.rows()));
                } else {
                    gk.mat() += g.middleCols(o, static_cast<Eigen::Index>(gk.cols()));
                }
            }
        });
}

Var slice_rows(const Var& a, std::size_t begin, std::size_t count) {
    const Tensor& x = a.value();
    if (x.rank() != 2 || begin + count > x.rows()) {
        throw std::invalid_argument("slice_rows [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                                    ") out of range for " + x.shape_string());
    }
    Tensor out = Tensor::matrix(count, x.cols());
    out.mat() = x.mat().middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
    const std::size_t ia = a.id();
    return a.tape().record("slice_rows", std::move(out), {ia}, [ia, begin, count](Tape& t, std::size_t self) {
        if (!t.requires_grad(ia)) return;
        t.grad_buffer(ia).mat().middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count)) +=
            t.grad(self).mat();
    });
}

Var masked_row_softmax(const Var& scores, const Eigen::MatrixXd& mask) {
    const Tensor& s = scores.value();
    const auto n = static_cast<std::size_t>(mask.rows());
    if (s.rank() != 2 || mask.cols() != mask.rows() || s.cols() != n || n == 0 || s.rows() % n != 0) {
        throw std::invalid_argument("masked_row_softmax: scores " + s.shape_string() + " incompatible with " +
                                    std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()) + " mask");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if ((mask.row(static_cast<Eigen::Index>(i)).array() == 0.0).all()) {
            throw std::invalid_argument("masked_row_softmax: row " + std::to_string(i) + " is fully masked");
        }
    }
    Tensor out(s.shape(), 0.0);
    for (std::size_t r = 0; r < s.rows(); ++r) {
        const auto mrow = static_cast<Eigen::Index>(r % n);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (mask(mrow, static_cast<Eigen::Index>(j)) != 0.0) mx = std::max(mx, s(r, j));
        }
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (mask(mrow, static_cast<Eigen::Index>(j)) != 0.0) {
                out(r, j) = std::exp(s(r, j) - mx);
                z += out(r, j);
            }
        }
        for (std::size_t j = 0; j < n; ++j) out(r, j) /= z;
    }
    const std::size_t is = scores.id();
    return scores.tape().record("masked_row_softmax", std::move(out), {is}, [is, n](Tape& t, std::size_t self) {
        if (!t.requires_grad(is)) return;
        const Tensor& p = t.value(self);
        const Tensor& g = t.grad(self);
        Tensor& gs = t.grad_buffer(is);
        for (std::size_t r = 0; r < p.rows(); ++r) {
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) dot += p(r, j) * g(r, j);
            // Masked entries have p = 0 and receive no gradient.
            for (std::size_t j = 0; j < n; ++j) gs(r, j) += p(r, j) * (g(r, j) - dot);
        }
    });
}

Var propagate(const Eigen::MatrixXd& adj, const Var& x) {
    const Tensor& v = x.value();
    const auto n = static_cast<std::size_t>(adj.rows());
    if (adj.cols() != adj.rows() || v.rank() != 2 || n == 0 || v.rows() % n != 0) {
        throw std::invalid_argument("propagate: operator " + std::to_string(adj.rows()) + "x" +
                                    std::to_string(adj.cols()) + " incompatible with " + v.shape_string());
    }
    const std::size_t d = v.cols();
    const std::size_t blocks = v.rows() / n;
    Tensor out(v.shape(), 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            double* orow = out.data() + (b * n + i) * d;
            for (std::size_t k = 0; k < n; ++k) {
                const double w = adj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
                if (w == 0.0) continue;
                const double* xrow = v.data() + (b * n + k) * d;
                for (std::size_t c = 0; c < d; ++c) orow[c] += w * xrow[c];
            }
        }
    }
    const std::size_t ix = x.id();
    return x.tape().record("propagate", std::move(out), {ix}, [ix, adj, n, d, blocks](Tape& t, std::size_t self) {
        if (!t.requires_grad(ix)) return;
        const Tensor& g = t.grad(self);
        Tensor& gx = t.grad_buffer(ix);
        for (std::size_t b = 0; b < blocks; ++b) {
            for (std::size_t i = 0; i < n; ++i) {
                const double* grow = g.data() + (b * n + i) * d;
                for (std::size_t k = 0; k < n; ++k) {
                    const double w = adj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
                    if (w == 0.0) continue;
                    double* xrow = gx.data() + (b * n + k) * d;
                    for (std::size_t c = 0; c < d; ++c) xrow[c] += w * grow[c];
                }
            }
        }
    });
}

Var pairwise_sum(const Var& src, const Var& dst, std::size_t n) {
    require_same_tape(src, dst);
    const Tensor& s = src.value();
    const Tensor& d = dst.value();
    if (!s.same_shape(d) || s.rank() != 2 || s.cols() != 1 || n == 0 || s.rows() % n != 0) {
        shape_mismatch("pairwise_sum", s, d);
    }
    const std::size_t blocks = s.rows() / n;
    Tensor out = Tensor::matrix(s.rows(), n);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) out(b * n + i, j) = s[b * n + i] + d[b * n + j];
        }
    }
    const std::size_t is = src.id();
    const std::size_t id = dst.id();
    return src.tape().record("pairwise_sum", std::move(out), {is, id}, [is, id, n, blocks](Tape& t, std::size_t self) {
        const Tensor& g = t.grad(self);
        if (t.requires_grad(is)) {
            Tensor& gs = t.grad_buffer(is);
            for (std::size_t r = 0; r < g.rows(); ++r) {
                for (std::size_t j = 0; j < n; ++j) gs[r] += g(r, j);
            }
        }
        if (t.requires_grad(id)) {
            Tensor& gd = t.grad_buffer(id);
            for (std::size_t b = 0; b < blocks; ++b) {
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) gd[b * n + j] += g(b * n + i, j);
                }
            }
        }
    });
}

Var block_matmul(const Var& left, const Var& right, std::size_t n) {
    require_same_tape(left, right);
    const Tensor& l = left.value();
    const Tensor& r = right.value();
    if (l.rank() != 2 || r.rank() != 2 || l.cols() != n || l.rows() != r.rows() || n == 0 || l.rows() % n != 0) {
        shape_mismatch("block_matmul", l, r);
    }
    const std::size_t d = r.cols();
    const std::size_t blocks = l.rows() / n;
    Tensor out = Tensor::matrix(r.rows(), d);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            double* orow = out.data() + (b * n + i) * d;
            for (std::size_t k = 0; k < n; ++k) {
                const double w = l(b * n + i, k);
                const double* rrow = r.data() + (b * n + k) * d;
                for (std::size_t c = 0; c < d; ++c) orow[c] += w * rrow[c];
            }
        }
    }
    const std::size_t il = left.id();
    const std::size_t ir = right.id();
    return left.tape().record(
        "block_matmul", std::move(out), {il, ir}, [il, ir, n, d, blocks](Tape& t, std::size_t self) {
            const Tensor& g = t.grad(self);
            const Tensor& l = t.value(il);
            const Tensor& r = t.value(ir);
            const bool need_l = t.requires_grad(il);
            const bool need_r = t.requires_grad(ir);
            Tensor* gl = need_l ? &t.grad_buffer(il) : nullptr;
            Tensor* gr = need_r ? &t.grad_buffer(ir) : nullptr;
            for (std::size_t b = 0; b < blocks; ++b) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double* grow = g.data() + (b * n + i) * d;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double* rrow = r.data() + (b * n + k) * d;
                        if (need_l) {
                            double acc = 0.0;
                            for (std::size_t c = 0; c < d; ++c) acc += grow[c] * rrow[c];
                            (*gl)(b * n + i, k) += acc;
                        }
                        if (need_r) {
                            const double w = l(b * n + i, k);
                            double* grrow = gr->data() + (b * n + k) * d;
                            for (std::size_t c = 0; c < d; ++c) grrow[c] += w * grow[c];
                        }
                    }
                }
            }
        });
}

Tensor finite_difference_gradient(const std::function<double()>& f, Parameter& p, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
    Tensor g(p.value.shape(), 0.0);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
        const double orig = p.value[i];
        p.value[i] = orig + step;
        const double up = f();
        p.value[i] = orig - step;
        const double down = f();
        p.value[i] = orig;
        g[i] = (up - down) / (2.0 * step);
    }
    return g;
}

}  // namespace volgraph::ad
