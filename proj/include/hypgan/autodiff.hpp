#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypgan/tensor.hpp"

namespace hypgan::ad {

struct NonFiniteError : std::runtime_error {
    explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

enum class Op : std::uint8_t {
    Leaf,
    Add,
    Sub,
    Mul,
    Div,
    MatMul,
    Transpose,
    Axpb,  // a*x + b
    Tanh,
    Atanh,
    Sigmoid,
    Softplus,
    Exp,
    Log,
    LeakyRelu,
    LeakyMask,  // d(leaky_relu)/dx; constant w.r.t. differentiation
    Clamp,
    ClampMask,  // d(clamp)/dx; constant
    RowNorm,    // per-row L2 norm, N x 1
    SumRows,    // column sums -> 1 x C
    SumCols,    // row sums    -> N x 1
    SumAll,     // -> 1 x 1
    BroadcastTo,
    ConcatCols,
    SliceCols,
    PadCols,
    RowMax,  // per-row max, N x 1; constant (log-sum-exp shift)
};

const char* op_name(Op op);

class Graph;

// Handle to a node owned by a Graph. Cheap to copy; valid while the graph lives.
struct Var {
    Graph* graph = nullptr;
    std::int32_t id = -1;

    bool valid() const { return graph != nullptr && id >= 0; }
    const Tensor& value() const;
    std::int64_t rows() const { return value().rows(); }
    std::int64_t cols() const { return value().cols(); }
};

// Eagerly-evaluated tape of tensor operations. Nodes only reference earlier
// nodes, so node index order is a topological order. A graph instance is
// confined to one thread; independent graphs may run concurrently.
//
// backward_vars() emits the adjoints as new graph nodes, which makes every
// gradient itself differentiable: a second backward over a first gradient
// yields correct higher-order derivatives (used by the gradient penalty).
class Graph {
public:
    Var leaf(Tensor value);
    Var scalar(double v) { return leaf(Tensor::scalar(v)); }

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var div(Var a, Var b);
    Var matmul(Var a, Var b);
    Var transpose(Var a);
    Var axpb(Var x, double a, double b);
    Var neg(Var x) { return axpb(x, -1.0, 0.0); }
    Var add_scalar(Var x, double s) { return axpb(x, 1.0, s); }
    Var mul_scalar(Var x, double s) { return axpb(x, s, 0.0); }
    Var square(Var x) { return mul(x, x); }
    Var tanh(Var x);
    Var atanh(Var x);  // requires |x| < 1 everywhere
    Var sigmoid(Var x);
    Var softplus(Var x);
    Var exp(Var x);
    Var log(Var x);
    Var leaky_relu(Var x, double slope);
    Var leaky_mask(Var x, double slope);
    Var clamp(Var x, double lo, double hi);
    Var clamp_min(Var x, double lo);
    Var clamp_mask(Var x, double lo, double hi);
    Var rowwise_norm(Var x);
    Var sum_rows(Var x);
    Var sum_cols(Var x);
    Var sum_all(Var x);
    Var mean_all(Var x);
    Var broadcast_to(Var x, std::int64_t rows, std::int64_t cols);
    Var concat_cols(Var a, Var b);
    Var slice_cols(Var x, std::int64_t start, std::int64_t len);
    Var pad_cols(Var x, std::int64_t left, std::int64_t right);
    Var row_max(Var x);

    // d(root)/d(wrt) for a scalar root; gradients summed over all paths.
    // A wrt node with no path to root yields a zero tensor of its shape.
    std::vector<Tensor> backward(Var root, const std::vector<Var>& wrt);

    // Same, but the gradients are graph nodes and remain differentiable.
    std::vector<Var> backward_vars(Var root, const std::vector<Var>& wrt);
    Var grad_as_node(Var root, Var wrt) { return backward_vars(root, {wrt})[0]; }

    const Tensor& value(Var v) const;
    std::size_t node_count() const { return nodes_.size(); }

    // Finite checks run after every operation and throw NonFiniteError; the
    // training loop relies on them for divergence detection.
    void set_finite_checks(bool on) { finite_checks_ = on; }

private:
    struct Node {
        Op op = Op::Leaf;
        std::int32_t p0 = -1;
        std::int32_t p1 = -1;
        double a = 0.0;
        double b = 0.0;
        std::int64_t i0 = 0;
        std::int64_t i1 = 0;
        Tensor value;
    };

    std::vector<Node> nodes_;
    bool finite_checks_ = true;

    Var push(Node n);
    Var wrap(std::int32_t id) { return Var{this, id}; }
    void check_owned(Var v, const char* what) const;
    Var reduce_to(Var g, std::int64_t rows, std::int64_t cols);
    void accumulate(std::vector<std::int32_t>& adj, std::int32_t target, Var contribution);
};

}  // namespace hypgan::ad
