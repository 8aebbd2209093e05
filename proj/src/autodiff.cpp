#include "hypgan/autodiff.hpp"

#include <cmath>
#include <limits>

#include "hypgan/kernels.hpp"

namespace hypgan::ad {

namespace {

constexpr double kNormEps = 1e-15;

// Element strides for limited broadcasting: an operand of shape {1,C}, {R,1}
// or {1,1} stretches against an {R,C} partner.
struct Bcast {
    std::int64_t row_stride;
    std::int64_t col_stride;
};

Bcast bcast_for(const Tensor& t, std::int64_t out_rows, std::int64_t out_cols, const char* what) {
    if ((t.rows() != out_rows && t.rows() != 1) || (t.cols() != out_cols && t.cols() != 1)) {
        throw ShapeError(std::string(what) + ": operand " + t.shape_str() +
                         " does not broadcast to [" + std::to_string(out_rows) + "x" +
                         std::to_string(out_cols) + "]");
    }
    return Bcast{t.rows() == 1 ? 0 : t.cols(), t.cols() == 1 ? 0 : 1};
}

template <class F>
Tensor binary_broadcast(const Tensor& a, const Tensor& b, const char* what, F f) {
    const std::int64_t rows = a.rows() > b.rows() ? a.rows() : b.rows();
    const std::int64_t cols = a.cols() > b.cols() ? a.cols() : b.cols();
    const Bcast ba = bcast_for(a, rows, cols, what);
    const Bcast bb = bcast_for(b, rows, cols, what);
    Tensor out(rows, cols);
    if (a.same_shape(b)) {
        kernels::zip(a.data(), b.data(), out.data(), out.numel(), f);
        return out;
    }
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
#pragma omp parallel for schedule(static) if (rows * cols >= kernels::kElementwiseGrain)
    for (std::int64_t i = 0; i < rows; ++i) {
        const double* ra = pa + i * ba.row_stride;
        const double* rb = pb + i * bb.row_stride;
        double* ro = po + i * cols;
        for (std::int64_t j = 0; j < cols; ++j) {
            ro[j] = f(ra[j * ba.col_stride], rb[j * bb.col_stride]);
        }
    }
    return out;
}

}  // namespace

const char* op_name(Op op) {
    switch (op) {
        case Op::Leaf: return "leaf";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::Div: return "div";
        case Op::MatMul: return "matmul";
        case Op::Transpose: return "transpose";
        case Op::Axpb: return "axpb";
        case Op::Tanh: return "tanh";
        case Op::Atanh: return "atanh";
        case Op::Sigmoid: return "sigmoid";
        case Op::Softplus: return "softplus";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::LeakyRelu: return "leaky_relu";
        case Op::LeakyMask: return "leaky_mask";
        case Op::Clamp: return "clamp";
        case Op::ClampMask: return "clamp_mask";
        case Op::RowNorm: return "rowwise_norm";
        case Op::SumRows: return "sum_rows";
        case Op::SumCols: return "sum_cols";
        case Op::SumAll: return "sum_all";
        case Op::BroadcastTo: return "broadcast_to";
        case Op::ConcatCols: return "concat_cols";
        case Op::SliceCols: return "slice_cols";
        case Op::PadCols: return "pad_cols";
        case Op::RowMax: return "row_max";
    }
    return "?";
}

const Tensor& Var::value() const {
    if (!valid()) {
        throw std::invalid_argument("value() on invalid Var");
    }
    return graph->value(*this);
}

const Tensor& Graph::value(Var v) const {
    check_owned(v, "value");
    return nodes_[static_cast<std::size_t>(v.id)].value;
}

void Graph::check_owned(Var v, const char* what) const {
    if (v.graph != this || v.id < 0 || v.id >= static_cast<std::int32_t>(nodes_.size())) {
        throw std::invalid_argument(std::string(what) + ": Var does not belong to this graph");
    }
}

Var Graph::push(Node n) {
    if (finite_checks_ && !n.value.all_finite()) {
        throw NonFiniteError(std::string("non-finite result in ") + op_name(n.op));
    }
    nodes_.push_back(std::move(n));
    return wrap(static_cast<std::int32_t>(nodes_.size()) - 1);
}

Var Graph::leaf(Tensor value) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Graph::add(Var a, Var b) {
    check_owned(a, "add");
    check_owned(b, "add");
    Node n;
    n.op = Op::Add;
    n.p0 = a.id;
    n.p1 = b.id;
    n.value = binary_broadcast(a.value(), b.value(), "add", [](double x, double y) { return x + y; });
    return push(std::move(n));
}

Var Graph::sub(Var a, Var b) {
    check_owned(a, "sub");
    check_owned(b, "sub");
    Node n;
    n.op = Op::Sub;
    n.p0 = a.id;
    n.p1 = b.id;
    n.value = binary_broadcast(a.value(), b.value(), "sub", [](double x, double y) { return x - y; });
    return push(std::move(n));
}

Var Graph::mul(Var a, Var b) {
    check_owned(a, "mul");
    check_owned(b, "mul");
    Node n;
    n.op = Op::Mul;
    n.p0 = a.id;
    n.p1 = b.id;
    n.value = binary_broadcast(a.value(), b.value(), "mul", [](double x, double y) { return x * y; });
    return push(std::move(n));
}

Var Graph::div(Var a, Var b) {
    check_owned(a, "div");
    check_owned(b, "div");
    Node n;
    n.op = Op::Div;
    n.p0 = a.id;
    n.p1 = b.id;
    n.value = binary_broadcast(a.value(), b.value(), "div", [](double x, double y) { return x / y; });
    return push(std::move(n));
}

Var Graph::matmul(Var a, Var b) {
    check_owned(a, "matmul");
    check_owned(b, "matmul");
    const Tensor& ta = a.value();
    const Tensor& tb = b.value();
    if (ta.cols() != tb.rows()) {
        throw ShapeError("matmul: inner dimensions disagree " + ta.shape_str() + " * " +
                         tb.shape_str());
    }
    Node n;
    n.op = Op::MatMul;
    n.p0 = a.id;
    n.p1 = b.id;
    n.value = Tensor(ta.rows(), tb.cols());
    kernels::matmul(ta.data(), tb.data(), n.value.data(), ta.rows(), ta.cols(), tb.cols());
    return push(std::move(n));
}

Var Graph::transpose(Var a) {
    check_owned(a, "transpose");
    const Tensor& t = a.value();
    Node n;
    n.op = Op::Transpose;
    n.p0 = a.id;
    n.value = Tensor(t.cols(), t.rows());
    kernels::transpose(t.data(), n.value.data(), t.rows(), t.cols());
    return push(std::move(n));
}

Var Graph::axpb(Var x, double a, double b) {
    check_owned(x, "axpb");
    Node n;
    n.op = Op::Axpb;
    n.p0 = x.id;
    n.a = a;
    n.b = b;
    const Tensor& t = x.value();
    n.value = Tensor(t.rows(), t.cols());
    kernels::map(t.data(), n.value.data(), t.numel(), [a, b](double v) { return a * v + b; });
    return push(std::move(n));
}

Var Graph::tanh(Var x) {
    check_owned(x, "tanh");
    Node n;
    n.op = Op::Tanh;
    n.p0 = x.id;
    const Tensor& t = x.value();
    n.value = Tensor(t.rows(), t.cols());
    kernels::map(t.data(), n.value.data(), t.numel(), [](double v) { return std::tanh(v); });
    return push(std::move(n));
}

Var Graph::atanh(Var x) {
    check_owned(x, "atanh");
    const Tensor& t = x.value();
    for (std::int64_t i = 0; i < t.numel(); ++i) {
        if (!(std::fabs(t[i]) < 1.0)) {
            throw NonFiniteError("atanh argument |a| >= 1 (missing ball projection upstream?)");
        }
    }
    Node n;
    n.op = Op::Atanh;
    n.p0 = x.id;
    n.value = Tensor(t.rows(), t.cols());
    kernels::map(t.data(), n.value.data(), t.numel(), [](double v) { return std::atanh(v); });
    return push(std::move(n));
}

Var Graph::sigmoid(Var x) {
    check_owned(x, "sigmoid");
    Node n;
    n.op = Op::Sigmoid;
    n.p0 = x.id;
    const Tensor& t = x.value();
    n.value = Tensor(t.rows(), t.cols());
    kernels::map(t.data(), n.value.data(), t.numel(), [](double v) {
        if (v >= 0.0) {
            return 1.0 / (1.0 + std::exp(-v));
        }
        const double e = std::exp(v);
        return e / (1.0 + e);
    });
    return push(std::move(n));
}

Var Graph::softplus(Var x) {
    check_owned(x, "softplus");
    Node n;
    n.op = Op::Softplus;
    n.p0 = x.id;
    const Tensor& t = x.value();
    n.value = Tensor(t.rows(), t.cols());
    kernels::map(t.data(), n.value.data(), t.numel(), [](double v) {
        return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
    });
    return push(std::move(n));
}

Var Graph::exp(Var x) {
    check_owned(x, "exp");
    Node n;
    n.op = Op::Exp;
    n.p0 = x.id;
    const Tensor& t = x.value();
    n.value = Tensor(t.rows(), t.cols());
    kernels::map(t.data(), n.value.data(), t.numel(), [](double v) { return std::exp(v); });
    return push(std::move(n));
}

Var Graph::log(Var x) {
    check_owned(x, "log");
    Node n;
    n.op = Op::Log;
    n.p0 = x.id;
    const Tensor& t = x.value();
    n.value = Tensor(t.rows(), t.cols());
    kernels::map(t.data(), n.value.data(), t.numel(), [](double v) { return std::log(v); });
    return push(std::move(n));
}

Var Graph::leaky_relu(Var x, double slope) {
    check_owned(x, "leaky_relu");
    Node n;
    n.op = Op::LeakyRelu;
    n.p0 = x.id;
    n.a = slope;
    const Tensor& t = x.value();
    n.value = Tensor(t.rows(), t.cols());
    kernels::map(t.data(), n.value.data(), t.numel(),
                 [slope](double v) { return v >= 0.0 ? v : slope * v; });
    return push(std::move(n));
}

Var Graph::leaky_mask(Var x, double slope) {
    check_owned(x, "leaky_mask");
    Node n;
    n.op = Op::LeakyMask;
    n.p0 = x.id;
    n.a = slope;
    const Tensor& t = x.value();
    n.value = Tensor(t.rows(), t.cols());
    // Subgradient at 0 is the positive-side slope 1.
    kernels::map(t.data(), n.value.data(), t.numel(),
                 [slope](double v) { return v >= 0.0 ? 1.0 : slope; });
    return push(std::move(n));
}

Var Graph::clamp(Var x, double lo, double hi) {
    check_owned(x, "clamp");
    Node n;
    n.op = Op::Clamp;
    n.p0 = x.id;
    n.a = lo;
    n.b = hi;
    const Tensor& t = x.value();
    n.value = Tensor(t.rows(), t.cols());
    kernels::map(t.data(), n.value.data(), t.numel(),
                 [lo, hi](double v) { return v < lo ? lo : (v > hi ? hi : v); });
    return push(std::move(n));
}

Var Graph::clamp_min(Var x, double lo) {
    return clamp(x, lo, std::numeric_limits<double>::infinity());
}

Var Graph::clamp_mask(Var x, double lo, double hi) {
    check_owned(x, "clamp_mask");
    Node n;
    n.op = Op::ClampMask;
    n.p0 = x.id;
    n.a = lo;
    n.b = hi;
    const Tensor& t = x.value();
    n.value = Tensor(t.rows(), t.cols());
    kernels::map(t.data(), n.value.data(), t.numel(),
                 [lo, hi](double v) { return (v >= lo && v <= hi) ? 1.0 : 0.0; });
    return push(std::move(n));
}

Var Graph::rowwise_norm(Var x) {
    check_owned(x, "rowwise_norm");
    const Tensor& t = x.value();
    Node n;
    n.op = Op::RowNorm;
    n.p0 = x.id;
    n.value = Tensor(t.rows(), 1);
    const double* p = t.data();
    double* o = n.value.data();
    const std::int64_t cols = t.cols();
#pragma omp parallel for schedule(static) if (t.numel() >= kernels::kElementwiseGrain)
    for (std::int64_t i = 0; i < t.rows(); ++i) {
        const double* r = p + i * cols;
        double acc = 0.0;
        for (std::int64_t j = 0; j < cols; ++j) {
            acc += r[j] * r[j];
        }
        o[i] = std::sqrt(acc);
    }
    return push(std::move(n));
}

Var Graph::sum_rows(Var x) {
    check_owned(x, "sum_rows");
    const Tensor& t = x.value();
    Node n;
    n.op = Op::SumRows;
    n.p0 = x.id;
    n.value = Tensor(1, t.cols());
    kernels::sum_rows(t.data(), n.value.data(), t.rows(), t.cols());
    return push(std::move(n));
}

Var Graph::sum_cols(Var x) {
    check_owned(x, "sum_cols");
    const Tensor& t = x.value();
    Node n;
    n.op = Op::SumCols;
    n.p0 = x.id;
    n.value = Tensor(t.rows(), 1);
    kernels::sum_cols(t.data(), n.value.data(), t.rows(), t.cols());
    return push(std::move(n));
}

Var Graph::sum_all(Var x) {
    check_owned(x, "sum_all");
    const Tensor& t = x.value();
    Node n;
    n.op = Op::SumAll;
    n.p0 = x.id;
    n.value = Tensor::scalar(kernels::sum_all(t.data(), t.numel()));
    return push(std::move(n));
}

Var Graph::mean_all(Var x) {
    const std::int64_t n = x.value().numel();
    return axpb(sum_all(x), 1.0 / static_cast<double>(n), 0.0);
}

Var Graph::broadcast_to(Var x, std::int64_t rows, std::int64_t cols) {
    check_owned(x, "broadcast_to");
    const Tensor& t = x.value();
    const Bcast bc = bcast_for(t, rows, cols, "broadcast_to");
    Node n;
    n.op = Op::BroadcastTo;
    n.p0 = x.id;
    n.i0 = rows;
    n.i1 = cols;
    n.value = Tensor(rows, cols);
    const double* p = t.data();
    double* o = n.value.data();
#pragma omp parallel for schedule(static) if (rows * cols >= kernels::kElementwiseGrain)
    for (std::int64_t i = 0; i < rows; ++i) {
        const double* r = p + i * bc.row_stride;
        double* ro = o + i * cols;
        for (std::int64_t j = 0; j < cols; ++j) {
            ro[j] = r[j * bc.col_stride];
        }
    }
    return push(std::move(n));
}

Var Graph::concat_cols(Var a, Var b) {
    check_owned(a, "concat_cols");
    check_owned(b, "concat_cols");
    const Tensor& ta = a.value();
    const Tensor& tb = b.value();
    if (ta.rows() != tb.rows()) {
        throw ShapeError("concat_cols: row counts disagree " + ta.shape_str() + " vs " +
                         tb.shape_str());
    }
    Node n;
    n.op = Op::ConcatCols;
    n.p0 = a.id;
    n.p1 = b.id;
    n.value = Tensor(ta.rows(), ta.cols() + tb.cols());
    for (std::int64_t i = 0; i < ta.rows(); ++i) {
        double* o = n.value.data() + i * n.value.cols();
        const double* ra = ta.data() + i * ta.cols();
        const double* rb = tb.data() + i * tb.cols();
        for (std::int64_t j = 0; j < ta.cols(); ++j) {
            o[j] = ra[j];
        }
        for (std::int64_t j = 0; j < tb.cols(); ++j) {
            o[ta.cols() + j] = rb[j];
        }
    }
    return push(std::move(n));
}

Var Graph::slice_cols(Var x, std::int64_t start, std::int64_t len) {
    check_owned(x, "slice_cols");
    const Tensor& t = x.value();
    if (start < 0 || len < 0 || start + len > t.cols()) {
        throw ShapeError("slice_cols: range out of bounds for " + t.shape_str());
    }
    Node n;
    n.op = Op::SliceCols;
    n.p0 = x.id;
    n.i0 = start;
    n.i1 = len;
    n.value = Tensor(t.rows(), len);
    for (std::int64_t i = 0; i < t.rows(); ++i) {
        const double* r = t.data() + i * t.cols() + start;
        double* o = n.value.data() + i * len;
        for (std::int64_t j = 0; j < len; ++j) {
            o[j] = r[j];
        }
    }
    return push(std::move(n));
}

Var Graph::pad_cols(Var x, std::int64_t left, std::int64_t right) {
    check_owned(x, "pad_cols");
    if (left < 0 || right < 0) {
        throw ShapeError("pad_cols: negative padding");
    }
    const Tensor& t = x.value();
    Node n;
    n.op = Op::PadCols;
    n.p0 = x.id;
    n.i0 = left;
    n.i1 = right;
    n.value = Tensor(t.rows(), left + t.cols() + right, 0.0);
    for (std::int64_t i = 0; i < t.rows(); ++i) {
        const double* r = t.data() + i * t.cols();
        double* o = n.value.data() + i * n.value.cols() + left;
        for (std::int64_t j = 0; j < t.cols(); ++j) {
            o[j] = r[j];
        }
    }
    return push(std::move(n));
}

Var Graph::row_max(Var x) {
    check_owned(x, "row_max");
    const Tensor& t = x.value();
    if (t.cols() < 1) {
        throw ShapeError("row_max: empty rows");
    }
    Node n;
    n.op = Op::RowMax;
    n.p0 = x.id;
    n.value = Tensor(t.rows(), 1);
    for (std::int64_t i = 0; i < t.rows(); ++i) {
        const double* r = t.data() + i * t.cols();
        double m = r[0];
        for (std::int64_t j = 1; j < t.cols(); ++j) {
            m = r[j] > m ? r[j] : m;
        }
        n.value[i] = m;
    }
    return push(std::move(n));
}

Var Graph::reduce_to(Var g, std::int64_t rows, std::int64_t cols) {
    Var out = g;
    if (out.rows() != rows) {
        out = sum_rows(out);
    }
    if (out.cols() != cols) {
        out = sum_cols(out);
    }
    if (out.rows() != rows || out.cols() != cols) {
        throw ShapeError("reduce_to: cannot reduce gradient to target shape");
    }
    return out;
}

void Graph::accumulate(std::vector<std::int32_t>& adj, std::int32_t target, Var contribution) {
    if (adj[static_cast<std::size_t>(target)] < 0) {
        adj[static_cast<std::size_t>(target)] = contribution.id;
    } else {
        adj[static_cast<std::size_t>(target)] =
            add(wrap(adj[static_cast<std::size_t>(target)]), contribution).id;
    }
}

namespace {
// Ops whose value depends on inputs but whose derivative is defined as zero
// (almost-everywhere-constant factors extracted from the forward pass).
bool blocks_gradient(Op op) {
    return op == Op::Leaf || op == Op::LeakyMask || op == Op::ClampMask || op == Op::RowMax;
}
}  // namespace

std::vector<Var> Graph::backward_vars(Var root, const std::vector<Var>& wrt) {
    check_owned(root, "backward");
    if (root.value().numel() != 1) {
        throw ShapeError("backward: root must be scalar, got " + root.value().shape_str());
    }
    for (const Var& w : wrt) {
        check_owned(w, "backward wrt");
    }

    const std::int32_t r = root.id;
    const std::size_t span = static_cast<std::size_t>(r) + 1;

    // Ancestors of the root.
    std::vector<std::uint8_t> reach(span, 0);
    reach[static_cast<std::size_t>(r)] = 1;
    for (std::int32_t id = r; id >= 0; --id) {
        if (!reach[static_cast<std::size_t>(id)]) {
            continue;
        }
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        if (n.p0 >= 0) {
            reach[static_cast<std::size_t>(n.p0)] = 1;
        }
        if (n.p1 >= 0) {
            reach[static_cast<std::size_t>(n.p1)] = 1;
        }
    }

    // Nodes whose value depends on some wrt target through differentiable ops.
    std::vector<std::uint8_t> dep(span, 0);
    for (const Var& w : wrt) {
        if (w.id <= r) {
            dep[static_cast<std::size_t>(w.id)] = 1;
        }
    }
    for (std::int32_t id = 0; id <= r; ++id) {
        if (dep[static_cast<std::size_t>(id)]) {
            continue;
        }
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        if (blocks_gradient(n.op)) {
            continue;
        }
        const bool d0 = n.p0 >= 0 && dep[static_cast<std::size_t>(n.p0)];
        const bool d1 = n.p1 >= 0 && dep[static_cast<std::size_t>(n.p1)];
        if (d0 || d1) {
            dep[static_cast<std::size_t>(id)] = 1;
        }
    }

    std::vector<std::int32_t> adj(span, -1);
    adj[static_cast<std::size_t>(r)] = leaf(Tensor::scalar(1.0)).id;

    for (std::int32_t id = r; id >= 0; --id) {
        const std::size_t s = static_cast<std::size_t>(id);
        if (adj[s] < 0 || !reach[s] || !dep[s]) {
            continue;
        }
        // Copy: nodes_ may reallocate while emitting adjoint ops.
        const Node n = nodes_[s];
        if (blocks_gradient(n.op)) {
            continue;
        }
        Var g = wrap(adj[s]);
        Var out = wrap(id);
        Var x = n.p0 >= 0 ? wrap(n.p0) : Var{};
        Var y = n.p1 >= 0 ? wrap(n.p1) : Var{};
        const bool need_x = n.p0 >= 0 && dep[static_cast<std::size_t>(n.p0)];
        const bool need_y = n.p1 >= 0 && dep[static_cast<std::size_t>(n.p1)];

        switch (n.op) {
            case Op::Add:
                if (need_x) accumulate(adj, n.p0, reduce_to(g, x.rows(), x.cols()));
                if (need_y) accumulate(adj, n.p1, reduce_to(g, y.rows(), y.cols()));
                break;
            case Op::Sub:
                if (need_x) accumulate(adj, n.p0, reduce_to(g, x.rows(), x.cols()));
                if (need_y) accumulate(adj, n.p1, reduce_to(neg(g), y.rows(), y.cols()));
                break;
            case Op::Mul:
                if (need_x) accumulate(adj, n.p0, reduce_to(mul(g, y), x.rows(), x.cols()));
                if (need_y) accumulate(adj, n.p1, reduce_to(mul(g, x), y.rows(), y.cols()));
                break;
            case Op::Div:
                if (need_x) accumulate(adj, n.p0, reduce_to(div(g, y), x.rows(), x.cols()));
                if (need_y)
                    accumulate(adj, n.p1,
                               reduce_to(neg(div(mul(g, out), y)), y.rows(), y.cols()));
                break;
            case Op::MatMul:
                if (need_x) accumulate(adj, n.p0, matmul(g, transpose(y)));
                if (need_y) accumulate(adj, n.p1, matmul(transpose(x), g));
                break;
            case Op::Transpose:
                if (need_x) accumulate(adj, n.p0, transpose(g));
                break;
            case Op::Axpb:
                if (need_x) accumulate(adj, n.p0, axpb(g, n.a, 0.0));
                break;
            case Op::Tanh:
                if (need_x) accumulate(adj, n.p0, mul(g, axpb(square(out), -1.0, 1.0)));
                break;
            case Op::Atanh:
                if (need_x) accumulate(adj, n.p0, div(g, axpb(square(x), -1.0, 1.0)));
                break;
            case Op::Sigmoid:
                if (need_x) accumulate(adj, n.p0, mul(g, mul(out, axpb(out, -1.0, 1.0))));
                break;
            case Op::Softplus:
                if (need_x) accumulate(adj, n.p0, mul(g, sigmoid(x)));
                break;
            case Op::Exp:
                if (need_x) accumulate(adj, n.p0, mul(g, out));
                break;
            case Op::Log:
                if (need_x) accumulate(adj, n.p0, div(g, x));
                break;
            case Op::LeakyRelu:
                if (need_x) accumulate(adj, n.p0, mul(g, leaky_mask(x, n.a)));
                break;
            case Op::Clamp:
                if (need_x) accumulate(adj, n.p0, mul(g, clamp_mask(x, n.a, n.b)));
                break;
            case Op::RowNorm:
                // d||x||/dx = x / max(||x||, eps); the clamp removes the
                // removable singularity at zero rows without NaN gradients.
                if (need_x) accumulate(adj, n.p0, mul(x, div(g, clamp_min(out, kNormEps))));
                break;
            case Op::SumRows:
            case Op::SumCols:
            case Op::SumAll:
                if (need_x) accumulate(adj, n.p0, broadcast_to(g, x.rows(), x.cols()));
                break;
            case Op::BroadcastTo:
                if (need_x) accumulate(adj, n.p0, reduce_to(g, x.rows(), x.cols()));
                break;
            case Op::ConcatCols:
                if (need_x) accumulate(adj, n.p0, slice_cols(g, 0, x.cols()));
                if (need_y) accumulate(adj, n.p1, slice_cols(g, x.cols(), y.cols()));
                break;
            case Op::SliceCols:
                if (need_x)
                    accumulate(adj, n.p0, pad_cols(g, n.i0, x.cols() - n.i0 - n.i1));
                break;
            case Op::PadCols:
                if (need_x) accumulate(adj, n.p0, slice_cols(g, n.i0, x.cols()));
                break;
            case Op::Leaf:
            case Op::LeakyMask:
            case Op::ClampMask:
            case Op::RowMax:
                break;
        }
    }

    std::vector<Var> result;
    result.reserve(wrt.size());
    for (const Var& w : wrt) {
        const std::int32_t a = w.id <= r ? adj[static_cast<std::size_t>(w.id)] : -1;
        if (a >= 0) {
            result.push_back(wrap(a));
        } else {
            const Tensor& t = w.value();
            result.push_back(leaf(Tensor::zeros(t.rows(), t.cols())));
        }
    }
    return result;
}

std::vector<Tensor> Graph::backward(Var root, const std::vector<Var>& wrt) {
    std::vector<Var> vars = backward_vars(root, wrt);
    std::vector<Tensor> out;
    out.reserve(vars.size());
    for (const Var& v : vars) {
        out.push_back(v.value());
    }
    return out;
}

}  // namespace hypgan::ad
