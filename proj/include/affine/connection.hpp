#ifndef AFFINE_CONNECTION_HPP
#define AFFINE_CONNECTION_HPP

#include <memory>

#include "affine/frame.hpp"

namespace affine {

enum class ConnKind { simple, gauge, christoffel, holonomic, synthetic, zero };

template <class T>
std::vector<Dual<T>> seed_direction(const T* x, int dim, int dir0) {
    std::vector<Dual<T>> d(dim);
    for (int i = 0; i < dim; ++i) d[i] = Dual<T>(x[i], T(i == dir0 ? 1.0 : 0.0));
    return d;
}

// Coefficients Gamma^M_{NP}(x), stored row-major [M][N][P] with the upper
// index first. Virtual overloads per scalar level keep AD available through
// three nested derivatives.
class ConnectionField {
public:
    virtual ~ConnectionField() = default;

    ConnKind kind() const { return kind_; }
    int dim() const { return dim_; }
    size_t size() const { return static_cast<size_t>(dim_) * dim_ * dim_; }

    virtual void coeffs(const double* x, double* out) const = 0;
    virtual void coeffs(const Dual1* x, Dual1* out) const = 0;
    virtual void coeffs(const Dual2* x, Dual2* out) const = 0;
    virtual void coeffs(const Dual3* x, Dual3* out) const = 0;

    std::vector<double> at(const Point& p) const {
        p.require_dim(dim_);
        std::vector<double> out(size());
        coeffs(p.coords.data(), out.data());
        return out;
    }

protected:
    ConnectionField(ConnKind k, int d) : kind_(k), dim_(d) {}

private:
    ConnKind kind_;
    int dim_;
};

using ConnectionPtr = std::shared_ptr<const ConnectionField>;

template <class Derived>
class ConnectionMixin : public ConnectionField {
public:
    using ConnectionField::ConnectionField;
    void coeffs(const double* x, double* out) const override { self().template coeffs_t<double>(x, out); }
    void coeffs(const Dual1* x, Dual1* out) const override { self().template coeffs_t<Dual1>(x, out); }
    void coeffs(const Dual2* x, Dual2* out) const override { self().template coeffs_t<Dual2>(x, out); }
    void coeffs(const Dual3* x, Dual3* out) const override { self().template coeffs_t<Dual3>(x, out); }

private:
    const Derived& self() const { return *static_cast<const Derived*>(this); }
};

// Symmetrized inner-layer coefficients with both the chain rule and the
// lower-index pullback supplied by the stack's pullback layer. Output is
// [A][B][C], symmetric in (B,C).
template <class T>
void eval_simple_coeffs(const ReferenceSystemStack& stack, const T* x, T* out) {
    int D = stack.dim();
    size_t n3 = static_cast<size_t>(D) * D * D;
    if (stack.trivial_inner()) {
        for (size_t i = 0; i < n3; ++i) out[i] = T(0.0);
        return;
    }
    const FrameField& fin = *stack.inner;
    const FrameField& fpull = stack.pullback_layer();
    size_t n2 = static_cast<size_t>(D) * D;
    std::vector<T> cin(n2), cpull(n2);
    fin.eval_C(x, cin.data());
    fpull.eval_C(x, cpull.data());
    // dB[M][A'][B] = d B_in^{A'}_B / d x^M, then chain to the xi chart.
    std::vector<T> dB(static_cast<size_t>(D) * n2);
    for (int M = 0; M < D; ++M) {
        auto xs = seed_direction(x, D, M);
        std::vector<Dual<T>> b(n2);
        fin.eval_B(xs.data(), b.data());
        for (size_t i = 0; i < n2; ++i) dB[M * n2 + i] = b[i].d;
    }
    std::vector<T> dXi(static_cast<size_t>(D) * n2, T(0.0));  // [C][A'][B]
    for (int C = 0; C < D; ++C)
        for (int M = 0; M < D; ++M) {
            T w = cpull[M * D + C];
            for (size_t i = 0; i < n2; ++i) dXi[C * n2 + i] += w * dB[M * n2 + i];
        }
    for (int A = 0; A < D; ++A)
        for (int B = 0; B < D; ++B)
            for (int C = 0; C < D; ++C) {
                T s(0.0);
                for (int Ap = 0; Ap < D; ++Ap)
                    s += cin[A * D + Ap] * (dXi[C * n2 + Ap * D + B] + dXi[B * n2 + Ap * D + C]);
                out[(A * D + B) * D + C] = 0.5 * s;
            }
}

// Gauge connection of a stack: frame-derivative part plus the inner term
// pulled down to the x chart. Output [M][N][P].
template <class T>
void eval_gauge_coeffs(const ReferenceSystemStack& stack, const T* x, T* out) {
    int D = stack.dim();
    size_t n2 = static_cast<size_t>(D) * D;
    std::vector<T> b(n2), c(n2);
    stack.outer.eval_B(x, b.data());
    stack.outer.eval_C(x, c.data());
    std::vector<T> dB(static_cast<size_t>(D) * n2);  // [P][A][N]
    for (int P = 0; P < D; ++P) {
        auto xs = seed_direction(x, D, P);
        std::vector<Dual<T>> bp(n2);
        stack.outer.eval_B(xs.data(), bp.data());
        for (size_t i = 0; i < n2; ++i) dB[P * n2 + i] = bp[i].d;
    }
    bool inner = !stack.trivial_inner();
    std::vector<T> simple, inner_P;
    if (inner) {
        simple.resize(static_cast<size_t>(D) * n2);
        eval_simple_coeffs(stack, x, simple.data());
        // (^A_{B P}) = (^A_{B C}) * B_pull^C_P
        std::vector<T> bpull(n2);
        stack.pullback_layer().eval_B(x, bpull.data());
        inner_P.assign(static_cast<size_t>(D) * n2, T(0.0));
        for (int A = 0; A < D; ++A)
            for (int B = 0; B < D; ++B)
                for (int P = 0; P < D; ++P) {
                    T s(0.0);
                    for (int C = 0; C < D; ++C) s += simple[(A * D + B) * D + C] * bpull[C * D + P];
                    inner_P[(A * D + B) * D + P] = s;
                }
    }
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            for (int P = 0; P < D; ++P) {
                T s(0.0);
                for (int A = 0; A < D; ++A) s += c[M * D + A] * dB[P * n2 + A * D + N];
                if (inner) {
                    for (int A = 0; A < D; ++A)
                        for (int B = 0; B < D; ++B)
                            s += c[M * D + A] * inner_P[(A * D + B) * D + P] * b[B * D + N];
                }
                out[(M * D + N) * D + P] = s;
            }
}

// Christoffel coefficients of a metric. Output [M][N][P], symmetric in (N,P).
template <class T>
void eval_christoffel_coeffs(const MetricField& metric, const T* x, T* out) {
    int D = metric.dim();
    size_t n2 = static_cast<size_t>(D) * D;
    std::vector<T> ginv(n2);
    metric.eval_Ginv(x, ginv.data());
    std::vector<T> dG(static_cast<size_t>(D) * n2);  // [P][M][N]
    for (int P = 0; P < D; ++P) {
        auto xs = seed_direction(x, D, P);
        std::vector<Dual<T>> g(n2);
        metric.eval_G(xs.data(), g.data());
        for (size_t i = 0; i < n2; ++i) dG[P * n2 + i] = g[i].d;
    }
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            for (int P = 0; P < D; ++P) {
                T s(0.0);
                for (int Q = 0; Q < D; ++Q) {
                    T t = dG[P * n2 + N * D + Q] + dG[N * n2 + P * D + Q] - dG[Q * n2 + N * D + P];
                    s += ginv[M * D + Q] * t;
                }
                out[(M * D + N) * D + P] = 0.5 * s;
            }
}

class ZeroConnection : public ConnectionMixin<ZeroConnection> {
public:
    explicit ZeroConnection(int dim) : ConnectionMixin(ConnKind::zero, dim) {}
    template <class T>
    void coeffs_t(const T* /*x*/, T* out) const {
        for (size_t i = 0; i < size(); ++i) out[i] = T(0.0);
    }
};

class ExprConnection : public ConnectionMixin<ExprConnection> {
public:
    ExprConnection(int dim, std::vector<Expr> entries, ConnKind kind = ConnKind::synthetic)
        : ConnectionMixin(kind, dim), entries_(std::move(entries)) {
        if (entries_.size() != size()) throw std::invalid_argument("connection needs dim^3 entries");
    }
    template <class T>
    void coeffs_t(const T* x, T* out) const {
        for (size_t i = 0; i < entries_.size(); ++i) out[i] = entries_[i].eval(x, dim());
    }
    const std::vector<Expr>& entries() const { return entries_; }

private:
    std::vector<Expr> entries_;
};

class GaugeConnection : public ConnectionMixin<GaugeConnection> {
public:
    explicit GaugeConnection(ReferenceSystemStack stack)
        : ConnectionMixin(ConnKind::gauge, stack.dim()), stack_(std::move(stack)) {}
    template <class T>
    void coeffs_t(const T* x, T* out) const { eval_gauge_coeffs(stack_, x, out); }
    const ReferenceSystemStack& stack() const { return stack_; }

private:
    ReferenceSystemStack stack_;
};

class ChristoffelConnection : public ConnectionMixin<ChristoffelConnection> {
public:
    explicit ChristoffelConnection(MetricField metric)
        : ConnectionMixin(ConnKind::christoffel, metric.dim()), metric_(std::move(metric)) {}
    template <class T>
    void coeffs_t(const T* x, T* out) const { eval_christoffel_coeffs(metric_, x, out); }
    const MetricField& metric() const { return metric_; }

private:
    MetricField metric_;
};

// Pointwise average of the gauge and Christoffel coefficients; the metric is
// the stack's composite one unless supplied explicitly.
class HolonomicConnection : public ConnectionMixin<HolonomicConnection> {
public:
    explicit HolonomicConnection(ReferenceSystemStack stack)
        : ConnectionMixin(ConnKind::holonomic, stack.dim()),
          stack_(std::move(stack)),
          metric_(MetricField::from_stack(stack_)) {}
    HolonomicConnection(ReferenceSystemStack stack, MetricField metric)
        : ConnectionMixin(ConnKind::holonomic, stack.dim()),
          stack_(std::move(stack)),
          metric_(std::move(metric)) {}

    template <class T>
    void coeffs_t(const T* x, T* out) const {
        std::vector<T> gauge(size()), chr(size());
        eval_gauge_coeffs(stack_, x, gauge.data());
        eval_christoffel_coeffs(metric_, x, chr.data());
        for (size_t i = 0; i < size(); ++i) out[i] = 0.5 * (gauge[i] + chr[i]);
    }

    const ReferenceSystemStack& stack() const { return stack_; }
    const MetricField& metric() const { return metric_; }

private:
    ReferenceSystemStack stack_;
    MetricField metric_;
};

// Covariant derivative of an expression-backed tensor field. Output has the
// field's components in the leading slots and the derivative index P last:
// out[comp * D + P]. Upper slots add Gamma^M_{HP} t^H, lower slots subtract.
template <class T>
void eval_covariant_derivative(const TensorField& f, const ConnectionField& conn, const T* x, T* out) {
    int D = f.dim();
    size_t nc = f.size();
    std::vector<T> vals(nc);
    f.eval(x, vals.data());
    std::vector<T> gamma(conn.size());
    conn.coeffs(x, gamma.data());
    // partial derivatives first
    for (int P = 0; P < D; ++P) {
        auto xs = seed_direction(x, D, P);
        std::vector<Dual<T>> dv(nc);
        f.eval(xs.data(), dv.data());
        for (size_t i = 0; i < nc; ++i) out[i * D + P] = dv[i].d;
    }
    int rank = f.rank();
    if (rank == 0) return;
    std::vector<int> idx(rank, 0);
    std::vector<size_t> strides(rank);
    {
        size_t s = 1;
        for (int k = rank - 1; k >= 0; --k) { strides[k] = s; s *= D; }
    }
    for (size_t flat = 0; flat < nc; ++flat) {
        {
            size_t rem = flat;
            for (int k = 0; k < rank; ++k) { idx[k] = static_cast<int>(rem / strides[k]); rem %= strides[k]; }
        }
        for (int P = 0; P < D; ++P) {
            T corr(0.0);
            for (int k = 0; k < rank; ++k) {
                int own = idx[k];
                for (int H = 0; H < D; ++H) {
                    size_t other = flat + (H - own) * strides[k];
                    if (f.variance()[k] == Var::upper)
                        corr += gamma[(own * D + H) * D + P] * vals[other];
                    else
                        corr -= gamma[(H * D + own) * D + P] * vals[other];
                }
            }
            out[flat * D + P] += corr;
        }
    }
}

// Single-direction covariant derivative, matching the operation contract.
std::vector<double> covariant_derivative(const TensorField& f, const ConnectionField& conn,
                                         const Point& p, int dir_1_based);

}  // namespace affine

#endif
