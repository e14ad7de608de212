#ifndef AFFINE_TENSOR_HPP
#define AFFINE_TENSOR_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "affine/expr.hpp"
#include "affine/space.hpp"

namespace affine {

enum class Var { upper, lower };

// A tensor field is an evaluable map point -> D^rank components. Fields are
// either closed-form (one expression per component, AD-exact) or an opaque
// callback, which restricts differentiation to finite differences.
class TensorField {
public:
    using RawFn = std::function<void(const double* x, int dim, double* out)>;

    TensorField() = default;

    static TensorField scalar(int dim, Expr e) {
        TensorField f;
        f.dim_ = dim;
        f.comps_ = {std::move(e)};
        return f;
    }

    static TensorField from_exprs(int dim, std::vector<Var> variance, std::vector<Expr> comps) {
        TensorField f;
        f.dim_ = dim;
        f.variance_ = std::move(variance);
        size_t want = 1;
        for (size_t i = 0; i < f.variance_.size(); ++i) want *= dim;
        if (comps.size() != want)
            throw std::invalid_argument("tensor field needs " + std::to_string(want) + " components, got " +
                                        std::to_string(comps.size()));
        f.comps_ = std::move(comps);
        return f;
    }

    static TensorField vector_field(int dim, std::vector<Expr> comps) {
        return from_exprs(dim, {Var::upper}, std::move(comps));
    }

    static TensorField from_callback(int dim, std::vector<Var> variance, RawFn fn) {
        TensorField f;
        f.dim_ = dim;
        f.variance_ = std::move(variance);
        f.raw_ = std::move(fn);
        return f;
    }

    int dim() const { return dim_; }
    int rank() const { return static_cast<int>(variance_.size()); }
    const std::vector<Var>& variance() const { return variance_; }
    bool closed_form() const { return !raw_; }
    size_t size() const {
        size_t n = 1;
        for (int i = 0; i < rank(); ++i) n *= dim_;
        return n;
    }

    const Expr& expr_at(size_t flat) const { return comps_[flat]; }

    // Row-major flat offset for 0-based indices.
    size_t offset(const std::vector<int>& idx) const {
        size_t o = 0;
        for (int i : idx) o = o * dim_ + static_cast<size_t>(i);
        return o;
    }

    template <class T>
    void eval(const T* x, T* out) const {
        if (!closed_form()) throw std::logic_error("callback-backed field cannot be evaluated on AD scalars");
        for (size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i].eval(x, dim_);
    }

    void eval(const double* x, double* out) const {
        if (raw_) { raw_(x, dim_, out); return; }
        for (size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i].eval(x, dim_);
    }

    std::vector<double> eval_at(const Point& p) const {
        p.require_dim(dim_);
        std::vector<double> out(size());
        eval(p.coords.data(), out.data());
        return out;
    }

private:
    int dim_ = 0;
    std::vector<Var> variance_;
    std::vector<Expr> comps_;
    RawFn raw_;
};

}  // namespace affine

#endif
