#include "affine/inversion.hpp"

namespace affine {

InversionSpec InversionSpec::parity(const SpaceSignature& sig) {
    InversionSpec s;
    s.coordinate_flips.assign(sig.total_dim, 1.0);
    for (int i = 0; i < sig.external_dim; ++i) s.coordinate_flips[i] = -1.0;
    return s;
}

InversionSpec InversionSpec::charge(const SpaceSignature& sig) {
    InversionSpec s;
    s.coordinate_flips.assign(sig.total_dim, 1.0);
    for (int i = sig.external_dim; i < sig.total_dim; ++i) s.coordinate_flips[i] = -1.0;
    return s;
}

InversionSpec InversionSpec::time0(int dim) {
    InversionSpec s;
    s.coordinate_flips.assign(dim, 1.0);
    s.time_coordinate_flip = true;
    return s;
}

InversionSpec InversionSpec::metric_inversion(int dim) {
    InversionSpec s;
    s.coordinate_flips.assign(dim, 1.0);
    s.flip_external_metric = true;
    s.flip_internal_metric = true;
    return s;
}

InversionSpec InversionSpec::cpt0(int dim) {
    InversionSpec s;
    s.coordinate_flips.assign(dim, -1.0);
    s.time_coordinate_flip = true;
    return s;
}

InversionSpec InversionSpec::cpt(int dim) {
    InversionSpec s = cpt0(dim);
    s.flip_external_metric = true;
    s.flip_internal_metric = true;
    return s;
}

void InversionState::apply(const InversionSpec& spec) {
    if (spec.coordinate_flips.size() != signs.size())
        throw std::invalid_argument("inversion spec dimension mismatch");
    for (size_t i = 0; i < signs.size(); ++i) signs[i] *= spec.coordinate_flips[i];
    if (spec.time_coordinate_flip) time_reversed = !time_reversed;
    if (spec.flip_external_metric) external_metric_sign = -external_metric_sign;
    if (spec.flip_internal_metric) internal_metric_sign = -internal_metric_sign;
}

bool InversionState::is_identity() const {
    for (double s : signs)
        if (s != 1.0) return false;
    return !time_reversed && external_metric_sign == 1.0 && internal_metric_sign == 1.0;
}

Expr substitute_signs(const Expr& e, const std::vector<double>& signs) {
    const ExprNode& n = e.node();
    switch (n.op) {
        case Op::constant: return e;
        case Op::coord: {
            double s = signs.at(n.index - 1);
            return s == 1.0 ? e : Expr::constant(s) * e;
        }
        default: {
            Expr a = n.a ? substitute_signs(Expr(n.a), signs) : Expr();
            if (n.op == Op::neg) return -a;
            if (n.op == Op::sine) return sin(a);
            if (n.op == Op::cosine) return cos(a);
            if (n.op == Op::expn) return exp(a);
            if (n.op == Op::power) return pow(a, n.value);
            Expr b = substitute_signs(Expr(n.b), signs);
            if (n.op == Op::add) return a + b;
            if (n.op == Op::sub) return a - b;
            if (n.op == Op::mul) return a * b;
            return a / b;
        }
    }
}

namespace {

bool all_one(const std::vector<double>& signs) {
    for (double s : signs)
        if (s != 1.0) return false;
    return true;
}

}  // namespace

TensorField transform_tensor(const TensorField& t, const InversionState& state) {
    if (all_one(state.signs)) return t;
    if (!t.closed_form()) throw std::invalid_argument("cannot invert a callback-backed field");
    int D = t.dim();
    int rank = t.rank();
    size_t n = t.size();
    std::vector<Expr> out(n);
    std::vector<size_t> strides(rank, 1);
    for (int k = rank - 2; k >= 0; --k) strides[k] = strides[k + 1] * D;
    for (size_t flat = 0; flat < n; ++flat) {
        double factor = 1.0;
        size_t rem = flat;
        for (int k = 0; k < rank; ++k) {
            int idx = static_cast<int>(rem / strides[k]);
            rem %= strides[k];
            factor *= state.signs[idx];
        }
        Expr e = substitute_signs(t.expr_at(flat), state.signs);
        out[flat] = factor == 1.0 ? e : Expr::constant(factor) * e;
    }
    return TensorField::from_exprs(D, t.variance(), out);
}

FrameField transform_frame(const FrameField& f, const InversionState& state) {
    if (all_one(state.signs)) return f;
    int D = f.dim();
    const auto& b = f.B_entries();
    std::vector<Expr> out(b.size());
    for (int A = 0; A < D; ++A)
        for (int M = 0; M < D; ++M) {
            Expr e = substitute_signs(b[A * D + M], state.signs);
            out[A * D + M] = state.signs[M] == 1.0 ? e : Expr::constant(state.signs[M]) * e;
        }
    return FrameField(D, out);
}

ReferenceSystemStack transform_stack(const ReferenceSystemStack& s, const InversionState& state) {
    if (all_one(state.signs)) return s;
    ReferenceSystemStack out = s;
    out.outer = transform_frame(s.outer, state);
    if (s.inner) {
        // inner charts carry no x index: composition only
        int D = s.dim();
        const auto& b = s.inner->B_entries();
        std::vector<Expr> ib(b.size());
        for (size_t i = 0; i < b.size(); ++i) ib[i] = substitute_signs(b[i], state.signs);
        out.inner = FrameField(D, ib);
    }
    if (s.pullback) out.pullback = transform_frame(*s.pullback, state);
    return out;
}

std::vector<double> covariant_differential_along_path(const TensorField& rho,
                                                      const ReferenceSystemStack& stack,
                                                      const SpaceSignature& sig,
                                                      const std::vector<Point>& path,
                                                      const InversionState& state) {
    if (path.size() < 2) throw std::invalid_argument("path needs at least two points");
    int D = rho.dim();
    TensorField rho_t = transform_tensor(rho, state);
    HolonomicConnection conn(transform_stack(stack, state));
    std::vector<double> acc(static_cast<size_t>(D) * D, 0.0);
    std::vector<double> cd(rho_t.size() * D);
    double pf = state.parameter_factor();
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        std::vector<double> mid(D), dx(D);
        for (int q = 0; q < D; ++q) {
            double a = state.signs[q] * path[i][q];
            double b = state.signs[q] * path[i + 1][q];
            mid[q] = 0.5 * (a + b);
            dx[q] = pf * state.block_sign(q, sig) * (b - a);
        }
        eval_covariant_derivative(rho_t, conn, mid.data(), cd.data());
        for (int M = 0; M < D; ++M)
            for (int N = 0; N < D; ++N) {
                double s = 0.0;
                for (int Q = 0; Q < D; ++Q) s += cd[(M * static_cast<size_t>(D) + N) * D + Q] * dx[Q];
                acc[M * D + N] += s;
            }
    }
    return acc;
}

}  // namespace affine
