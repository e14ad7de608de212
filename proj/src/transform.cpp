#include "affine/transform.hpp"

#include "affine/curvature.hpp"

namespace affine {

std::vector<double> covariant_derivative(const TensorField& f, const ConnectionField& conn,
                                         const Point& p, int dir_1_based) {
    p.require_dim(f.dim());
    if (dir_1_based < 1 || dir_1_based > f.dim()) throw std::invalid_argument("direction out of range");
    std::vector<double> all(f.size() * f.dim());
    eval_covariant_derivative(f, conn, p.coords.data(), all.data());
    std::vector<double> out(f.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = all[i * f.dim() + (dir_1_based - 1)];
    return out;
}

FrameField apply_frame_to_frame(const FrameField& target, const FrameField& k) {
    int D = target.dim();
    if (k.dim() != D) throw std::invalid_argument("frame transformation dimension mismatch");
    const auto& b = target.B_entries();
    const auto& bk = k.B_entries();
    std::vector<Expr> out(static_cast<size_t>(D) * D, Expr::constant(0.0));
    for (int A = 0; A < D; ++A)
        for (int Mp = 0; Mp < D; ++Mp) {
            Expr s = b[A * D + 0] * bk[0 * D + Mp];
            for (int M = 1; M < D; ++M) s = s + b[A * D + M] * bk[M * D + Mp];
            out[A * D + Mp] = s;
        }
    return FrameField(D, out);
}

ReferenceSystemStack apply_frame_to_stack(const ReferenceSystemStack& stack, const FrameField& k) {
    ReferenceSystemStack out = stack;
    out.pullback = stack.pullback_layer();
    out.outer = apply_frame_to_frame(stack.outer, k);
    out.label = stack.label + "'";
    return out;
}

TensorField apply_frame_to_tensor(const TensorField& t, const FrameField& k) {
    if (!t.closed_form()) throw std::invalid_argument("cannot transform a callback-backed field");
    int D = t.dim();
    int rank = t.rank();
    const auto& bk = k.B_entries();
    std::vector<Expr> ck;
    bool need_upper = false;
    for (Var v : t.variance()) need_upper |= (v == Var::upper);
    if (need_upper) {
        // Upper slots need the inverse; supported for constant k.
        std::vector<double> vals(static_cast<size_t>(D) * D), inv(vals.size());
        bool constant = true;
        for (const auto& e : bk) constant &= e.is_constant();
        if (!constant) throw std::invalid_argument("upper-index transformation needs a constant frame");
        for (size_t i = 0; i < vals.size(); ++i) vals[i] = bk[i].constant_value();
        mat_inverse(vals.data(), inv.data(), D);
        ck.resize(vals.size());
        for (size_t i = 0; i < vals.size(); ++i) ck[i] = Expr::constant(inv[i]);
    }
    size_t n = t.size();
    std::vector<Expr> out(n, Expr::constant(0.0));
    std::vector<size_t> strides(rank, 1);
    for (int kk = rank - 2; kk >= 0; --kk) strides[kk] = strides[kk + 1] * D;
    std::vector<int> idx(rank, 0);
    for (size_t flat = 0; flat < n; ++flat) {
        size_t rem = flat;
        for (int s = 0; s < rank; ++s) { idx[s] = static_cast<int>(rem / strides[s]); rem %= strides[s]; }
        // out[idx'] = sum over old indices of product of factors
        // iterate over all old index tuples
        std::vector<int> old(rank, 0);
        Expr acc = Expr::constant(0.0);
        bool first = true;
        auto is_zero = [](const Expr& e) { return e.is_constant() && e.constant_value() == 0.0; };
        for (;;) {
            size_t oflat = 0;
            for (int s = 0; s < rank; ++s) oflat = oflat * D + old[s];
            const Expr& src = t.expr_at(oflat);
            bool skip = is_zero(src);
            Expr term = Expr::constant(1.0);
            bool term_first = true;
            for (int s = 0; !skip && s < rank; ++s) {
                const Expr& factor = (t.variance()[s] == Var::lower)
                                         ? bk[old[s] * D + idx[s]]   // B_k^M_{M'}
                                         : ck[idx[s] * D + old[s]];  // C_k^{M'}_M
                if (is_zero(factor)) skip = true;
                else {
                    term = term_first ? factor : term * factor;
                    term_first = false;
                }
            }
            if (!skip) {
                Expr contrib = term * src;
                acc = first ? contrib : acc + contrib;
                first = false;
            }
            int s = rank - 1;
            while (s >= 0 && ++old[s] == D) { old[s] = 0; --s; }
            if (s < 0) break;
        }
        out[flat] = acc;
    }
    return TensorField::from_exprs(D, t.variance(), out);
}

std::vector<double> frame_transform_curvature(const std::vector<double>& K, const FrameField& k,
                                              const Point& p) {
    int D = k.dim();
    size_t n2 = static_cast<size_t>(D) * D;
    std::vector<double> bk(n2), ck(n2);
    k.eval_B(p.coords.data(), bk.data());
    k.eval_C(p.coords.data(), ck.data());
    std::vector<double> out(K.size(), 0.0);
    auto at = [D](int M, int N, int P, int Q) { return ((static_cast<size_t>(M) * D + N) * D + P) * D + Q; };
    for (int Mp = 0; Mp < D; ++Mp)
        for (int Np = 0; Np < D; ++Np)
            for (int P = 0; P < D; ++P)
                for (int Q = 0; Q < D; ++Q) {
                    double s = 0.0;
                    for (int M = 0; M < D; ++M)
                        for (int N = 0; N < D; ++N)
                            s += ck[Mp * D + M] * K[at(M, N, P, Q)] * bk[N * D + Np];
                    out[at(Mp, Np, P, Q)] = s;
                }
    return out;
}

namespace {

double max_entry_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace

double verify_frame_transformation_law(const ReferenceSystemStack& stack, const FrameField& k,
                                       const std::vector<Point>& samples) {
    auto base = std::make_shared<GaugeConnection>(stack);
    FrameLawConnection law(base, k);
    GaugeConnection direct(apply_frame_to_stack(stack, k));
    double worst = 0.0;
    for (const Point& p : samples) worst = std::max(worst, max_entry_diff(law.at(p), direct.at(p)));
    return worst;
}

double verify_coordinate_transformation_law(const ReferenceSystemStack& stack, ConnKind kind,
                                            const CoordMap& map, const std::vector<Point>& samples) {
    ConnectionPtr base;
    if (kind == ConnKind::gauge) base = std::make_shared<GaugeConnection>(stack);
    else if (kind == ConnKind::christoffel)
        base = std::make_shared<ChristoffelConnection>(MetricField::from_stack(stack));
    else base = std::make_shared<HolonomicConnection>(stack);
    CoordLawConnection law(base, map);
    PrimedConnection direct(stack, kind, map);
    double worst = 0.0;
    for (const Point& p : samples) worst = std::max(worst, max_entry_diff(law.at(p), direct.at(p)));
    return worst;
}

}  // namespace affine
