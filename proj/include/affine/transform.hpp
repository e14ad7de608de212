#ifndef AFFINE_TRANSFORM_HPP
#define AFFINE_TRANSFORM_HPP

#include "affine/connection.hpp"

namespace affine {

// ---------------------------------------------------------------------------
// Frame transformations: the chart is kept, frame-bundle indices rotate.
// ---------------------------------------------------------------------------

// B'^A_{M'} = B^A_M (B_k)^M_{M'} as entrywise expressions.
FrameField apply_frame_to_frame(const FrameField& target, const FrameField& k);

// Outer layer composes with k; the pullback layer stays with the original
// reference system so the inner-derivative structure is unchanged.
ReferenceSystemStack apply_frame_to_stack(const ReferenceSystemStack& stack, const FrameField& k);

// Lower-index tensor components contract with B_k per slot (upper slots use
// the pointwise inverse and require k constant or with closed-form inverse).
TensorField apply_frame_to_tensor(const TensorField& t, const FrameField& k);

// Transformed gauge-connection coefficients via the transformation law,
// keeping the last index on the x chart:
//   Gamma'^{M'}_{N'P} = C_k Gamma_P B_k + C_k d_P B_k.
class FrameLawConnection : public ConnectionMixin<FrameLawConnection> {
public:
    FrameLawConnection(ConnectionPtr base, FrameField k)
        : ConnectionMixin(base->kind(), base->dim()), base_(std::move(base)), k_(std::move(k)) {}

    template <class T>
    void coeffs_t(const T* x, T* out) const {
        int D = dim();
        size_t n2 = static_cast<size_t>(D) * D;
        std::vector<T> bk(n2), ck(n2), g(size());
        k_.eval_B(x, bk.data());
        k_.eval_C(x, ck.data());
        base_->coeffs(x, g.data());
        std::vector<T> dbk(static_cast<size_t>(D) * n2);
        for (int P = 0; P < D; ++P) {
            auto xs = seed_direction(x, D, P);
            std::vector<Dual<T>> b(n2);
            k_.eval_B(xs.data(), b.data());
            for (size_t i = 0; i < n2; ++i) dbk[P * n2 + i] = b[i].d;
        }
        for (int Mp = 0; Mp < D; ++Mp)
            for (int Np = 0; Np < D; ++Np)
                for (int P = 0; P < D; ++P) {
                    T s(0.0);
                    for (int M = 0; M < D; ++M) {
                        for (int N = 0; N < D; ++N)
                            s += ck[Mp * D + M] * g[(M * D + N) * D + P] * bk[N * D + Np];
                        s += ck[Mp * D + M] * dbk[P * n2 + M * D + Np];
                    }
                    out[(Mp * D + Np) * D + P] = s;
                }
    }

private:
    ConnectionPtr base_;
    FrameField k_;
};

// Curvature under a frame transformation (gauge part is tensorial on the
// frame-bundle indices): K'^{M'}_{N'PQ} = C_k K B_k.
std::vector<double> frame_transform_curvature(const std::vector<double>& K, const FrameField& k,
                                              const Point& p);

// ---------------------------------------------------------------------------
// Coordinate transformations x' = phi(x), evaluated on the unprimed chart.
// ---------------------------------------------------------------------------

struct CoordMap {
    int dim = 0;
    std::vector<Expr> fwd;  // components of phi

    template <class T>
    void jacobian(const T* x, T* J) const {  // J^{M'}_M, row M'
        for (int M = 0; M < dim; ++M) {
            auto xs = seed_direction(x, dim, M);
            for (int Mp = 0; Mp < dim; ++Mp) J[Mp * dim + M] = fwd[Mp].eval(xs.data(), dim).d;
        }
    }

    template <class T>
    void inverse_jacobian(const T* x, T* b) const {  // b^M_{M'} = (J^{-1})
        std::vector<T> J(static_cast<size_t>(dim) * dim);
        jacobian(x, J.data());
        mat_inverse(J.data(), b, dim);
    }

    static CoordMap identity(int dim) {
        CoordMap m;
        m.dim = dim;
        for (int i = 1; i <= dim; ++i) m.fwd.push_back(Expr::coord(i));
        return m;
    }
};

// Connection rebuilt from first principles in the primed chart, evaluated at
// unprimed sample points: primed frames B' = B J^{-1}, primed derivatives
// d_{P'} = (J^{-1})^K_{P'} d_K, inner coefficients unchanged.
class PrimedConnection : public ConnectionMixin<PrimedConnection> {
public:
    PrimedConnection(ReferenceSystemStack stack, ConnKind kind, CoordMap map)
        : ConnectionMixin(kind, stack.dim()), stack_(std::move(stack)), map_(std::move(map)) {
        if (kind != ConnKind::gauge && kind != ConnKind::christoffel && kind != ConnKind::holonomic)
            throw std::invalid_argument("primed rebuild supports gauge, christoffel, holonomic");
    }

    template <class T>
    void coeffs_t(const T* x, T* out) const {
        size_t n3 = size();
        std::vector<T> gauge, chr;
        if (kind() == ConnKind::gauge || kind() == ConnKind::holonomic) {
            gauge.resize(n3);
            primed_gauge(x, gauge.data());
        }
        if (kind() == ConnKind::christoffel || kind() == ConnKind::holonomic) {
            chr.resize(n3);
            primed_christoffel(x, chr.data());
        }
        for (size_t i = 0; i < n3; ++i) {
            if (kind() == ConnKind::gauge) out[i] = gauge[i];
            else if (kind() == ConnKind::christoffel) out[i] = chr[i];
            else out[i] = 0.5 * (gauge[i] + chr[i]);
        }
    }

private:
    template <class T>
    void primed_frame(const T* x, T* Bp) const {  // B'^A_{M'} = B^A_M b^M_{M'}
        int D = dim();
        size_t n2 = static_cast<size_t>(D) * D;
        std::vector<T> b(n2), binv(n2);
        stack_.outer.eval_B(x, b.data());
        map_.inverse_jacobian(x, binv.data());
        for (int A = 0; A < D; ++A)
            for (int Mp = 0; Mp < D; ++Mp) {
                T s(0.0);
                for (int M = 0; M < D; ++M) s += b[A * D + M] * binv[M * D + Mp];
                Bp[A * D + Mp] = s;
            }
    }

    template <class T>
    void primed_metric(const T* x, T* Gp) const {  // G'_{M'N'} = b^M b^N G_MN
        int D = dim();
        size_t n2 = static_cast<size_t>(D) * D;
        MetricField metric = MetricField::from_stack(stack_);
        std::vector<T> g(n2), binv(n2);
        metric.eval_G(x, g.data());
        map_.inverse_jacobian(x, binv.data());
        for (int Mp = 0; Mp < D; ++Mp)
            for (int Np = 0; Np < D; ++Np) {
                T s(0.0);
                for (int M = 0; M < D; ++M)
                    for (int N = 0; N < D; ++N) s += binv[M * D + Mp] * binv[N * D + Np] * g[M * D + N];
                Gp[Mp * D + Np] = s;
            }
    }

    template <class T>
    void primed_gauge(const T* x, T* out) const {
        int D = dim();
        size_t n2 = static_cast<size_t>(D) * D;
        std::vector<T> Bp(n2), Cp(n2), binv(n2);
        primed_frame(x, Bp.data());
        mat_inverse(Bp.data(), Cp.data(), D);
        map_.inverse_jacobian(x, binv.data());
        // d_{P'} B' via the chain rule through unprimed partials
        std::vector<T> dBp(static_cast<size_t>(D) * n2, T(0.0));
        for (int K = 0; K < D; ++K) {
            auto xs = seed_direction(x, D, K);
            std::vector<Dual<T>> bp(n2);
            primed_frame(xs.data(), bp.data());
            for (int Pp = 0; Pp < D; ++Pp) {
                T w = binv[K * D + Pp];
                for (size_t i = 0; i < n2; ++i) dBp[Pp * n2 + i] += w * bp[i].d;
            }
        }
        for (int Mp = 0; Mp < D; ++Mp)
            for (int Np = 0; Np < D; ++Np)
                for (int Pp = 0; Pp < D; ++Pp) {
                    T s(0.0);
                    for (int A = 0; A < D; ++A) s += Cp[Mp * D + A] * dBp[Pp * n2 + A * D + Np];
                    out[(Mp * D + Np) * D + Pp] = s;
                }
        if (!stack_.trivial_inner()) {
            std::vector<T> simple(static_cast<size_t>(D) * n2);
            eval_simple_coeffs(stack_, x, simple.data());
            for (int Mp = 0; Mp < D; ++Mp)
                for (int Np = 0; Np < D; ++Np)
                    for (int Pp = 0; Pp < D; ++Pp) {
                        T s(0.0);
                        for (int A = 0; A < D; ++A)
                            for (int B = 0; B < D; ++B)
                                for (int C = 0; C < D; ++C)
                                    s += Cp[Mp * D + A] * simple[(A * D + B) * D + C] * Bp[C * D + Pp] *
                                         Bp[B * D + Np];
                        out[(Mp * D + Np) * D + Pp] += s;
                    }
        }
    }

    template <class T>
    void primed_christoffel(const T* x, T* out) const {
        int D = dim();
        size_t n2 = static_cast<size_t>(D) * D;
        std::vector<T> Gp(n2), Gpinv(n2), binv(n2);
        primed_metric(x, Gp.data());
        mat_inverse(Gp.data(), Gpinv.data(), D);
        map_.inverse_jacobian(x, binv.data());
        std::vector<T> dGp(static_cast<size_t>(D) * n2, T(0.0));
        for (int K = 0; K < D; ++K) {
            auto xs = seed_direction(x, D, K);
            std::vector<Dual<T>> gp(n2);
            primed_metric(xs.data(), gp.data());
            for (int Pp = 0; Pp < D; ++Pp) {
                T w = binv[K * D + Pp];
                for (size_t i = 0; i < n2; ++i) dGp[Pp * n2 + i] += w * gp[i].d;
            }
        }
        for (int M = 0; M < D; ++M)
            for (int N = 0; N < D; ++N)
                for (int P = 0; P < D; ++P) {
                    T s(0.0);
                    for (int Q = 0; Q < D; ++Q)
                        s += Gpinv[M * D + Q] *
                             (dGp[P * n2 + N * D + Q] + dGp[N * n2 + P * D + Q] - dGp[Q * n2 + N * D + P]);
                    out[(M * D + N) * D + P] = 0.5 * s;
                }
    }

    ReferenceSystemStack stack_;
    CoordMap map_;
};

// Law side of the coordinate transformation:
//   Gamma'^{M'}_{N'P'} = c^{M'}_M Gamma^M_{NP} b^N_{N'} b^P_{P'} + c^{M'}_M d b^M_{N'} / d x^{P'}.
class CoordLawConnection : public ConnectionMixin<CoordLawConnection> {
public:
    CoordLawConnection(ConnectionPtr base, CoordMap map)
        : ConnectionMixin(base->kind(), base->dim()), base_(std::move(base)), map_(std::move(map)) {}

    template <class T>
    void coeffs_t(const T* x, T* out) const {
        int D = dim();
        size_t n2 = static_cast<size_t>(D) * D;
        std::vector<T> J(n2), binv(n2), g(size());
        map_.jacobian(x, J.data());
        map_.inverse_jacobian(x, binv.data());
        base_->coeffs(x, g.data());
        // d b^M_{N'} / d x^{P'} = (J^{-1})^K_{P'} d_K (J^{-1})^M_{N'}
        std::vector<T> dbinv(static_cast<size_t>(D) * n2, T(0.0));
        for (int K = 0; K < D; ++K) {
            auto xs = seed_direction(x, D, K);
            std::vector<Dual<T>> bi(n2);
            map_.inverse_jacobian(xs.data(), bi.data());
            for (int Pp = 0; Pp < D; ++Pp) {
                T w = binv[K * D + Pp];
                for (size_t i = 0; i < n2; ++i) dbinv[Pp * n2 + i] += w * bi[i].d;
            }
        }
        for (int Mp = 0; Mp < D; ++Mp)
            for (int Np = 0; Np < D; ++Np)
                for (int Pp = 0; Pp < D; ++Pp) {
                    T s(0.0);
                    for (int M = 0; M < D; ++M) {
                        for (int N = 0; N < D; ++N)
                            for (int P = 0; P < D; ++P)
                                s += J[Mp * D + M] * g[(M * D + N) * D + P] * binv[N * D + Np] *
                                     binv[P * D + Pp];
                        s += J[Mp * D + M] * dbinv[Pp * n2 + M * D + Np];
                    }
                    out[(Mp * D + Np) * D + Pp] = s;
                }
    }

private:
    ConnectionPtr base_;
    CoordMap map_;
};

// Law verification: residual between both routes, max over samples/entries.
double verify_frame_transformation_law(const ReferenceSystemStack& stack, const FrameField& k,
                                       const std::vector<Point>& samples);
double verify_coordinate_transformation_law(const ReferenceSystemStack& stack, ConnKind kind,
                                            const CoordMap& map, const std::vector<Point>& samples);

}  // namespace affine

#endif
