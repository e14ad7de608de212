#ifndef AFFINE_FRAME_HPP
#define AFFINE_FRAME_HPP

#include <optional>
#include <string>
#include <vector>

#include "affine/jet.hpp"
#include "affine/linalg.hpp"
#include "affine/rng.hpp"
#include "affine/space.hpp"
#include "affine/tensor.hpp"

namespace affine {

struct SingularFrameError : std::runtime_error {
    SingularFrameError(const std::string& what, const Point& p) : std::runtime_error(what), point(p) {}
    Point point;
};

// Frame field B^A_M(x) with inverse C^M_A(x). B is stored row-major with the
// frame index A as row and the coordinate index M as column; C the other way
// around, so that C*B = identity as a matrix product.
class FrameField {
public:
    FrameField() = default;
    FrameField(int dim, std::vector<Expr> B) : dim_(dim), B_(std::move(B)) { check_size(); }
    FrameField(int dim, std::vector<Expr> B, std::vector<Expr> C)
        : dim_(dim), B_(std::move(B)), C_(std::move(C)) { check_size(); }

    static FrameField identity(int dim) {
        std::vector<Expr> b(static_cast<size_t>(dim) * dim, Expr::constant(0.0));
        for (int i = 0; i < dim; ++i) b[i * dim + i] = Expr::constant(1.0);
        return FrameField(dim, b);
    }

    static FrameField diagonal(int dim, const std::vector<Expr>& diag) {
        std::vector<Expr> b(static_cast<size_t>(dim) * dim, Expr::constant(0.0));
        for (int i = 0; i < dim; ++i) b[i * dim + i] = diag[i];
        return FrameField(dim, b);
    }

    static FrameField constant(int dim, const std::vector<double>& m) {
        std::vector<Expr> b(static_cast<size_t>(dim) * dim);
        for (size_t i = 0; i < b.size(); ++i) b[i] = Expr::constant(m[i]);
        return FrameField(dim, b);
    }

    // Internal block c * R(angle) acting on the plane (axis_a, axis_b)
    // (1-based), identity elsewhere. Composable via apply_rotation.
    static FrameField plane_rotation(int dim, int axis_a, int axis_b, const Expr& angle, double scale = 1.0);

    // Multiply this frame (on the left of the coordinate index) by another
    // rotation: B <- R_new * B entrywise expressions.
    void premultiply(const FrameField& other);

    int dim() const { return dim_; }
    bool identity_like() const;
    bool has_closed_inverse() const { return !C_.empty(); }
    const std::vector<Expr>& B_entries() const { return B_; }

    template <class T>
    void eval_B(const T* x, T* out) const {
        for (size_t i = 0; i < B_.size(); ++i) out[i] = B_[i].eval(x, dim_);
    }

    template <class T>
    void eval_C(const T* x, T* out) const {
        if (!C_.empty()) {
            for (size_t i = 0; i < C_.size(); ++i) out[i] = C_[i].eval(x, dim_);
            return;
        }
        std::vector<T> b(B_.size());
        eval_B(x, b.data());
        mat_inverse(b.data(), out, dim_);
    }

    double det_at(const Point& p) const {
        std::vector<double> b(B_.size());
        eval_B(p.coords.data(), b.data());
        return mat_det(b.data(), dim_);
    }

    // Pointwise inverse with the singularity contract: |det| < 1e-12 rejects.
    std::vector<double> inverse_at(const Point& p) const {
        p.require_dim(dim_);
        std::vector<double> b(B_.size()), c(B_.size());
        eval_B(p.coords.data(), b.data());
        double det = mat_det(b.data(), dim_);
        if (std::fabs(det) < 1e-12) throw SingularFrameError("frame is singular (|det| < 1e-12)", p);
        mat_inverse(b.data(), c.data(), dim_);
        return c;
    }

    // When a closed-form C is supplied, verify C*B = identity at the point.
    double inverse_consistency(const Point& p) const;

    TensorField as_tensor() const {
        return TensorField::from_exprs(dim_, {Var::upper, Var::lower}, B_);
    }

private:
    void check_size() const {
        if (B_.size() != static_cast<size_t>(dim_) * dim_)
            throw std::invalid_argument("frame field needs dim*dim entries");
        if (!C_.empty() && C_.size() != B_.size())
            throw std::invalid_argument("closed-form inverse needs dim*dim entries");
    }

    int dim_ = 0;
    std::vector<Expr> B_;
    std::vector<Expr> C_;
};

// Two-layer reference system: outer carries chart xi over the global chart x,
// inner sits above it, expressed over x as well. The pullback layer supplies
// the chain-rule Jacobian for inner-chart derivatives; it defaults to the
// outer layer and deliberately stays fixed under frame transformations.
struct ReferenceSystemStack {
    std::string label;
    FrameField outer;
    std::optional<FrameField> inner;
    std::optional<FrameField> pullback;

    int dim() const { return outer.dim(); }
    bool trivial_inner() const { return !inner.has_value() || inner->identity_like(); }
    const FrameField& pullback_layer() const { return pullback ? *pullback : outer; }

    static ReferenceSystemStack trivial(int dim, std::string label = "e") {
        return {std::move(label), FrameField::identity(dim), std::nullopt, std::nullopt};
    }

    // Composite frame entries (inner * outer) as expressions over x.
    std::vector<Expr> composite_B() const {
        if (!inner) return outer.B_entries();
        int D = dim();
        const auto& bi = inner->B_entries();
        const auto& bo = outer.B_entries();
        std::vector<Expr> out(static_cast<size_t>(D) * D, Expr::constant(0.0));
        for (int a = 0; a < D; ++a)
            for (int m = 0; m < D; ++m) {
                Expr s = bi[a * D + 0] * bo[0 * D + m];
                for (int k = 1; k < D; ++k) s = s + bi[a * D + k] * bo[k * D + m];
                out[a * D + m] = s;
            }
        return out;
    }
};

// Metric stored as closed-form expressions for G_MN; the inverse is taken
// pointwise (exact under AD), or supplied closed form.
class MetricField {
public:
    MetricField() = default;
    MetricField(int dim, std::vector<Expr> G) : dim_(dim), G_(std::move(G)) {}

    static MetricField euclidean(int dim) {
        std::vector<Expr> g(static_cast<size_t>(dim) * dim, Expr::constant(0.0));
        for (int i = 0; i < dim; ++i) g[i * dim + i] = Expr::constant(1.0);
        return MetricField(dim, g);
    }

    static MetricField from_frame(const FrameField& f) { return from_frame_entries(f.dim(), f.B_entries()); }

    static MetricField from_stack(const ReferenceSystemStack& s) {
        return from_frame_entries(s.dim(), s.composite_B());
    }

    static MetricField diagonal(int dim, const std::vector<Expr>& diag) {
        std::vector<Expr> g(static_cast<size_t>(dim) * dim, Expr::constant(0.0));
        for (int i = 0; i < dim; ++i) g[i * dim + i] = diag[i];
        return MetricField(dim, g);
    }

    int dim() const { return dim_; }
    const std::vector<Expr>& G_entries() const { return G_; }

    template <class T>
    void eval_G(const T* x, T* out) const {
        for (size_t i = 0; i < G_.size(); ++i) out[i] = G_[i].eval(x, dim_);
    }

    template <class T>
    void eval_Ginv(const T* x, T* out) const {
        std::vector<T> g(G_.size());
        eval_G(x, g.data());
        mat_inverse(g.data(), out, dim_);
    }

    std::vector<double> G_at(const Point& p) const {
        std::vector<double> g(G_.size());
        eval_G(p.coords.data(), g.data());
        return g;
    }
    std::vector<double> Ginv_at(const Point& p) const {
        std::vector<double> g(G_.size());
        eval_Ginv(p.coords.data(), g.data());
        return g;
    }

private:
    static MetricField from_frame_entries(int D, const std::vector<Expr>& b) {
        std::vector<Expr> g(static_cast<size_t>(D) * D);
        for (int m = 0; m < D; ++m)
            for (int n = 0; n < D; ++n) {
                Expr s = b[0 * D + m] * b[0 * D + n];
                for (int a = 1; a < D; ++a) s = s + b[a * D + m] * b[a * D + n];
                g[m * D + n] = s;
            }
        return MetricField(D, g);
    }

    int dim_ = 0;
    std::vector<Expr> G_;
};

// H_AB = C^M_A C^M_B summed over M (used for the dual total-differential).
std::vector<double> frame_H_at(const FrameField& f, const Point& p);

struct TimeMetricSplit {
    double dxi0_sq = 0.0;        // G_MN dx^M dx^N
    double dx0_sq = 0.0;         // sum (dx^M)^2
    double dxi_external_sq = 0.0;
    double dxi_internal_sq = 0.0;
    double dx_external_sq = 0.0;
    double dx_internal_sq = 0.0;
};

TimeMetricSplit time_metric(const FrameField& f, const SpaceSignature& sig, const Point& p,
                            const std::vector<double>& dx);

struct TransformationClass {
    bool is_identity = false;
    bool is_flat = false;
    bool is_orthogonal = false;
    int samples_used = 0;
};

// Flags evaluated on a finite sample set: random draws plus box corners when
// the dimension allows. Global statements are sample-scale honest only.
TransformationClass classify_transformation(const FrameField& f, const std::vector<Point>& samples,
                                            double tol = 1e-9);

std::vector<Point> sample_points(int dim, int count, uint64_t seed, double box = 1.0,
                                 bool include_corners = false);

// Default sample set for flatness/orthogonality classification: 32 random
// draws plus the box corners.
inline std::vector<Point> classification_samples(int dim, uint64_t seed, double box = 1.0) {
    return sample_points(dim, 32, seed, box, true);
}

}  // namespace affine

#endif
