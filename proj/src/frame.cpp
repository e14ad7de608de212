#include "affine/frame.hpp"

namespace affine {

FrameField FrameField::plane_rotation(int dim, int axis_a, int axis_b, const Expr& angle, double scale) {
    if (axis_a < 1 || axis_b < 1 || axis_a > dim || axis_b > dim || axis_a == axis_b)
        throw std::invalid_argument("rotation plane axes out of range");
    int a = axis_a - 1, b = axis_b - 1;
    std::vector<Expr> m(static_cast<size_t>(dim) * dim, Expr::constant(0.0));
    for (int i = 0; i < dim; ++i)
        if (i != a && i != b) m[i * dim + i] = Expr::constant(scale);
    m[a * dim + a] = scale * cos(angle);
    m[a * dim + b] = scale * (-sin(angle));
    m[b * dim + a] = scale * sin(angle);
    m[b * dim + b] = scale * cos(angle);
    return FrameField(dim, m);
}

void FrameField::premultiply(const FrameField& other) {
    int D = dim_;
    const auto& r = other.B_entries();
    std::vector<Expr> out(static_cast<size_t>(D) * D, Expr::constant(0.0));
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            Expr s = r[i * D + 0] * B_[0 * D + j];
            for (int k = 1; k < D; ++k) s = s + r[i * D + k] * B_[k * D + j];
            out[i * D + j] = s;
        }
    B_ = std::move(out);
    C_.clear();
}

bool FrameField::identity_like() const {
    for (int a = 0; a < dim_; ++a)
        for (int m = 0; m < dim_; ++m) {
            const Expr& e = B_[a * dim_ + m];
            if (!e.is_constant()) return false;
            if (e.constant_value() != (a == m ? 1.0 : 0.0)) return false;
        }
    return true;
}

double FrameField::inverse_consistency(const Point& p) const {
    std::vector<double> b(B_.size()), c(B_.size());
    eval_B(p.coords.data(), b.data());
    eval_C(p.coords.data(), c.data());
    double worst = 0.0;
    for (int m = 0; m < dim_; ++m)
        for (int n = 0; n < dim_; ++n) {
            double s = 0.0;
            for (int a = 0; a < dim_; ++a) s += c[m * dim_ + a] * b[a * dim_ + n];
            worst = std::max(worst, std::fabs(s - (m == n ? 1.0 : 0.0)));
        }
    return worst;
}

std::vector<double> frame_H_at(const FrameField& f, const Point& p) {
    int D = f.dim();
    std::vector<double> c(static_cast<size_t>(D) * D);
    f.eval_C(p.coords.data(), c.data());
    std::vector<double> h(static_cast<size_t>(D) * D, 0.0);
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) {
            double s = 0.0;
            for (int m = 0; m < D; ++m) s += c[m * D + a] * c[m * D + b];
            h[a * D + b] = s;
        }
    return h;
}

TimeMetricSplit time_metric(const FrameField& f, const SpaceSignature& sig, const Point& p,
                            const std::vector<double>& dx) {
    int D = f.dim();
    p.require_dim(D);
    if (static_cast<int>(dx.size()) != D) throw std::invalid_argument("displacement must have D entries");
    std::vector<double> b(static_cast<size_t>(D) * D);
    f.eval_B(p.coords.data(), b.data());
    std::vector<double> dxi(D, 0.0);
    for (int a = 0; a < D; ++a)
        for (int m = 0; m < D; ++m) dxi[a] += b[a * D + m] * dx[m];
    TimeMetricSplit out;
    for (int a = 0; a < D; ++a) {
        double q = dxi[a] * dxi[a];
        out.dxi0_sq += q;
        if (a < sig.external_dim) out.dxi_external_sq += q;
        else out.dxi_internal_sq += q;
    }
    for (int m = 0; m < D; ++m) {
        double q = dx[m] * dx[m];
        out.dx0_sq += q;
        if (m < sig.external_dim) out.dx_external_sq += q;
        else out.dx_internal_sq += q;
    }
    return out;
}

TransformationClass classify_transformation(const FrameField& f, const std::vector<Point>& samples,
                                            double tol) {
    if (samples.empty()) throw std::invalid_argument("classification needs a non-empty sample set");
    int D = f.dim();
    TransformationClass r;
    r.samples_used = static_cast<int>(samples.size());
    r.is_identity = true;
    r.is_flat = true;
    r.is_orthogonal = true;
    std::vector<double> ref;
    std::vector<double> b(static_cast<size_t>(D) * D);
    for (const Point& p : samples) {
        p.require_dim(D);
        f.eval_B(p.coords.data(), b.data());
        for (int a = 0; a < D; ++a)
            for (int m = 0; m < D; ++m)
                if (std::fabs(b[a * D + m] - (a == m ? 1.0 : 0.0)) > tol) r.is_identity = false;
        if (ref.empty()) ref = b;
        else
            for (size_t i = 0; i < b.size(); ++i)
                if (std::fabs(b[i] - ref[i]) > tol) r.is_flat = false;
        for (int m = 0; m < D; ++m)
            for (int n = 0; n < D; ++n) {
                double g = 0.0;
                for (int a = 0; a < D; ++a) g += b[a * D + m] * b[a * D + n];
                if (std::fabs(g - (m == n ? 1.0 : 0.0)) > tol) r.is_orthogonal = false;
            }
    }
    return r;
}

std::vector<Point> sample_points(int dim, int count, uint64_t seed, double box, bool include_corners) {
    Rng rng(seed);
    std::vector<Point> pts;
    pts.reserve(count + (include_corners ? (1 << std::min(dim, 10)) : 0));
    for (int i = 0; i < count; ++i) {
        std::vector<double> c(dim);
        for (int d = 0; d < dim; ++d) c[d] = rng.uniform(-box, box);
        pts.emplace_back(std::move(c));
    }
    if (include_corners && dim <= 10) {
        for (int mask = 0; mask < (1 << dim); ++mask) {
            std::vector<double> c(dim);
            for (int d = 0; d < dim; ++d) c[d] = (mask >> d) & 1 ? box : -box;
            pts.emplace_back(std::move(c));
        }
    }
    return pts;
}

}  // namespace affine
