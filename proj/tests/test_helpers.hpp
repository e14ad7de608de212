#ifndef AFFINE_TEST_HELPERS_HPP
#define AFFINE_TEST_HELPERS_HPP

#include <cmath>
#include <vector>

#include "affine/frame.hpp"
#include "affine/rng.hpp"

namespace testutil {

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

// Central finite difference of an arbitrary component functor; the
// implementation-independent oracle used throughout the tests.
template <class F>
std::vector<double> fd_derivative(F&& eval, const affine::Point& p, int dir_1based, size_t ncomp,
                                  double h = 1e-5) {
    affine::Point pp = p, pm = p;
    pp.coords[dir_1based - 1] += h;
    pm.coords[dir_1based - 1] -= h;
    std::vector<double> vp = eval(pp), vm = eval(pm), out(ncomp);
    for (size_t i = 0; i < ncomp; ++i) out[i] = (vp[i] - vm[i]) / (2.0 * h);
    return out;
}

inline affine::Point random_point(affine::Rng& rng, int dim, double box = 1.0) {
    std::vector<double> c(dim);
    for (int i = 0; i < dim; ++i) c[i] = rng.uniform(-box, box);
    return affine::Point(std::move(c));
}

// Well-conditioned random constant matrix: identity plus a small perturbation.
inline std::vector<double> random_near_identity(affine::Rng& rng, int dim, double eps = 0.3) {
    std::vector<double> m(static_cast<size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m[i * dim + j] = (i == j ? 1.0 : 0.0) + rng.uniform(-eps, eps);
    return m;
}

// D=5 stack with an internal rotation in the (4,5) plane, angle k*x1, and a
// trivial inner layer. Pure gauge: curvature vanishes.
inline affine::ReferenceSystemStack rotation_stack(int dim, double k_angle, int axis_a = 4, int axis_b = 5) {
    using namespace affine;
    Expr angle = Expr::constant(k_angle) * Expr::coord(1);
    FrameField outer = FrameField::plane_rotation(dim, axis_a, axis_b, angle);
    return ReferenceSystemStack{"rot", outer, std::nullopt, std::nullopt};
}

// Curved two-layer stack: the outer layer stretches the last two axes, the
// inner layer rotates them and undoes the stretch, so the composite frame is
// a clean rotation while the layers fail to commute. The mixed symmetric and
// antisymmetric content makes the connection genuinely curved.
inline affine::ReferenceSystemStack curved_stack(int dim, double k_rot = 0.7, double amp = 0.4) {
    using namespace affine;
    int a = dim - 1, b = dim;  // 1-based plane axes
    Expr s1 = Expr::constant(1.0) + Expr::constant(amp) * sin(Expr::coord(1));
    Expr s2 = Expr::constant(1.0) + Expr::constant(0.5 * amp) * cos(Expr::coord(2));
    std::vector<Expr> odiag(dim, Expr::constant(1.0)), idiag(dim, Expr::constant(1.0));
    odiag[a - 1] = s1;
    odiag[b - 1] = s2;
    idiag[a - 1] = Expr::constant(1.0) / s1;
    idiag[b - 1] = Expr::constant(1.0) / s2;
    FrameField outer = FrameField::diagonal(dim, odiag);
    FrameField inner = FrameField::diagonal(dim, idiag);
    inner.premultiply(FrameField::plane_rotation(dim, a, b, Expr::constant(k_rot) * Expr::coord(2)));
    return ReferenceSystemStack{"curved", outer, inner, std::nullopt};
}

}  // namespace testutil

#endif
