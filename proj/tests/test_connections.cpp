#include <doctest.h>

#include "affine/curvature.hpp"
#include "test_helpers.hpp"

using namespace affine;
using testutil::max_diff;
using testutil::random_point;

namespace {

// FD oracle for the symmetrized inner coefficients, written directly from the
// defining formula with central differences; independent of the AD path.
std::vector<double> simple_coeffs_fd(const ReferenceSystemStack& stack, const Point& p, double h = 1e-6) {
    int D = stack.dim();
    size_t n2 = static_cast<size_t>(D) * D;
    const FrameField& fin = *stack.inner;
    std::vector<double> cin(n2), cpull(n2);
    fin.eval_C(p.coords.data(), cin.data());
    stack.pullback_layer().eval_C(p.coords.data(), cpull.data());
    std::vector<double> dB(D * n2);
    for (int M = 0; M < D; ++M) {
        Point pp = p, pm = p;
        pp.coords[M] += h;
        pm.coords[M] -= h;
        std::vector<double> bp(n2), bm(n2);
        fin.eval_B(pp.coords.data(), bp.data());
        fin.eval_B(pm.coords.data(), bm.data());
        for (size_t i = 0; i < n2; ++i) dB[M * n2 + i] = (bp[i] - bm[i]) / (2 * h);
    }
    std::vector<double> dXi(D * n2, 0.0);
    for (int C = 0; C < D; ++C)
        for (int M = 0; M < D; ++M)
            for (size_t i = 0; i < n2; ++i) dXi[C * n2 + i] += cpull[M * D + C] * dB[M * n2 + i];
    std::vector<double> out(D * n2, 0.0);
    for (int A = 0; A < D; ++A)
        for (int B = 0; B < D; ++B)
            for (int C = 0; C < D; ++C) {
                double s = 0.0;
                for (int Ap = 0; Ap < D; ++Ap)
                    s += cin[A * D + Ap] * (dXi[C * n2 + Ap * D + B] + dXi[B * n2 + Ap * D + C]);
                out[(A * D + B) * D + C] = 0.5 * s;
            }
    return out;
}

}  // namespace

TEST_CASE("simple connection: trivial inner layer gives zero") {
    auto stack = ReferenceSystemStack::trivial(5);
    Point p{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> out(125);
    eval_simple_coeffs(stack, p.coords.data(), out.data());
    CHECK(testutil::max_abs(out) == 0.0);
}

TEST_CASE("simple connection: diagonal stretched slot matches the FD oracle") {
    int D = 5;
    std::vector<Expr> diag = {Expr::constant(1), Expr::constant(1), Expr::constant(1),
                              Expr::constant(1.0) + Expr::coord(4), Expr::constant(1)};
    ReferenceSystemStack stack{"s", FrameField::identity(D), FrameField::diagonal(D, diag), std::nullopt};
    Point p{0.0, 0.0, 0.0, 0.0, 0.0};
    std::vector<double> ad(125);
    eval_simple_coeffs(stack, p.coords.data(), ad.data());
    // only nonzero entry: slot (4,4,4) 1-based = 1/(1+x4) = 1 at the origin
    int i = ((3 * D + 3) * D + 3);
    CHECK(ad[i] == doctest::Approx(1.0));
    Point q{0.3, -0.1, 0.2, 0.5, 0.1};
    std::vector<double> ad_q(125);
    eval_simple_coeffs(stack, q.coords.data(), ad_q.data());
    CHECK(ad_q[i] == doctest::Approx(1.0 / 1.5));
    CHECK(max_diff(ad_q, simple_coeffs_fd(stack, q)) < 1e-8);
}

TEST_CASE("simple connection is exactly symmetric in its lower pair") {
    auto stack = testutil::curved_stack(5);
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        Point p = random_point(rng, 5);
        std::vector<double> c(125);
        eval_simple_coeffs(stack, p.coords.data(), c.data());
        for (int A = 0; A < 5; ++A)
            for (int B = 0; B < 5; ++B)
                for (int C = 0; C < 5; ++C)
                    CHECK(c[(A * 5 + B) * 5 + C] == c[(A * 5 + C) * 5 + B]);
    }
}

TEST_CASE("gauge connection: identity stack and rotation stack") {
    int D = 5;
    GaugeConnection zero(ReferenceSystemStack::trivial(D));
    Point p{0.4, 0.0, 0.0, 0.0, 0.0};
    CHECK(testutil::max_abs(zero.at(p)) == 0.0);

    double k = 0.9;
    GaugeConnection rot(testutil::rotation_stack(D, k));
    auto g = rot.at(p);
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            for (int P = 0; P < D; ++P) {
                double want = 0.0;
                if (M == 3 && N == 4 && P == 0) want = -k;
                if (M == 4 && N == 3 && P == 0) want = k;
                CHECK(g[(M * D + N) * D + P] == doctest::Approx(want).epsilon(1e-12));
            }
}

TEST_CASE("gauge connection with trivial inner layer is pure frame derivative") {
    int D = 4;
    Rng rng(8);
    std::vector<Expr> b(D * D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            b[i * D + j] = Expr::constant(i == j ? 1.0 : 0.0) +
                           Expr::constant(rng.uniform(-0.2, 0.2)) * sin(Expr::coord(1 + (i + j) % D));
    ReferenceSystemStack stack{"f", FrameField(D, b), std::nullopt, std::nullopt};
    GaugeConnection conn(stack);
    Point p = random_point(rng, D);
    auto g = conn.at(p);
    // oracle: C * dB by finite differences
    size_t n2 = D * D;
    std::vector<double> c(n2);
    stack.outer.eval_C(p.coords.data(), c.data());
    double h = 1e-6;
    for (int P = 0; P < D; ++P) {
        Point pp = p, pm = p;
        pp.coords[P] += h;
        pm.coords[P] -= h;
        std::vector<double> bp(n2), bm(n2);
        stack.outer.eval_B(pp.coords.data(), bp.data());
        stack.outer.eval_B(pm.coords.data(), bm.data());
        for (int M = 0; M < D; ++M)
            for (int N = 0; N < D; ++N) {
                double db = 0.0;
                for (int A = 0; A < D; ++A) db += c[M * D + A] * (bp[A * D + N] - bm[A * D + N]) / (2 * h);
                CHECK(std::fabs(g[(M * D + N) * D + P] - db) < 1e-7);
            }
    }
}

TEST_CASE("christoffel: constant metric, stretched slot, symmetry") {
    int D = 5;
    Point p{0.2, 0.0, 0.0, 0.0, 0.0};
    ChristoffelConnection flat(MetricField::euclidean(D));
    CHECK(testutil::max_abs(flat.at(p)) == 0.0);

    std::vector<Expr> diag(D, Expr::constant(1.0));
    diag[D - 1] = pow(Expr::constant(1.0) + Expr::coord(1), 2.0);
    ChristoffelConnection chr(MetricField::diagonal(D, diag));
    auto g = chr.at(p);
    int i = (((D - 1) * D + (D - 1)) * D + 0);
    CHECK(g[i] == doctest::Approx(1.0 / 1.2));
    // FD oracle on the defining formula
    MetricField metric = MetricField::diagonal(D, diag);
    double h = 1e-6;
    auto ginv = metric.Ginv_at(p);
    std::vector<double> dG(D * D * D);
    for (int P = 0; P < D; ++P) {
        Point pp = p, pm = p;
        pp.coords[P] += h;
        pm.coords[P] -= h;
        auto gp = metric.G_at(pp), gm = metric.G_at(pm);
        for (int a = 0; a < D * D; ++a) dG[P * D * D + a] = (gp[a] - gm[a]) / (2 * h);
    }
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            for (int P = 0; P < D; ++P) {
                double s = 0.0;
                for (int Q = 0; Q < D; ++Q)
                    s += 0.5 * ginv[M * D + Q] *
                         (dG[P * D * D + N * D + Q] + dG[N * D * D + P * D + Q] - dG[Q * D * D + N * D + P]);
                CHECK(std::fabs(g[(M * D + N) * D + P] - s) < 1e-8);
                CHECK(g[(M * D + N) * D + P] == g[(M * D + P) * D + N]);
            }
}

TEST_CASE("holonomic connection averages gauge and christoffel") {
    int D = 5;
    double k = 1.3;
    auto stack = testutil::rotation_stack(D, k);
    HolonomicConnection holo(stack);
    Point p{-0.2, 0.4, 0.0, 0.1, 0.9};
    auto g = holo.at(p);
    CHECK(g[((3 * D + 4) * D + 0)] == doctest::Approx(-k / 2));
    CHECK(g[((4 * D + 3) * D + 0)] == doctest::Approx(k / 2));
    // lowered with G = identity: same values
    auto G = MetricField::from_stack(stack).G_at(p);
    double low451 = 0.0;
    for (int H = 0; H < D; ++H) low451 += G[3 * D + H] * g[((H * D + 4) * D + 0)];
    CHECK(low451 == doctest::Approx(-k / 2));
}

TEST_CASE("covariant derivative: zero connection, kronecker delta, leibniz") {
    int D = 4;
    ZeroConnection zero(D);
    Rng rng(12);
    TensorField u = TensorField::vector_field(
        D, {sin(Expr::coord(2)), Expr::coord(1) * Expr::coord(3), Expr::constant(1.0), exp(Expr::coord(4))});
    Point p = random_point(rng, D);
    JetEvaluator ad;
    for (int dir = 1; dir <= D; ++dir) {
        auto cd = covariant_derivative(u, zero, p, dir);
        auto pd = ad.partial(u, p, dir);
        CHECK(max_diff(cd, pd) < 1e-14);
    }

    std::vector<Expr> delta(D * D, Expr::constant(0.0));
    for (int i = 0; i < D; ++i) delta[i * D + i] = Expr::constant(1.0);
    TensorField mixed = TensorField::from_exprs(D, {Var::upper, Var::lower}, delta);
    HolonomicConnection conn(testutil::curved_stack(D, 0.5, 0.8));
    for (int dir = 1; dir <= D; ++dir)
        CHECK(testutil::max_abs(covariant_derivative(mixed, conn, p, dir)) < 1e-12);

    // (f u)^Q_{;P} = f_{,P} u^Q + f u^Q_{;P}
    Expr f = sin(Expr::coord(1)) + Expr::constant(0.5) * Expr::coord(4);
    std::vector<Expr> fu(D);
    for (int i = 0; i < D; ++i) fu[i] = f * u.expr_at(i);
    TensorField fuf = TensorField::vector_field(D, fu);
    TensorField fs = TensorField::scalar(D, f);
    for (int dir = 1; dir <= D; ++dir) {
        auto left = covariant_derivative(fuf, conn, p, dir);
        auto du = covariant_derivative(u, conn, p, dir);
        double fval = fs.eval_at(p)[0];
        double dfval = ad.partial(fs, p, dir)[0];
        auto uval = u.eval_at(p);
        for (int i = 0; i < D; ++i)
            CHECK(std::fabs(left[i] - (dfval * uval[i] + fval * du[i])) < 1e-10);
    }
}

TEST_CASE("metric compatibility probe reported against direct expansion") {
    int D = 5;
    auto stack = testutil::curved_stack(D);
    HolonomicConnection conn(stack);
    MetricField metric = MetricField::from_stack(stack);
    TensorField gfield = TensorField::from_exprs(D, {Var::lower, Var::lower}, metric.G_entries());
    Point p{0.3, -0.5, 0.2, 0.1, 0.4};
    JetEvaluator ad;
    for (int dir = 1; dir <= D; ++dir) {
        auto cd = covariant_derivative(gfield, conn, p, dir);
        // direct expansion: dG - Gamma^H_{MP} G_HN - Gamma^H_{NP} G_MH
        auto dG = ad.partial(gfield, p, dir);
        auto G = metric.G_at(p);
        auto gam = conn.at(p);
        for (int M = 0; M < D; ++M)
            for (int N = 0; N < D; ++N) {
                double s = dG[M * D + N];
                for (int H = 0; H < D; ++H) {
                    s -= gam[(H * D + M) * D + (dir - 1)] * G[H * D + N];
                    s -= gam[(H * D + N) * D + (dir - 1)] * G[M * D + H];
                }
                CHECK(std::fabs(cd[M * D + N] - s) < 1e-8);
            }
    }
}

TEST_CASE("coordinate transformation law: identity, linear, nonlinear") {
    int D = 5;
    auto stack = testutil::curved_stack(D);
    auto samples = sample_points(D, 6, 2024, 0.8);

    CHECK(verify_coordinate_transformation_law(stack, ConnKind::gauge, CoordMap::identity(D), samples) <
          1e-12);

    CoordMap lin;
    lin.dim = D;
    Rng rng(44);
    auto m = testutil::random_near_identity(rng, D, 0.2);
    for (int i = 0; i < D; ++i) {
        Expr s = Expr::constant(m[i * D + 0]) * Expr::coord(1);
        for (int j = 1; j < D; ++j) s = s + Expr::constant(m[i * D + j]) * Expr::coord(j + 1);
        lin.fwd.push_back(s);
    }
    // flat-connection case: inhomogeneous term vanishes for a linear map
    auto flat_stack = testutil::rotation_stack(D, 0.6);
    CHECK(verify_coordinate_transformation_law(flat_stack, ConnKind::gauge, lin, samples) < 1e-10);

    CoordMap warp;
    warp.dim = D;
    for (int i = 1; i <= D; ++i)
        warp.fwd.push_back(Expr::coord(i) + Expr::constant(0.1) * sin(Expr::coord(i)));
    CHECK(verify_coordinate_transformation_law(stack, ConnKind::gauge, warp, samples) < 1e-6);
    CHECK(verify_coordinate_transformation_law(stack, ConnKind::christoffel, warp, samples) < 1e-6);
    CHECK(verify_coordinate_transformation_law(stack, ConnKind::holonomic, warp, samples) < 1e-6);
}

TEST_CASE("frame transformation law holds for constant and varying frames") {
    int D = 5;
    auto stack = testutil::curved_stack(D);
    auto samples = sample_points(D, 6, 555, 0.8);

    CHECK(verify_frame_transformation_law(stack, FrameField::identity(D), samples) < 1e-13);

    Rng rng(66);
    FrameField kconst = FrameField::constant(D, testutil::random_near_identity(rng, D, 0.25));
    CHECK(verify_frame_transformation_law(stack, kconst, samples) < 1e-8);

    FrameField kvar = FrameField::plane_rotation(D, 3, 4, Expr::constant(0.3) * Expr::coord(2) + Expr::coord(1));
    CHECK(verify_frame_transformation_law(stack, kvar, samples) < 1e-8);
}
