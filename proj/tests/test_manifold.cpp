#include <doctest.h>

#include "affine/jet.hpp"
#include "test_helpers.hpp"

using namespace affine;
using testutil::fd_derivative;
using testutil::max_diff;
using testutil::random_point;

namespace {
const JetEvaluator kAd{DiffMode::forward_ad, 1e-5};
const JetEvaluator kFd{DiffMode::central_fd, 1e-5};
}  // namespace

TEST_CASE("field evaluation: constants, identity matrix, closed form") {
    int D = 5;
    TensorField c7 = TensorField::scalar(D, Expr::constant(7.0));
    Point p{0.3, -0.2, 1.0, 0.0, 0.5};
    CHECK(evaluate_field(c7, p) == std::vector<double>{7.0});

    std::vector<Expr> id(25, Expr::constant(0.0));
    for (int i = 0; i < 5; ++i) id[i * 5 + i] = Expr::constant(1.0);
    TensorField idf = TensorField::from_exprs(D, {Var::upper, Var::lower}, id);
    auto v = evaluate_field(idf, p);
    for (int a = 0; a < 5; ++a)
        for (int m = 0; m < 5; ++m) CHECK(v[a * 5 + m] == (a == m ? 1.0 : 0.0));

    TensorField prod = TensorField::scalar(D, Expr::coord(1) * Expr::coord(2));
    CHECK(evaluate_field(prod, Point{2, 3, 0, 0, 0})[0] == doctest::Approx(6.0));
}

TEST_CASE("field evaluation rejects wrong dimension") {
    TensorField f = TensorField::scalar(5, Expr::coord(1));
    CHECK_THROWS_AS(evaluate_field(f, Point{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("partial derivative basics") {
    int D = 5;
    TensorField c = TensorField::scalar(D, Expr::constant(3.0));
    Point p{0, 0, 0, 0, 0};
    CHECK(kAd.partial(c, p, 1)[0] == 0.0);

    TensorField s = TensorField::scalar(D, sin(Expr::coord(1)));
    CHECK(kAd.partial(s, p, 1)[0] == doctest::Approx(1.0).epsilon(1e-8));

    TensorField e = TensorField::scalar(D, exp(Expr::coord(1) * Expr::coord(2)));
    Point q{0.3, 0.7, 0.1, -0.4, 0.2};
    for (int dir = 1; dir <= D; ++dir) {
        double ad = kAd.partial(e, q, dir)[0];
        double fd = kFd.partial(e, q, dir)[0];
        CHECK(std::fabs(ad - fd) < 1e-6);
    }
}

TEST_CASE("partial derivative reports singular evaluation") {
    TensorField f = TensorField::scalar(2, Expr::constant(1.0) / Expr::coord(1));
    CHECK_THROWS_AS(kAd.partial(f, Point{0.0, 0.0}, 1), EvaluationError);
}

TEST_CASE("derivative linearity at random points") {
    int D = 4;
    Rng rng(11);
    TensorField F = TensorField::scalar(D, sin(Expr::coord(1)) * Expr::coord(2));
    TensorField G = TensorField::scalar(D, exp(Expr::coord(3)) + Expr::coord(4) * Expr::coord(1));
    for (int trial = 0; trial < 50; ++trial) {
        double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        TensorField lin = TensorField::scalar(
            D, Expr::constant(a) * F.expr_at(0) + Expr::constant(b) * G.expr_at(0));
        Point p = random_point(rng, D);
        for (int dir = 1; dir <= D; ++dir) {
            double got = kAd.partial(lin, p, dir)[0];
            double want = a * kAd.partial(F, p, dir)[0] + b * kAd.partial(G, p, dir)[0];
            CHECK(std::fabs(got - want) < 1e-10);
        }
    }
}

TEST_CASE("second derivatives commute for smooth closed forms") {
    int D = 3;
    Rng rng(7);
    Expr f = sin(Expr::coord(1) * Expr::coord(2)) + exp(Expr::coord(3)) * Expr::coord(1);
    for (int trial = 0; trial < 100; ++trial) {
        Point p = random_point(rng, D);
        for (int a = 1; a <= D; ++a)
            for (int b = a + 1; b <= D; ++b) {
                auto dfa = [&](const Point& q) {
                    return kAd.partial(TensorField::scalar(D, f), q, a);
                };
                auto dfb = [&](const Point& q) {
                    return kAd.partial(TensorField::scalar(D, f), q, b);
                };
                double dab = fd_derivative(dfa, p, b, 1)[0];
                double dba = fd_derivative(dfb, p, a, 1)[0];
                CHECK(std::fabs(dab - dba) < 1e-5);
            }
    }
}

TEST_CASE("AD and FD agree on primitive-built fields") {
    int D = 5;
    Rng rng(23);
    std::vector<Expr> exprs = {
        sin(Expr::coord(1)) * cos(Expr::coord(2)),
        exp(Expr::coord(3) * Expr::constant(0.5)),
        pow(Expr::constant(1.0) + Expr::coord(4) * Expr::coord(4), 1.5),
        Expr::coord(5) / (Expr::constant(3.5) + Expr::coord(1)),
    };
    for (const Expr& e : exprs) {
        TensorField f = TensorField::scalar(D, e);
        for (int trial = 0; trial < 25; ++trial) {
            Point p = random_point(rng, D, 2.0);
            for (int dir = 1; dir <= D; ++dir)
                CHECK(std::fabs(kAd.partial(f, p, dir)[0] - kFd.partial(f, p, dir)[0]) < 1e-6);
        }
    }
}

TEST_CASE("lie bracket: antisymmetry, constants, closed form vs oracle") {
    int D = 5;
    std::vector<Expr> xc(D, Expr::constant(0.0)), yc(D, Expr::constant(0.0));
    xc[0] = Expr::coord(2);
    yc[1] = Expr::coord(1);
    TensorField X = TensorField::vector_field(D, xc);
    TensorField Y = TensorField::vector_field(D, yc);
    Point p{0.4, -0.7, 0.2, 0.0, 1.0};

    auto xx = kAd.lie_bracket(X, X, p);
    CHECK(testutil::max_abs(xx) == 0.0);

    std::vector<Expr> cc(D, Expr::constant(2.0));
    TensorField Cst = TensorField::vector_field(D, cc);
    CHECK(testutil::max_abs(kAd.lie_bracket(Cst, Cst, p)) == 0.0);

    // X = x2 e1, Y = x1 e2: [X,Y] = x2 e2 - x1 e1
    auto br = kAd.lie_bracket(X, Y, p);
    CHECK(br[0] == doctest::Approx(-p[0]));
    CHECK(br[1] == doctest::Approx(p[1]));
    auto fd = kFd.lie_bracket(X, Y, p);
    CHECK(max_diff(br, fd) < 1e-6);
}

TEST_CASE("lie bracket satisfies the Jacobi identity") {
    int D = 3;
    Rng rng(5);
    auto mkfield = [&](int seed) {
        Rng r(seed);
        std::vector<Expr> c;
        for (int i = 0; i < D; ++i) {
            Expr e = Expr::constant(r.uniform(-1, 1)) * sin(Expr::coord(1 + (seed + i) % D)) +
                     Expr::constant(r.uniform(-1, 1)) * Expr::coord(1 + (seed + i + 1) % D);
            c.push_back(e);
        }
        return TensorField::vector_field(D, c);
    };
    TensorField X = mkfield(1), Y = mkfield(2), Z = mkfield(3);
    // Jacobi via bracket fields evaluated with nested finite differencing of
    // the outer bracket; tolerance reflects the FD noise floor.
    auto bracket_field = [&](const TensorField& A, const TensorField& B) {
        return TensorField::from_callback(D, {Var::upper}, [&, A, B](const double* x, int dim, double* out) {
            Point q(std::vector<double>(x, x + dim));
            auto v = kAd.lie_bracket(A, B, q);
            std::copy(v.begin(), v.end(), out);
        });
    };
    TensorField XY = bracket_field(X, Y), YZ = bracket_field(Y, Z), ZX = bracket_field(Z, X);
    for (int trial = 0; trial < 10; ++trial) {
        Point p = random_point(rng, D);
        auto a = kFd.lie_bracket(XY, Z, p);
        auto b = kFd.lie_bracket(YZ, X, p);
        auto c = kFd.lie_bracket(ZX, Y, p);
        for (int i = 0; i < D; ++i) CHECK(std::fabs(a[i] + b[i] + c[i]) < 1e-5);
    }
}

TEST_CASE("expression parser round trips and rejects malformed input") {
    Expr e = parse_expr("(sin (* x1 x2))");
    Point p{0.5, 0.8};
    CHECK(e.eval(p.coords) == doctest::Approx(std::sin(0.4)));
    Expr round = parse_expr(e.str());
    CHECK(round.eval(p.coords) == doctest::Approx(e.eval(p.coords)));

    CHECK(parse_expr("(+ 1 2 3)").eval(p.coords) == doctest::Approx(6.0));
    CHECK(parse_expr("(pow x1 2)").eval(p.coords) == doctest::Approx(0.25));
    CHECK(parse_expr("(- x1)").eval(p.coords) == doctest::Approx(-0.5));

    CHECK_THROWS_AS(parse_expr("(sin x1"), std::runtime_error);
    CHECK_THROWS_AS(parse_expr("(bogus x1)"), std::runtime_error);
    CHECK_THROWS_AS(parse_expr("(pow x1 x2)"), std::runtime_error);
    CHECK_THROWS_AS(parse_expr("x9999 junk"), std::runtime_error);
}

TEST_CASE("callback fields evaluate but refuse AD") {
    int D = 2;
    TensorField f = TensorField::from_callback(D, {}, [](const double* x, int, double* out) {
        out[0] = std::tanh(x[0]);  // outside the primitive set
    });
    Point p{0.3, 0.0};
    CHECK(f.eval_at(p)[0] == doctest::Approx(std::tanh(0.3)));
    double fd = kFd.partial(f, p, 1)[0];
    CHECK(fd == doctest::Approx(1.0 - std::tanh(0.3) * std::tanh(0.3)).epsilon(1e-6));
    JetEvaluator ad_only{DiffMode::forward_ad, 1e-5};
    CHECK(ad_only.partial(f, p, 1)[0] == doctest::Approx(fd).epsilon(1e-9));  // falls back to FD
}
