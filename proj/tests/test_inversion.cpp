#include <doctest.h>

#include "affine/inversion.hpp"
#include "test_helpers.hpp"

using namespace affine;

TEST_CASE("inversion specs compose as expected") {
    SpaceSignature sig(5, 3);
    InversionState s = InversionState::identity(5);
    s.apply(InversionSpec::parity(sig));
    CHECK(s.signs == std::vector<double>{-1, -1, -1, 1, 1});
    s.apply(InversionSpec::charge(sig));
    CHECK(s.signs == std::vector<double>{-1, -1, -1, -1, -1});
    // parity then charge equals the coordinate part of full inversion
    InversionState full = InversionState::identity(5);
    full.apply(InversionSpec::cpt0(5));
    CHECK(full.signs == s.signs);
    CHECK(full.time_reversed);

    InversionState c = InversionState::identity(5);
    c.apply(InversionSpec::cpt(5));
    CHECK(c.time_reversed);
    CHECK(c.external_metric_sign == -1.0);
    CHECK(c.internal_metric_sign == -1.0);
}

TEST_CASE("full inversion applied twice is the identity, bit-exact") {
    InversionState s = InversionState::identity(5);
    s.apply(InversionSpec::cpt(5));
    CHECK_FALSE(s.is_identity());
    s.apply(InversionSpec::cpt(5));
    CHECK(s.is_identity());
    CHECK(s == InversionState::identity(5));
}

TEST_CASE("coordinate flips act on fields as composition") {
    SpaceSignature sig(5, 3);
    InversionState par = InversionState::identity(5);
    par.apply(InversionSpec::parity(sig));

    // scalar x4 (internal) unchanged, x1 (external) negated
    TensorField f4 = TensorField::scalar(5, Expr::coord(4));
    TensorField f1 = TensorField::scalar(5, Expr::coord(1));
    Point p{0.3, -0.2, 0.7, 0.4, 0.1};
    CHECK(transform_tensor(f4, par).eval_at(p)[0] == doctest::Approx(p[3]));
    CHECK(transform_tensor(f1, par).eval_at(p)[0] == doctest::Approx(-p[0]));

    // rank-2 lower components pick up both index signs
    std::vector<Expr> comps(25, Expr::constant(0.0));
    comps[0 * 5 + 3] = Expr::constant(1.0);  // rho_{14}
    TensorField t = TensorField::from_exprs(5, {Var::lower, Var::lower}, comps);
    auto tv = transform_tensor(t, par).eval_at(p);
    CHECK(tv[0 * 5 + 3] == doctest::Approx(-1.0));
}

TEST_CASE("identity state leaves fields untouched") {
    InversionState id = InversionState::identity(5);
    TensorField f = TensorField::scalar(5, sin(Expr::coord(2)));
    Point p{0.5, 0.1, 0, 0, 0};
    CHECK(transform_tensor(f, id).eval_at(p)[0] == f.eval_at(p)[0]);
}

TEST_CASE("covariant differential along a path is invariant under full inversion") {
    int D = 5;
    SpaceSignature sig(D, 3);
    auto stack = testutil::curved_stack(D);
    Rng rng(404);
    std::vector<Expr> comps(25, Expr::constant(0.0));
    for (int m = 0; m < D; ++m)
        for (int n = 0; n < D; ++n)
            comps[m * D + n] = Expr::constant(rng.uniform(-0.5, 0.5)) * sin(Expr::coord(1 + (m + n) % D)) +
                               Expr::constant(rng.uniform(-0.5, 0.5)) * Expr::coord(1 + (m * n) % D);
    TensorField rho = TensorField::from_exprs(D, {Var::lower, Var::lower}, comps);

    // fixed smooth test path
    std::vector<Point> path;
    for (int i = 0; i <= 40; ++i) {
        double t = i / 40.0;
        path.push_back(Point{0.4 * t, 0.2 * std::sin(t), -0.3 * t, 0.1 + 0.2 * t, 0.5 * t * t});
    }

    InversionState id = InversionState::identity(D);
    auto before = covariant_differential_along_path(rho, stack, sig, path, id);

    InversionState flipped = id;
    flipped.apply(InversionSpec::cpt(D));
    auto after = covariant_differential_along_path(rho, stack, sig, path, flipped);

    CHECK(testutil::max_diff(before, after) < 1e-10);

    // metric inversion alone reverses the sign of the accumulated value
    InversionState tm = InversionState::identity(D);
    tm.apply(InversionSpec::metric_inversion(D));
    auto reversed = covariant_differential_along_path(rho, stack, sig, path, tm);
    for (size_t i = 0; i < before.size(); ++i) CHECK(reversed[i] == doctest::Approx(-before[i]));

    // full coordinate inversion alone also reverses it; only the joint
    // transformation preserves the value
    InversionState c0 = InversionState::identity(D);
    c0.apply(InversionSpec::cpt0(D));
    auto coord_only = covariant_differential_along_path(rho, stack, sig, path, c0);
    for (size_t i = 0; i < before.size(); ++i) CHECK(coord_only[i] == doctest::Approx(-before[i]));
}
