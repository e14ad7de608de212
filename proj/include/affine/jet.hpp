#ifndef AFFINE_JET_HPP
#define AFFINE_JET_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "affine/tensor.hpp"

namespace affine {

struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DiffMode { forward_ad, central_fd };

// Differentiation engine shared by every higher layer. AD walks the
// expression tree with dual numbers; FD is the independent cross-check.
struct JetEvaluator {
    DiffMode mode = DiffMode::forward_ad;
    double fd_step = 1e-5;

    double default_tolerance() const { return mode == DiffMode::forward_ad ? 1e-8 : 1e-5; }

    // d(components)/dx^dir at p, dir 1-based. Returns D^rank values.
    std::vector<double> partial(const TensorField& f, const Point& p, int dir) const {
        p.require_dim(f.dim());
        if (dir < 1 || dir > f.dim())
            throw std::invalid_argument("derivative direction " + std::to_string(dir) + " out of range");
        std::vector<double> out(f.size());
        if (mode == DiffMode::forward_ad && f.closed_form()) {
            std::vector<Dual1> x(f.dim());
            for (int i = 0; i < f.dim(); ++i) x[i] = Dual1(p.coords[i], i == dir - 1 ? 1.0 : 0.0);
            std::vector<Dual1> vals(f.size());
            f.eval(x.data(), vals.data());
            for (size_t i = 0; i < out.size(); ++i) {
                if (!finite_all(vals[i]))
                    throw EvaluationError("non-finite derivative in component " + std::to_string(i));
                out[i] = vals[i].d;
            }
            return out;
        }
        std::vector<double> xp = p.coords, xm = p.coords;
        xp[dir - 1] += fd_step;
        xm[dir - 1] -= fd_step;
        std::vector<double> vp(f.size()), vm(f.size());
        f.eval(xp.data(), vp.data());
        f.eval(xm.data(), vm.data());
        for (size_t i = 0; i < out.size(); ++i) {
            out[i] = (vp[i] - vm[i]) / (2.0 * fd_step);
            if (!std::isfinite(out[i]))
                throw EvaluationError("non-finite derivative in component " + std::to_string(i));
        }
        return out;
    }

    // [X,Y]^M = X^P d_P Y^M - Y^P d_P X^M for rank-1 upper fields.
    std::vector<double> lie_bracket(const TensorField& X, const TensorField& Y, const Point& p) const {
        if (X.rank() != 1 || Y.rank() != 1 || X.variance()[0] != Var::upper || Y.variance()[0] != Var::upper)
            throw std::invalid_argument("lie_bracket needs two rank-1 upper fields");
        int D = X.dim();
        std::vector<double> xv = X.eval_at(p), yv = Y.eval_at(p);
        std::vector<double> out(D, 0.0);
        for (int P = 1; P <= D; ++P) {
            std::vector<double> dy = partial(Y, p, P);
            std::vector<double> dx = partial(X, p, P);
            for (int M = 0; M < D; ++M) out[M] += xv[P - 1] * dy[M] - yv[P - 1] * dx[M];
        }
        return out;
    }
};

inline std::vector<double> evaluate_field(const TensorField& f, const Point& p) { return f.eval_at(p); }

}  // namespace affine

#endif
