#include "affine/evolution.hpp"

namespace affine {

std::vector<double> EvolutionSetup::momentum_lower(const Point& p) const {
    int D = dim();
    std::vector<double> cov(rho.size() * D);
    eval_covariant_derivative(rho, *conn, p.coords.data(), cov.data());
    std::vector<double> out(D);
    for (int Q = 0; Q < D; ++Q) {
        std::vector<double> slice(rho.size());
        for (size_t i = 0; i < rho.size(); ++i) slice[i] = cov[i * D + Q];
        out[Q] = functional.combine(slice, D);
    }
    return out;
}

std::vector<double> EvolutionSetup::gradient(const Point& p) const {
    int D = dim();
    auto pl = momentum_lower(p);
    auto ginv = metric.Ginv_at(p);
    std::vector<double> v(D, 0.0);
    for (int Q = 0; Q < D; ++Q)
        for (int P = 0; P < D; ++P) v[Q] += ginv[Q * D + P] * pl[P];
    return v;
}

std::vector<double> EvolutionSetup::partials(const Point& p) const {
    int D = dim();
    std::vector<double> out(D);
    for (int Q = 0; Q < D; ++Q) {
        auto xs = seed_direction(p.coords.data(), D, Q);
        std::vector<Dual1> dv(rho.size());
        rho.eval(xs.data(), dv.data());
        std::vector<double> slice(rho.size());
        for (size_t i = 0; i < dv.size(); ++i) slice[i] = dv[i].d;
        out[Q] = functional.combine(slice, D);
    }
    return out;
}

double EvolutionSetup::charge_value(const Point& p) const {
    return functional.combine(rho.eval_at(p), dim());
}

namespace {

std::vector<double> normalized(const std::vector<double>& v, bool* vanished = nullptr) {
    double n = 0.0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    if (n < 1e-10) {
        if (vanished) *vanished = true;
        return std::vector<double>(v.size(), 0.0);
    }
    if (vanished) *vanished = false;
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

}  // namespace

GradientLine integrate_flow(const std::function<std::vector<double>(const Point&)>& field,
                            const Point& start, double step, int n_steps) {
    GradientLine line;
    line.step = step;
    int D = start.dim();
    Point x = start;
    auto unit_at = [&](const Point& q, bool& dead) { return normalized(field(q), &dead); };
    for (int i = 0; i <= n_steps; ++i) {
        bool dead = false;
        auto u = unit_at(x, dead);
        if (dead) {
            line.truncated = true;
            line.diagnostic = "direction field vanished at step " + std::to_string(i);
            break;
        }
        GradientLineSample s;
        s.x0 = i * step;
        s.point = x;
        s.tangent = u;
        line.samples.push_back(std::move(s));
        if (i == n_steps) break;
        // classical fourth-order step of the unit field
        auto eval_shift = [&](const std::vector<double>& k, double h) {
            Point q = x;
            for (int d = 0; d < D; ++d) q.coords[d] += h * k[d];
            bool dd = false;
            auto r = unit_at(q, dd);
            if (dd) throw EvaluationError("direction field vanished inside a step");
            return r;
        };
        try {
            auto k1 = u;
            auto k2 = eval_shift(k1, step / 2);
            auto k3 = eval_shift(k2, step / 2);
            auto k4 = eval_shift(k3, step);
            for (int d = 0; d < D; ++d)
                x.coords[d] += step / 6.0 * (k1[d] + 2 * k2[d] + 2 * k3[d] + k4[d]);
        } catch (const EvaluationError& e) {
            line.truncated = true;
            line.diagnostic = e.what();
            break;
        }
    }
    return line;
}

GradientLine integrate_gradient_line(const EvolutionSetup& setup, const Point& start, double step,
                                     int n_steps) {
    auto field = [&](const Point& q) { return setup.gradient(q); };
    GradientLine line = integrate_flow(field, start, step, n_steps);
    // energies and the accumulated action
    double prev_E = 0.0;
    for (size_t i = 0; i < line.samples.size(); ++i) {
        auto& s = line.samples[i];
        auto pl = setup.momentum_lower(s.point);
        double E0 = 0.0;
        for (int d = 0; d < setup.dim(); ++d) E0 += pl[d] * s.tangent[d];
        s.energy = E0;
        if (i > 0) line.accumulated_action += 0.5 * (prev_E + E0) * step;
        prev_E = E0;
    }
    return line;
}

EnergyMomentum energy_momentum(const EvolutionSetup& setup, const Point& p,
                               const std::vector<double>& direction) {
    int D = setup.dim();
    EnergyMomentum out;
    auto G = setup.metric.G_at(p);
    auto Ginv = setup.metric.Ginv_at(p);
    out.direction = make_direction(direction, G, D);
    out.p_low = setup.momentum_lower(p);
    out.P_low = setup.partials(p);
    out.p_up.assign(D, 0.0);
    out.P_up.assign(D, 0.0);
    for (int Q = 0; Q < D; ++Q)
        for (int P = 0; P < D; ++P) {
            out.p_up[Q] += Ginv[Q * D + P] * out.p_low[P];
            out.P_up[Q] += Ginv[Q * D + P] * out.P_low[P];
        }
    for (int Q = 0; Q < D; ++Q) {
        out.E0 += out.p_low[Q] * out.direction.eps[Q];
        out.E_up0 += out.p_up[Q] * out.direction.eps_bar[Q];
        out.H0 += out.P_low[Q] * out.direction.eps[Q];
        out.H_up0 += out.P_up[Q] * out.direction.eps_bar[Q];
    }
    return out;
}

double energy_momentum_residual(const EvolutionSetup& setup, const Point& p,
                                const std::vector<double>& direction) {
    EnergyMomentum em = energy_momentum(setup, p, direction);
    double pq = 0.0;
    for (int Q = 0; Q < setup.dim(); ++Q) pq += em.p_low[Q] * em.p_up[Q];
    return std::fabs(em.E0 * em.E_up0 - pq);
}

double momentum_velocity_residual(const EvolutionSetup& setup, const GradientLine& line) {
    double worst = 0.0;
    for (const auto& s : line.samples) {
        EnergyMomentum em = energy_momentum(setup, s.point, s.tangent);
        for (int Q = 0; Q < setup.dim(); ++Q)
            worst = std::max(worst, std::fabs(em.p_up[Q] - em.E_up0 * s.tangent[Q]));
    }
    return worst;
}

// ---------------------------------------------------------------------------

namespace {

// Jordan-Wigner style Euclidean generators: hermitian, squaring to one,
// pairwise anticommuting; entries in {0, +-1, +-i} so products are exact.
std::vector<CMatrix> euclid_generators(int D) {
    int m = (D + 1) / 2;
    CMatrix sx(2), sy(2), sz(2), id2 = CMatrix::identity(2);
    sx.at(0, 1) = 1;
    sx.at(1, 0) = 1;
    sy.at(0, 1) = {0, -1};
    sy.at(1, 0) = {0, 1};
    sz.at(0, 0) = 1;
    sz.at(1, 1) = -1;
    std::vector<CMatrix> out;
    for (int a = 0; a < D; ++a) {
        int level = a / 2;
        CMatrix g = CMatrix::identity(1);
        for (int k = 0; k < m; ++k) {
            const CMatrix* factor;
            if (k < level) factor = &sz;
            else if (k > level) factor = &id2;
            else factor = (a == D - 1 && D % 2 == 1) ? &sz : (a % 2 == 0 ? &sx : &sy);
            g = kron(g, *factor);
        }
        // odd dimension: the last generator is sz everywhere
        if (a == D - 1 && D % 2 == 1) {
            g = CMatrix::identity(1);
            for (int k = 0; k < m; ++k) g = kron(g, sz);
        }
        out.push_back(g);
    }
    return out;
}

}  // namespace

double GammaSet::anticommutator_residual(const std::vector<double>& Ginv) const {
    int D = dim;
    double worst = 0.0;
    for (int M = 0; M < D; ++M)
        for (int N = M; N < D; ++N) {
            CMatrix anti = gamma[M] * gamma[N] + gamma[N] * gamma[M];
            CMatrix want = CMatrix::identity(gamma[M].n) * std::complex<double>(2.0 * Ginv[M * D + N], 0.0);
            worst = std::max(worst, (anti - want).max_abs());
        }
    return worst;
}

GammaSet build_gamma_set(const std::vector<double>& G, int D, const std::vector<double>* frame_inverse) {
    // positivity check
    auto lam = sym_eigenvalues(G.data(), D);
    if (lam.back() <= 0.0)
        throw std::invalid_argument("generator construction needs a positive-definite metric");
    std::vector<double> E;
    if (frame_inverse) {
        E = *frame_inverse;  // C^M_A with C C^T = G^{-1}
    } else {
        std::vector<double> Ginv(static_cast<size_t>(D) * D);
        mat_inverse(G.data(), Ginv.data(), D);
        E = sym_sqrt(Ginv.data(), D);
    }
    auto base = euclid_generators(D);
    GammaSet out;
    out.dim = D;
    for (int M = 0; M < D; ++M) {
        CMatrix g(base[0].n);
        for (int A = 0; A < D; ++A) {
            double w = E[M * D + A];
            if (w == 0.0) continue;
            g = g + base[A] * std::complex<double>(w, 0.0);
        }
        out.gamma.push_back(g);
    }
    return out;
}

DiracResidual dirac_residual(const EvolutionSetup& setup, const GradientLine& line) {
    DiracResidual out;
    int D = setup.dim();
    for (const auto& s : line.samples) {
        auto G = setup.metric.G_at(s.point);
        // orthogonality guard
        double ortho = 0.0;
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) ortho = std::max(ortho, std::fabs(G[i * D + j] - (i == j ? 1.0 : 0.0)));
        if (ortho > 1e-9) {
            out.skipped = true;
            out.diagnostic = "background is not orthogonal (metric deviation " + std::to_string(ortho) + ")";
            return out;
        }
        GammaSet gs = build_gamma_set(G, D);
        auto pl = setup.momentum_lower(s.point);
        CMatrix slash(gs.gamma[0].n);
        for (int P = 0; P < D; ++P) slash = slash + gs.gamma[P] * std::complex<double>(pl[P], 0.0);
        double rho0 = 0.0;
        for (int P = 0; P < D; ++P) rho0 += pl[P] * s.tangent[P];
        CMatrix sq = slash * slash;
        CMatrix want = CMatrix::identity(sq.n) * std::complex<double>(rho0 * rho0, 0.0);
        out.squared_identity = std::max(out.squared_identity, (sq - want).max_abs());
        CMatrix idm = CMatrix::identity(sq.n);
        double plus = (slash - idm * std::complex<double>(rho0, 0.0)).op_norm();
        double minus = (slash + idm * std::complex<double>(rho0, 0.0)).op_norm();
        out.sign_branch = std::max(out.sign_branch, std::min(plus, minus));
    }
    return out;
}

namespace {

ActionReport action_over_samples(const EvolutionSetup& setup, const std::vector<Point>& pts,
                                 bool with_gamma) {
    ActionReport out;
    int D = setup.dim();
    // trapezoid of p_Q dx^Q on segment midpoints for the elementary action;
    // the gamma form integrates the scalar branch along the same samples
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        std::vector<double> mid(D), dx(D);
        double dlen = 0.0;
        for (int d = 0; d < D; ++d) {
            mid[d] = 0.5 * (pts[i][d] + pts[i + 1][d]);
            dx[d] = pts[i + 1][d] - pts[i][d];
            dlen += dx[d] * dx[d];
        }
        dlen = std::sqrt(dlen);
        Point pm(mid);
        auto pl = setup.momentum_lower(pm);
        double pdx = 0.0;
        for (int d = 0; d < D; ++d) pdx += pl[d] * dx[d];
        out.action += pdx;
        if (with_gamma) {
            auto G = setup.metric.G_at(pm);
            GammaSet gs = build_gamma_set(G, D);
            CMatrix slash(gs.gamma[0].n);
            for (int P = 0; P < D; ++P) slash = slash + gs.gamma[P] * std::complex<double>(pl[P], 0.0);
            CMatrix sq = slash * slash;
            // scalar branch: sqrt of the square's scalar part, signed like E_0
            double c = 0.0;
            for (int k = 0; k < sq.n; ++k) c += sq.at(k, k).real();
            c = std::max(0.0, c / sq.n);
            double E0 = pdx / std::max(dlen, 1e-300);
            double branch = (E0 >= 0 ? 1.0 : -1.0) * std::sqrt(c);
            out.gamma_action += (branch + E0) * dlen;
            out.gamma_available = true;
        }
    }
    if (out.gamma_available && out.action != 0.0) out.ratio = out.gamma_action / out.action;
    return out;
}

}  // namespace

ActionReport affine_action(const EvolutionSetup& setup, const std::vector<Point>& path, bool with_gamma) {
    return action_over_samples(setup, path, with_gamma);
}

ActionReport affine_action(const EvolutionSetup& setup, const GradientLine& line, bool with_gamma) {
    std::vector<Point> pts;
    pts.reserve(line.samples.size());
    for (const auto& s : line.samples) pts.push_back(s.point);
    return action_over_samples(setup, pts, with_gamma);
}

LorentzForceReport lorentz_force(const EvolutionSetup& setup, const Point& p) {
    int D = setup.dim();
    LorentzForceReport out;
    // unit gradient direction field and its covariant derivative; build the
    // direction as a callback so the derivative sees the full field
    auto eps_field = [&](const Point& q) {
        auto v = setup.gradient(q);
        return normalized(v);
    };
    auto eps = eps_field(p);
    // second covariant derivative slices rho_{;P;Q}
    int Dd = D;
    std::vector<double> cov2((setup.rho.size() * D) * D);
    {
        // treat rho_{MN;P} as a rank-3 field through a callback? the
        // components need the connection, so assemble directly:
        // d_Q(rho_{;P}) exact via nested duals, then connection corrections.
        std::vector<double> gamma(setup.conn->size());
        setup.conn->coeffs(p.coords.data(), gamma.data());
        std::vector<double> cov1(setup.rho.size() * D);
        eval_covariant_derivative(setup.rho, *setup.conn, p.coords.data(), cov1.data());
        // d_Q of cov1 via dual evaluation of the whole assembly
        std::vector<std::vector<double>> dcov(D, std::vector<double>(setup.rho.size() * D));
        for (int Q = 0; Q < D; ++Q) {
            auto xs = seed_direction(p.coords.data(), D, Q);
            std::vector<Dual1> c1(setup.rho.size() * D);
            eval_covariant_derivative(setup.rho, *setup.conn, xs.data(), c1.data());
            for (size_t i = 0; i < c1.size(); ++i) dcov[Q][i] = c1[i].d;
        }
        // rho has rank 2 lower; rho_{MN;P;Q} = d_Q rho_{MN;P}
        //   - Gamma^H_{MQ} rho_{HN;P} - Gamma^H_{NQ} rho_{MH;P} - Gamma^H_{PQ} rho_{MN;H}
        for (int M = 0; M < D; ++M)
            for (int N = 0; N < D; ++N)
                for (int P = 0; P < D; ++P)
                    for (int Q = 0; Q < D; ++Q) {
                        double s = dcov[Q][(M * static_cast<size_t>(D) + N) * D + P];
                        for (int H = 0; H < D; ++H) {
                            s -= gamma[(H * D + M) * D + Q] * cov1[(H * static_cast<size_t>(D) + N) * D + P];
                            s -= gamma[(H * D + N) * D + Q] * cov1[(M * static_cast<size_t>(D) + H) * D + P];
                            s -= gamma[(H * D + P) * D + Q] * cov1[(M * static_cast<size_t>(D) + N) * D + H];
                        }
                        cov2[((M * static_cast<size_t>(D) + N) * D + P) * D + Q] = s;
                    }
    }
    auto func2 = [&](int P, int Q) {
        std::vector<double> slice(setup.rho.size());
        for (size_t i = 0; i < setup.rho.size(); ++i) slice[i] = cov2[(i * Dd + P) * Dd + Q];
        return setup.functional.combine(slice, D);
    };
    // left side: f_P = p_{P;0} = rho_{;P;Q} eps^Q
    out.force.assign(D, 0.0);
    for (int P = 0; P < D; ++P)
        for (int Q = 0; Q < D; ++Q) out.force[P] += func2(P, Q) * eps[Q];
    // right side pieces. The energy keeps the charge's two slots as tensor
    // indices, so its derivative carries their connection corrections; the
    // partial derivatives of the assembled components come from central
    // differences on the whole construction.
    std::vector<double> gamma(setup.conn->size());
    setup.conn->coeffs(p.coords.data(), gamma.data());
    auto energy_tensor = [&](const Point& q) {  // E_{MN} = rho_{MN;Q} eps^Q
        std::vector<double> c1(setup.rho.size() * D);
        eval_covariant_derivative(setup.rho, *setup.conn, q.coords.data(), c1.data());
        auto e = eps_field(q);
        std::vector<double> out_e(setup.rho.size(), 0.0);
        for (size_t i = 0; i < setup.rho.size(); ++i)
            for (int Q = 0; Q < D; ++Q) out_e[i] += c1[i * D + Q] * e[Q];
        return out_e;
    };
    std::vector<double> dE(D, 0.0);
    std::vector<std::vector<double>> deps(D, std::vector<double>(D, 0.0));  // deps[P][Q] = d_P eps^Q
    {
        const double h = 1e-6;
        auto E0 = energy_tensor(p);
        for (int P = 0; P < D; ++P) {
            Point pp = p, pm = p;
            pp.coords[P] += h;
            pm.coords[P] -= h;
            auto ep = eps_field(pp), em = eps_field(pm);
            for (int Q = 0; Q < D; ++Q) deps[P][Q] = (ep[Q] - em[Q]) / (2 * h);
            auto Ep = energy_tensor(pp), Em = energy_tensor(pm);
            std::vector<double> covE(setup.rho.size());
            for (int M = 0; M < D; ++M)
                for (int N = 0; N < D; ++N) {
                    double s = (Ep[M * static_cast<size_t>(D) + N] - Em[M * static_cast<size_t>(D) + N]) /
                               (2 * h);
                    for (int H = 0; H < D; ++H) {
                        s -= gamma[(H * D + M) * D + P] * E0[H * static_cast<size_t>(D) + N];
                        s -= gamma[(H * D + N) * D + P] * E0[M * static_cast<size_t>(D) + H];
                    }
                    covE[M * static_cast<size_t>(D) + N] = s;
                }
            dE[P] = setup.functional.combine(covE, D);
        }
    }
    auto pl = setup.momentum_lower(p);
    auto rho_vals = setup.rho.eval_at(p);
    // curvature term [rho R_{PQ}] = rho_{MH} R^H_{NPQ} + rho_{HN} R^H_{MPQ}
    // combined through the declared functional on (M,N)
    std::vector<double> K(setup.conn->size() * D);
    eval_curvature(*setup.conn, p.coords.data(), K.data());
    auto at4 = [D](int M, int N, int P, int Q) {
        return ((static_cast<size_t>(M) * D + N) * D + P) * D + Q;
    };
    double worst = 0.0, torsion_worst = 0.0;
    for (int P = 0; P < D; ++P) {
        double rhs = dE[P];
        for (int Q = 0; Q < D; ++Q) {
            double eps_cov = deps[P][Q];
            for (int H = 0; H < D; ++H) eps_cov += gamma[(Q * D + H) * D + P] * eps[H];
            rhs -= pl[Q] * eps_cov;
        }
        for (int Q = 0; Q < D; ++Q) {
            // functional-combined curvature coupling
            std::vector<double> slice(setup.rho.size(), 0.0);
            for (int M = 0; M < D; ++M)
                for (int N = 0; N < D; ++N) {
                    double s = 0.0;
                    for (int H = 0; H < D; ++H) {
                        s += rho_vals[M * D + H] * K[at4(H, N, P, Q)];
                        s += rho_vals[H * D + N] * K[at4(H, M, P, Q)];
                    }
                    slice[M * static_cast<size_t>(D) + N] = s;
                }
            rhs += setup.functional.combine(slice, D) * eps[Q];
        }
        worst = std::max(worst, std::fabs(out.force[P] - rhs));
        // antisymmetric-connection contribution to the commutator
        double tors = 0.0;
        for (int Q = 0; Q < D; ++Q) {
            double t = 0.0;
            for (int Kk = 0; Kk < D; ++Kk) {
                double T = gamma[(Kk * D + P) * D + Q] - gamma[(Kk * D + Q) * D + P];
                t += T * pl[Kk];
            }
            tors += t * eps[Q];
        }
        torsion_worst = std::max(torsion_worst, std::fabs(tors));
    }
    out.residual = worst;
    out.torsion_gap = torsion_worst;
    return out;
}

DualPictureResidual heisenberg_schrodinger_check(const EvolutionSetup& setup, const TensorField& X,
                                                 const TensorField& f, const GradientLine& line,
                                                 int stride) {
    DualPictureResidual out;
    int D = setup.dim();
    JetEvaluator ad;
    auto field = [&](const Point& q) {
        bool dead = false;
        auto v = setup.gradient(q);
        auto u = normalized(v, &dead);
        if (dead) throw EvaluationError("gradient vanished during the dual-picture check");
        return u;
    };
    TensorField H = TensorField::from_callback(D, {Var::upper}, [field](const double* x, int dim, double* outp) {
        Point q(std::vector<double>(x, x + dim));
        auto u = field(q);
        std::copy(u.begin(), u.end(), outp);
    });
    JetEvaluator fd{DiffMode::central_fd, 1e-6};
    double h = line.step;
    for (size_t i = 1; i + 1 < line.samples.size(); i += stride) {
        const Point& p = line.samples[i].point;
        // bracket via the FD evaluator (H is callback-backed)
        auto bracket = fd.lie_bracket(X, H, p);
        // dragged derivative, centered at the sample: push the previous
        // neighbor's value forward one step, pull the next neighbor's value
        // back one step, and difference the two transported vectors
        const Point& pm_pt = line.samples[i - 1].point;
        const Point& pn = line.samples[i + 1].point;
        auto Xm = X.eval_at(pm_pt);
        auto Xn = X.eval_at(pn);
        const double dq = 1e-5;
        auto flow_jacobian = [&](const Point& from) {
            std::vector<double> J(static_cast<size_t>(D) * D);
            for (int d = 0; d < D; ++d) {
                Point a = from, b = from;
                a.coords[d] += dq;
                b.coords[d] -= dq;
                auto la = integrate_flow([&](const Point& q) { return setup.gradient(q); }, a, h, 1);
                auto lb = integrate_flow([&](const Point& q) { return setup.gradient(q); }, b, h, 1);
                for (int r = 0; r < D; ++r)
                    J[r * D + d] = (la.endpoint()[r] - lb.endpoint()[r]) / (2 * dq);
            }
            return J;
        };
        std::vector<double> Jf = flow_jacobian(pm_pt);          // [t-h, t]
        std::vector<double> Jb = flow_jacobian(p), Jbi(Jb.size());  // [t, t+h]
        mat_inverse(Jb.data(), Jbi.data(), D);
        // dX/dx0 = (Jf X(t-h) - Jb^{-1} X(t+h)) / (2h)
        for (int r = 0; r < D; ++r) {
            double fwd = 0.0, bwd = 0.0;
            for (int d = 0; d < D; ++d) {
                fwd += Jf[r * D + d] * Xm[d];
                bwd += Jbi[r * D + d] * Xn[d];
            }
            double rate = (fwd - bwd) / (2 * h);
            out.bracket = std::max(out.bracket, std::fabs(bracket[r] - rate));
        }
        // transport: H f against the path rate of f
        auto Hf = 0.0;
        auto u = line.samples[i].tangent;
        for (int d = 0; d < D; ++d) Hf += u[d] * ad.partial(f, p, d + 1)[0];
        const Point& pm = line.samples[i - 1].point;
        double rate_f = (f.eval_at(pn)[0] - f.eval_at(pm)[0]) / (2 * h);
        out.transport = std::max(out.transport, std::fabs(Hf - rate_f));
    }
    return out;
}

}  // namespace affine
