#include "affine/curvature.hpp"

namespace affine {

std::vector<double> curvature_at(const ConnectionField& conn, const Point& p) {
    p.require_dim(conn.dim());
    size_t n4 = conn.size() * conn.dim();
    std::vector<double> K(n4);
    eval_curvature(conn, p.coords.data(), K.data());
    return K;
}

std::vector<double> lower_curvature(const std::vector<double>& K, const std::vector<double>& G, int D) {
    std::vector<double> out(K.size(), 0.0);
    size_t n3 = static_cast<size_t>(D) * D * D;
    for (int M = 0; M < D; ++M)
        for (size_t rest = 0; rest < n3; ++rest) {
            double s = 0.0;
            for (int H = 0; H < D; ++H) s += G[M * D + H] * K[H * n3 + rest];
            out[M * n3 + rest] = s;
        }
    return out;
}

EvolutionDirection make_direction(const std::vector<double>& v, const std::vector<double>& G, int D) {
    double norm = 0.0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
    if (norm < 1e-14) throw std::invalid_argument("evolution direction must be nonzero");
    EvolutionDirection d;
    d.eps.resize(D);
    for (int i = 0; i < D; ++i) d.eps[i] = v[i] / norm;
    d.G00 = 0.0;
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N) d.G00 += G[M * D + N] * d.eps[M] * d.eps[N];
    d.eps_bar.assign(D, 0.0);
    for (int Q = 0; Q < D; ++Q) {
        double s = 0.0;
        for (int H = 0; H < D; ++H) s += G[Q * D + H] * d.eps[H];
        d.eps_bar[Q] = s / d.G00;
    }
    return d;
}

ChargeCurrent extract_charge(const ConnectionField& conn, const MetricField& metric,
                             const std::vector<double>& direction, const Point& p) {
    int D = conn.dim();
    p.require_dim(D);
    std::vector<double> div(conn.size());
    eval_curvature_divergence(conn, metric, p.coords.data(), div.data());
    std::vector<double> G = metric.G_at(p);
    ChargeCurrent cc;
    cc.direction = make_direction(direction, G, D);
    cc.rho_up.assign(static_cast<size_t>(D) * D, 0.0);
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N) {
            double s = 0.0;
            for (int Q = 0; Q < D; ++Q) s += div[(M * D + N) * D + Q] * cc.direction.eps[Q];
            cc.rho_up[M * D + N] = s;
        }
    cc.rho_low.assign(cc.rho_up.size(), 0.0);
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N) {
            double s = 0.0;
            for (int H = 0; H < D; ++H) s += G[M * D + H] * cc.rho_up[H * D + N];
            cc.rho_low[M * D + N] = s;
        }
    cc.j.assign(conn.size(), 0.0);
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            for (int Q = 0; Q < D; ++Q)
                cc.j[(M * D + N) * D + Q] = cc.rho_up[M * D + N] * cc.direction.eps_bar[Q];
    return cc;
}

YangMillsReport yang_mills_residual(const ConnectionField& conn, const MetricField& metric,
                                    const Point& p, std::vector<double> direction,
                                    int declared_M_1based, int declared_N_1based) {
    int D = conn.dim();
    p.require_dim(D);
    int M0 = declared_M_1based - 1, N0 = declared_N_1based - 1;
    if (M0 < 0 || M0 >= D || N0 < 0 || N0 >= D) throw std::invalid_argument("declared component out of range");
    YangMillsReport r;
    r.divergence.resize(conn.size());
    eval_curvature_divergence(conn, metric, p.coords.data(), r.divergence.data());
    std::vector<double> G = metric.G_at(p);
    std::vector<double> Ginv = metric.Ginv_at(p);
    if (direction.empty()) {
        // On-shell construction: raise the declared component's row.
        direction.assign(D, 0.0);
        for (int H = 0; H < D; ++H)
            for (int Q = 0; Q < D; ++Q)
                direction[H] += Ginv[H * D + Q] * r.divergence[(M0 * D + N0) * D + Q];
    }
    r.charge = extract_charge(conn, metric, direction, p);
    r.closure = r.charge.direction.closure();
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            for (int Q = 0; Q < D; ++Q) {
                double res = std::fabs(r.divergence[(M * D + N) * D + Q] - r.charge.j[(M * D + N) * D + Q]);
                r.residual_max = std::max(r.residual_max, res);
                if (M == M0 && N == N0) r.residual_declared = std::max(r.residual_declared, res);
            }
    return r;
}

double verify_curvature_frame_covariance(const ReferenceSystemStack& stack, const FrameField& k,
                                         const std::vector<Point>& samples) {
    GaugeConnection base(stack);
    GaugeConnection direct(apply_frame_to_stack(stack, k));
    double worst = 0.0;
    for (const Point& p : samples) {
        auto K = curvature_at(base, p);
        auto law = frame_transform_curvature(K, k, p);
        auto dir = curvature_at(direct, p);
        for (size_t i = 0; i < law.size(); ++i) worst = std::max(worst, std::fabs(law[i] - dir[i]));
    }
    return worst;
}

double verify_curvature_coordinate_covariance(const ReferenceSystemStack& stack, ConnKind kind,
                                              const CoordMap& map, const std::vector<Point>& samples) {
    ConnectionPtr base;
    if (kind == ConnKind::gauge) base = std::make_shared<GaugeConnection>(stack);
    else if (kind == ConnKind::christoffel)
        base = std::make_shared<ChristoffelConnection>(MetricField::from_stack(stack));
    else base = std::make_shared<HolonomicConnection>(stack);
    PrimedConnection primed(stack, kind, map);
    int D = stack.dim();
    size_t n2 = static_cast<size_t>(D) * D;
    double worst = 0.0;
    auto at = [D](int M, int N, int P, int Q) { return ((static_cast<size_t>(M) * D + N) * D + P) * D + Q; };
    size_t n4 = n2 * n2;
    auto contract_last = [&](const std::vector<double>& src, const std::vector<double>& m) {
        // replaces the last slot: out[..., j] = src[..., i] * m[i*D + j]
        std::vector<double> out(n4, 0.0);
        for (size_t lead = 0; lead < n4 / D; ++lead)
            for (int i = 0; i < D; ++i) {
                double v = src[lead * D + i];
                if (v == 0.0) continue;
                for (int j = 0; j < D; ++j) out[lead * D + j] += v * m[i * D + j];
            }
        return out;
    };
    auto rotate = [&](const std::vector<double>& src) {
        // cyclic index rotation [M][N][P][Q] -> [N][P][Q][M]
        std::vector<double> out(n4);
        for (int M = 0; M < D; ++M)
            for (int N = 0; N < D; ++N)
                for (int P = 0; P < D; ++P)
                    for (int Q = 0; Q < D; ++Q)
                        out[at(N, P, Q, M)] = src[at(M, N, P, Q)];
        return out;
    };
    for (const Point& p : samples) {
        auto K = curvature_at(*base, p);
        std::vector<double> Kp(n4);
        eval_curvature_chained(primed, map, p.coords.data(), Kp.data());
        std::vector<double> J(n2), binv(n2), Jt(n2);
        map.jacobian(p.coords.data(), J.data());
        map.inverse_jacobian(p.coords.data(), binv.data());
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) Jt[i * D + j] = J[j * D + i];
        // law = J^{M'}_M K^M_{NPQ} b^N_{N'} b^P_{P'} b^Q_{Q'} via staged
        // contractions, rotating the slot to contract into last position.
        auto law = rotate(contract_last(rotate(contract_last(rotate(contract_last(
                       rotate(contract_last(K, binv)), Jt)), binv)), binv));
        for (size_t i = 0; i < n4; ++i) worst = std::max(worst, std::fabs(law[i] - Kp[i]));
    }
    return worst;
}

}  // namespace affine
