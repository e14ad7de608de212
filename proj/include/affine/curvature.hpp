#ifndef AFFINE_CURVATURE_HPP
#define AFFINE_CURVATURE_HPP

#include <type_traits>

#include "affine/transform.hpp"

namespace affine {

// K^M_{NPQ} = d_P Gamma^M_{NQ} - d_Q Gamma^M_{NP}
//           + Gamma^M_{HP} Gamma^H_{NQ} - Gamma^H_{NP} Gamma^M_{HQ},
// stored row-major [M][N][P][Q]. Antisymmetric in (P,Q) by construction.
template <class T>
void eval_curvature(const ConnectionField& conn, const T* x, T* K) {
    int D = conn.dim();
    size_t n3 = conn.size();
    std::vector<T> g(n3);
    conn.coeffs(x, g.data());
    std::vector<T> dg(static_cast<size_t>(D) * n3);  // [P][M][N][Q]
    for (int P = 0; P < D; ++P) {
        auto xs = seed_direction(x, D, P);
        std::vector<Dual<T>> gp(n3);
        conn.coeffs(xs.data(), gp.data());
        for (size_t i = 0; i < n3; ++i) dg[P * n3 + i] = gp[i].d;
    }
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            for (int P = 0; P < D; ++P)
                for (int Q = 0; Q < D; ++Q) {
                    T s = dg[P * n3 + (M * D + N) * D + Q] - dg[Q * n3 + (M * D + N) * D + P];
                    for (int H = 0; H < D; ++H)
                        s += g[(M * D + H) * D + P] * g[(H * D + N) * D + Q] -
                             g[(H * D + N) * D + P] * g[(M * D + H) * D + Q];
                    K[((M * D + N) * D + P) * D + Q] = s;
                }
}

std::vector<double> curvature_at(const ConnectionField& conn, const Point& p);

// Curvature of a connection whose coefficient functions live on a different
// chart: derivative slots are chained through d_{P'} = b^K_{P'} d_K, with b
// the inverse Jacobian of the chart map at the evaluation point.
template <class T>
void eval_curvature_chained(const ConnectionField& conn, const CoordMap& map, const T* x, T* K) {
    int D = conn.dim();
    size_t n3 = conn.size();
    std::vector<T> g(n3), binv(static_cast<size_t>(D) * D);
    conn.coeffs(x, g.data());
    map.inverse_jacobian(x, binv.data());
    std::vector<T> dg(static_cast<size_t>(D) * n3, T(0.0));  // [P'][M][N][Q]
    for (int Kd = 0; Kd < D; ++Kd) {
        auto xs = seed_direction(x, D, Kd);
        std::vector<Dual<T>> gp(n3);
        conn.coeffs(xs.data(), gp.data());
        for (int Pp = 0; Pp < D; ++Pp) {
            T w = binv[Kd * D + Pp];
            for (size_t i = 0; i < n3; ++i) dg[Pp * n3 + i] += w * gp[i].d;
        }
    }
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            for (int P = 0; P < D; ++P)
                for (int Q = 0; Q < D; ++Q) {
                    T s = dg[P * n3 + (M * D + N) * D + Q] - dg[Q * n3 + (M * D + N) * D + P];
                    for (int H = 0; H < D; ++H)
                        s += g[(M * D + H) * D + P] * g[(H * D + N) * D + Q] -
                             g[(H * D + N) * D + P] * g[(M * D + H) * D + Q];
                    K[((M * D + N) * D + P) * D + Q] = s;
                }
}

// K_{MNPQ} = G_{MH} K^H_{NPQ}.
std::vector<double> lower_curvature(const std::vector<double>& K, const std::vector<double>& G, int D);

// Covariant divergence with the derivative slot raised and contracted over
// the third index: div^M_{NQ} = G^{PP'} K^M_{NPQ : P'}.
template <class T>
void eval_curvature_divergence(const ConnectionField& conn, const MetricField& metric, const T* x, T* div) {
    int D = conn.dim();
    size_t n2 = static_cast<size_t>(D) * D;
    size_t n4 = n2 * n2;
    std::vector<T> K(n4), g(conn.size()), ginv(n2);
    eval_curvature(conn, x, K.data());
    conn.coeffs(x, g.data());
    metric.eval_Ginv(x, ginv.data());
    std::vector<T> dK(static_cast<size_t>(D) * n4);  // [P'][MNPQ]
    for (int Pp = 0; Pp < D; ++Pp) {
        auto xs = seed_direction(x, D, Pp);
        std::vector<Dual<T>> kk(n4);
        eval_curvature(conn, xs.data(), kk.data());
        for (size_t i = 0; i < n4; ++i) dK[Pp * n4 + i] = kk[i].d;
    }
    auto at = [D](int M, int N, int P, int Q) { return ((static_cast<size_t>(M) * D + N) * D + P) * D + Q; };
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            for (int Q = 0; Q < D; ++Q) {
                T s(0.0);
                for (int P = 0; P < D; ++P)
                    for (int Pp = 0; Pp < D; ++Pp) {
                        T w = ginv[P * D + Pp];
                        if (value_of(w) == 0.0 && std::is_same_v<T, double>) continue;
                        T cov = dK[Pp * n4 + at(M, N, P, Q)];
                        for (int H = 0; H < D; ++H) {
                            cov += g[(M * D + H) * D + Pp] * K[at(H, N, P, Q)];
                            cov -= g[(H * D + N) * D + Pp] * K[at(M, H, P, Q)];
                            cov -= g[(H * D + P) * D + Pp] * K[at(M, N, H, Q)];
                            cov -= g[(H * D + Q) * D + Pp] * K[at(M, N, P, H)];
                        }
                        s += w * cov;
                    }
                div[(M * D + N) * D + Q] = s;
            }
}

// Evolution direction data built from a direction vector v: unit components
// eps^Q_0 = v/|v| (so the squares sum to one), dual form
// eps_bar^0_Q = G_{QH} eps^H_0 / G_00, and G_00 = G_MN eps^M eps^N.
struct EvolutionDirection {
    std::vector<double> eps;
    std::vector<double> eps_bar;
    double G00 = 0.0;

    double closure() const {  // eps^Q eps_bar_Q, = 1 by construction
        double s = 0.0;
        for (size_t i = 0; i < eps.size(); ++i) s += eps[i] * eps_bar[i];
        return s;
    }
};

EvolutionDirection make_direction(const std::vector<double>& v, const std::vector<double>& G, int D);

struct ChargeCurrent {
    std::vector<double> rho_up;   // rho^M_{N0}  [M][N]
    std::vector<double> rho_low;  // rho_{MN0}
    std::vector<double> j;        // j^M_{NQ} = rho^M_{N0} eps_bar^0_Q
    EvolutionDirection direction;
};

// rho^M_{N0} = div^M_{NQ} eps^Q_0 pulled onto the path context.
ChargeCurrent extract_charge(const ConnectionField& conn, const MetricField& metric,
                             const std::vector<double>& direction, const Point& p);

struct YangMillsReport {
    // residual of div^M_{NQ} - rho^M_{N0} eps_bar^0_Q
    double residual_declared = 0.0;  // rows matching the declared component
    double residual_max = 0.0;       // all rows
    double closure = 0.0;            // eps . eps_bar
    std::vector<double> divergence;  // [M][N][Q]
    ChargeCurrent charge;
};

// direction: explicit vector, or empty to use the declared component's own
// divergence row raised with G (the on-shell construction).
YangMillsReport yang_mills_residual(const ConnectionField& conn, const MetricField& metric,
                                    const Point& p, std::vector<double> direction,
                                    int declared_M_1based, int declared_N_1based);

// Covariance residual of curvature under a frame transformation: tensorial
// on the frame-bundle indices. Rebuilds the transformed stack directly and
// compares with the conjugated curvature.
double verify_curvature_frame_covariance(const ReferenceSystemStack& stack, const FrameField& k,
                                         const std::vector<Point>& samples);

// Covariance residual of curvature under a coordinate map (tensorial in all
// four slots).
double verify_curvature_coordinate_covariance(const ReferenceSystemStack& stack, ConnKind kind,
                                              const CoordMap& map, const std::vector<Point>& samples);

}  // namespace affine

#endif
