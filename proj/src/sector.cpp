#include "affine/sector.hpp"

namespace affine {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

SectorIndices sector_indices(Sector sector, int D) {
    SectorIndices ix;
    switch (sector) {
        case Sector::weak_em:
            if (D != 5) throw std::invalid_argument("electroweak sector needs D=5");
            ix.weak_a = D - 1;
            ix.weak_b = D;
            break;
        case Sector::strong:
            if (D != 6) throw std::invalid_argument("strong sector needs D=6");
            ix.strong_1 = D - 2;
            ix.strong_2 = D - 1;
            ix.strong_3 = D;
            break;
        case Sector::unified:
            if (D != 8) throw std::invalid_argument("unified sector needs D=8");
            ix.weak_a = D - 4;
            ix.weak_b = D - 3;
            ix.strong_1 = D - 2;
            ix.strong_2 = D - 1;
            ix.strong_3 = D;
            break;
    }
    return ix;
}

SectorConfig SectorConfig::make(Sector sector, int D) {
    SectorConfig cfg;
    cfg.sector = sector;
    cfg.sig = SpaceSignature(D, 3);
    sector_indices(sector, D);  // validates D
    // Default R/S/T combination: R spans the trace direction (which the
    // symmetry condition kills), while S and T are chosen so the assembled
    // color matrix's diagonal reproduces the diagonal potentials.
    double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0), s6 = std::sqrt(6.0);
    cfg.rst = {1.0 / s3, 1.0 / s3, 1.0 / s3,
               0.0,      -s2,      s2,
               s6,       0.0,      0.0};
    return cfg;
}

double SectorConfig::derive_couplings(const MetricField& metric, const Point& p) {
    SectorIndices ix = indices();
    auto ginv = metric.Ginv_at(p);
    int D = sig.total_dim;
    auto up = [&](int m) { return ginv[(m - 1) * D + (m - 1)]; };
    double residual = 0.0;
    if (ix.has_weak()) {
        double a = up(ix.weak_a), b = up(ix.weak_b);
        residual = std::max(residual, std::fabs(a - b));
        coupling_weak = std::sqrt(a * a + b * b);
    }
    if (ix.has_strong()) {
        double a = up(ix.strong_1), b = up(ix.strong_2), c = up(ix.strong_3);
        residual = std::max(residual, std::fabs(a - b));
        residual = std::max(residual, std::fabs(b - c));
        coupling_strong = std::sqrt(b * b + c * c);
    }
    return residual;
}

PotentialSlice decompose_potentials(const SectorConfig& cfg, const std::vector<double>& gamma_lowered,
                                    int D) {
    SectorIndices ix = cfg.indices();
    PotentialSlice out;
    auto G = [&](int m, int n, int P) {
        return gamma_lowered[((m - 1) * static_cast<size_t>(D) + (n - 1)) * D + P];
    };
    if (ix.has_weak()) {
        int a = ix.weak_a, b = ix.weak_b;
        out.Z.resize(D);
        out.A.resize(D);
        out.W1.resize(D);
        out.W2.resize(D);
        for (int P = 0; P < D; ++P) {
            out.Z[P] = kInvSqrt2 * (G(a, a, P) + G(b, b, P));
            out.A[P] = kInvSqrt2 * (G(a, a, P) - G(b, b, P));
            out.W1[P] = kInvSqrt2 * (G(a, b, P) + G(b, a, P));
            out.W2[P] = kInvSqrt2 * (G(a, b, P) - G(b, a, P));
        }
    }
    if (ix.has_strong()) {
        int s1 = ix.strong_1, s2 = ix.strong_2, s3 = ix.strong_3;
        for (auto* v : {&out.U1, &out.V1, &out.U2, &out.V2, &out.U3, &out.V3, &out.X23, &out.Y23,
                        &out.X31, &out.Y31, &out.X12, &out.Y12, &out.R, &out.S, &out.T})
            v->resize(D);
        for (int P = 0; P < D; ++P) {
            out.U1[P] = kInvSqrt2 * (G(s1, s1, P) + G(s2, s2, P));
            out.V1[P] = kInvSqrt2 * (G(s1, s1, P) - G(s2, s2, P));
            out.U2[P] = kInvSqrt2 * (G(s2, s2, P) + G(s3, s3, P));
            out.V2[P] = kInvSqrt2 * (G(s2, s2, P) - G(s3, s3, P));
            out.U3[P] = kInvSqrt2 * (G(s3, s3, P) + G(s1, s1, P));
            out.V3[P] = kInvSqrt2 * (G(s3, s3, P) - G(s1, s1, P));
            out.X23[P] = kInvSqrt2 * (G(s1, s2, P) + G(s2, s1, P));
            out.Y23[P] = kInvSqrt2 * (G(s1, s2, P) - G(s2, s1, P));
            out.X31[P] = kInvSqrt2 * (G(s2, s3, P) + G(s3, s2, P));
            out.Y31[P] = kInvSqrt2 * (G(s2, s3, P) - G(s3, s2, P));
            out.X12[P] = kInvSqrt2 * (G(s3, s1, P) + G(s1, s3, P));
            out.Y12[P] = kInvSqrt2 * (G(s3, s1, P) - G(s1, s3, P));
            const auto& m = cfg.rst;
            out.R[P] = m[0] * out.U1[P] + m[1] * out.U2[P] + m[2] * out.U3[P];
            out.S[P] = m[3] * out.U1[P] + m[4] * out.U2[P] + m[5] * out.U3[P];
            out.T[P] = m[6] * out.U1[P] + m[7] * out.U2[P] + m[8] * out.U3[P];
        }
    }
    return out;
}

double decomposition_roundtrip_residual(const SectorConfig& cfg, const std::vector<double>& gamma_lowered,
                                        int D) {
    SectorIndices ix = cfg.indices();
    PotentialSlice s = decompose_potentials(cfg, gamma_lowered, D);
    auto G = [&](int m, int n, int P) {
        return gamma_lowered[((m - 1) * static_cast<size_t>(D) + (n - 1)) * D + P];
    };
    double worst = 0.0;
    auto upd = [&](double got, double want) { worst = std::max(worst, std::fabs(got - want)); };
    for (int P = 0; P < D; ++P) {
        if (ix.has_weak()) {
            int a = ix.weak_a, b = ix.weak_b;
            upd(kInvSqrt2 * (s.Z[P] + s.A[P]), G(a, a, P));
            upd(kInvSqrt2 * (s.Z[P] - s.A[P]), G(b, b, P));
            upd(kInvSqrt2 * (s.W1[P] + s.W2[P]), G(a, b, P));
            upd(kInvSqrt2 * (s.W1[P] - s.W2[P]), G(b, a, P));
        }
        if (ix.has_strong()) {
            int s1 = ix.strong_1, s2 = ix.strong_2, s3 = ix.strong_3;
            upd(kInvSqrt2 * (s.U1[P] + s.V1[P]), G(s1, s1, P));
            upd(kInvSqrt2 * (s.U2[P] + s.V2[P]), G(s2, s2, P));
            upd(kInvSqrt2 * (s.U3[P] + s.V3[P]), G(s3, s3, P));
            upd(kInvSqrt2 * (s.X23[P] + s.Y23[P]), G(s1, s2, P));
            upd(kInvSqrt2 * (s.X23[P] - s.Y23[P]), G(s2, s1, P));
            upd(kInvSqrt2 * (s.X31[P] + s.Y31[P]), G(s2, s3, P));
            upd(kInvSqrt2 * (s.X31[P] - s.Y31[P]), G(s3, s2, P));
            upd(kInvSqrt2 * (s.X12[P] + s.Y12[P]), G(s3, s1, P));
            upd(kInvSqrt2 * (s.X12[P] - s.Y12[P]), G(s1, s3, P));
            // U recovery through the inverse R/S/T map
            std::array<double, 9> m = cfg.rst, inv;
            mat_inverse(m.data(), inv.data(), 3);
            double u1 = inv[0] * s.R[P] + inv[1] * s.S[P] + inv[2] * s.T[P];
            double u2 = inv[3] * s.R[P] + inv[4] * s.S[P] + inv[5] * s.T[P];
            double u3 = inv[6] * s.R[P] + inv[7] * s.S[P] + inv[8] * s.T[P];
            upd(u1, s.U1[P]);
            upd(u2, s.U2[P]);
            upd(u3, s.U3[P]);
        }
    }
    return worst;
}

ChargeSlice charge_slice(const SectorConfig& cfg, const std::vector<double>& rho, int D) {
    SectorIndices ix = cfg.indices();
    auto r = [&](int m, int n) { return rho[(m - 1) * static_cast<size_t>(D) + (n - 1)]; };
    ChargeSlice out;
    if (ix.has_weak()) {
        int a = ix.weak_a, b = ix.weak_b;
        out.lL = kInvSqrt2 * (r(a, a) + r(b, b));
        out.lR = kInvSqrt2 * (r(a, a) - r(b, b));
        out.nuL = kInvSqrt2 * (r(b, a) + r(a, b));
        out.nuR = kInvSqrt2 * (r(b, a) - r(a, b));
    }
    if (ix.has_strong()) {
        int s1 = ix.strong_1, s2 = ix.strong_2, s3 = ix.strong_3;
        out.dL = {kInvSqrt2 * (r(s1, s1) + r(s2, s2)), kInvSqrt2 * (r(s2, s2) + r(s3, s3)),
                  kInvSqrt2 * (r(s3, s3) + r(s1, s1))};
        out.dR = {kInvSqrt2 * (r(s1, s1) - r(s2, s2)), kInvSqrt2 * (r(s2, s2) - r(s3, s3)),
                  kInvSqrt2 * (r(s3, s3) - r(s1, s1))};
        out.uL = {kInvSqrt2 * (r(s1, s2) + r(s2, s1)), kInvSqrt2 * (r(s2, s3) + r(s3, s2)),
                  kInvSqrt2 * (r(s3, s1) + r(s1, s3))};
        out.uR = {kInvSqrt2 * (r(s1, s2) - r(s2, s1)), kInvSqrt2 * (r(s2, s3) - r(s3, s2)),
                  kInvSqrt2 * (r(s3, s1) - r(s1, s3))};
    }
    if (cfg.sector == Sector::unified) {
        int a = ix.weak_a, b = ix.weak_b;
        std::array<int, 3> s{ix.strong_1, ix.strong_2, ix.strong_3};
        // mixed pairs keyed by strong axis position
        std::array<double, 3> pa, pb;
        for (int k = 0; k < 3; ++k) {
            pa[k] = r(s[k], a) + r(a, s[k]);
            pb[k] = r(s[k], b) + r(b, s[k]);
        }
        double l1 = r(a, a), l2 = r(b, b), n1 = r(b, a), n2 = r(a, b);
        for (int k = 0; k < 3; ++k) {
            l1 += 0.5 * cfg.lepton_c_a[k] * pa[k];
            l2 += 0.5 * cfg.lepton_c_b[k] * pb[k];
            n1 += 0.5 * cfg.lepton_c_b[k] * pa[k];
            n2 += 0.5 * cfg.lepton_c_a[k] * pb[k];
        }
        out.lLp = kInvSqrt2 * (l1 + l2);
        out.nuLp = kInvSqrt2 * (n1 + n2);
        const double q = 0.5 * kInvSqrt2;
        const auto& ca = cfg.quark_c_a;  // first weak row over strong columns
        const auto& cb = cfg.quark_c_b;  // second weak row
        for (int k = 0; k < 3; ++k) {
            int k2 = (k + 1) % 3;
            // down-type combinations cross the constant indices, up-type
            // combinations keep them aligned
            out.dLp[k] = q * (cb[k2] * pa[k] + cb[k] * pa[k2] + ca[k2] * pb[k] + ca[k] * pb[k2]);
            out.uLp[k] = q * (cb[k] * pa[k] + ca[k] * pb[k] + cb[k2] * pa[k2] + ca[k2] * pb[k2]);
        }
    }
    return out;
}

FieldStrengthCheck verify_weak_em_field_strengths(SectorConfig cfg, const ConnectionField& conn,
                                                  const MetricField& metric,
                                                  const std::vector<Point>& samples) {
    int D = conn.dim();
    SectorIndices ix = cfg.indices();
    int a = ix.weak_a, b = ix.weak_b;
    FieldStrengthCheck out;
    for (const Point& p : samples) {
        out.metric_residual = std::max(out.metric_residual, cfg.derive_couplings(metric, p));
        double g = cfg.coupling_weak;
        auto Gm = metric.G_at(p);
        auto gam = conn.at(p);
        auto K = curvature_at(conn, p);
        auto Klow = lower_curvature(K, Gm, D);
        // potentials and their x-derivatives (lowering commutes: the sector
        // metric is constant)
        PotentialSlice pot = decompose_potentials(cfg, lower_gamma(gam, Gm, D), D);
        std::vector<double> dpot_B(D * D), dpot_A1(D * D), dpot_A2(D * D), dpot_A3(D * D);
        for (int dir = 0; dir < D; ++dir) {
            auto xs = seed_direction(p.coords.data(), D, dir);
            std::vector<Dual1> gd(conn.size());
            conn.coeffs(xs.data(), gd.data());
            std::vector<double> dgam(conn.size());
            for (size_t i = 0; i < dgam.size(); ++i) dgam[i] = gd[i].d;
            PotentialSlice dp = decompose_potentials(cfg, lower_gamma(dgam, Gm, D), D);
            for (int P = 0; P < D; ++P) {
                dpot_B[dir * D + P] = dp.Z[P];
                dpot_A3[dir * D + P] = -dp.A[P];
                dpot_A1[dir * D + P] = dp.W1[P];
                dpot_A2[dir * D + P] = dp.W2[P];
            }
        }
        auto kl = [&](int m, int n, int P, int Q) {
            return Klow[(((m - 1) * static_cast<size_t>(D) + (n - 1)) * D + P) * D + Q];
        };
        for (int P = 0; P < D; ++P)
            for (int Q = 0; Q < D; ++Q) {
                double Bpq = kInvSqrt2 * (kl(b, b, P, Q) + kl(a, a, P, Q));
                double F3 = kInvSqrt2 * (kl(b, b, P, Q) - kl(a, a, P, Q));
                double F1 = kInvSqrt2 * (kl(a, b, P, Q) + kl(b, a, P, Q));
                double F2 = kInvSqrt2 * (kl(a, b, P, Q) - kl(b, a, P, Q));
                out.max_strength = std::max({out.max_strength, std::fabs(Bpq), std::fabs(F3),
                                             std::fabs(F1), std::fabs(F2)});
                double A1P = pot.W1[P], A1Q = pot.W1[Q];
                double A2P = pot.W2[P], A2Q = pot.W2[Q];
                double A3P = -pot.A[P], A3Q = -pot.A[Q];
                double rhsB = dpot_B[P * D + Q] - dpot_B[Q * D + P];
                double rhs3 = dpot_A3[P * D + Q] - dpot_A3[Q * D + P] + g * (A1P * A2Q - A2P * A1Q);
                double rhs1 = dpot_A1[P * D + Q] - dpot_A1[Q * D + P] + g * (A2P * A3Q - A3P * A2Q);
                double rhs2 = dpot_A2[P * D + Q] - dpot_A2[Q * D + P] + g * (A1P * A3Q - A3P * A1Q);
                out.residual[0] = std::max(out.residual[0], std::fabs(Bpq - rhsB));
                out.residual[1] = std::max(out.residual[1], std::fabs(F3 - rhs3));
                out.residual[2] = std::max(out.residual[2], std::fabs(F1 - rhs1));
                out.residual[3] = std::max(out.residual[3], std::fabs(F2 - rhs2));
            }
    }
    return out;
}

std::vector<double> lower_gamma(const std::vector<double>& gamma, const std::vector<double>& G, int D) {
    std::vector<double> out(gamma.size(), 0.0);
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            for (int P = 0; P < D; ++P) {
                double s = 0.0;
                for (int H = 0; H < D; ++H)
                    s += G[M * D + H] * gamma[(H * static_cast<size_t>(D) + N) * D + P];
                out[(M * static_cast<size_t>(D) + N) * D + P] = s;
            }
    return out;
}

namespace {

// Gell-Mann generator basis, T_a = lambda_a / 2.
std::array<CMatrix, 8> gellmann_generators() {
    using cd = std::complex<double>;
    std::array<CMatrix, 8> T;
    for (auto& m : T) m = CMatrix(3);
    T[0].at(0, 1) = 1;
    T[0].at(1, 0) = 1;
    T[1].at(0, 1) = cd(0, -1);
    T[1].at(1, 0) = cd(0, 1);
    T[2].at(0, 0) = 1;
    T[2].at(1, 1) = -1;
    T[3].at(0, 2) = 1;
    T[3].at(2, 0) = 1;
    T[4].at(0, 2) = cd(0, -1);
    T[4].at(2, 0) = cd(0, 1);
    T[5].at(1, 2) = 1;
    T[5].at(2, 1) = 1;
    T[6].at(1, 2) = cd(0, -1);
    T[6].at(2, 1) = cd(0, 1);
    double s3 = 1.0 / std::sqrt(3.0);
    T[7].at(0, 0) = s3;
    T[7].at(1, 1) = s3;
    T[7].at(2, 2) = -2.0 * s3;
    for (auto& m : T) m = m * 0.5;
    return T;
}

}  // namespace

GluonAssembly assemble_gluon_matrix(const SectorConfig& cfg, const std::vector<double>& gamma_lowered,
                                    int D, double trace_tol) {
    SectorIndices ix = cfg.indices();
    GluonAssembly out;
    auto Gl = [&](int m, int n, int P) {
        return gamma_lowered[((m - 1) * static_cast<size_t>(D) + (n - 1)) * D + P];
    };
    for (int P = 0; P < D; ++P)
        out.trace_residual = std::max(out.trace_residual,
                                      std::fabs(Gl(ix.strong_1, ix.strong_1, P) +
                                                Gl(ix.strong_2, ix.strong_2, P) +
                                                Gl(ix.strong_3, ix.strong_3, P)));
    if (out.trace_residual > trace_tol) return out;
    out.applicable = true;
    PotentialSlice pot = decompose_potentials(cfg, gamma_lowered, D);
    auto T = gellmann_generators();
    double s3 = 1.0 / std::sqrt(3.0);
    using cd = std::complex<double>;
    for (int P = 0; P < D; ++P) {
        std::array<double, 8> comp = {pot.X12[P], pot.Y12[P], pot.S[P], pot.X31[P],
                                      pot.Y31[P], pot.X23[P], pot.Y23[P], pot.T[P]};
        CMatrix A(3);
        A.at(0, 0) = 0.5 * (pot.S[P] + s3 * pot.T[P]);
        A.at(0, 1) = 0.5 * cd(pot.X12[P], -pot.Y12[P]);
        A.at(0, 2) = 0.5 * cd(pot.X31[P], -pot.Y31[P]);
        A.at(1, 0) = 0.5 * cd(pot.X12[P], pot.Y12[P]);
        A.at(1, 1) = 0.5 * (-pot.S[P] + s3 * pot.T[P]);
        A.at(1, 2) = 0.5 * cd(pot.X23[P], -pot.Y23[P]);
        A.at(2, 0) = 0.5 * cd(pot.X31[P], pot.Y31[P]);
        A.at(2, 1) = 0.5 * cd(pot.X23[P], pot.Y23[P]);
        A.at(2, 2) = 0.5 * (-2.0 * s3 * pot.T[P]);
        CMatrix sum(3);
        for (int aidx = 0; aidx < 8; ++aidx) sum = sum + T[aidx] * cd(comp[aidx], 0.0);
        out.assembly_residual = std::max(out.assembly_residual, (A - sum).max_abs());
        // inverse map: components from the matrix, 2 tr(A T_a)
        for (int aidx = 0; aidx < 8; ++aidx) {
            CMatrix prod = A * T[aidx];
            cd tr = prod.at(0, 0) + prod.at(1, 1) + prod.at(2, 2);
            out.roundtrip_residual =
                std::max(out.roundtrip_residual, std::abs(tr * cd(2.0, 0.0) - cd(comp[aidx], 0.0)));
        }
    }
    return out;
}

ReferenceSystemStack build_sector_frame(const SectorConfig& cfg, const SectorFrameSpec& spec,
                                        const std::vector<Point>& validation_samples) {
    int D = cfg.sig.total_dim;
    int r = cfg.sig.external_dim;
    std::vector<Expr> odiag(D, Expr::constant(1.0)), idiag(D, Expr::constant(1.0));
    bool has_inner = !spec.stretches.empty() || spec.scale != 1.0;
    for (const auto& [axis, stretch] : spec.stretches) {
        if (axis <= r || axis > D) throw std::invalid_argument("stretch axis must be internal");
        odiag[axis - 1] = stretch;
        idiag[axis - 1] = Expr::constant(1.0) / stretch;
    }
    for (int m = r; m < D; ++m) idiag[m] = Expr::constant(spec.scale) * idiag[m];
    FrameField outer = FrameField::diagonal(D, odiag);
    FrameField inner = FrameField::diagonal(D, idiag);
    for (const auto& rot : spec.rotations) {
        if (rot.axis_a <= r || rot.axis_b <= r)
            throw std::invalid_argument("rotation plane must be internal");
        inner.premultiply(FrameField::plane_rotation(D, rot.axis_a, rot.axis_b, rot.angle));
        has_inner = true;
    }
    ReferenceSystemStack stack{"sector", outer,
                               has_inner ? std::optional<FrameField>(inner) : std::nullopt, std::nullopt};
    // validate the composite metric: external identity, internal constant
    // diagonal, with the sector's equal-entry conditions
    MetricField metric = MetricField::from_stack(stack);
    std::optional<std::vector<double>> ref;
    for (const Point& p : validation_samples) {
        auto G = metric.G_at(p);
        for (int m = 0; m < D; ++m)
            for (int n = 0; n < D; ++n) {
                double want = (m == n) ? (m < r ? 1.0 : spec.scale * spec.scale) : 0.0;
                if (std::fabs(G[m * D + n] - want) > 1e-9) {
                    std::string cond = (m != n) ? "off-diagonal metric entry must vanish"
                                                : "diagonal metric entry must be constant";
                    throw SectorConstraintError(cond, p);
                }
            }
        if (!ref) ref = G;
    }
    return stack;
}

}  // namespace affine
