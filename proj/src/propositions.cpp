#include "affine/propositions.hpp"

namespace affine {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

std::vector<EvolutionLine> lepton_evolution_lines(bool mixed_primed) {
    using C = ChargeId;
    using P = PotentialId;
    using K = CouplingKind;
    C nu_partner = mixed_primed ? C::nuLp : C::nuL;
    C l_partner = mixed_primed ? C::lLp : C::lL;
    return {
        {C::lL, {{-1, K::weak, C::lL, P::Z}, {-1, K::weak, C::lR, P::A}, {-1, K::weak, nu_partner, P::W1}}, "lL"},
        {C::lR, {{-1, K::weak, C::lR, P::Z}, {-1, K::weak, C::lL, P::A}}, "lR"},
        {C::nuL, {{-1, K::weak, C::nuL, P::Z}, {-1, K::weak, l_partner, P::W1}}, "nuL"},
        {C::nuR, {{-1, K::weak, C::nuR, P::Z}}, "nuR"},
    };
}

std::vector<EvolutionLine> quark_evolution_lines() {
    using C = ChargeId;
    using P = PotentialId;
    using K = CouplingKind;
    std::vector<EvolutionLine> lines;
    lines.push_back({C::d1L,
                     {{-1, K::strong, C::d1L, P::U1},
                      {1, K::strong, C::d2L, P::V1},
                      {-1, K::strong, C::d3L, P::V1},
                      {-1, K::strong, C::u1L, P::X23},
                      {-0.5, K::strong, C::u2L, P::X31},
                      {0.5, K::strong, C::u2L, P::Y31},
                      {-0.5, K::strong, C::u3L, P::X12},
                      {-0.5, K::strong, C::u3L, P::Y12},
                      {-1, K::weak, C::u1Lp, P::W1}},
                     "d1L"});
    lines.push_back({C::d2L,
                     {{-1, K::strong, C::d2L, P::U2},
                      {1, K::strong, C::d3L, P::V2},
                      {-1, K::strong, C::d1L, P::V2},
                      {-1, K::strong, C::u2L, P::X31},
                      {-0.5, K::strong, C::u3L, P::X12},
                      {0.5, K::strong, C::u3L, P::Y12},
                      {-0.5, K::strong, C::u1L, P::X23},
                      {-0.5, K::strong, C::u1L, P::Y23},
                      {-1, K::weak, C::u2Lp, P::W1}},
                     "d2L"});
    lines.push_back({C::d3L,
                     {{-1, K::strong, C::d3L, P::U3},
                      {1, K::strong, C::d1L, P::V3},
                      {-1, K::strong, C::d2L, P::V3},
                      {-1, K::strong, C::u3L, P::X12},
                      {-0.5, K::strong, C::u1L, P::X23},
                      {0.5, K::strong, C::u1L, P::Y23},
                      {-0.5, K::strong, C::u2L, P::X31},
                      {-0.5, K::strong, C::u2L, P::Y31},
                      {-1, K::weak, C::u3Lp, P::W1}},
                     "d3L"});
    lines.push_back({C::d1R,
                     {{-1, K::strong, C::d1L, P::V1},
                      {1, K::strong, C::d2L, P::U1},
                      {-1, K::strong, C::d3L, P::U1},
                      {1, K::strong, C::u1L, P::Y23},
                      {0.5, K::strong, C::u2L, P::X31},
                      {-0.5, K::strong, C::u2L, P::Y31},
                      {-0.5, K::strong, C::u3L, P::X12},
                      {-0.5, K::strong, C::u3L, P::Y12}},
                     "d1R"});
    lines.push_back({C::d2R,
                     {{-1, K::strong, C::d2L, P::V2},
                      {1, K::strong, C::d3L, P::U2},
                      {-1, K::strong, C::d1L, P::U2},
                      {1, K::strong, C::u2L, P::Y31},
                      {0.5, K::strong, C::u3L, P::X12},
                      {-0.5, K::strong, C::u3L, P::Y12},
                      {-0.5, K::strong, C::u1L, P::X23},
                      {-0.5, K::strong, C::u1L, P::Y23}},
                     "d2R"});
    lines.push_back({C::d3R,
                     {{-1, K::strong, C::d3L, P::V3},
                      {1, K::strong, C::d1L, P::U3},
                      {-1, K::strong, C::d2L, P::U3},
                      {1, K::strong, C::u3L, P::Y12},
                      {0.5, K::strong, C::u1L, P::X23},
                      {-0.5, K::strong, C::u1L, P::Y23},
                      {-0.5, K::strong, C::u2L, P::X31},
                      {-0.5, K::strong, C::u2L, P::Y31}},
                     "d3R"});
    lines.push_back({C::u1L,
                     {{-1, K::strong, C::u1L, P::U1},
                      {-0.5, K::strong, C::u2L, P::X12},
                      {-0.5, K::strong, C::u2L, P::Y12},
                      {-0.5, K::strong, C::u3L, P::X31},
                      {0.5, K::strong, C::u3L, P::Y31},
                      {-1, K::strong, C::d1L, P::X23},
                      {1, K::strong, C::d2L, P::Y23},
                      {-1, K::strong, C::d3L, P::Y23},
                      {-1, K::weak, C::d1Lp, P::W1}},
                     "u1L"});
    lines.push_back({C::u2L,
                     {{-1, K::strong, C::u2L, P::U2},
                      {-0.5, K::strong, C::u3L, P::X23},
                      {-0.5, K::strong, C::u3L, P::Y23},
                      {-0.5, K::strong, C::u1L, P::X12},
                      {0.5, K::strong, C::u1L, P::Y12},
                      {-1, K::strong, C::d2L, P::X31},
                      {1, K::strong, C::d3L, P::Y31},
                      {-1, K::strong, C::d1L, P::Y31},
                      {-1, K::weak, C::d2Lp, P::W1}},
                     "u2L"});
    lines.push_back({C::u3L,
                     {{-1, K::strong, C::u3L, P::U3},
                      {-0.5, K::strong, C::u1L, P::X31},
                      {-0.5, K::strong, C::u1L, P::Y31},
                      {-0.5, K::strong, C::u2L, P::X23},
                      {0.5, K::strong, C::u2L, P::Y23},
                      {-1, K::strong, C::d3L, P::X12},
                      {1, K::strong, C::d1L, P::Y12},
                      {-1, K::strong, C::d2L, P::Y12},
                      {-1, K::weak, C::d3Lp, P::W1}},
                     "u3L"});
    lines.push_back({C::u1R,
                     {{-1, K::strong, C::u1R, P::U1},
                      {0.5, K::strong, C::u2R, P::X12},
                      {0.5, K::strong, C::u2R, P::Y12},
                      {0.5, K::strong, C::u3R, P::X31},
                      {-0.5, K::strong, C::u3R, P::Y31}},
                     "u1R"});
    lines.push_back({C::u2R,
                     {{-1, K::strong, C::u2R, P::U2},
                      {0.5, K::strong, C::u3R, P::X23},
                      {0.5, K::strong, C::u3R, P::Y23},
                      {0.5, K::strong, C::u1R, P::X12},
                      {-0.5, K::strong, C::u1R, P::Y12}},
                     "u2R"});
    lines.push_back({C::u3R,
                     {{-1, K::strong, C::u3R, P::U3},
                      {0.5, K::strong, C::u1R, P::X31},
                      {0.5, K::strong, C::u1R, P::Y31},
                      {0.5, K::strong, C::u2R, P::X23},
                      {-0.5, K::strong, C::u2R, P::Y23}},
                     "u3R"});
    return lines;
}

double charge_value(const ChargeSlice& s, ChargeId id) {
    switch (id) {
        case ChargeId::lL: return s.lL;
        case ChargeId::lR: return s.lR;
        case ChargeId::nuL: return s.nuL;
        case ChargeId::nuR: return s.nuR;
        case ChargeId::d1L: return s.dL[0];
        case ChargeId::d2L: return s.dL[1];
        case ChargeId::d3L: return s.dL[2];
        case ChargeId::d1R: return s.dR[0];
        case ChargeId::d2R: return s.dR[1];
        case ChargeId::d3R: return s.dR[2];
        case ChargeId::u1L: return s.uL[0];
        case ChargeId::u2L: return s.uL[1];
        case ChargeId::u3L: return s.uL[2];
        case ChargeId::u1R: return s.uR[0];
        case ChargeId::u2R: return s.uR[1];
        case ChargeId::u3R: return s.uR[2];
        case ChargeId::lLp: return s.lLp;
        case ChargeId::nuLp: return s.nuLp;
        case ChargeId::d1Lp: return s.dLp[0];
        case ChargeId::d2Lp: return s.dLp[1];
        case ChargeId::d3Lp: return s.dLp[2];
        case ChargeId::u1Lp: return s.uLp[0];
        case ChargeId::u2Lp: return s.uLp[1];
        case ChargeId::u3Lp: return s.uLp[2];
    }
    throw std::logic_error("unknown charge id");
}

double potential_value(const PotentialSlice& s, PotentialId id, int P) {
    switch (id) {
        case PotentialId::Z: return s.Z[P];
        case PotentialId::A: return s.A[P];
        case PotentialId::W1: return s.W1[P];
        case PotentialId::W2: return s.W2[P];
        case PotentialId::U1: return s.U1[P];
        case PotentialId::V1: return s.V1[P];
        case PotentialId::U2: return s.U2[P];
        case PotentialId::V2: return s.V2[P];
        case PotentialId::U3: return s.U3[P];
        case PotentialId::V3: return s.V3[P];
        case PotentialId::X23: return s.X23[P];
        case PotentialId::Y23: return s.Y23[P];
        case PotentialId::X31: return s.X31[P];
        case PotentialId::Y31: return s.Y31[P];
        case PotentialId::X12: return s.X12[P];
        case PotentialId::Y12: return s.Y12[P];
    }
    throw std::logic_error("unknown potential id");
}

bool line_couples_potential(const EvolutionLine& line, PotentialId id) {
    for (const auto& t : line.terms)
        if (t.potential == id) return true;
    return false;
}

namespace {

// Left side of an evolution line: the chiral combination of the covariant
// derivative components.
double lhs_value(const SectorConfig& cfg, const std::vector<double>& cov, int D, ChargeId id, int P) {
    // cov holds rho_{MN;Q} as [M][N][Q]; build the combination's slice
    std::vector<double> comp(static_cast<size_t>(D) * D);
    for (int M = 0; M < D; ++M)
        for (int N = 0; N < D; ++N)
            comp[M * D + N] = cov[(M * static_cast<size_t>(D) + N) * D + P];
    ChargeSlice s = charge_slice(cfg, comp, D);
    return charge_value(s, id);
}

struct LinePrecondition {
    bool ok = true;
    std::string diagnostic;
};

LinePrecondition check_weak_symmetry(const SectorConfig& cfg, const std::vector<double>& gl, int D,
                                     double tol) {
    SectorIndices ix = cfg.indices();
    int a = ix.weak_a - 1, b = ix.weak_b - 1;
    for (int P = 0; P < D; ++P) {
        double diff = std::fabs(gl[(a * static_cast<size_t>(D) + b) * D + P] -
                                gl[(b * static_cast<size_t>(D) + a) * D + P]);
        if (diff > tol)
            return {false, "weak symmetry condition violated (residual " + std::to_string(diff) + ")"};
    }
    return {};
}

LinePrecondition check_strong_trace(const SectorConfig& cfg, const std::vector<double>& gl, int D,
                                    double tol) {
    SectorIndices ix = cfg.indices();
    int s1 = ix.strong_1 - 1, s2 = ix.strong_2 - 1, s3 = ix.strong_3 - 1;
    for (int P = 0; P < D; ++P) {
        double tr = gl[(s1 * static_cast<size_t>(D) + s1) * D + P] +
                    gl[(s2 * static_cast<size_t>(D) + s2) * D + P] +
                    gl[(s3 * static_cast<size_t>(D) + s3) * D + P];
        if (std::fabs(tr) > tol)
            return {false, "strong trace condition violated (residual " + std::to_string(tr) + ")"};
    }
    return {};
}

LineResidualReport evolution_residual(const SectorConfig& cfg, const ConnectionField& conn,
                                      const MetricField& metric, const TensorField& rho,
                                      const std::vector<Point>& samples,
                                      const std::vector<EvolutionLine>& lines, bool need_trace) {
    int D = conn.dim();
    LineResidualReport rep;
    for (const auto& l : lines) rep.names.push_back(l.name);
    rep.residuals.assign(lines.size(), 0.0);
    SectorConfig cfg_local = cfg;
    const double pre_tol = 1e-9;
    for (const Point& p : samples) {
        double metric_res = cfg_local.derive_couplings(metric, p);
        if (metric_res > pre_tol) {
            rep.skipped = true;
            rep.diagnostic = "sector metric equalities violated";
            return rep;
        }
        auto G = metric.G_at(p);
        auto gamma = conn.at(p);
        auto gl = lower_gamma(gamma, G, D);
        if (auto c = check_weak_symmetry(cfg_local, gl, D, pre_tol); cfg_local.indices().has_weak() && !c.ok) {
            rep.skipped = true;
            rep.diagnostic = c.diagnostic;
            return rep;
        }
        if (need_trace) {
            if (auto c = check_strong_trace(cfg_local, gl, D, pre_tol); !c.ok) {
                rep.skipped = true;
                rep.diagnostic = c.diagnostic;
                return rep;
            }
        }
        PotentialSlice pot = decompose_potentials(cfg_local, gl, D);
        auto rho_vals = rho.eval_at(p);
        ChargeSlice charges = charge_slice(cfg_local, rho_vals, D);
        // cov[M][N][Q] and plain partials for the right side
        std::vector<double> cov(rho.size() * D);
        eval_covariant_derivative(rho, conn, p.coords.data(), cov.data());
        std::vector<std::vector<double>> drho(D, std::vector<double>(rho.size()));
        for (int Q = 0; Q < D; ++Q) {
            auto xs = seed_direction(p.coords.data(), D, Q);
            std::vector<Dual1> dv(rho.size());
            rho.eval(xs.data(), dv.data());
            for (size_t i = 0; i < dv.size(); ++i) drho[Q][i] = dv[i].d;
        }
        for (size_t li = 0; li < lines.size(); ++li) {
            const auto& line = lines[li];
            for (int P = 0; P < D; ++P) {
                double lhs = lhs_value(cfg_local, cov, D, line.lhs, P);
                ChargeSlice dslice = charge_slice(cfg_local, drho[P], D);
                double rhs = charge_value(dslice, line.lhs);
                for (const auto& t : line.terms) {
                    double coupling = t.coupling == CouplingKind::weak ? cfg_local.coupling_weak
                                                                       : cfg_local.coupling_strong;
                    rhs += t.coeff * coupling * charge_value(charges, t.charge) *
                           potential_value(pot, t.potential, P);
                }
                rep.residuals[li] = std::max(rep.residuals[li], std::fabs(lhs - rhs));
            }
        }
    }
    return rep;
}

}  // namespace

LineResidualReport lepton_evolution_residual(const SectorConfig& cfg, const ConnectionField& conn,
                                             const MetricField& metric, const TensorField& rho,
                                             const std::vector<Point>& samples) {
    return evolution_residual(cfg, conn, metric, rho, samples, lepton_evolution_lines(false), false);
}

namespace {

LineResidualReport skipped_report(const std::vector<EvolutionLine>& lines, const std::string& why) {
    LineResidualReport rep;
    for (const auto& l : lines) rep.names.push_back(l.name);
    rep.residuals.assign(lines.size(), 0.0);
    rep.skipped = true;
    rep.diagnostic = why;
    return rep;
}

}  // namespace

LineResidualReport pmns_mixing_residual(const SectorConfig& cfg, const ConnectionField& conn,
                                        const MetricField& metric, const TensorField& rho,
                                        const std::vector<Point>& samples) {
    auto cond = check_unified_conditions(cfg, conn, metric, rho, samples, {true, true, true, true, false, false});
    for (int i = 0; i < 4; ++i)
        if (cond.residual[i] > 1e-8)
            return skipped_report(lepton_evolution_lines(true),
                                  "lepton mixing condition block " + std::to_string(i + 1) + " violated");
    return evolution_residual(cfg, conn, metric, rho, samples, lepton_evolution_lines(true), true);
}

LineResidualReport ckm_mixing_residual(const SectorConfig& cfg, const ConnectionField& conn,
                                       const MetricField& metric, const TensorField& rho,
                                       const std::vector<Point>& samples) {
    auto cond = check_unified_conditions(cfg, conn, metric, rho, samples, {true, true, false, false, true, true});
    for (int i : {0, 1, 4, 5})
        if (cond.residual[i] > 1e-8)
            return skipped_report(quark_evolution_lines(),
                                  "quark mixing condition block " + std::to_string(i + 1) + " violated");
    return evolution_residual(cfg, conn, metric, rho, samples, quark_evolution_lines(), true);
}

UnifiedConditionReport check_unified_conditions(const SectorConfig& cfg, const ConnectionField& conn,
                                                const MetricField& metric, const TensorField& rho,
                                                const std::vector<Point>& samples,
                                                const std::array<bool, 6>& toggles) {
    if (cfg.sector != Sector::unified) throw std::invalid_argument("condition blocks need the unified sector");
    int D = cfg.sig.total_dim;
    SectorIndices ix = cfg.indices();
    int a = ix.weak_a - 1, b = ix.weak_b - 1;
    std::array<int, 3> s{ix.strong_1 - 1, ix.strong_2 - 1, ix.strong_3 - 1};
    UnifiedConditionReport rep;
    for (int i = 0; i < 6; ++i) rep.checked[i] = toggles[i];
    const double vacuous_floor = 1e-12;
    SectorConfig cfg_local = cfg;
    for (const Point& p : samples) {
        auto G = metric.G_at(p);
        auto gamma = conn.at(p);  // raised first index
        auto rv = rho.eval_at(p);
        auto r = [&](int m, int n) { return rv[m * static_cast<size_t>(D) + n]; };
        auto gu = [&](int m, int n, int P) {
            return gamma[(m * static_cast<size_t>(D) + n) * D + P];
        };
        if (toggles[0]) rep.residual[0] = std::max(rep.residual[0], cfg_local.derive_couplings(metric, p));
        if (toggles[1]) {
            auto gl = lower_gamma(gamma, G, D);
            for (int P = 0; P < D; ++P) {
                rep.residual[1] = std::max(rep.residual[1],
                                           std::fabs(gl[(b * static_cast<size_t>(D) + a) * D + P] -
                                                     gl[(a * static_cast<size_t>(D) + b) * D + P]));
                double tr = 0.0;
                for (int k = 0; k < 3; ++k) tr += gl[(s[k] * static_cast<size_t>(D) + s[k]) * D + P];
                rep.residual[1] = std::max(rep.residual[1], std::fabs(tr));
            }
        }
        if (toggles[2]) {
            // mixed-row proportionality against the weak reference entries
            double ref = 0.0;
            for (int P = 0; P < D; ++P) {
                ref = std::max(ref, std::fabs(gu(b, a, P)));
                ref = std::max(ref, std::fabs(gu(a, b, P)));
            }
            if (ref < vacuous_floor) rep.vacuous[2] = true;
            for (int P = 0; P < D; ++P)
                for (int k = 0; k < 3; ++k) {
                    rep.residual[2] = std::max(rep.residual[2],
                                               std::fabs(gu(s[k], a, P) - cfg.lepton_c_b[k] * gu(b, a, P)));
                    rep.residual[2] = std::max(rep.residual[2],
                                               std::fabs(gu(s[k], b, P) - cfg.lepton_c_a[k] * gu(a, b, P)));
                }
            for (int k = 0; k < 3; ++k)
                rep.residual[2] =
                    std::max(rep.residual[2], std::fabs(cfg.lepton_c_a[k] - cfg.lepton_c_b[k]));
        }
        if (toggles[3]) {
            for (int k = 0; k < 3; ++k) {
                rep.residual[3] = std::max(rep.residual[3], std::fabs(r(s[k], b) - r(s[k], a)));
                rep.residual[3] = std::max(rep.residual[3], std::fabs(r(b, s[k]) - r(a, s[k])));
            }
        }
        if (toggles[4]) {
            double ref = 0.0;
            for (int P = 0; P < D; ++P) {
                ref = std::max(ref, std::fabs(gu(b, a, P)));
                ref = std::max(ref, std::fabs(gu(a, b, P)));
            }
            if (ref < vacuous_floor) rep.vacuous[4] = true;
            // the proportionality constant's label is the opposite weak axis
            for (int P = 0; P < D; ++P)
                for (int k = 0; k < 3; ++k) {
                    rep.residual[4] = std::max(rep.residual[4],
                                               std::fabs(gu(b, s[k], P) - cfg.quark_c_a[k] * gu(b, a, P)));
                    rep.residual[4] = std::max(rep.residual[4],
                                               std::fabs(gu(a, s[k], P) - cfg.quark_c_b[k] * gu(a, b, P)));
                }
            rep.residual[4] = std::max({rep.residual[4],
                                        std::fabs(cfg.quark_c_a[0] - cfg.quark_c_a[1]),
                                        std::fabs(cfg.quark_c_a[1] - cfg.quark_c_a[2]),
                                        std::fabs(cfg.quark_c_b[0] - cfg.quark_c_b[1]),
                                        std::fabs(cfg.quark_c_b[1] - cfg.quark_c_b[2])});
        }
        if (toggles[5]) {
            for (int k = 1; k < 3; ++k) {
                rep.residual[5] = std::max(rep.residual[5], std::fabs(r(s[k], a) - r(s[0], a)));
                rep.residual[5] = std::max(rep.residual[5], std::fabs(r(s[k], b) - r(s[0], b)));
                rep.residual[5] = std::max(rep.residual[5], std::fabs(r(a, s[k]) - r(a, s[0])));
                rep.residual[5] = std::max(rep.residual[5], std::fabs(r(b, s[k]) - r(b, s[0])));
            }
        }
    }
    return rep;
}

FieldClassification classify_field(const std::array<double, 9>& rho_strong,
                                   const std::array<double, 9>& gamma_strong, double tol,
                                   const std::string& claimed_nonzero) {
    auto nz = [&](double v) { return std::fabs(v) > tol; };
    FieldClassification out;
    bool any_rho = false, any_gamma = false;
    for (double v : rho_strong) any_rho |= nz(v);
    for (double v : gamma_strong) any_gamma |= nz(v);
    out.lepton = !any_rho && !any_gamma;
    out.hadron = !out.lepton;
    // strong page order: (11,12,13, 21,22,23, 31,32,33)
    double r11 = rho_strong[0], r12 = rho_strong[1], r13 = rho_strong[2];
    double r21 = rho_strong[3], r22 = rho_strong[4], r23 = rho_strong[5];
    double r31 = rho_strong[6], r32 = rho_strong[7], r33 = rho_strong[8];
    out.quark_nonzero = {nz(r11) || nz(r22), nz(r22) || nz(r33), nz(r33) || nz(r11),
                         nz(r12) || nz(r21), nz(r23) || nz(r32), nz(r31) || nz(r13)};
    static const char* names[6] = {"d1", "d2", "d3", "u1", "u2", "u3"};
    int count = 0, which = -1;
    for (int i = 0; i < 6; ++i)
        if (out.quark_nonzero[i]) { ++count; which = i; }
    if (out.hadron && count == 1) {
        out.individual_quark_candidate = true;
        out.candidate = names[which];
    }
    if (!claimed_nonzero.empty()) {
        // a claimed lone down-type quark contradicts the shared diagonal:
        // the other two down charges vanishing forces all three diagonal
        // components to zero, hence the claimed one as well
        for (int i = 0; i < 3; ++i) {
            if (claimed_nonzero != names[i]) continue;
            bool others_zero = !out.quark_nonzero[(i + 1) % 3] && !out.quark_nonzero[(i + 2) % 3];
            bool derived_zero = !out.quark_nonzero[i];
            if (others_zero && derived_zero) out.confinement_excluded = true;
        }
    }
    return out;
}

GenerationCombos generation_report(const SectorConfig& cfg, const std::vector<double>& rho_values,
                                   int D, const GenerationConstants& k) {
    if (cfg.sector != Sector::unified)
        throw std::invalid_argument("generation combinations need the unified sector");
    SectorIndices ix = cfg.indices();
    int a = ix.weak_a, b = ix.weak_b;
    std::array<int, 3> s{ix.strong_1, ix.strong_2, ix.strong_3};
    auto r = [&](int m, int n) { return rho_values[(m - 1) * static_cast<size_t>(D) + (n - 1)]; };
    GenerationCombos out;
    out.e = {r(a, a), r(b, b)};
    out.nu_e = {r(b, a), r(a, b)};
    // second generation mixes the strong-row/weak-column components, the
    // third generation the transposed weak-row/strong-column ones
    for (int c = 0; c < 2; ++c) {
        out.mu[c] = k.a_mu * out.e[c];
        out.nu_mu[c] = k.b_mu * out.nu_e[c];
    }
    for (int kk = 0; kk < 3; ++kk) {
        out.mu[0] += 0.5 * k.amu_a[kk] * r(s[kk], a);
        out.mu[1] += 0.5 * k.amu_b[kk] * r(s[kk], b);
        out.nu_mu[0] += 0.5 * k.bmu_a[kk] * r(s[kk], a);
        out.nu_mu[1] += 0.5 * k.bmu_b[kk] * r(s[kk], b);
    }
    for (int c = 0; c < 2; ++c) {
        out.tau[c] = k.a_tau * out.mu[c];
        out.nu_tau[c] = k.b_tau * out.nu_mu[c];
    }
    for (int kk = 0; kk < 3; ++kk) {
        out.tau[0] += 0.5 * k.atau_a[kk] * r(a, s[kk]);
        out.tau[1] += 0.5 * k.atau_b[kk] * r(b, s[kk]);
        out.nu_tau[0] += 0.5 * k.btau_a[kk] * r(a, s[kk]);
        out.nu_tau[1] += 0.5 * k.btau_b[kk] * r(b, s[kk]);
    }
    return out;
}

Expr random_smooth_expr(Rng& rng, int dim, double amplitude) {
    int i = 1 + rng.index(dim);
    int j = 1 + rng.index(dim);
    Expr e = Expr::constant(amplitude * rng.uniform(-1, 1)) * sin(Expr::constant(rng.uniform(0.5, 1.5)) * Expr::coord(i)) +
             Expr::constant(amplitude * rng.uniform(-1, 1)) * cos(Expr::constant(rng.uniform(0.5, 1.5)) * Expr::coord(j)) +
             Expr::constant(amplitude * rng.uniform(-0.5, 0.5)) * Expr::coord(1 + rng.index(dim)) +
             Expr::constant(amplitude * rng.uniform(-0.5, 0.5));
    return e;
}

namespace {

struct GammaBuilder {
    int D;
    std::vector<Expr> lowered;  // Gamma_{MNP}

    explicit GammaBuilder(int dim) : D(dim), lowered(static_cast<size_t>(dim) * dim * dim, Expr::constant(0.0)) {}

    void set(int m, int n, int P, const Expr& e) {  // 1-based m,n; 0-based P
        lowered[((m - 1) * static_cast<size_t>(D) + (n - 1)) * D + P] = e;
    }
    Expr get(int m, int n, int P) const {
        return lowered[((m - 1) * static_cast<size_t>(D) + (n - 1)) * D + P];
    }

    // raise the first index with a constant diagonal inverse metric
    ConnectionPtr connection(const std::vector<double>& ginv_diag) const {
        std::vector<Expr> up(lowered.size(), Expr::constant(0.0));
        for (int M = 0; M < D; ++M)
            for (int N = 0; N < D; ++N)
                for (int P = 0; P < D; ++P)
                    up[(M * static_cast<size_t>(D) + N) * D + P] =
                        Expr::constant(ginv_diag[M]) * lowered[(M * static_cast<size_t>(D) + N) * D + P];
        return std::make_shared<ExprConnection>(D, up, ConnKind::synthetic);
    }
};

MetricField diag_metric(int D, int r, double internal_weak, double internal_strong, int weak_count) {
    std::vector<Expr> diag(D, Expr::constant(1.0));
    for (int m = r; m < D; ++m) {
        bool weak = (m - r) < weak_count;
        diag[m] = Expr::constant(weak ? internal_weak : internal_strong);
    }
    return MetricField::diagonal(D, diag);
}

TensorField rho_from(const std::vector<Expr>& entries, int D) {
    return TensorField::from_exprs(D, {Var::lower, Var::lower}, entries);
}

}  // namespace

SectorScenario make_conforming_lepton_scenario(uint64_t seed) {
    Rng rng(seed);
    int D = 5, r = 3;
    SectorScenario sc;
    sc.cfg = SectorConfig::make(Sector::weak_em, D);
    double gw = rng.uniform(0.5, 1.5);  // lower-metric weak entries
    sc.metric = diag_metric(D, r, gw, gw, 2);
    GammaBuilder gb(D);
    Expr w = random_smooth_expr(rng, D, 0.4);
    for (int P = 0; P < D; ++P) {
        Expr wP = random_smooth_expr(rng, D, 0.4);
        gb.set(4, 5, P, wP);
        gb.set(5, 4, P, wP);
        gb.set(4, 4, P, random_smooth_expr(rng, D, 0.4));
        gb.set(5, 5, P, random_smooth_expr(rng, D, 0.4));
    }
    std::vector<double> ginv_diag(D, 1.0);
    for (int m = r; m < D; ++m) ginv_diag[m] = 1.0 / gw;
    sc.conn = gb.connection(ginv_diag);
    std::vector<Expr> rho(static_cast<size_t>(D) * D, Expr::constant(0.0));
    for (int m = 4; m <= 5; ++m)
        for (int n = 4; n <= 5; ++n)
            rho[(m - 1) * static_cast<size_t>(D) + (n - 1)] = random_smooth_expr(rng, D, 0.8);
    sc.rho = rho_from(rho, D);
    return sc;
}

SectorScenario make_conforming_strong_scenario(uint64_t seed) {
    Rng rng(seed);
    int D = 6, r = 3;
    SectorScenario sc;
    sc.cfg = SectorConfig::make(Sector::strong, D);
    double gs = rng.uniform(0.5, 1.5);
    sc.metric = diag_metric(D, r, gs, gs, 0);
    GammaBuilder gb(D);
    for (int P = 0; P < D; ++P) {
        Expr g11 = random_smooth_expr(rng, D, 0.4);
        Expr g22 = random_smooth_expr(rng, D, 0.4);
        gb.set(4, 4, P, g11);
        gb.set(5, 5, P, g22);
        gb.set(6, 6, P, -(g11 + g22));  // traceless
        for (int m = 4; m <= 6; ++m)
            for (int n = 4; n <= 6; ++n)
                if (m != n) gb.set(m, n, P, random_smooth_expr(rng, D, 0.4));
    }
    std::vector<double> ginv_diag(D, 1.0);
    for (int m = r; m < D; ++m) ginv_diag[m] = 1.0 / gs;
    sc.conn = gb.connection(ginv_diag);
    std::vector<Expr> rho(static_cast<size_t>(D) * D, Expr::constant(0.0));
    for (int m = 4; m <= 6; ++m)
        for (int n = 4; n <= 6; ++n)
            rho[(m - 1) * static_cast<size_t>(D) + (n - 1)] = random_smooth_expr(rng, D, 0.8);
    sc.rho = rho_from(rho, D);
    return sc;
}

namespace {

SectorScenario make_unified_base(Rng& rng, double& gw_low, double& gs_low) {
    int D = 8, r = 3;
    SectorScenario sc;
    sc.cfg = SectorConfig::make(Sector::unified, D);
    gw_low = rng.uniform(0.6, 1.4);
    gs_low = rng.uniform(0.6, 1.4);
    sc.metric = diag_metric(D, r, gw_low, gs_low, 2);
    return sc;
}

}  // namespace

SectorScenario make_conforming_pmns_scenario(uint64_t seed) {
    Rng rng(seed);
    double gw_low = 0, gs_low = 0;
    SectorScenario sc = make_unified_base(rng, gw_low, gs_low);
    int D = 8, r = 3;
    for (int k = 0; k < 3; ++k) {
        double c = rng.uniform(-0.5, 0.5);
        sc.cfg.lepton_c_a[k] = c;
        sc.cfg.lepton_c_b[k] = c;
    }
    GammaBuilder gb(D);
    std::array<int, 3> s{6, 7, 8};
    for (int P = 0; P < D; ++P) {
        Expr wsym = random_smooth_expr(rng, D, 0.35);
        gb.set(4, 5, P, wsym);
        gb.set(5, 4, P, wsym);
        gb.set(4, 4, P, random_smooth_expr(rng, D, 0.35));
        gb.set(5, 5, P, random_smooth_expr(rng, D, 0.35));
        Expr g66 = random_smooth_expr(rng, D, 0.35);
        Expr g77 = random_smooth_expr(rng, D, 0.35);
        gb.set(6, 6, P, g66);
        gb.set(7, 7, P, g77);
        gb.set(8, 8, P, -(g66 + g77));
        for (int m : s)
            for (int n : s)
                if (m != n) gb.set(m, n, P, random_smooth_expr(rng, D, 0.35));
        // mixed rows: strong row over weak column proportional to the weak
        // reference entries (raised-index proportionality with constant
        // factors translates to a metric ratio on the lowered entries)
        for (int k = 0; k < 3; ++k) {
            double factor_a = sc.cfg.lepton_c_b[k] * (gs_low / gw_low);
            double factor_b = sc.cfg.lepton_c_a[k] * (gs_low / gw_low);
            gb.set(s[k], 4, P, Expr::constant(factor_a) * gb.get(5, 4, P));
            gb.set(s[k], 5, P, Expr::constant(factor_b) * gb.get(4, 5, P));
        }
        // weak rows over strong columns are unconstrained here
        for (int m = 4; m <= 5; ++m)
            for (int n : s) gb.set(m, n, P, random_smooth_expr(rng, D, 0.35));
    }
    std::vector<double> ginv_diag(D, 1.0);
    for (int m = r; m < D; ++m) ginv_diag[m] = 1.0 / ((m - r) < 2 ? gw_low : gs_low);
    sc.conn = gb.connection(ginv_diag);
    std::vector<Expr> rho(static_cast<size_t>(D) * D, Expr::constant(0.0));
    auto rset = [&](int m, int n, const Expr& e) { rho[(m - 1) * static_cast<size_t>(D) + (n - 1)] = e; };
    for (int m = 4; m <= 5; ++m)
        for (int n = 4; n <= 5; ++n) rset(m, n, random_smooth_expr(rng, D, 0.7));
    for (int m : s)
        for (int n : s) rset(m, n, random_smooth_expr(rng, D, 0.7));
    for (int k = 0; k < 3; ++k) {
        Expr row = random_smooth_expr(rng, D, 0.7);  // rho_{s_k, a} = rho_{s_k, b}
        rset(s[k], 4, row);
        rset(s[k], 5, row);
        Expr col = random_smooth_expr(rng, D, 0.7);  // rho_{a, s_k} = rho_{b, s_k}
        rset(4, s[k], col);
        rset(5, s[k], col);
    }
    sc.rho = rho_from(rho, D);
    return sc;
}

SectorScenario make_conforming_ckm_scenario(uint64_t seed) {
    Rng rng(seed);
    double gw_low = 0, gs_low = 0;
    SectorScenario sc = make_unified_base(rng, gw_low, gs_low);
    int D = 8, r = 3;
    double ca = rng.uniform(-0.5, 0.5), cb = rng.uniform(-0.5, 0.5);
    sc.cfg.quark_c_a = {ca, ca, ca};
    sc.cfg.quark_c_b = {cb, cb, cb};
    GammaBuilder gb(D);
    std::array<int, 3> s{6, 7, 8};
    for (int P = 0; P < D; ++P) {
        Expr wsym = random_smooth_expr(rng, D, 0.35);
        gb.set(4, 5, P, wsym);
        gb.set(5, 4, P, wsym);
        gb.set(4, 4, P, random_smooth_expr(rng, D, 0.35));
        gb.set(5, 5, P, random_smooth_expr(rng, D, 0.35));
        Expr g66 = random_smooth_expr(rng, D, 0.35);
        Expr g77 = random_smooth_expr(rng, D, 0.35);
        gb.set(6, 6, P, g66);
        gb.set(7, 7, P, g77);
        gb.set(8, 8, P, -(g66 + g77));
        for (int m : s)
            for (int n : s)
                if (m != n) gb.set(m, n, P, random_smooth_expr(rng, D, 0.35));
        // weak rows over strong columns proportional to the weak entries;
        // same row metric factor on both sides, so the lowered form carries
        // the constants directly
        for (int k = 0; k < 3; ++k) {
            gb.set(4, s[k], P, Expr::constant(cb) * gb.get(4, 5, P));
            gb.set(5, s[k], P, Expr::constant(ca) * gb.get(5, 4, P));
        }
        // strong rows over weak columns unconstrained
        for (int m : s)
            for (int n = 4; n <= 5; ++n) gb.set(m, n, P, random_smooth_expr(rng, D, 0.35));
    }
    std::vector<double> ginv_diag(D, 1.0);
    for (int m = r; m < D; ++m) ginv_diag[m] = 1.0 / ((m - r) < 2 ? gw_low : gs_low);
    sc.conn = gb.connection(ginv_diag);
    std::vector<Expr> rho(static_cast<size_t>(D) * D, Expr::constant(0.0));
    auto rset = [&](int m, int n, const Expr& e) { rho[(m - 1) * static_cast<size_t>(D) + (n - 1)] = e; };
    for (int m = 4; m <= 5; ++m)
        for (int n = 4; n <= 5; ++n) rset(m, n, random_smooth_expr(rng, D, 0.7));
    for (int m : s)
        for (int n : s) rset(m, n, random_smooth_expr(rng, D, 0.7));
    Expr col_a = random_smooth_expr(rng, D, 0.7);  // rho_{s_k, a} equal over k
    Expr col_b = random_smooth_expr(rng, D, 0.7);
    Expr row_a = random_smooth_expr(rng, D, 0.7);  // rho_{a, s_k} equal over k
    Expr row_b = random_smooth_expr(rng, D, 0.7);
    for (int k = 0; k < 3; ++k) {
        rset(s[k], 4, col_a);
        rset(s[k], 5, col_b);
        rset(4, s[k], row_a);
        rset(5, s[k], row_b);
    }
    sc.rho = rho_from(rho, D);
    return sc;
}

}  // namespace affine
