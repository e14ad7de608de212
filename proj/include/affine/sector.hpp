#ifndef AFFINE_SECTOR_HPP
#define AFFINE_SECTOR_HPP

#include <array>
#include <complex>
#include <optional>

#include "affine/curvature.hpp"

namespace affine {

enum class Sector { weak_em, strong, unified };

// 1-based coordinate indices of the sector's named internal axes. The weak
// pair carries the electroweak potentials, the strong triple the color ones.
struct SectorIndices {
    int weak_a = 0, weak_b = 0;
    int strong_1 = 0, strong_2 = 0, strong_3 = 0;

    bool has_weak() const { return weak_a != 0; }
    bool has_strong() const { return strong_1 != 0; }
};

SectorIndices sector_indices(Sector sector, int D);

struct SectorConfig {
    Sector sector = Sector::weak_em;
    SpaceSignature sig;

    // couplings derived from the internal inverse-metric entries
    double coupling_weak = 0.0;
    double coupling_strong = 0.0;

    // Mixing constants for the unified sector, indexed by the strong axis
    // position k (0..2). lepton_c_a[k] scales the coupling of strong axis
    // s_k against the first weak axis, lepton_c_b[k] against the second;
    // quark_c_a/b likewise for the weak rows over strong columns. The mixing
    // conditions require lepton_c_a == lepton_c_b and constant quark rows.
    std::array<double, 3> lepton_c_a{0, 0, 0};
    std::array<double, 3> lepton_c_b{0, 0, 0};
    std::array<double, 3> quark_c_a{0, 0, 0};
    std::array<double, 3> quark_c_b{0, 0, 0};

    // coefficient matrix sending (U1,U2,U3) to (R,S,T); must be nonsingular
    std::array<double, 9> rst{0, 0, 0, 0, 0, 0, 0, 0, 0};

    static SectorConfig make(Sector sector, int D);

    SectorIndices indices() const { return sector_indices(sector, sig.total_dim); }

    // Residual of the sector's inverse-metric equalities at a point, and the
    // couplings derived from those entries.
    double derive_couplings(const MetricField& metric, const Point& p);
};

// Named potential combinations at one point, each indexed by P (length D).
// Weak entries come from the weak pair, strong ones from the triple; absent
// families stay empty.
struct PotentialSlice {
    std::vector<double> Z, A, W1, W2;
    std::vector<double> U1, V1, U2, V2, U3, V3;
    std::vector<double> X23, Y23, X31, Y31, X12, Y12;
    std::vector<double> R, S, T;
};

// Gamma_{MNP} = G_{MH} Gamma^H_{NP}.
std::vector<double> lower_gamma(const std::vector<double>& gamma, const std::vector<double>& G, int D);

// gamma_lowered: Gamma_{MNP} values, row-major [M][N][P], 0-based.
PotentialSlice decompose_potentials(const SectorConfig& cfg, const std::vector<double>& gamma_lowered,
                                    int D);

// Reconstruct the internal Gamma entries a slice determines and report the
// worst deviation from the input (the normalized sum/difference maps are
// orthogonal, so the round trip is exact to rounding).
double decomposition_roundtrip_residual(const SectorConfig& cfg, const std::vector<double>& gamma_lowered,
                                        int D);

// Chiral charge combinations of a rank-2 internal charge at one point.
struct ChargeSlice {
    double lL = 0, lR = 0, nuL = 0, nuR = 0;
    std::array<double, 3> dL{}, dR{}, uL{}, uR{};
    // mixed (primed) combinations for the unified sector
    double lLp = 0, nuLp = 0;
    std::array<double, 3> dLp{}, uLp{};
};

ChargeSlice charge_slice(const SectorConfig& cfg, const std::vector<double>& rho_values, int D);

// Field-strength identities of the electroweak pair, both sides evaluated
// independently: the left from the curvature tensor, the right from potential
// derivatives plus the quadratic coupling terms.
struct FieldStrengthCheck {
    std::array<double, 4> residual{0, 0, 0, 0};  // B, F3, F1, F2 lines
    double max_strength = 0.0;
    double metric_residual = 0.0;
};

FieldStrengthCheck verify_weak_em_field_strengths(SectorConfig cfg, const ConnectionField& conn,
                                                  const MetricField& metric,
                                                  const std::vector<Point>& samples);

// 3x3 color matrix assembly from the slice, checked against the generator
// expansion and the inverse (component extraction) map.
struct GluonAssembly {
    bool applicable = false;      // tracelessness within tolerance
    double trace_residual = 0.0;  // |Gamma_s1s1P + Gamma_s2s2P + Gamma_s3s3P|
    double assembly_residual = 0.0;
    double roundtrip_residual = 0.0;
};

GluonAssembly assemble_gluon_matrix(const SectorConfig& cfg, const std::vector<double>& gamma_lowered,
                                    int D, double trace_tol = 1e-9);

// Frame-backed sector scenario construction: internal block is a product of
// plane rotations at constant scale (optionally with an inner layer undoing
// declared stretches), external block stays the identity. Construction
// validates the sector's metric conditions and rejects violations.
struct SectorFrameSpec {
    double scale = 1.0;
    struct Rotation {
        int axis_a = 0, axis_b = 0;  // 1-based internal axes
        Expr angle;
    };
    std::vector<Rotation> rotations;
    // optional non-commuting layer: outer stretches these internal axes, the
    // inner layer removes them again so the composite metric stays clean
    std::vector<std::pair<int, Expr>> stretches;
};

ReferenceSystemStack build_sector_frame(const SectorConfig& cfg, const SectorFrameSpec& spec,
                                        const std::vector<Point>& validation_samples);

struct SectorConstraintError : std::runtime_error {
    SectorConstraintError(const std::string& condition, const Point& p)
        : std::runtime_error("sector constraint violated: " + condition), point(p) {}
    Point point;
};

}  // namespace affine

#endif
