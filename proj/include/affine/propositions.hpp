#ifndef AFFINE_PROPOSITIONS_HPP
#define AFFINE_PROPOSITIONS_HPP

#include "affine/sector.hpp"

namespace affine {

// Charge and potential labels used by the evolution-line tables.
enum class ChargeId {
    lL, lR, nuL, nuR,
    d1L, d2L, d3L, d1R, d2R, d3R,
    u1L, u2L, u3L, u1R, u2R, u3R,
    lLp, nuLp, d1Lp, d2Lp, d3Lp, u1Lp, u2Lp, u3Lp,
};

enum class PotentialId { Z, A, W1, W2, U1, V1, U2, V2, U3, V3, X23, Y23, X31, Y31, X12, Y12 };

enum class CouplingKind { weak, strong };

struct EvolutionTerm {
    double coeff;  // multiplies the coupling constant
    CouplingKind coupling;
    ChargeId charge;
    PotentialId potential;
};

struct EvolutionLine {
    ChargeId lhs;
    std::vector<EvolutionTerm> terms;  // right side beyond the plain partial
    std::string name;
};

// Assembled right-hand-side structure of the evolution identities.
std::vector<EvolutionLine> lepton_evolution_lines(bool mixed_primed);
std::vector<EvolutionLine> quark_evolution_lines();

double charge_value(const ChargeSlice& s, ChargeId id);
double potential_value(const PotentialSlice& s, PotentialId id, int P);
bool line_couples_potential(const EvolutionLine& line, PotentialId id);

struct LineResidualReport {
    std::vector<std::string> names;
    std::vector<double> residuals;
    bool skipped = false;
    std::string diagnostic;

    double max_residual() const {
        double m = 0.0;
        for (double r : residuals) m = std::max(m, r);
        return m;
    }
};

// Both-sides evaluation of the evolution identities: the left side through
// the full covariant derivative of the chiral combination, the right side
// from the line tables. Preconditions (symmetry, tracelessness,
// proportionality, charge equalities) are checked and violations skip the
// report with a diagnostic.
LineResidualReport lepton_evolution_residual(const SectorConfig& cfg, const ConnectionField& conn,
                                             const MetricField& metric, const TensorField& rho,
                                             const std::vector<Point>& samples);
LineResidualReport pmns_mixing_residual(const SectorConfig& cfg, const ConnectionField& conn,
                                        const MetricField& metric, const TensorField& rho,
                                        const std::vector<Point>& samples);
LineResidualReport ckm_mixing_residual(const SectorConfig& cfg, const ConnectionField& conn,
                                       const MetricField& metric, const TensorField& rho,
                                       const std::vector<Point>& samples);

// Residuals of the unified-sector condition blocks (1)-(6); purely a report.
struct UnifiedConditionReport {
    std::array<double, 6> residual{0, 0, 0, 0, 0, 0};
    std::array<bool, 6> vacuous{false, false, false, false, false, false};
    std::array<bool, 6> checked{false, false, false, false, false, false};
};

UnifiedConditionReport check_unified_conditions(const SectorConfig& cfg, const ConnectionField& conn,
                                                const MetricField& metric, const TensorField& rho,
                                                const std::vector<Point>& samples,
                                                const std::array<bool, 6>& toggles);

// Lepton/hadron classification from the strong-page components. Values are
// taken as exact; an optional tolerance supports field-sampled use.
struct FieldClassification {
    bool lepton = false;
    bool hadron = false;
    bool individual_quark_candidate = false;
    std::string candidate;           // one of d1,d2,d3,u1,u2,u3 when a candidate
    bool confinement_excluded = false;  // a claimed down-type loner is contradictory
    std::array<bool, 6> quark_nonzero{};  // d1,d2,d3,u1,u2,u3
};

// rho_strong / gamma_strong: the nine strong-page magnitudes ordered
// (s1s1, s1s2, s1s3, s2s1, s2s2, s2s3, s3s1, s3s2, s3s3).
FieldClassification classify_field(const std::array<double, 9>& rho_strong,
                                   const std::array<double, 9>& gamma_strong, double tol = 0.0,
                                   const std::string& claimed_nonzero = "");

// ---------------------------------------------------------------------------
// Constructive conforming scenarios (synthetic connections and charges built
// from seeded smooth expressions with the condition blocks imposed exactly).
// ---------------------------------------------------------------------------

struct SectorScenario {
    SectorConfig cfg;
    ConnectionPtr conn;   // synthetic coefficients with raised first index
    MetricField metric;   // constant diagonal internal metric
    TensorField rho;      // rank-2 lower charge field, internal block
};

SectorScenario make_conforming_lepton_scenario(uint64_t seed);  // D=5, symmetric weak block
SectorScenario make_conforming_pmns_scenario(uint64_t seed);    // D=8, condition blocks 1-4
SectorScenario make_conforming_ckm_scenario(uint64_t seed);     // D=8, condition blocks 1,2,5,6
SectorScenario make_conforming_strong_scenario(uint64_t seed);  // D=6, traceless strong block

// Random bounded smooth scalar expression (sums of sines/cosines and linear
// terms), used to populate scenario degrees of freedom.
Expr random_smooth_expr(Rng& rng, int dim, double amplitude);

// Optional reporting combinations for three charge generations built from
// mixed weak/strong components. Reported only, never asserted: the ansatz
// constants are free configuration.
struct GenerationConstants {
    double a_mu = 0.25, b_mu = 0.25, a_tau = 0.125, b_tau = 0.125;
    std::array<double, 3> amu_a{0.25, 0.125, 0.0625}, amu_b{0.25, 0.125, 0.0625};
    std::array<double, 3> bmu_a{0.125, 0.25, 0.0625}, bmu_b{0.125, 0.25, 0.0625};
    std::array<double, 3> atau_a{0.0625, 0.125, 0.25}, atau_b{0.0625, 0.125, 0.25};
    std::array<double, 3> btau_a{0.25, 0.0625, 0.125}, btau_b{0.25, 0.0625, 0.125};
};

struct GenerationCombos {
    std::array<double, 2> e{}, nu_e{}, mu{}, nu_mu{}, tau{}, nu_tau{};
};

GenerationCombos generation_report(const SectorConfig& cfg, const std::vector<double>& rho_values,
                                   int D, const GenerationConstants& k = {});

}  // namespace affine

#endif
