#ifndef AFFINE_EVOLUTION_HPP
#define AFFINE_EVOLUTION_HPP

#include <functional>

#include "affine/curvature.hpp"

namespace affine {

// Scalar driver for a rank-2 charge: either one declared component or the
// sum over all components.
struct ChargeFunctional {
    enum class Kind { component, sum } kind = Kind::component;
    int m = 0, n = 0;  // 1-based component when kind == component

    static ChargeFunctional component(int m_1based, int n_1based) {
        return {Kind::component, m_1based, n_1based};
    }
    static ChargeFunctional sum() { return {Kind::sum, 0, 0}; }

    double combine(const std::vector<double>& comps, int D) const {
        if (kind == Kind::component) return comps[(m - 1) * static_cast<size_t>(D) + (n - 1)];
        double s = 0.0;
        for (double v : comps) s += v;
        return s;
    }
};

// A charge evolving on a background geometry. The covariant derivative uses
// the background's holonomic connection; index raising uses its metric.
struct EvolutionSetup {
    ConnectionPtr conn;
    MetricField metric;
    TensorField rho;
    ChargeFunctional functional = ChargeFunctional::component(4, 4);

    int dim() const { return conn->dim(); }

    // p_Q = rho_{;Q} combined through the functional.
    std::vector<double> momentum_lower(const Point& p) const;
    // gradient components v^Q = G^{QP} p_P
    std::vector<double> gradient(const Point& p) const;
    std::vector<double> partials(const Point& p) const;  // plain d_Q of the functional
    double charge_value(const Point& p) const;
};

struct GradientLineSample {
    double x0 = 0.0;
    Point point;
    std::vector<double> tangent;  // unit field direction at the sample
    double energy = 0.0;          // E_0 there
};

struct GradientLine {
    std::vector<GradientLineSample> samples;
    double step = 0.0;
    double accumulated_action = 0.0;  // trapezoid of E_0 dx^0
    bool truncated = false;
    std::string diagnostic;

    const Point& endpoint() const { return samples.back().point; }
    double length() const { return samples.empty() ? 0.0 : samples.back().x0 - samples.front().x0; }
};

// Classical fourth-order integration of the unit-normalized gradient field,
// so the curve parameter is the total displacement. Tangents store the field
// direction at each sample. A vanishing field truncates with a diagnostic.
GradientLine integrate_gradient_line(const EvolutionSetup& setup, const Point& start, double step,
                                     int n_steps);

// Same integrator for an arbitrary direction field (unit-normalized).
GradientLine integrate_flow(const std::function<std::vector<double>(const Point&)>& field,
                            const Point& start, double step, int n_steps);

struct EnergyMomentum {
    double E0 = 0.0, E_up0 = 0.0, H0 = 0.0, H_up0 = 0.0;
    std::vector<double> p_low, p_up, P_low, P_up;
    EvolutionDirection direction;
};

EnergyMomentum energy_momentum(const EvolutionSetup& setup, const Point& p,
                               const std::vector<double>& direction);

// |E_0 E^0 - p_Q p^Q| at a point for the given direction.
double energy_momentum_residual(const EvolutionSetup& setup, const Point& p,
                                const std::vector<double>& direction);

// max over samples of |p^Q - E^0 dx^Q/dx^0| with tangents read from the line.
double momentum_velocity_residual(const EvolutionSetup& setup, const GradientLine& line);

// ---------------------------------------------------------------------------
// Dirac algebra
// ---------------------------------------------------------------------------

struct GammaSet {
    int dim = 0;
    std::vector<CMatrix> gamma;  // gamma^M, size 2^ceil(D/2)

    double anticommutator_residual(const std::vector<double>& Ginv) const;
};

// Euclidean Clifford generators mapped through a frame square root of the
// inverse metric: gamma^M = E^M_A gamma^A with E E^T = G^{-1}. When a frame
// inverse C is supplied it is used directly; otherwise the symmetric root.
GammaSet build_gamma_set(const std::vector<double>& G, int D,
                         const std::vector<double>* frame_inverse = nullptr);

struct DiracResidual {
    double squared_identity = 0.0;  // max |(gamma^P p_P)^2 - (rho_{;0})^2 I|
    double sign_branch = 0.0;       // min over signs of ||gamma^P p_P -+ rho_{;0} I||
    bool skipped = false;
    std::string diagnostic;
};

// Along a line on an orthogonal background; rho_{;0} = eps^P_0 rho_{;P}.
DiracResidual dirac_residual(const EvolutionSetup& setup, const GradientLine& line);

struct ActionReport {
    double action = 0.0;          // integral of p_Q dx^Q
    double gamma_action = 0.0;    // orthogonal form, scalar branch
    bool gamma_available = false;
    double ratio = 0.0;           // gamma_action / action
};

// Elementary action along a sampled path; with gammas on an orthogonal
// background also the first-order form whose value doubles the elementary
// action along gradient lines.
ActionReport affine_action(const EvolutionSetup& setup, const std::vector<Point>& path,
                           bool with_gamma = false);
ActionReport affine_action(const EvolutionSetup& setup, const GradientLine& line,
                           bool with_gamma = false);

// ---------------------------------------------------------------------------
// Force and dual-picture checks
// ---------------------------------------------------------------------------

struct LorentzForceReport {
    double residual = 0.0;          // both-sides difference, first-derivative form
    double torsion_gap = 0.0;       // size of the antisymmetric-connection term
    std::vector<double> force;      // f_P = p_{P;0}
};

// f_P = p_{P;0} against E_{0;P} - p_Q eps^Q_{0;P} + [rho R_{PQ}] eps^Q_0 with
// every term evaluated independently; the curvature term uses the
// background's curvature. For connections with an antisymmetric part the
// difference of the two routes is the reported torsion gap.
LorentzForceReport lorentz_force(const EvolutionSetup& setup, const Point& p);

struct DualPictureResidual {
    double bracket = 0.0;   // flow derivative of X against the bracket
    double transport = 0.0; // directional derivative of f against its path rate
};

// Unit gradient field H: bracket [X,H] against the dragged derivative of X
// along the flow, and H f against the rate of f along the line.
DualPictureResidual heisenberg_schrodinger_check(const EvolutionSetup& setup, const TensorField& X,
                                                 const TensorField& f, const GradientLine& line,
                                                 int stride = 4);

}  // namespace affine

#endif
