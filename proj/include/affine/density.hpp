#ifndef AFFINE_DENSITY_HPP
#define AFFINE_DENSITY_HPP

#include <complex>

#include "affine/evolution.hpp"

namespace affine {

// One family member: a constant transformation near the center. Members are
// drawn as center * exp(radius * A) with A a random matrix, traceless when
// the determinant constraint is on (so every member keeps the center's
// determinant).
struct EnsembleSpec {
    std::vector<double> center;  // D*D row-major; empty = identity
    double radius = 0.1;
    int count = 128;
    uint64_t seed = 1;
    bool det_constraint = true;
    int bootstrap = 200;

    void validate() const {
        if (count < 2) throw std::invalid_argument("ensemble needs at least two members");
        if (radius <= 0) throw std::invalid_argument("ensemble radius must be positive");
    }
};

std::vector<std::vector<double>> sample_transformations(const EnsembleSpec& spec, int D);

// Spread of a point cloud along its leading D-1 principal axes (endpoint
// sets of equal-length lines are codimension-one, so the smallest axis
// carries no volume information).
double cloud_volume_proxy(const std::vector<Point>& cloud, int D);

struct DensityEstimate {
    double value = 0.0;
    double stderr_value = 0.0;
    int members = 0;
    bool degenerate = false;
    Point center_endpoint;
};

// Position-representation density: endpoint spread of the flattened family
// over the curved family, both started at `a` and flowed for parameter t.
DensityEstimate estimate_density_position(const EvolutionSetup& curved, const Point& a, double t,
                                          double step, const EnsembleSpec& spec);

// Momentum-representation density: spread of a normal-section disc at the
// start over its image after flowing for parameter t along the fixed field.
DensityEstimate estimate_density_momentum(const EvolutionSetup& curved, const Point& a, double t,
                                          double step, const EnsembleSpec& spec, double disc_radius);

struct PropagatorMember {
    int id = 0;
    Point endpoint;
    double action = 0.0;
    double weight = 0.0;  // sqrt of the member's density estimate
    bool accepted = false;
};

struct PropagatorResult {
    std::complex<double> value{0.0, 0.0};
    int accepted = 0;
    int total = 0;
    bool defined = false;
    std::vector<PropagatorMember> members;
};

// Discrete stand-in for the line-family sum: accepted members land within
// accept_radius of b after flowing for the declared window. Each accepted
// member contributes sqrt(W) e^{i s} with s its accumulated action; the sum
// is normalized by the accepted count.
PropagatorResult propagator_sum(const EvolutionSetup& curved, const Point& a, const Point& b,
                                double x0_window, double step, double accept_radius,
                                const EnsembleSpec& spec, int density_subcount = 48);

// Transformed charge under a constant frame transformation (lower indices
// contract with the matrix on both slots).
TensorField transform_charge(const TensorField& rho, const std::vector<double>& T, int D);

}  // namespace affine

#endif
