#ifndef AFFINE_INVERSION_HPP
#define AFFINE_INVERSION_HPP

#include "affine/connection.hpp"

namespace affine {

// Discrete inversions act two ways: per-coordinate sign flips (a linear
// coordinate change), and metric-orientation flips, which touch no
// coordinates but reverse the sense of displacements consumed by evolution.
struct InversionSpec {
    std::vector<double> coordinate_flips;  // +1/-1 per coordinate
    bool time_coordinate_flip = false;     // evolution parameter reversal
    bool flip_external_metric = false;
    bool flip_internal_metric = false;

    static InversionSpec parity(const SpaceSignature& sig);            // x^i -> -x^i
    static InversionSpec charge(const SpaceSignature& sig);            // x^m -> -x^m
    static InversionSpec time0(int dim);                               // x^0 -> -x^0
    static InversionSpec metric_inversion(int dim);                    // every dx -> -dx
    static InversionSpec cpt0(int dim);                                // full coordinate inversion
    static InversionSpec cpt(int dim);                                 // cpt0 followed by metric inversion
};

struct InversionState {
    std::vector<double> signs;  // accumulated coordinate signs
    bool time_reversed = false;
    double external_metric_sign = 1.0;
    double internal_metric_sign = 1.0;

    static InversionState identity(int dim) {
        InversionState s;
        s.signs.assign(dim, 1.0);
        return s;
    }

    void apply(const InversionSpec& spec);
    bool is_identity() const;

    double parameter_factor() const { return time_reversed ? -1.0 : 1.0; }
    double block_sign(int index_0based, const SpaceSignature& sig) const {
        return index_0based < sig.external_dim ? external_metric_sign : internal_metric_sign;
    }

    bool operator==(const InversionState& o) const {
        return signs == o.signs && time_reversed == o.time_reversed &&
               external_metric_sign == o.external_metric_sign &&
               internal_metric_sign == o.internal_metric_sign;
    }
};

// x^i -> s_i x^i substitution inside an expression tree. Signs of +1 leave
// the node untouched (shared), so the identity state is the identity map.
Expr substitute_signs(const Expr& e, const std::vector<double>& signs);

// Component transform of a tensor under the sign flip coordinate change:
// every index slot (upper or lower) contributes its coordinate's sign.
TensorField transform_tensor(const TensorField& t, const InversionState& state);
FrameField transform_frame(const FrameField& f, const InversionState& state);
ReferenceSystemStack transform_stack(const ReferenceSystemStack& s, const InversionState& state);

// Accumulated covariant differential of a rank-2 charge along a polyline,
// with fields, connection, points and displacement senses all taken through
// the inversion state. Returns the D*D component integrals.
std::vector<double> covariant_differential_along_path(const TensorField& rho,
                                                      const ReferenceSystemStack& stack,
                                                      const SpaceSignature& sig,
                                                      const std::vector<Point>& path,
                                                      const InversionState& state);

}  // namespace affine

#endif
