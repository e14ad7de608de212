#ifndef AFFINE_SPACE_HPP
#define AFFINE_SPACE_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace affine {

// Dimension bookkeeping: D total coordinates, the first r are external and
// the remaining D-r internal. Indices are 1-based at the API boundary to
// match the x1..xD naming used by expressions; storage is 0-based.
struct SpaceSignature {
    int total_dim = 0;
    int external_dim = 3;

    SpaceSignature() = default;
    SpaceSignature(int D, int r = 3) : total_dim(D), external_dim(r) {
        if (D < 1) throw std::invalid_argument("total dimension must be >= 1");
        if (r < 0 || r > D) throw std::invalid_argument("external dimension must satisfy 0 <= r <= D");
    }

    int internal_dim() const { return total_dim - external_dim; }
    bool is_external(int index_1_based) const { return index_1_based >= 1 && index_1_based <= external_dim; }
    bool is_internal(int index_1_based) const { return index_1_based > external_dim && index_1_based <= total_dim; }
    int first_internal() const { return external_dim + 1; }  // 1-based
};

struct Point {
    std::vector<double> coords;

    Point() = default;
    explicit Point(std::vector<double> c) : coords(std::move(c)) {}
    Point(std::initializer_list<double> c) : coords(c) {}

    int dim() const { return static_cast<int>(coords.size()); }
    double operator[](int i) const { return coords[i]; }
    double& operator[](int i) { return coords[i]; }

    void require_dim(int D) const {
        if (dim() != D)
            throw std::invalid_argument("point has dimension " + std::to_string(dim()) +
                                        ", expected " + std::to_string(D));
        for (double c : coords)
            if (!std::isfinite(c)) throw std::invalid_argument("point has a non-finite coordinate");
    }
};

}  // namespace affine

#endif
