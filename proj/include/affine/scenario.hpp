#ifndef AFFINE_SCENARIO_HPP
#define AFFINE_SCENARIO_HPP

#include "affine/density.hpp"
#include "affine/inversion.hpp"
#include "affine/propositions.hpp"
#include "affine/toml.hpp"

namespace affine {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckRequest {
    std::string id;
    toml::ValuePtr params;  // the check's own table
};

struct EnsembleRequest {
    std::string name;
    EnsembleSpec spec;
    Point start;
    double time = 0.5;
    double step = 0.01;
    double disc_radius = 0.02;
};

// A fully validated scenario: named reference systems, optional sector,
// named charges, a background geometry for evolution checks, sampling and
// tolerance policy, and the ordered list of requested checks.
struct Scenario {
    SpaceSignature sig;
    uint64_t seed = 1;
    int points = 100;
    double box = 1.0;
    double default_tolerance = 1e-6;
    std::map<std::string, double> tolerance_overrides;

    std::map<std::string, ReferenceSystemStack> stacks;
    std::optional<SectorConfig> sector;
    std::map<std::string, TensorField> charges;

    // background used by evolution checks
    std::string background_stack;            // empty = flat background
    std::string background_kind = "holonomic";  // holonomic | gauge | christoffel
    std::string evolution_charge;
    ChargeFunctional functional = ChargeFunctional::component(4, 4);

    std::map<std::string, EnsembleRequest> ensembles;
    std::vector<CheckRequest> checks;
    InversionState inversion;

    double tolerance_for(const std::string& check_id) const {
        auto it = tolerance_overrides.find(check_id);
        if (it != tolerance_overrides.end()) return it->second;
        return default_tolerance;
    }

    const ReferenceSystemStack& stack(const std::string& name) const {
        auto it = stacks.find(name);
        if (it == stacks.end()) throw ScenarioError("unknown reference system '" + name + "'");
        return it->second;
    }

    const TensorField& charge(const std::string& name) const {
        auto it = charges.find(name);
        if (it == charges.end()) throw ScenarioError("unknown charge '" + name + "'");
        return it->second;
    }

    // Background connection/metric honoring the inversion state.
    ConnectionPtr background_connection() const;
    MetricField background_metric() const;
    EvolutionSetup evolution_setup() const;
    std::vector<Point> sample(int count, uint64_t salt = 0) const;
};

Scenario load_scenario(const std::string& path);
Scenario load_scenario_text(const std::string& text);

}  // namespace affine

#endif
