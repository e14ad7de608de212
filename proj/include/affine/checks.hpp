#ifndef AFFINE_CHECKS_HPP
#define AFFINE_CHECKS_HPP

#include <functional>

#include "affine/report.hpp"
#include "affine/scenario.hpp"

namespace affine {

using CheckFn = std::function<CheckReport(const Scenario&, const toml::Value&)>;

struct CheckInfo {
    CheckFn run;
    double default_tolerance;
    const char* summary;
};

const std::map<std::string, CheckInfo>& check_registry();

// Simple '*' wildcard match used by the --filter option.
bool glob_match(const std::string& pattern, const std::string& text);

// Executes the scenario's requested checks (optionally filtered), catching
// per-check errors as failed entries. Reports keep the request order; the
// serializers sort by id.
std::vector<CheckReport> run_checks(const Scenario& sc, const std::string& filter = "",
                                    bool parallel = false);

}  // namespace affine

#endif
