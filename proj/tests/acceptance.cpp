// Acceptance suite: every verification target runs at its pinned tolerance
// and prints one pass/fail line. The exit code is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "affine/checks.hpp"
#include "affine/density.hpp"

using namespace affine;

namespace {

struct Criterion {
    int number;
    std::string name;
    std::function<bool(std::string&)> run;
};

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

Scenario load(const char* rel) { return load_scenario(std::string(AFFINE_SOURCE_DIR "/scenarios/") + rel); }

CheckReport run_single(const Scenario& sc, const std::string& id) {
    auto reports = run_checks(sc, id, false);
    for (auto& r : reports)
        if (r.id == id) return r;
    CheckReport missing;
    missing.id = id;
    missing.status = CheckReport::Status::fail;
    missing.diagnostics = "check not present in scenario";
    return missing;
}

bool check_passed(const CheckReport& r) {
    return r.status == CheckReport::Status::pass || r.status == CheckReport::Status::estimated;
}

std::string describe(const CheckReport& r, double seconds) {
    char buf[256];
    if (r.status == CheckReport::Status::estimated)
        std::snprintf(buf, sizeof(buf), "estimate %.6g +- %.2g, %.1fs", r.estimate, r.stderr_value,
                      seconds);
    else
        std::snprintf(buf, sizeof(buf), "residual %.3g (tol %.1g), %.1fs", r.residual, r.tolerance,
                      seconds);
    std::string out = buf;
    if (!r.diagnostics.empty()) out += " -- " + r.diagnostics;
    return out;
}

bool timed_check(const char* scenario_file, const char* check_id, double budget_s, std::string& msg) {
    Scenario sc = load(scenario_file);
    double t0 = now_s();
    CheckReport r = run_single(sc, check_id);
    double dt = now_s() - t0;
    msg = describe(r, dt);
    bool ok = check_passed(r);
    if (budget_s > 0 && dt > budget_s) {
        msg += " (exceeded " + std::to_string(static_cast<int>(budget_s)) + "s budget)";
        ok = false;
    }
    return ok;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria;

    criteria.push_back({1, "transformation laws", [](std::string& msg) {
                            return timed_check("weak_em_rotation.toml", "transformation-laws", 30.0, msg);
                        }});
    criteria.push_back({2, "pure-gauge flatness", [](std::string& msg) {
                            return timed_check("weak_em_rotation.toml", "pure-gauge-flatness", 10.0, msg);
                        }});
    criteria.push_back({3, "field-strength identities", [](std::string& msg) {
                            return timed_check("weak_em_rotation.toml", "field-strengths", 20.0, msg);
                        }});
    criteria.push_back({4, "lepton evolution lines", [](std::string& msg) {
                            return timed_check("weak_em_rotation.toml", "lepton-evolution", 0.0, msg);
                        }});
    criteria.push_back({5, "mixing identities", [](std::string& msg) {
                            Scenario sc = load("unified_d8.toml");
                            double t0 = now_s();
                            CheckReport pm = run_single(sc, "pmns-mixing");
                            CheckReport ck = run_single(sc, "ckm-mixing");
                            double dt = now_s() - t0;
                            char buf[160];
                            std::snprintf(buf, sizeof(buf),
                                          "lepton residual %.3g, quark residual %.3g (tol 1e-06), %.1fs",
                                          pm.residual, ck.residual, dt);
                            msg = buf;
                            bool ok = check_passed(pm) && check_passed(ck);
                            if (dt > 60.0) {
                                msg += " (exceeded 60s budget)";
                                ok = false;
                            }
                            return ok;
                        }});
    criteria.push_back({6, "color matrix assembly", [](std::string& msg) {
                            return timed_check("unified_d8.toml", "gluon-assembly", 0.0, msg);
                        }});
    criteria.push_back({7, "energy-momentum equation", [](std::string& msg) {
                            return timed_check("curved_d5.toml", "energy-momentum", 0.0, msg);
                        }});
    criteria.push_back({8, "momentum-velocity relation", [](std::string& msg) {
                            return timed_check("curved_d5.toml", "momentum-velocity", 0.0, msg);
                        }});
    criteria.push_back({9, "generator algebra", [](std::string& msg) {
                            return timed_check("curved_d5.toml", "gamma-algebra", 0.0, msg);
                        }});
    criteria.push_back({10, "action doubling", [](std::string& msg) {
                            return timed_check("curved_d5.toml", "action-ratio", 0.0, msg);
                        }});
    criteria.push_back({11, "density composability", [](std::string& msg) {
                            return timed_check("density_d5.toml", "density-composability", 120.0, msg);
                        }});
    criteria.push_back({12, "full inversion invariance", [](std::string& msg) {
                            return timed_check("curved_d5.toml", "cpt", 0.0, msg);
                        }});
    criteria.push_back({13, "down-type exclusion", [](std::string& msg) {
                            return timed_check("unified_d8.toml", "confinement-exclusion", 0.0, msg);
                        }});

    int failures = 0;
    for (auto& c : criteria) {
        std::string msg;
        bool ok = false;
        try {
            ok = c.run(msg);
        } catch (const std::exception& e) {
            msg = std::string("exception: ") + e.what();
        }
        std::printf("criterion %02d [%s] %s: %s\n", c.number, ok ? "PASS" : "FAIL", c.name.c_str(),
                    msg.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
