#ifndef AFFINE_REPORT_HPP
#define AFFINE_REPORT_HPP

#include <string>
#include <vector>

namespace affine {

struct CheckReport {
    std::string id;
    enum class Status { pass, fail, skipped, estimated } status = Status::skipped;
    double residual = 0.0;       // max residual for residual-type checks
    double estimate = 0.0;       // Monte-Carlo estimate when applicable
    double stderr_value = 0.0;
    double tolerance = 0.0;
    int samples = 0;
    double wall_ms = 0.0;
    std::string diagnostics;
};

std::string status_name(CheckReport::Status s);

// Serializers. JSON carries a report_version field; timing is optional so
// reports can be compared byte for byte across runs.
std::string report_json(const std::vector<CheckReport>& reports, bool include_timing = true);
std::string report_csv(const std::vector<CheckReport>& reports, bool include_timing = true);
std::string report_text(const std::vector<CheckReport>& reports);

// 0 when nothing failed, 1 otherwise.
int report_exit_code(const std::vector<CheckReport>& reports);

}  // namespace affine

#endif
