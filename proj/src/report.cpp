#include "affine/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace affine {

std::string status_name(CheckReport::Status s) {
    switch (s) {
        case CheckReport::Status::pass: return "pass";
        case CheckReport::Status::fail: return "fail";
        case CheckReport::Status::skipped: return "skipped";
        case CheckReport::Status::estimated: return "estimated";
    }
    return "?";
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') { out += '\\'; out += c; }
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    return out;
}

std::vector<CheckReport> sorted(std::vector<CheckReport> reports) {
    std::stable_sort(reports.begin(), reports.end(),
                     [](const CheckReport& a, const CheckReport& b) { return a.id < b.id; });
    return reports;
}

}  // namespace

std::string report_json(const std::vector<CheckReport>& reports_in, bool include_timing) {
    auto reports = sorted(reports_in);
    std::ostringstream os;
    os << "{\n  \"report_version\": 1,\n  \"checks\": [\n";
    for (size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        os << "    {\"id\": \"" << json_escape(r.id) << "\", \"status\": \"" << status_name(r.status)
           << "\", \"residual\": " << fmt(r.residual) << ", \"estimate\": " << fmt(r.estimate)
           << ", \"stderr\": " << fmt(r.stderr_value) << ", \"tolerance\": " << fmt(r.tolerance)
           << ", \"samples\": " << r.samples;
        if (include_timing) os << ", \"wall_ms\": " << fmt(r.wall_ms);
        os << ", \"diagnostics\": \"" << json_escape(r.diagnostics) << "\"}";
        os << (i + 1 < reports.size() ? ",\n" : "\n");
    }
    os << "  ]\n}\n";
    return os.str();
}

std::string report_csv(const std::vector<CheckReport>& reports_in, bool include_timing) {
    auto reports = sorted(reports_in);
    std::ostringstream os;
    os << "id,status,residual,estimate,stderr,tolerance,samples";
    if (include_timing) os << ",wall_ms";
    os << ",diagnostics\n";
    for (const auto& r : reports) {
        std::string diag = r.diagnostics;
        std::replace(diag.begin(), diag.end(), ',', ';');
        std::replace(diag.begin(), diag.end(), '\n', ' ');
        os << r.id << "," << status_name(r.status) << "," << fmt(r.residual) << "," << fmt(r.estimate)
           << "," << fmt(r.stderr_value) << "," << fmt(r.tolerance) << "," << r.samples;
        if (include_timing) os << "," << fmt(r.wall_ms);
        os << "," << diag << "\n";
    }
    return os.str();
}

std::string report_text(const std::vector<CheckReport>& reports_in) {
    auto reports = sorted(reports_in);
    std::ostringstream os;
    for (const auto& r : reports) {
        std::string tag = status_name(r.status);
        for (auto& c : tag) c = static_cast<char>(std::toupper(c));
        os << "[" << tag << "] " << r.id;
        if (r.status == CheckReport::Status::estimated)
            os << "  estimate=" << r.estimate << " +- " << r.stderr_value;
        else
            os << "  residual=" << r.residual << " (tol " << r.tolerance << ")";
        os << "  n=" << r.samples;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", r.wall_ms);
        os << "  " << buf << " ms";
        if (!r.diagnostics.empty()) os << "  -- " << r.diagnostics;
        os << "\n";
    }
    return os.str();
}

int report_exit_code(const std::vector<CheckReport>& reports) {
    for (const auto& r : reports)
        if (r.status == CheckReport::Status::fail) return 1;
    return 0;
}

}  // namespace affine
