#include <cmath>
#include <cstdio>
#include <sstream>

#include "draf/oracle.hpp"

namespace draf::oracle {

void finalize(OracleReport& report) {
  report.passed = !std::isnan(report.max_abs_err) && report.max_abs_err <= report.tolerance;
}

std::string to_text(const OracleReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-14s %s  max_err=%.3e  tol=%.1e  instances=%zu  skipped=%zu",
                report.name.c_str(), report.passed ? "PASS" : "FAIL", report.max_abs_err,
                report.tolerance, report.instances, report.skipped);
  std::string out = buf;
  if (!report.detail.empty()) out += "\n  " + report.detail;
  return out;
}

std::string reports_csv(std::span<const OracleReport> reports) {
  std::ostringstream out;
  out << kReportHeader << '\n';
  for (const auto& r : reports) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", r.max_abs_err, r.tolerance);
    out << r.name << ',' << buf << r.instances << ',' << r.skipped << ','
        << (r.passed ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace draf::oracle
