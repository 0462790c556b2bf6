#pragma once

#include <string>
#include <vector>

#include "shapegrad/config.hpp"

namespace shapegrad {

struct VerifyCheck {
    std::string name;
    bool pass = false;
    double measured = 0.0;  // worst observed value
    double tolerance = 0.0; // bound it is compared against
    std::string detail;
};

struct VerifyOptions {
    unsigned long seed = 0;
    int resolution = kPaperResolution; // FD and disk-oracle mesh scale
    int metric_resolution = 48;        // metric-algebra mesh scale
    bool corrupt_quadrature = false;   // negative control for the FD check
};

/// Runs the property suites: shape-derivative/finite-difference consistency,
/// analytic disk oracles, metric algebra for SP and H^1..H^4, mesh-quality
/// unit values, and the geodesic integrator checks.
std::vector<VerifyCheck> run_verification(const VerifyOptions& options);

/// One line per check: "PASS name measured=... tol=... detail".
std::string format_checks(const std::vector<VerifyCheck>& checks);

} // namespace shapegrad
