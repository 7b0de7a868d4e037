#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mel {

// Tolerance for IC residuals and equality classification. Residuals inside the
// band are "knife-edge": named in reports, never silently classified.
constexpr double kIcTol = 1e-9;

// Bisection stops at |f| <= kRootTol or after kRootMaxIter iterations.
constexpr double kRootTol = 1e-12;
constexpr int kRootMaxIter = 200;

// Pre-scan grid size for sign changes before bisection.
constexpr int kScanGrid = 10000;

inline double ic_tol(double scale) {
    double s = std::fabs(scale);
    return s > 1.0 ? kIcTol * s : kIcTol;
}

// Residual sits inside the knife-edge band around zero.
inline bool knife_edge_band(double residual, double scale = 1.0) {
    return std::fabs(residual) <= ic_tol(scale);
}

inline bool is_finite(double x) { return std::isfinite(x); }

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when enumerate_equilibria's structural assertions fail; signals a
// solver bug, not bad input.
struct InternalConsistencyError : std::logic_error {
    explicit InternalConsistencyError(const std::string& what) : std::logic_error(what) {}
};

struct UnsupportedCostError : SolverError {
    explicit UnsupportedCostError(const std::string& what) : SolverError(what) {}
};

}  // namespace mel
