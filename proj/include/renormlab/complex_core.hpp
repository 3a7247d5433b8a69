#pragma once

#include "renormlab/types.hpp"

namespace renormlab {

// Orbit of f_c(z) = z^2 + c. points[k+1] = points[k]^2 + parameter for every
// stored k; iteration stops at the first point whose modulus exceeds
// escape_radius (that point is stored and indexed by escaped_at).
struct Orbit {
    C parameter{};
    C seed{};
    std::vector<C> points;
    std::optional<std::size_t> escaped_at;
    double escape_radius = 0.0;
};

struct PeriodReport {
    long long period = 0;
    C representative{};
    C multiplier{};
    double tolerance_used = 0.0;
};

enum class PeriodOutcome {
    Found,    // minimal tol-returning period located
    NoCycle,  // orbit bounded but no return within max_period
    Escaped,  // critical orbit escaped (reported distinctly from NoCycle)
};

struct PeriodScan {
    PeriodOutcome outcome = PeriodOutcome::NoCycle;
    std::optional<PeriodReport> report;
};

inline double analytic_escape_radius(C c) { return 2.0 + std::abs(c); }

Orbit iterate(C c, C z0, long long n, double escape_radius);

// Scans the critical orbit after a burn-in of 10*max_period iterations for the
// minimal p <= max_period with |z_{B+p} - z_B| <= tol.
PeriodScan detect_period(C c, long long max_period, double tol = 1e-10);

// prod_{k=0}^{p-1} 2 f_c^k(z); snaps to exact 0 when the cycle passes through
// the critical point within tolerance.
C cycle_multiplier(C c, C z, long long p, double snap_tol = 1e-10);

// Same scan carried out at `bits` of working precision (>= 53). The tolerance
// is scaled by 2^(53 - bits).
PeriodScan detect_period_bits(C c, long long max_period, double tol, unsigned bits);

// Default working precision and the escalation step used by deep cascades.
inline constexpr unsigned kBasePrecisionBits = 53;
inline constexpr unsigned kPrecisionStepBits = 64;
inline constexpr unsigned kMaxPrecisionBits = 53 + 4 * 64;

}  // namespace renormlab
