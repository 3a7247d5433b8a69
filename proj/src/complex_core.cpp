#include "renormlab/complex_core.hpp"

#include <cmath>

#include "precision_kernels.hpp"

namespace renormlab {

using detail::BigFloat;
using detail::cnum;

Orbit iterate(C c, C z0, long long n, double escape_radius) {
    if (n < 0) throw NumericalError("iterate: n must be >= 0");
    if (escape_radius < 2.0) throw NumericalError("iterate: escape radius must be >= 2");
    Orbit orbit;
    orbit.parameter = c;
    orbit.seed = z0;
    orbit.escape_radius = escape_radius;
    orbit.points.reserve(static_cast<std::size_t>(n) + 1);
    C z = z0;
    orbit.points.push_back(z);
    const double r2 = escape_radius * escape_radius;
    if (std::norm(z) > r2) {
        orbit.escaped_at = 0;
        return orbit;
    }
    for (long long k = 0; k < n; ++k) {
        z = z * z + c;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw PrecisionExhausted("iterate: overflow at working precision");
        orbit.points.push_back(z);
        if (std::norm(z) > r2) {
            orbit.escaped_at = orbit.points.size() - 1;
            break;
        }
    }
    return orbit;
}

namespace {

template <class R>
PeriodScan run_scan(C c, long long max_period, double tol) {
    auto res = detail::detect_period_t<R>(detail::from_c<R>(c), max_period, R(tol));
    PeriodScan scan;
    scan.outcome = res.outcome;
    if (res.outcome == PeriodOutcome::Found) {
        PeriodReport rep;
        rep.period = res.period;
        rep.representative = detail::to_c(res.representative);
        rep.multiplier = detail::to_c(res.multiplier);
        rep.tolerance_used = tol;
        scan.report = rep;
    }
    return scan;
}

}  // namespace

PeriodScan detect_period(C c, long long max_period, double tol) {
    if (max_period < 1) throw NumericalError("detect_period: max_period must be >= 1");
    if (!(tol > 0)) throw NumericalError("detect_period: tol must be positive");
    return run_scan<double>(c, max_period, tol);
}

PeriodScan detect_period_bits(C c, long long max_period, double tol, unsigned bits) {
    if (bits <= 53) return detect_period(c, max_period, tol);
    detail::PrecisionScope scope(bits);
    const double scaled = tol * std::pow(2.0, 53.0 - static_cast<double>(bits));
    return run_scan<BigFloat>(c, max_period, scaled <= 0 ? 1e-40 : scaled);
}

C cycle_multiplier(C c, C z, long long p, double snap_tol) {
    if (p < 1) throw NumericalError("cycle_multiplier: p must be >= 1");
    C m = 1.0;
    C y = z;
    bool super = false;
    const double tol2 = snap_tol * snap_tol;
    for (long long k = 0; k < p; ++k) {
        if (std::norm(y) <= tol2) super = true;
        m *= 2.0 * y;
        y = y * y + c;
        if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
            throw PrecisionExhausted("cycle_multiplier: overflow");
    }
    return super ? C(0.0, 0.0) : m;
}

}  // namespace renormlab
