#pragma once

// Internal precision-generic kernels shared by complex_core and param_plane.
// Instantiated for double and for MPFR floats at runtime-selected precision.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "renormlab/types.hpp"

namespace renormlab::detail {

namespace mp = boost::multiprecision;
using BigFloat = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(bits * 0.30103) + 3;
}

// RAII: sets the thread-default MPFR precision for the scope.
class PrecisionScope {
  public:
    explicit PrecisionScope(unsigned bits) : old_(BigFloat::default_precision()) {
        BigFloat::default_precision(digits10_for_bits(bits));
    }
    ~PrecisionScope() { BigFloat::default_precision(old_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

  private:
    unsigned old_;
};

template <class R>
struct cnum {
    R re{}, im{};
    cnum() = default;
    cnum(R r, R i) : re(std::move(r)), im(std::move(i)) {}
};

template <class R>
cnum<R> operator+(const cnum<R>& a, const cnum<R>& b) {
    return {a.re + b.re, a.im + b.im};
}
template <class R>
cnum<R> operator-(const cnum<R>& a, const cnum<R>& b) {
    return {a.re - b.re, a.im - b.im};
}
template <class R>
cnum<R> operator*(const cnum<R>& a, const cnum<R>& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class R>
cnum<R> operator/(const cnum<R>& a, const cnum<R>& b) {
    R d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
template <class R>
R norm2(const cnum<R>& a) {
    return a.re * a.re + a.im * a.im;
}
template <class R>
R absval(const cnum<R>& a) {
    using std::sqrt;
    return sqrt(norm2(a));
}

template <class R>
cnum<R> sqr_plus(const cnum<R>& z, const cnum<R>& c) {
    return {z.re * z.re - z.im * z.im + c.re, R(2) * z.re * z.im + c.im};
}

inline double to_dbl(double x) { return x; }
inline double to_dbl(const BigFloat& x) { return x.convert_to<double>(); }

template <class R>
C to_c(const cnum<R>& z) {
    return {to_dbl(z.re), to_dbl(z.im)};
}

template <class R>
cnum<R> from_c(C z) {
    return {R(z.real()), R(z.imag())};
}

template <class R>
bool finite(const cnum<R>& z) {
    using std::isfinite;
    return isfinite(to_dbl(norm2(z))) || norm2(z) < R(1e300);
}

template <class R>
struct PeriodScanT {
    PeriodOutcome outcome = PeriodOutcome::NoCycle;
    long long period = 0;
    cnum<R> representative{};
    cnum<R> multiplier{};
};

// Critical-orbit period scan with burn-in 10*max_period.
template <class R>
PeriodScanT<R> detect_period_t(const cnum<R>& c, long long max_period, const R& tol) {
    PeriodScanT<R> out;
    const R esc2 = [&] {
        R r = R(2) + absval(c);
        return r * r;
    }();
    cnum<R> z{R(0), R(0)};
    const long long burnin = 10 * max_period;
    for (long long k = 0; k < burnin; ++k) {
        z = sqr_plus(z, c);
        if (norm2(z) > esc2) {
            out.outcome = PeriodOutcome::Escaped;
            return out;
        }
    }
    const cnum<R> ref = z;
    cnum<R> w = z;
    const R tol2 = tol * tol;
    for (long long p = 1; p <= max_period; ++p) {
        w = sqr_plus(w, c);
        if (norm2(w) > esc2) {
            out.outcome = PeriodOutcome::Escaped;
            return out;
        }
        if (norm2(w - ref) <= tol2) {
            out.outcome = PeriodOutcome::Found;
            out.period = p;
            out.representative = ref;
            // multiplier along the detected cycle, snapped to 0 on critical hits
            cnum<R> m{R(1), R(0)};
            cnum<R> y = ref;
            bool super = false;
            for (long long k = 0; k < p; ++k) {
                if (norm2(y) <= tol2) super = true;
                m = m * cnum<R>{R(2) * y.re, R(2) * y.im};
                y = sqr_plus(y, c);
            }
            out.multiplier = super ? cnum<R>{R(0), R(0)} : m;
            return out;
        }
    }
    out.outcome = PeriodOutcome::NoCycle;
    return out;
}

// Q_p(c) = f_c^p(0) and dQ_p/dc via Q_{k+1} = Q_k^2 + c, D_{k+1} = 2 Q_k D_k + 1.
// Returns false (without throwing) if the orbit leaves |Q| > overflow_guard.
template <class R>
bool critical_value_derivative_t(const cnum<R>& c, long long p, cnum<R>& q, cnum<R>& d,
                                 double overflow_guard = 1e100) {
    cnum<R> Q{R(0), R(0)};
    cnum<R> D{R(0), R(0)};
    const R guard2 = R(overflow_guard) * R(overflow_guard);
    for (long long k = 0; k < p; ++k) {
        D = cnum<R>{R(2) * Q.re, R(2) * Q.im} * D + cnum<R>{R(1), R(0)};
        Q = sqr_plus(Q, c);
        if (norm2(Q) > guard2) return false;
    }
    q = Q;
    d = D;
    return true;
}

template <class R>
struct NewtonOutcome {
    bool converged = false;
    cnum<R> root{};
    R residual{};
    R derivative_abs{};
    int steps = 0;
};

// Damped Newton on Q_p(c) = 0. A step is rejected (and halved) while the orbit
// overflows or the residual grows by more than 4x.
template <class R>
NewtonOutcome<R> newton_center_t(cnum<R> c, long long p, const R& tol_residual, int max_steps) {
    NewtonOutcome<R> out;
    cnum<R> q, d;
    if (!critical_value_derivative_t(c, p, q, d)) {
        // hopeless start; caller reseeds
        out.converged = false;
        return out;
    }
    R best = absval(q);
    for (int step = 0; step < max_steps; ++step) {
        out.steps = step;
        if (best <= tol_residual) break;
        if (norm2(d) == R(0)) break;
        cnum<R> dc = q / d;
        // trust region: cap the step length at 0.5
        R len = absval(dc);
        if (len > R(0.5)) {
            R s = R(0.5) / len;
            dc = cnum<R>{dc.re * s, dc.im * s};
        }
        bool accepted = false;
        for (int halving = 0; halving < 48; ++halving) {
            cnum<R> cand = c - dc;
            cnum<R> q2, d2;
            if (critical_value_derivative_t(cand, p, q2, d2)) {
                R r2 = absval(q2);
                if (r2 <= best * R(4) || r2 <= tol_residual) {
                    c = cand;
                    q = q2;
                    d = d2;
                    best = r2;
                    accepted = true;
                    break;
                }
            }
            dc = cnum<R>{dc.re / R(2), dc.im / R(2)};
        }
        if (!accepted) break;
    }
    out.root = c;
    out.residual = best;
    out.derivative_abs = absval(d);
    out.converged = to_dbl(best) <= to_dbl(tol_residual);
    return out;
}

}  // namespace renormlab::detail
