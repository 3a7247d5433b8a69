#include "renormlab/param_plane.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "precision_kernels.hpp"

namespace renormlab {

using detail::BigFloat;
using detail::cnum;

int ComboWord::pbar() const {
    int m = 0;
    for (const auto& s : symbols) m = std::max(m, s.period);
    return m;
}

long long ComboWord::period_at(int level) const {
    long long p = 1;
    for (int i = 0; i < level && i < static_cast<int>(symbols.size()); ++i) p *= symbols[i].period;
    return p;
}

C ScalingTable::last_delta() const {
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
        if (it->has_delta) return it->delta;
    throw NumericalError("scaling table has no defined ratio");
}

std::pair<C, C> critical_value_and_derivative(C c, long long p) {
    if (p < 1) throw NumericalError("critical_value_and_derivative: p must be >= 1");
    cnum<double> q, d;
    if (!detail::critical_value_derivative_t(detail::from_c<double>(c), p, q, d))
        throw PrecisionExhausted("critical value recursion overflowed");
    return {detail::to_c(q), detail::to_c(d)};
}

namespace {

// Residual floor the Newton iteration can reach at `bits` of precision: the
// roundoff of c itself amplified by |dQ/dc|.
double residual_floor(double derivative_abs, double scale, unsigned bits) {
    const double ulp = std::pow(2.0, -static_cast<double>(bits));
    return 8.0 * ulp * std::max(1.0, derivative_abs) * std::max(1.0, scale);
}

struct Attempt {
    bool converged = false;
    bool verified = false;
    C root{};
    double residual = 0.0;
    double derivative_abs = 0.0;
};

template <class R>
Attempt attempt_at(C guess, long long p, double tol, int max_steps) {
    auto res = detail::newton_center_t<R>(detail::from_c<R>(guess), p, R(tol), max_steps);
    Attempt a;
    a.converged = res.converged;
    a.root = detail::to_c(res.root);
    a.residual = detail::to_dbl(res.residual);
    a.derivative_abs = detail::to_dbl(res.derivative_abs);
    return a;
}

Attempt attempt(C guess, long long p, double tol, int max_steps, unsigned bits) {
    if (bits <= 53) return attempt_at<double>(guess, p, tol, max_steps);
    detail::PrecisionScope scope(bits);
    return attempt_at<BigFloat>(guess, p, tol, max_steps);
}

bool verify_period(C root, long long p, unsigned bits, double derivative_abs) {
    // Verification tolerance accounts for the representation floor of the
    // stored parameter value.
    double tol = std::max(1e-10, residual_floor(derivative_abs, std::abs(root), 53) * 4.0);
    auto scan = detect_period_bits(root, p, tol, bits);
    return scan.outcome == PeriodOutcome::Found && scan.report->period == p;
}

}  // namespace

CenterRecord solve_center(long long p, C guess, const SolveOptions& opts) {
    if (!std::isfinite(guess.real()) || !std::isfinite(guess.imag()))
        throw NumericalError("solve_center: guess must be finite");
    unsigned bits = opts.start_bits;
    Attempt best;
    while (true) {
        // At reduced precision aim only for the achievable floor; the 1e-10
        // certificate is enforced at the final (possibly escalated) precision.
        Attempt a = attempt(guess, p, opts.tol_residual, opts.max_steps, bits);
        if (a.converged) {
            if (!verify_period(a.root, p, bits, a.derivative_abs)) {
                auto scan = detect_period_bits(a.root, p * 2, 1e-8, bits);
                long long found =
                    scan.outcome == PeriodOutcome::Found ? scan.report->period : 0;
                throw NumericalError("solve_center: Newton landed on a wrong-period root (period " +
                                     std::to_string(found) + ", wanted " + std::to_string(p) + ")");
            }
            CenterRecord rec;
            rec.level = 0;
            rec.period = p;
            rec.value = a.root;
            rec.residual = a.residual;
            rec.verified_period = p;
            rec.precision_bits = bits;
            return rec;
        }
        const double floor = residual_floor(a.derivative_abs, std::abs(a.root), bits);
        const bool precision_limited = a.residual <= floor * 16.0 && a.residual < 1e-4;
        if (precision_limited && bits < opts.max_bits) {
            bits += kPrecisionStepBits;
            guess = a.root;
            continue;
        }
        if (!precision_limited)
            throw NumericalError("solve_center: Newton failed to converge in " +
                                 std::to_string(opts.max_steps) + " steps (residual " +
                                 std::to_string(a.residual) + ")");
        throw PrecisionExhausted("solve_center: residual certificate unreachable at " +
                                 std::to_string(bits) + " bits");
    }
}

CenterRecord first_center(const TuningSymbol& sym, const SolveOptions& opts) {
    if (sym.kind == TuningSymbol::Kind::Primitive) {
        auto rec = solve_center(sym.period, sym.center_hint, opts);
        rec.level = 1;
        return rec;
    }
    if (sym.period == 2) {
        auto rec = solve_center(2, C(-1.0, 0.0), opts);
        rec.level = 1;
        return rec;
    }
    // Satellite p/q: root point on the main cardioid plus an outward nudge of
    // the classical limb size sin(pi p/q)/q^2.
    const double t = 2.0 * std::numbers::pi * sym.rotation / sym.period;
    const C mu = std::polar(1.0, t);
    const C root = 0.5 * mu - 0.25 * mu * mu;
    const C tangent = C(0, 0.5) * mu * (1.0 - mu);
    const C normal = tangent * C(0, -1) / std::abs(tangent);
    const double q2 = static_cast<double>(sym.period) * sym.period;
    const double limb = std::sin(std::numbers::pi * sym.rotation / sym.period) / q2;
    C guess = root + limb * normal;
    for (int tries = 0; tries < 9; ++tries) {
        try {
            auto rec = solve_center(sym.period, guess, opts);
            rec.level = 1;
            return rec;
        } catch (const NumericalError&) {
            const double ang = 2.0 * std::numbers::pi * tries / 8.0;
            guess = root + limb * normal * (0.6 + 0.15 * tries) + 0.2 * limb * std::polar(1.0, ang);
        }
    }
    throw NumericalError("first_center: could not locate the satellite limb center");
}

namespace {

struct GuardedSolve {
    CenterRecord record;
    bool ok = false;
};

// Principal Newton plus 8 perturbed reseeds; disagreement falls back to a 5x5
// grid of starts around the seed. All accepted roots must verify period p.
GuardedSolve guarded_solve(long long p, C seed, double spread, const SolveOptions& opts) {
    GuardedSolve out;
    std::vector<C> roots;
    auto try_one = [&](C g) -> std::optional<CenterRecord> {
        try {
            return solve_center(p, g, opts);
        } catch (const NumericalError&) {
            return std::nullopt;
        }
    };
    auto principal = try_one(seed);
    for (int k = 0; k < 8; ++k) {
        const double ang = 2.0 * std::numbers::pi * k / 8.0;
        auto r = try_one(seed + 0.25 * spread * std::polar(1.0, ang));
        if (r) roots.push_back(r->value);
    }
    const double agree_tol = std::max(1e-9, 1e-6 * spread);
    bool agreement = principal.has_value();
    if (principal) {
        for (C r : roots)
            if (std::abs(r - principal->value) > agree_tol) agreement = false;
    }
    if (agreement && principal) {
        out.record = *principal;
        out.ok = true;
        return out;
    }
    // 5x5 grid fallback; majority vote among verified roots, ties broken by
    // distance to the seed.
    std::vector<CenterRecord> found;
    for (int i = -2; i <= 2; ++i) {
        for (int j = -2; j <= 2; ++j) {
            C g = seed + C(0.6 * spread * i / 2.0, 0.6 * spread * j / 2.0);
            if (auto r = try_one(g)) found.push_back(*r);
        }
    }
    if (found.empty()) return out;
    std::vector<int> votes(found.size(), 0);
    for (std::size_t a = 0; a < found.size(); ++a)
        for (std::size_t b = 0; b < found.size(); ++b)
            if (std::abs(found[a].value - found[b].value) <= agree_tol) votes[a]++;
    int best = 0;
    for (std::size_t a = 1; a < found.size(); ++a) {
        if (votes[a] > votes[best] ||
            (votes[a] == votes[best] &&
             std::abs(found[a].value - seed) < std::abs(found[best].value - seed)))
            best = static_cast<int>(a);
    }
    out.record = found[best];
    out.ok = true;
    return out;
}

C initial_delta_estimate(const TuningSymbol& sym) {
    if (sym.kind == TuningSymbol::Kind::Satellite && sym.period == 2) return {4.669, 0.0};
    if (sym.kind == TuningSymbol::Kind::Satellite) {
        C d{4.6, 1.0};
        // conjugate-symmetric for conjugate rotations
        if (2 * sym.rotation > sym.period) d = std::conj(d);
        return d;
    }
    return {4.669, 0.0};
}

}  // namespace

std::vector<CenterRecord> cascade(const ComboWord& word, int levels, const CascadeOptions& opts) {
    if (word.symbols.empty()) throw NumericalError("cascade: empty combinatorial word");
    if (levels < 1) throw NumericalError("cascade: levels must be >= 1");
    ComboWord w = word;
    if (static_cast<int>(w.symbols.size()) < levels) {
        // single repeated symbol may be extended
        bool uniform = true;
        for (const auto& s : w.symbols)
            if (!(s == w.symbols.front())) uniform = false;
        if (!uniform)
            throw NumericalError("cascade: levels exceed word length");
        while (static_cast<int>(w.symbols.size()) < levels) w.symbols.push_back(w.symbols.front());
    }

    std::vector<CenterRecord> records;
    records.reserve(levels);

    auto rec1 = first_center(w.symbols[0], opts.solve);
    rec1.combo = word.text;
    rec1.level = 1;
    records.push_back(rec1);

    C c_prev2 = C(0.0, 0.0);  // level-0 center (trivial word)
    C delta_est = initial_delta_estimate(w.symbols[0]);

    for (int n = 2; n <= levels; ++n) {
        const C c_prev = records.back().value;
        const long long p = w.period_at(n);
        const C step = (c_prev - c_prev2) / delta_est;
        const C seed = c_prev + step;
        auto solved = guarded_solve(p, seed, std::abs(step), opts.solve);
        if (!solved.ok)
            throw NumericalError("cascade: level " + std::to_string(n) +
                                 " center not found (period " + std::to_string(p) + ")");
        solved.record.level = n;
        solved.record.combo = word.text;
        records.push_back(solved.record);
        // replace the estimate by the latest observed ratio
        const C denom = solved.record.value - c_prev;
        if (std::abs(denom) == 0.0)
            throw NumericalError("cascade: repeated centers at level " + std::to_string(n));
        delta_est = (c_prev - c_prev2) / denom;
        c_prev2 = c_prev;
    }
    return records;
}

ScalingTable scaling_ratios(std::span<const CenterRecord> centers) {
    if (centers.size() < 3) throw NumericalError("scaling_ratios: need at least 3 centers");
    ScalingTable t;
    t.rows.reserve(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        ScalingRow row;
        row.n = centers[i].level;
        row.c = centers[i].value;
        if (i >= 2) {
            const C num = centers[i - 1].value - centers[i - 2].value;
            const C den = centers[i].value - centers[i - 1].value;
            if (std::abs(den) == 0.0) throw NumericalError("scaling_ratios: repeated centers");
            row.has_delta = true;
            row.delta = num / den;
            row.delta_abs = std::abs(row.delta);
        }
        t.rows.push_back(row);
    }
    return t;
}

C extrapolate_limit(std::span<const CenterRecord> centers, double declared_tol) {
    if (centers.size() < 3) throw NumericalError("extrapolate_limit: need at least 3 centers");
    std::vector<C> est;
    for (std::size_t i = 2; i < centers.size(); ++i) {
        const C a = centers[i - 2].value, b = centers[i - 1].value, c = centers[i].value;
        const C d2 = (c - b) - (b - a);
        if (std::abs(d2) == 0.0) continue;
        est.push_back(c - (c - b) * (c - b) / d2);
    }
    if (est.size() < 2) throw NumericalError("extrapolate_limit: too few Aitken estimates");
    const double gap = std::abs(est.back() - est[est.size() - 2]);
    if (!(gap <= declared_tol))
        throw NumericalError("extrapolate_limit: estimates are not Cauchy (gap " +
                             std::to_string(gap) + ")");
    return est.back();
}

}  // namespace renormlab
