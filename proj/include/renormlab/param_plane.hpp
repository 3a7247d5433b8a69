#pragma once

#include "renormlab/complex_core.hpp"
#include "renormlab/types.hpp"

#include <span>

namespace renormlab {

struct TuningSymbol {
    enum class Kind { Satellite, Primitive };
    Kind kind = Kind::Satellite;
    int period = 2;     // satellite: q of the rotation p/q; primitive: the period
    int rotation = 1;   // satellite numerator p (reduced fraction p/q)
    C center_hint{};    // primitive only
    bool operator==(const TuningSymbol&) const = default;
};

struct ComboWord {
    std::vector<TuningSymbol> symbols;
    std::string text;  // canonical form, e.g. "d*12", "s1/3*8"

    int pbar() const;
    long long period_at(int level) const;  // product of the first `level` symbol periods
};

struct CenterRecord {
    std::string combo;
    int level = 0;
    long long period = 0;
    C value{};
    double residual = 0.0;
    long long verified_period = 0;
    unsigned precision_bits = kBasePrecisionBits;
};

struct ScalingRow {
    int n = 0;
    C c{};
    bool has_delta = false;
    C delta{};
    double delta_abs = 0.0;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    // latest defined delta (throws if none)
    C last_delta() const;
};

// Q = f_c^p(0) and dQ/dc by the forward recursion.
std::pair<C, C> critical_value_and_derivative(C c, long long p);

struct SolveOptions {
    double tol_residual = 1e-10;
    int max_steps = 200;
    unsigned start_bits = kBasePrecisionBits;
    unsigned max_bits = kMaxPrecisionBits;
};

// Newton on Q_p(c)=0 with wrong-root verification (detect_period must return
// exactly p) and automatic precision escalation in 64-bit steps whenever the
// residual certificate 1e-10 is unreachable at the current precision.
CenterRecord solve_center(long long p, C guess, const SolveOptions& opts = {});

struct CascadeOptions {
    SolveOptions solve;
    bool verbose = false;
};

std::vector<CenterRecord> cascade(const ComboWord& word, int levels,
                                  const CascadeOptions& opts = {});

ScalingTable scaling_ratios(std::span<const CenterRecord> centers);

// Aitken-accelerated limit of the center sequence; successive estimates must
// agree to `declared_tol`.
C extrapolate_limit(std::span<const CenterRecord> centers, double declared_tol = 1e-6);

// Canonical first center of a tuning symbol (doubling -1, satellite limbs via
// the cardioid root point, primitives from their hint).
CenterRecord first_center(const TuningSymbol& sym, const SolveOptions& opts = {});

}  // namespace renormlab
