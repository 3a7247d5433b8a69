#pragma once

#include "renormlab/types.hpp"

namespace renormlab {

// Even polynomial g(z) = 1 + sum_{k>=1} a_k z^{2k} on |z| <= domain_radius.
struct EvenSeries {
    std::vector<double> a;  // a[0] == 1 exactly
    double domain_radius = 1.0;

    int order() const { return static_cast<int>(a.size()) - 1; }
    double eval(double x) const;
    double eval_x2(double x2) const;  // Horner in x^2
};

struct UniversalityConstants {
    double lambda = 0.0;    // g(1), negative
    double alpha = 0.0;     // 1/lambda (negative); |alpha| is the spatial factor
    double delta = 0.0;     // dominant eigenvalue of the linearized operator
    double residual = 0.0;  // sup-norm of the fixed-point equation on the nodes
    int order = 0;
};

// Solves g(z) = (1/lambda) g(g(lambda z)), lambda = g(1), by Newton collocation
// at N+1 Chebyshev-spaced nodes in [0,1]. delta is left 0 here.
std::pair<EvenSeries, UniversalityConstants> solve_cvitanovic(int order);

struct DeltaResult {
    double delta = 0.0;
    double second_magnitude = 0.0;  // |second eigenvalue| from subspace iteration
    int iterations = 0;
};

struct DeltaOptions {
    double fd_step = 1e-6;          // scaled per coefficient
    double rayleigh_tol = 1e-8;
    int max_iterations = 500;
};

// Dominant eigenvalue of the finite-difference Jacobian of the renormalization
// operator at g (lambda re-derived per evaluation) by power iteration, plus the
// second eigenvalue magnitude by two-vector subspace iteration.
DeltaResult delta_eigenvalue(const EvenSeries& g, const DeltaOptions& opts = {});

// Pointwise image of the renormalization operator (exposed for tests).
std::vector<double> renorm_operator_values(const EvenSeries& g, const std::vector<double>& xs);

// All eigenvalue magnitudes of the truncated Jacobian, descending (test oracle).
std::vector<double> jacobian_spectrum_magnitudes(const EvenSeries& g, double fd_step = 1e-6);

}  // namespace renormlab
