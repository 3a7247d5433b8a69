#include "renormlab/universality.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace renormlab {

double EvenSeries::eval_x2(double x2) const {
    double s = a.back();
    for (int k = static_cast<int>(a.size()) - 2; k >= 0; --k) s = s * x2 + a[k];
    return s;
}

double EvenSeries::eval(double x) const { return eval_x2(x * x); }

namespace {

std::vector<double> chebyshev_nodes(int n_points) {
    // x_j = (1 - cos(pi j / N)) / 2, j = 0..N; x_0 = 0, x_N = 1
    std::vector<double> x(n_points);
    const int N = n_points - 1;
    for (int j = 0; j <= N; ++j) x[j] = 0.5 * (1.0 - std::cos(std::numbers::pi * j / N));
    return x;
}

double lambda_of(const EvenSeries& g) { return g.eval(1.0); }

// Fixed-point residual R(x) = g(x) - (1/lambda) g(g(lambda x)).
double equation_residual(const EvenSeries& g, double x) {
    const double lam = lambda_of(g);
    const double inner = g.eval(lam * x);
    return g.eval(x) - g.eval(inner) / lam;
}

Eigen::VectorXd residual_vector(const EvenSeries& g, const std::vector<double>& nodes) {
    Eigen::VectorXd r(static_cast<int>(nodes.size()));
    for (std::size_t j = 0; j < nodes.size(); ++j) r[static_cast<int>(j)] = equation_residual(g, nodes[j]);
    return r;
}

}  // namespace

std::pair<EvenSeries, UniversalityConstants> solve_cvitanovic(int order) {
    if (order < 8 || order > 40) throw NumericalError("solve_cvitanovic: order must be in [8, 40]");

    // Continuation ladder keeps the standard seed a_1 ~ -1.528 in the Newton basin.
    EvenSeries g;
    g.a.assign(9, 0.0);
    g.a[0] = 1.0;
    g.a[1] = -1.528;

    std::vector<int> ladder;
    for (int n = 8; n < order; n += 4) ladder.push_back(n);
    ladder.push_back(order);

    for (int N : ladder) {
        if (static_cast<int>(g.a.size()) - 1 < N) g.a.resize(N + 1, 0.0);
        auto nodes = chebyshev_nodes(N + 1);
        bool converged = false;
        for (int step = 0; step < 80; ++step) {
            Eigen::VectorXd r = residual_vector(g, nodes);
            if (r.lpNorm<Eigen::Infinity>() < 1e-13) {
                converged = true;
                break;
            }
            // finite-difference Jacobian w.r.t. a_1..a_N
            Eigen::MatrixXd J(N + 1, N);
            for (int k = 1; k <= N; ++k) {
                const double h = 1e-7 * std::max(1.0, std::abs(g.a[k]));
                EvenSeries gp = g, gm = g;
                gp.a[k] += h;
                gm.a[k] -= h;
                Eigen::VectorXd rp = residual_vector(gp, nodes);
                Eigen::VectorXd rm = residual_vector(gm, nodes);
                J.col(k - 1) = (rp - rm) / (2.0 * h);
            }
            Eigen::VectorXd d = J.colPivHouseholderQr().solve(r);
            for (int k = 1; k <= N; ++k) g.a[k] -= d[k - 1];
            if (!std::isfinite(g.a[1]))
                throw NumericalError("solve_cvitanovic: Newton diverged from the standard seed");
        }
        if (!converged) {
            auto nodes2 = chebyshev_nodes(N + 1);
            double rn = residual_vector(g, nodes2).lpNorm<Eigen::Infinity>();
            if (rn > 1e-10)
                throw NumericalError("solve_cvitanovic: Newton stalled at residual " +
                                     std::to_string(rn));
        }
    }

    UniversalityConstants k;
    k.order = order;
    k.lambda = lambda_of(g);
    k.alpha = 1.0 / k.lambda;
    auto nodes = chebyshev_nodes(order + 1);
    k.residual = residual_vector(g, nodes).lpNorm<Eigen::Infinity>();
    if (!(k.lambda < 0.0))
        throw NumericalError("solve_cvitanovic: converged to a non-physical branch");
    return {g, k};
}

std::vector<double> renorm_operator_values(const EvenSeries& g, const std::vector<double>& xs) {
    const double lam = lambda_of(g);
    std::vector<double> out(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) out[j] = g.eval(g.eval(lam * xs[j])) / lam;
    return out;
}

namespace {

// The linearization is computed in shifted-Chebyshev coordinates of H(t) =
// g(sqrt(t)) on [0,1]; the monomial chart of EvenSeries conditions too poorly
// past order ~12 while the spectrum is basis-independent.
struct ChebChart {
    int N;                   // polynomial degree in t
    std::vector<double> u;   // u_j = cos(pi j / N)
    std::vector<double> t;   // t_j = (1 + u_j) / 2

    explicit ChebChart(int order) : N(order), u(order + 1), t(order + 1) {
        for (int j = 0; j <= N; ++j) {
            u[j] = std::cos(std::numbers::pi * j / N);
            t[j] = 0.5 * (1.0 + u[j]);
        }
    }

    std::vector<double> coeffs_from_values(const std::vector<double>& v) const {
        std::vector<double> c(N + 1, 0.0);
        for (int k = 0; k <= N; ++k) {
            double s = 0.5 * (v[0] + (k % 2 == 0 ? v[N] : -v[N]));
            for (int j = 1; j < N; ++j) s += v[j] * std::cos(std::numbers::pi * j * k / N);
            c[k] = 2.0 * s / N;
        }
        c[0] *= 0.5;
        c[N] *= 0.5;
        return c;
    }

    static double clenshaw(const std::vector<double>& c, double ut) {
        double b1 = 0.0, b2 = 0.0;
        for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
            double b0 = 2.0 * ut * b1 - b2 + c[k];
            b2 = b1;
            b1 = b0;
        }
        return ut * b1 - b2 + c[0];
    }

    // H(t) from coefficients, t in [0,1]
    static double eval_t(const std::vector<double>& c, double t) {
        return clenshaw(c, 2.0 * t - 1.0);
    }
    // g(x) = H(x^2)
    static double eval_x(const std::vector<double>& c, double x) { return eval_t(c, x * x); }

    // Renormalization operator in this chart; lambda re-derived per evaluation.
    std::vector<double> apply_operator(const std::vector<double>& c) const {
        const double lam = eval_x(c, 1.0);
        std::vector<double> v(N + 1);
        for (int j = 0; j <= N; ++j) {
            const double x = std::sqrt(t[j]);
            v[j] = eval_x(c, eval_x(c, lam * x)) / lam;
        }
        return coeffs_from_values(v);
    }

    std::vector<double> coeffs_of(const EvenSeries& g) const {
        std::vector<double> v(N + 1);
        for (int j = 0; j <= N; ++j) v[j] = g.eval_x2(t[j]);
        return coeffs_from_values(v);
    }
};

Eigen::MatrixXd fd_jacobian(const EvenSeries& g, double fd_step) {
    const int N = g.order();
    ChebChart chart(N);
    std::vector<double> c0 = chart.coeffs_of(g);
    // free coordinates c_1..c_N; c_0 absorbs the g(0)=1 normalization
    Eigen::MatrixXd J(N, N);
    for (int k = 1; k <= N; ++k) {
        const double h = fd_step * std::max(1.0, std::abs(c0[k]));
        std::vector<double> cp = c0, cm = c0;
        cp[k] += h;
        cm[k] -= h;
        // restore H(0) = 1: T_k(-1) = (-1)^k
        const double sk = (k % 2 == 0) ? 1.0 : -1.0;
        cp[0] -= h * sk;
        cm[0] += h * sk;
        auto tp = chart.apply_operator(cp);
        auto tm = chart.apply_operator(cm);
        for (int r = 1; r <= N; ++r) J(r - 1, k - 1) = (tp[r] - tm[r]) / (2.0 * h);
    }
    return J;
}

}  // namespace

DeltaResult delta_eigenvalue(const EvenSeries& g, const DeltaOptions& opts) {
    const int N = g.order();
    if (N < 4) throw NumericalError("delta_eigenvalue: order too small");
    Eigen::MatrixXd J = fd_jacobian(g, opts.fd_step);

    DeltaResult out;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(N).normalized();
    double prev = 0.0;
    bool converged = false;
    double osc = 0.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::VectorXd w = J * v;
        const double rq = v.dot(w);
        const double nw = w.norm();
        if (nw == 0.0) throw NumericalError("delta_eigenvalue: power iteration annihilated");
        v = w / nw;
        out.iterations = it + 1;
        if (it > 2) {
            if (std::abs(rq - prev) < opts.rayleigh_tol * std::max(1.0, std::abs(rq))) {
                out.delta = rq;
                converged = true;
                break;
            }
            osc = 0.8 * osc + 0.2 * std::abs(rq - prev);
        }
        prev = rq;
    }
    if (!converged) {
        if (osc > 1e-3)
            throw NumericalError("delta_eigenvalue: power iteration stagnated (complex pair "
                                 "dominance suspected)");
        throw NumericalError("delta_eigenvalue: Rayleigh quotients did not settle");
    }

    // Two-vector subspace iteration for the second eigenvalue magnitude.
    Eigen::MatrixXd Q(N, 2);
    Q.col(0) = v;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(N);
    u[std::min(1, N - 1)] = 1.0;
    u -= v * v.dot(u);
    Q.col(1) = u.normalized();
    for (int it = 0; it < 300; ++it) {
        Eigen::MatrixXd Z = J * Q;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
        Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, 2);
    }
    Eigen::MatrixXd S = Q.transpose() * J * Q;  // 2x2 projected block
    const double tr = S(0, 0) + S(1, 1);
    const double det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
    const double disc = tr * tr / 4.0 - det;
    double m2;
    if (disc >= 0.0) {
        const double r1 = tr / 2.0 + std::sqrt(disc);
        const double r2 = tr / 2.0 - std::sqrt(disc);
        m2 = std::min(std::abs(r1), std::abs(r2));
    } else {
        m2 = std::sqrt(det < 0 ? -det : det);
    }
    out.second_magnitude = m2;
    return out;
}

std::vector<double> jacobian_spectrum_magnitudes(const EvenSeries& g, double fd_step) {
    Eigen::MatrixXd J = fd_jacobian(g, fd_step);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    std::vector<double> mags(J.rows());
    for (int i = 0; i < J.rows(); ++i) mags[i] = std::abs(es.eigenvalues()[i]);
    std::sort(mags.rbegin(), mags.rend());
    return mags;
}

}  // namespace renormlab
