#include "renormlab/width_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <set>

namespace renormlab {

std::vector<int> GridDomain::labels_present() const {
    std::set<int> s;
    for (std::size_t k = 0; k < cell.size(); ++k)
        if (cell[k] == Boundary && label[k] > 0) s.insert(label[k]);
    return {s.begin(), s.end()};
}

void GridDomain::validate() const {
    if (nx <= 0 || ny <= 0 || cell.size() != static_cast<std::size_t>(nx) * ny)
        throw NumericalError("GridDomain: inconsistent dimensions");
    if (!(hx > 0) || !(hy > 0)) throw NumericalError("GridDomain: nonpositive cell size");
    for (std::size_t k = 0; k < cell.size(); ++k) {
        if (cell[k] == Boundary && label[k] == 0)
            throw NumericalError("GridDomain: unlabeled boundary cell");
        if (cell[k] != Boundary && label[k] != 0)
            throw NumericalError("GridDomain: label on a non-boundary cell");
    }
    // interior 4-connectivity
    std::size_t total = 0, seed = cell.size();
    for (std::size_t k = 0; k < cell.size(); ++k)
        if (cell[k] == Interior) {
            ++total;
            if (seed == cell.size()) seed = k;
        }
    if (total == 0) throw NumericalError("GridDomain: empty interior");
    std::vector<uint8_t> seen(cell.size(), 0);
    std::queue<std::size_t> q;
    q.push(seed);
    seen[seed] = 1;
    std::size_t reached = 0;
    while (!q.empty()) {
        std::size_t k = q.front();
        q.pop();
        ++reached;
        int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
        auto push = [&](int ii, int jj) {
            if (periodic_x) ii = (ii + nx) % nx;
            if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) return;
            std::size_t kk = idx(ii, jj);
            if (!seen[kk] && cell[kk] == Interior) {
                seen[kk] = 1;
                q.push(kk);
            }
        };
        push(i - 1, j);
        push(i + 1, j);
        push(i, j - 1);
        push(i, j + 1);
    }
    if (reached != total) throw NumericalError("GridDomain: interior is not 4-connected");
}

double harmonic_sum(const std::vector<double>& values) {
    if (values.empty()) throw NumericalError("harmonic_sum: empty list");
    double inv = 0.0;
    for (double v : values) {
        if (v < 0.0) throw NumericalError("harmonic_sum: negative value");
        if (v == 0.0) return 0.0;
        inv += 1.0 / v;
    }
    return 1.0 / inv;
}

namespace {

bool segments_cross(C a, C b, C c, C d) {
    auto orient = [](C p, C q, C r) {
        double v = (q.real() - p.real()) * (r.imag() - p.imag()) -
                   (q.imag() - p.imag()) * (r.real() - p.real());
        if (v > 1e-300) return 1;
        if (v < -1e-300) return -1;
        return 0;
    };
    int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
    // touching counts as a cut (conservative for insulating slits)
    auto on_seg = [](C p, C q, C r) {
        return std::min(p.real(), q.real()) - 1e-12 <= r.real() &&
               r.real() <= std::max(p.real(), q.real()) + 1e-12 &&
               std::min(p.imag(), q.imag()) - 1e-12 <= r.imag() &&
               r.imag() <= std::max(p.imag(), q.imag()) + 1e-12;
    };
    if (o1 == 0 && on_seg(a, b, c)) return true;
    if (o2 == 0 && on_seg(a, b, d)) return true;
    if (o3 == 0 && on_seg(c, d, a)) return true;
    if (o4 == 0 && on_seg(c, d, b)) return true;
    return false;
}

bool edge_cut_by_slits(const GridDomain& dom, int i0, int j0, int i1, int j1,
                       const std::vector<Polyline>& slits) {
    if (slits.empty()) return false;
    C a = dom.center(i0, j0), b = dom.center(i1, j1);
    for (const auto& s : slits)
        for (std::size_t k = 0; k + 1 < s.pts.size(); ++k)
            if (segments_cross(a, b, s.pts[k], s.pts[k + 1])) return true;
    return false;
}

struct Problem {
    const GridDomain& dom;
    std::vector<int> unknown;       // cell -> unknown index or -1
    std::vector<double> dirichlet;  // value for source/sink cells, NaN otherwise
    std::vector<std::size_t> cells_of_unknown;
    int n_unknowns = 0;
    bool disconnected = false;

    // adjacency as flat arrays for the matrix-free operator
    std::vector<int> nbr_index;      // 4 per unknown, -2 none, -1 dirichlet ref, else unknown id
    std::vector<double> nbr_g;       // conductance per neighbor slot
    std::vector<double> nbr_value;   // dirichlet value when nbr_index == -1
    std::vector<double> diag;
};

bool sel_matches(const GridDomain& dom, std::size_t k, const std::vector<BoundarySel>& sels) {
    if (dom.cell[k] != GridDomain::Boundary) return false;
    for (const auto& s : sels)
        if (dom.label[k] == s.component && (s.arc == 0 || dom.arc[k] == s.arc)) return true;
    return false;
}

// Canonical orientation makes capacity exactly symmetric under swapping the
// source and sink selectors.
bool canonical_order(const std::vector<BoundarySel>& a, const std::vector<BoundarySel>& b) {
    auto key = [](const std::vector<BoundarySel>& v) {
        std::vector<std::pair<int, int>> k;
        for (const auto& s : v) k.emplace_back(s.component, s.arc);
        std::sort(k.begin(), k.end());
        return k;
    };
    return key(a) <= key(b);
}

Problem assemble(const GridDomain& dom, const CurveFamilySpec& spec) {
    Problem pr{dom, {}, {}, {}, 0, false, {}, {}, {}, {}};
    const std::size_t n = dom.cell.size();
    pr.unknown.assign(n, -1);
    pr.dirichlet.assign(n, std::numeric_limits<double>::quiet_NaN());

    const bool swap = !canonical_order(spec.source, spec.sink);
    const auto& src = swap ? spec.sink : spec.source;
    const auto& snk = swap ? spec.source : spec.sink;

    bool any_src = false, any_snk = false;
    for (std::size_t k = 0; k < n; ++k) {
        if (sel_matches(dom, k, src)) {
            pr.dirichlet[k] = 0.0;
            any_src = true;
        } else if (sel_matches(dom, k, snk)) {
            pr.dirichlet[k] = 1.0;
            any_snk = true;
        }
    }
    if (!any_src || !any_snk) throw NumericalError("capacity: empty source or sink selector");

    const double gx = dom.hy / dom.hx;  // conductance of an x-direction edge
    const double gy = dom.hx / dom.hy;

    auto conducting = [&](std::size_t k) {
        return dom.cell[k] == GridDomain::Interior || !std::isnan(pr.dirichlet[k]);
    };

    // Restrict to cells reachable from Dirichlet data so the system is SPD.
    std::vector<uint8_t> live(n, 0);
    std::queue<std::size_t> q;
    for (std::size_t k = 0; k < n; ++k)
        if (!std::isnan(pr.dirichlet[k])) {
            live[k] = 1;
            q.push(k);
        }
    auto neighbors = [&](std::size_t k, auto&& fn) {
        int i = static_cast<int>(k % dom.nx), j = static_cast<int>(k / dom.nx);
        const int di[4] = {-1, 1, 0, 0};
        const int dj[4] = {0, 0, -1, 1};
        for (int d = 0; d < 4; ++d) {
            int ii = i + di[d], jj = j + dj[d];
            if (dom.periodic_x && (ii < 0 || ii >= dom.nx)) ii = (ii + dom.nx) % dom.nx;
            if (ii < 0 || ii >= dom.nx || jj < 0 || jj >= dom.ny) continue;
            std::size_t kk = dom.idx(ii, jj);
            if (!conducting(kk)) continue;
            if (edge_cut_by_slits(dom, i, j, ii, jj, spec.slits)) continue;
            fn(kk, d < 2 ? gx : gy);
        }
    };
    while (!q.empty()) {
        std::size_t k = q.front();
        q.pop();
        neighbors(k, [&](std::size_t kk, double) {
            if (!live[kk] && dom.cell[kk] == GridDomain::Interior) {
                live[kk] = 1;
                q.push(kk);
            }
        });
    }

    for (std::size_t k = 0; k < n; ++k)
        if (live[k] && dom.cell[k] == GridDomain::Interior && std::isnan(pr.dirichlet[k])) {
            pr.unknown[k] = pr.n_unknowns++;
            pr.cells_of_unknown.push_back(k);
        }

    // connectivity of source to sink through live cells
    {
        std::vector<uint8_t> seen(n, 0);
        std::queue<std::size_t> qq;
        for (std::size_t k = 0; k < n; ++k)
            if (pr.dirichlet[k] == 0.0) {
                seen[k] = 1;
                qq.push(k);
            }
        bool reach = false;
        while (!qq.empty() && !reach) {
            std::size_t k = qq.front();
            qq.pop();
            neighbors(k, [&](std::size_t kk, double) {
                if (seen[kk]) return;
                if (pr.dirichlet[kk] == 1.0) {
                    reach = true;
                    return;
                }
                if (pr.unknown[kk] >= 0) {
                    seen[kk] = 1;
                    qq.push(kk);
                }
            });
        }
        pr.disconnected = !reach;
    }

    pr.nbr_index.assign(static_cast<std::size_t>(pr.n_unknowns) * 4, -2);
    pr.nbr_g.assign(static_cast<std::size_t>(pr.n_unknowns) * 4, 0.0);
    pr.nbr_value.assign(static_cast<std::size_t>(pr.n_unknowns) * 4, 0.0);
    pr.diag.assign(pr.n_unknowns, 0.0);
    for (int u = 0; u < pr.n_unknowns; ++u) {
        std::size_t k = pr.cells_of_unknown[u];
        int slot = 0;
        neighbors(k, [&](std::size_t kk, double g) {
            std::size_t base = static_cast<std::size_t>(u) * 4 + slot;
            if (pr.unknown[kk] >= 0) {
                pr.nbr_index[base] = pr.unknown[kk];
            } else if (!std::isnan(pr.dirichlet[kk])) {
                pr.nbr_index[base] = -1;
                pr.nbr_value[base] = pr.dirichlet[kk];
            } else {
                return;  // non-conducting
            }
            pr.nbr_g[base] = g;
            pr.diag[u] += g;
            ++slot;
        });
    }
    return pr;
}

std::vector<double> solve_pcg(const Problem& pr, const CapacityOptions& opts) {
    const int n = pr.n_unknowns;
    std::vector<double> u(n, 0.0), r(n, 0.0), z(n, 0.0), p(n, 0.0), Ap(n, 0.0);
    // b = contributions of Dirichlet neighbors
    for (int i = 0; i < n; ++i) {
        double b = 0.0;
        for (int s = 0; s < 4; ++s) {
            std::size_t q = static_cast<std::size_t>(i) * 4 + s;
            if (pr.nbr_index[q] == -1) b += pr.nbr_g[q] * pr.nbr_value[q];
        }
        r[i] = b;
    }
    double bnorm = 0.0;
    for (int i = 0; i < n; ++i) bnorm += r[i] * r[i];
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return u;

    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i < n; ++i) {
            double acc = pr.diag[i] * x[i];
            for (int s = 0; s < 4; ++s) {
                std::size_t q = static_cast<std::size_t>(i) * 4 + s;
                int j = pr.nbr_index[q];
                if (j >= 0) acc -= pr.nbr_g[q] * x[j];
            }
            y[i] = acc;
        }
    };

    double rz = 0.0;
    for (int i = 0; i < n; ++i) {
        z[i] = r[i] / pr.diag[i];
        rz += r[i] * z[i];
        p[i] = z[i];
    }
    const long long max_iter = static_cast<long long>(opts.max_iter_factor) * std::max(n, 1);
    for (long long it = 0; it < max_iter; ++it) {
        apply(p, Ap);
        double pAp = 0.0;
        for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (pAp <= 0.0) break;
        const double alpha = rz / pAp;
        double rnorm = 0.0;
        for (int i = 0; i < n; ++i) {
            u[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
            rnorm += r[i] * r[i];
        }
        if (std::sqrt(rnorm) <= opts.rel_tol * bnorm) return u;
        double rz2 = 0.0;
        for (int i = 0; i < n; ++i) {
            z[i] = r[i] / pr.diag[i];
            rz2 += r[i] * z[i];
        }
        const double beta = rz2 / rz;
        rz = rz2;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    // re-check the residual before declaring failure
    apply(u, Ap);
    double rnorm = 0.0;
    for (int i = 0; i < n; ++i) {
        double b = 0.0;
        for (int s = 0; s < 4; ++s) {
            std::size_t q = static_cast<std::size_t>(i) * 4 + s;
            if (pr.nbr_index[q] == -1) b += pr.nbr_g[q] * pr.nbr_value[q];
        }
        double res = b - Ap[i];
        rnorm += res * res;
    }
    if (std::sqrt(rnorm) > 100.0 * opts.rel_tol * bnorm)
        throw NumericalError("capacity: conjugate gradient did not converge");
    return u;
}

double energy_of(const Problem& pr, const std::vector<double>& u) {
    // sum over conduction edges of g (du)^2; count each once via slot scan and
    // dirichlet-dirichlet edges never conduct energy (no path cells between).
    double e = 0.0;
    for (int i = 0; i < pr.n_unknowns; ++i) {
        for (int s = 0; s < 4; ++s) {
            std::size_t q = static_cast<std::size_t>(i) * 4 + s;
            int j = pr.nbr_index[q];
            if (j == -2 || pr.nbr_g[q] == 0.0) continue;
            if (j >= 0) {
                if (j > i) {
                    double d = u[i] - u[j];
                    e += pr.nbr_g[q] * d * d;
                }
            } else {
                double d = u[i] - pr.nbr_value[q];
                e += pr.nbr_g[q] * d * d;
            }
        }
    }
    return e;
}

}  // namespace

double capacity_single(const GridDomain& dom, const CurveFamilySpec& spec,
                       const CapacityOptions& opts) {
    Problem pr = assemble(dom, spec);
    if (pr.disconnected) return 0.0;
    auto u = solve_pcg(pr, opts);
    return energy_of(pr, u);
}

namespace {

WidthEstimate estimate_from(double w_fine, double w_coarse, int res_fine, int res_coarse) {
    WidthEstimate e;
    e.width_fine = w_fine;
    e.width_coarse = w_coarse;
    e.resolutions_used = {res_coarse, res_fine};
    e.width = 2.0 * w_fine - w_coarse;  // first-order Richardson
    if (e.width < 0.0) e.width = w_fine;
    e.error_indicator = std::abs(w_fine - w_coarse) + 1e-14;
    e.disconnected = (w_fine == 0.0 && w_coarse == 0.0);
    e.modulus = e.width > 0.0 ? 1.0 / e.width : std::numeric_limits<double>::infinity();
    return e;
}

}  // namespace

WidthEstimate solve_capacity(const DomainGenerator& gen, int fine_resolution,
                             const CurveFamilySpec& spec, const CapacityOptions& opts) {
    const int coarse = std::max(16, fine_resolution / 2);
    GridDomain fine = gen(fine_resolution);
    GridDomain crs = gen(coarse);
    double wf = capacity_single(fine, spec, opts);
    double wc = capacity_single(crs, spec, opts);
    return estimate_from(wf, wc, fine_resolution, coarse);
}

WidthEstimate solve_capacity(const GridDomain& dom, const CurveFamilySpec& spec,
                             const CapacityOptions& opts) {
    GridDomain crs = coarsen(dom);
    double wf = capacity_single(dom, spec, opts);
    double wc = capacity_single(crs, spec, opts);
    return estimate_from(wf, wc, std::max(dom.nx, dom.ny), std::max(crs.nx, crs.ny));
}

double grotzsch_check(const WidthEstimate& full, const std::vector<WidthEstimate>& parts) {
    std::vector<double> ws;
    ws.reserve(parts.size());
    for (const auto& p : parts) ws.push_back(p.width);
    return harmonic_sum(ws) - full.width;
}

namespace {

// Cells carrying the top of the energy, enough to account for `target` of it.
std::vector<std::size_t> energy_core(const GridDomain& dom, const CurveFamilySpec& spec,
                                     double target, const CapacityOptions& opts) {
    Problem pr = assemble(dom, spec);
    if (pr.disconnected) return {};
    auto u = solve_pcg(pr, opts);
    std::vector<double> cell_e(dom.cell.size(), 0.0);
    double total = 0.0;
    for (int i = 0; i < pr.n_unknowns; ++i) {
        for (int s = 0; s < 4; ++s) {
            std::size_t q = static_cast<std::size_t>(i) * 4 + s;
            int j = pr.nbr_index[q];
            if (j == -2 || pr.nbr_g[q] == 0.0) continue;
            double d;
            if (j >= 0) {
                if (j <= i) continue;
                d = u[i] - u[j];
            } else {
                d = u[i] - pr.nbr_value[q];
            }
            double e = pr.nbr_g[q] * d * d;
            total += e;
            cell_e[pr.cells_of_unknown[i]] += e;  // attribute to the unknown cell
        }
    }
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < cell_e.size(); ++k)
        if (cell_e[k] > 0.0) order.push_back(k);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return cell_e[a] > cell_e[b]; });
    std::vector<std::size_t> core;
    double acc = 0.0;
    for (std::size_t k : order) {
        if (acc >= target) break;
        core.push_back(k);
        acc += cell_e[k];
    }
    return core;
}

}  // namespace

WeightedArcDiagramNum thin_thick(const DomainGenerator& gen, int fine_resolution,
                                 const std::vector<ArcCandidate>& candidates, double threshold,
                                 int outer_label, const ThinThickOptions& opts) {
    WeightedArcDiagramNum wad;
    wad.outer_label = outer_label;
    std::vector<std::vector<std::size_t>> cores;
    GridDomain fine = gen(fine_resolution);
    for (const auto& cand : candidates) {
        auto est = solve_capacity(gen, fine_resolution, cand.spec, opts.capacity);
        double weight = std::max(est.width - opts.buffer_trim, 0.0);
        if (weight < threshold) continue;
        WadEntry e;
        e.name = cand.name;
        e.comp_a = cand.comp_a;
        e.comp_b = cand.comp_b;
        e.weight = weight;
        e.raw_width = est.width;
        wad.entries.push_back(e);
        if (opts.check_disjoint_supports)
            cores.push_back(energy_core(fine, cand.spec, weight, opts.capacity));
    }
    if (opts.check_disjoint_supports) {
        std::set<std::size_t> seen;
        for (std::size_t a = 0; a < cores.size(); ++a) {
            for (std::size_t k : cores[a]) {
                if (seen.count(k))
                    throw NumericalError("thin_thick: canonical rectangles overlap on the grid; "
                                         "configuration rejected");
                seen.insert(k);
            }
        }
    }
    return wad;
}

std::pair<double, double> local_width(const WeightedArcDiagramNum& wad, int component) {
    bool known = false;
    double total = 0.0, vertical = 0.0;
    for (const auto& e : wad.entries) {
        const bool touches_a = e.comp_a == component;
        const bool touches_b = e.comp_b == component;
        if (e.comp_a == component || e.comp_b == component) known = true;
        if (!touches_a && !touches_b) continue;
        const double mult = (touches_a && touches_b) ? 2.0 : 1.0;  // self-arcs doubled
        total += mult * e.weight;
        if (e.comp_a == wad.outer_label || e.comp_b == wad.outer_label) vertical += mult * e.weight;
    }
    if (!known && component != wad.outer_label) {
        // allow querying a component with no weighted arcs, but reject unknown ids
        bool exists = component > 0;
        if (!exists) throw NumericalError("local_width: unknown component label");
    }
    return {total, vertical};
}

WidthEstimate local_weight(const DomainGenerator& gen, int fine_resolution, int component,
                           const std::vector<int>& all_labels, const CapacityOptions& opts) {
    CurveFamilySpec spec;
    spec.source.push_back({component, 0});
    for (int l : all_labels)
        if (l != component) spec.sink.push_back({l, 0});
    if (spec.sink.empty()) throw NumericalError("local_weight: no opposing boundary labels");
    return solve_capacity(gen, fine_resolution, spec, opts);
}

// --- fixtures ------------------------------------------------------------------

GridDomain make_rectangle(double width, double height, int resolution) {
    GridDomain d;
    d.nx = std::max(4, resolution);
    d.ny = std::max(4, static_cast<int>(std::lround(resolution * height / width)));
    d.x0 = 0.0;
    d.y0 = 0.0;
    d.hx = width / d.nx;
    d.hy = height / d.ny;
    d.cell.assign(static_cast<std::size_t>(d.nx) * d.ny, GridDomain::Interior);
    d.label.assign(d.cell.size(), 0);
    d.arc.assign(d.cell.size(), 0);
    for (int j = 0; j < d.ny; ++j) {
        d.cell[d.idx(0, j)] = GridDomain::Boundary;
        d.label[d.idx(0, j)] = 1;
        d.cell[d.idx(d.nx - 1, j)] = GridDomain::Boundary;
        d.label[d.idx(d.nx - 1, j)] = 2;
    }
    return d;
}

GridDomain make_channel_section(double x_lo, double x_hi, double height,
                                const std::vector<Polyline>&, int resolution) {
    GridDomain d = make_rectangle(x_hi - x_lo, height, resolution);
    d.x0 = x_lo;
    return d;
}

GridDomain make_annulus_cartesian(double r_inner, double r_outer, int resolution) {
    GridDomain d;
    const double span = 2.0 * r_outer * 1.04;
    d.nx = d.ny = resolution;
    d.x0 = -span / 2.0;
    d.y0 = -span / 2.0;
    d.hx = d.hy = span / resolution;
    d.cell.assign(static_cast<std::size_t>(d.nx) * d.ny, GridDomain::Exterior);
    d.label.assign(d.cell.size(), 0);
    d.arc.assign(d.cell.size(), 0);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            const double r = std::abs(d.center(i, j));
            std::size_t k = d.idx(i, j);
            if (r <= r_inner) {
                d.cell[k] = GridDomain::Boundary;
                d.label[k] = 1;
            } else if (r >= r_outer) {
                d.cell[k] = GridDomain::Boundary;
                d.label[k] = 2;
            } else {
                d.cell[k] = GridDomain::Interior;
            }
        }
    return d;
}

GridDomain make_annulus_logpolar(double r_inner, double r_outer, int resolution) {
    if (!(r_outer > r_inner && r_inner > 0))
        throw NumericalError("make_annulus_logpolar: need 0 < r < R");
    GridDomain d;
    const double L = std::log(r_outer / r_inner);
    d.periodic_x = true;
    d.nx = resolution;
    d.hx = 2.0 * std::numbers::pi / d.nx;
    d.ny = std::max(4, static_cast<int>(std::lround(resolution * L / (2.0 * std::numbers::pi))));
    d.hy = L / d.ny;
    d.x0 = 0.0;
    d.y0 = std::log(r_inner);
    d.cell.assign(static_cast<std::size_t>(d.nx) * d.ny, GridDomain::Interior);
    d.label.assign(d.cell.size(), 0);
    d.arc.assign(d.cell.size(), 0);
    for (int i = 0; i < d.nx; ++i) {
        d.cell[d.idx(i, 0)] = GridDomain::Boundary;
        d.label[d.idx(i, 0)] = 1;
        d.cell[d.idx(i, d.ny - 1)] = GridDomain::Boundary;
        d.label[d.idx(i, d.ny - 1)] = 2;
    }
    return d;
}

GridDomain make_disk_with_holes(double R, const std::vector<Hole>& holes, int resolution) {
    GridDomain d;
    const double span = 2.0 * R * 1.04;
    d.nx = d.ny = resolution;
    d.x0 = -span / 2.0;
    d.y0 = -span / 2.0;
    d.hx = d.hy = span / resolution;
    d.cell.assign(static_cast<std::size_t>(d.nx) * d.ny, GridDomain::Exterior);
    d.label.assign(d.cell.size(), 0);
    d.arc.assign(d.cell.size(), 0);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            std::size_t k = d.idx(i, j);
            const C z = d.center(i, j);
            if (std::abs(z) >= R) {
                d.cell[k] = GridDomain::Boundary;
                d.label[k] = 1;
                continue;
            }
            bool in_hole = false;
            for (std::size_t h = 0; h < holes.size(); ++h) {
                if (std::abs(z - holes[h].center) <= holes[h].radius) {
                    d.cell[k] = GridDomain::Boundary;
                    d.label[k] = static_cast<uint8_t>(2 + h);
                    in_hole = true;
                    break;
                }
            }
            if (!in_hole) d.cell[k] = GridDomain::Interior;
        }
    return d;
}

GridDomain make_lshape(double a, double b, int resolution) {
    // horizontal leg [-a, 1] x [0, 1]; vertical leg [0, 1] x [-b, 1]
    GridDomain d;
    const double wx = a + 1.0, wy = b + 1.0;
    const double w = std::max(wx, wy);
    d.nx = std::max(8, static_cast<int>(std::lround(resolution * wx / w)));
    d.ny = std::max(8, static_cast<int>(std::lround(resolution * wy / w)));
    d.x0 = -a;
    d.y0 = -b;
    d.hx = wx / d.nx;
    d.hy = wy / d.ny;
    d.cell.assign(static_cast<std::size_t>(d.nx) * d.ny, GridDomain::Exterior);
    d.label.assign(d.cell.size(), 0);
    d.arc.assign(d.cell.size(), 0);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            const C z = d.center(i, j);
            const bool horiz = z.imag() > 0.0 && z.imag() < 1.0;
            const bool vert = z.real() > 0.0 && z.real() < 1.0;
            if (!(horiz || vert)) continue;
            std::size_t k = d.idx(i, j);
            if (i == 0 && horiz) {
                d.cell[k] = GridDomain::Boundary;
                d.label[k] = 1;
            } else if (j == 0 && vert) {
                d.cell[k] = GridDomain::Boundary;
                d.label[k] = 2;
            } else {
                d.cell[k] = GridDomain::Interior;
            }
        }
    return d;
}

namespace {

bool point_in_polygon(C p, const std::vector<C>& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const C a = poly[i], b = poly[j];
        if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
            double xint = (b.real() - a.real()) * (p.imag() - a.imag()) / (b.imag() - a.imag()) +
                          a.real();
            if (p.real() < xint) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

GridDomain make_polygon_annulus(const std::vector<C>& inner, double R, int resolution) {
    GridDomain d;
    const double span = 2.0 * R * 1.04;
    d.nx = d.ny = resolution;
    d.x0 = -span / 2.0;
    d.y0 = -span / 2.0;
    d.hx = d.hy = span / resolution;
    d.cell.assign(static_cast<std::size_t>(d.nx) * d.ny, GridDomain::Exterior);
    d.label.assign(d.cell.size(), 0);
    d.arc.assign(d.cell.size(), 0);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            std::size_t k = d.idx(i, j);
            const C z = d.center(i, j);
            if (std::abs(z) >= R) {
                d.cell[k] = GridDomain::Boundary;
                d.label[k] = 2;
            } else if (point_in_polygon(z, inner)) {
                d.cell[k] = GridDomain::Boundary;
                d.label[k] = 1;
            } else {
                d.cell[k] = GridDomain::Interior;
            }
        }
    return d;
}

GridDomain coarsen(const GridDomain& dom) {
    GridDomain d;
    d.nx = std::max(2, dom.nx / 2);
    d.ny = std::max(2, dom.ny / 2);
    d.x0 = dom.x0;
    d.y0 = dom.y0;
    d.hx = dom.hx * dom.nx / d.nx;
    d.hy = dom.hy * dom.ny / d.ny;
    d.periodic_x = dom.periodic_x;
    d.cell.assign(static_cast<std::size_t>(d.nx) * d.ny, GridDomain::Exterior);
    d.label.assign(d.cell.size(), 0);
    d.arc.assign(d.cell.size(), 0);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            // majority vote over the 2x2 block, boundary labels take priority
            int votes[3] = {0, 0, 0};
            int lbl = 0, arcid = 0;
            for (int dj = 0; dj < 2; ++dj)
                for (int di = 0; di < 2; ++di) {
                    int ii = std::min(2 * i + di, dom.nx - 1);
                    int jj = std::min(2 * j + dj, dom.ny - 1);
                    std::size_t kk = dom.idx(ii, jj);
                    votes[dom.cell[kk]]++;
                    if (dom.cell[kk] == GridDomain::Boundary && lbl == 0) {
                        lbl = dom.label[kk];
                        arcid = dom.arc[kk];
                    }
                }
            std::size_t k = d.idx(i, j);
            if (votes[GridDomain::Boundary] >= 2 ||
                (votes[GridDomain::Boundary] > 0 && votes[GridDomain::Interior] < 2)) {
                d.cell[k] = GridDomain::Boundary;
                d.label[k] = static_cast<uint8_t>(lbl);
                d.arc[k] = static_cast<uint8_t>(arcid);
            } else if (votes[GridDomain::Interior] >= 2) {
                d.cell[k] = GridDomain::Interior;
            }
        }
    return d;
}

}  // namespace renormlab
