#include "renormlab/ql_renorm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace renormlab {

namespace {

// f_c^p(w) and d/dw f_c^p(w)
inline void orbit_and_derivative(C c, C w, long long p, C& value, C& deriv) {
    C z = w, d = 1.0;
    for (long long k = 0; k < p; ++k) {
        d *= 2.0 * z;
        z = z * z + c;
    }
    value = z;
    deriv = d;
}

// Newton solve of f_c^p(w) = y from a warm start.
bool newton_point(C c, long long p, C y, C& w, double tol_abs, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        C v, d;
        orbit_and_derivative(c, w, p, v, d);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        const C r = v - y;
        if (std::abs(r) <= tol_abs) return true;
        if (std::abs(d) == 0.0) return false;
        w -= r / d;
    }
    C v, d;
    orbit_and_derivative(c, w, p, v, d);
    return std::abs(v - y) <= tol_abs;
}

double polyline_diameter(const std::vector<C>& pts) {
    // diameter of the convex hull via rotating-calipers-free O(h^2) on the hull
    std::vector<C> p = pts;
    std::sort(p.begin(), p.end(), [](C a, C b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 2) return 0.0;
    auto cross = [](C o, C a, C b) {
        return (a.real() - o.real()) * (b.imag() - o.imag()) -
               (a.imag() - o.imag()) * (b.real() - o.real());
    };
    std::vector<C> hull(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
        hull[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
        hull[k++] = p[i];
    }
    hull.resize(k - 1);
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j)
            best = std::max(best, std::abs(hull[i] - hull[j]));
    return best;
}

double hausdorff(const std::vector<C>& a, const std::vector<C>& b) {
    auto one_sided = [](const std::vector<C>& p, const std::vector<C>& q) {
        double worst = 0.0;
        for (C z : p) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < q.size(); ++i) {
                const C s0 = q[i], s1 = q[(i + 1) % q.size()];
                const C d = s1 - s0;
                const double len2 = std::norm(d);
                double t = len2 > 0 ? std::clamp(((z - s0) * std::conj(d)).real() / len2, 0.0, 1.0)
                                    : 0.0;
                best = std::min(best, std::abs(z - (s0 + t * d)));
                if (best == 0.0) break;
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

struct SingleTrace {
    std::vector<C> pts;
    int degree = 0;
    bool ok = false;
    double failed_at_theta = 0.0;
};

SingleTrace trace_once(C c, long long p, const Disk& Y, int samples, const TraceOptions& opts) {
    SingleTrace out;
    const double R = Y.radius;
    const double tol_abs = opts.newton_tol * R;

    // start point on the positive-real ray from the critical point
    C q0, d0;
    orbit_and_derivative(c, C(0, 0), p, q0, d0);
    if (!(std::abs(q0 - Y.center) < R))
        throw NumericalError("trace: critical value lies outside the outer disk");
    double t_lo = 1e-9, t_hi = 1e-9;
    C dir(1.0, 0.0);
    bool bracketed = false;
    for (double t = 1e-6; t < 1e4; t *= 1.25) {
        C v, d;
        orbit_and_derivative(c, dir * t, p, v, d);
        if (!std::isfinite(v.real()) || std::abs(v - Y.center) > R) {
            t_hi = t;
            bracketed = true;
            break;
        }
        t_lo = t;
    }
    if (!bracketed) throw NumericalError("trace: no escape along the seed ray");
    for (int it = 0; it < 200; ++it) {
        const double tm = 0.5 * (t_lo + t_hi);
        C v, d;
        orbit_and_derivative(c, dir * tm, p, v, d);
        if (std::isfinite(v.real()) && std::abs(v - Y.center) < R)
            t_lo = tm;
        else
            t_hi = tm;
        if (t_hi - t_lo < 1e-15 * std::max(1.0, t_lo)) break;
    }
    C w = dir * (0.5 * (t_lo + t_hi));
    {
        C v, d;
        orbit_and_derivative(c, w, p, v, d);
        const double theta0 = std::arg(v - Y.center);
        if (!newton_point(c, p, Y.center + std::polar(R, theta0), w, tol_abs,
                          opts.newton_max_iter))
            throw NumericalError("trace: could not project the seed onto the circle");
    }

    C v0, dd;
    orbit_and_derivative(c, w, p, v0, dd);
    const double theta0 = std::arg(v0 - Y.center);
    const C w_start = w;

    const double dtheta = 2.0 * std::numbers::pi / samples;
    out.pts.push_back(w);
    int loops = 0;
    long long steps_in_loop = 0;
    const double close_tol = 1e-6 * R;
    while (loops < opts.max_degree) {
        // one full circle in `samples` target steps with adaptive halving
        for (int k = 1; k <= samples; ++k) {
            const double th_prev = theta0 + (static_cast<double>(loops) * samples + k - 1) * dtheta;
            const double th_next = th_prev + dtheta;
            double step = dtheta;
            double th = th_prev;
            C w_prev = w;
            int halvings = 0;
            while (th < th_next - 1e-15) {
                const double th_try = std::min(th + step, th_next);
                C target = Y.center + std::polar(R, th_try);
                C w_try = w;
                // predictor along the circle tangent
                C v, d;
                orbit_and_derivative(c, w, p, v, d);
                if (std::abs(d) > 0) w_try = w + (target - v) / d;
                bool ok = newton_point(c, p, target, w_try, tol_abs, opts.newton_max_iter);
                // continuation jump guard: reject steps that teleport
                const double local = std::abs(w_try - w);
                const double scale = std::max(std::abs(w_prev) + R * 1e-3, 1e-12);
                if (!ok || local > 0.35 * scale) {
                    step *= 0.5;
                    if (++halvings > 28) {
                        out.ok = false;
                        out.failed_at_theta = th;
                        return out;
                    }
                    continue;
                }
                w = w_try;
                th = th_try;
            }
            out.pts.push_back(w);
            ++steps_in_loop;
        }
        ++loops;
        if (std::abs(w - w_start) < close_tol) break;
    }
    out.degree = loops;
    if (loops >= opts.max_degree)
        throw NumericalError("trace: preimage curve did not close (degree guard)");
    out.pts.pop_back();  // last point duplicates the start
    out.ok = true;
    (void)steps_in_loop;
    return out;
}

}  // namespace

TraceResult trace_preimage_boundary(C c, long long p, const Disk& Y, const TraceOptions& opts) {
    if (!(Y.radius > 0)) throw NumericalError("trace: outer disk radius must be positive");
    TraceResult res;
    std::vector<C> prev;
    int samples = opts.initial_samples;
    while (samples <= opts.max_samples) {
        SingleTrace t = trace_once(c, p, Y, samples, opts);
        if (!t.ok)
            throw NumericalError("trace: continuation jump at arc parameter theta=" +
                                 std::to_string(t.failed_at_theta));
        if (!prev.empty()) {
            const double diam = polyline_diameter(t.pts);
            const double hd = hausdorff(prev, t.pts);
            if (hd <= opts.hausdorff_rel_tol * std::max(diam, 1e-300)) {
                res.polyline = std::move(t.pts);
                res.degree = t.degree;
                res.trace_tol = opts.newton_tol * Y.radius;
                res.samples = samples;
                return res;
            }
        }
        prev = std::move(t.pts);
        samples *= 2;
    }
    throw NumericalError("trace: polyline failed to stabilize under refinement");
}

std::vector<double> default_radius_grid(C c, long long p) {
    C q, d;
    orbit_and_derivative(c, C(0, 0), p, q, d);
    const double scale = std::abs(q);
    if (!(scale > 0)) {
        // superattracting center: fall back to the nearest nonzero orbit scale
        C z = 0;
        double m = std::numeric_limits<double>::infinity();
        for (long long k = 0; k < p; ++k) {
            z = z * z + c;
            const double a = std::abs(z);
            if (a > 1e-300) m = std::min(m, a);
        }
        const double s = std::isfinite(m) ? m : 1.0;
        return {0.8 * s, 1.1 * s, 1.5 * s, 2.0 * s};
    }
    return {1.4 * scale, 1.8 * scale, 2.3 * scale, 2.9 * scale, 3.6 * scale, 4.4 * scale};
}

QLRestriction build_restriction(C c, long long p, const std::vector<double>& radius_grid,
                                const BuildOptions& opts) {
    if (radius_grid.empty()) throw NumericalError("build_restriction: empty radius grid");
    QLRestriction best;
    best.parameter = c;
    best.period = p;
    bool any_contained = false;
    for (double R : radius_grid) {
        Disk Y{C(0, 0), R};
        TraceResult tr;
        try {
            tr = trace_preimage_boundary(c, p, Y, opts.trace);
        } catch (const NumericalError&) {
            continue;  // candidate radius rejected
        }
        double maxr = 0.0;
        for (C w : tr.polyline) maxr = std::max(maxr, std::abs(w));
        const bool contained = maxr < R;
        if (!contained) continue;
        any_contained = true;

        auto gen = [&](int res) { return make_polygon_annulus(tr.polyline, R, res); };
        WidthEstimate est = solve_capacity(gen, opts.grid_resolution, CurveFamilySpec{{{1, 0}}, {{2, 0}}, {}},
                                           opts.capacity);
        const double modulus = est.width > 0 ? 1.0 / est.width : 0.0;
        const double cell = 2.0 * R * 1.04 / opts.grid_resolution;
        const bool pinch = maxr > R - 2.0 * cell;
        if (modulus > best.modulus_estimate) {
            best.outer = Y;
            best.inner_boundary = tr.polyline;
            best.containment_ok = true;
            best.degree = tr.degree;
            best.pinch_flag = pinch;
            best.modulus_estimate = modulus;
            best.width = est;
        }
    }
    if (!any_contained)
        throw NumericalError("build_restriction: no candidate with containment "
                             "(combinatorially too large disk)");
    return best;
}

namespace {

C limit_parameter(const ComboWord& word, const AprioriOptions& opts) {
    auto recs = cascade(word, opts.cascade_levels, opts.cascade);
    return extrapolate_limit(recs, 1e-6);
}

}  // namespace

BoundsReport apriori_report(const ComboWord& word, int levels, const AprioriOptions& opts) {
    BoundsReport rep;
    rep.parameter = limit_parameter(word, opts);
    for (int n = 1; n <= levels; ++n) {
        const long long p = word.period_at(n);
        try {
            auto grid = default_radius_grid(rep.parameter, p);
            QLRestriction r = build_restriction(rep.parameter, p, grid, opts.build);
            rep.rows.push_back({n, p, r.outer.radius, r.modulus_estimate, r.pinch_flag});
        } catch (const NumericalError& e) {
            throw NumericalError("apriori level " + std::to_string(n) + ": " + e.what());
        }
    }
    return rep;
}

ScalingEstimate dynamical_scaling(const ComboWord& word, int levels, const AprioriOptions& opts) {
    ScalingEstimate est;
    const C c = limit_parameter(word, opts);
    // fixed radius multiplier across levels so the diameter ratios estimate the
    // universal factor rather than the radius schedule
    const double mult = 2.0;
    std::vector<C> reference;  // one marked vertex per level for complex ratios
    for (int n = 1; n <= levels; ++n) {
        const long long p = word.period_at(n);
        C q, d;
        orbit_and_derivative(c, C(0, 0), p, q, d);
        const double R = mult * std::abs(q);
        TraceResult tr = trace_preimage_boundary(c, p, Disk{C(0, 0), R}, opts.build.trace);
        est.diameters.push_back(polyline_diameter(tr.polyline));
        reference.push_back(q);
    }
    for (int n = 0; n + 1 < levels; ++n) {
        // complex ratio from the marked orbit points, magnitude from diameters
        const C dir = reference[n] / reference[n + 1];
        const double mag = est.diameters[n] / est.diameters[n + 1];
        est.ratios.push_back(std::polar(mag, std::arg(dir)));
    }
    if (est.ratios.size() >= 3) {
        const C a = est.ratios[est.ratios.size() - 3];
        const C b = est.ratios[est.ratios.size() - 2];
        const C cc = est.ratios[est.ratios.size() - 1];
        const C d2 = (cc - b) - (b - a);
        est.accelerated = std::abs(d2) > 0 ? cc - (cc - b) * (cc - b) / d2 : cc;
    } else if (!est.ratios.empty()) {
        est.accelerated = est.ratios.back();
    }
    return est;
}

Raster render(RenderKind kind, const RenderWindow& window, const RenderOptions& opts) {
    if (static_cast<long long>(opts.size) * opts.size > 8192LL * 8192LL)
        throw NumericalError("render: size exceeds 8192^2");
    Raster r;
    r.width = r.height = opts.size;
    r.window = window;
    r.max_iter = opts.max_iter;
    r.samples.assign(static_cast<std::size_t>(opts.size) * opts.size, 0);
    const double step = window.width / opts.size;
    const C ex = std::polar(step, window.rotation);
    const C ey = std::polar(step, window.rotation + std::numbers::pi / 2.0);
    const double esc2 = opts.escape_radius * opts.escape_radius;
    for (int j = 0; j < opts.size; ++j) {
        for (int i = 0; i < opts.size; ++i) {
            const C z0 = window.center + (i - opts.size / 2 + 0.5) * ex +
                         (j - opts.size / 2 + 0.5) * ey;
            C z, c;
            if (kind == RenderKind::Mandelbrot) {
                c = z0;
                z = C(0, 0);
            } else {
                c = opts.julia_parameter;
                z = z0;
            }
            int count = opts.max_iter;
            for (int it = 0; it < opts.max_iter; ++it) {
                if (std::norm(z) > esc2) {
                    count = it;
                    break;
                }
                z = z * z + c;
            }
            r.samples[static_cast<std::size_t>(j) * opts.size + i] =
                static_cast<uint16_t>(std::min(count, 65535));
        }
    }
    return r;
}

double raster_similarity(const Raster& a, const Raster& b) {
    if (a.samples.size() != b.samples.size() || a.samples.empty())
        throw NumericalError("raster_similarity: incompatible frames");
    auto stats = [](const Raster& r) {
        double mean = 0;
        for (auto v : r.samples) mean += v;
        mean /= r.samples.size();
        double var = 0;
        for (auto v : r.samples) var += (v - mean) * (v - mean);
        var /= r.samples.size();
        return std::pair<double, double>(mean, std::sqrt(std::max(var, 1e-30)));
    };
    auto [ma, sa] = stats(a);
    auto [mb, sb] = stats(b);
    double acc = 0;
    for (std::size_t k = 0; k < a.samples.size(); ++k)
        acc += (a.samples[k] - ma) * (b.samples[k] - mb);
    return acc / (a.samples.size() * sa * sb);
}

double estimate_zoom_ratio(C center, double width, double guess, const RenderOptions& opts,
                           int scan_points, double scan_span) {
    RenderWindow w0{center, width, 0.0};
    Raster base = render(RenderKind::Mandelbrot, w0, opts);
    double best_ratio = guess, best_corr = -2.0;
    for (int k = 0; k < scan_points; ++k) {
        const double f = 1.0 - scan_span + 2.0 * scan_span * k / (scan_points - 1);
        const double ratio = guess * f;
        RenderWindow wz{center, width / ratio, 0.0};
        Raster zoom = render(RenderKind::Mandelbrot, wz, opts);
        const double corr = raster_similarity(base, zoom);
        if (corr > best_corr) {
            best_corr = corr;
            best_ratio = ratio;
        }
    }
    return best_ratio;
}

}  // namespace renormlab
