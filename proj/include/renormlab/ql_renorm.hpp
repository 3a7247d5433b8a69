#pragma once

#include "renormlab/param_plane.hpp"
#include "renormlab/types.hpp"
#include "renormlab/width_engine.hpp"

namespace renormlab {

struct Disk {
    C center{};
    double radius = 0.0;
};

struct TraceOptions {
    int initial_samples = 512;
    int max_samples = 1 << 14;
    double hausdorff_rel_tol = 2e-3;  // relative to the curve diameter
    double newton_tol = 1e-12;        // relative to the disk radius
    int newton_max_iter = 24;
    int max_degree = 64;
};

struct TraceResult {
    std::vector<C> polyline;  // closed: last point joins the first
    int degree = 0;           // number of outer-circle loops before closure
    double trace_tol = 0.0;
    int samples = 0;
};

// Component of f_c^{-p}(boundary of Y) around 0 by Newton continuation along a
// uniform sampling of the circle, doubling the sample count until the polyline
// is Hausdorff-stable.
TraceResult trace_preimage_boundary(C c, long long p, const Disk& Y,
                                    const TraceOptions& opts = {});

struct QLRestriction {
    C parameter{};
    long long period = 0;
    Disk outer;
    std::vector<C> inner_boundary;
    bool containment_ok = false;
    int degree = 0;
    bool pinch_flag = false;  // inner curve within 2 grid cells of the outer circle
    double modulus_estimate = 0.0;
    WidthEstimate width;
};

struct BuildOptions {
    TraceOptions trace;
    int grid_resolution = 512;
    CapacityOptions capacity;
};

// Maximizes the annulus modulus over the candidate radii; realizes the germ
// supremum at fixed (round, centered) disk shape.
QLRestriction build_restriction(C c, long long p, const std::vector<double>& radius_grid,
                                const BuildOptions& opts = {});

std::vector<double> default_radius_grid(C c, long long p);

struct BoundsRow {
    int level = 0;
    long long period = 0;
    double radius = 0.0;
    double modulus = 0.0;
    bool pinch_flag = false;
};

struct BoundsReport {
    std::vector<BoundsRow> rows;
    C parameter{};
};

struct AprioriOptions {
    BuildOptions build;
    CascadeOptions cascade;
    int cascade_levels = 12;  // depth used to extrapolate the limit parameter
};

BoundsReport apriori_report(const ComboWord& word, int levels, const AprioriOptions& opts = {});

struct ScalingEstimate {
    std::vector<double> diameters;  // per level
    std::vector<C> ratios;          // diam_n / diam_{n+1}
    C accelerated{};                // Aitken-accelerated limit of the ratios
};

// Ratios of successive traced-inner-boundary diameters at a fixed radius
// multiplier; converges to the universal spatial factor for doubling words.
ScalingEstimate dynamical_scaling(const ComboWord& word, int levels,
                                  const AprioriOptions& opts = {});

enum class RenderKind { Mandelbrot, Julia };

struct RenderWindow {
    C center{};
    double width = 4.0;   // world width of the frame
    double rotation = 0;  // radians, frame basis rotation
};

struct Raster {
    int width = 0, height = 0;
    RenderWindow window;
    int max_iter = 0;
    std::vector<uint16_t> samples;  // escape counts; max_iter = interior
};

struct RenderOptions {
    int size = 512;
    int max_iter = 1000;
    C julia_parameter{};
    double escape_radius = 4.0;
};

Raster render(RenderKind kind, const RenderWindow& window, const RenderOptions& opts);

// Normalized cross-correlation of z-scored escape counts (frame similarity).
double raster_similarity(const Raster& a, const Raster& b);

// Scans candidate ratios around `guess` for the zoom factor that maximizes the
// similarity between a frame of width w and one of width w/ratio.
double estimate_zoom_ratio(C center, double width, double guess, const RenderOptions& opts,
                           int scan_points = 21, double scan_span = 0.3);

}  // namespace renormlab
