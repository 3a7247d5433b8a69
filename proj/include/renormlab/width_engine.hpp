#pragma once

#include "renormlab/types.hpp"

#include <functional>

namespace renormlab {

struct Polyline {
    std::vector<C> pts;
};

// Rasterized multiply-connected planar domain. Cells are exterior, interior,
// or boundary; boundary cells carry a component label (1..K) and an optional
// arc sub-label partitioning that component's cells.
struct GridDomain {
    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0;  // world position of the (0,0) cell corner
    double hx = 0.0, hy = 0.0;  // cell sizes
    bool periodic_x = false;

    enum Cell : uint8_t { Exterior = 0, Interior = 1, Boundary = 2 };
    std::vector<uint8_t> cell;
    std::vector<uint8_t> label;  // component id for boundary cells, 0 otherwise
    std::vector<uint8_t> arc;    // arc id within the component, 0 = unpartitioned

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    C center(int i, int j) const { return {x0 + (i + 0.5) * hx, y0 + (j + 0.5) * hy}; }
    std::vector<int> labels_present() const;
    void validate() const;  // interior 4-connected, labels nonempty
};

// Boundary selector: a component label plus an optional arc restriction.
struct BoundarySel {
    int component = 0;
    int arc = 0;  // 0 = whole component
};

struct CurveFamilySpec {
    std::vector<BoundarySel> source;
    std::vector<BoundarySel> sink;
    std::vector<Polyline> slits;  // insulating cuts fixing the homotopy class
};

struct WidthEstimate {
    double width = 0.0;    // Richardson-extrapolated capacity
    double modulus = 0.0;  // 1/width (inf when width is 0)
    double width_fine = 0.0;
    double width_coarse = 0.0;
    double error_indicator = 0.0;
    std::vector<int> resolutions_used;
    bool disconnected = false;
};

// Geometry source: produces the same world geometry rasterized at a requested
// resolution (cells across the longer axis).
using DomainGenerator = std::function<GridDomain(int)>;

struct CapacityOptions {
    double rel_tol = 1e-10;
    int max_iter_factor = 20;  // CG iteration cap = factor * unknowns
};

// (sum v_i^{-1})^{-1}; zero if any value is zero; throws on negatives/empty.
double harmonic_sum(const std::vector<double>& values);

// Single-grid five-point capacity (exposed for tests and supports).
double capacity_single(const GridDomain& dom, const CurveFamilySpec& spec,
                       const CapacityOptions& opts = {});

// Capacity with Richardson extrapolation over fine and half resolutions.
WidthEstimate solve_capacity(const DomainGenerator& gen, int fine_resolution,
                             const CurveFamilySpec& spec, const CapacityOptions& opts = {});

// Convenience overload: coarsens the concrete grid by cell merging.
WidthEstimate solve_capacity(const GridDomain& dom, const CurveFamilySpec& spec,
                             const CapacityOptions& opts = {});

// slack = harmonic_sum(parts) - W(F); the contract is slack >= -tolerance when
// F overflows the disjointly-supported parts.
double grotzsch_check(const WidthEstimate& full, const std::vector<WidthEstimate>& parts);

struct ArcCandidate {
    std::string name;
    int comp_a = 0, comp_b = 0;
    CurveFamilySpec spec;
};

struct WadEntry {
    std::string name;
    int comp_a = 0, comp_b = 0;
    double weight = 0.0;     // max(width - 2, 0)
    double raw_width = 0.0;  // capacity before the buffer trim
};

struct WeightedArcDiagramNum {
    std::vector<WadEntry> entries;
    int outer_label = 1;
};

struct ThinThickOptions {
    CapacityOptions capacity;
    double buffer_trim = 2.0;
    bool check_disjoint_supports = true;
};

WeightedArcDiagramNum thin_thick(const DomainGenerator& gen, int fine_resolution,
                                 const std::vector<ArcCandidate>& candidates, double threshold,
                                 int outer_label, const ThinThickOptions& opts = {});

// (total, vertical): adjacent weights with self-arcs doubled; vertical = arcs
// touching the outer boundary.
std::pair<double, double> local_width(const WeightedArcDiagramNum& wad, int component);

// Width of the peripheral family of `component` (curves to every other label).
WidthEstimate local_weight(const DomainGenerator& gen, int fine_resolution, int component,
                           const std::vector<int>& all_labels, const CapacityOptions& opts = {});

// --- bundled fixture geometry -------------------------------------------------

GridDomain make_rectangle(double width, double height, int resolution);
// section [x_lo, x_hi] of a unit-height channel, plates at the section ends
GridDomain make_channel_section(double x_lo, double x_hi, double height,
                                const std::vector<Polyline>& slits, int resolution);
GridDomain make_annulus_cartesian(double r_inner, double r_outer, int resolution);
// log-polar chart of a round annulus (faithful when r_outer/r_inner is large)
GridDomain make_annulus_logpolar(double r_inner, double r_outer, int resolution);

struct Hole {
    C center;
    double radius = 0.0;
};
// disk of radius R at the origin minus round holes; outer label 1, holes 2..
GridDomain make_disk_with_holes(double R, const std::vector<Hole>& holes, int resolution);
// L-shaped hexagon: unit-width legs of lengths a (west) and b (south) joined
// at a unit corner square; plates on the two far ends (labels 1 and 2)
GridDomain make_lshape(double a, double b, int resolution);
// disk of radius R minus the region enclosed by a closed polyline around 0;
// inner label 1 (source), outer label 2
GridDomain make_polygon_annulus(const std::vector<C>& inner, double R, int resolution);

GridDomain coarsen(const GridDomain& dom);

// PGM (P5) mask + sidecar JSON with the color legend.
void save_domain(const GridDomain& dom, const std::string& path_base);
GridDomain load_domain(const std::string& path_base);

}  // namespace renormlab
