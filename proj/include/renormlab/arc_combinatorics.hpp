#pragma once

#include "renormlab/types.hpp"

#include <array>
#include <memory>

namespace renormlab {

// Combinatorial Hubbard-tree model of a superattracting polynomial: Markov
// tree map with a single folding vertex and marked bush subtrees permuted
// cyclically.
struct HubbardTree {
    std::string name;
    std::vector<std::string> vertex_names;
    std::vector<std::array<int, 2>> edges;
    std::vector<int> sigma;                       // vertex -> vertex
    std::vector<std::vector<int>> edge_paths;     // edge -> image vertex path
    int critical = -1;
    std::vector<std::vector<int>> bushes;         // disjoint connected vertex sets
    std::vector<int> cyclic_order;                // bush ids around alpha; empty if primitive
    int alpha = -1;                               // satellite hub vertex, -1 if none
    int p1 = 0;                                   // level-1 period (= bush count)
    int p2 = 0;                                   // level-2 period, 0 if not modeled

    struct ArcSpec {
        std::string name;
        int bush_a = 0, bush_b = 0;
    };
    std::vector<ArcSpec> diagram;  // the invariant arc diagram of the model

    int n_vertices() const { return static_cast<int>(sigma.size()); }
    bool is_satellite() const { return !cyclic_order.empty(); }
    int bush_of_vertex(int v) const;  // -1 if not in a bush

    // unique reduced path between the two bush subtrees, touching them only at
    // its endpoints; throws if no such path exists
    std::vector<int> arc_geodesic(int bush_a, int bush_b) const;

    void validate() const;
    static HubbardTree from_json(const std::string& text);
    std::string to_json() const;
};

struct ArcRef {
    int bush_a = 0, bush_b = 0;
};

// Iterated preimage tree f^{-m}(T) built level by level (cut at the critical
// value, glue two sheets at the critical point), with the base tree embedded
// and the bush-lift components tagged.
class PreimageTree {
  public:
    PreimageTree(const HubbardTree& base, int m);

    static constexpr int kMaxDepth = 12;  // size guard: <= 2^m copies

    struct Component {
        int image_bush = -1;  // level-0 bush the component projects into
        bool periodic = false;
        int preperiod = 0;  // 0 for periodic lifts
        std::vector<int> vertices;
    };

    int depth() const { return m_; }
    const HubbardTree& base() const { return *base_; }
    long long vertex_count() const;
    long long edge_count() const;
    int lift_count_of_base_edge(int base_edge) const;  // = 2^m for every edge

    const std::vector<Component>& components() const { return comps_; }
    int component_of_vertex(int v) const { return comp_of_vertex_[v]; }
    int periodic_component_of_bush(int bush) const;  // unique periodic lift
    int located_vertex(int base_vertex) const;       // embedding of the base
    int located_alpha() const;

    // smallest r >= 0 with f^r(vertex) = critical point, or -1
    int critical_lift_depth(int v) const;

    // projection of a top-level vertex path to the base, reduced
    std::vector<int> project_to_base(const std::vector<int>& path) const;

    // composite projection by one level (functoriality checks)
    bool functorial() const;

    // tree structure at the top level
    const std::vector<std::array<int, 2>>& top_edges() const;
    const std::vector<std::vector<std::pair<int, int>>>& top_adjacency() const;

    // reduced bridge between two components, touching them only at endpoints;
    // empty if the bridge passes through a third component
    std::vector<int> clean_bridge(int comp_a, int comp_b) const;

    // geodesic between two components, free to cross other components
    std::vector<int> geodesic_between(int comp_a, int comp_b) const;

    // components visible from comp (bridge hits no third component), with the
    // connecting paths
    std::vector<std::pair<int, std::vector<int>>> visible_components(int comp) const;

    // does the top-level path project-reduce onto an arc of the base diagram
    bool path_lifts_diagram_arc(const std::vector<int>& path) const;

  private:
    struct Level;
    const HubbardTree* base_;
    int m_ = 0;
    std::vector<std::shared_ptr<Level>> levels_;
    std::vector<Component> comps_;
    std::vector<int> comp_of_vertex_;

    void extend();
    void tag_components();
    friend PreimageTree pullback_tree(const HubbardTree&, int);
};

PreimageTree pullback_tree(const HubbardTree& tree, int m);

struct Decomposition {
    int connecting = 0;
    int trivial_pieces = 0;
    bool absorbed = false;  // the whole arc lies in one preimage bush
};

// Cuts the arc's geodesic along the preimage-bush components.
Decomposition decompose_rel(const HubbardTree& tree, ArcRef arc, const PreimageTree& pre);

// Minimal number of diagram-arc lifts a presentation of the arc must travel
// through rel the level-m preimage bushes (EN = 1 for m = 0).
int expansivity_number(const HubbardTree& tree, ArcRef arc, int m);

// Independent oracle: exhaustive lift enumeration over component pairs plus a
// shortest-chain search.
int expansivity_number_bruteforce(const HubbardTree& tree, ArcRef arc, int m);

// EN(f^m) = 1 for all m <= horizon, cross-validated against the structural
// characterization (cyclically neighboring bushes of a satellite flower);
// throws on mismatch.
bool is_genuine_periodic(const HubbardTree& tree, ArcRef arc, int horizon);

struct FlowerProbe {
    int alpha_vertex = -1;
    std::vector<int> cyclic_bushes;
    int preperiod_bound = 0;  // 6 p2 when level-2 data is present
    bool searched_lifts = false;
    bool separating_lifts_found = false;
    int search_depth = 0;
    std::vector<int> ell1, ell2;  // vertex paths at the search depth
    int crit_lift_depth_1 = -1, crit_lift_depth_2 = -1;
};

// Identifies the flower (alpha vertex, cyclic order) and, for doubling models
// with level-2 data, exhibits two disjoint separating lifts through distinct
// critical lifts inside the unfolded tree.
FlowerProbe satellite_flower_probe(const HubbardTree& tree);

// Bundled tree models by name; throws IoError for unknown names.
const std::vector<std::string>& bundled_tree_names();
HubbardTree bundled_tree(const std::string& name);

}  // namespace renormlab
