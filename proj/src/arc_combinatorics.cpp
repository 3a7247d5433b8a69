#include "renormlab/arc_combinatorics.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace renormlab {

namespace {

std::vector<std::vector<std::pair<int, int>>> build_adjacency(
    int n, const std::vector<std::array<int, 2>>& edges) {
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        adj[edges[e][0]].emplace_back(edges[e][1], static_cast<int>(e));
        adj[edges[e][1]].emplace_back(edges[e][0], static_cast<int>(e));
    }
    return adj;
}

// cancel immediate backtracks v,w,v
std::vector<int> reduce_walk(const std::vector<int>& walk) {
    std::vector<int> out;
    for (int v : walk) {
        if (out.size() >= 2 && out[out.size() - 2] == v)
            out.pop_back();
        else
            out.push_back(v);
    }
    return out;
}

}  // namespace

int HubbardTree::bush_of_vertex(int v) const {
    for (std::size_t b = 0; b < bushes.size(); ++b)
        for (int x : bushes[b])
            if (x == v) return static_cast<int>(b);
    return -1;
}

std::vector<int> HubbardTree::arc_geodesic(int bush_a, int bush_b) const {
    if (bush_a < 0 || bush_b < 0 || bush_a >= static_cast<int>(bushes.size()) ||
        bush_b >= static_cast<int>(bushes.size()) || bush_a == bush_b)
        throw NumericalError("arc_geodesic: invalid bush pair");
    auto adj = build_adjacency(n_vertices(), edges);
    std::vector<int> parent(n_vertices(), -2);
    std::queue<int> q;
    for (int v : bushes[bush_a]) {
        parent[v] = -1;
        q.push(v);
    }
    std::set<int> target(bushes[bush_b].begin(), bushes[bush_b].end());
    int hit = -1;
    while (!q.empty() && hit < 0) {
        int v = q.front();
        q.pop();
        for (auto [w, e] : adj[v]) {
            if (parent[w] != -2) continue;
            parent[w] = v;
            if (target.count(w)) {
                hit = w;
                break;
            }
            q.push(w);
        }
    }
    if (hit < 0) throw NumericalError("arc_geodesic: bushes are not connected in the tree");
    std::vector<int> path;
    for (int v = hit; v != -1; v = parent[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    // the bridge touches the bushes only at its endpoints
    for (std::size_t i = 1; i + 1 < path.size(); ++i)
        if (bush_of_vertex(path[i]) >= 0)
            throw NumericalError("arc_geodesic: path crosses a bush interiorly");
    return path;
}

void HubbardTree::validate() const {
    const int n = n_vertices();
    if (n < 2) throw NumericalError("tree: too few vertices");
    if (static_cast<int>(edges.size()) != n - 1)
        throw NumericalError("tree: edge count must be vertex count - 1");
    auto adj = build_adjacency(n, edges);
    // connectivity
    std::vector<uint8_t> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        ++reached;
        for (auto [w, e] : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                q.push(w);
            }
    }
    if (reached != n) throw NumericalError("tree: not connected");
    if (critical < 0 || critical >= n) throw NumericalError("tree: missing critical vertex");
    for (int v = 0; v < n; ++v)
        if (sigma[v] < 0 || sigma[v] >= n) throw NumericalError("tree: sigma out of range");
    if (edge_paths.size() != edges.size()) throw NumericalError("tree: edge_paths size mismatch");
    const int w_star = sigma[critical];
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& p = edge_paths[e];
        if (p.size() < 2) throw NumericalError("tree: empty edge image path");
        if (p.front() != sigma[edges[e][0]] || p.back() != sigma[edges[e][1]])
            throw NumericalError("tree: edge path endpoints disagree with sigma");
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            bool ok = false;
            for (auto [w, ee] : adj[p[i]])
                if (w == p[i + 1]) ok = true;
            if (!ok) throw NumericalError("tree: edge path not a walk");
            if (i + 2 < p.size() && p[i] == p[i + 2])
                throw NumericalError("tree: edge path backtracks");
        }
        for (std::size_t i = 1; i + 1 < p.size(); ++i)
            if (p[i] == w_star)
                throw NumericalError(
                    "tree: an edge image crosses the critical value interiorly (unsupported)");
    }
    if (bushes.empty()) throw NumericalError("tree: no bushes");
    std::set<int> all_bush;
    for (const auto& b : bushes) {
        if (b.empty()) throw NumericalError("tree: empty bush");
        for (int v : b) {
            if (v < 0 || v >= n) throw NumericalError("tree: bush vertex out of range");
            if (!all_bush.insert(v).second) throw NumericalError("tree: bushes overlap");
        }
        // connectivity of the bush subtree
        std::set<int> bs(b.begin(), b.end());
        std::queue<int> bq;
        bq.push(b[0]);
        std::set<int> bseen{b[0]};
        while (!bq.empty()) {
            int v = bq.front();
            bq.pop();
            for (auto [w, e] : adj[v])
                if (bs.count(w) && !bseen.count(w)) {
                    bseen.insert(w);
                    bq.push(w);
                }
        }
        if (bseen.size() != bs.size()) throw NumericalError("tree: bush not connected");
    }
    const int p = static_cast<int>(bushes.size());
    for (int b = 0; b < p; ++b) {
        std::set<int> next(bushes[(b + 1) % p].begin(), bushes[(b + 1) % p].end());
        for (int v : bushes[b])
            if (!next.count(sigma[v]))
                throw NumericalError("tree: sigma does not permute the bushes cyclically");
    }
    if (is_satellite()) {
        if (static_cast<int>(cyclic_order.size()) != p)
            throw NumericalError("tree: cyclic order size mismatch");
        if (alpha < 0 || sigma[alpha] != alpha)
            throw NumericalError("tree: satellite model needs a fixed alpha vertex");
    }
    for (const auto& a : diagram) (void)arc_geodesic(a.bush_a, a.bush_b);
}

HubbardTree HubbardTree::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("tree fixture JSON: ") + e.what());
    }
    HubbardTree t;
    try {
        t.name = j.value("name", "");
        t.vertex_names = j.value("vertices", std::vector<std::string>{});
        for (const auto& e : j.at("edges")) t.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        t.sigma = j.at("sigma").get<std::vector<int>>();
        t.edge_paths = j.at("edge_paths").get<std::vector<std::vector<int>>>();
        t.critical = j.at("critical").get<int>();
        t.bushes = j.at("bushes").get<std::vector<std::vector<int>>>();
        t.cyclic_order = j.value("cyclic_order", std::vector<int>{});
        t.alpha = j.value("alpha", -1);
        t.p1 = j.value("p1", static_cast<int>(t.bushes.size()));
        t.p2 = j.value("p2", 0);
        if (j.contains("diagram"))
            for (const auto& a : j["diagram"])
                t.diagram.push_back({a.value("name", ""), a.at("a").get<int>(), a.at("b").get<int>()});
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("tree fixture JSON: ") + e.what());
    }
    if (t.vertex_names.empty())
        for (std::size_t i = 0; i < t.sigma.size(); ++i)
            t.vertex_names.push_back("v" + std::to_string(i));
    t.validate();
    return t;
}

std::string HubbardTree::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["vertices"] = vertex_names;
    nlohmann::json es = nlohmann::json::array();
    for (auto& e : edges) es.push_back({e[0], e[1]});
    j["edges"] = es;
    j["sigma"] = sigma;
    j["edge_paths"] = edge_paths;
    j["critical"] = critical;
    j["bushes"] = bushes;
    j["cyclic_order"] = cyclic_order;
    j["alpha"] = alpha;
    j["p1"] = p1;
    j["p2"] = p2;
    nlohmann::json d = nlohmann::json::array();
    for (auto& a : diagram) d.push_back({{"name", a.name}, {"a", a.bush_a}, {"b", a.bush_b}});
    j["diagram"] = d;
    return j.dump(2) + "\n";
}

// --- preimage tower -------------------------------------------------------------

struct PreimageTree::Level {
    int n_vertices = 0;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::vector<std::pair<int, int>>> adj;  // vertex -> (nbr, edge)
    std::vector<int> vproj, eproj;                      // into the previous level
    std::vector<int> embed_v;                           // previous vertex -> here
    std::vector<std::vector<int>> fpath;                // edge -> image path (this level)
    int loc_crit = -1, loc_critval = -1;
    std::vector<int> located_base;                      // base vertex -> here
    std::vector<int> crit_depth;                        // per vertex, -1 if none

    void finish_adjacency() { adj = build_adjacency(n_vertices, edges); }
};

PreimageTree::PreimageTree(const HubbardTree& base, int m) : base_(&base), m_(0) {
    if (m < 0 || m > kMaxDepth)
        throw NumericalError("pullback_tree: depth must be in [0, " +
                             std::to_string(kMaxDepth) + "] (size guard)");
    base.validate();
    auto l0 = std::make_shared<Level>();
    l0->n_vertices = base.n_vertices();
    l0->edges = base.edges;
    l0->finish_adjacency();
    l0->fpath = base.edge_paths;
    l0->loc_crit = base.critical;
    l0->loc_critval = base.sigma[base.critical];
    l0->located_base.resize(base.n_vertices());
    for (int v = 0; v < base.n_vertices(); ++v) l0->located_base[v] = v;
    l0->crit_depth.assign(base.n_vertices(), -1);
    l0->crit_depth[base.critical] = 0;
    levels_.push_back(std::move(l0));
    for (int k = 0; k < m; ++k) extend();
    tag_components();
}

void PreimageTree::extend() {
    const Level& prev = *levels_.back();
    auto next = std::make_shared<Level>();
    Level& nl = *next;

    const int cv = prev.loc_critval;
    // pieces of prev minus cv
    std::vector<int> piece(prev.n_vertices, -1);
    int n_pieces = 0;
    for (int v = 0; v < prev.n_vertices; ++v) {
        if (v == cv || piece[v] >= 0) continue;
        std::queue<int> q;
        q.push(v);
        piece[v] = n_pieces;
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            for (auto [w, e] : prev.adj[x])
                if (w != cv && piece[w] < 0) {
                    piece[w] = n_pieces;
                    q.push(w);
                }
        }
        ++n_pieces;
    }
    auto piece_of_edge = [&](int e) {
        int a = prev.edges[e][0], b = prev.edges[e][1];
        return a == cv ? piece[b] : piece[a];
    };

    // vertices: glue X* = 0, then (sheet, vertex) for vertex != cv
    nl.n_vertices = 1 + 2 * (prev.n_vertices - 1);
    nl.vproj.assign(nl.n_vertices, -1);
    nl.vproj[0] = cv;
    std::vector<std::array<int, 2>> lift_v(prev.n_vertices, {-1, -1});  // per sheet
    {
        int id = 1;
        for (int v = 0; v < prev.n_vertices; ++v) {
            if (v == cv) continue;
            for (int s = 0; s < 2; ++s) {
                lift_v[v][s] = id;
                nl.vproj[id] = v;
                ++id;
            }
        }
    }
    auto lifted = [&](int v, int s) { return v == cv ? 0 : lift_v[v][s]; };

    nl.edges.reserve(2 * prev.edges.size());
    nl.eproj.reserve(2 * prev.edges.size());
    for (std::size_t e = 0; e < prev.edges.size(); ++e) {
        for (int s = 0; s < 2; ++s) {
            nl.edges.push_back({lifted(prev.edges[e][0], s), lifted(prev.edges[e][1], s)});
            nl.eproj.push_back(static_cast<int>(e));
        }
    }
    nl.finish_adjacency();

    // --- embedding of prev: BFS from the critical point ---
    nl.embed_v.assign(prev.n_vertices, -1);
    nl.embed_v[prev.loc_crit] = 0;  // iota(critical) = X*
    std::vector<std::vector<int>> embed_path(prev.edges.size());

    // sheet assignment for departures from X*: per directed base edge at cv
    std::map<int, int> departures;  // prev edge id at cv -> next sheet

    // find the lift edge at `at` over the directed prev edge (a -> b)
    auto lift_step = [&](int at, int a, int b) -> std::pair<int, int> {
        int target_e = -1;
        for (auto [w, e] : prev.adj[a])
            if (w == b) target_e = e;
        if (target_e < 0) throw NumericalError("pullback: image path is not a walk");
        std::vector<std::pair<int, int>> hits;  // (edge id here, far vertex)
        for (auto [w, e] : nl.adj[at])
            if (nl.eproj[e] == target_e) hits.emplace_back(e, w);
        if (hits.empty()) throw NumericalError("pullback: missing lifted edge");
        if (hits.size() == 1 || at != 0) return hits[0];
        // departure from X*: alternate sheets per base direction
        int& cnt = departures[target_e];
        if (cnt > 1)
            throw NumericalError("pullback: more than two sheets requested at the fold (edge " +
                                 std::to_string(target_e) + " from " + std::to_string(a) +
                                 " to " + std::to_string(b) + ")");
        // hits are ordered by sheet construction order
        std::sort(hits.begin(), hits.end());
        auto pick = hits[cnt];
        ++cnt;
        return pick;
    };

    if (std::getenv("RENORMLAB_DEBUG_TOWER")) {
        std::fprintf(stderr, "level %zu: loc_crit=%d (deg %zu) loc_critval=%d (deg %zu)\n",
                     levels_.size() - 1, prev.loc_crit, prev.adj[prev.loc_crit].size(),
                     prev.loc_critval, prev.adj[prev.loc_critval].size());
        for (auto [w, e] : prev.adj[prev.loc_crit]) {
            std::fprintf(stderr, "  crit-edge %d -> %d (eproj %d): fpath:", prev.loc_crit, w,
                         prev.eproj.empty() ? -1 : prev.eproj[e]);
            std::vector<int> img = prev.fpath[e];
            if (prev.edges[e][0] != prev.loc_crit) std::reverse(img.begin(), img.end());
            for (int v : img) std::fprintf(stderr, " %d", v);
            std::fprintf(stderr, "\n");
        }
    }

    std::queue<int> bfs;
    bfs.push(prev.loc_crit);
    std::vector<uint8_t> visited(prev.n_vertices, 0);
    std::vector<uint8_t> edge_done(prev.edges.size(), 0);
    visited[prev.loc_crit] = 1;
    while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop();
        for (auto [v, e] : prev.adj[u]) {
            if (edge_done[e]) continue;
            edge_done[e] = 1;
            // embed edge e walking from u to v
            const auto& path = prev.fpath[e];
            std::vector<int> img(path);
            if (prev.edges[e][0] != u) std::reverse(img.begin(), img.end());
            std::vector<int> lifted_path{nl.embed_v[u]};
            int at = nl.embed_v[u];
            for (std::size_t t = 0; t + 1 < img.size(); ++t) {
                auto [le, far] = lift_step(at, img[t], img[t + 1]);
                (void)le;
                at = far;
                lifted_path.push_back(at);
            }
            if (nl.embed_v[v] == -1) {
                nl.embed_v[v] = at;
            } else if (nl.embed_v[v] != at) {
                throw NumericalError("pullback: inconsistent embedding (invalid fixture)");
            }
            if (prev.edges[e][0] != u) std::reverse(lifted_path.begin(), lifted_path.end());
            embed_path[e] = std::move(lifted_path);
            if (!visited[v]) {
                visited[v] = 1;
                bfs.push(v);
            }
        }
    }

    // dynamics on the new level: fpath over each new edge = embedded image of
    // its projection, oriented to match the new edge's endpoints
    nl.fpath.resize(nl.edges.size());
    for (std::size_t e = 0; e < nl.edges.size(); ++e) {
        const int ep = nl.eproj[e];
        std::vector<int> p = embed_path[ep];
        // orient: path must run from image(endpoint0) to image(endpoint1)
        const int a_prev = nl.vproj[nl.edges[e][0]];
        if (prev.edges[ep][0] != a_prev) std::reverse(p.begin(), p.end());
        nl.fpath[e] = std::move(p);
    }

    nl.loc_crit = 0;  // X* is the critical point's location
    nl.loc_critval = nl.embed_v[prev.loc_critval];
    nl.located_base.resize(base_->n_vertices());
    for (int v = 0; v < base_->n_vertices(); ++v)
        nl.located_base[v] = nl.embed_v[prev.located_base[v]];

    nl.crit_depth.assign(nl.n_vertices, -1);
    for (int v = 0; v < nl.n_vertices; ++v) {
        if (v == nl.loc_crit) {
            nl.crit_depth[v] = 0;
            continue;
        }
        const int d = prev.crit_depth[nl.vproj[v]];
        if (d >= 0) nl.crit_depth[v] = d + 1;
    }

    levels_.push_back(std::move(next));
    ++m_;
}

namespace {

struct LiftSets {
    std::vector<uint8_t> v_in;  // vertex in the bush preimage set
    std::vector<uint8_t> e_in;
};

}  // namespace

void PreimageTree::tag_components() {
    // per-level membership of the bush preimage set
    const HubbardTree& t = *base_;
    std::vector<LiftSets> sets(levels_.size());
    {
        LiftSets& s0 = sets[0];
        s0.v_in.assign(levels_[0]->n_vertices, 0);
        s0.e_in.assign(levels_[0]->edges.size(), 0);
        std::vector<int> bush_of(levels_[0]->n_vertices, -1);
        for (std::size_t b = 0; b < t.bushes.size(); ++b)
            for (int v : t.bushes[b]) {
                s0.v_in[v] = 1;
                bush_of[v] = static_cast<int>(b);
            }
        for (std::size_t e = 0; e < levels_[0]->edges.size(); ++e) {
            int a = levels_[0]->edges[e][0], b = levels_[0]->edges[e][1];
            if (s0.v_in[a] && s0.v_in[b] && bush_of[a] == bush_of[b]) s0.e_in[e] = 1;
        }
    }
    for (std::size_t k = 1; k < levels_.size(); ++k) {
        LiftSets& s = sets[k];
        const Level& L = *levels_[k];
        s.v_in.assign(L.n_vertices, 0);
        s.e_in.assign(L.edges.size(), 0);
        for (int v = 0; v < L.n_vertices; ++v) s.v_in[v] = sets[k - 1].v_in[L.vproj[v]];
        for (std::size_t e = 0; e < L.edges.size(); ++e) s.e_in[e] = sets[k - 1].e_in[L.eproj[e]];
    }

    // components per level (vertex sets over the in-set graph)
    std::vector<std::vector<int>> comp_of(levels_.size());
    std::vector<std::vector<Component>> comps(levels_.size());
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        const Level& L = *levels_[k];
        comp_of[k].assign(L.n_vertices, -1);
        for (int v = 0; v < L.n_vertices; ++v) {
            if (!sets[k].v_in[v] || comp_of[k][v] >= 0) continue;
            const int id = static_cast<int>(comps[k].size());
            comps[k].push_back({});
            std::queue<int> q;
            q.push(v);
            comp_of[k][v] = id;
            while (!q.empty()) {
                int x = q.front();
                q.pop();
                comps[k][id].vertices.push_back(x);
                for (auto [w, e] : L.adj[x])
                    if (sets[k].e_in[e] && comp_of[k][w] < 0) {
                        comp_of[k][w] = id;
                        q.push(w);
                    }
            }
        }
        // image bush: project to the base
        for (auto& cmp : comps[k]) {
            int v = cmp.vertices.front();
            for (std::size_t kk = k; kk > 0; --kk) v = levels_[kk]->vproj[v];
            cmp.image_bush = t.bush_of_vertex(v);
        }
        // periodic lifts contain the embedded bushes
        for (std::size_t b = 0; b < t.bushes.size(); ++b) {
            const int loc = levels_[k]->located_base[t.bushes[b].front()];
            const int cid = comp_of[k][loc];
            if (cid < 0) throw NumericalError("pullback: embedded bush escaped its lift set");
            comps[k][cid].periodic = true;
            for (int v : t.bushes[b]) {
                if (comp_of[k][levels_[k]->located_base[v]] != cid)
                    throw NumericalError("pullback: embedded bush split across components");
            }
        }
        // preperiods by projecting to the previous level
        for (auto& cmp : comps[k]) {
            if (cmp.periodic) {
                cmp.preperiod = 0;
                continue;
            }
            if (k == 0) throw NumericalError("pullback: level-0 component not a bush");
            int v = cmp.vertices.front();
            const int down = comp_of[k - 1][levels_[k]->vproj[v]];
            cmp.preperiod = 1 + comps[k - 1][down].preperiod;
        }
    }
    comps_ = comps.back();
    comp_of_vertex_ = comp_of.back();
}

long long PreimageTree::vertex_count() const { return levels_.back()->n_vertices; }
long long PreimageTree::edge_count() const {
    return static_cast<long long>(levels_.back()->edges.size());
}

int PreimageTree::lift_count_of_base_edge(int base_edge) const {
    int count = 0;
    for (std::size_t e = 0; e < levels_.back()->edges.size(); ++e) {
        int cur = static_cast<int>(e);
        for (std::size_t k = levels_.size() - 1; k > 0; --k) cur = levels_[k]->eproj[cur];
        if (cur == base_edge) ++count;
    }
    return count;
}

int PreimageTree::periodic_component_of_bush(int bush) const {
    const int loc = levels_.back()->located_base[base_->bushes[bush].front()];
    return comp_of_vertex_[loc];
}

int PreimageTree::located_vertex(int base_vertex) const {
    return levels_.back()->located_base[base_vertex];
}

int PreimageTree::located_alpha() const {
    if (base_->alpha < 0) throw NumericalError("tree has no alpha vertex");
    return located_vertex(base_->alpha);
}

int PreimageTree::critical_lift_depth(int v) const { return levels_.back()->crit_depth[v]; }

std::vector<int> PreimageTree::project_to_base(const std::vector<int>& path) const {
    std::vector<int> p = path;
    for (std::size_t k = levels_.size() - 1; k > 0; --k) {
        for (int& v : p) v = levels_[k]->vproj[v];
        p = reduce_walk(p);
    }
    return p;
}

bool PreimageTree::functorial() const {
    // projecting an edge two levels must agree with projecting twice
    if (levels_.size() < 3) return true;
    const Level& L2 = *levels_[levels_.size() - 1];
    const Level& L1 = *levels_[levels_.size() - 2];
    for (std::size_t e = 0; e < L2.edges.size(); ++e) {
        int down1 = L2.eproj[e];
        int down2 = L1.eproj[down1];
        int composite = down1;
        composite = L1.eproj[composite];
        if (composite != down2) return false;
        // dynamics compatibility: the image path of e projects onto the image
        // path of its projection
        std::vector<int> p = L2.fpath[e];
        for (int& v : p) v = L2.vproj[v];
        p = reduce_walk(p);
        std::vector<int> q = L1.fpath[down1];
        std::vector<int> qr = q;
        std::reverse(qr.begin(), qr.end());
        if (p != q && p != qr) return false;
    }
    return true;
}

const std::vector<std::array<int, 2>>& PreimageTree::top_edges() const {
    return levels_.back()->edges;
}

const std::vector<std::vector<std::pair<int, int>>>& PreimageTree::top_adjacency() const {
    return levels_.back()->adj;
}

namespace {

std::vector<int> component_bridge(const std::vector<std::vector<std::pair<int, int>>>& adj,
                                  const std::vector<int>& comp_of,
                                  const std::vector<int>& sources, int comp_a, int comp_b,
                                  bool block_others) {
    std::vector<int> parent(adj.size(), -2);
    std::queue<int> q;
    for (int v : sources) {
        parent[v] = -1;
        q.push(v);
    }
    int hit = -1;
    while (!q.empty() && hit < 0) {
        int v = q.front();
        q.pop();
        for (auto [w, e] : adj[v]) {
            (void)e;
            if (parent[w] != -2) continue;
            parent[w] = v;
            const int cw = comp_of[w];
            if (cw == comp_b) {
                hit = w;
                break;
            }
            if (cw == comp_a) continue;
            if (block_others && cw >= 0) continue;
            q.push(w);
        }
    }
    if (hit < 0) return {};
    std::vector<int> path;
    for (int v = hit; v != -1; v = parent[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

std::vector<int> PreimageTree::clean_bridge(int comp_a, int comp_b) const {
    return component_bridge(levels_.back()->adj, comp_of_vertex_, comps_[comp_a].vertices, comp_a,
                            comp_b, true);
}

std::vector<int> PreimageTree::geodesic_between(int comp_a, int comp_b) const {
    return component_bridge(levels_.back()->adj, comp_of_vertex_, comps_[comp_a].vertices, comp_a,
                            comp_b, false);
}

std::vector<std::pair<int, std::vector<int>>> PreimageTree::visible_components(int comp) const {
    const Level& L = *levels_.back();
    std::vector<int> parent(L.n_vertices, -2);
    std::queue<int> q;
    for (int v : comps_[comp].vertices) {
        parent[v] = -1;
        q.push(v);
    }
    std::vector<std::pair<int, std::vector<int>>> out;
    std::set<int> found;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (auto [w, e] : L.adj[v]) {
            if (parent[w] != -2) continue;
            parent[w] = v;
            const int cw = comp_of_vertex_[w];
            if (cw >= 0) {
                if (cw != comp && !found.count(cw)) {
                    found.insert(cw);
                    std::vector<int> path;
                    for (int x = w; x != -1; x = parent[x]) path.push_back(x);
                    std::reverse(path.begin(), path.end());
                    out.emplace_back(cw, std::move(path));
                }
                continue;  // never walk through components
            }
            q.push(w);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

bool PreimageTree::path_lifts_diagram_arc(const std::vector<int>& path) const {
    if (path.size() < 2) return false;
    std::vector<int> p = project_to_base(path);
    if (p.size() < 2) return false;
    const HubbardTree& t = *base_;
    const int bush_first = t.bush_of_vertex(p.front());
    const int bush_last = t.bush_of_vertex(p.back());
    if (bush_first < 0 || bush_last < 0) return false;
    // trim the portions inside the endpoint bushes
    std::size_t i = 0;
    while (i + 1 < p.size() && t.bush_of_vertex(p[i + 1]) == bush_first) ++i;
    std::size_t j = p.size() - 1;
    while (j > i && t.bush_of_vertex(p[j - 1]) == bush_last) --j;
    std::vector<int> bridge(p.begin() + i, p.begin() + j + 1);
    if (bridge.size() < 2) return false;
    for (const auto& a : t.diagram) {
        std::vector<int> g = t.arc_geodesic(a.bush_a, a.bush_b);
        if (bridge == g) return true;
        std::reverse(g.begin(), g.end());
        if (bridge == g) return true;
    }
    return false;
}

PreimageTree pullback_tree(const HubbardTree& tree, int m) { return PreimageTree(tree, m); }

// --- arc operations --------------------------------------------------------------

Decomposition decompose_rel(const HubbardTree& tree, ArcRef arc, const PreimageTree& pre) {
    Decomposition d;
    const auto base_path = tree.arc_geodesic(arc.bush_a, arc.bush_b);
    // embedded geodesic = bridge between the located endpoints
    const int va = pre.located_vertex(base_path.front());
    const int vb = pre.located_vertex(base_path.back());
    // walk the tree between the two located vertices
    const auto& adj = pre.top_adjacency();
    std::vector<int> parent(adj.size(), -2);
    std::queue<int> q;
    q.push(va);
    parent[va] = -1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (v == vb) break;
        for (auto [w, e] : adj[v])
            if (parent[w] == -2) {
                parent[w] = v;
                q.push(w);
            }
    }
    if (parent[vb] == -2) throw NumericalError("decompose_rel: endpoints not connected");
    std::vector<int> path;
    for (int v = vb; v != -1; v = parent[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());

    // cut along component visits
    const int ca = pre.component_of_vertex(va);
    const int cb = pre.component_of_vertex(vb);
    if (ca < 0 || cb < 0) throw NumericalError("decompose_rel: arc endpoints not in bushes");
    if (ca == cb) {
        d.absorbed = true;
        return d;
    }
    int state = -3;  // -3 start, -1 gap, >=0 component run
    for (int v : path) {
        const int cv = pre.component_of_vertex(v);
        if (cv >= 0) {
            if (state == -1) ++d.connecting;           // gap closed
            else if (state >= 0 && state != cv) ++d.connecting;  // zero-length gap
            if (state != cv) ++d.trivial_pieces;
            state = cv;
        } else {
            state = -1;
        }
    }
    return d;
}

int expansivity_number(const HubbardTree& tree, ArcRef arc, int m) {
    if (m == 0) return 1;
    PreimageTree pre(tree, m);
    const int ca = pre.periodic_component_of_bush(arc.bush_a);
    const int cb = pre.periodic_component_of_bush(arc.bush_b);
    if (ca == cb) return 0;
    // BFS through diagram-arc lifts
    std::vector<int> dist(pre.components().size(), -1);
    std::queue<int> q;
    dist[ca] = 0;
    q.push(ca);
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        if (x == cb) return dist[x];
        for (auto& [y, path] : pre.visible_components(x)) {
            if (dist[y] >= 0) continue;
            if (!pre.path_lifts_diagram_arc(path)) continue;
            dist[y] = dist[x] + 1;
            q.push(y);
        }
    }
    throw NumericalError("expansivity_number: arc not expressible through diagram lifts");
}

int expansivity_number_bruteforce(const HubbardTree& tree, ArcRef arc, int m) {
    if (m == 0) return 1;
    PreimageTree pre(tree, m);
    const int K = static_cast<int>(pre.components().size());
    // exhaustive lift enumeration over all component pairs
    std::vector<std::vector<int>> edges(K);
    for (int a = 0; a < K; ++a)
        for (int b = a + 1; b < K; ++b) {
            auto bridge = pre.clean_bridge(a, b);
            if (bridge.empty()) continue;
            // confirm the bridge interior avoids all components
            bool clean = true;
            for (std::size_t i = 1; i + 1 < bridge.size(); ++i)
                if (pre.component_of_vertex(bridge[i]) >= 0) clean = false;
            if (!clean) continue;
            if (!pre.path_lifts_diagram_arc(bridge)) continue;
            edges[a].push_back(b);
            edges[b].push_back(a);
        }
    const int ca = pre.periodic_component_of_bush(arc.bush_a);
    const int cb = pre.periodic_component_of_bush(arc.bush_b);
    if (ca == cb) return 0;
    std::vector<int> dist(K, -1);
    std::queue<int> q;
    dist[ca] = 0;
    q.push(ca);
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        if (x == cb) return dist[x];
        for (int y : edges[x])
            if (dist[y] < 0) {
                dist[y] = dist[x] + 1;
                q.push(y);
            }
    }
    throw NumericalError("expansivity_number_bruteforce: arc not expressible");
}

bool is_genuine_periodic(const HubbardTree& tree, ArcRef arc, int horizon) {
    if (horizon < 3 * tree.p1)
        throw NumericalError("is_genuine_periodic: horizon must be >= 3 * period");
    const int cap = std::min(horizon, PreimageTree::kMaxDepth);
    bool en_all_one = true;
    for (int m = 1; m <= cap && en_all_one; ++m) {
        int en;
        try {
            en = expansivity_number(tree, arc, m);
        } catch (const NumericalError&) {
            en_all_one = false;
            break;
        }
        if (en != 1) en_all_one = false;
    }
    // structural characterization: cyclically neighboring bushes of a flower
    bool structural = false;
    if (tree.is_satellite()) {
        const int p = static_cast<int>(tree.cyclic_order.size());
        int pos_a = -1, pos_b = -1;
        for (int i = 0; i < p; ++i) {
            if (tree.cyclic_order[i] == arc.bush_a) pos_a = i;
            if (tree.cyclic_order[i] == arc.bush_b) pos_b = i;
        }
        if (pos_a >= 0 && pos_b >= 0) {
            const int dd = (pos_a - pos_b + p) % p;
            structural = (dd == 1 || dd == p - 1);
        }
    }
    if (en_all_one != structural)
        throw NumericalError(
            "is_genuine_periodic: expansivity and structural characterizations disagree "
            "(modeling bug)");
    return en_all_one;
}

FlowerProbe satellite_flower_probe(const HubbardTree& tree) {
    if (!tree.is_satellite())
        throw NumericalError("satellite_flower_probe: tree is not satellite at level 1");
    FlowerProbe probe;
    probe.alpha_vertex = tree.alpha;
    probe.cyclic_bushes = tree.cyclic_order;
    probe.preperiod_bound = 6 * tree.p2;
    if (tree.p2 == 0 || tree.p1 != 2) return probe;  // lift search modeled for doubling
    probe.searched_lifts = true;

    const int depth_cap = std::min(6 * tree.p2, 8);
    for (int m = tree.p1; m <= depth_cap && !probe.separating_lifts_found; m += tree.p1) {
        PreimageTree pre(tree, m);
        const auto& comps = pre.components();
        for (int assign = 0; assign < 2 && !probe.separating_lifts_found; ++assign) {
        const int b_a = tree.cyclic_order[assign];
        const int b_b = tree.cyclic_order[1 - assign];
        std::vector<int> cand;
        for (int i = 0; i < static_cast<int>(comps.size()); ++i)
            if (!comps[i].periodic && comps[i].image_bush == b_b) cand.push_back(i);
        struct Ell {
            std::vector<int> path;
            int crit = -1;
        };
        std::vector<Ell> ells;
        const int alpha_loc = pre.located_alpha();
        for (std::size_t i = 0; i < cand.size(); ++i) {
            for (std::size_t j = i + 1; j < cand.size(); ++j) {
                auto bridge = pre.geodesic_between(cand[i], cand[j]);
                if (bridge.size() < 2) continue;
                bool thru_alpha = false;
                for (int v : bridge)
                    if (v == alpha_loc) thru_alpha = true;
                if (thru_alpha) continue;
                int crit = -1;
                for (int v : bridge)
                    if (pre.critical_lift_depth(v) >= 0) crit = v;
                if (crit < 0) continue;
                ells.push_back({bridge, crit});
                if (ells.size() > 4000) break;
            }
            if (ells.size() > 4000) break;
        }
        // choose two vertex-disjoint paths through distinct critical lifts that
        // separate the periodic B_a lift from alpha
        const int ca = pre.periodic_component_of_bush(b_a);
        const int va = pre.located_alpha();
        const auto& adj = pre.top_adjacency();
        auto separated = [&](const std::set<int>& removed) {
            std::vector<uint8_t> seen(adj.size(), 0);
            std::queue<int> q;
            if (removed.count(va)) return false;
            q.push(va);
            seen[va] = 1;
            while (!q.empty()) {
                int v = q.front();
                q.pop();
                if (pre.component_of_vertex(v) == ca) return false;
                for (auto [w, e] : adj[v])
                    if (!seen[w] && !removed.count(w)) {
                        seen[w] = 1;
                        q.push(w);
                    }
            }
            return true;
        };
        for (std::size_t i = 0; i < ells.size() && !probe.separating_lifts_found; ++i) {
            for (std::size_t j = i + 1; j < ells.size(); ++j) {
                if (ells[i].crit == ells[j].crit) continue;
                std::set<int> ri(ells[i].path.begin(), ells[i].path.end());
                bool disjoint = true;
                for (int v : ells[j].path)
                    if (ri.count(v)) disjoint = false;
                if (!disjoint) continue;
                std::set<int> removed = ri;
                removed.insert(ells[j].path.begin(), ells[j].path.end());
                if (!separated(removed)) continue;
                probe.separating_lifts_found = true;
                probe.search_depth = m;
                probe.ell1 = ells[i].path;
                probe.ell2 = ells[j].path;
                probe.crit_lift_depth_1 = pre.critical_lift_depth(ells[i].crit);
                probe.crit_lift_depth_2 = pre.critical_lift_depth(ells[j].crit);
                break;
            }
        }
        }
    }
    return probe;
}

}  // namespace renormlab
