#include "renormlab/arc_combinatorics.hpp"

#include <map>

namespace renormlab {

namespace {

// Superattracting tree models. Vertex coordinates in the comments locate the
// model in the dynamical plane of z^2 + c.

// period-2 center c = -1: tree [-1, 0] through alpha
const char* kBasilica = R"({
  "name": "basilica",
  "vertices": ["z1", "alpha", "z0"],
  "edges": [[0,1],[1,2]],
  "sigma": [2, 1, 0],
  "edge_paths": [[2,1],[1,0]],
  "critical": 2,
  "bushes": [[2],[0]],
  "cyclic_order": [0,1],
  "alpha": 1,
  "p1": 2,
  "diagram": [{"name":"a01","a":0,"b":1}]
})";

// period-4 center c = -1.3107026413368329 (twice-renormalizable doubling):
// z1 < z3 < alpha < z0 < z2 on the real line
const char* kDoubling = R"({
  "name": "doubling",
  "vertices": ["z1", "z3", "alpha", "z0", "z2"],
  "edges": [[0,1],[1,2],[2,3],[3,4]],
  "sigma": [4, 3, 2, 0, 1],
  "edge_paths": [[4,3],[3,2],[2,1,0],[0,1]],
  "critical": 3,
  "bushes": [[3,4],[0,1]],
  "cyclic_order": [0,1],
  "alpha": 2,
  "p1": 2,
  "p2": 4,
  "diagram": [{"name":"a01","a":0,"b":1}]
})";

// period-3 real center c = -1.7548776662466929 (primitive): z1 < z0 < z2
const char* kAirplane = R"({
  "name": "airplane",
  "vertices": ["z1", "z0", "z2"],
  "edges": [[0,1],[1,2]],
  "sigma": [2, 0, 1],
  "edge_paths": [[2,1,0],[0,1]],
  "critical": 1,
  "bushes": [[1],[0],[2]],
  "cyclic_order": [],
  "alpha": -1,
  "p1": 3,
  "diagram": [{"name":"a01","a":0,"b":1},{"name":"a02","a":0,"b":2}]
})";

// period-3 center c = -0.122561 + 0.744862i: tripod around alpha
const char* kRabbit = R"({
  "name": "rabbit",
  "vertices": ["alpha", "z0", "z1", "z2"],
  "edges": [[0,1],[0,2],[0,3]],
  "sigma": [0, 2, 3, 1],
  "edge_paths": [[0,2],[0,3],[0,1]],
  "critical": 1,
  "bushes": [[1],[2],[3]],
  "cyclic_order": [0,1,2],
  "alpha": 0,
  "p1": 3,
  "diagram": [{"name":"a01","a":0,"b":1},{"name":"a12","a":1,"b":2},{"name":"a20","a":2,"b":0}]
})";

// 1/3 rabbit tuned by the basilica (period 6). Petal K_i meets the alpha arm
// at its own little critical point: z0 for K_0, z4 for K_1 (f^2(z4) = z0),
// z5 for K_2; the little interval of K_1 is z4 -- ahat1 -- z1.
const char* kRabbitFeigenbaum = R"({
  "name": "rabbit_feigenbaum",
  "vertices": ["alpha","z0","z1","z2","z3","z4","z5","ahat0","ahat1","ahat2"],
  "edges": [[0,1],[0,5],[0,6],[1,7],[7,4],[5,8],[8,2],[6,9],[9,3]],
  "sigma": [0, 2, 3, 4, 5, 6, 1, 8, 9, 7],
  "edge_paths": [[0,5,8,2],[0,6],[0,1],[2,8],[8,5],[6,9],[9,3],[1,7],[7,4]],
  "critical": 1,
  "bushes": [[1,7,4],[2,8,5],[3,9,6]],
  "cyclic_order": [0,1,2],
  "alpha": 0,
  "p1": 3,
  "p2": 6,
  "diagram": [{"name":"a01","a":0,"b":1},{"name":"a12","a":1,"b":2},{"name":"a20","a":2,"b":0}]
})";

// 1/4 rabbit tuned by the basilica (period 8), the four-petal flower with the
// diagonal arc beta between opposite petals. Little critical points: z0, z5
// (f^3(z5) = z0), z6, z7; petal intervals z5--ahat1--z1 and cyclic images.
const char* kRabbit14Feigenbaum = R"({
  "name": "rabbit14_feigenbaum",
  "vertices": ["alpha","z0","z1","z2","z3","z4","z5","z6","z7",
               "ahat0","ahat1","ahat2","ahat3"],
  "edges": [[0,1],[0,6],[0,7],[0,8],[1,9],[9,5],[6,10],[10,2],[7,11],[11,3],[8,12],[12,4]],
  "sigma": [0, 2, 3, 4, 5, 6, 7, 8, 1, 10, 11, 12, 9],
  "edge_paths": [[0,6,10,2],[0,7],[0,8],[0,1],[2,10],[10,6],[7,11],[11,3],[8,12],[12,4],[1,9],[9,5]],
  "critical": 1,
  "bushes": [[1,9,5],[2,10,6],[3,11,7],[4,12,8]],
  "cyclic_order": [0,1,2,3],
  "alpha": 0,
  "p1": 4,
  "p2": 8,
  "diagram": [{"name":"a1","a":0,"b":1},{"name":"a2","a":1,"b":2},
              {"name":"a3","a":2,"b":3},{"name":"a4","a":3,"b":0},
              {"name":"beta","a":1,"b":3}]
})";

const std::map<std::string, const char*>& fixture_map() {
    static const std::map<std::string, const char*> m = {
        {"basilica", kBasilica},
        {"doubling", kDoubling},
        {"airplane", kAirplane},
        {"rabbit", kRabbit},
        {"rabbit_feigenbaum", kRabbitFeigenbaum},
        {"rabbit14_feigenbaum", kRabbit14Feigenbaum},
    };
    return m;
}

}  // namespace

const std::vector<std::string>& bundled_tree_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, j] : fixture_map()) v.push_back(k);
        return v;
    }();
    return names;
}

HubbardTree bundled_tree(const std::string& name) {
    auto it = fixture_map().find(name);
    if (it == fixture_map().end()) throw IoError("unknown bundled tree fixture: " + name);
    return HubbardTree::from_json(it->second);
}

}  // namespace renormlab
