#ifndef HERG_CORPUS_HPP
#define HERG_CORPUS_HPP

#include "decomp.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace herg {

struct Shape {
    std::string name;
    int v;
    std::vector<std::pair<int, int>> edges;
};

// Loop-free multigraph shapes with at most three edges.
inline std::vector<Shape> template_shapes()
{
    return {
        {"edge", 2, {{0, 1}}},
        {"digon", 2, {{0, 1}, {0, 1}}},
        {"path2", 3, {{0, 1}, {1, 2}}},
        {"triangle", 3, {{0, 1}, {1, 2}, {2, 0}}},
        {"path3", 4, {{0, 1}, {1, 2}, {2, 3}}},
        {"star3", 4, {{0, 1}, {0, 2}, {0, 3}}},
        {"digon_pendant", 3, {{0, 1}, {0, 1}, {1, 2}}},
        {"triple", 2, {{0, 1}, {0, 1}, {0, 1}}},
    };
}

// Genus of an orientable state, summed over components; -1 if not orientable.
inline int total_genus(const Herg& g)
{
    auto s = g.stats();
    if (s.t) return -1;
    int twice = 2 * s.k - s.v + s.e - s.bd;
    return twice / 2;
}

// Every rotation system of the shape with half-ribbons at hr_at, twists given by
// the pattern bits. Cyclic orders fix the first token of each vertex.
inline std::vector<Spec> enumerate_rotations(const Shape& sh, const std::vector<int>& hr_at, unsigned twist_bits,
                                             const std::vector<std::pair<int, Tok>>& lead = {})
{
    std::vector<std::vector<Tok>> toks(sh.v);
    for (auto& [v, t] : lead) toks[v].push_back(t);
    for (size_t i = 0; i < sh.edges.size(); ++i) {
        Tok a, b;
        a.id = b.id = std::to_string(i + 1);
        a.which = 1;
        b.which = 2;
        toks[sh.edges[i].first].push_back(a);
        toks[sh.edges[i].second].push_back(b);
    }
    for (size_t h = 0; h < hr_at.size(); ++h) {
        Tok t;
        t.hr = true;
        t.id = "h" + std::to_string(h + 1);
        toks[hr_at[h]].push_back(t);
    }
    std::vector<std::vector<std::vector<Tok>>> orders(sh.v);
    for (int v = 0; v < sh.v; ++v) {
        auto& t = toks[v];
        if (t.size() <= 2) {
            orders[v].push_back(t);
            continue;
        }
        std::vector<int> idx(t.size() - 1);
        std::iota(idx.begin(), idx.end(), 1);
        do {
            std::vector<Tok> o{t[0]};
            for (int i : idx) o.push_back(t[i]);
            orders[v].push_back(o);
        } while (std::next_permutation(idx.begin(), idx.end()));
    }
    std::vector<Spec> out;
    std::vector<size_t> pick(sh.v, 0);
    while (true) {
        Spec s;
        s.name = sh.name;
        for (int v = 0; v < sh.v; ++v) s.verts.emplace_back(std::to_string(v + 1), orders[v][pick[v]]);
        for (size_t i = 0; i < sh.edges.size(); ++i) s.twist[std::to_string(i + 1)] = (twist_bits >> i) & 1;
        out.push_back(s);
        int v = 0;
        while (v < sh.v && ++pick[v] == orders[v].size()) pick[v++] = 0;
        if (v == sh.v) break;
    }
    return out;
}

struct TemplateOptions {
    int max_hrs = 2;
    bool twists = true;  // all-untwisted plus the first-edge-twisted pattern
};

inline std::vector<Spec> enumerate_templates(const TemplateOptions& o = {})
{
    std::vector<Spec> out;
    for (auto& sh : template_shapes()) {
        std::vector<std::vector<int>> placements{{}};
        if (o.max_hrs >= 1)
            for (int a = 0; a < sh.v; ++a) placements.push_back({a});
        if (o.max_hrs >= 2)
            for (int a = 0; a < sh.v; ++a)
                for (int b = a; b < sh.v; ++b) placements.push_back({a, b});
        std::vector<unsigned> tw{0};
        if (o.twists) tw.push_back(1);
        for (auto& pl : placements)
            for (unsigned t : tw)
                for (auto& s : enumerate_rotations(sh, pl, t)) out.push_back(s);
    }
    return out;
}

inline Piece piece_of(const std::string& text) { return make_piece(parse_spec(text)); }

// Connected piece shapes on u=0, w=1 and an optional extra vertex 2.
inline std::vector<Shape> piece_shapes()
{
    return {
        {"single", 2, {{0, 1}}},
        {"digon", 2, {{0, 1}, {0, 1}}},
        {"path", 3, {{0, 2}, {2, 1}}},
        {"loop_u", 2, {{0, 1}, {0, 0}}},
        {"loop_w", 2, {{0, 1}, {1, 1}}},
        {"pend_u", 3, {{0, 1}, {0, 2}}},
        {"pend_w", 3, {{0, 1}, {1, 2}}},
    };
}

// Every piece with at most two edges whose H_e is connected: all rotations,
// all twist patterns, marks at u and w.
inline std::vector<Piece> enumerate_pieces(bool twists = true)
{
    std::vector<Piece> out;
    std::set<std::string> seen;
    for (auto& sh : piece_shapes()) {
        unsigned ne = static_cast<unsigned>(sh.edges.size());
        for (unsigned tb = 0; tb < (twists ? (1u << ne) : 1u); ++tb) {
            Tok m, n;
            m.hr = n.hr = true;
            m.id = "hm";
            m.mark = 'm';
            n.id = "hn";
            n.mark = 'n';
            for (auto s : enumerate_rotations(sh, {}, tb, {{0, m}, {1, n}})) {
                s.verts[0].first = "u";
                s.verts[1].first = "w";
                if (sh.v > 2) s.verts[2].first = "x";
                s.header["um"] = "u";
                s.header["wm"] = "w";
                std::string txt = Herg(s).to_text();
                if (!seen.insert(txt).second) continue;
                s.name = sh.name + "_" + std::to_string(out.size());
                out.push_back(make_piece(s));
            }
        }
    }
    return out;
}

inline bool piece_planar(const Piece& p)
{
    Herg A(join_marks(p.spec, kJoinEdge));
    return total_genus(A) == 0;
}

struct Instance {
    std::string label;
    Decomposition d;
};

// Template i gets piece (i + j) mod |pieces| on its j-th edge.
inline std::vector<Instance> build_instances(const std::vector<Spec>& tmpls, const std::vector<Piece>& pieces,
                                             int stride = 1, int offset = 0)
{
    std::vector<Instance> out;
    for (size_t i = offset; i < tmpls.size(); i += stride) {
        Herg g(tmpls[i]);
        std::map<std::string, Piece> ps;
        std::string lab = "t" + std::to_string(i) + ":" + tmpls[i].name;
        for (int j = 0; j < g.num_edges(); ++j) {
            auto& p = pieces[(i + j) % pieces.size()];
            ps[g.edges()[j].id] = p;
            lab += "/" + p.name;
        }
        out.push_back({lab, make_decomposition(tmpls[i], ps)});
    }
    return out;
}

} // namespace herg

#endif
