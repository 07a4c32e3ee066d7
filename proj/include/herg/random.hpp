#ifndef HERG_RANDOM_HPP
#define HERG_RANDOM_HPP

#include "decomp.hpp"
#include "graph.hpp"

#include <random>

namespace herg {

using Rng = std::mt19937_64;

inline int rand_int(Rng& r, int lo, int hi)  // inclusive
{
    return std::uniform_int_distribution<int>(lo, hi)(r);
}

struct RandomParams {
    int vertices = 3;
    int edges = 3;
    int half_ribbons = 1;
    int twist_percent = 30;
    bool loops = true;
};

// Ends are dropped on random vertices, then each rotation is shuffled.
inline Spec random_spec(Rng& r, const RandomParams& p, const std::string& name = "rnd")
{
    if (p.vertices < 1) throw std::invalid_argument("need at least one vertex");
    if (!p.loops && p.vertices < 2 && p.edges > 0) throw std::invalid_argument("non-loop edges need two vertices");
    Spec s;
    s.name = name;
    std::vector<std::vector<Tok>> rot(p.vertices);
    for (int e = 1; e <= p.edges; ++e) {
        int a = rand_int(r, 0, p.vertices - 1), b = rand_int(r, 0, p.vertices - 1);
        while (!p.loops && a == b) b = rand_int(r, 0, p.vertices - 1);
        std::string id = std::to_string(e);
        Tok t1, t2;
        t1.id = t2.id = id;
        t1.which = 1;
        t2.which = 2;
        rot[a].push_back(t1);
        rot[b].push_back(t2);
        s.twist[id] = rand_int(r, 0, 99) < p.twist_percent ? 1 : 0;
    }
    for (int h = 1; h <= p.half_ribbons; ++h) {
        Tok t;
        t.hr = true;
        t.id = "h" + std::to_string(h);
        rot[rand_int(r, 0, p.vertices - 1)].push_back(t);
    }
    for (int v = 0; v < p.vertices; ++v) {
        std::shuffle(rot[v].begin(), rot[v].end(), r);
        s.verts.emplace_back(std::to_string(v + 1), rot[v]);
    }
    return s;
}

inline std::string spec_text(const Spec& s) { return Herg(s).to_text(); }

// Random piece: a random graph on >= 2 vertices with one !m and one !n mark
// on distinct vertices.
inline Spec random_piece_spec(Rng& r, int vertices, int edges, int extra_hrs, int twist_percent)
{
    RandomParams p;
    p.vertices = std::max(2, vertices);
    p.edges = edges;
    p.half_ribbons = extra_hrs;
    p.twist_percent = twist_percent;
    Spec s = random_spec(r, p, "piece");
    auto put = [&](int v, const char* id, char mark) {
        Tok t;
        t.hr = true;
        t.id = id;
        t.mark = mark;
        auto& rot = s.verts[v].second;
        rot.insert(rot.begin() + rand_int(r, 0, static_cast<int>(rot.size())), t);
    };
    int u = rand_int(r, 0, p.vertices - 1), w = rand_int(r, 0, p.vertices - 2);
    if (w >= u) ++w;
    put(u, "hm", 'm');
    put(w, "hn", 'n');
    s.header["um"] = s.verts[u].first;
    s.header["wm"] = s.verts[w].first;
    return s;
}

inline std::string manifest_text(const Decomposition& d, const std::string& tmpl_file,
                                 const std::map<std::string, std::string>& piece_files)
{
    std::string out = "template " + tmpl_file + "\n";
    for (auto& e : d.g.edges()) {
        out += "piece " + e.id + " " + piece_files.at(e.id);
        if (d.pieces.at(e.id).flip) out += " flip";
        out += "\n";
    }
    return out;
}

} // namespace herg

#endif
