#ifndef HERG_TEST_ORACLE_HPP
#define HERG_TEST_ORACLE_HPP

// Brute-force reference counts used by the unit tests. Faces come from a
// flag model (two sides per end, glued by a vertex and an edge involution),
// which shares no code with the face tracer in graph.hpp.

#include <herg/graph.hpp>
#include <herg/stranded.hpp>


namespace oracle {

using herg::Herg;
using herg::Mask;

struct Counts {
    int v = 0, e = 0, k = 0, f = 0, bd = 0, F_int = 0, C_bd = 0, t = 0;
};

inline Counts count(const Herg& g, Mask m)
{
    Counts c;
    const auto& ends = g.ends();
    int n = static_cast<int>(ends.size());
    // flag 2p is the left side of end p, 2p+1 the right side
    std::vector<int> vin(2 * n, -1), ein(2 * n, -1);
    std::vector<char> free_seg(2 * n, 0);
    for (auto& v : g.vertices()) {
        int d = static_cast<int>(v.rot.size());
        for (int i = 0; i < d; ++i) {
            int p = v.rot[i], q = v.rot[(i + 1) % d];
            vin[2 * p + 1] = 2 * q;
            vin[2 * q] = 2 * p + 1;
        }
    }
    auto present = [&](int edge) { return (m >> edge) & 1; };
    for (int p = 0; p < n; ++p) {
        int ed = ends[p].edge;
        if (ed < 0 || !present(ed)) {
            ein[2 * p] = 2 * p + 1;
            ein[2 * p + 1] = 2 * p;
            free_seg[2 * p] = free_seg[2 * p + 1] = 1;
            ++c.f;
            continue;
        }
        auto& E = g.edges()[ed];
        int q = E.end1 == p ? E.end2 : E.end1;
        if (E.twist) {
            ein[2 * p] = 2 * q;
            ein[2 * p + 1] = 2 * q + 1;
        } else {
            ein[2 * p] = 2 * q + 1;
            ein[2 * p + 1] = 2 * q;
        }
    }
    std::vector<char> seen(2 * n, 0);
    for (int s = 0; s < 2 * n; ++s) {
        if (seen[s]) continue;
        bool has_free = false;
        int x = s;
        do {
            seen[x] = 1;
            int y = vin[x];
            seen[y] = 1;
            x = ein[y];
            if (free_seg[y]) has_free = true;
        } while (x != s);
        ++c.bd;
        if (has_free) ++c.C_bd;
        else ++c.F_int;
    }
    // a vertex without ends is a disc with one closed boundary
    for (auto& v : g.vertices())
        if (v.rot.empty()) {
            ++c.bd;
            ++c.F_int;
        }
    c.v = g.num_vertices();
    // components and orientability by signed BFS
    std::vector<std::vector<std::pair<int, int>>> adj(c.v);
    for (int i = 0; i < g.num_edges(); ++i) {
        if (!present(i)) continue;
        ++c.e;
        auto& E = g.edges()[i];
        int a = ends[E.end1].vertex, b = ends[E.end2].vertex;
        adj[a].push_back({b, E.twist});
        adj[b].push_back({a, E.twist});
    }
    std::vector<int> sign(c.v, -1);
    for (int s = 0; s < c.v; ++s) {
        if (sign[s] >= 0) continue;
        ++c.k;
        sign[s] = 0;
        std::vector<int> st{s};
        while (!st.empty()) {
            int a = st.back();
            st.pop_back();
            for (auto [b, tw] : adj[a]) {
                int want = sign[a] ^ tw;
                if (sign[b] < 0) {
                    sign[b] = want;
                    st.push_back(b);
                } else if (sign[b] != want) {
                    c.t = 1;
                }
            }
        }
    }
    return c;
}

// Bicolored strands of a colored graph state. Each (i, j) strand is a path
// or a cycle in the subgraph of present i- and j-edges; it is open when a
// half-edge (given, or left by a cut) of color i or j sits on it.
struct Faces {
    int closed = 0, open = 0;
};

inline Faces colored_faces(const herg::CGraph& g, Mask m)
{
    int V = static_cast<int>(g.vid.size()), nc = g.colors();
    auto fe = g.free_edges();
    std::vector<char> present(g.edges.size(), 0);
    for (size_t i = 0; i < g.edges.size(); ++i) present[i] = g.edges[i].contracted;
    for (size_t j = 0; j < fe.size(); ++j)
        if ((m >> j) & 1) present[fe[j]] = 1;
    // kind at (v, c): -1 empty, 0 half, 1 present edge
    std::vector<std::vector<int>> kind(V, std::vector<int>(nc, -1)), other(V, std::vector<int>(nc, -1));
    for (size_t i = 0; i < g.edges.size(); ++i) {
        auto& e = g.edges[i];
        int k = present[i] ? 1 : 0;
        kind[e.a][e.color] = kind[e.b][e.color] = k;
        if (k) {
            other[e.a][e.color] = e.b;
            other[e.b][e.color] = e.a;
        }
    }
    for (auto& h : g.halves) kind[h.v][h.color] = 0;
    Faces f;
    for (int i = 0; i < nc; ++i)
        for (int j = i + 1; j < nc; ++j) {
            std::vector<char> done(V, 0);
            for (int v = 0; v < V; ++v) {
                if (done[v] || (kind[v][i] < 0 && kind[v][j] < 0)) continue;
                bool open = false;
                std::vector<int> st{v};
                done[v] = 1;
                while (!st.empty()) {
                    int x = st.back();
                    st.pop_back();
                    for (int c : {i, j}) {
                        if (kind[x][c] == 0) open = true;
                        if (kind[x][c] == 1 && !done[other[x][c]]) {
                            done[other[x][c]] = 1;
                            st.push_back(other[x][c]);
                        }
                    }
                }
                ++(open ? f.open : f.closed);
            }
        }
    return f;
}

} // namespace oracle

#endif
