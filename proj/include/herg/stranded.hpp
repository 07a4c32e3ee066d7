#ifndef HERG_STRANDED_HPP
#define HERG_STRANDED_HPP

// Colored tensor graphs with half-edges, used as representatives of
// w-colored stranded graphs. An edge flagged `contracted` lives inside a
// merged stranded vertex: it is never cut by a state, it does not count as
// an edge, and the vertices it joins count as one.

#include "graph.hpp"
#include "invariants.hpp"
#include "poly.hpp"

#include <random>

namespace herg {

struct CEdge {
    std::string id;
    int a = 0, b = 0;
    int color = 0;
    bool contracted = false;
};

struct CHalf {
    std::string id;
    int v = 0;
    int color = 0;
    char mark = 0;  // 'm' | 'n' on pieces
};

struct CGraph {
    std::string name = "cg";
    int rank = 3;
    bool bipartite = false, tensor = false;
    std::vector<std::string> vid;
    std::vector<int> sign;  // +1, -1, 0 when unset
    std::vector<CEdge> edges;
    std::vector<CHalf> halves;

    int colors() const { return rank + 1; }
    int vertex_index(const std::string& id) const
    {
        for (size_t i = 0; i < vid.size(); ++i)
            if (vid[i] == id) return static_cast<int>(i);
        return -1;
    }
    int edge_index(const std::string& id) const
    {
        for (size_t i = 0; i < edges.size(); ++i)
            if (edges[i].id == id) return static_cast<int>(i);
        return -1;
    }
    // Edges a state may cut, in file order.
    std::vector<int> free_edges() const
    {
        std::vector<int> r;
        for (size_t i = 0; i < edges.size(); ++i)
            if (!edges[i].contracted) r.push_back(static_cast<int>(i));
        return r;
    }
    int num_edges() const { return static_cast<int>(free_edges().size()); }
    Mask full_mask() const
    {
        int n = num_edges();
        return n >= 64 ? ~Mask(0) : (Mask(1) << n) - 1;
    }
    int add_vertex(const std::string& id, int sg = 0)
    {
        vid.push_back(id);
        sign.push_back(sg);
        return static_cast<int>(vid.size()) - 1;
    }

    void validate() const
    {
        if (rank < 1) throw InvariantError("rank must be at least 1");
        std::set<std::string> ids;
        for (auto& v : vid)
            if (!ids.insert("v:" + v).second) throw InvariantError("duplicate vertex " + v);
        std::vector<std::vector<int>> used(vid.size(), std::vector<int>(colors(), 0));
        auto use = [&](int v, int c, const std::string& who) {
            if (c < 0 || c >= colors()) throw InvariantError(who + ": color " + std::to_string(c) + " out of range");
            if (++used[v][c] > 1)
                throw InvariantError("color clash: two incidences of color " + std::to_string(c) + " at vertex " + vid[v]);
        };
        for (auto& e : edges) {
            if (!ids.insert("e:" + e.id).second) throw InvariantError("duplicate edge " + e.id);
            if (e.a == e.b) throw InvariantError("edge " + e.id + " is a loop; colored graphs are loop-free");
            use(e.a, e.color, "edge " + e.id);
            use(e.b, e.color, "edge " + e.id);
            if (bipartite && sign[e.a] * sign[e.b] != -1)
                throw InvariantError("edge " + e.id + " does not join a + vertex to a - vertex");
        }
        for (auto& h : halves) {
            if (!ids.insert("e:" + h.id).second) throw InvariantError("duplicate half-edge " + h.id);
            use(h.v, h.color, "half " + h.id);
        }
        for (size_t v = 0; v < vid.size(); ++v) {
            int deg = 0;
            for (int c : used[v]) deg += c;
            if (tensor && deg != colors())
                throw InvariantError("vertex " + vid[v] + " has degree " + std::to_string(deg) + ", tensor needs " +
                                     std::to_string(colors()));
        }
    }

    std::string to_text() const
    {
        std::ostringstream o;
        o << "cgraph " << name << " rank=" << rank;
        if (bipartite) o << " bipartite";
        if (tensor) o << " tensor";
        o << "\n";
        for (size_t i = 0; i < vid.size(); ++i) {
            o << "vertex " << vid[i];
            if (sign[i]) o << (sign[i] > 0 ? " +" : " -");
            o << "\n";
        }
        for (auto& e : edges) {
            o << "edge " << e.id << ": " << vid[e.a] << " " << vid[e.b] << " color=" << e.color;
            if (e.contracted) o << " contracted";
            o << "\n";
        }
        for (auto& h : halves) {
            o << "half " << h.id << ": " << vid[h.v] << " color=" << h.color;
            if (h.mark) o << " mark=" << h.mark;
            o << "\n";
        }
        return o.str();
    }
};

inline CGraph parse_colored(const std::string& text)
{
    CGraph g;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    bool head = false;
    auto color_of = [&](const std::string& w) {
        if (w.rfind("color=", 0) != 0) throw ParseError(ln, "expected color=<c>, got '" + w + "'");
        try {
            return std::stoi(w.substr(6));
        } catch (...) {
            throw ParseError(ln, "bad color '" + w + "'");
        }
    };
    auto vertex = [&](const std::string& id) {
        int v = g.vertex_index(id);
        if (v < 0) throw ParseError(ln, "unknown vertex '" + id + "'");
        return v;
    };
    while (std::getline(in, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string l = trim(line);
        if (l.empty()) continue;
        for (auto& ch : l)
            if (ch == ':') ch = ' ';
        std::istringstream ws(l);
        std::string kw;
        ws >> kw;
        std::vector<std::string> w;
        for (std::string x; ws >> x;) w.push_back(x);
        if (kw == "cgraph") {
            if (head) throw ParseError(ln, "second cgraph line");
            if (w.empty()) throw ParseError(ln, "cgraph needs a name");
            head = true;
            g.name = w[0];
            for (size_t i = 1; i < w.size(); ++i) {
                if (w[i] == "bipartite") g.bipartite = true;
                else if (w[i] == "tensor") g.tensor = true;
                else if (w[i].rfind("rank=", 0) == 0) {
                    try {
                        g.rank = std::stoi(w[i].substr(5));
                    } catch (...) {
                        throw ParseError(ln, "bad rank");
                    }
                } else
                    throw ParseError(ln, "unknown header word '" + w[i] + "'");
            }
        } else if (!head) {
            throw ParseError(ln, "file must start with a cgraph line");
        } else if (kw == "vertex") {
            if (w.empty() || w.size() > 2) throw ParseError(ln, "vertex <id> [+|-]");
            if (g.vertex_index(w[0]) >= 0) throw ParseError(ln, "duplicate vertex " + w[0]);
            int sg = 0;
            if (w.size() == 2) {
                if (w[1] == "+") sg = 1;
                else if (w[1] == "-") sg = -1;
                else throw ParseError(ln, "vertex class must be + or -");
            }
            g.add_vertex(w[0], sg);
        } else if (kw == "edge") {
            if (w.size() < 4 || w.size() > 5) throw ParseError(ln, "edge <id>: <v1> <v2> color=<c> [contracted]");
            CEdge e;
            e.id = w[0];
            e.a = vertex(w[1]);
            e.b = vertex(w[2]);
            e.color = color_of(w[3]);
            if (w.size() == 5) {
                if (w[4] != "contracted") throw ParseError(ln, "unknown edge flag '" + w[4] + "'");
                e.contracted = true;
            }
            g.edges.push_back(e);
        } else if (kw == "half") {
            if (w.size() < 3 || w.size() > 4) throw ParseError(ln, "half <id>: <v> color=<c> [mark=m|n]");
            CHalf h;
            h.id = w[0];
            h.v = vertex(w[1]);
            h.color = color_of(w[2]);
            if (w.size() == 4) {
                if (w[3] != "mark=m" && w[3] != "mark=n") throw ParseError(ln, "mark must be m or n");
                h.mark = w[3][5];
            }
            g.halves.push_back(h);
        } else {
            throw ParseError(ln, "unknown keyword '" + kw + "'");
        }
    }
    if (!head) throw ParseError(ln, "missing cgraph line");
    g.validate();
    return g;
}

// ---- state statistics ------------------------------------------------------

struct OpenFace {
    int ci = 0, cj = 0;                // colors, ci < cj
    std::vector<std::string> halves;   // sorted half-edge names on it
    bool operator<(const OpenFace& o) const
    {
        return std::tie(ci, cj, halves) < std::tie(o.ci, o.cj, o.halves);
    }
    bool operator==(const OpenFace& o) const { return ci == o.ci && cj == o.cj && halves == o.halves; }
};

struct CStats {
    int V = 0, E = 0, k = 0, r = 0, n = 0, f = 0;
    int F_int = 0, C_bd = 0, E_bd = 0;
    std::vector<int> B;                     // B[p], p = 0..rank
    std::vector<std::string> half_names;    // boundary vertices of the state
    std::vector<int> half_class;            // boundary component per half
    std::vector<int> comp;                  // connected component per vertex
    std::vector<OpenFace> open_faces;       // sorted
};

inline std::string cut_half_name(const std::string& eid, int side) { return eid + "." + std::to_string(side); }

inline CStats cstats(const CGraph& g, Mask m)
{
    const int V = static_cast<int>(g.vid.size()), nc = g.colors();
    auto fe = g.free_edges();
    std::vector<char> present(g.edges.size(), 0);
    for (size_t i = 0; i < g.edges.size(); ++i) present[i] = g.edges[i].contracted;
    for (size_t j = 0; j < fe.size(); ++j)
        if ((m >> j) & 1) present[fe[j]] = 1;

    struct H {
        std::string name;
        int v, color;
    };
    std::vector<H> hs;
    for (auto& h : g.halves) hs.push_back({h.id, h.v, h.color});
    for (int i : fe)
        if (!present[i]) {
            hs.push_back({cut_half_name(g.edges[i].id, 1), g.edges[i].a, g.edges[i].color});
            hs.push_back({cut_half_name(g.edges[i].id, 2), g.edges[i].b, g.edges[i].color});
        }

    CStats s;
    s.f = static_cast<int>(hs.size());
    UnionFind grp(V), cc(V);
    int contracted = 0;
    for (size_t i = 0; i < g.edges.size(); ++i) {
        if (!present[i]) continue;
        cc.unite(g.edges[i].a, g.edges[i].b);
        if (g.edges[i].contracted) {
            ++contracted;
            if (!grp.unite(g.edges[i].a, g.edges[i].b))
                throw InvariantError("contracted edges contain a cycle");
        } else {
            ++s.E;
        }
    }
    s.V = V - contracted;
    std::map<int, int> roots;
    s.comp.resize(V);
    for (int v = 0; v < V; ++v) {
        int r = cc.find(v);
        auto it = roots.emplace(r, static_cast<int>(roots.size())).first;
        s.comp[v] = it->second;
    }
    s.k = static_cast<int>(roots.size());
    s.r = s.V - s.k;
    s.n = s.E - s.V + s.k;

    // incidence table: what sits at each (vertex, color)
    std::vector<std::vector<char>> touched(V, std::vector<char>(nc, 0));
    std::vector<std::vector<int>> half_at(V, std::vector<int>(nc, -1));
    for (size_t i = 0; i < g.edges.size(); ++i) {
        touched[g.edges[i].a][g.edges[i].color] = 1;
        touched[g.edges[i].b][g.edges[i].color] = 1;
    }
    for (size_t i = 0; i < hs.size(); ++i) {
        touched[hs[i].v][hs[i].color] = 1;
        half_at[hs[i].v][hs[i].color] = static_cast<int>(i);
    }

    s.B.assign(g.rank + 1, 0);
    s.B[0] = s.V;
    if (g.rank >= 1) s.B[1] = s.E;
    UnionFind bd(static_cast<int>(hs.size()));
    for (unsigned S = 1; S < (1u << nc); ++S) {
        int p = __builtin_popcount(S);
        if (p < 2 || p > g.rank) continue;
        UnionFind u(V);
        for (size_t i = 0; i < g.edges.size(); ++i)
            if (present[i] && ((S >> g.edges[i].color) & 1)) u.unite(g.edges[i].a, g.edges[i].b);
        std::map<int, std::vector<int>> comps;
        for (int v = 0; v < V; ++v) {
            bool t = false;
            for (int c = 0; c < nc; ++c) t = t || (((S >> c) & 1) && touched[v][c]);
            if (t) comps[u.find(v)].push_back(v);
        }
        s.B[p] += static_cast<int>(comps.size());
        if (p != 2) continue;
        int ci = __builtin_ctz(S), cj = 31 - __builtin_clz(S);
        for (auto& [r, vs] : comps) {
            std::vector<int> on;
            for (int v : vs)
                for (int c : {ci, cj})
                    if (half_at[v][c] >= 0) on.push_back(half_at[v][c]);
            if (on.empty()) {
                ++s.F_int;
                continue;
            }
            ++s.E_bd;
            OpenFace of{ci, cj, {}};
            for (int h : on) {
                bd.unite(on[0], h);
                of.halves.push_back(hs[h].name);
            }
            std::sort(of.halves.begin(), of.halves.end());
            s.open_faces.push_back(of);
        }
    }
    std::sort(s.open_faces.begin(), s.open_faces.end());
    std::map<int, int> broots;
    for (size_t i = 0; i < hs.size(); ++i) {
        s.half_names.push_back(hs[i].name);
        auto it = broots.emplace(bd.find(static_cast<int>(i)), static_cast<int>(broots.size())).first;
        s.half_class.push_back(it->second);
    }
    s.C_bd = static_cast<int>(broots.size());
    return s;
}

// Open faces found by walking strands: from a half-edge of color i, leave
// through color j, cross the edge there (contracted edges are strands inside
// a merged vertex and are crossed the same way), come back through i, and so
// on until a half-edge or a missing color ends the walk. Used to check that
// contraction leaves the boundary alone.
inline std::vector<OpenFace> boundary_by_strands(const CGraph& g)
{
    const int V = static_cast<int>(g.vid.size()), nc = g.colors();
    std::vector<std::vector<int>> edge_at(V, std::vector<int>(nc, -1)), half_at(V, std::vector<int>(nc, -1));
    for (size_t i = 0; i < g.edges.size(); ++i) {
        edge_at[g.edges[i].a][g.edges[i].color] = static_cast<int>(i);
        edge_at[g.edges[i].b][g.edges[i].color] = static_cast<int>(i);
    }
    for (size_t i = 0; i < g.halves.size(); ++i) half_at[g.halves[i].v][g.halves[i].color] = static_cast<int>(i);
    std::set<OpenFace> out;
    for (auto& h : g.halves) {
        for (int j = 0; j < nc; ++j) {
            if (j == h.color) continue;
            OpenFace of{std::min(h.color, j), std::max(h.color, j), {h.id}};
            int v = h.v, want = j, other = h.color;
            for (int guard = 0; guard <= 2 * static_cast<int>(g.edges.size()) + 2; ++guard) {
                if (half_at[v][want] >= 0) {
                    of.halves.push_back(g.halves[half_at[v][want]].id);
                    break;
                }
                int e = edge_at[v][want];
                if (e < 0) break;
                v = g.edges[e].a == v ? g.edges[e].b : g.edges[e].a;
                std::swap(want, other);
            }
            std::sort(of.halves.begin(), of.halves.end());
            out.insert(of);
        }
    }
    return {out.begin(), out.end()};
}

// ---- the invariant T -----------------------------------------------------

struct Alpha {
    std::map<int, Q> a;  // alpha_k for k = 3..rank, default 1
    Q operator()(int k) const
    {
        auto it = a.find(k);
        return it == a.end() ? Q(1) : it->second;
    }
};

inline Alpha parse_alpha(const std::string& spec)
{
    Alpha al;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError(0, "alpha entries look like 3=1");
        int k = std::stoi(item.substr(0, eq));
        Q v = parse_q(item.substr(eq + 1));
        if (k < 3) throw ParseError(0, "alpha index must be at least 3");
        if (v <= 0) throw ParseError(0, "alpha values must be positive");
        al.a[k] = v;
    }
    return al;
}

inline Q gamma_of(const CStats& s, int n, const Alpha& al)
{
    auto B = [&](int p) { return p < static_cast<int>(s.B.size()) ? s.B[p] : 0; };
    Q g = (Q(n * (n - 1)) / 2) * (s.V - s.E) + Q(n - 1) * s.F_int - (2 + (n - 2) * al(3)) * B(3);
    for (int k = 4; k <= n; ++k) g += ((k - 1) * al(k - 1) - (n - k + 1) * al(k)) * B(k);
    return g;
}

inline Q z_exponent(const CStats& s, int n, const Alpha& al)
{
    return (Q((n - 1) * (n + 2)) / 2) * s.k - gamma_of(s, n, al);
}

inline Poly invariant_T(const CGraph& g, const Alpha& al = {})
{
    int n = g.rank, rG = cstats(g, g.full_mask()).r;
    PowCache xc(pvar("x") - Poly(1));
    for (int i = 0; i <= rG; ++i) xc(i);
    return mask_sum(g.num_edges(), [&](Mask m, Poly& acc) {
        auto s = cstats(g, m);
        Exps mono = make_exps({{"y", s.n}, {"z", z_exponent(s, n, al)}, {"s_var", s.C_bd}, {"q", s.E_bd}, {"t", s.f}});
        for (auto& [e, c] : xc.pw[rG - s.r].terms()) acc.add_term(exps_mul(e, mono), c);
    });
}

inline std::string beta_var(const std::string& eid) { return "beta_" + eid; }

inline Poly invariant_T_multivariate(const CGraph& g)
{
    auto fe = g.free_edges();
    return mask_sum(g.num_edges(), [&](Mask m, Poly& acc) {
        auto s = cstats(g, m);
        std::vector<std::pair<std::string, Q>> raw{{"x", s.r}, {"z", s.F_int}, {"s_var", s.C_bd}, {"q", s.E_bd}, {"t", s.f}};
        for (int i = 1; i <= g.rank; ++i) raw.emplace_back("z" + std::to_string(i), s.B[i]);
        for (size_t j = 0; j < fe.size(); ++j)
            if ((m >> j) & 1) raw.emplace_back(beta_var(g.edges[fe[j]].id), 1);
        acc.add_term(make_exps(raw), 1);
    });
}

// (x-1)^{k(G)} (y z^{n(n-1)/2})^{V(G)} T against the expanded sum.
struct PrefactorCheck {
    bool holds = false;
    Poly lhs, rhs;
};

inline PrefactorCheck prefactor_identity(const CGraph& g, const Alpha& al = {})
{
    int n = g.rank;
    auto full = cstats(g, g.full_mask());
    Q h = (Q(n * (n - 1)) / 2), kk = (Q((n - 1) * (n + 2)) / 2);
    Poly x1 = pvar("x") - Poly(1);
    Poly yz = Poly::monomial(1, make_exps({{"y", 1}, {"z", h}}));
    PrefactorCheck r;
    r.lhs = x1.pow(full.k) * yz.pow(full.V) * invariant_T(g, al);
    Poly kb = x1 * Poly::monomial(1, make_exps({{"y", 1}, {"z", kk}}));
    r.rhs = mask_sum(g.num_edges(), [&](Mask m, Poly& acc) {
        auto s = cstats(g, m);
        auto B = [&](int p) { return p < static_cast<int>(s.B.size()) ? s.B[p] : 0; };
        Q ze = Q(1 - n) * s.F_int + (2 + (n - 2) * al(3)) * B(3);
        for (int k = 4; k <= n; ++k) ze += ((1 - k) * al(k - 1) + (n - k + 1) * al(k)) * B(k);
        Poly t = kb.pow(s.k) * yz.pow(s.E) *
                 Poly::monomial(1, make_exps({{"z", ze}, {"s_var", s.C_bd}, {"q", s.E_bd}, {"t", s.f}}));
        acc += t;
    });
    r.holds = r.lhs == r.rhs;
    return r;
}

// ---- contraction ---------------------------------------------------------

inline CGraph contract_colored(const CGraph& g, const std::string& eid)
{
    int i = g.edge_index(eid);
    if (i < 0) throw InvariantError("no edge " + eid);
    if (g.edges[i].contracted) throw InvariantError("edge " + eid + " is already contracted");
    UnionFind grp(static_cast<int>(g.vid.size()));
    for (auto& e : g.edges)
        if (e.contracted) grp.unite(e.a, e.b);
    if (grp.find(g.edges[i].a) == grp.find(g.edges[i].b))
        throw InvariantError("edge " + eid + " is a loop of the stranded graph; contracting it is not supported");
    CGraph r = g;
    r.edges[i].contracted = true;
    r.tensor = false;
    return r;
}

struct ContractCheck {
    bool boundary_same = false;
    int dV = 0, dE = 0, dC = 0, dEbd = 0;
};

inline ContractCheck check_contraction(const CGraph& g, const std::string& eid)
{
    CGraph h = contract_colored(g, eid);
    auto a = cstats(g, g.full_mask()), b = cstats(h, h.full_mask());
    ContractCheck c;
    c.boundary_same = a.open_faces == boundary_by_strands(h) && a.C_bd == b.C_bd;
    c.dV = b.V - a.V;
    c.dE = b.E - a.E;
    c.dC = b.C_bd - a.C_bd;
    c.dEbd = b.E_bd - a.E_bd;
    return c;
}

// ---- colored 2-decomposition ---------------------------------------------

struct CPiece {
    std::string name;
    CGraph g;
    int m_half = -1, n_half = -1;
    int u = -1, w = -1;
    int color = -1;
};

inline CPiece make_cpiece(const CGraph& g, const std::string& name = "")
{
    CPiece p;
    p.g = g;
    p.name = name.empty() ? g.name : name;
    for (size_t i = 0; i < g.halves.size(); ++i) {
        if (g.halves[i].mark == 'm') {
            if (p.m_half >= 0) throw InvariantError("piece has two m marks");
            p.m_half = static_cast<int>(i);
        } else if (g.halves[i].mark == 'n') {
            if (p.n_half >= 0) throw InvariantError("piece has two n marks");
            p.n_half = static_cast<int>(i);
        }
    }
    if (p.m_half < 0 || p.n_half < 0) throw InvariantError("piece needs one m and one n marked half-edge");
    p.u = g.halves[p.m_half].v;
    p.w = g.halves[p.n_half].v;
    if (p.u == p.w) throw InvariantError("marked half-edges must sit on different vertices");
    p.color = g.halves[p.m_half].color;
    if (g.halves[p.n_half].color != p.color) throw InvariantError("marked half-edges must share a color");
    for (auto& e : g.edges)
        if (e.contracted) throw InvariantError("pieces may not carry contracted edges");
    return p;
}

struct CDecomposition {
    CGraph tmpl;
    std::map<std::string, CPiece> pieces;  // template edge id -> piece
};

struct CAssembled {
    CGraph hat;
    std::vector<int> offset;  // per template free edge: first bit of its piece in hat masks
};

// Cuts each template edge e=(u,w) of color c, adds the piece, and joins the
// cut ends to the marks by contracted edges of color c. Template edges
// without a piece stay as they are.
inline CAssembled assemble_colored(const CDecomposition& d)
{
    const CGraph& t = d.tmpl;
    CAssembled out;
    CGraph& h = out.hat;
    h.name = t.name + "_hat";
    h.rank = t.rank;
    h.bipartite = false;
    for (size_t v = 0; v < t.vid.size(); ++v) h.add_vertex(t.vid[v], t.sign[v]);
    h.halves = t.halves;
    std::vector<CEdge> later;
    int bit = 0;
    for (int ti : t.free_edges()) {
        auto& e = t.edges[ti];
        auto it = d.pieces.find(e.id);
        out.offset.push_back(bit);
        if (it == d.pieces.end()) {
            h.edges.push_back(e);
            ++bit;
            continue;
        }
        const CPiece& p = it->second;
        if (p.color != e.color)
            throw InvariantError("piece for edge " + e.id + " is glued along color " + std::to_string(p.color) +
                                 " but the edge has color " + std::to_string(e.color));
        if (p.g.rank != t.rank) throw InvariantError("piece rank differs from template rank");
        std::string pre = e.id + "/";
        std::vector<int> vmap(p.g.vid.size());
        for (size_t v = 0; v < p.g.vid.size(); ++v) vmap[v] = h.add_vertex(pre + p.g.vid[v], p.g.sign[v]);
        for (auto pe : p.g.edges) {
            pe.id = pre + pe.id;
            pe.a = vmap[pe.a];
            pe.b = vmap[pe.b];
            h.edges.push_back(pe);
            ++bit;
        }
        for (size_t i = 0; i < p.g.halves.size(); ++i) {
            if (static_cast<int>(i) == p.m_half || static_cast<int>(i) == p.n_half) continue;
            CHalf hh = p.g.halves[i];
            hh.id = pre + hh.id;
            hh.v = vmap[hh.v];
            h.halves.push_back(hh);
        }
        later.push_back({pre + "~u", e.a, vmap[p.u], e.color, true});
        later.push_back({pre + "~w", e.b, vmap[p.w], e.color, true});
    }
    for (auto& e : t.edges)
        if (e.contracted) later.push_back(e);
    for (auto& e : later) h.edges.push_back(e);
    h.validate();
    return out;
}

inline CGraph colored_two_sum(const CGraph& g, const std::string& e, const CGraph& a, const std::string& ep)
{
    int ie = g.edge_index(e), ia = a.edge_index(ep);
    if (ie < 0 || ia < 0) throw InvariantError("unknown edge in 2-sum");
    if (g.edges[ie].color != a.edges[ia].color) throw InvariantError("2-sum needs edges of the same color");
    if (g.edges[ie].contracted || a.edges[ia].contracted) throw InvariantError("2-sum along a contracted edge");
    CGraph pa = a;
    auto ed = pa.edges[ia];
    pa.edges.erase(pa.edges.begin() + ia);
    pa.halves.push_back({"~m", ed.a, ed.color, 'm'});
    pa.halves.push_back({"~n", ed.b, ed.color, 'n'});
    CDecomposition d;
    d.tmpl = g;
    d.pieces[e] = make_cpiece(pa);
    return assemble_colored(d).hat;
}

// A_e: the piece with its marks joined by the edge "~e".
inline CGraph cpiece_closure(const CPiece& p, bool contracted = false)
{
    CGraph a = p.g;
    a.edges.push_back({"~e", p.u, p.w, p.color, contracted});
    std::vector<CHalf> hs;
    for (size_t i = 0; i < a.halves.size(); ++i)
        if (static_cast<int>(i) != p.m_half && static_cast<int>(i) != p.n_half) hs.push_back(a.halves[i]);
    a.halves = hs;
    return a;
}

struct CPieceState {
    Mask mask = 0;
    CStats st;
    bool s1 = false;          // marks in one component
    bool same_boundary = false;
};

inline std::vector<CPieceState> classify_cpiece(const CPiece& p)
{
    std::vector<CPieceState> out;
    for (Mask m = 0; m <= p.g.full_mask(); ++m) {
        CPieceState s;
        s.mask = m;
        s.st = cstats(p.g, m);
        s.s1 = s.st.comp[p.u] == s.st.comp[p.w];
        int hm = -1, hn = -1;
        for (size_t i = 0; i < s.st.half_names.size(); ++i) {
            if (s.st.half_names[i] == p.g.halves[p.m_half].id) hm = s.st.half_class[i];
            if (s.st.half_names[i] == p.g.halves[p.n_half].id) hn = s.st.half_class[i];
        }
        s.same_boundary = hm == hn;
        out.push_back(s);
        if (p.g.num_edges() == 0) break;
    }
    return out;
}

inline long binom(int n, int k)
{
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Monomial a^k b^e c^F d^C f_var^{E_bd} prod_{p>=3} g_p^{B^p} with the
// given offsets; no_b drops the edge variable.
inline Exps cmono(const CStats& s, int rank, int dk, int dC, int dE, int slot, bool no_b = false)
{
    std::vector<std::pair<std::string, Q>> raw{
        {"a", s.k - dk}, {"c", s.F_int}, {"d", s.C_bd - dC}, {"f_var", s.E_bd - dE}};
    if (!no_b) raw.emplace_back("b", s.E);
    for (int p = 3; p <= rank; ++p) raw.emplace_back("g_" + std::to_string(p), s.B[p] - slot * binom(rank, p - 1));
    return make_exps(raw);
}

// Every open face through the m mark also carries the n mark, so the piece
// state acts like a plain edge on the strands it replaces.
inline bool strands_reach(const CPiece& p, const CStats& st)
{
    const std::string& m = p.g.halves[p.m_half].id;
    const std::string& n = p.g.halves[p.n_half].id;
    for (auto& of : st.open_faces) {
        bool hm = std::binary_search(of.halves.begin(), of.halves.end(), m);
        bool hn = std::binary_search(of.halves.begin(), of.halves.end(), n);
        if (hm && !hn) return false;
    }
    return true;
}

struct CEta {
    Poly eta1, eta2;
};

inline CEta ceta(const CPiece& p, const std::vector<CPieceState>& states)
{
    CEta r;
    int n = p.g.rank;
    for (auto& s : states) {
        if (s.s1) r.eta1.add_term(cmono(s.st, n, 1, 1, n, 1), 1);
        else r.eta2.add_term(cmono(s.st, n, 2, 2, 2 * n, 2), 1);
    }
    return r;
}

inline Poly direct_Z(const CGraph& g, bool with_b = true)
{
    return mask_sum(g.num_edges(), [&](Mask m, Poly& acc) {
        acc.add_term(cmono(cstats(g, m), g.rank, 0, 0, 0, 0, !with_b), 1);
    });
}

struct StrandedViolation {
    std::string identity;
    Mask hat_mask = 0;
    int got = 0, want = 0;
};

struct StrandedReport {
    bool condition_ok = true;           // standing condition on every piece state
    std::vector<std::string> condition_failures;
    bool proposition = false;
    bool A_split = true;                // Z_A = Z_H + x Z_{A/e} per piece
    long composites = 0;
    long violation_count = 0;
    std::map<std::string, long> by_identity;
    std::vector<StrandedViolation> violations;  // first few
    bool F_bd_computed = false;         // the F_bd inequality is not evaluated
    long loose_s1_states = 0;           // S1 piece states where some strand from m misses n
    bool passed() const { return condition_ok && proposition && A_split && violation_count == 0; }
};

inline StrandedReport verify_prop_stranded(const CDecomposition& d)
{
    StrandedReport r;
    const CGraph& t = d.tmpl;
    int n = t.rank;
    auto fe = t.free_edges();
    std::vector<const CPiece*> ps;
    for (int i : fe) {
        auto it = d.pieces.find(t.edges[i].id);
        if (it == d.pieces.end()) throw InvariantError("template edge " + t.edges[i].id + " has no piece");
        ps.push_back(&it->second);
    }
    std::vector<std::vector<CPieceState>> cls;
    std::vector<CEta> etas;
    for (auto* p : ps) {
        cls.push_back(classify_cpiece(*p));
        for (auto& s : cls.back())
            if (s.s1 != s.same_boundary) {
                r.condition_ok = false;
                r.condition_failures.push_back(p->name + " state " + std::to_string(s.mask));
            }
        for (auto& s : cls.back())
            if (s.s1 && !strands_reach(*p, s.st)) ++r.loose_s1_states;
        etas.push_back(ceta(*p, cls.back()));
        // colored Z_A = Z_H + x Z_{A/e}
        CGraph A = cpiece_closure(*p), Ac = cpiece_closure(*p, true);
        int xbit = A.num_edges() - 1;
        Poly zA = mask_sum(A.num_edges(), [&](Mask m, Poly& acc) {
            Exps e = cmono(cstats(A, m), n, 0, 0, 0, 0);
            if ((m >> xbit) & 1) e = exps_mul(exps_mul(e, make_exps({{"b", -1}})), make_exps({{"x", 1}}));
            acc.add_term(e, 1);
        });
        Poly zH = direct_Z(p->g), zAc = direct_Z(Ac);
        r.A_split = r.A_split && zA == zH + pvar("x") * zAc;
    }

    auto as = assemble_colored(d);
    const CGraph& hat = as.hat;
    Poly direct = direct_Z(hat);
    Poly prop;
    for (Mask s = 0; s <= t.full_mask(); ++s) {
        auto ts = cstats(t, s);
        Poly term = Poly::monomial(1, cmono(ts, n, 0, 0, 0, 0, true));
        for (size_t e = 0; e < fe.size(); ++e) term *= ((s >> e) & 1) ? etas[e].eta1 : etas[e].eta2;
        prop += term;

        // per composite state
        std::vector<std::vector<const CPieceState*>> opts(fe.size());
        for (size_t e = 0; e < fe.size(); ++e)
            for (auto& st : cls[e])
                if (st.s1 == (((s >> e) & 1) != 0)) opts[e].push_back(&st);
        std::vector<size_t> pick(fe.size(), 0);
        bool empty = false;
        for (auto& o : opts) empty = empty || o.empty();
        if (empty) continue;
        while (true) {
            ++r.composites;
            Mask hm = 0;
            long sk = ts.k, sC = ts.C_bd, sF = ts.F_int, sf = ts.f, sE = ts.E_bd;
            std::vector<long> sB(n + 1, 0);
            for (int p = 2; p <= n; ++p) sB[p] = ts.B[p];
            for (size_t e = 0; e < fe.size(); ++e) {
                auto* c = opts[e][pick[e]];
                hm |= c->mask << as.offset[e];
                int slots = c->s1 ? 1 : 2;
                sk += c->st.k - slots;
                sC += c->st.C_bd - slots;
                sF += c->st.F_int;
                sf += c->st.f - 2 * slots;
                sE += c->st.E_bd - n * slots;
                for (int p = 2; p <= n; ++p) sB[p] += c->st.B[p] - slots * binom(n, p - 1);
            }
            auto hs = cstats(hat, hm);
            auto rec = [&](const std::string& id, long got, long want) {
                if (got == want) return;
                ++r.violation_count;
                ++r.by_identity[id];
                if (r.violations.size() < 8) r.violations.push_back({id, hm, static_cast<int>(got), static_cast<int>(want)});
            };
            rec("k", hs.k, sk);
            rec("C_bd", hs.C_bd, sC);
            rec("F_int", hs.F_int, sF);
            rec("f", hs.f, sf);
            rec("E_bd", hs.E_bd, sE);
            for (int p = 2; p <= n; ++p) rec("B^" + std::to_string(p), hs.B[p], sB[p]);
            size_t e = 0;
            while (e < fe.size() && ++pick[e] == opts[e].size()) pick[e++] = 0;
            if (e == fe.size()) break;
        }
    }
    r.proposition = prop == direct;
    return r;
}

// ---- generators ----------------------------------------------------------

// Rank-n melon on vertices 1(+), 2(-); colors in `cut` become half-edge
// pairs instead of edges.
inline CGraph melon(int rank, unsigned cut = 0, const std::string& name = "melon")
{
    CGraph g;
    g.name = name;
    g.rank = rank;
    g.bipartite = true;
    g.tensor = true;
    g.add_vertex("1", 1);
    g.add_vertex("2", -1);
    for (int c = 0; c <= rank; ++c) {
        if ((cut >> c) & 1) {
            g.halves.push_back({"h" + std::to_string(c) + "a", 0, c, 0});
            g.halves.push_back({"h" + std::to_string(c) + "b", 1, c, 0});
        } else {
            g.edges.push_back({"e" + std::to_string(c), 0, 1, c, false});
        }
    }
    return g;
}

// Melon with its color-c edge cut into the marks; colors outside `keep`
// (other than c) become unmarked half-edge pairs.
inline CPiece melon_piece(int rank, int c, unsigned keep)
{
    CGraph g;
    g.rank = rank;
    g.bipartite = true;
    g.tensor = true;
    g.add_vertex("u", 1);
    g.add_vertex("w", -1);
    std::string nm = "mp" + std::to_string(c) + "_";
    g.halves.push_back({"hm", 0, c, 'm'});
    g.halves.push_back({"hn", 1, c, 'n'});
    for (int j = 0; j <= rank; ++j) {
        if (j == c) continue;
        if ((keep >> j) & 1) {
            g.edges.push_back({"p" + std::to_string(j), 0, 1, j, false});
            nm += std::to_string(j);
        } else {
            g.halves.push_back({"q" + std::to_string(j) + "a", 0, j, 0});
            g.halves.push_back({"q" + std::to_string(j) + "b", 1, j, 0});
        }
    }
    g.name = nm;
    return make_cpiece(g, nm);
}

struct CInstance {
    std::string label;
    CDecomposition d;
};

// Templates: the rank-3 melon with every proper subset of colors cut.
// Pieces: the melon on the edge's color keeping at most two other colors.
// Each template is paired with every piece pattern (same pattern on all
// edges) and with one mixed assignment.
inline std::vector<CInstance> melon_corpus(int rank = 3, int max_piece_edges = 2)
{
    std::vector<CInstance> out;
    unsigned all = (1u << (rank + 1)) - 1;
    std::vector<unsigned> patterns;  // subsets of {0..rank-1} relative positions
    for (unsigned s = 0; s < (1u << rank); ++s)
        if (__builtin_popcount(s) <= max_piece_edges) patterns.push_back(s);
    auto keep_for = [&](int c, unsigned pat) {
        unsigned k = 0;
        int pos = 0;
        for (int j = 0; j <= rank; ++j) {
            if (j == c) continue;
            if ((pat >> pos) & 1) k |= 1u << j;
            ++pos;
        }
        return k;
    };
    for (unsigned cut = 0; cut < all; ++cut) {
        CGraph t = melon(rank, cut, "melon_cut" + std::to_string(cut));
        for (size_t pi = 0; pi <= patterns.size(); ++pi) {
            CDecomposition d;
            d.tmpl = t;
            std::string lab = t.name;
            int j = 0;
            for (auto& e : t.edges) {
                unsigned pat = pi < patterns.size() ? patterns[pi] : patterns[(j + cut) % patterns.size()];
                auto p = melon_piece(rank, e.color, keep_for(e.color, pat));
                lab += "/" + p.name;
                d.pieces[e.id] = p;
                ++j;
            }
            out.push_back({lab, d});
        }
    }
    return out;
}

// Random properly colored graph; at least one half-edge is guaranteed.
inline CGraph random_cgraph(std::mt19937_64& rng, int rank, int vertices, int edges, int halves)
{
    CGraph g;
    g.name = "rc";
    g.rank = rank;
    for (int v = 0; v < vertices; ++v) g.add_vertex(std::to_string(v + 1));
    int nc = rank + 1;
    std::vector<std::vector<char>> used(vertices, std::vector<char>(nc, 0));
    auto ri = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    // keep one slot free so the half-edge always fits
    int rv = ri(0, vertices - 1), rc = ri(0, nc - 1);
    used[rv][rc] = 1;
    int made = 0;
    for (int tries = 0; made < edges && tries < 50 * edges + 50; ++tries) {
        int a = ri(0, vertices - 1), b = ri(0, vertices - 1), c = ri(0, nc - 1);
        if (a == b || used[a][c] || used[b][c]) continue;
        used[a][c] = used[b][c] = 1;
        g.edges.push_back({std::to_string(++made), a, b, c, false});
    }
    g.halves.push_back({"h1", rv, rc, 0});
    int hm = 1;
    for (int tries = 0; hm < halves && tries < 50 * halves + 200; ++tries) {
        int v = ri(0, vertices - 1), c = ri(0, nc - 1);
        if (used[v][c]) continue;
        used[v][c] = 1;
        g.halves.push_back({"h" + std::to_string(++hm), v, c, 0});
    }
    g.validate();
    return g;
}

} // namespace herg

#endif
