#ifndef HERG_GRAPH_HPP
#define HERG_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace herg {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int ln, const std::string& m)
        : std::runtime_error("line " + std::to_string(ln) + ": " + m), line(ln) {}
};

// Raised for structurally invalid input (exit code 2 in the CLI).
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric ids compare numerically, everything else lexicographically
// (numeric ones first).
inline bool id_less(const std::string& a, const std::string& b)
{
    auto numeric = [](const std::string& s) {
        return !s.empty() && s.size() < 18 &&
               std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    bool na = numeric(a), nb = numeric(b);
    if (na && nb) return std::stoll(a) < std::stoll(b);
    if (na != nb) return na;
    return a < b;
}

// One token of a rotation: an edge end or a half-ribbon.
struct Tok {
    bool hr = false;
    std::string id;  // edge id, or full HR name ("h3")
    int which = 0;   // 1|2 for edge ends
    char mark = 0;   // 'm' | 'n' for marked HRs

    std::string str() const
    {
        if (!hr) return id + "." + std::to_string(which);
        return mark ? id + "!" + std::string(1, mark) : id;
    }
    bool operator==(const Tok& o) const
    {
        return hr == o.hr && id == o.id && which == o.which;
    }
};

// Mutable, label-level description; every operation works on this and
// rebuilds an indexed Herg.
struct Spec {
    std::string name = "g";
    std::vector<std::pair<std::string, std::vector<Tok>>> verts;
    std::map<std::string, int> twist;
    std::map<std::string, std::string> header;
};

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n = 0) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x)
    {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    bool unite(int a, int b)
    {
        a = find(a), b = find(b);
        if (a == b) return false;
        p[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

struct GraphStats {
    int v = 0, e = 0, k = 0, r = 0, n = 0, f = 0;
    int F_int = 0, F_ext = 0, C_bd = 0, t = 0, bd = 0;
};

enum Side { A = 0, B = 1 };

struct SideVisit {
    int end;
    int side;
};

struct FaceWalk {
    bool internal;
    std::vector<SideVisit> steps;
};

struct BoundaryGraph {
    std::vector<int> vertices;                 // open end indices
    std::vector<std::pair<int, int>> edges;    // one per external face
    int components = 0;
};

using Mask = std::uint64_t;

inline int max_edges_limit()
{
    if (const char* s = std::getenv("HERG_MAX_EDGES")) return std::atoi(s);
    return 20;
}

class Herg {
public:
    struct End {
        int vertex = -1;
        int pos = -1;
        int edge = -1;  // -1 for a half-ribbon
        int which = 0;
        std::string hr;
        char mark = 0;
    };
    struct Edge {
        std::string id;
        int end1 = -1, end2 = -1;
        int twist = 0;
    };
    struct Vertex {
        std::string id;
        std::vector<int> rot;
    };

    Herg() = default;
    explicit Herg(const Spec& s) { build(s); }

    const std::string& name() const { return name_; }
    const std::vector<Vertex>& vertices() const { return verts_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<End>& ends() const { return ends_; }
    const std::map<std::string, std::string>& header() const { return header_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_vertices() const { return static_cast<int>(verts_.size()); }
    Mask full_mask() const { return edges_.size() >= 64 ? ~Mask(0) : (Mask(1) << edges_.size()) - 1; }

    int edge_index(const std::string& id) const
    {
        auto it = edge_ix_.find(id);
        if (it == edge_ix_.end()) throw std::invalid_argument("unknown edge " + id);
        return it->second;
    }
    bool has_edge(const std::string& id) const { return edge_ix_.count(id) > 0; }
    int vertex_index(const std::string& id) const
    {
        for (size_t i = 0; i < verts_.size(); ++i)
            if (verts_[i].id == id) return static_cast<int>(i);
        throw std::invalid_argument("unknown vertex " + id);
    }
    int hr_end(const std::string& hr) const
    {
        for (size_t i = 0; i < ends_.size(); ++i)
            if (ends_[i].edge < 0 && ends_[i].hr == hr) return static_cast<int>(i);
        throw std::invalid_argument("unknown half-ribbon " + hr);
    }
    std::vector<int> marked_ends(char m) const
    {
        std::vector<int> r;
        for (size_t i = 0; i < ends_.size(); ++i)
            if (ends_[i].edge < 0 && ends_[i].mark == m) r.push_back(static_cast<int>(i));
        return r;
    }
    std::string end_label(int e) const
    {
        auto& x = ends_[e];
        if (x.edge < 0) return x.hr;
        return edges_[x.edge].id + "." + std::to_string(x.which);
    }

    Spec spec() const
    {
        Spec s;
        s.name = name_;
        s.header = header_;
        for (auto& v : verts_) {
            std::vector<Tok> toks;
            for (int e : v.rot) {
                auto& x = ends_[e];
                Tok t;
                if (x.edge < 0) {
                    t.hr = true;
                    t.id = x.hr;
                    t.mark = x.mark;
                } else {
                    t.id = edges_[x.edge].id;
                    t.which = x.which;
                }
                toks.push_back(t);
            }
            s.verts.emplace_back(v.id, toks);
        }
        for (auto& e : edges_) s.twist[e.id] = e.twist;
        return s;
    }

    // ---- traversal -------------------------------------------------------
    // Points are 2*end+side. kappa: vertex corners; eps: across an edge.
    int kappa(int p) const { return kappa_[p]; }
    int eps(int p) const
    {
        int e = p >> 1, s = p & 1;
        auto& ed = edges_[ends_[e].edge];
        int other = ed.end1 == e ? ed.end2 : ed.end1;
        return 2 * other + (ed.twist ? s : 1 - s);
    }
    bool end_open(int e, Mask m) const
    {
        int ed = ends_[e].edge;
        return ed < 0 || !((m >> ed) & 1);
    }

    // Traces all faces of the state given by mask. Calls on_ext(p, q) for
    // each external walk, on_int() for each internal face, and fills face
    // ids per point when requested (internal faces 0.., external -1-i).
    template <class Ext, class Int>
    void trace(Mask m, Ext&& on_ext, Int&& on_int, std::vector<int>* face_of = nullptr,
               std::vector<FaceWalk>* walks = nullptr) const
    {
        int np = 2 * static_cast<int>(ends_.size());
        std::vector<char> seen(np, 0);
        if (face_of) face_of->assign(np, 0);
        int next_ext = 0, next_int = 0;
        for (int p = 0; p < np; ++p) {
            if (seen[p] || !end_open(p >> 1, m)) continue;
            FaceWalk w{false, {}};
            int cur = p;
            seen[cur] = 1;
            w.steps.push_back({cur >> 1, cur & 1});
            if (face_of) (*face_of)[cur] = -1 - next_ext;
            while (true) {
                int q = kappa_[cur];
                seen[q] = 1;
                if (face_of) (*face_of)[q] = -1 - next_ext;
                w.steps.push_back({q >> 1, q & 1});
                if (end_open(q >> 1, m)) {
                    on_ext(p, q);
                    break;
                }
                int r = eps(q);
                seen[r] = 1;
                if (face_of) (*face_of)[r] = -1 - next_ext;
                w.steps.push_back({r >> 1, r & 1});
                cur = r;
            }
            ++next_ext;
            if (walks) walks->push_back(std::move(w));
        }
        for (int p = 0; p < np; ++p) {
            if (seen[p]) continue;
            FaceWalk w{true, {}};
            int cur = p;
            do {
                seen[cur] = 1;
                if (face_of) (*face_of)[cur] = next_int;
                w.steps.push_back({cur >> 1, cur & 1});
                int q = eps(cur);
                seen[q] = 1;
                if (face_of) (*face_of)[q] = next_int;
                w.steps.push_back({q >> 1, q & 1});
                cur = kappa_[q];
            } while (cur != p);
            ++next_int;
            on_int();
            if (walks) walks->push_back(std::move(w));
        }
        for (auto& v : verts_)
            if (v.rot.empty()) {
                on_int();
                if (walks) walks->push_back(FaceWalk{true, {}});
            }
    }

    std::vector<FaceWalk> trace_faces(Mask m) const
    {
        std::vector<FaceWalk> w;
        trace(m, [](int, int) {}, [] {}, nullptr, &w);
        return w;
    }
    std::vector<FaceWalk> trace_faces() const { return trace_faces(full_mask()); }

    BoundaryGraph boundary_graph(Mask m) const
    {
        BoundaryGraph bg;
        for (size_t e = 0; e < ends_.size(); ++e)
            if (end_open(static_cast<int>(e), m)) bg.vertices.push_back(static_cast<int>(e));
        trace(m, [&](int p, int q) { bg.edges.emplace_back(p >> 1, q >> 1); }, [] {});
        UnionFind uf(static_cast<int>(ends_.size()));
        for (auto& [a, b] : bg.edges) uf.unite(a, b);
        std::set<int> roots;
        for (int v : bg.vertices) roots.insert(uf.find(v));
        bg.components = static_cast<int>(roots.size());
        return bg;
    }
    BoundaryGraph boundary_graph() const { return boundary_graph(full_mask()); }

    GraphStats stats(Mask m) const
    {
        GraphStats s;
        s.v = num_vertices();
        s.e = __builtin_popcountll(m & full_mask());
        s.f = 0;
        for (size_t i = 0; i < ends_.size(); ++i)
            if (ends_[i].edge < 0) ++s.f;
        s.f += 2 * (num_edges() - s.e);

        UnionFind vu(s.v);
        for (int i = 0; i < num_edges(); ++i)
            if ((m >> i) & 1) vu.unite(ends_[edges_[i].end1].vertex, ends_[edges_[i].end2].vertex);
        for (int i = 0; i < s.v; ++i)
            if (vu.find(i) == i) ++s.k;
        s.r = s.v - s.k;
        s.n = s.e - s.r;

        UnionFind bu(static_cast<int>(ends_.size()));
        trace(m,
              [&](int p, int q) {
                  ++s.F_ext;
                  bu.unite(p >> 1, q >> 1);
              },
              [&] { ++s.F_int; });
        std::set<int> roots;
        for (size_t i = 0; i < ends_.size(); ++i)
            if (end_open(static_cast<int>(i), m)) roots.insert(bu.find(static_cast<int>(i)));
        s.C_bd = static_cast<int>(roots.size());
        s.t = orientable(m) ? 0 : 1;
        s.bd = boundary_components(m);
        if (s.bd != s.F_int + s.C_bd)
            throw std::logic_error("boundary count mismatch: " + std::to_string(s.bd) + " vs " +
                                   std::to_string(s.F_int) + "+" + std::to_string(s.C_bd));
        return s;
    }
    GraphStats stats() const { return stats(full_mask()); }

    // Sign propagation over retained edges; a conflict is an odd-twist cycle.
    bool orientable(Mask m) const
    {
        int n = num_vertices();
        std::vector<std::vector<std::pair<int, int>>> adj(n);
        for (int i = 0; i < num_edges(); ++i) {
            if (!((m >> i) & 1)) continue;
            int a = ends_[edges_[i].end1].vertex, b = ends_[edges_[i].end2].vertex;
            adj[a].emplace_back(b, edges_[i].twist);
            adj[b].emplace_back(a, edges_[i].twist);
        }
        std::vector<int> sign(n, -1);
        for (int s0 = 0; s0 < n; ++s0) {
            if (sign[s0] >= 0) continue;
            sign[s0] = 0;
            std::vector<int> st{s0};
            while (!st.empty()) {
                int u = st.back();
                st.pop_back();
                for (auto [w, tw] : adj[u]) {
                    int want = sign[u] ^ tw;
                    if (sign[w] < 0) {
                        sign[w] = want;
                        st.push_back(w);
                    } else if (sign[w] != want) {
                        return false;
                    }
                }
            }
        }
        return true;
    }

    // Counts boundary circles of the surface, gluing the two sides of every
    // open end through its free segment. Independent of trace().
    int boundary_components(Mask m) const
    {
        int np = 2 * static_cast<int>(ends_.size());
        UnionFind uf(np);
        for (int p = 0; p < np; ++p) {
            uf.unite(p, kappa_[p]);
            if (end_open(p >> 1, m))
                uf.unite(p, p ^ 1);
            else
                uf.unite(p, eps(p));
        }
        int c = 0;
        for (int p = 0; p < np; ++p)
            if (uf.find(p) == p) ++c;
        for (auto& v : verts_)
            if (v.rot.empty()) ++c;
        return c;
    }

    std::vector<int> component_of_vertices(Mask m) const
    {
        UnionFind vu(num_vertices());
        for (int i = 0; i < num_edges(); ++i)
            if ((m >> i) & 1) vu.unite(ends_[edges_[i].end1].vertex, ends_[edges_[i].end2].vertex);
        std::vector<int> c(num_vertices());
        for (int i = 0; i < num_vertices(); ++i) c[i] = vu.find(i);
        return c;
    }

    // Boundary-graph component root for each open end (-1 for closed ends).
    std::vector<int> boundary_component_of_ends(Mask m) const
    {
        UnionFind bu(static_cast<int>(ends_.size()));
        trace(m, [&](int p, int q) { bu.unite(p >> 1, q >> 1); }, [] {});
        std::vector<int> r(ends_.size(), -1);
        for (size_t i = 0; i < ends_.size(); ++i)
            if (end_open(static_cast<int>(i), m)) r[i] = bu.find(static_cast<int>(i));
        return r;
    }

    // Where the external walk starting at point p finishes.
    int walk_end(int p, Mask m) const
    {
        int cur = p;
        while (true) {
            int q = kappa_[cur];
            if (end_open(q >> 1, m)) return q;
            cur = eps(q);
        }
    }

    std::string to_text() const
    {
        std::ostringstream o;
        o << "graph " << name_ << "\n";
        for (auto& [k, v] : header_) o << "# " << k << "=" << v << "\n";
        for (auto& v : verts_) {
            o << "vertex " << v.id << ":";
            for (int e : v.rot) {
                o << " " << end_label(e);
                if (ends_[e].edge < 0 && ends_[e].mark) o << "!" << ends_[e].mark;
            }
            o << "\n";
        }
        for (auto& e : edges_) o << "edge " << e.id << ": twist=" << e.twist << "\n";
        return o.str();
    }

private:
    void build(const Spec& s)
    {
        name_ = s.name;
        header_ = s.header;
        std::map<std::string, std::pair<int, int>> seen_end;  // edge -> ends
        std::set<std::string> hrs;
        std::set<std::string> vids;
        for (auto& [vid, toks] : s.verts) {
            if (!vids.insert(vid).second) throw InvariantError("duplicate vertex " + vid);
            Vertex v;
            v.id = vid;
            for (auto& t : toks) {
                End x;
                x.vertex = static_cast<int>(verts_.size());
                x.pos = static_cast<int>(v.rot.size());
                if (t.hr) {
                    if (!hrs.insert(t.id).second) throw InvariantError("duplicate half-ribbon " + t.id);
                    x.hr = t.id;
                    x.mark = t.mark;
                } else {
                    if (t.which != 1 && t.which != 2) throw InvariantError("bad end " + t.str());
                    auto& pr = seen_end.try_emplace(t.id, -1, -1).first->second;
                    int& slot = t.which == 1 ? pr.first : pr.second;
                    if (slot >= 0) throw InvariantError("duplicate end " + t.str());
                    slot = static_cast<int>(ends_.size());
                    x.which = t.which;
                }
                v.rot.push_back(static_cast<int>(ends_.size()));
                ends_.push_back(x);
            }
            verts_.push_back(std::move(v));
        }
        std::vector<std::string> ids;
        for (auto& [id, pr] : seen_end) {
            if (pr.first < 0 || pr.second < 0) throw InvariantError("edge " + id + " has a single end");
            ids.push_back(id);
        }
        for (auto& [id, tw] : s.twist)
            if (!seen_end.count(id)) throw InvariantError("edge " + id + " declared but has no ends");
        std::sort(ids.begin(), ids.end(), id_less);
        for (auto& id : ids) {
            Edge e;
            e.id = id;
            e.end1 = seen_end[id].first;
            e.end2 = seen_end[id].second;
            auto it = s.twist.find(id);
            e.twist = it == s.twist.end() ? 0 : it->second;
            if (e.twist != 0 && e.twist != 1) throw InvariantError("twist must be 0 or 1");
            int ix = static_cast<int>(edges_.size());
            ends_[e.end1].edge = ix;
            ends_[e.end2].edge = ix;
            edge_ix_[id] = ix;
            edges_.push_back(e);
        }
        kappa_.assign(2 * ends_.size(), -1);
        for (auto& v : verts_) {
            int d = static_cast<int>(v.rot.size());
            for (int i = 0; i < d; ++i) {
                int a = v.rot[i], b = v.rot[(i + 1) % d];
                kappa_[2 * a + 1] = 2 * b;
                kappa_[2 * b] = 2 * a + 1;
            }
        }
    }

    std::string name_;
    std::map<std::string, std::string> header_;
    std::vector<Vertex> verts_;
    std::vector<Edge> edges_;
    std::vector<End> ends_;
    std::map<std::string, int> edge_ix_;
    std::vector<int> kappa_;
};

// ---- .herg text format ----------------------------------------------------

inline std::string trim(const std::string& s)
{
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline Tok parse_tok(const std::string& raw, int ln)
{
    Tok t;
    auto dot = raw.find('.');
    if (dot != std::string::npos) {
        t.id = raw.substr(0, dot);
        std::string w = raw.substr(dot + 1);
        if (t.id.empty() || (w != "1" && w != "2")) throw ParseError(ln, "bad edge end '" + raw + "'");
        t.which = w[0] - '0';
        return t;
    }
    if (raw.size() < 2 || raw[0] != 'h') throw ParseError(ln, "bad token '" + raw + "'");
    t.hr = true;
    auto bang = raw.find('!');
    t.id = raw.substr(0, bang);
    if (bang != std::string::npos) {
        std::string mk = raw.substr(bang + 1);
        if (mk != "m" && mk != "n") throw ParseError(ln, "bad mark '" + raw + "'");
        t.mark = mk[0];
    }
    if (t.id.size() < 2) throw ParseError(ln, "bad half-ribbon '" + raw + "'");
    return t;
}

// Header keys may be given as `key=value` words on the graph line or as
// `# key=value` comment lines.
inline Spec parse_spec(const std::string& text)
{
    Spec s;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    bool have_graph = false;
    std::set<std::string> declared;
    while (std::getline(in, line)) {
        ++ln;
        std::string l = trim(line);
        if (l.empty()) continue;
        if (l[0] == '#') {
            std::string body = trim(l.substr(1));
            auto eq = body.find('=');
            if (eq != std::string::npos && body.find(' ') == std::string::npos)
                s.header[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        auto hash = l.find('#');
        if (hash != std::string::npos) l = trim(l.substr(0, hash));
        std::istringstream ws(l);
        std::string kw;
        ws >> kw;
        if (kw == "graph") {
            if (have_graph) throw ParseError(ln, "second graph line");
            have_graph = true;
            ws >> s.name;
            std::string kv;
            while (ws >> kv) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) throw ParseError(ln, "bad header '" + kv + "'");
                s.header[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
        } else if (kw == "vertex") {
            std::string rest;
            std::getline(ws, rest);
            auto colon = rest.find(':');
            if (colon == std::string::npos) throw ParseError(ln, "vertex line needs ':'");
            std::string vid = trim(rest.substr(0, colon));
            if (vid.empty()) throw ParseError(ln, "empty vertex id");
            std::istringstream ts(rest.substr(colon + 1));
            std::vector<Tok> toks;
            std::string tk;
            while (ts >> tk) toks.push_back(parse_tok(tk, ln));
            s.verts.emplace_back(vid, toks);
        } else if (kw == "edge") {
            std::string rest;
            std::getline(ws, rest);
            auto colon = rest.find(':');
            if (colon == std::string::npos) throw ParseError(ln, "edge line needs ':'");
            std::string eid = trim(rest.substr(0, colon));
            std::string tw = trim(rest.substr(colon + 1));
            if (tw != "twist=0" && tw != "twist=1") throw ParseError(ln, "edge needs twist=0|1");
            if (!declared.insert(eid).second) throw ParseError(ln, "edge " + eid + " declared twice");
            s.twist[eid] = tw.back() - '0';
        } else {
            throw ParseError(ln, "unknown keyword '" + kw + "'");
        }
    }
    if (!have_graph) throw ParseError(ln, "missing graph line");
    // pairing checks with line-level context
    std::map<std::string, int> count;
    for (auto& [v, toks] : s.verts)
        for (auto& t : toks)
            if (!t.hr) {
                if (++count[t.str()] > 1) throw ParseError(ln, "duplicate end " + t.str());
            }
    for (auto& [eid, tw] : s.twist) {
        if (!count.count(eid + ".1") || !count.count(eid + ".2"))
            throw ParseError(ln, "dangling edge " + eid);
    }
    for (auto& [end, c] : count) {
        std::string eid = end.substr(0, end.find('.'));
        if (!count.count(eid + ".1") || !count.count(eid + ".2"))
            throw ParseError(ln, "edge " + eid + " has a single end");
    }
    return s;
}

inline Herg parse_graph(const std::string& text)
{
    Spec s = parse_spec(text);
    return Herg(s);
}

} // namespace herg

#endif
