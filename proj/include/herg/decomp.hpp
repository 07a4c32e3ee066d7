#ifndef HERG_DECOMP_HPP
#define HERG_DECOMP_HPP

#include "graph.hpp"
#include "invariants.hpp"
#include "ops.hpp"
#include "poly.hpp"

#include <array>
#include <memory>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>

namespace herg {

// ---- pieces ----------------------------------------------------------------

inline const std::string kJoinEdge = "~e";  // the reconnecting edge of A_e

struct Piece {
    std::string name;
    Spec spec;
    bool flip = false;
    Herg h;
    int m_end = -1, n_end = -1;
    int u = -1, w = -1;
};

inline Piece make_piece(Spec s, bool flip = false)
{
    Piece p;
    p.name = s.name;
    p.flip = flip;
    std::string m = marked_hr(s, 'm'), n = marked_hr(s, 'n');
    p.spec = std::move(s);
    p.h = Herg(p.spec);
    p.m_end = p.h.hr_end(m);
    p.n_end = p.h.hr_end(n);
    p.u = p.h.ends()[p.m_end].vertex;
    p.w = p.h.ends()[p.n_end].vertex;
    if (p.u == p.w) throw InvariantError("piece " + p.name + ": marks share a vertex");
    auto chk = [&](const char* key, int v) {
        auto it = p.spec.header.find(key);
        if (it != p.spec.header.end() && it->second != p.h.vertices()[v].id)
            throw InvariantError("piece " + p.name + ": " + key + "=" + it->second + " but the mark sits on " +
                                 p.h.vertices()[v].id);
    };
    chk("um", p.u);
    chk("wm", p.w);
    return p;
}

inline Piece identity_piece()
{
    return make_piece(parse_spec("graph id\nvertex u: hm!m 1.1\nvertex w: 1.2 hn!n\nedge 1: twist=0\n"));
}

// The digon used for the tilde template; its three states {f,g}, {g}, {}
// mimic the three classes of piece states.
inline Piece digon_T()
{
    return make_piece(parse_spec("graph T\nvertex u: hm!m f.1 g.1\nvertex w: hn!n f.2 g.2\n"
                                 "edge f: twist=0\nedge g: twist=0\n"));
}

struct Decomposition {
    Spec tmpl;
    Herg g;
    std::map<std::string, Piece> pieces;  // template edge id -> piece

    const Piece& piece(int e) const { return pieces.at(g.edges()[e].id); }
};

inline Decomposition make_decomposition(const Spec& tmpl, std::map<std::string, Piece> pieces)
{
    Decomposition d;
    d.tmpl = tmpl;
    d.g = Herg(tmpl);
    for (auto& e : d.g.edges()) {
        if (!pieces.count(e.id)) throw InvariantError("no piece for template edge " + e.id);
        if (d.g.ends()[e.end1].vertex == d.g.ends()[e.end2].vertex)
            throw InvariantError("template edge " + e.id + " is a loop");
    }
    for (auto& [id, p] : pieces)
        if (!d.g.has_edge(id)) throw InvariantError("piece given for unknown template edge " + id);
    d.pieces = std::move(pieces);
    return d;
}

inline Decomposition tensor_decomposition(const Spec& tmpl, const Piece& p)
{
    std::map<std::string, Piece> ps;
    Herg g(tmpl);
    for (auto& e : g.edges()) ps[e.id] = p;
    return make_decomposition(tmpl, ps);
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

inline std::string dir_of(const std::string& path)
{
    auto s = path.find_last_of('/');
    return s == std::string::npos ? "" : path.substr(0, s + 1);
}

// manifest: `template <file>` then `piece <edge-id> <file> [flip]`
inline Decomposition parse_manifest(const std::string& text, const std::string& base_dir)
{
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    std::optional<Spec> tmpl;
    std::map<std::string, Piece> pieces;
    auto path = [&](const std::string& f) { return !f.empty() && f[0] == '/' ? f : base_dir + f; };
    while (std::getline(in, line)) {
        ++ln;
        std::string l = trim(line);
        if (l.empty() || l[0] == '#') continue;
        std::istringstream ws(l);
        std::string kw;
        ws >> kw;
        if (kw == "template") {
            std::string f;
            ws >> f;
            if (f.empty()) throw ParseError(ln, "template needs a file");
            tmpl = parse_spec(read_file(path(f)));
        } else if (kw == "piece") {
            std::string eid, f, opt;
            ws >> eid >> f;
            if (f.empty()) throw ParseError(ln, "piece needs an edge id and a file");
            bool flip = false;
            if (ws >> opt) {
                if (opt != "flip") throw ParseError(ln, "unknown piece option '" + opt + "'");
                flip = true;
            }
            if (pieces.count(eid)) throw ParseError(ln, "second piece for edge " + eid);
            pieces[eid] = make_piece(parse_spec(read_file(path(f))), flip);
        } else {
            throw ParseError(ln, "unknown keyword '" + kw + "'");
        }
    }
    if (!tmpl) throw ParseError(ln, "manifest has no template line");
    return make_decomposition(*tmpl, pieces);
}

// ---- assembly ----------------------------------------------------------------

struct Assembled {
    Herg hat;
    std::vector<int> owner;  // hat edge -> template edge index
    std::vector<int> local;  // hat edge -> piece edge index
};

inline Assembled assemble_hat(const Decomposition& d)
{
    Spec s = d.tmpl;
    for (auto& e : d.g.edges()) {
        auto& p = d.pieces.at(e.id);
        glue_piece(s, e.id, relabel(p.spec, e.id), p.flip);
    }
    s.name = d.tmpl.name + "_hat";
    Assembled a;
    a.hat = Herg(s);
    std::map<std::string, std::pair<int, int>> where;
    for (int i = 0; i < d.g.num_edges(); ++i) {
        auto& p = d.piece(i);
        for (int j = 0; j < p.h.num_edges(); ++j) where[d.g.edges()[i].id + "/" + p.h.edges()[j].id] = {i, j};
    }
    for (auto& e : a.hat.edges()) {
        auto it = where.find(e.id);
        if (it == where.end()) throw std::logic_error("unmapped edge " + e.id + " after assembly");
        a.owner.push_back(it->second.first);
        a.local.push_back(it->second.second);
    }
    return a;
}

inline Herg tensor_product(const Spec& g, const Piece& p) { return assemble_hat(tensor_decomposition(g, p)).hat; }

inline Mask compose_mask(const Assembled& a, const std::vector<Mask>& per_piece)
{
    Mask m = 0;
    for (size_t i = 0; i < a.owner.size(); ++i)
        if ((per_piece[a.owner[i]] >> a.local[i]) & 1) m |= Mask(1) << i;
    return m;
}

// ---- piece state classes -----------------------------------------------------

enum class Cls { S1bar, S1ddot, S2 };

inline const char* cls_name(Cls c)
{
    switch (c) {
    case Cls::S1bar: return "S1bar";
    case Cls::S1ddot: return "S1ddot";
    default: return "S2";
    }
}

struct PieceState {
    Mask mask = 0;
    GraphStats st, st_join;  // in H_e and in A_e with the joining edge kept
    Cls cls = Cls::S2;
    int dF = 0, dC = 0;
    int theta = -1;     // general-case reading, -1 where undefined
    int theta12 = -1;   // S1 reading with C+1-theta, -1 where undefined
    bool opening[4] = {false, false, false, false};  // (m,A) (m,B) (n,A) (n,B)
    bool s1() const { return cls != Cls::S2; }
};

struct PieceTable {
    Piece p;
    Herg A;        // H_e with the marks joined
    Herg A_con;    // A_e / e
    std::vector<PieceState> states;
};

inline Mask join_mask(const PieceTable& t, Mask hm)
{
    Mask r = 0;
    for (int j = 0; j < t.p.h.num_edges(); ++j)
        if ((hm >> j) & 1) r |= Mask(1) << t.A.edge_index(t.p.h.edges()[j].id);
    return r | (Mask(1) << t.A.edge_index(kJoinEdge));
}

inline PieceTable classify_states(const Piece& p)
{
    PieceTable t;
    t.p = p;
    t.A = Herg(join_marks(p.spec, kJoinEdge));
    t.A_con = contract_edge(t.A, kJoinEdge);
    check_limit(p.h.num_edges());
    Mask total = Mask(1) << p.h.num_edges();
    for (Mask m = 0; m < total; ++m) {
        PieceState s;
        s.mask = m;
        s.st = p.h.stats(m);
        s.st_join = t.A.stats(join_mask(t, m));
        s.dF = s.st_join.F_int - s.st.F_int;
        s.dC = s.st_join.C_bd - s.st.C_bd;
        auto comp = p.h.component_of_vertices(m);
        if (comp[p.u] != comp[p.w]) {
            s.cls = Cls::S2;
        } else {
            auto bc = p.h.boundary_component_of_ends(m);
            s.cls = bc[p.m_end] == bc[p.n_end] ? Cls::S1bar : Cls::S1ddot;
        }
        if (s.cls == Cls::S1bar && s.dC == 1 - s.dF && s.dF >= 0 && s.dF <= 2) s.theta = s.dF;
        if (s.cls == Cls::S1ddot && s.dC == -1 - s.dF && s.dF >= 0 && s.dF <= 1) s.theta = s.dF;
        if (s.s1() && s.dC == 1 - s.dF && s.dF >= 0 && s.dF <= 2) s.theta12 = s.dF;
        int pts[4] = {2 * p.m_end, 2 * p.m_end + 1, 2 * p.n_end, 2 * p.n_end + 1};
        for (int i = 0; i < 4; ++i) {
            int q = p.h.walk_end(pts[i], m) >> 1;
            s.opening[i] = q != p.m_end && q != p.n_end;
        }
        t.states.push_back(s);
    }
    return t;
}

// ---- monomials ----------------------------------------------------------------

inline Poly mono(int k, int b, int F, int C, int f, bool with_l = true, const std::string& bv = "b")
{
    std::vector<std::pair<std::string, Q>> raw{{"a", k}, {bv, b}, {"c", F}, {"d", C}};
    if (with_l) raw.emplace_back("l", f);
    return Poly::monomial(1, make_exps(raw));
}

inline Poly pv(const char* v, int e = 1) { return pvar(v, e); }
inline Poly adl2() { return pv("a") * pv("d") * pv("l", 2); }

struct EtaTable {
    Poly eta1, eta2;             // S1 / S2 with l
    Poly frak[3];                // S1 split by theta12
    int undefined12 = 0;         // S1 states outside the theta12 pattern
    Poly bar, bar_t[3];          // S1bar, no l
    Poly dd1, dd1_t[2], dd2;     // S1ddot, S2, no l
    int undefined_general = 0;
    Poly Z_H, Z_A, Z_Acon;       // with l; Z_A carries x for the joining edge
    Poly Z_H0, Z_Acon0;          // without l
    int n_s1bar = 0, n_s1ddot = 0, n_s2 = 0;
};

inline EtaTable eta_sums(const PieceTable& t)
{
    EtaTable r;
    for (auto& s : t.states) {
        auto& x = s.st;
        if (s.cls == Cls::S2) {
            ++r.n_s2;
            r.eta2 += mono(x.k - 2, x.e, x.F_int, x.C_bd - 2, x.f - 4);
            r.dd2 += mono(x.k - 2, x.e, x.F_int, x.C_bd - 2, 0, false);
            continue;
        }
        Poly m1 = mono(x.k - 1, x.e, x.F_int, x.C_bd - 1, x.f - 2);
        r.eta1 += m1;
        if (s.theta12 >= 0)
            r.frak[s.theta12] += m1;
        else
            ++r.undefined12;
        if (s.cls == Cls::S1bar) {
            ++r.n_s1bar;
            Poly mb = mono(x.k - 1, x.e, x.F_int, x.C_bd - 1, 0, false);
            r.bar += mb;
            if (s.theta >= 0) r.bar_t[s.theta] += mb; else ++r.undefined_general;
        } else {
            ++r.n_s1ddot;
            Poly md = mono(x.k - 1, x.e, x.F_int, x.C_bd - 2, 0, false);
            r.dd1 += md;
            if (s.theta >= 0) r.dd1_t[s.theta] += md; else ++r.undefined_general;
        }
    }
    r.Z_H = herg_Z(t.p.h);
    r.Z_H0 = herg_Z(t.p.h, {}, false);
    EdgeVars xv;
    xv.overrides[kJoinEdge] = "x";
    r.Z_A = herg_Z(t.A, xv);
    r.Z_Acon = herg_Z(t.A_con);
    r.Z_Acon0 = herg_Z(t.A_con, {}, false);
    return r;
}

// ---- incidence matrices ------------------------------------------------------

using IMat = std::vector<std::vector<int>>;

inline int rank_q(IMat m)
{
    // fraction-free elimination
    int rows = static_cast<int>(m.size());
    if (!rows) return 0;
    int cols = static_cast<int>(m[0].size());
    std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a[i][j] = m[i][j];
    int r = 0;
    mpz_class prev = 1;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (a[i][c] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(a[piv], a[r]);
        for (int i = r + 1; i < rows; ++i) {
            for (int j = c + 1; j < cols; ++j) a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
            a[i][c] = 0;
        }
        prev = a[r][c];
        ++r;
    }
    return r;
}

struct Matrices {
    std::vector<std::string> faces, points, edges;
    IMat eps, sigma;           // faces x points, points x edges
    std::vector<int> kept;     // kept point columns
    IMat eps_t, sigma_t;
    std::vector<int> in_s;     // per edge
    int tau_rank = 0, tau_rank_reduced = 0, tau_sum = 0, tau_sum_unreduced = 0;
    std::vector<int> tau_e;    // per edge, reduced
};

inline bool collinear(const IMat& m, int c1, int c2)
{
    // nonzero columns; proportional over Q
    int rows = static_cast<int>(m.size());
    int i0 = -1;
    for (int i = 0; i < rows; ++i)
        if (m[i][c1] != 0) { i0 = i; break; }
    if (i0 < 0 || m[i0][c2] == 0) return false;
    for (int i = 0; i < rows; ++i)
        if (static_cast<long>(m[i][c1]) * m[i0][c2] != static_cast<long>(m[i][c2]) * m[i0][c1]) return false;
    return true;
}

inline void reduce_matrices(Matrices& M)
{
    int P = static_cast<int>(M.points.size()), E = static_cast<int>(M.edges.size());
    int F = static_cast<int>(M.faces.size());
    M.kept.clear();
    for (int c = 0; c < P; ++c) {
        bool zero = true;
        for (int f = 0; f < F; ++f)
            if (M.eps[f][c]) zero = false;
        if (zero) continue;
        bool dup = false;
        for (int k : M.kept)
            if (collinear(M.eps, k, c)) dup = true;
        if (!dup) M.kept.push_back(c);
    }
    M.eps_t.assign(F, std::vector<int>(M.kept.size()));
    M.sigma_t.assign(M.kept.size(), std::vector<int>(E));
    for (size_t j = 0; j < M.kept.size(); ++j) {
        for (int f = 0; f < F; ++f) M.eps_t[f][j] = M.eps[f][M.kept[j]];
        for (int e = 0; e < E; ++e) M.sigma_t[j][e] = M.sigma[M.kept[j]][e];
    }
    M.tau_rank = rank_q(M.eps);
    M.tau_rank_reduced = rank_q(M.eps_t);
    M.tau_e.assign(E, 0);
    M.tau_sum = M.tau_sum_unreduced = 0;
    for (int e = 0; e < E; ++e) {
        if (!M.in_s[e]) continue;
        for (int f = 0; f < F; ++f) {
            for (size_t j = 0; j < M.kept.size(); ++j) M.tau_e[e] += M.eps_t[f][j] * M.sigma_t[j][e];
            for (int c = 0; c < P; ++c) M.tau_sum_unreduced += M.eps[f][c] * M.sigma[c][e];
        }
        M.tau_sum += M.tau_e[e];
    }
}

// The 3x8 / 8x4 example with every edge in the state.
inline Matrices example_matrices()
{
    Matrices M;
    M.faces = {"f1", "f2", "f3"};
    M.points = {"x_e", "x'_e", "x_f", "x'_f", "x_g", "x'_g", "x_h", "x'_h"};
    M.edges = {"e", "f", "g", "h"};
    M.eps = {{1, 0, 1, 0, 1, 0, 0, 1}, {0, 1, 0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 1, 1, 0}};
    M.sigma = {{1, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0},
               {0, 0, 0, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
    M.in_s = {1, 1, 1, 1};
    reduce_matrices(M);
    return M;
}

// Template point (e.1|e.2, side) -> index 0..3 into PieceState::opening.
inline int piece_point(int which, int side, bool flip, int twist)
{
    int ps = (1 - side) ^ (flip ? 1 : 0) ^ (which == 2 ? twist : 0);
    return (which == 1 ? 0 : 2) + ps;
}

// Matrices of template state s together with the chosen piece states.
inline Matrices build_matrices(const Decomposition& d, const std::vector<const PieceTable*>& tabs, Mask s,
                               const std::vector<const PieceState*>& chosen)
{
    const Herg& g = d.g;
    Matrices M;
    std::vector<int> face_of;
    g.trace(s, [](int, int) {}, [] {}, &face_of);
    int nint = g.stats(s).F_int;
    int bare = 0;
    for (auto& v : g.vertices())
        if (v.rot.empty()) ++bare;
    for (int f = 0; f < nint; ++f) M.faces.push_back("f" + std::to_string(f + 1));
    int E = g.num_edges();
    for (int e = 0; e < E; ++e) {
        M.edges.push_back(g.edges()[e].id);
        M.in_s.push_back(static_cast<int>((s >> e) & 1));
    }
    M.eps.assign(nint, std::vector<int>(4 * E, 0));
    M.sigma.assign(4 * E, std::vector<int>(E, 0));
    static const char* nm[4] = {"a_", "a'_", "b_", "b'_"};
    for (int e = 0; e < E; ++e) {
        auto& ed = g.edges()[e];
        const Piece& p = tabs[e]->p;
        for (int i = 0; i < 4; ++i) {
            int col = 4 * e + i;
            M.points.push_back(nm[i] + ed.id);
            if (!((s >> e) & 1)) continue;
            int which = i < 2 ? 1 : 2, side = i & 1;
            int end = which == 1 ? ed.end1 : ed.end2;
            bool open = chosen[e]->opening[piece_point(which, side, p.flip, ed.twist)];
            int face = face_of[2 * end + side];
            if (!open) continue;
            M.sigma[col][e] = 1;
            if (face >= 0 && face < nint - bare) M.eps[face][col] = 1;
        }
    }
    reduce_matrices(M);
    return M;
}

// ---- composite enumeration ---------------------------------------------------

struct Context {
    std::shared_ptr<const Decomposition> d;  // owned, tables point into it
    std::vector<PieceTable> tabs;
    std::vector<EtaTable> etas;
    Assembled hat;
};

inline Context make_context(const Decomposition& d)
{
    Context c;
    c.d = std::make_shared<const Decomposition>(d);
    for (int e = 0; e < d.g.num_edges(); ++e) {
        c.tabs.push_back(classify_states(c.d->piece(e)));
        c.etas.push_back(eta_sums(c.tabs.back()));
    }
    c.hat = assemble_hat(*c.d);
    return c;
}

// Calls fn(s, chosen) for each composite state; chosen[e] is an S1 state if
// e is in s and an S2 state otherwise.
inline void for_each_composite(const Context& c,
                               const std::function<void(Mask, const std::vector<const PieceState*>&)>& fn)
{
    const Herg& g = c.d->g;
    int E = g.num_edges();
    check_limit(c.hat.hat.num_edges());
    for (Mask s = 0; s <= g.full_mask(); ++s) {
        std::vector<std::vector<const PieceState*>> opts(E);
        bool empty = false;
        for (int e = 0; e < E; ++e) {
            bool want = (s >> e) & 1;
            for (auto& ps : c.tabs[e].states)
                if (ps.s1() == want) opts[e].push_back(&ps);
            if (opts[e].empty()) empty = true;
        }
        if (empty) continue;
        std::vector<size_t> idx(E, 0);
        std::vector<const PieceState*> cur(E);
        while (true) {
            for (int e = 0; e < E; ++e) cur[e] = opts[e][idx[e]];
            fn(s, cur);
            int e = 0;
            while (e < E && ++idx[e] == opts[e].size()) idx[e++] = 0;
            if (e == E) break;
        }
        if (E == 0) break;
    }
}

inline Mask hat_mask(const Context& c, const std::vector<const PieceState*>& chosen)
{
    std::vector<Mask> pm;
    for (auto* p : chosen) pm.push_back(p->mask);
    return compose_mask(c.hat, pm);
}

// Sum over template states of a^k c^F d^C l^f prod F_e prod eta2_e, with the
// tau shift taken per composite state whenever the template state has
// internal faces.
inline Poly expand_product_lemma(const Context& c)
{
    const Herg& g = c.d->g;
    int E = g.num_edges();
    std::map<Mask, Poly> joint;
    for_each_composite(c, [&](Mask s, const std::vector<const PieceState*>& ch) {
        if (g.stats(s).F_int == 0) return;
        std::vector<const PieceTable*> tp;
        for (auto& t : c.tabs) tp.push_back(&t);
        Matrices M = build_matrices(*c.d, tp, s, ch);
        Poly term(1);
        for (int e = 0; e < E; ++e) {
            auto& x = ch[e]->st;
            if (ch[e]->s1())
                term *= mono(x.k - 1, x.e, x.F_int - M.tau_e[e], x.C_bd - 1 + M.tau_e[e], x.f - 2);
            else
                term *= mono(x.k - 2, x.e, x.F_int, x.C_bd - 2, x.f - 4);
        }
        joint[s] += term;
    });
    Poly total;
    for (Mask s = 0; s <= g.full_mask(); ++s) {
        auto st = g.stats(s);
        Poly pre = mono(st.k, 0, st.F_int, st.C_bd, st.f);
        if (st.F_int == 0) {
            Poly prod(1);
            for (int e = 0; e < E; ++e) prod *= ((s >> e) & 1) ? c.etas[e].eta1 : c.etas[e].eta2;
            total += pre * prod;
        } else {
            auto it = joint.find(s);
            if (it != joint.end()) total += pre * it->second;
        }
        if (E == 0) break;
    }
    return total;
}

struct Violation {
    std::string identity;
    Mask state = 0;
    std::string detail;
};

struct CountingReport {
    long composites = 0;
    long checks = 0;
    std::vector<Violation> violations;  // first few only
    long violation_count = 0;
    int max_tau = 0;
    bool tau_zero = true;
    bool tau_rank_eq_sum = true;
};

inline void record(CountingReport& r, const std::string& id, Mask m, int got, int want)
{
    ++r.checks;
    if (got == want) return;
    ++r.violation_count;
    if (r.violations.size() < 5)
        r.violations.push_back({id, m, "got " + std::to_string(got) + ", formula " + std::to_string(want)});
}

// Split and matrix identities on every composite state.
inline CountingReport verify_counting_lemmas(const Context& c)
{
    CountingReport r;
    std::vector<const PieceTable*> tp;
    for (auto& t : c.tabs) tp.push_back(&t);
    const Herg& g = c.d->g;
    for_each_composite(c, [&](Mask s, const std::vector<const PieceState*>& ch) {
        ++r.composites;
        Mask hm = hat_mask(c, ch);
        auto H = c.hat.hat.stats(hm);
        auto S = g.stats(s);
        Matrices M = build_matrices(*c.d, tp, s, ch);
        r.max_tau = std::max(r.max_tau, M.tau_rank);
        if (M.tau_rank != 0) r.tau_zero = false;
        if (M.tau_rank != M.tau_sum || M.tau_rank != M.tau_rank_reduced) r.tau_rank_eq_sum = false;
        int n1 = 0, n2 = 0, sk = 0, sF = 0, sC = 0, sf = 0;
        for (auto* p : ch) {
            (p->s1() ? n1 : n2)++;
            sk += p->st.k;
            sF += p->st.F_int;
            sC += p->st.C_bd;
            sf += p->st.f;
        }
        record(r, "k (split)", hm, H.k, sk - n1 - 2 * n2 + S.k);
        record(r, "F_int+C_bd (split)", hm, H.F_int + H.C_bd, sF - n1 - 2 * n2 + S.F_int + sC + S.C_bd);
        record(r, "C_bd (matrices)", hm, H.C_bd, sC + S.C_bd - n1 - 2 * n2 + M.tau_sum);
        record(r, "F_int (matrices)", hm, H.F_int, sF + S.F_int - M.tau_sum);
        record(r, "f (matrices)", hm, H.f, sf + S.f - 2 * n1 - 4 * n2);
    });
    return r;
}

// ---- theorem for the simplified template ------------------------------------

struct PieceIdentities {
    bool H_identity = false;          // adl^2(F + adl^2 eta2) = Z_H
    bool A_split = false;             // Z_A = Z_H + x Z_{A/e}
    bool companion_printed = false;   // al^2(d^2F0 + cdF1 + F2 + d eta2) = Z_{A/e}
    bool companion_fixed = false;     // a(d^2F0 + cdF1 + c^2F2 + dl^2 eta2) = Z_{A/e}
};

inline PieceIdentities piece_identities(const EtaTable& t)
{
    PieceIdentities r;
    Poly a = pv("a"), c = pv("c"), d = pv("d"), l2 = pv("l", 2);
    r.H_identity = adl2() * (t.eta1 + adl2() * t.eta2) == t.Z_H;
    r.A_split = t.Z_A == t.Z_H + pv("x") * t.Z_Acon;
    r.companion_printed =
        a * l2 * (d * d * t.frak[0] + c * d * t.frak[1] + t.frak[2] + d * t.eta2) == t.Z_Acon;
    r.companion_fixed = a * (d * d * t.frak[0] + c * d * t.frak[1] + c * c * t.frak[2] + d * l2 * t.eta2) == t.Z_Acon;
    return r;
}

struct TheoremReport {
    bool factored_printed = false;   // Cramer solution of the printed system
    bool factored_fixed = false;     // f = adl^2 eta1, g = adl^2 eta2
    std::vector<PieceIdentities> pieces;
    Poly determinant;
};

inline std::string bvar(const std::string& id) { return edge_var("b", id); }

// (adl^2)^E D^E Z(hat) against Z_G with b_e -> (N_f, N_g); D = 1 - acdl^2 is
// the determinant of the printed system.
inline TheoremReport solve_theorem_prod(const Context& c, const Poly& z_hat)
{
    TheoremReport r;
    const Herg& g = c.d->g;
    int E = g.num_edges();
    Poly a = pv("a"), cc = pv("c"), d = pv("d"), l2 = pv("l", 2);
    r.determinant = Poly(1) - a * cc * d * l2;
    EdgeVars ev;
    ev.per_edge = true;
    Poly zg = herg_Z(g, ev);
    std::map<std::string, std::pair<Poly, Poly>> printed, fixed;
    for (int e = 0; e < E; ++e) {
        auto& t = c.etas[e];
        r.pieces.push_back(piece_identities(t));
        Poly P = t.Z_H;
        Poly Qp = t.Z_Acon - (adl2() * (d - cc) * t.frak[0] + a * cc * l2 * (cc - d) * t.frak[2]);
        printed[bvar(g.edges()[e].id)] = {P - adl2() * Qp, Qp - cc * P};
        fixed[bvar(g.edges()[e].id)] = {adl2() * t.eta1, adl2() * t.eta2};
    }
    r.factored_printed = adl2().pow(E) * r.determinant.pow(E) * z_hat == zg.substitute_multilinear(printed);
    r.factored_fixed = adl2().pow(E) * z_hat == zg.substitute_multilinear(fixed);
    return r;
}

// Tensor-product corollary under Eq-(6) variables, with h, h' built from
// f = adl^2 eta1 and g = adl^2 eta2. Reported only.
struct CorollaryReport {
    bool applicable = false;
    bool holds = false;
    std::string note;
};

inline CorollaryReport corollary_check(const Spec& tmpl, const Piece& p)
{
    CorollaryReport r;
    if (p.h.stats().k != 1) {
        r.note = "piece not connected";
        return r;
    }
    r.applicable = true;
    PieceTable t = classify_states(p);
    EtaTable et = eta_sums(t);
    auto sub = eq6_substitution();
    Poly fS = (adl2() * et.eta1).substitute(sub), gS = (adl2() * et.eta2).substitute(sub);
    int vH = p.h.num_vertices();
    Poly yz = pv("y") * pv("z");
    Poly h = yz.pow(2 - vH) * gS, hp = yz.pow(1 - vH) * fS;
    Herg G(tmpl);
    Herg GT = tensor_product(tmpl, p);
    Poly lhs = herg_R(GT, YConv::Y);
    int rG = G.stats().r, nG = G.stats().n;
    PowCache x1(pv("x") - Poly(1)), hc(h), hpc(hp);
    Poly rhs;
    for (Mask s = 0; s <= G.full_mask(); ++s) {
        auto st = G.stats(s);
        Poly m = Poly::monomial(1, make_exps({{"y", st.n}, {"z", st.k - st.F_int + st.n}, {"w", st.C_bd}, {"t", st.f}}));
        rhs += m * x1(rG - st.r) * hc(rG - st.r + nG - st.n) * hpc(st.r + st.n);
        if (G.num_edges() == 0) break;
    }
    r.holds = lhs == rhs;
    r.note = r.holds ? "holds" : "differs";
    return r;
}

// ---- general case -----------------------------------------------------------

struct Tilde {
    Herg gt;
    std::vector<int> f_ix, g_ix;  // per template edge: index of f_e, g_e in gt
};

inline std::string fvar(const std::string& id) { return edge_var("f", id); }
inline std::string gvar(const std::string& id) { return edge_var("g", id); }

inline Tilde build_tilde(const Spec& tmpl)
{
    Tilde t;
    t.gt = tensor_product(tmpl, digon_T());
    Herg g(tmpl);
    for (auto& e : g.edges()) {
        t.f_ix.push_back(t.gt.edge_index(e.id + "/f"));
        t.g_ix.push_back(t.gt.edge_index(e.id + "/g"));
    }
    return t;
}

inline EdgeVars tilde_vars(const Herg& g)
{
    EdgeVars ev;
    for (auto& e : g.edges()) {
        ev.overrides[e.id + "/f"] = fvar(e.id);
        ev.overrides[e.id + "/g"] = gvar(e.id);
    }
    return ev;
}

// Phi: one fewest-edge representative per class ({f,g}, {g}, {}).
inline Poly build_Phi(const Herg& g, const Tilde& t)
{
    EdgeVars ev = tilde_vars(g);
    Poly phi;
    int E = g.num_edges();
    std::vector<int> sel(E, 0);  // 0: {}, 1: {g}, 2: {f,g}
    while (true) {
        Mask m = 0;
        for (int e = 0; e < E; ++e) {
            if (sel[e] >= 1) m |= Mask(1) << t.g_ix[e];
            if (sel[e] == 2) m |= Mask(1) << t.f_ix[e];
        }
        auto st = t.gt.stats(m);
        std::vector<std::pair<std::string, Q>> raw{{"a", st.k}, {"c", st.F_int}, {"d", st.C_bd}};
        for (int i = 0; i < t.gt.num_edges(); ++i)
            if ((m >> i) & 1) raw.emplace_back(ev.name(t.gt.edges()[i].id), 1);
        phi.add_term(make_exps(raw), 1);
        int e = 0;
        while (e < E && ++sel[e] == 3) sel[e++] = 0;
        if (e == E) break;
    }
    return phi;
}

// Monomial-wise map: per edge, table[alpha][beta] replaces f^alpha g^beta.
inline Poly apply_pair_map(const Poly& p, const Herg& g, const std::vector<std::array<std::array<Poly, 2>, 2>>& table)
{
    Poly r;
    for (auto& [m, coef] : p.terms()) {
        Exps keep;
        std::map<std::string, Q> ex(m.begin(), m.end());
        for (auto& [v, e] : m) {
            bool ours = false;
            for (auto& ed : g.edges())
                if (v == fvar(ed.id) || v == gvar(ed.id)) ours = true;
            if (!ours) keep.emplace_back(v, e);
        }
        Poly acc = Poly::monomial(coef, keep);
        for (int e = 0; e < g.num_edges(); ++e) {
            auto& id = g.edges()[e].id;
            Q al = ex.count(fvar(id)) ? ex[fvar(id)] : Q(0);
            Q be = ex.count(gvar(id)) ? ex[gvar(id)] : Q(0);
            if ((al != 0 && al != 1) || (be != 0 && be != 1)) throw std::domain_error("not multilinear in f/g");
            acc *= table[e][al == 1][be == 1];
        }
        r += acc;
    }
    return r;
}

inline std::vector<std::array<std::array<Poly, 2>, 2>> frak_table(const std::vector<EtaTable>& etas)
{
    std::vector<std::array<std::array<Poly, 2>, 2>> t;
    for (auto& e : etas) {
        std::array<std::array<Poly, 2>, 2> x;
        x[1][1] = e.dd1;
        x[0][0] = e.dd2;
        x[1][0] = e.dd2;
        x[0][1] = e.bar;
        t.push_back(x);
    }
    return t;
}

// Template has no internal face in any of its states.
inline bool conforming(const Herg& g)
{
    for (Mask s = 0; s <= g.full_mask(); ++s) {
        if (g.stats(s).F_int) return false;
        if (g.num_edges() == 0) break;
    }
    return true;
}

struct GeneralReport {
    bool conforming = false;
    bool F_Phi = false;          // F(Phi) = Z(hat) at l=1
    bool H_ZG = false;           // H(Z(G~)) = Z(hat)
    bool id1 = true;             // ad(bar + d dd1 + ad dd2) = Z_H
    bool companion_printed = true;
    bool companion_fixed = true;
    bool pqr_first = true, pqr_second = true;
    bool theorem_H = false;      // experimental
    int classes = 0;
    CountingReport counting;     // general-case offsets
    int undefined_theta = 0;
};

inline GeneralReport verify_general_case(const Context& c, const Poly& z_hat0)
{
    GeneralReport r;
    const Herg& g = c.d->g;
    r.conforming = conforming(g);
    Tilde t = build_tilde(c.d->tmpl);
    Poly phi = build_Phi(g, t);
    r.classes = static_cast<int>(std::pow(3, g.num_edges()));
    auto tab = frak_table(c.etas);
    r.F_Phi = apply_pair_map(phi, g, tab) == z_hat0;
    Poly zgt = herg_Z(t.gt, tilde_vars(g), false);
    r.H_ZG = apply_pair_map(zgt, g, tab) == z_hat0;
    Poly a = pv("a"), cc = pv("c"), d = pv("d");
    std::vector<std::array<std::array<Poly, 2>, 2>> thtab;
    for (auto& e : c.etas) {
        r.undefined_theta += e.undefined_general;
        r.id1 = r.id1 && a * d * (e.bar + d * e.dd1 + a * d * e.dd2) == e.Z_H0;
        r.companion_printed = r.companion_printed &&
            a * (d * d * e.bar_t[0] + cc * d * e.bar_t[1] + cc * cc * e.bar_t[2] + d * e.dd1_t[0] +
                 cc * d * d * e.dd1_t[1] + d * e.dd2) == e.Z_Acon0;
        r.companion_fixed = r.companion_fixed &&
            a * (d * d * e.bar_t[0] + cc * d * e.bar_t[1] + cc * cc * e.bar_t[2] + d * e.dd1_t[0] +
                 cc * e.dd1_t[1] + d * e.dd2) == e.Z_Acon0;
        Poly p = a * d * e.bar, q = a * d * e.dd2, rr = a * d * e.dd1;
        r.pqr_first = r.pqr_first && p + a * d * q + d * rr == e.Z_H0;
        r.pqr_second = r.pqr_second &&
            a * d * (d - cc) * e.bar_t[0] + a * cc * (cc - d) * e.bar_t[2] + a * d * (Poly(1) - cc * d) * e.dd1_t[0] +
                cc * p + q + cc * d * rr == e.Z_Acon0;
        Poly iac = (a * cc).pow(-1);
        std::array<std::array<Poly, 2>, 2> x;
        x[1][1] = rr * iac;                                 // (r/ac) c^0
        x[0][0] = q * iac.scaled(Q(1, 2));                  // q/(2ac)
        x[1][0] = q * iac.scaled(Q(1, 2)) * cc.pow(-1);     // q/(2ac) c^{-1}
        x[0][1] = p * iac;
        thtab.push_back(x);
    }
    r.theorem_H = apply_pair_map(zgt, g, thtab) == z_hat0;

    // per-state offsets on the tilde representative
    const Herg& H = c.hat.hat;
    for_each_composite(c, [&](Mask, const std::vector<const PieceState*>& ch) {
        ++r.counting.composites;
        Mask hm = hat_mask(c, ch);
        auto HS = H.stats(hm);
        Mask tm = 0;
        int sk = 0, sC = 0, sF = 0, se = 0;
        for (int e = 0; e < g.num_edges(); ++e) {
            auto* p = ch[e];
            if (p->cls != Cls::S2) tm |= Mask(1) << t.g_ix[e];
            if (p->cls == Cls::S1ddot) tm |= Mask(1) << t.f_ix[e];
            int dk = p->cls == Cls::S2 ? 2 : 1, dc = p->cls == Cls::S1bar ? 1 : 2;
            sk += p->st.k - dk;
            sC += p->st.C_bd - dc;
            sF += p->st.F_int;
            se += p->st.e;
        }
        auto TS = t.gt.stats(tm);
        record(r.counting, "k (general)", hm, HS.k, sk + TS.k);
        record(r.counting, "C_bd (general)", hm, HS.C_bd, sC + TS.C_bd);
        record(r.counting, "F_int (general)", hm, HS.F_int, sF + TS.F_int);
        record(r.counting, "e (general)", hm, HS.e, se);
    });
    return r;
}

} // namespace herg

#endif
