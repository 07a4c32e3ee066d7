#ifndef HERG_OPS_HPP
#define HERG_OPS_HPP

#include "graph.hpp"

namespace herg {

namespace detail {

inline std::pair<int, int> find_tok(const Spec& s, const Tok& t)
{
    for (size_t v = 0; v < s.verts.size(); ++v)
        for (size_t i = 0; i < s.verts[v].second.size(); ++i)
            if (s.verts[v].second[i] == t) return {static_cast<int>(v), static_cast<int>(i)};
    throw std::invalid_argument("token not found: " + t.str());
}

inline Tok end_tok(const std::string& e, int w)
{
    Tok t;
    t.id = e;
    t.which = w;
    return t;
}

inline Tok hr_tok(const std::string& h)
{
    Tok t;
    t.hr = true;
    t.id = h;
    return t;
}

// rotation starting right after position i, without the token at i
inline std::vector<Tok> after(const std::vector<Tok>& rot, int i)
{
    std::vector<Tok> r;
    int d = static_cast<int>(rot.size());
    for (int k = 1; k < d; ++k) r.push_back(rot[(i + k) % d]);
    return r;
}

inline std::set<std::string> all_hr_names(const Spec& s)
{
    std::set<std::string> r;
    for (auto& [v, toks] : s.verts)
        for (auto& t : toks)
            if (t.hr) r.insert(t.id);
    return r;
}

inline std::string fresh_hr(const Spec& s, std::string base)
{
    auto used = all_hr_names(s);
    while (used.count(base)) base += "'";
    return base;
}

inline std::string fresh_vertex(const Spec& s, std::string base)
{
    std::set<std::string> used;
    for (auto& [v, t] : s.verts) used.insert(v);
    while (used.count(base)) base += "'";
    return base;
}

inline void require_edge(const Spec& s, const std::string& e)
{
    if (!s.twist.count(e)) {
        // edges without explicit twist lines still exist if their ends do
        for (auto& [v, toks] : s.verts)
            for (auto& t : toks)
                if (!t.hr && t.id == e) return;
        throw std::invalid_argument("unknown edge " + e);
    }
}

inline int twist_of(const Spec& s, const std::string& e)
{
    auto it = s.twist.find(e);
    return it == s.twist.end() ? 0 : it->second;
}

} // namespace detail

// Reverse the rotation at v and toggle the twist of every edge with exactly
// one end there.
inline void flip_vertex(Spec& s, int v)
{
    auto& rot = s.verts[v].second;
    std::reverse(rot.begin(), rot.end());
    std::map<std::string, int> cnt;
    for (auto& t : rot)
        if (!t.hr) ++cnt[t.id];
    for (auto& [e, c] : cnt)
        if (c == 1) s.twist[e] = 1 - detail::twist_of(s, e);
}

inline void mirror(Spec& s)
{
    for (auto& [v, rot] : s.verts) std::reverse(rot.begin(), rot.end());
}

inline Spec delete_edge(Spec s, const std::string& e)
{
    detail::require_edge(s, e);
    for (auto& [v, toks] : s.verts)
        toks.erase(std::remove_if(toks.begin(), toks.end(),
                                  [&](const Tok& t) { return !t.hr && t.id == e; }),
                   toks.end());
    s.twist.erase(e);
    return s;
}

inline std::string cut_name(const std::string& e, int w) { return "h" + e + "_" + std::to_string(w); }

// Ends become half-ribbons in place. Returns the two new HR names.
inline std::pair<std::string, std::string> cut_edge_inplace(Spec& s, const std::string& e)
{
    detail::require_edge(s, e);
    std::string names[2];
    for (int w = 1; w <= 2; ++w) {
        auto [v, i] = detail::find_tok(s, detail::end_tok(e, w));
        names[w - 1] = detail::fresh_hr(s, cut_name(e, w));
        s.verts[v].second[i] = detail::hr_tok(names[w - 1]);
    }
    s.twist.erase(e);
    return {names[0], names[1]};
}

inline Spec cut_edge(Spec s, const std::string& e)
{
    cut_edge_inplace(s, e);
    return s;
}

inline Spec contract_edge(Spec s, const std::string& e)
{
    detail::require_edge(s, e);
    auto [v1, i1] = detail::find_tok(s, detail::end_tok(e, 1));
    auto [v2, i2] = detail::find_tok(s, detail::end_tok(e, 2));
    if (v1 != v2) {
        if (detail::twist_of(s, e)) {
            flip_vertex(s, v2);
            std::tie(v2, i2) = detail::find_tok(s, detail::end_tok(e, 2));
        }
        auto merged = detail::after(s.verts[v1].second, i1);
        auto rest = detail::after(s.verts[v2].second, i2);
        merged.insert(merged.end(), rest.begin(), rest.end());
        s.verts[v1].second = merged;
        s.verts.erase(s.verts.begin() + v2);
        s.twist.erase(e);
        return s;
    }
    // loop: rotation (e.1, P, e.2, Q)
    int tw = detail::twist_of(s, e);
    auto rot = s.verts[v1].second;
    int d = static_cast<int>(rot.size());
    std::vector<Tok> P, Q;
    for (int k = (i1 + 1) % d; k != i2; k = (k + 1) % d) P.push_back(rot[k]);
    for (int k = (i2 + 1) % d; k != i1; k = (k + 1) % d) Q.push_back(rot[k]);
    s.twist.erase(e);
    if (!tw) {
        // annulus: two boundary circles give two discs
        s.verts[v1].second = P.empty() ? Q : P;
        std::vector<Tok> other = P.empty() ? std::vector<Tok>{} : Q;
        std::string nv = detail::fresh_vertex(s, s.verts[v1].first + "'");
        s.verts.insert(s.verts.begin() + v1 + 1, {nv, other});
        return s;
    }
    if (P.empty() || Q.empty()) {
        s.verts[v1].second = P.empty() ? Q : P;
        return s;
    }
    // Moebius band: one circle, the Q side comes back reversed
    std::map<std::string, int> inQ;
    for (auto& t : Q)
        if (!t.hr) ++inQ[t.id];
    for (auto& [id, c] : inQ)
        if (c == 1) s.twist[id] = 1 - detail::twist_of(s, id);
    std::vector<Tok> merged = P;
    merged.insert(merged.end(), Q.rbegin(), Q.rend());
    s.verts[v1].second = merged;
    return s;
}

inline Herg delete_edge(const Herg& g, const std::string& e) { return Herg(delete_edge(g.spec(), e)); }
inline Herg cut_edge(const Herg& g, const std::string& e) { return Herg(cut_edge(g.spec(), e)); }
inline Herg contract_edge(const Herg& g, const std::string& e) { return Herg(contract_edge(g.spec(), e)); }

inline void disjoint_union_into(Spec& a, const Spec& b)
{
    std::set<std::string> vs, hs = detail::all_hr_names(a), hb = detail::all_hr_names(b);
    for (auto& [v, t] : a.verts) vs.insert(v);
    for (auto& [v, t] : b.verts)
        if (vs.count(v)) throw InvariantError("label clash on vertex " + v);
    for (auto& h : hb)
        if (hs.count(h)) throw InvariantError("label clash on half-ribbon " + h);
    std::set<std::string> ea;
    for (auto& [v, toks] : a.verts)
        for (auto& t : toks)
            if (!t.hr) ea.insert(t.id);
    for (auto& [v, toks] : b.verts)
        for (auto& t : toks)
            if (!t.hr && ea.count(t.id)) throw InvariantError("label clash on edge " + t.id);
    a.verts.insert(a.verts.end(), b.verts.begin(), b.verts.end());
    for (auto& [e, tw] : b.twist) a.twist[e] = tw;
}

inline Spec relabel(const Spec& s, const std::string& prefix)
{
    Spec r;
    r.name = s.name;
    r.header = s.header;
    for (auto& [v, toks] : s.verts) {
        std::vector<Tok> nt;
        for (auto t : toks) {
            t.id = t.hr ? "h" + prefix + "/" + t.id.substr(1) : prefix + "/" + t.id;
            nt.push_back(t);
        }
        r.verts.emplace_back(prefix + "/" + v, nt);
    }
    for (auto& [e, tw] : s.twist) r.twist[prefix + "/" + e] = tw;
    return r;
}

// Merge the host vertices of two half-ribbons: (x, g1..gn) and (y, f1..fm)
// become (g1..gn, f1..fm), keeping the first vertex's id.
inline void glue_hrs(Spec& s, const std::string& x, const std::string& y)
{
    auto [v1, i1] = detail::find_tok(s, detail::hr_tok(x));
    auto [v2, i2] = detail::find_tok(s, detail::hr_tok(y));
    if (v1 == v2) throw InvariantError("gluing two half-ribbons of one vertex");
    auto merged = detail::after(s.verts[v1].second, i1);
    auto rest = detail::after(s.verts[v2].second, i2);
    merged.insert(merged.end(), rest.begin(), rest.end());
    s.verts[v1].second = merged;
    s.verts.erase(s.verts.begin() + v2);
}

inline std::string marked_hr(const Spec& s, char m)
{
    std::string found;
    for (auto& [v, toks] : s.verts)
        for (auto& t : toks)
            if (t.hr && t.mark == m) {
                if (!found.empty()) throw InvariantError(std::string("more than one !") + m + " mark");
                found = t.id;
            }
    if (found.empty()) throw InvariantError(std::string("missing !") + m + " mark");
    return found;
}

inline int vertex_of_hr(const Spec& s, const std::string& h) { return detail::find_tok(s, detail::hr_tok(h)).first; }

// Replace template edge e of g by the (already relabelled) piece.
inline void glue_piece(Spec& g, const std::string& e, Spec piece, bool flip)
{
    int tw = detail::twist_of(g, e);
    {
        auto [v1, i1] = detail::find_tok(g, detail::end_tok(e, 1));
        auto [v2, i2] = detail::find_tok(g, detail::end_tok(e, 2));
        if (v1 == v2) throw InvariantError("template edge " + e + " is a loop");
    }
    std::string m = marked_hr(piece, 'm'), n = marked_hr(piece, 'n');
    if (vertex_of_hr(piece, m) == vertex_of_hr(piece, n))
        throw InvariantError("piece marks share a vertex");
    if (flip) mirror(piece);
    if (tw) flip_vertex(piece, vertex_of_hr(piece, n));
    auto [x, y] = cut_edge_inplace(g, e);
    disjoint_union_into(g, piece);
    glue_hrs(g, x, m);
    glue_hrs(g, y, n);
}

// Piece from (A, e'): cut e' and mark its ends.
inline Spec piece_from(Spec a, const std::string& ep)
{
    auto [v1, i1] = detail::find_tok(a, detail::end_tok(ep, 1));
    auto [v2, i2] = detail::find_tok(a, detail::end_tok(ep, 2));
    if (v1 == v2) throw InvariantError("distinguished edge is a loop");
    if (detail::twist_of(a, ep)) {
        flip_vertex(a, v2);
        std::tie(v2, i2) = detail::find_tok(a, detail::end_tok(ep, 2));
    }
    auto [x, y] = cut_edge_inplace(a, ep);
    auto mark = [&](const std::string& h, char c) {
        auto [v, i] = detail::find_tok(a, detail::hr_tok(h));
        a.verts[v].second[i].mark = c;
    };
    mark(x, 'm');
    mark(y, 'n');
    a.header["um"] = a.verts[v1].first;
    a.header["wm"] = a.verts[v2].first;
    return a;
}

// The other reading of a piece, with the distinguished edge deleted.
inline Spec piece_by_deletion(const Spec& a, const std::string& ep) { return delete_edge(a, ep); }

// Inverse of piece_from: join the marks into an untwisted edge named ep.
inline Spec join_marks(Spec h, const std::string& ep)
{
    std::string m = marked_hr(h, 'm'), n = marked_hr(h, 'n');
    auto [v1, i1] = detail::find_tok(h, detail::hr_tok(m));
    auto [v2, i2] = detail::find_tok(h, detail::hr_tok(n));
    h.verts[v1].second[i1] = detail::end_tok(ep, 1);
    h.verts[v2].second[i2] = detail::end_tok(ep, 2);
    h.twist[ep] = 0;
    return h;
}

inline Spec two_sum(Spec g, const std::string& e, const Spec& a, const std::string& ep)
{
    glue_piece(g, e, relabel(piece_from(a, ep), "a"), false);
    return g;
}

} // namespace herg

#endif
