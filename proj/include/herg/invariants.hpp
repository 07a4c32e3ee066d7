#ifndef HERG_INVARIANTS_HPP
#define HERG_INVARIANTS_HPP

#include "graph.hpp"
#include "ops.hpp"
#include "poly.hpp"

#include <cstdlib>
#include <functional>
#include <thread>

namespace herg {

inline int& thread_count()
{
    static int n = [] {
        const char* s = std::getenv("HERG_THREADS");
        int v = s ? std::atoi(s) : 1;
        return v > 0 ? v : 1;
    }();
    return n;
}

inline void check_limit(int e)
{
    int lim = max_edges_limit();
    if (e > lim || e > 62)
        throw std::length_error("state enumeration needs 2^" + std::to_string(e) +
                                " states; raise HERG_MAX_EDGES to at least " + std::to_string(e));
}

// Sum of term(m) over masks 0..2^bits-1. Chunks are contiguous mask ranges
// and partial sums are added back in chunk order, so the result does not
// depend on the thread count.
inline Poly mask_sum(int bits, const std::function<void(Mask, Poly&)>& term)
{
    check_limit(bits);
    Mask total = Mask(1) << bits;
    int nt = std::max(1, std::min<int>(thread_count(), static_cast<int>(std::min<Mask>(total, 1 << 20))));
    std::vector<Poly> part(nt);
    auto run = [&](int i) {
        Mask lo = total * i / nt, hi = total * (i + 1) / nt;
        for (Mask m = lo; m < hi; ++m) term(m, part[i]);
    };
    if (nt == 1) {
        run(0);
    } else {
        std::vector<std::thread> ts;
        for (int i = 0; i < nt; ++i) ts.emplace_back(run, i);
        for (auto& t : ts) t.join();
    }
    Poly r;
    for (auto& p : part) r += p;
    return r;
}

inline Poly state_sum(const Herg& g, const std::function<void(Mask, const GraphStats&, Poly&)>& term)
{
    return mask_sum(g.num_edges(), [&](Mask m, Poly& acc) { term(m, g.stats(m), acc); });
}

struct PowCache {
    Poly base;
    std::vector<Poly> pw;
    explicit PowCache(Poly b) : base(std::move(b)), pw{Poly(1)} {}
    const Poly& operator()(int n)
    {
        if (n < 0) throw std::domain_error("negative power in cache");
        while (static_cast<int>(pw.size()) <= n) pw.push_back(pw.back() * base);
        return pw[n];
    }
};

inline std::string edge_var(const std::string& prefix, const std::string& id) { return prefix + "_" + id; }

// Edge variable naming: common variable, or one per edge.
struct EdgeVars {
    std::string common = "b";
    bool per_edge = false;
    std::string prefix = "b";
    std::map<std::string, std::string> overrides;  // edge id -> variable

    std::string name(const std::string& id) const
    {
        auto it = overrides.find(id);
        if (it != overrides.end()) return it->second;
        return per_edge ? edge_var(prefix, id) : common;
    }
};

inline void require_closed(const Herg& g)
{
    for (auto& e : g.ends())
        if (e.edge < 0) throw InvariantError("graph has half-ribbons; the classical invariant needs a closed graph");
}

enum class YConv { Y, Ym1 };

// Eq-(1) style: (x-1)^{r(G)-r(s)} y^{n} z^{k-bd+n} w^{t}
inline Poly br_R(const Herg& g)
{
    require_closed(g);
    int rG = g.stats().r;
    std::vector<Poly> xm;
    PowCache xc(pvar("x") - Poly(1));
    for (int i = 0; i <= rG; ++i) xm.push_back(xc(i));
    return state_sum(g, [&](Mask, const GraphStats& s, Poly& acc) {
        Exps m = make_exps({{"y", s.n}, {"z", s.k - s.bd + s.n}, {"w", s.t}});
        for (auto& [e, c] : xm[rG - s.r].terms()) acc.add_term(exps_mul(e, m), c);
    });
}

inline Poly ribbon_Z(const Herg& g, const EdgeVars& ev = {})
{
    require_closed(g);
    return state_sum(g, [&](Mask msk, const GraphStats& s, Poly& acc) {
        std::vector<std::pair<std::string, Q>> raw{{"a", s.k}, {"c", s.bd}};
        for (int i = 0; i < g.num_edges(); ++i)
            if ((msk >> i) & 1) raw.emplace_back(ev.name(g.edges()[i].id), 1);
        acc.add_term(make_exps(raw), 1);
    });
}

inline Poly herg_R(const Herg& g, YConv yc = YConv::Ym1)
{
    int rG = g.stats().r, nmax = g.num_edges();
    PowCache xc(pvar("x") - Poly(1));
    PowCache yc1(yc == YConv::Ym1 ? pvar("y") - Poly(1) : pvar("y"));
    for (int i = 0; i <= rG; ++i) xc(i);
    for (int i = 0; i <= nmax; ++i) yc1(i);
    return state_sum(g, [&](Mask, const GraphStats& s, Poly& acc) {
        Exps m = make_exps({{"z", s.k - s.F_int + s.n}, {"w", s.C_bd}, {"t", s.f}});
        for (auto& [ex, cx] : xc.pw[rG - s.r].terms())
            for (auto& [ey, cy] : yc1.pw[s.n].terms()) acc.add_term(exps_mul(exps_mul(ex, ey), m), cx * cy);
    });
}

inline Poly herg_Z(const Herg& g, const EdgeVars& ev = {}, bool with_l = true)
{
    return state_sum(g, [&](Mask msk, const GraphStats& s, Poly& acc) {
        std::vector<std::pair<std::string, Q>> raw{{"a", s.k}, {"c", s.F_int}, {"d", s.C_bd}};
        if (with_l) raw.emplace_back("l", s.f);
        for (int i = 0; i < g.num_edges(); ++i)
            if ((msk >> i) & 1) raw.emplace_back(ev.name(g.edges()[i].id), 1);
        acc.add_term(make_exps(raw), 1);
    });
}

inline Poly tutte(const Herg& g)
{
    int rG = g.stats().r, nmax = g.num_edges();
    PowCache xc(pvar("x") - Poly(1)), yc(pvar("y") - Poly(1));
    for (int i = 0; i <= rG; ++i) xc(i);
    for (int i = 0; i <= nmax; ++i) yc(i);
    return state_sum(g, [&](Mask, const GraphStats& s, Poly& acc) {
        acc += xc.pw[rG - s.r] * yc.pw[s.n];
    });
}

struct ConvertVerdict {
    bool holds = false;         // with y^{n(s)}
    bool holds_ym1 = false;     // with (y-1)^{n(s)}, reported only
    Poly lhs, rhs;
};

inline std::map<std::string, Poly> eq6_substitution()
{
    Poly x1 = pvar("x") - Poly(1);
    return {{"a", x1 * pvar("y") * pvar("z", 2)},
            {"b", pvar("y") * pvar("z")},
            {"c", pvar("z", -1)},
            {"d", pvar("w")},
            {"l", pvar("t")}};
}

// (x-1)^{k}(yz)^{v} R = Z(subs), multiplied out so no non-monomial is inverted.
inline ConvertVerdict convert_check(const Herg& g)
{
    auto st = g.stats();
    Poly pre = (pvar("x") - Poly(1)).pow(st.k) * (pvar("y") * pvar("z")).pow(st.v);
    ConvertVerdict v;
    v.rhs = herg_Z(g).substitute(eq6_substitution());
    v.lhs = pre * herg_R(g, YConv::Y);
    v.holds = v.lhs == v.rhs;
    v.holds_ym1 = pre * herg_R(g, YConv::Ym1) == v.rhs;
    return v;
}

// Closed graphs: R(x,y,z,w=1) against Z((x-1)yz^2, yz, 1/z).
inline ConvertVerdict convert_check_closed(const Herg& g)
{
    require_closed(g);
    auto st = g.stats();
    Poly pre = (pvar("x") - Poly(1)).pow(st.k) * (pvar("y") * pvar("z")).pow(st.v);
    ConvertVerdict v;
    v.lhs = pre * br_R(g).substitute({{"w", Poly(1)}});
    auto sub = eq6_substitution();
    v.rhs = ribbon_Z(g).substitute({{"a", sub["a"]}, {"b", sub["b"]}, {"c", sub["c"]}});
    v.holds = v.lhs == v.rhs;
    v.holds_ym1 = v.holds;
    return v;
}

inline bool is_loop(const Herg& g, int e)
{
    auto& ed = g.edges()[e];
    return g.ends()[ed.end1].vertex == g.ends()[ed.end2].vertex;
}

inline bool is_bridge(const Herg& g, int e)
{
    return g.stats(g.full_mask() & ~(Mask(1) << e)).k != g.stats().k;
}

struct DCResult {
    int ordinary = 0, passed = 0;
    std::vector<std::string> failed;
};

inline DCResult deletion_contraction(const Herg& g)
{
    DCResult r;
    Poly R = br_R(g);
    for (int i = 0; i < g.num_edges(); ++i) {
        if (is_loop(g, i) || is_bridge(g, i)) continue;
        ++r.ordinary;
        auto& id = g.edges()[i].id;
        if (R == br_R(delete_edge(g, id)) + br_R(contract_edge(g, id)))
            ++r.passed;
        else
            r.failed.push_back(id);
    }
    return r;
}

} // namespace herg

#endif
