#ifndef HERG_IO_HPP
#define HERG_IO_HPP

// JSON views of polynomials and reports. nlohmann::json keeps object keys
// sorted, which gives the canonical key order; polynomial terms keep the
// graded-lex order of Poly.

#include "decomp.hpp"
#include "stranded.hpp"

#include <nlohmann/json.hpp>

namespace herg {

using json = nlohmann::json;

inline json to_json(const Poly& p)
{
    json terms = json::array();
    for (auto& [m, c] : p.terms()) {
        json e = json::object();
        for (auto& [v, x] : m) e[v] = qstr(x);
        terms.push_back({{"coef", qstr(c)}, {"exps", e}});
    }
    return {{"text", p.str()}, {"terms", terms}};
}

inline json to_json(const GraphStats& s)
{
    return {{"v", s.v}, {"e", s.e}, {"k", s.k}, {"r", s.r}, {"n", s.n}, {"f", s.f}, {"F_int", s.F_int},
            {"F_ext", s.F_ext}, {"C_bd", s.C_bd}, {"t", s.t}, {"bd", s.bd}};
}

inline json to_json(const CStats& s, int rank, const Alpha& al)
{
    json faces = json::array();
    for (auto& of : s.open_faces) faces.push_back({{"colors", {of.ci, of.cj}}, {"halves", of.halves}});
    return {{"V", s.V}, {"E", s.E}, {"k", s.k}, {"r", s.r}, {"n", s.n}, {"f", s.f}, {"F_int", s.F_int},
            {"C_bd", s.C_bd}, {"E_bd", s.E_bd}, {"B", s.B}, {"gamma", qstr(gamma_of(s, rank, al))},
            {"open_faces", faces}};
}

inline json mask_json(Mask m) { return std::to_string(m); }

inline json to_json(const CountingReport& r)
{
    json v = json::array();
    for (auto& x : r.violations) v.push_back({{"identity", x.identity}, {"state", mask_json(x.state)}, {"detail", x.detail}});
    return {{"composites", r.composites}, {"checks", r.checks}, {"violation_count", r.violation_count},
            {"violations", v}, {"max_tau", r.max_tau}, {"tau_zero", r.tau_zero}};
}

inline json to_json(const PieceIdentities& p)
{
    return {{"H_identity", p.H_identity}, {"A_split", p.A_split}, {"companion_printed", p.companion_printed},
            {"companion_fixed", p.companion_fixed}};
}

inline json to_json(const TheoremReport& r)
{
    json ps = json::array();
    for (auto& p : r.pieces) ps.push_back(to_json(p));
    return {{"factored_printed", r.factored_printed}, {"factored_fixed", r.factored_fixed}, {"pieces", ps},
            {"determinant", r.determinant.str()}};
}

inline json to_json(const GeneralReport& r)
{
    return {{"conforming", r.conforming}, {"F_Phi", r.F_Phi}, {"H_ZG", r.H_ZG}, {"id1", r.id1},
            {"companion_printed", r.companion_printed}, {"companion_fixed", r.companion_fixed},
            {"pqr_first", r.pqr_first}, {"pqr_second", r.pqr_second}, {"theorem_H_experimental", r.theorem_H},
            {"counting_general", to_json(r.counting)}, {"undefined_theta", r.undefined_theta}};
}

inline json to_json(const StrandedReport& r)
{
    json v = json::array();
    for (auto& x : r.violations)
        v.push_back({{"identity", x.identity}, {"state", mask_json(x.hat_mask)}, {"got", x.got}, {"formula", x.want}});
    return {{"condition_ok", r.condition_ok}, {"condition_failures", r.condition_failures},
            {"proposition", r.proposition}, {"A_split", r.A_split}, {"composites", r.composites},
            {"violation_count", r.violation_count}, {"by_identity", r.by_identity}, {"violations", v},
            {"F_bd", "not computed"}, {"loose_s1_states", r.loose_s1_states}, {"passed", r.passed()}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Same layout as ribbon manifests, pieces given as .ctg files with marks.
inline CDecomposition parse_colored_manifest(const std::string& text, const std::string& base_dir)
{
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    bool have = false;
    CDecomposition d;
    auto path = [&](const std::string& f) { return !f.empty() && f[0] == '/' ? f : base_dir + f; };
    while (std::getline(in, line)) {
        ++ln;
        std::string l = trim(line);
        if (l.empty() || l[0] == '#') continue;
        std::istringstream ws(l);
        std::string kw, a, b, extra;
        ws >> kw >> a >> b;
        if (ws >> extra) throw ParseError(ln, "trailing words");
        if (kw == "template") {
            if (a.empty() || !b.empty()) throw ParseError(ln, "template <file>");
            d.tmpl = parse_colored(read_file(path(a)));
            have = true;
        } else if (kw == "piece") {
            if (b.empty()) throw ParseError(ln, "piece <edge-id> <file>");
            if (d.pieces.count(a)) throw ParseError(ln, "second piece for edge " + a);
            d.pieces[a] = make_cpiece(parse_colored(read_file(path(b))));
        } else {
            throw ParseError(ln, "unknown keyword '" + kw + "'");
        }
    }
    if (!have) throw ParseError(ln, "manifest has no template line");
    for (auto& [id, p] : d.pieces) {
        int i = d.tmpl.edge_index(id);
        if (i < 0 || d.tmpl.edges[i].contracted) throw InvariantError("piece given for unknown template edge " + id);
    }
    return d;
}

inline bool is_colored_text(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string l = trim(line);
        if (l.empty() || l[0] == '#') continue;
        return l.rfind("cgraph", 0) == 0;
    }
    return false;
}

// ---- verification suites on one decomposition ------------------------------

struct Verdict {
    json report;
    bool ok = true;
};

// Asserted: the corrected identities. The printed variants are reported
// alongside so a reader can see where they differ.
inline Verdict verify_decomposition(const Decomposition& d, const std::string& mode, bool dump_matrices = false)
{
    static const std::set<std::string> modes{"all", "counting", "product", "theorem", "general"};
    if (!modes.count(mode)) throw std::invalid_argument("unknown mode '" + mode + "'");
    Verdict v;
    auto c = make_context(d);
    Poly z = herg_Z(c.hat.hat);
    v.report["template"] = d.g.name();
    v.report["hat_edges"] = c.hat.hat.num_edges();
    auto want = [&](const char* m) { return mode == "all" || mode == m; };
    CountingReport cr;
    bool have_cr = false;
    if (want("counting") || want("theorem")) {
        cr = verify_counting_lemmas(c);
        have_cr = true;
    }
    if (want("counting")) {
        v.report["counting"] = to_json(cr);
        v.ok = v.ok && cr.violation_count == 0;
    }
    if (want("product")) {
        bool eq = expand_product_lemma(c) == z;
        v.report["product_lemma"] = eq;
        v.ok = v.ok && eq;
    }
    if (want("theorem")) {
        if (!have_cr || !cr.tau_zero) {
            v.report["theorem"] = {{"skipped", "template states with nonzero tau"}};
        } else {
            auto tr = solve_theorem_prod(c, z);
            v.report["theorem"] = to_json(tr);
            bool ok = tr.factored_fixed;
            for (auto& p : tr.pieces) ok = ok && p.H_identity && p.A_split;
            v.ok = v.ok && ok;
        }
    }
    if (want("general")) {
        if (!conforming(d.g)) {
            v.report["general"] = {{"skipped", "template has an internal face in some state"}};
        } else {
            auto gr = verify_general_case(c, herg_Z(c.hat.hat, {}, false));
            v.report["general"] = to_json(gr);
            v.ok = v.ok && gr.F_Phi && gr.id1 && gr.companion_fixed && gr.counting.violation_count == 0;
        }
    }
    if (dump_matrices) {
        std::vector<const PieceTable*> tp;
        for (auto& t : c.tabs) tp.push_back(&t);
        json ms = json::array();
        for_each_composite(c, [&](Mask s, const std::vector<const PieceState*>& ch) {
            if (ms.size() >= 16) return;
            auto M = build_matrices(d, tp, s, ch);
            ms.push_back({{"template_state", mask_json(s)}, {"hat_state", mask_json(hat_mask(c, ch))},
                          {"eps", M.eps}, {"sigma", M.sigma}, {"eps_reduced", M.eps_t},
                          {"sigma_reduced", M.sigma_t}, {"tau_rank", M.tau_rank}, {"tau_sum", M.tau_sum}});
        });
        v.report["matrices"] = ms;
    }
    v.report["ok"] = v.ok;
    return v;
}

inline json to_json(const Matrices& M)
{
    return {{"faces", M.faces}, {"points", M.points}, {"edges", M.edges}, {"eps", M.eps}, {"sigma", M.sigma},
            {"kept", M.kept}, {"eps_reduced", M.eps_t}, {"sigma_reduced", M.sigma_t}, {"tau_rank", M.tau_rank},
            {"tau_rank_reduced", M.tau_rank_reduced}, {"tau_sum", M.tau_sum},
            {"tau_sum_unreduced", M.tau_sum_unreduced}, {"tau_e", M.tau_e}};
}

} // namespace herg

#endif
