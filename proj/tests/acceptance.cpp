// Acceptance run: one PASS/FAIL line per criterion, JSON reports written to
// acceptance_report.json. Exit status is nonzero when any criterion fails.

#include <herg/corpus.hpp>
#include <herg/io.hpp>
#include <herg/random.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>

using namespace herg;

namespace {

using Clock = std::chrono::steady_clock;

double secs(Clock::time_point a) { return std::chrono::duration<double>(Clock::now() - a).count(); }

struct Result {
    bool pass = false;
    std::string detail;
    json report;  // deterministic content only, no timings
};

// ---- 1: worked matrix example ----------------------------------------------

Result matrix_example()
{
    Result r;
    Matrices M = example_matrices();
    IMat shown_sigma_t = {{1, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}};
    IMat id3 = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    int rk = rank_q(M.eps);
    bool eps_ok = M.eps_t == id3, sig_ok = M.sigma_t == shown_sigma_t;
    r.pass = rk == 3 && eps_ok && sig_ok && M.tau_rank == 3 && M.tau_sum == 3;
    r.report = to_json(M);
    r.report["rank_eps"] = rk;
    r.report["sigma_reduced_matches_shown"] = sig_ok;
    r.detail = "rank(eps)=" + std::to_string(rk) + " eps~=I3:" + (eps_ok ? "yes" : "no") +
               " sigma~ as shown:" + (sig_ok ? "yes" : "no") + " tau_rank=" + std::to_string(M.tau_rank) +
               " tau_sum=" + std::to_string(M.tau_sum);
    return r;
}

// ---- 2: worked expansion ---------------------------------------------------

Result example_algebra()
{
    Result r;
    Poly a = pv("a"), b = pv("b"), c = pv("c"), d = pv("d"), l = pv("l");
    Poly f1 = b * b * c + 2 * b * l * l, f2 = l * l, g1 = b * b, g2 = 2 * b + a * d * l * l;
    Poly printed_sum = a * d * l * f1 * b * b + a * a * d * d * l.pow(3) * f1 * g2 + a * a * b * b * d * d * l * l +
                       a.pow(3) * d.pow(3) * l.pow(5) * g2;
    auto m = [&](long k, const std::vector<std::pair<std::string, Q>>& e) { return Poly::monomial(k, make_exps(e)); };
    Poly shown = m(1, {{"a", 1}, {"b", 4}, {"c", 1}, {"d", 1}, {"l", 1}}) + m(2, {{"a", 1}, {"b", 3}, {"d", 1}, {"l", 3}}) +
                 m(2, {{"a", 2}, {"b", 3}, {"c", 1}, {"d", 2}, {"l", 3}}) +
                 m(1, {{"a", 3}, {"b", 2}, {"c", 1}, {"d", 3}, {"l", 5}}) + m(4, {{"a", 2}, {"b", 2}, {"d", 2}, {"l", 5}}) +
                 m(2, {{"a", 3}, {"b", 1}, {"d", 3}, {"l", 7}}) + m(1, {{"a", 2}, {"b", 2}, {"d", 2}, {"l", 2}}) +
                 m(2, {{"a", 3}, {"b", 1}, {"d", 3}, {"l", 5}}) + m(1, {{"a", 4}, {"d", 4}, {"l", 7}});
    // the eta-line: a^2 d^2 l^3 eta_f^2 eta_g^1 is a^2 b^2 d^2 l^5, not the a^2 b^2 d^2 l^2 written next
    Poly from_etas = a * d * l * f1 * g1 + a * a * d * d * l.pow(3) * f1 * g2 + a * a * d * d * l.pow(3) * f2 * g1 +
                     a.pow(3) * d.pow(3) * l.pow(5) * f2 * g2;
    r.pass = printed_sum == shown && shown.size() == 9;
    r.report = {{"expanded", to_json(printed_sum)}, {"matches_shown", printed_sum == shown},
                {"eta_line_consistent", from_etas == printed_sum}, {"eta_line_expansion", to_json(from_etas)}};
    r.detail = std::to_string(printed_sum.size()) + " terms, equal to the shown polynomial: " +
               (printed_sum == shown ? "yes" : "no") + "; eta line agrees: " + (from_etas == printed_sum ? "yes" : "no") +
               " (reported only)";
    return r;
}

// ---- 3-6: exhaustive decomposition corpus ----------------------------------

struct CorpusResults {
    Result c3, c4, c5, c6;
};

CorpusResults decomposition_corpus()
{
    auto tmpls = enumerate_templates();
    std::vector<Piece> planar;
    auto all = enumerate_pieces();
    for (auto& p : all)
        if (piece_planar(p)) planar.push_back(p);
    auto inst = build_instances(tmpls, planar);

    long n = 0, prod_ok = 0, comps = 0, v12 = 0, vgen_conf = 0, vgen_other = 0, conf = 0, conf_gen = 0;
    long tau0 = 0, thm_printed = 0, thm_fixed = 0, hid = 0, asplit = 0;
    long fphi = 0, hzg = 0, id1 = 0, comp_printed = 0, comp_fixed = 0;
    std::map<std::string, long> v12_by, vgen_by;
    json fails3 = json::array(), fails4 = json::array(), fails5 = json::array(), fails6 = json::array();
    double t3 = 0;
    for (auto& in : inst) {
        ++n;
        auto t0 = Clock::now();
        auto c = make_context(in.d);
        Poly z = herg_Z(c.hat.hat);
        bool pe = expand_product_lemma(c) == z;
        t3 += secs(t0);
        prod_ok += pe;
        if (!pe && fails3.size() < 5) fails3.push_back(in.label);

        auto cr = verify_counting_lemmas(c);
        comps += cr.composites;
        if (cr.violation_count) {
            ++v12;
            for (auto& v : cr.violations) ++v12_by[v.identity];
            if (fails4.size() < 5) fails4.push_back(in.label);
        }

        if (cr.tau_zero) {
            ++tau0;
            auto tr = solve_theorem_prod(c, z);
            thm_printed += tr.factored_printed;
            thm_fixed += tr.factored_fixed;
            bool h = true, s = true;
            for (auto& p : tr.pieces) {
                h = h && p.H_identity;
                s = s && p.A_split;
            }
            hid += h;
            asplit += s;
            if (!tr.factored_printed && fails5.size() < 5) fails5.push_back(in.label);
        }

        bool cf = conforming(in.d.g);
        conf += cf;
        auto gr = verify_general_case(c, herg_Z(c.hat.hat, {}, false));
        if (cf) {
            if (gr.counting.violation_count) ++vgen_conf;
            for (auto& v : gr.counting.violations) ++vgen_by[v.identity];
        } else if (gr.counting.violation_count) {
            ++vgen_other;
        }
        if (cf && gr.undefined_theta == 0) {
            ++conf_gen;
            fphi += gr.F_Phi;
            hzg += gr.H_ZG;
            id1 += gr.id1;
            comp_printed += gr.companion_printed;
            comp_fixed += gr.companion_fixed;
            bool ok = gr.F_Phi && gr.H_ZG && gr.id1 && gr.companion_printed;
            if (!ok && fails6.size() < 5) fails6.push_back(in.label);
        }
    }

    CorpusResults R;
    R.c3.pass = n >= 200 && prod_ok == n && t3 <= 60.0;
    R.c3.report = {{"templates", tmpls.size()}, {"pieces_total", all.size()}, {"pieces_planar", planar.size()},
                   {"instances", n}, {"product_lemma_equal", prod_ok}, {"first_failures", fails3}};
    std::ostringstream d3;
    d3 << prod_ok << "/" << n << " instances (" << tmpls.size() << " templates, " << planar.size()
       << " planar pieces of " << all.size() << "), " << std::fixed << std::setprecision(1) << t3 << " s";
    R.c3.detail = d3.str();

    R.c4.pass = v12 == 0 && vgen_conf == 0;
    R.c4.report = {{"composites", comps}, {"instances_with_31_32_violations", v12}, {"by_identity_31_32", v12_by},
                   {"conforming_templates", conf}, {"instances_with_general_violations_conforming", vgen_conf},
                   {"by_identity_general", vgen_by}, {"instances_with_general_violations_nonconforming", vgen_other},
                   {"first_failures", fails4}};
    R.c4.detail = std::to_string(comps) + " composite states; split/matrix violations in " + std::to_string(v12) +
                  " instances; general-case offsets violated in " + std::to_string(vgen_conf) + " of " + std::to_string(conf) +
                  " conforming (" + std::to_string(vgen_other) + " non-conforming instances break them, not asserted)";

    R.c5.pass = tau0 > 0 && thm_printed == tau0 && hid == tau0 && asplit == tau0;
    R.c5.report = {{"tau_zero_instances", tau0}, {"factored_printed", thm_printed}, {"factored_fixed", thm_fixed},
                   {"H_identity", hid}, {"A_split", asplit}, {"first_failures", fails5}};
    R.c5.detail = "printed factored form " + std::to_string(thm_printed) + "/" + std::to_string(tau0) +
                  "; corrected form " + std::to_string(thm_fixed) + "/" + std::to_string(tau0) + "; H identity " +
                  std::to_string(hid) + ", A split " + std::to_string(asplit);

    R.c6.pass = conf_gen >= 50 && fphi == conf_gen && hzg == conf_gen && id1 == conf_gen && comp_printed == conf_gen;
    R.c6.report = {{"instances", conf_gen}, {"F_Phi", fphi}, {"H_ZG", hzg}, {"id1", id1},
                   {"companion_printed", comp_printed}, {"companion_fixed", comp_fixed}, {"first_failures", fails6}};
    R.c6.detail = std::to_string(conf_gen) + " instances: F(Phi)=Z " + std::to_string(fphi) + ", H(Z(G~))=Z " +
                  std::to_string(hzg) + ", first identity " + std::to_string(id1) + ", companion as printed " +
                  std::to_string(comp_printed) + " (corrected " + std::to_string(comp_fixed) + ")";
    return R;
}

// ---- 7: conversion identities ----------------------------------------------

Result conversion()
{
    Result r;
    Rng rng(7007);
    int open_ok = 0, open_ym1 = 0, closed_ok = 0;
    json fails = json::array();
    for (int i = 0; i < 50; ++i) {
        RandomParams p{rand_int(rng, 1, 4), rand_int(rng, 0, 6), rand_int(rng, 0, 3), 30, true};
        Herg g(random_spec(rng, p));
        auto v = convert_check(g);
        open_ok += v.holds;
        open_ym1 += v.holds_ym1;
        if (!v.holds && fails.size() < 3) fails.push_back(g.to_text());
    }
    for (int i = 0; i < 50; ++i) {
        RandomParams p{rand_int(rng, 1, 4), rand_int(rng, 0, 6), 0, 30, true};
        Herg g(random_spec(rng, p));
        auto v = convert_check_closed(g);
        closed_ok += v.holds;
        if (!v.holds && fails.size() < 3) fails.push_back(g.to_text());
    }
    r.pass = open_ok == 50 && closed_ok == 50;
    r.report = {{"open_y", open_ok}, {"open_y_minus_1", open_ym1}, {"closed", closed_ok}, {"failures", fails}};
    r.detail = "HERG identity with y^n: " + std::to_string(open_ok) + "/50 (with (y-1)^n: " + std::to_string(open_ym1) +
               "/50, reported only); closed ribbon graphs " + std::to_string(closed_ok) + "/50";
    return r;
}

// ---- 8: deletion-contraction -----------------------------------------------

Result deletion_contraction_check()
{
    Result r;
    Rng rng(8008);
    int graphs = 0, ordinary = 0, passed = 0;
    json fails = json::array();
    while (graphs < 50) {
        RandomParams p{rand_int(rng, 1, 4), rand_int(rng, 1, 6), 0, 30, true};
        Herg g(random_spec(rng, p));
        ++graphs;
        auto dc = deletion_contraction(g);
        ordinary += dc.ordinary;
        passed += dc.passed;
        if (!dc.failed.empty() && fails.size() < 3) fails.push_back(g.to_text());
    }
    r.pass = passed == ordinary && ordinary > 0;
    r.report = {{"graphs", graphs}, {"ordinary_edges", ordinary}, {"passed", passed}, {"failures", fails}};
    r.detail = std::to_string(passed) + "/" + std::to_string(ordinary) + " ordinary edges over " +
               std::to_string(graphs) + " graphs";
    return r;
}

// ---- 9: stranded rank 3 ----------------------------------------------------

Result stranded()
{
    Result r;
    auto corpus = melon_corpus(3, 2);
    long n = 0, pass = 0, prop = 0, cond = 0, split = 0, tight = 0, tight_pass = 0, comps = 0;
    std::map<std::string, long> by;
    json fails = json::array();
    for (auto& in : corpus) {
        ++n;
        auto rep = verify_prop_stranded(in.d);
        comps += rep.composites;
        pass += rep.passed();
        prop += rep.proposition;
        cond += rep.condition_ok;
        split += rep.A_split;
        for (auto& [k, v] : rep.by_identity) by[k] += v;
        if (rep.loose_s1_states == 0) {
            ++tight;
            tight_pass += rep.passed();
        }
        if (!rep.passed() && fails.size() < 5) fails.push_back({{"instance", in.label}, {"report", to_json(rep)}});
    }
    Rng rng(9009);
    int graphs = 0, checked = 0, same = 0, counts_ok = 0;
    while (graphs < 30) {
        CGraph g = random_cgraph(rng, 3, rand_int(rng, 2, 5), rand_int(rng, 1, 6), rand_int(rng, 1, 3));
        ++graphs;
        for (auto& e : g.edges) {
            try {
                auto c = check_contraction(g, e.id);
                ++checked;
                same += c.boundary_same;
                counts_ok += c.dV == -1 && c.dE == -1 && c.dC == 0 && c.dEbd == 0;
            } catch (const InvariantError&) {
                // loop of the stranded graph: rejected by contract_colored
            }
        }
    }
    bool contract_ok = checked > 0 && same == checked && counts_ok == checked;
    r.pass = n >= 30 && pass == n && contract_ok;
    r.report = {{"instances", n},
                {"passed", pass},
                {"proposition", prop},
                {"standing_condition", cond},
                {"A_split", split},
                {"composites", comps},
                {"violations_by_identity", by},
                {"instances_all_s1_states_strand_tight", tight},
                {"strand_tight_passed", tight_pass},
                {"contraction", {{"graphs", graphs}, {"edges", checked}, {"boundary_same", same}, {"counts", counts_ok}}},
                {"first_failures", fails}};
    std::string byline;
    for (auto& [k, v] : by) byline += " " + k + ":" + std::to_string(v);
    r.detail = std::to_string(pass) + "/" + std::to_string(n) + " decompositions (proposition " + std::to_string(prop) +
               ", violations" + (byline.empty() ? " none" : byline) + "; strand-tight subset " +
               std::to_string(tight_pass) + "/" + std::to_string(tight) + "); contraction boundary " +
               std::to_string(same) + "/" + std::to_string(checked) + " edges on " + std::to_string(graphs) + " graphs";
    return r;
}

std::vector<Result> run_all()
{
    std::vector<Result> out;
    out.push_back(matrix_example());
    out.push_back(example_algebra());
    auto cr = decomposition_corpus();
    out.push_back(cr.c3);
    out.push_back(cr.c4);
    out.push_back(cr.c5);
    out.push_back(cr.c6);
    out.push_back(conversion());
    out.push_back(deletion_contraction_check());
    out.push_back(stranded());
    return out;
}

const char* names[] = {"worked matrix example",     "worked expansion",          "product lemma oracle",
                       "per-state counting lemmas", "simplified-template theorem", "general case",
                       "conversion identities",     "deletion-contraction",      "stranded rank 3",
                       "determinism"};

json reports_of(const std::vector<Result>& rs)
{
    json j = json::object();
    for (size_t i = 0; i < rs.size(); ++i) j[std::to_string(i + 1)] = rs[i].report;
    return j;
}

} // namespace

int main()
{
    auto t0 = Clock::now();
    thread_count() = 1;
    auto first = run_all();
    std::string a = dump(reports_of(first));
    std::cerr << "first pass " << secs(t0) << " s\n";

    auto t1 = Clock::now();
    thread_count() = 3;
    std::string b = dump(reports_of(run_all()));
    thread_count() = 1;
    std::cerr << "second pass (3 threads) " << secs(t1) << " s\n";

    Result det;
    det.pass = a == b;
    std::string prev_note = "no earlier report file";
    {
        std::ifstream prev("acceptance_report.json");
        if (prev) {
            std::ostringstream o;
            o << prev.rdbuf();
            prev_note = o.str() == a ? "matches the earlier report file" : "differs from the earlier report file";
        }
    }
    det.detail = std::string("1 thread vs 3 threads: ") + (det.pass ? "identical" : "different") + " (" +
                 std::to_string(a.size()) + " bytes); " + prev_note;
    first.push_back(det);
    {
        std::ofstream out("acceptance_report.json");
        out << a;
    }

    bool all = true;
    for (size_t i = 0; i < first.size(); ++i) {
        all = all && first[i].pass;
        std::cout << "criterion " << (i + 1) << ": " << (first[i].pass ? "PASS" : "FAIL") << "  " << names[i] << ": "
                  << first[i].detail << "\n";
    }
    std::cout << "total " << std::fixed << std::setprecision(1) << secs(t0) << " s\n";
    return all ? 0 : 1;
}
