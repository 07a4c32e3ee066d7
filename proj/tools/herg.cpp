// herg: command-line front end. Exit codes: 0 ok, 1 parse error,
// 2 invariant violation in the input, 3 verification mismatch.

#include <herg/corpus.hpp>
#include <herg/io.hpp>
#include <herg/random.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace herg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path)
{
    try {
        return read_file(path);
    } catch (std::runtime_error& e) {
        throw ParseError(0, e.what());
    }
}

Mask parse_mask(const std::string& s, Mask full)
{
    if (s.empty() || s == "full") return full;
    // a string of 0/1 over edges in file order, or a decimal mask
    if (s.find_first_not_of("01") == std::string::npos && s.size() > 1) {
        Mask m = 0;
        for (size_t i = 0; i < s.size(); ++i)
            if (s[i] == '1') m |= Mask(1) << i;
        return m & full;
    }
    try {
        return std::stoull(s) & full;
    } catch (...) {
        throw ParseError(0, "bad state '" + s + "'");
    }
}

json faces_json(const Herg& g, Mask m)
{
    json out = json::array();
    for (auto& f : g.trace_faces(m)) {
        json steps = json::array();
        for (auto& st : f.steps) steps.push_back(g.end_label(st.end) + (st.side ? ":B" : ":A"));
        out.push_back({{"internal", f.internal}, {"walk", steps}});
    }
    return out;
}

json boundary_json(const Herg& g, Mask m)
{
    auto bg = g.boundary_graph(m);
    json vs = json::array(), es = json::array();
    for (int v : bg.vertices) vs.push_back(g.end_label(v));
    for (auto& [a, b] : bg.edges) es.push_back({g.end_label(a), g.end_label(b)});
    return {{"vertices", vs}, {"edges", es}, {"components", bg.components}};
}

void emit(const json& j) { std::cout << dump(j); }

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream o(p);
    if (!o) throw std::runtime_error("cannot write " + p.string());
    o << text;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"half-edged ribbon graphs and colored stranded graphs"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads for state sums (default HERG_THREADS or 1)");

    std::string file, kind = "R", yconv = "Y", state, alpha;
    auto* poly = app.add_subcommand("poly", "polynomial invariant of a .herg or .ctg file");
    poly->add_option("file", file)->required();
    poly->add_option("--kind", kind, "R | Z (closed) | Rherg | Zherg | tutte | T | T_multi")->capture_default_str();
    poly->add_option("--y-convention", yconv, "Y or Ym1 for the open invariant")->capture_default_str();
    poly->add_option("--alpha", alpha, "stranded alpha values, e.g. 3=1,4=1/2");

    auto* stats = app.add_subcommand("stats", "state statistics");
    stats->add_option("file", file)->required();
    stats->add_option("--state", state, "edge mask: 0/1 string in file order, decimal, or full");
    stats->add_option("--alpha", alpha);

    auto* faces = app.add_subcommand("faces", "face walks of a state");
    faces->add_option("file", file)->required();
    faces->add_option("--state", state);

    auto* bnd = app.add_subcommand("boundary", "boundary graph of a state");
    bnd->add_option("file", file)->required();
    bnd->add_option("--state", state);

    std::string manifest, mode = "all";
    bool dump_m = false, example = false;
    auto* decomp = app.add_subcommand("decomp", "2-decompositions");
    decomp->require_subcommand(1);
    auto* dverify = decomp->add_subcommand("verify", "run a verification suite on a manifest");
    dverify->add_option("--manifest", manifest)->required();
    dverify->add_option("--mode", mode, "all | counting | product | theorem | general")->capture_default_str();
    dverify->add_flag("--dump-matrices", dump_m);
    auto* dmat = decomp->add_subcommand("matrices", "epsilon/sigma matrices");
    dmat->add_option("--manifest", manifest);
    dmat->add_flag("--example", example, "the worked example matrices");

    std::string edge;
    auto* strd = app.add_subcommand("stranded", "colored tensor graphs");
    strd->require_subcommand(1);
    auto* spoly = strd->add_subcommand("poly", "the invariant T");
    spoly->add_option("file", file)->required();
    spoly->add_option("--alpha", alpha);
    std::string tkind = "T";
    spoly->add_option("--kind", tkind, "T | T_multi | prefactor")->capture_default_str();
    auto* sbub = strd->add_subcommand("bubbles", "bubble census and boundary of a state");
    sbub->add_option("file", file)->required();
    sbub->add_option("--state", state);
    sbub->add_option("--alpha", alpha);
    auto* sver = strd->add_subcommand("verify", "decomposition proposition and counting identities");
    sver->add_option("manifest", manifest)->required();
    sver->add_option("--alpha", alpha, "accepted for symmetry; the proposition does not use alpha");
    auto* scon = strd->add_subcommand("contract", "contract an edge and compare boundaries");
    scon->add_option("file", file)->required();
    scon->add_option("--edge", edge)->required();

    unsigned long long seed = 1;
    int rv = 3, re = 3, rh = 1, rt = 30, rank = 3;
    std::string rkind = "herg", outdir;
    auto* rnd = app.add_subcommand("random", "reproducible random instances");
    rnd->add_option("kind", rkind, "herg | piece | ctg | manifest | cmanifest")->capture_default_str();
    rnd->add_option("--seed", seed)->capture_default_str();
    rnd->add_option("--vertices,-v", rv)->capture_default_str();
    rnd->add_option("--edges,-e", re)->capture_default_str();
    rnd->add_option("--hrs", rh, "half-ribbons or half-edges")->capture_default_str();
    rnd->add_option("--twist-percent", rt)->capture_default_str();
    rnd->add_option("--rank", rank)->capture_default_str();
    rnd->add_option("--out", outdir, "directory for manifest kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    if (threads > 0) thread_count() = threads;

    try {
        Alpha al = parse_alpha(alpha);
        if (poly->parsed() || stats->parsed() || faces->parsed() || bnd->parsed()) {
            std::string text = slurp(file);
            if (is_colored_text(text)) {
                CGraph g = parse_colored(text);
                if (faces->parsed() || bnd->parsed()) {
                    auto s = cstats(g, parse_mask(state, g.full_mask()));
                    emit(to_json(s, g.rank, al)["open_faces"]);
                } else if (stats->parsed()) {
                    emit(to_json(cstats(g, parse_mask(state, g.full_mask())), g.rank, al));
                } else {
                    if (kind != "T" && kind != "T_multi")
                        throw std::invalid_argument("kind " + kind + " needs a ribbon graph");
                    emit(to_json(kind == "T" ? invariant_T(g, al) : invariant_T_multivariate(g)));
                }
                return 0;
            }
            Herg g = parse_graph(text);
            if (stats->parsed()) {
                emit(to_json(g.stats(parse_mask(state, g.full_mask()))));
            } else if (faces->parsed()) {
                emit(faces_json(g, parse_mask(state, g.full_mask())));
            } else if (bnd->parsed()) {
                emit(boundary_json(g, parse_mask(state, g.full_mask())));
            } else {
                Poly p;
                YConv y = yconv == "Ym1" ? YConv::Ym1 : YConv::Y;
                if (yconv != "Y" && yconv != "Ym1") throw std::invalid_argument("y-convention is Y or Ym1");
                if (kind == "R") p = br_R(g);
                else if (kind == "Rherg" || kind == "R_open") p = herg_R(g, y);
                else if (kind == "Z") p = ribbon_Z(g);
                else if (kind == "Zherg") p = herg_Z(g);
                else if (kind == "tutte") p = tutte(g);
                else throw std::invalid_argument("unknown kind " + kind);
                emit(to_json(p));
            }
            return 0;
        }
        if (dverify->parsed()) {
            auto d = parse_manifest(slurp(manifest), dir_of(manifest));
            auto v = verify_decomposition(d, mode, dump_m);
            emit(v.report);
            return v.ok ? 0 : 3;
        }
        if (dmat->parsed()) {
            if (example) {
                emit(to_json(example_matrices()));
                return 0;
            }
            if (manifest.empty()) throw std::invalid_argument("give --manifest or --example");
            auto d = parse_manifest(slurp(manifest), dir_of(manifest));
            emit(verify_decomposition(d, "counting", true).report["matrices"]);
            return 0;
        }
        if (spoly->parsed()) {
            CGraph g = parse_colored(slurp(file));
            if (tkind == "T") emit(to_json(invariant_T(g, al)));
            else if (tkind == "T_multi") emit(to_json(invariant_T_multivariate(g)));
            else if (tkind == "prefactor") {
                auto pc = prefactor_identity(g, al);
                emit({{"holds", pc.holds}, {"lhs", to_json(pc.lhs)}, {"rhs", to_json(pc.rhs)}});
                return pc.holds ? 0 : 3;
            } else
                throw std::invalid_argument("unknown kind " + tkind);
            return 0;
        }
        if (sbub->parsed()) {
            CGraph g = parse_colored(slurp(file));
            emit(to_json(cstats(g, parse_mask(state, g.full_mask())), g.rank, al));
            return 0;
        }
        if (sver->parsed()) {
            auto d = parse_colored_manifest(slurp(manifest), dir_of(manifest));
            auto r = verify_prop_stranded(d);
            emit(to_json(r));
            return r.passed() ? 0 : 3;
        }
        if (scon->parsed()) {
            CGraph g = parse_colored(slurp(file));
            auto c = check_contraction(g, edge);
            emit({{"boundary_same", c.boundary_same}, {"dV", c.dV}, {"dE", c.dE}, {"dC_bd", c.dC},
                  {"dE_bd", c.dEbd}, {"contracted", contract_colored(g, edge).to_text()}});
            return c.boundary_same ? 0 : 3;
        }
        if (rnd->parsed()) {
            if (rv < 1 || re < 0 || rh < 0 || rt < 0 || rt > 100 || rank < 1)
                throw std::invalid_argument("random parameters out of range");
            if (re > max_edges_limit()) throw std::invalid_argument("edge count above HERG_MAX_EDGES");
            Rng r(seed);
            RandomParams p{rv, re, rh, rt, true};
            if (rkind == "herg") {
                std::cout << spec_text(random_spec(r, p));
            } else if (rkind == "piece") {
                std::cout << spec_text(random_piece_spec(r, rv, re, rh, rt));
            } else if (rkind == "ctg") {
                std::cout << random_cgraph(r, rank, rv, re, rh).to_text();
            } else if (rkind == "manifest" || rkind == "cmanifest") {
                if (outdir.empty()) throw std::invalid_argument("manifest kinds need --out");
                fs::create_directories(outdir);
                json screen;
                if (rkind == "manifest") {
                    // redraw until the template has no loop and passes the internal-face screen
                    p.loops = false;
                    p.vertices = std::max(2, rv);
                    Spec t;
                    int tries = 0;
                    do {
                        t = random_spec(r, p, "tmpl");
                    } while (!conforming(Herg(t)) && ++tries < 200);
                    write_file(fs::path(outdir) / "template.herg", spec_text(t));
                    std::string man = "template template.herg\n";
                    for (auto& e : Herg(t).edges()) {
                        auto ps = random_piece_spec(r, 2, 1 + rand_int(r, 0, 1), 0, rt);
                        ps.name = "piece_" + e.id;
                        std::string f = "piece_" + e.id + ".herg";
                        write_file(fs::path(outdir) / f, spec_text(ps));
                        man += "piece " + e.id + " " + f + "\n";
                    }
                    write_file(fs::path(outdir) / "manifest.txt", man);
                    screen = {{"conforming", conforming(Herg(t))}};
                } else {
                    unsigned cut = static_cast<unsigned>(rand_int(r, 0, (1 << (rank + 1)) - 2));
                    CGraph t = melon(rank, cut, "tmpl");
                    write_file(fs::path(outdir) / "template.ctg", t.to_text());
                    std::string man = "template template.ctg\n";
                    CDecomposition d;
                    d.tmpl = t;
                    for (auto& e : t.edges) {
                        unsigned keep = 0;
                        for (int j = 0; j <= rank; ++j)
                            if (j != e.color && rand_int(r, 0, 1)) keep |= 1u << j;
                        auto pc = melon_piece(rank, e.color, keep);
                        d.pieces[e.id] = pc;
                        std::string f = "piece_" + e.id + ".ctg";
                        write_file(fs::path(outdir) / f, pc.g.to_text());
                        man += "piece " + e.id + " " + f + "\n";
                    }
                    write_file(fs::path(outdir) / "manifest.txt", man);
                    bool cond = true;
                    for (auto& [id, pc] : d.pieces)
                        for (auto& s : classify_cpiece(pc)) cond = cond && s.s1 == s.same_boundary;
                    screen = {{"standing_condition", cond}};
                }
                emit({{"out", outdir}, {"screen", screen}});
            } else {
                throw std::invalid_argument("unknown random kind " + rkind);
            }
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return 1;
    } catch (const std::length_error& e) {
        std::cerr << "limit: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
