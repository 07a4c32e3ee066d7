#include <herg/invariants.hpp>
#include <herg/random.hpp>

#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace herg;

namespace {

Herg G(const std::string& body) { return parse_graph("graph g\n" + body); }

Poly v(const char* n, long e = 1) { return pvar(n, e); }

const char* kBridge = "vertex 1: 1.1\nvertex 2: 1.2\nedge 1: twist=0\n";
const char* kLoop = "vertex 1: 1.1 1.2\nedge 1: twist=0\n";
const char* kTwLoop = "vertex 1: 1.1 1.2\nedge 1: twist=1\n";

Herg random_graph(Rng& rng, int e, int hrs)
{
    RandomParams p;
    p.vertices = rand_int(rng, 1, 4);
    p.edges = e;
    p.half_ribbons = hrs;
    return Herg(random_spec(rng, p));
}

} // namespace

TEST(Invariants, BollobasRiordan)
{
    EXPECT_EQ(br_R(G(kBridge)), v("x"));
    EXPECT_EQ(br_R(G(kLoop)), Poly(1) + v("y"));
    EXPECT_EQ(br_R(G(kTwLoop)), Poly(1) + v("y") * v("z") * v("w"));
    EXPECT_THROW(br_R(G("vertex 1: h1\n")), InvariantError);
}

TEST(Invariants, RibbonZ)
{
    EXPECT_EQ(ribbon_Z(G("vertex 1:\n")), v("a") * v("c"));
    EXPECT_EQ(ribbon_Z(G(kBridge)), v("a", 2) * v("c", 2) + v("b") * v("a") * v("c"));
}

TEST(Invariants, HalfEdgedR)
{
    EXPECT_EQ(herg_R(G("vertex 1:\n")), Poly(1));
    EXPECT_EQ(herg_R(G("vertex 1: h1\n")), v("z") * v("w") * v("t"));
    EXPECT_EQ(herg_Z(G("vertex 1:\n")), v("a") * v("c"));
    EXPECT_EQ(herg_Z(G("vertex 1: h1\n")), v("a") * v("d") * v("l"));
}

TEST(Invariants, ClosedLoopConventions)
{
    // cut edges leave half-ribbons, so the boundary faces sit in w; folding w
    // back into z^-1 gives the classical form with y -> y-1
    auto g = G(kLoop);
    EXPECT_EQ(herg_R(g), v("z") * v("w") * v("t", 2) + v("y") - Poly(1));
    Rng rng(307);
    for (int it = 0; it < 20; ++it) {
        RandomParams p;
        p.edges = rand_int(rng, 0, 5);
        p.half_ribbons = 0;
        p.twist_percent = 0;
        Herg h(random_spec(rng, p));
        Poly a = herg_R(h).substitute({{"w", v("z", -1)}, {"t", Poly(1)}});
        Poly b = br_R(h).substitute({{"w", Poly(1)}, {"y", v("y") - Poly(1)}});
        EXPECT_EQ(a, b) << h.to_text();
    }
}

TEST(Invariants, TutteSpecialization)
{
    Rng rng(301);
    for (int it = 0; it < 25; ++it) {
        auto g = random_graph(rng, rand_int(rng, 0, 5), 0);
        EXPECT_EQ(br_R(g).substitute({{"z", Poly(1)}, {"w", Poly(1)}}),
                  tutte(g).substitute({{"y", v("y") + Poly(1)}}));
    }
}

TEST(Invariants, ZFromFlagModel)
{
    Rng rng(302);
    for (int it = 0; it < 25; ++it) {
        auto g = random_graph(rng, rand_int(rng, 0, 5), rand_int(rng, 0, 2));
        Poly z;
        for (Mask m = 0; m <= g.full_mask(); ++m) {
            auto o = oracle::count(g, m);
            z += v("a", o.k) * v("b", o.e) * v("c", o.F_int) * v("d", o.C_bd) * v("l", o.f);
            if (g.num_edges() == 0) break;
        }
        EXPECT_EQ(herg_Z(g), z) << g.to_text();
    }
}

TEST(Invariants, CutEdgeIsZeroEdgeVariable)
{
    Rng rng(303);
    EdgeVars ev;
    ev.per_edge = true;
    for (int it = 0; it < 20; ++it) {
        auto g = random_graph(rng, rand_int(rng, 1, 4), 1);
        auto& id = g.edges()[0].id;
        Poly lhs = herg_Z(g, ev).substitute({{edge_var("b", id), Poly(0)}});
        EXPECT_EQ(lhs, herg_Z(cut_edge(g, id), ev));
    }
}

TEST(Invariants, Convert)
{
    EXPECT_TRUE(convert_check(G("vertex 1:\n")).holds);
    EXPECT_TRUE(convert_check(G(kLoop)).holds);
    EXPECT_TRUE(convert_check_closed(G(kTwLoop)).holds);
    Rng rng(304);
    for (int it = 0; it < 6; ++it) {
        auto g = random_graph(rng, 6, rand_int(rng, 0, 2));
        EXPECT_TRUE(convert_check(g).holds) << g.to_text();
    }
}

TEST(Invariants, DeletionContraction)
{
    Rng rng(305);
    int ordinary = 0;
    for (int it = 0; it < 20; ++it) {
        auto g = random_graph(rng, rand_int(rng, 1, 5), 0);
        auto r = deletion_contraction(g);
        ordinary += r.ordinary;
        EXPECT_EQ(r.passed, r.ordinary) << g.to_text();
    }
    EXPECT_GT(ordinary, 0);
}

TEST(Invariants, ThreadCountDoesNotMatter)
{
    Rng rng(306);
    auto g = random_graph(rng, 7, 2);
    int old = thread_count();
    thread_count() = 1;
    Poly a = herg_Z(g);
    thread_count() = 3;
    Poly b = herg_Z(g);
    thread_count() = old;
    EXPECT_EQ(a, b);
}
