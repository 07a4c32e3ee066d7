#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = HERG_CLI;
const std::string kData = HERG_DATA_DIR;

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args)
{
    Run r;
    std::string cmd = kCli + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

fs::path scratch(const std::string& name)
{
    auto d = fs::temp_directory_path() / ("herg_cli_" + name);
    fs::create_directories(d);
    return d;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

} // namespace

TEST(Cli, LoopR)
{
    auto r = run("poly " + kData + "/ribbon/loop.herg --kind R");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\"text\": \"y + 1\""), std::string::npos) << r.out;
}

TEST(Cli, MelonT)
{
    auto r = run("poly " + kData + "/colored/melon.ctg --kind T --alpha 3=1");
    EXPECT_EQ(r.code, 0);
    // full state: 5 - (-6)
    EXPECT_NE(r.out.find("z^11"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run("poly /nonexistent/file.herg --kind R").code, 1);
    auto d = scratch("bad");
    write(d / "dup.herg", "graph g\nvertex 1: 1.1 1.1\nedge 1: twist=0\n");
    EXPECT_EQ(run("poly " + (d / "dup.herg").string() + " --kind Z").code, 1);
    write(d / "hr.herg", "graph g\nvertex 1: h1\n");
    EXPECT_EQ(run("poly " + (d / "hr.herg").string() + " --kind R").code, 2);
    EXPECT_EQ(run("poly " + (d / "hr.herg").string() + " --kind Z").code, 2);
    EXPECT_EQ(run("poly " + (d / "hr.herg").string() + " --kind Zherg").code, 0);
    EXPECT_EQ(run("frobnicate").code, 1);
}

TEST(Cli, IdentityManifestPasses)
{
    auto r = run("decomp verify --manifest " + kData + "/ribbon/manifest_id.txt");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(run("decomp verify --manifest " + kData + "/ribbon/manifest_digon.txt").code, 0);
}

TEST(Cli, MislabeledPieceFails)
{
    // the sample digon with the rotation at u reversed
    auto d = scratch("mislabeled");
    fs::copy_file(kData + "/ribbon/template_path.herg", d / "template_path.herg", fs::copy_options::overwrite_existing);
    fs::copy_file(kData + "/ribbon/piece_id.herg", d / "piece_id.herg", fs::copy_options::overwrite_existing);
    write(d / "bad.herg", "graph bad\nvertex u: hm!m f.1 g.1\nvertex w: hn!n f.2 g.2\nedge f: twist=0\nedge g: twist=0\n");
    write(d / "m.txt", "template template_path.herg\npiece 1 bad.herg\npiece 2 piece_id.herg\n");
    auto r = run("decomp verify --manifest " + (d / "m.txt").string());
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("\"violations\""), std::string::npos);
}

TEST(Cli, RandomIsDeterministic)
{
    auto a = run("random herg --seed 1 -e 3"), b = run("--threads 3 random herg --seed 1 -e 3");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, "graph rnd\nvertex 1: 1.2 2.1 3.2 1.1\nvertex 2: 2.2 h1 3.1\nvertex 3:\n"
                     "edge 1: twist=0\nedge 2: twist=0\nedge 3: twist=0\n");
    EXPECT_NE(run("random herg --seed 2 -e 3").out, a.out);
}

TEST(Cli, RandomPieceMarks)
{
    for (int seed = 1; seed <= 5; ++seed) {
        auto r = run("random piece --seed " + std::to_string(seed));
        EXPECT_EQ(r.code, 0);
        auto count = [&](const std::string& s) {
            size_t n = 0;
            for (size_t p = r.out.find(s); p != std::string::npos; p = r.out.find(s, p + 1)) ++n;
            return n;
        };
        EXPECT_EQ(count("!m"), 1u) << r.out;
        EXPECT_EQ(count("!n"), 1u) << r.out;
    }
}

TEST(Cli, StrandedVerify)
{
    EXPECT_EQ(run("stranded verify " + kData + "/colored/manifest_edge.txt").code, 0);
    auto r = run("stranded verify " + kData + "/colored/manifest_full.txt");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("loose_s1_states"), std::string::npos);
}

TEST(Cli, ThreadsDoNotChangeOutput)
{
    std::string f = kData + "/ribbon/theta_hr.herg";
    EXPECT_EQ(run("poly " + f + " --kind Zherg").out, run("--threads 3 poly " + f + " --kind Zherg").out);
}
