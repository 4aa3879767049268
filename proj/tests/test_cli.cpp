#include "cli_app.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace prlab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Sandbox {
    fs::path dir;
    Sandbox() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / ("prlab_cli_" + std::string(info->test_suite_name()) + "_" + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }
    std::string runs() const { return path("runs"); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name), std::ios::binary) << text;
        return path(name);
    }

    struct Result {
        int code;
        std::string out, err;
    };
    Result run(std::vector<std::string> args, bool manifest = true) const {
        if (manifest) {
            args.push_back("--manifest-dir");
            args.push_back(runs());
        } else {
            args.push_back("--manifest-dir");
            args.push_back("");
        }
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return {code, out.str(), err.str()};
    }

    std::vector<json> manifests() const {
        std::vector<json> all;
        if (!fs::exists(runs()))
            return all;
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(runs()))
            files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f);
            for (std::string line; std::getline(in, line);)
                all.push_back(json::parse(line));
        }
        return all;
    }
};

json stable(const json& m) {
    json s;
    for (const char* key : {"command", "args", "inputs", "seed", "budget", "verdict", "witness", "exit"})
        s[key] = m.at(key);
    return s;
}

} // namespace

TEST(Cli, ValidateZmod6File) {
    Sandbox sb;
    const auto file = sb.write("zmod6.alg", to_structure_text(GroundStructure::zmod(6)));
    auto r = sb.run({"algebra", "validate", file});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("all axioms pass"), std::string::npos);
    auto ms = sb.manifests();
    ASSERT_EQ(ms.size(), 1U);
    EXPECT_EQ(ms[0]["verdict"], "valid");
    EXPECT_EQ(ms[0]["inputs"].size(), 1U);
    EXPECT_EQ(ms[0]["inputs"][file].get<std::string>().size(), 64U);
    const auto digest = ms[0]["digest"].get<std::string>();
    EXPECT_TRUE(fs::exists(fs::path(sb.runs()) / (digest.substr(0, 16) + ".jsonl")));
}

TEST(Cli, ValidateReportsBrokenTable) {
    Sandbox sb;
    auto g = GroundStructure::zmod(6);
    // perturb one multiplication entry by rebuilding from tables
    std::vector<Element> add(36), mul(36);
    for (Element a = 0; a < 6; ++a)
        for (Element b = 0; b < 6; ++b) {
            add[a * 6 + b] = g.add(a, b);
            mul[a * 6 + b] = g.mul(a, b);
        }
    mul[2 * 6 + 3] = 1;
    auto bad = GroundStructure::from_tables(Kind::semiring, 6, add, mul);
    auto r = sb.run({"algebra", "validate", "--structure", sb.write("bad.alg", to_structure_text(bad))});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("axiom violated"), std::string::npos);
    auto ms = sb.manifests();
    ASSERT_EQ(ms.size(), 1U);
    EXPECT_EQ(ms[0]["verdict"], "invalid");
    // re-verify the reported triple directly
    const auto t = ms[0]["witness"]["tuple"].get<std::vector<Element>>();
    const auto axiom = ms[0]["witness"]["axiom"].get<std::string>();
    ASSERT_EQ(t.size(), 3U);
    if (axiom == "mul-associative") {
        EXPECT_NE(bad.mul(bad.mul(t[0], t[1]), t[2]), bad.mul(t[0], bad.mul(t[1], t[2])));
    } else if (axiom == "left-distributive") {
        EXPECT_NE(bad.mul(t[0], bad.add(t[1], t[2])), bad.add(bad.mul(t[0], t[1]), bad.mul(t[0], t[2])));
    } else {
        ADD_FAILURE() << "unexpected axiom " << axiom;
    }
}

TEST(Cli, SchurThresholdInManifest) {
    Sandbox sb;
    auto r = sb.run({"search", "threshold", "--pattern", "{x,y,x+y}", "--allow-equal", "--colors", "2", "--window",
                     "1..12"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("threshold 5"), std::string::npos);
    auto ms = sb.manifests();
    ASSERT_EQ(ms.size(), 1U);
    EXPECT_EQ(ms[0]["verdict"]["threshold"], 5);
    EXPECT_EQ(ms[0]["verdict"]["status"], "exact");
    // the avoiding coloring of 1..4 must have no monochromatic x, y, x+y
    const auto c = ms[0]["witness"].get<std::vector<std::uint32_t>>();
    ASSERT_EQ(c.size(), 4U);
    for (std::size_t x = 1; x <= 4; ++x)
        for (std::size_t y = 1; x + y <= 4; ++y)
            EXPECT_FALSE(c[x - 1] == c[y - 1] && c[y - 1] == c[x + y - 1]) << x << ' ' << y;

    auto p = sb.run({"search", "threshold", "--preset", "schur", "--window", "1..12"}, false);
    EXPECT_EQ(p.code, 0);
    EXPECT_NE(p.out.find("threshold 5"), std::string::npos);
}

TEST(Cli, ParseErrorIsInputError) {
    Sandbox sb;
    const auto col = sb.write("c.col", "0 1 0 1 0 1 0 1\n");
    auto r = sb.run({"pattern", "find", "--pattern", "{x,", "--window", "1..8", "--coloring", col});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("position 3"), std::string::npos) << r.err;
    auto ms = sb.manifests();
    ASSERT_EQ(ms.size(), 1U);
    EXPECT_EQ(ms[0]["verdict"], "input-error");
    EXPECT_EQ(ms[0]["witness"]["position"], 3);
}

TEST(Cli, InputErrors) {
    Sandbox sb;
    EXPECT_EQ(sb.run({"frobnicate"}, false).code, 3);
    EXPECT_EQ(sb.run({"algebra", "validate", sb.path("missing.alg")}, false).code, 3);
    EXPECT_EQ(sb.run({"largeness", "check", "--builder", "zmod 6"}, false).code, 3);
    EXPECT_EQ(sb.run({"largeness", "check", "--builder", "zmod 6", "--elements", "0", "--property", "huge"}, false)
                  .code,
              3);
    const auto col = sb.write("short.col", "0 1\n");
    EXPECT_EQ(sb.run({"pattern", "find", "--pattern", "{x,y}", "--window", "1..8", "--coloring", col}, false).code, 3);
}

TEST(Cli, PreconditionAndBudgetExitCodes) {
    Sandbox sb;
    auto pre = sb.run({"construct", "thick-syndetic", "--builder", "zmod 6", "--elements", "1 2"});
    EXPECT_EQ(pre.code, 1);
    auto rich = sb.run({"largeness", "check", "--builder", "free-words 2 2", "--elements", "0", "--property", "rich"});
    EXPECT_EQ(rich.code, 1) << rich.err;

    auto budget = sb.run({"search", "avoid", "--pattern", "{x,y,x+y}", "--allow-equal", "--colors", "3", "--window", "1..13",
                          "--budget", "3"});
    EXPECT_EQ(budget.code, 2);
    EXPECT_NE(budget.out.find("none-budget"), std::string::npos) << budget.out;

    auto ms = sb.manifests();
    ASSERT_EQ(ms.size(), 3U);
    std::multiset<int> codes;
    for (const auto& m : ms)
        codes.insert(m["exit"].get<int>());
    EXPECT_EQ(codes, (std::multiset<int>{1, 1, 2}));
}

TEST(Cli, ConstructAndReplay) {
    Sandbox sb;
    const auto trace = sb.path("ts.trace");
    auto r = sb.run({"construct", "thick-syndetic", "--builder", "zmod 6", "--elements", "0 2 4", "--n", "2", "--k",
                     "1", "--trace", trace});
    ASSERT_EQ(r.code, 0) << r.err;
    auto ms = sb.manifests();
    ASSERT_EQ(ms.size(), 1U);
    EXPECT_EQ(ms[0]["verdict"], "success");
    EXPECT_EQ(ms[0]["witness"]["xs"], json({0, 0}));
    std::ifstream in(trace);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(ms[0]["witness"]["trace_sha256"], cli::sha256_hex(buf.str()));

    auto rep = sb.run({"construct", "replay", trace}, false);
    EXPECT_EQ(rep.code, 0);
    EXPECT_NE(rep.out.find("byte-for-byte"), std::string::npos);

    std::string tampered = buf.str();
    tampered.replace(tampered.find("outcome success"), 15, "outcome failure");
    auto bad = sb.run({"construct", "replay", sb.write("bad.trace", tampered)}, false);
    EXPECT_EQ(bad.code, 0);
    EXPECT_NE(bad.out.find("diverged"), std::string::npos);
}

TEST(Cli, BowenTreeExhaustionAndSuccess) {
    Sandbox sb;
    const auto small = sb.write("small.col", "0 0 0\n");
    auto ex = sb.run({"construct", "bowen-tree", "--window", "1..3", "--coloring", small, "--k", "2", "--l", "2",
                      "--trace", sb.path("b.trace")});
    EXPECT_EQ(ex.code, 2);
    EXPECT_NE(sb.run({"construct", "replay", sb.path("b.trace")}, false).out.find("byte-for-byte"), std::string::npos);

    std::string text;
    for (int v = 1; v <= 400; ++v)
        text += v % 2 == 0 ? "0 " : "1 ";
    auto ok = sb.run({"construct", "bowen-tree", "--window", "1..400", "--coloring", sb.write("par.col", text), "--k",
                      "2", "--l", "2"});
    ASSERT_EQ(ok.code, 0) << ok.err;
    auto ms = sb.manifests();
    const auto& m = ms.back();
    ASSERT_EQ(m["verdict"], "success");
    const auto x = std::stoull(m["witness"]["x"].get<std::string>());
    const auto y = std::stoull(m["witness"]["y"].get<std::string>());
    for (auto v : {x, y, 2 * x + y, x * y, x * x * y}) {
        ASSERT_LE(v, 400U);
        EXPECT_EQ(v % 2, 0U);
    }
}

TEST(Cli, PatternFindWitnessReverifies) {
    Sandbox sb;
    const auto col = sb.write("parity.col", "1 0 1 0 1 0 1 0\n");
    auto r = sb.run({"pattern", "find", "--pattern", "{x,y,x+y,x*y}", "--window", "1..8", "--coloring", col});
    ASSERT_EQ(r.code, 0) << r.err;
    auto ms = sb.manifests();
    ASSERT_EQ(ms.size(), 1U);
    const auto& w = ms[0]["witness"];
    EXPECT_EQ(w["assignment"]["x"], "2");
    EXPECT_EQ(w["assignment"]["y"], "4");
    const auto x = std::stoull(w["assignment"]["x"].get<std::string>());
    const auto y = std::stoull(w["assignment"]["y"].get<std::string>());
    EXPECT_EQ(w["values"], json({std::to_string(x), std::to_string(y), std::to_string(x + y), std::to_string(x * y)}));
}

TEST(Cli, LargenessWitnessReverifies) {
    Sandbox sb;
    auto r = sb.run({"largeness", "check", "--builder", "zmod 6", "--elements", "0 2 4", "--property", "syndetic"});
    ASSERT_EQ(r.code, 0);
    auto ms = sb.manifests();
    ASSERT_EQ(ms.size(), 1U);
    EXPECT_EQ(ms[0]["verdict"], "yes");
    // the translates listed must cover Z/6: every y has some s with s*y in {0,2,4}
    const auto cover = ms[0]["witness"]["elements"].get<std::vector<Element>>();
    ASSERT_FALSE(cover.empty());
    for (Element y = 0; y < 6; ++y) {
        bool hit = false;
        for (Element s : cover)
            hit = hit || (s * y) % 6 % 2 == 0;
        EXPECT_TRUE(hit) << y;
    }
}

TEST(Cli, DsetCompute) {
    Sandbox sb;
    auto r = sb.run({"dset", "compute", "--builder", "zmod 6", "--elements", "0 3", "--t-witness"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("t-witness"), std::string::npos);
    auto ms = sb.manifests();
    ASSERT_EQ(ms.size(), 1U);
    EXPECT_FALSE(ms[0]["witness"]["t_witness"].is_null());
}

TEST(Cli, CnfExport) {
    Sandbox sb;
    const auto path = sb.path("w4.cnf");
    auto r = sb.run({"search", "cnf", "--pattern", "{x,y,x+y}", "--allow-equal", "--window", "1..4", "--emit-cnf",
                     path});
    ASSERT_EQ(r.code, 0);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_NE(buf.str().find("p cnf 4 8"), std::string::npos);
    EXPECT_TRUE(fs::exists(path + ".map"));
}

TEST(Cli, ManifestsIdenticalAcrossWidths) {
    Sandbox sb;
    const auto col = sb.write("c.col", "1 0 1 0 1 0 1 0 1 0 1 0 1 0 1 0 1 0 1 0\n");
    const std::vector<std::vector<std::string>> commands = {
        {"search", "threshold", "--pattern", "{x,y,x+y}", "--allow-equal", "--window", "1..12"},
        {"search", "threshold", "--pattern", "{x,y,x+y}", "--allow-equal", "--colors", "3", "--window", "1..16"},
        {"search", "avoid", "--pattern", "{x,y,x+y}", "--window", "1..8", "--seed", "7", "--random-trials", "50"},
        {"search", "avoid", "--preset", "hindman990", "--window", "2..40"},
        {"pattern", "find", "--pattern", "{x,y,x+y}", "--window", "1..20", "--coloring", col},
        {"largeness", "check", "--builder", "zmod 12", "--elements", "0 4 8", "--property", "pws"},
        {"construct", "thick-syndetic", "--builder", "zmod 6", "--elements", "0 2 4"},
    };
    for (const auto& cmd : commands) {
        std::vector<json> seen;
        for (const char* width : {"1", "4", "1"}) {
            auto args = cmd;
            args.push_back("--parallel-width");
            args.push_back(width);
            Sandbox::Result r = sb.run(args);
            EXPECT_LE(r.code, 2) << r.err;
        }
    }
    auto ms = sb.manifests();
    ASSERT_EQ(ms.size(), 3 * commands.size());
    // each command appends to a single digest-named file, with identical stable fields
    std::map<std::string, std::vector<json>> by_digest;
    for (const auto& m : ms)
        by_digest[m["digest"].get<std::string>()].push_back(m);
    EXPECT_EQ(by_digest.size(), commands.size());
    for (const auto& [digest, group] : by_digest) {
        ASSERT_EQ(group.size(), 3U);
        const auto first = stable(group[0]).dump();
        for (const auto& m : group)
            EXPECT_EQ(stable(m).dump(), first);
        std::set<std::size_t> widths;
        for (const auto& m : group)
            widths.insert(m["parallel_width"].get<std::size_t>());
        EXPECT_EQ(widths, (std::set<std::size_t>{1, 4}));
    }
}
