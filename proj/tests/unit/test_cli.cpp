#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "boresight/cli/commands.hpp"
#include "boresight/cli/report.hpp"
#include "boresight/errors.hpp"
#include "boresight/model.hpp"

using namespace boresight::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out, err;
    std::map<std::string, std::string> report() const { return parse_report(out); }
};

Result call(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Result r;
    r.code = run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("boresight_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    // Small crossing scene with exact shared surface.
    std::string make_scene(const std::string& name = "s", const std::string& n = "30,80") {
        const auto r = call({"synth", "--n", n, "--shared", "--layout", "crossing", "--seed", "3", "--out", path(name)});
        EXPECT_EQ(r.code, 0) << r.err;
        return path(name);
    }

    fs::path dir_;
};

double num(const std::map<std::string, std::string>& m, const std::string& key) {
    const auto it = m.find(key);
    if (it == m.end()) throw std::runtime_error("missing key " + key);
    return std::stod(it->second);
}

}  // namespace

TEST(ReportFormat, WritesAndParses) {
    Report r;
    r.set("command", std::string("nsbb"));
    r.set("alpha_deg", 1.0000004, 6);
    r.set_number("objective", 0.1);
    r.set("converged", true);
    r.set("nodes", 12ULL);
    r.add_row("angles", "1, 2, 3");
    std::ostringstream out;
    r.write(out);
    const auto m = parse_report(out.str());
    EXPECT_EQ(m.at("command"), "nsbb");
    EXPECT_EQ(m.at("alpha_deg"), "1.000000");
    EXPECT_EQ(m.at("objective"), "0.1");
    EXPECT_EQ(m.at("converged"), "true");
    EXPECT_EQ(m.at("nodes"), "12");
    EXPECT_NE(out.str().find("# angles"), std::string::npos);
}

TEST(ReportFormat, RejectsBadLines) {
    EXPECT_THROW(parse_report("novalue\n"), boresight::ParseError);
    EXPECT_THROW(parse_report("Key=1\n"), boresight::ParseError);
    EXPECT_THROW(parse_report("a=1\na=2\n"), boresight::ParseError);
    EXPECT_NO_THROW(parse_report("\n# comment\na=x=y\n"));
    EXPECT_EQ(parse_report("a=x=y\n").at("a"), "x=y");
    EXPECT_EQ(format_fixed(-0.0000001, 3), "0.000");
    EXPECT_EQ(format_fixed(2.5, 2), "2.50");
}

TEST_F(CliTest, SynthWritesFilesDeterministically) {
    const auto a = call({"synth", "--n", "20,40", "--noise", "0.01", "--seed", "5", "--out", path("a")});
    const auto b = call({"synth", "--n", "20,40", "--noise", "0.01", "--seed", "5", "--out", path("b")});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    for (const char* suffix : {"_hat.csv", "_bar.csv", "_truth.txt"}) {
        ASSERT_TRUE(fs::exists(path("a") + suffix));
        std::ifstream fa(path("a") + suffix), fb(path("b") + suffix);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        EXPECT_EQ(sa.str(), sb.str()) << suffix;
    }
    EXPECT_EQ(a.report().at("hat_points"), "20");
    EXPECT_EQ(a.report().at("planted_alpha_deg"), "1.000000");
}

TEST_F(CliTest, UsageErrorsExitOne) {
    EXPECT_EQ(call({"synth", "--noise", "-1", "--out", path("x")}).code, kUsage);
    EXPECT_EQ(call({"synth", "--n", "50,10", "--out", path("x")}).code, kUsage);
    EXPECT_EQ(call({"synth", "--layout", "diagonal", "--out", path("x")}).code, kUsage);
    EXPECT_EQ(call({}).code, kUsage);
    EXPECT_EQ(call({"frobnicate"}).code, kUsage);
    const auto s = make_scene();
    const auto r = call({"nsbb", "--hat", s + "_hat.csv", "--bar", s + "_bar.csv", "--eps-rel", "0"});
    EXPECT_EQ(r.code, kUsage);
    EXPECT_NE(r.err.find("--eps-rel"), std::string::npos);
    EXPECT_EQ(call({"ags", "--hat", path("missing.csv"), "--bar", s + "_bar.csv"}).code, kUsage);
    EXPECT_EQ(call({"--help"}).code, kOk);
}

TEST_F(CliTest, MalformedInputExitsTwo) {
    std::ofstream(path("bad.csv")) << "lx,ly,lz,roll_deg,pitch_deg,yaw_deg,sx,sy,sz\n1,2,3\n";
    const auto s = make_scene();
    const auto r = call({"ags", "--hat", path("bad.csv"), "--bar", s + "_bar.csv", "--nd", "2", "--rounds", "1"});
    EXPECT_EQ(r.code, kData);
    EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, InfeasibleModelExitsThree) {
    SCOPED_TRACE("an incumbent of zero removes every pair of a noisy scene");
    ASSERT_EQ(call({"synth", "--n", "10,30", "--noise", "0.05", "--out", path("n")}).code, 0);
    const auto r = call({"export-model", "--hat", path("n_hat.csv"), "--bar", path("n_bar.csv"), "--bounds", "0.1",
                         "--center", "1,-0.5,0.25", "--f-upper", "0", "--out", path("m.txt")});
    EXPECT_EQ(r.code, kSolver);
}

TEST_F(CliTest, ApplyAtZeroWithIdentityPose) {
    std::ofstream(path("p.csv")) << "lx,ly,lz,roll_deg,pitch_deg,yaw_deg,sx,sy,sz\n1.5,-2,3,0,0,0,0,0,0\n";
    const auto r = call({"apply", "--in", path("p.csv"), "--out", path("xyz.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream f(path("xyz.csv"));
    std::string header, line;
    std::getline(f, header);
    std::getline(f, line);
    EXPECT_EQ(header, "x,y,z");
    EXPECT_EQ(line, "1.5,-2,3");
}

TEST_F(CliTest, CropAndReduceStats) {
    const auto s = make_scene();
    const auto c = call({"crop", "--in", s + "_bar.csv", "--box", "-100,-100,-100,100,100,100", "--angles",
                         "1,-0.5,0.25", "--out", path("c.csv")});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(c.report().at("output_points"), "80");
    const auto r = call({"reduce-stats", "--hat", s + "_hat.csv", "--bar", s + "_bar.csv", "--bounds", "0.1",
                         "--center", "1,-0.5,0.25"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = r.report();
    EXPECT_EQ(num(m, "pairs_before"), 30 * 80);
    EXPECT_LT(num(m, "pairs_after"), num(m, "pairs_before"));
    EXPECT_EQ(num(m, "pairs_before") - num(m, "pairs_after"),
              num(m, "removed_objective") + num(m, "removed_closest"));
    EXPECT_EQ(m.at("infeasible"), "false");
}

TEST_F(CliTest, ExportModelWritesParsableFile) {
    const auto s = make_scene("e", "5,20");
    const auto r = call({"export-model", "--hat", s + "_hat.csv", "--bar", s + "_bar.csv", "--bounds", "0.2",
                         "--center", "1,-0.5,0.25", "--out", path("m.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto model = boresight::load_model(path("m.txt"));
    EXPECT_EQ(std::to_string(model.binary_count()), r.report().at("binaries"));
}

TEST_F(CliTest, AgsThenSeededNsbb) {
    const auto s = make_scene();
    const auto g = call({"ags", "--hat", s + "_hat.csv", "--bar", s + "_bar.csv", "--nd", "6", "--rounds", "4"});
    ASSERT_EQ(g.code, 0) << g.err;
    const auto gm = g.report();
    const std::string init = gm.at("alpha_deg") + "," + gm.at("beta_deg") + "," + gm.at("gamma_deg");
    const auto n = call({"nsbb", "--hat", s + "_hat.csv", "--bar", s + "_bar.csv", "--init-angles", init, "--eps-abs",
                         "1e9", "--trace", path("trace.csv")});
    ASSERT_EQ(n.code, 0) << n.err;
    const auto nm = n.report();
    EXPECT_LE(num(nm, "f_upper"), num(gm, "objective") * (1 + 1e-6) + 1e-9);
    EXPECT_EQ(nm.at("converged"), "true");
    EXPECT_EQ(nm.at("nodes_explored"), "0");
    EXPECT_EQ(nm.at("init"), "angles");
    for (const char* key : {"alpha_deg", "beta_deg", "gamma_deg"}) {
        const auto& v = nm.at(key);
        ASSERT_NE(v.find('.'), std::string::npos);
        EXPECT_GE(v.size() - v.find('.') - 1, 3u);
    }
    EXPECT_LE(num(nm, "f_lower"), num(nm, "f_upper"));
    EXPECT_TRUE(fs::exists(path("trace.csv")));
}

TEST_F(CliTest, DeterministicNsbbIsReproducible) {
    const auto s = make_scene("d", "8,20");
    const std::vector<std::string> args{"nsbb",       "--hat",       s + "_hat.csv", "--bar",
                                        s + "_bar.csv", "--bounds",  "0.3",          "--center",
                                        "1,-0.5,0.25", "--eps-abs", "1e-3",         "--deterministic"};
    const auto a = call(args), b = call(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.report().count("elapsed_s"), 0u);
}

TEST_F(CliTest, ExternalModeWithoutCommandIsUsageError) {
    const auto s = make_scene();
    EXPECT_EQ(call({"nsbb", "--hat", s + "_hat.csv", "--bar", s + "_bar.csv", "--lb-mode", "external"}).code, kUsage);
}

TEST_F(CliTest, ExecutableReturnsExitCodes) {
    const auto s = make_scene();
    const auto status = [](const std::string& cmd) {
        const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    const std::string exe = BORESIGHT_EXE;
    EXPECT_EQ(status(exe + " --help"), 0);
    EXPECT_EQ(status(exe + " nsbb"), 1);
    EXPECT_EQ(status(exe + " ags --hat " + s + "_hat.csv --bar " + s + "_bar.csv --nd 2 --rounds 1"), 0);
}
