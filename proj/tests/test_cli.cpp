#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "dropmeter/image_io.hpp"
#include "dropmeter/server.hpp"
#include "dropmeter/synthcard.hpp"

namespace dropmeter {
namespace {

namespace fs = std::filesystem;

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(DROPMETER_CLI) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("dropmeter_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
        card_ = dir_ / "card.png";
        write_image(card_, generate_card(control_card_spec(4, 1200, 21)).image);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string q(const fs::path& p) const { return "'" + p.string() + "'"; }
    fs::path dir_, card_;
};

TEST_F(CliTest, AnalyzeIsDeterministic) {
    const auto a = run("analyze " + q(card_) + " --timestamp T");
    const auto b = run("analyze " + q(card_) + " --timestamp T");
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    const auto j = nlohmann::json::parse(a.out);
    EXPECT_EQ(j["summary"]["drop_count"], 20);
    EXPECT_EQ(j["provenance"]["input"], "card.png");

    auto stamped = nlohmann::json::parse(run("analyze " + q(card_)).out);
    stamped["provenance"]["timestamp"] = "T";
    EXPECT_EQ(stamped.dump(), j.dump());
}

TEST_F(CliTest, AnalyzeOutputsAndFormats) {
    const auto out = dir_ / "r.csv", overlay = dir_ / "o.png";
    ASSERT_EQ(run("analyze " + q(card_) + " --format csv --out " + q(out) + " --overlay " + q(overlay)).status, 0);
    EXPECT_NE(slurp(out).find("drops,mean_area_um2,density_per_cm2,coverage_pct,vmd_um,relative_span"),
              std::string::npos);
    EXPECT_EQ(decode_image(overlay).width(), decode_image(card_).width());

    const auto corrected = nlohmann::json::parse(run("analyze " + q(card_) + " --correct 1,1").out);
    for (const auto& d : corrected["drops"]) EXPECT_EQ(d["corrected_diameter_um"], d["diameter_um"]);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run("analyze " + q(card_) + " --bin-threshold 1.5").status, 2);
    EXPECT_EQ(run("analyze " + q(card_) + " --format xml").status, 2);
    EXPECT_EQ(run("analyze " + q(card_) + " --card-width-mm 26 --card-height-mm 76").status, 2);
    EXPECT_EQ(run("analyze " + q(card_) + " --bogus").status, 2);
    EXPECT_EQ(run("analyze " + q(dir_ / "missing.png")).status, 1);
    write_bytes(dir_ / "junk.png", Bytes{'j', 'u', 'n', 'k'});
    EXPECT_EQ(run("analyze " + q(dir_ / "junk.png")).status, 1);
    EXPECT_EQ(run("").status, 2);
}

TEST_F(CliTest, SynthFractalAndDpi) {
    const auto img = dir_ / "synth.png", truth = dir_ / "truth.json";
    ASSERT_EQ(run("synth " + q(fs::path(DROPMETER_DATA_DIR) / "cards/ten_500um_1200dpi.cfg") + " --out " + q(img) +
                  " --truth " + q(truth))
                  .status,
              0);
    EXPECT_EQ(nlohmann::json::parse(slurp(truth))["disks"].size(), 10u);
    const auto frac = run("fractal " + q(img));
    ASSERT_EQ(frac.status, 0);
    EXPECT_EQ(frac.out.rfind("dimension ", 0), 0u);

    const auto dpi = run("dpi");
    ASSERT_EQ(dpi.status, 0);
    EXPECT_NE(dpi.out.find("10000\t20\t39\t118\t236\t472\t945\t1024"), std::string::npos);
    EXPECT_EQ(run("dpi --diameter 50 --dpi 600").out, "um\\dpi\t600\n50\t1\n");
    EXPECT_EQ(run("dpi --diameter 0 --dpi 600").status, 2);
    EXPECT_EQ(run("synth " + q(dir_ / "none.cfg") + " --out " + q(img)).status, 1);
}

TEST_F(CliTest, BatchParallelEqualsSerial) {
    const auto in = dir_ / "in";
    fs::create_directories(in);
    for (int i = 0; i < 4; ++i)
        write_image(in / ("c" + std::to_string(i) + ".png"), generate_card(control_card_spec(2, 600, 50 + i)).image);
    ASSERT_EQ(run("batch " + q(in) + " --out " + q(dir_ / "s") + " --jobs 1 --timestamp T").status, 0);
    ASSERT_EQ(run("batch " + q(in) + " --out " + q(dir_ / "p") + " --jobs 4 --timestamp T").status, 0);
    EXPECT_EQ(slurp(dir_ / "s/rollup.csv"), slurp(dir_ / "p/rollup.csv"));
    for (int i = 0; i < 4; ++i) {
        const std::string name = "c" + std::to_string(i) + ".json";
        EXPECT_EQ(slurp(dir_ / "s" / name), slurp(dir_ / "p" / name));
        EXPECT_EQ(slurp(dir_ / "s" / name), run("analyze " + q(in / ("c" + std::to_string(i) + ".png")) +
                                                " --timestamp T").out);
    }
}

TEST_F(CliTest, ApiParity) {
    AnalyzeRequest req;
    req.image = read_bytes(card_);
    req.filename = "card.png";
    req.params.marker_threshold = 0.3;
    const auto api = handle_analyze(req, "T");
    ASSERT_EQ(api.status, 200);
    const auto report = nlohmann::ordered_json::parse(api.body)["report"];
    EXPECT_EQ(report.dump(2) + "\n", run("analyze " + q(card_) + " --marker-threshold 0.3 --timestamp T").out);
}

}  // namespace
}  // namespace dropmeter
