#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kSource = RNR_SOURCE_DIR;

struct Run {
    int code = -1;
    std::string out;
};

Run rnr(const std::string& args) {
    const std::string cmd = std::string(RNR_BIN) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rnr_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("cli: replay of the golden ramp trace matches the committed logs") {
    const auto out = scratch("golden");
    const auto r = rnr("replay " + q(kSource / "rides/ramp_up.jsonl") + " --out " + q(out));
    REQUIRE(r.code == 0);
    CHECK(slurp(out / "state.jsonl") == slurp(kSource / "tests/golden/ramp_up.state.jsonl"));
    CHECK(slurp(out / "events.jsonl") == slurp(kSource / "tests/golden/ramp_up.events.jsonl"));
}

TEST_CASE("cli: simulating the ramp script reproduces the golden trace") {
    const auto out = scratch("golden_sim");
    const auto r = rnr("simulate " + q(kSource / "rides/ramp_up.json") + " --seed 7 --out " + q(out));
    REQUIRE(r.code == 0);
    CHECK(slurp(out / "trace.jsonl") == slurp(kSource / "rides/ramp_up.jsonl"));
    CHECK(slurp(out / "state.jsonl") == slurp(kSource / "tests/golden/ramp_up.state.jsonl"));
}

TEST_CASE("cli: simulate is byte-identical across runs and report bpm rises with effort") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(rnr("simulate " + q(kSource / "rides/ramp_up.json") + " --seed 3 --out " + q(a)).code == 0);
    REQUIRE(rnr("simulate " + q(kSource / "rides/ramp_up.json") + " --seed 3 --out " + q(b)).code == 0);
    for (const char* f : {"trace.jsonl", "state.jsonl", "events.jsonl", "report.json"}) {
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const auto report = nlohmann::json::parse(slurp(a / "report.json"));
    const auto& w = report["windows"];
    REQUIRE(w.size() >= 3);
    CHECK(w[1]["beat_bpm"].get<double>() > w[0]["beat_bpm"].get<double>());
    CHECK(w[2]["beat_bpm"].get<double>() > w[1]["beat_bpm"].get<double>());
}

TEST_CASE("cli: lean scenario lowers the mean volume window by window") {
    const auto out = scratch("lean");
    REQUIRE(rnr("simulate " + q(kSource / "rides/lean_forward.json") + " --out " + q(out)).code == 0);
    const auto w = nlohmann::json::parse(slurp(out / "report.json"))["windows"];
    REQUIRE(w.size() == 3);
    CHECK(w[1]["mean_vol"].get<double>() < w[0]["mean_vol"].get<double>());
    CHECK(w[2]["mean_vol"].get<double>() < w[1]["mean_vol"].get<double>());
}

TEST_CASE("cli: at-rest run emits no events; --rate-hz and --duration-s apply") {
    const auto out = scratch("rest");
    const auto r = rnr("simulate " + q(kSource / "rides/at_rest.json") + " --rate-hz 50 --duration-s 4 --out " + q(out));
    REQUIRE(r.code == 0);
    CHECK(slurp(out / "events.jsonl").empty());
    const std::string trace = slurp(out / "trace.jsonl");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 1 + 200);
}

TEST_CASE("cli: --pretty prints a table") {
    const auto out = scratch("pretty");
    const auto r = rnr("simulate " + q(kSource / "rides/at_rest.json") + " --duration-s 2 --pretty --out " + q(out));
    CHECK(r.code == 0);
    CHECK(r.out.find("window (s)") != std::string::npos);
    CHECK(nlohmann::json::parse(slurp(out / "report.json")).contains("checks"));
}

TEST_CASE("cli: truncated trace is a usage error citing the line") {
    const auto dir = scratch("trunc");
    std::string text = slurp(kSource / "rides/ramp_up.jsonl").substr(0, 2000);
    const auto lines = std::count(text.begin(), text.end(), '\n');
    std::ofstream(dir / "t.jsonl") << text;
    const auto r = rnr("replay " + q(dir / "t.jsonl") + " --out " + q(dir));
    CHECK(r.code == 2);
    CHECK(r.out.find("line " + std::to_string(lines + 1)) != std::string::npos);
}

TEST_CASE("cli: usage errors exit 2") {
    const auto dir = scratch("usage");
    CHECK(rnr("").code == 2);
    CHECK(rnr("frobnicate").code == 2);
    CHECK(rnr("replay").code == 2);
    CHECK(rnr("replay " + q(dir / "missing.jsonl")).code == 2);
    std::ofstream(dir / "overlap.json") << R"([{"t_ms":5},{"t_ms":5}])";
    CHECK(rnr("simulate " + q(dir / "overlap.json") + " --out " + q(dir)).code == 2);
    std::ofstream(dir / "bad.conf") << "bpm_max = 10\n";
    CHECK(rnr("simulate " + q(kSource / "rides/at_rest.json") + " --config " + q(dir / "bad.conf") + " --out " +
              q(dir)).code == 2);
    std::ofstream(dir / "spec.json") << R"({"pairs":[{"parameter":"pitch","contrast":"easy","seed":1}]})";
    CHECK(rnr("stimuli " + q(dir / "spec.json") + " --out " + q(dir)).code == 2);
    CHECK(rnr("--help").code == 0);
}

TEST_CASE("cli: config file overrides reach the engine") {
    const auto dir = scratch("conf");
    std::ofstream(dir / "slow.conf") << "bpm_max = 90\ndefault_bpm = 80\n";
    REQUIRE(rnr("simulate " + q(kSource / "rides/ramp_up.json") + " --config " + q(dir / "slow.conf") + " --out " +
                q(dir)).code == 0);
    std::istringstream states(slurp(dir / "state.jsonl"));
    std::string line;
    while (std::getline(states, line)) REQUIRE(nlohmann::json::parse(line)["bpm"].get<double>() <= 90.0);
}

TEST_CASE("cli: stimuli writes two clips per pair and a confirmed manifest") {
    const auto out = scratch("stim");
    const auto r = rnr("stimuli " + q(kSource / "rides/battery.json") + " --jobs 3 --out " + q(out));
    REQUIRE(r.code == 0);
    const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    REQUIRE(m["pairs"].size() == 4);
    int wavs = 0;
    for (const auto& e : fs::directory_iterator(out)) wavs += e.path().extension() == ".wav";
    CHECK(wavs == 8);
    for (const auto& p : m["pairs"]) {
        CHECK(p["key_confirmed"] == true);
        // re-measure the answer with the test oracle
        const auto& clips = p["clips"];
        const std::string ans = p["answer"];
        const std::string other = clips[0]["file"] == ans ? clips[1]["file"] : clips[0]["file"];
        const auto hi = oracle::read_wav_file((out / ans).string());
        const auto lo = oracle::read_wav_file((out / other).string());
        if (p["parameter"] == "tempo") {
            CHECK(oracle::onset_bpm(oracle::envelope_onsets(hi.samples, hi.sample_rate), hi.sample_rate, 2) >
                  oracle::onset_bpm(oracle::envelope_onsets(lo.samples, lo.sample_rate), lo.sample_rate, 2));
        } else {
            CHECK(oracle::rms(hi.samples) > oracle::rms(lo.samples));
        }
    }
}

TEST_CASE("cli: stimuli output does not depend on --jobs; empty spec gives an empty manifest") {
    const auto a = scratch("stim_j1"), b = scratch("stim_j4");
    REQUIRE(rnr("stimuli " + q(kSource / "rides/battery.json") + " --out " + q(a)).code == 0);
    REQUIRE(rnr("stimuli " + q(kSource / "rides/battery.json") + " --jobs 4 --out " + q(b)).code == 0);
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    CHECK(slurp(a / "pair_002_b.wav") == slurp(b / "pair_002_b.wav"));

    const auto e = scratch("stim_empty");
    std::ofstream(e / "spec.json") << R"({"pairs":[]})";
    REQUIRE(rnr("stimuli " + q(e / "spec.json") + " --out " + q(e)).code == 0);
    CHECK(nlohmann::json::parse(slurp(e / "manifest.json"))["pairs"].empty());
}

TEST_CASE("cli: calibrate writes a profile; failures map to exit codes") {
    const auto dir = scratch("cal");
    std::ofstream(dir / "cal.json")
        << R"([{"t_ms":0,"lean":0,"marker":"upright"},{"t_ms":4000,"lean":1},{"t_ms":6000,"marker":"forward"},{"t_ms":10000,"marker":"end"}])";
    REQUIRE(rnr("simulate " + q(dir / "cal.json") + " --seed 2 --duration-s 10.5 --out " + q(dir)).code == 0);
    const auto r = rnr("calibrate " + q(dir / "trace.jsonl") + " --out " + q(dir));
    REQUIRE(r.code == 0);
    const std::string profile = slurp(dir / "profile.conf");
    CHECK(profile.find("d_upright_mm") != std::string::npos);
    // the profile is a valid --config
    CHECK(rnr("simulate " + q(kSource / "rides/at_rest.json") + " --duration-s 1 --config " + q(dir / "profile.conf") +
              " --out " + q(dir / "x")).code == 0);

    std::ofstream(dir / "same.json") << R"([{"t_ms":0,"marker":"upright"},{"t_ms":3000,"marker":"forward"}])";
    REQUIRE(rnr("simulate " + q(dir / "same.json") + " --duration-s 6 --out " + q(dir / "same")).code == 0);
    CHECK(rnr("calibrate " + q(dir / "same/trace.jsonl") + " --out " + q(dir / "same")).code == 1);
    CHECK(rnr("calibrate " + q(kSource / "rides/ramp_up.jsonl") + " --out " + q(dir)).code == 2);
}
