/*
* Copyright (C) 2026 henonlab authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

struct Run {
    int status;
    std::string output;
};

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("henonlab-cli-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

Run henonlab(const std::string& args, const fs::path& out)
{
    const fs::path log = out.string() + ".log";
    const std::string cmd =
        std::string("\"") + HENONLAB_EXE + "\" --out \"" + out.string() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(log)};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::string data(const std::string& rel) { return std::string(HENON_DATA_DIR) + "/" + rel; }

} // namespace

TEST(Cli, GreenAtLargeZ)
{
    const auto out = scratch("green");
    const auto r   = henonlab("green 1e6 0", out);
    ASSERT_EQ(r.status, 0) << r.output;
    const auto j = read_json(out / "green.json");
    EXPECT_NEAR(j.at("g_plus").get<double>(), std::log(1e6), 1e-3);
}

TEST(Cli, CertifyFixture)
{
    const auto out = scratch("certify");
    const auto r   = henonlab("--map " + data("maps/cubic.json") + " certify " + data("series/cubic_not_divisible.json") + " 3", out);
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(read_json(out / "certificate.json").at("verdict"), "NotDivisible");
}

TEST(Cli, FiltrationVerify)
{
    const auto out = scratch("filtration");
    const auto r   = henonlab("filtration-verify 10000", out);
    ASSERT_EQ(r.status, 0) << r.output;
    const auto j = read_json(out / "filtration.json");
    EXPECT_EQ(j.at("violations").get<long>(), 0);
    EXPECT_EQ(j.at("vplus_checked").get<long>(), 10000);
}

TEST(Cli, FailedCheckExitsWithTwo)
{
    const auto out = scratch("small-radius");
    {
        std::ofstream cfg(out / "cfg.json");
        cfg << R"({"R": 1.5})";
    }
    const auto r = henonlab("--config " + (out / "cfg.json").string() + " filtration-verify 1000", out);
    EXPECT_EQ(r.status, 2) << r.output;
    EXPECT_NE(r.output.find("violation"), std::string::npos);
    // The report is still written before the failure.
    EXPECT_GT(read_json(out / "filtration.json").at("violations").get<long>(), 0);
}

TEST(Cli, BadInputExitsWithOne)
{
    const auto out = scratch("bad");
    auto r         = henonlab("--bogus green 1 0", out);
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.output.find("--bogus"), std::string::npos);
    r = henonlab("green one 0", out);
    EXPECT_EQ(r.status, 1);
    r = henonlab("--map " + data("series/cubic_not_divisible.json") + " green 1 0", out);
    EXPECT_EQ(r.status, 1) << r.output;
    r = henonlab("render 0,1,0,1 8x8 rez,rez", out);
    EXPECT_EQ(r.status, 1) << r.output;
}

TEST(Cli, ReproducibleOutputs)
{
    const std::vector<std::string> runs = {"green 2+1i 0.5", "--benchmark 1 leaf auto auto 16",
                                           "render -3,3,-3,3 24x16 rez,rew", "constants"};
    for (const auto& args : runs) {
        const auto out = scratch("rep"), first = scratch("rep-first");
        ASSERT_EQ(henonlab(args, out).status, 0) << args;
        fs::remove_all(first);
        fs::rename(out, first);
        fs::create_directories(out);
        ASSERT_EQ(henonlab(args, out).status, 0) << args;
        std::size_t compared = 0;
        for (const auto& e : fs::directory_iterator(first)) {
            const auto name = e.path().filename();
            ASSERT_TRUE(fs::exists(out / name)) << name;
            if (name == "manifest.json") {
                // Wall-clock timings are the only run-dependent field.
                auto ma = read_json(e.path()), mb = read_json(out / name);
                ma.erase("timings_ms");
                mb.erase("timings_ms");
                EXPECT_EQ(ma, mb) << args;
                continue;
            }
            EXPECT_EQ(slurp(e.path()), slurp(out / name)) << args << ": " << name;
            ++compared;
        }
        EXPECT_GT(compared, 0u) << args;
    }
}

TEST(Cli, ManifestListsEveryFile)
{
    const auto out = scratch("manifest");
    ASSERT_EQ(henonlab("--benchmark 1 brody auto 1 2", out).status, 0);
    const auto m = read_json(out / "manifest.json");
    EXPECT_EQ(m.at("command"), "brody");
    EXPECT_EQ(m.at("exit_status"), 0);
    EXPECT_TRUE(m.at("versions").contains("mpfr"));
    std::set<std::string> listed;
    for (const auto& f : m.at("files"))
        listed.insert(f.at("path").get<std::string>());
    for (const auto& e : fs::directory_iterator(out)) {
        const auto name = e.path().filename().string();
        if (name != "manifest.json")
            EXPECT_TRUE(listed.count(name)) << name;
    }
    EXPECT_TRUE(listed.count("brody.json") && listed.count("brody_cases.csv"));
}
