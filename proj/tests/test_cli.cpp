#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Runs the command-line tool with stderr folded into stdout.
Result run(const std::string& args) {
  const std::string cmd = std::string("\"") + FREELAB_CLI_PATH + "\" " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string body_without_comments(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("#", 0) != 0) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("verify exits zero on the clean battery and names the broken identity under fault injection") {
  const auto ok = run("verify --k-max 3");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  const auto bad = run("verify --k-max 3 --perturb-q 1e-3");
  CHECK(bad.code != 0);
  CHECK(bad.out.find("FAIL mcirc.connected_graphs_vs_mobius") != std::string::npos);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run("").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("verify --k-max 0").code == 2);
  CHECK(run("predict chain").code == 2);
  CHECK(run("--set nowhere.key=1 verify").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("prediction subcommands") {
  const auto chain = run("predict chain --z 0+1i,0+2i");
  CHECK(chain.code == 0);
  CHECK(chain.out.rfind("-0.2038204263767997 0\n", 0) == 0);
  const auto f = run("predict f --f \"exp(i*3*x)\" --k 1");
  CHECK(f.code == 0);
  CHECK(std::stod(f.out) == doctest::Approx(-0.0922279527091886).epsilon(1e-13));
  const auto e = run("predict exp --s 0,0 --obs traceless-diagonal-pm1,traceless-diagonal-pm1 --dim 8");
  CHECK(e.code == 0);
  CHECK(std::stod(e.out) == doctest::Approx(1.0));
}

TEST_CASE("partition inspection") {
  CHECK(run("ncp catalan 5").out == "42\n");
  CHECK(run("ncp kreweras \"1 3|2|4\"").out == "1 2|3 4\n");
  CHECK(run("ncp mobius \"1|2|3\"").out == "2\n");
  const auto e = run("ncp enumerate 4");
  CHECK(std::count(e.out.begin(), e.out.end(), '\n') == 14);
  const auto g = run("ncp graphs 3 --connected");
  CHECK(std::count(g.out.begin(), g.out.end(), '\n') == 4);
  CHECK(run("ncp kreweras \"1 2|2\"").code == 2);
}

TEST_CASE("runs without timing are byte-reproducible") {
  const auto base = std::filesystem::temp_directory_path() / "freelab_cli_repro";
  std::filesystem::remove_all(base);
  const std::string common = " --no-timing --seed 5 locallaw --n 24,32 --eta 1 --k 2 --samples 3";
  const auto a = run("--out \"" + (base / "a").string() + "\"" + common);
  const auto b = run("--out \"" + (base / "b").string() + "\" --workers 2" + common);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const auto body_a = body_without_comments(base / "a" / "locallaw.csv");
  CHECK(!body_a.empty());
  CHECK(body_a == body_without_comments(base / "b" / "locallaw.csv"));
}
