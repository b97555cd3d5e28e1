#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "potkit_cli_test";

int run(const std::string& args, const std::string& log = "log.txt") {
  const std::string cmd = std::string(POTKIT_BIN) + " " + args + " > " + (kDir / log).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Fresh {
  Fresh() {
    fs::remove_all(kDir);
    fs::create_directories(kDir);
  }
};

}  // namespace

TEST_CASE("exit code 0: passing presets write their artifacts") {
  Fresh f;
  CHECK(run("preset classical-pj --out " + (kDir / "pj").string()) == 0);
  CHECK(fs::exists(kDir / "pj" / "verdicts.json"));
  CHECK(fs::exists(kDir / "pj" / "margins.csv"));
  // the expected failure of the subharmonic family is encoded in the scenario
  CHECK(run("preset lyons-example --out " + (kDir / "lyons").string()) == 0);
  CHECK(slurp(kDir / "lyons" / "verdicts.json").find("\"expect\": \"fail\"") != std::string::npos);
  CHECK(run("preset green-disk --grid 32 --out " + (kDir / "green").string()) == 0);
  const std::string csv = slurp(kDir / "green" / "fields" / "g-half-green.csv");
  CHECK(csv.rfind("x,y,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 32 * 32 / 2);
}

TEST_CASE("exit code 1: a failing check") {
  Fresh f;
  write(kDir / "fail.json", R"({"schema": 1, "name": "fail",
    "measures": {"heavy": {"type": "dirac", "at": [0, 0], "weight": 2},
                 "w": {"type": "harmonic_measure", "ball": {"center": [0, 0], "radius": 1}, "x": [0, 0]}},
    "checks": [{"type": "mass", "theta": "heavy", "mu": "w"}]})");
  CHECK(run("run " + (kDir / "fail.json").string() + " --out " + (kDir / "o").string()) == 1);
  CHECK(slurp(kDir / "o" / "verdicts.json").find("\"pass\": false") != std::string::npos);
  // the tolerance knob can rescue a near miss but not this one
  CHECK(run("run " + (kDir / "fail.json").string() + " --tol-scale 10 --out " + (kDir / "o").string()) == 1);
}

TEST_CASE("exit code 2: malformed input") {
  Fresh f;
  write(kDir / "bad.json", "{\n  \"schema\": 1,\n  \"name\": \"bad\",\n  \"checks\": [\n    {\"type\": \"nope\"}\n  ]\n}\n");
  CHECK(run("run " + (kDir / "bad.json").string(), "bad.txt") == 2);
  const std::string msg = slurp(kDir / "bad.txt");
  CHECK(msg.find("bad.json:5:") != std::string::npos);
  CHECK(msg.find("unknown check type") != std::string::npos);

  write(kDir / "broken.json", "{\"schema\": 1,\n\"name\": \"broken\"\n\"checks\": []}");
  CHECK(run("run " + (kDir / "broken.json").string(), "broken.txt") == 2);
  CHECK(slurp(kDir / "broken.txt").find("broken.json:3:") != std::string::npos);

  CHECK(run("run " + (kDir / "absent.json").string()) == 2);
  CHECK(run("preset no-such-preset") == 2);
  CHECK(run("run") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("preset classical-pj --grid 1") == 2);
}

TEST_CASE("list") {
  Fresh f;
  CHECK(run("list", "list.txt") == 0);
  const std::string table = slurp(kDir / "list.txt");
  CHECK(std::count(table.begin(), table.end(), '\n') == 12);
  CHECK(run("list --tag zeros", "zeros.txt") == 0);
  const std::string z = slurp(kDir / "zeros.txt");
  CHECK(std::count(z.begin(), z.end(), '\n') == 3);
  CHECK(run("list --json", "list.json") == 0);
  CHECK(slurp(kDir / "list.json").find("\"tag\": \"pj\"") != std::string::npos);
  CHECK(run("preset classical-pj --dump", "dump.json") == 0);
  CHECK(run("run " + (kDir / "dump.json").string() + " --out " + (kDir / "d").string()) == 0);
}

TEST_CASE("identical runs give byte-identical verdicts") {
  Fresh f;
  for (const char* p : {"balayage-masses", "gluing-green"}) {
    CAPTURE(p);
    CHECK(run(std::string("preset ") + p + " --seed 0 --out " + (kDir / "a").string()) == 0);
    CHECK(run(std::string("preset ") + p + " --seed 0 --jobs 1 --out " + (kDir / "b").string()) == 0);
    const std::string a = slurp(kDir / "a" / "verdicts.json");
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(kDir / "b" / "verdicts.json"));
    CHECK(slurp(kDir / "a" / "margins.csv") == slurp(kDir / "b" / "margins.csv"));
  }
}
