#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int status = -1;
  std::string out;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env;
  if (!env.empty()) cmd += " ";
  cmd += std::string(ENBAR_BIN_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
  const int rc = pclose(pipe);
  res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("verification suites pass and report their bounds") {
  const RunResult r = run_cli("verify --n 2 --arity-max 3 --ring z");
  CHECK(r.status == 0);
  for (const char* suite :
       {"twisting-equation", "projection", "coderivation",
        "cell-preservation", "restriction", "suspension"})
    CHECK(r.out.find(suite) != std::string::npos);
  CHECK(r.out.find("all suites pass") != std::string::npos);

  const RunResult j = run_cli("verify --n 1 --arity-max 2 --json");
  CHECK(j.status == 0);
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed["pass"] == true);
  CHECK(parsed["suites"].size() == 6);
  for (const auto& s : parsed["suites"]) CHECK(s["checks"].get<long>() > 0);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run_cli("verify --ring fp:4").status == 2);       // 4 is not prime
  CHECK(run_cli("").status == 2);                         // subcommand needed
  CHECK(run_cli("homology --object nonsense").status == 2);
  CHECK(run_cli("info --object nonsense").status == 2);
  CHECK(run_cli("homology --object bar-eval --algebra trivial:1").status ==
        2);  // needs a weight or degree bound
  CHECK(run_cli("verify --n 9").status == 2);             // out of range
  const RunResult guard = run_cli("homology --object en-operad --n 2 --arity 4");
  CHECK(guard.status == 2);
  CHECK(guard.out.find("14640") != std::string::npos);  // explicit estimate
}

TEST_CASE("en-operad homology table") {
  const RunResult r =
      run_cli("homology --object en-operad --n 2 --arity 3 --ring q --format csv");
  CHECK(r.status == 0);
  CHECK(r.out ==
        "arity,weight,degree,free_rank,torsion\n"
        "3,0,0,1,\n"
        "3,0,1,3,\n"
        "3,0,2,2,\n"
        "3,0,3,0,\n");
}

TEST_CASE("bar-module homology is zero at arity two") {
  const RunResult r = run_cli("homology --object bar-module --n 2 --arity 2");
  CHECK(r.status == 0);
  const auto parsed = nlohmann::json::parse(r.out);
  CHECK(parsed["object"] == "bar-module");
  CHECK(parsed["ring"] == "z");
  for (const auto& row : parsed["table"]) {
    CHECK(row["free_rank"] == 0);
    CHECK(row["torsion"].empty());
  }
}

TEST_CASE("bar-eval derives the weight bound from the degree bound") {
  const RunResult r = run_cli(
      "homology --object bar-eval --algebra trivial:1 --n 1 --degree-max 5");
  CHECK(r.status == 0);
  const auto parsed = nlohmann::json::parse(r.out);
  int rank_one_rows = 0;
  for (const auto& row : parsed["table"]) {
    if (row["free_rank"] == 1) {
      CHECK(row["weight"] == row["degree"]);
      ++rank_one_rows;
    }
  }
  CHECK(rank_one_rows == 5);
}

TEST_CASE("harrison and stabilization reports pass") {
  const RunResult h =
      run_cli("homology --object harrison --arity-max 3 --format text");
  CHECK(h.status == 0);
  CHECK(h.out.find("PASS") != std::string::npos);
  const RunResult s = run_cli(
      "homology --object stabilization --arity 2 --window 2 --n-max 3 "
      "--format text");
  CHECK(s.status == 0);
  CHECK(s.out.find("PASS") != std::string::npos);
}

TEST_CASE("flags override the environment") {
  const RunResult env_only =
      run_cli("homology --object en-operad --n 1 --arity 2", "ENBAR_RING=q");
  CHECK(env_only.status == 0);
  CHECK(nlohmann::json::parse(env_only.out)["ring"] == "q");
  const RunResult flag_wins = run_cli(
      "homology --object en-operad --n 1 --arity 2 --ring z", "ENBAR_RING=q");
  CHECK(flag_wins.status == 0);
  CHECK(nlohmann::json::parse(flag_wins.out)["ring"] == "z");
}

TEST_CASE("reports are byte-identical across worker counts") {
  const std::string args =
      "homology --object bar-eval --algebra poly:2 --n 2 --weight-max 2";
  const RunResult one = run_cli(args + " --threads 1");
  const RunResult four = run_cli(args + " --threads 4");
  CHECK(one.status == 0);
  CHECK(one.out == four.out);
  const RunResult env_threads = run_cli(args, "ENBAR_THREADS=3");
  CHECK(env_threads.out == one.out);
}

TEST_CASE("output lands in a file when requested") {
  const auto path = std::filesystem::temp_directory_path() / "enbar_cli_out.json";
  std::filesystem::remove(path);
  const std::string args = "homology --object en-operad --n 2 --arity 2";
  const RunResult direct = run_cli(args);
  const RunResult filed = run_cli(args + " --output " + path.string());
  CHECK(filed.status == 0);
  CHECK(filed.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == direct.out);
  std::filesystem::remove(path);
}

TEST_CASE("info tables") {
  const RunResult tn = run_cli("info --object tn --n 2 --arity 3");
  CHECK(tn.status == 0);
  CHECK(tn.out.find("total dimension 24") != std::string::npos);

  const RunResult en = run_cli("info --object en --n 2 --arity 2");
  CHECK(en.status == 0);
  CHECK(en.out.find("degree 0: 2") != std::string::npos);
  CHECK(en.out.find("degree 1: 2") != std::string::npos);

  const RunResult cup = run_cli("info --object cup --m 1");
  CHECK(cup.status == 0);
  CHECK(cup.out.find("[21|12]") != std::string::npos);
  CHECK(cup.out.find("degree 1, filtration level 2") != std::string::npos);

  const RunResult gn = run_cli("info --object gn --n 2 --arity 2");
  CHECK(gn.status == 0);

  const RunResult tw = run_cli("info --object twist --n 1 --arity-max 2");
  CHECK(tw.status == 0);
  CHECK(tw.out.find("(1)(2)") != std::string::npos);
  CHECK_NOTHROW(nlohmann::json::parse(tw.out));
}

}  // TEST_SUITE
