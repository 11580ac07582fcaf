// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line tool: output contracts, exit
// codes, and stdout determinism, driving the real binary.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(TOBDD_CLI_PATH) + " " + args +
                    (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buffer;
  std::size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    result.output.append(buffer.data(), n);
  int rc = pclose(pipe);
  result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return result;
}

std::string data(const std::string& name) {
  return std::string(TOBDD_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("count prints the number of consistent assignments") {
  RunResult r = run("count " + data("example1.smt2"));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "2\n");
}

TEST_CASE("equiv verdict and exit code") {
  RunResult same = run("equiv " + data("psi1.smt2") + " " + data("psi2.smt2"));
  CHECK(same.exit_code == 0);
  CHECK(same.output == "equivalent\n");

  RunResult diff =
      run("equiv " + data("example1.smt2") + " " + data("negated_example1.smt2"));
  CHECK(diff.exit_code == 1);
  CHECK(diff.output == "not-equivalent\n");
}

TEST_CASE("check classifies sat, unsat, and valid") {
  CHECK(run("check " + data("fig7.smt2")).output == "unsat\n");
  CHECK(run("check " + data("example1.smt2")).output == "sat\n");
  CHECK(run("check " + data("valid.smt2")).output == "valid\n");
  CHECK(run("check " + data("fig7.smt2")).exit_code == 0);
}

TEST_CASE("compile emits the stats record") {
  RunResult r = run("compile " + data("example1.smt2"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"schema_version\":1") != std::string::npos);
  CHECK(r.output.find("\"status\":\"sat\"") != std::string::npos);
  CHECK(r.output.find("\"alpha_atoms\":2") != std::string::npos);
  CHECK(r.output.find("\"model_count\":\"2\"") != std::string::npos);
  CHECK(r.output.find("\"bdd_nodes\":3") != std::string::npos);
  CHECK(r.output.find("wall") == std::string::npos);  // stdout stays stable

  SECTION("eq-elim mode reports betas and defining lemmas") {
    RunResult eq = run("compile --mode eq-elim " + data("example1.smt2"));
    CHECK(eq.output.find("\"beta_atoms\":2") != std::string::npos);
    CHECK(eq.output.find("\"defining_lemmas\":3") != std::string::npos);
  }
}

TEST_CASE("repeated runs are byte-identical") {
  for (const std::string& args :
       {std::string("compile --mode eq-elim ") + data("example1.smt2"),
        std::string("count ") + data("fig5.smt2"),
        std::string("dot ") + data("example1.smt2")}) {
    RunResult a = run(args);
    RunResult b = run(args);
    CHECK(a.exit_code == b.exit_code);
    CHECK(a.output == b.output);
  }
}

TEST_CASE("dot prints a labeled diagram") {
  RunResult r = run("dot " + data("example1.smt2"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("digraph") != std::string::npos);
  CHECK(r.output.find("x <= 0") != std::string::npos);
  CHECK(r.output.find("x = 1") != std::string::npos);
  CHECK(r.output.find("style=dashed") != std::string::npos);
}

TEST_CASE("order override changes the diagram root") {
  RunResult normal = run("dot " + data("fig5.smt2"));
  RunResult reordered =
      run("dot --order \"(<= x 2),(>= x 1),(<= x 0)\" " + data("fig5.smt2"));
  CHECK(normal.exit_code == 0);
  CHECK(reordered.exit_code == 0);
  CHECK(normal.output != reordered.output);
}

TEST_CASE("out flag writes the diagram to a file") {
  std::string path = "/tmp/tobdd_cli_test_out.dot";
  std::remove(path.c_str());
  RunResult r = run("compile --out " + path + " " + data("example1.smt2"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"schema_version\"") != std::string::npos);
  FILE* f = std::fopen(path.c_str(), "r");
  REQUIRE(f != nullptr);
  std::array<char, 4096> buffer;
  std::string dot(buffer.data(), fread(buffer.data(), 1, buffer.size(), f));
  std::fclose(f);
  std::remove(path.c_str());
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("x <= 0") != std::string::npos);
}

TEST_CASE("equiv honors an explicit shared order") {
  RunResult r = run("equiv --order \"(= y 1),(= x 0),(= (- y x) 1)\" " +
                    data("psi1.smt2") + " " + data("psi2.smt2"));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "equivalent\n");
}

TEST_CASE("parse errors exit with code 2 and a located message") {
  RunResult r = run("check " + data("bad_syntax.smt2"), /*merge_stderr=*/true);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(r.output.find("unbalanced") != std::string::npos);
}

TEST_CASE("resource caps exit with code 3") {
  RunResult r =
      run("count --max-assignments 1 " + data("example1.smt2"), /*merge_stderr=*/true);
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("cap") != std::string::npos);
}

TEST_CASE("verbose trace goes to stderr only") {
  RunResult quiet = run("count --verbose " + data("example1.smt2"));
  CHECK(quiet.output == "2\n");
  RunResult chatty = run("count --verbose " + data("example1.smt2"), true);
  CHECK(chatty.output.find("theory conflict") != std::string::npos);
}

TEST_CASE("stats flag reports the record on stderr for count") {
  RunResult r = run("count --stats " + data("example1.smt2"), true);
  CHECK(r.output.find("\"schema_version\":1") != std::string::npos);
  CHECK(r.output.find("2\n") != std::string::npos);
}
