#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <doctest.h>

#ifndef NONLOCAL_TV_BIN
#error "NONLOCAL_TV_BIN must name the CLI executable"
#endif

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(NONLOCAL_TV_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kStep = R"('{"type":"step","at":0,"height":1}')";
const std::string kHalf =
    R"('{"type":"halfspace","normal":[1,0],"offset":0.5,"domain":{"type":"box","lo":[0,0],"hi":[1,1]}}')";

}  // namespace

TEST_CASE("eval prints the single-step value") {
  const auto r = run("eval --f " + kStep + " --gamma 1 --lambda 10");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("lambda,gamma,value,error,converged\n10,1,1,", 0) == 0);
  const auto j = run("eval --f " + kStep + " --gamma 1 --lambda 10 --format json");
  CHECK(j.status == 0);
  CHECK(j.out.find("\"value\": 1.0") != std::string::npos);
}

TEST_CASE("constants table") {
  const auto r = run("constants");
  CHECK(r.status == 0);
  CHECK(r.out.find("1,2,2\n2,4,4\n3,6.2831853071795862,6.2831853071795862\n") != std::string::npos);
}

TEST_CASE("sweep schema") {
  const auto r = run("sweep --f " + kStep + " --gamma 1 --count 3");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("lambda,value,error,bound,margin\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
}

TEST_CASE("spec file input and byte-identical reruns") {
  const std::string spec = "cli_half.json";
  {
    std::ofstream out(spec);
    out << R"({"type":"halfspace","normal":[1,0],"offset":0.5,"domain":{"type":"box","lo":[0,0],"hi":[1,1]}})";
  }
  const std::string args = "slice-nd --spec-file " + spec +
                           " --lambda 100 --directions 64 --offsets 8 --oracle --samples 20000 --seed 3 --output ";
  CHECK(run(args + "a.csv").status == 0);
  CHECK(run(args + "b.csv").status == 0);
  const auto a = slurp("a.csv");
  CHECK(a.rfind("method,lambda,gamma,value,error\nslicing,", 0) == 0);
  CHECK(a.find("\noracle,") != std::string::npos);
  CHECK(a == slurp("b.csv"));
  const auto other = run("slice-nd --f " + kHalf + " --lambda 100 --directions 64 --offsets 8 --seed 4");
  CHECK(other.out != a);
}

TEST_CASE("exit codes") {
  CHECK(run(R"(eval --f '{"type":"step","at":0}' --gamma 1)").status == 2);
  CHECK(run(R"(eval --f '{"type":' --gamma 1)").status == 2);
  CHECK(run("eval --f " + kStep + " --gamma 0").status == 2);
  CHECK(run("eval --spec-file does-not-exist.json").status == 2);
  CHECK(run("slice-nd --f " + kStep).status == 2);
  CHECK(run("cantor --jmax 1 --alpha-start 0.2").status == 2);
  // A one-panel budget cannot meet the tolerance for a smooth profile.
  CHECK(run(R"(eval --f '{"type":"piecewise","nodes":[[0,0],[1,1]],"domain":[[0,1]]}' --gamma 0.5 --lambda 50 )"
            "--tol 1e-14 --max-panels 1")
            .status == 3);
}

TEST_CASE("verify passes on a clean build") {
  const auto r = run("verify");
  CHECK(r.status == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
