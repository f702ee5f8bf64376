#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "maxbell/cli.hpp"
#include "maxbell/io.hpp"

using namespace maxbell;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Rows end in "value,note"; the value is the second to last field.
std::string value_column(const std::string& row) {
  const auto last = row.rfind(',');
  const auto prev = row.rfind(',', last - 1);
  return row.substr(prev + 1, last - prev - 1);
}

}  // namespace

TEST_CASE("omega") {
  CHECK(run({"omega", "--p", "2", "--y", "0.75"}).out == "1.5\n");
  CHECK(run({"omega", "--p", "2", "--y", "1"}).out == "1\n");
  const Run bad = run({"omega", "--p", "2", "--y", "1.5"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("y must lie in [0,1]") != std::string::npos);
  CHECK(run({"omega", "--p", "2"}).code == kExitUsage);
  CHECK(run({"omega", "--p", "abc", "--y", "1"}).code == kExitUsage);
  CHECK(run({"nonsense"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);

  const Json doc = Json::parse(run({"omega", "--p", "2", "--y", "0.75", "--format", "json"}).out);
  CHECK(doc["omega"].get<double>() == 1.5);
}

TEST_CASE("bellman and constants") {
  CHECK(run({"bellman", "--p", "2", "--F", "2", "--f", "1"}).out == "5.82842712474619\n");
  CHECK(run({"bellman", "--p", "2", "--F", "2", "--f", "1", "--a", "1", "--c", "1"}).out ==
        "5.82842712474619\n");
  CHECK(run({"bellman", "--p", "2", "--F", "1", "--f", "2"}).code == kExitUsage);
  CHECK(run({"bellman", "--p", "2", "--F", "2", "--f", "1", "--a", "1"}).code == kExitUsage);

  CHECK(run({"constants", "--k", "1", "--b", "0", "--p", "2"}).out == "a=1 c=1\n");
  const Json c = Json::parse(run({"constants", "--k", "2", "--b", "0.5", "--p", "3", "--format", "json"}).out);
  CHECK(c["a"].get<double>() == doctest::Approx(2.0 / 3));
  CHECK(c["c"].get<double>() == doctest::Approx(4.0 / 3));
  CHECK(run({"constants", "--k", "1", "--b", "1", "--p", "2"}).code == kExitUsage);
}

TEST_CASE("verify") {
  Run r = run({"verify", "--suite", "doob", "--trials", "200", "--seed", "7"});
  CHECK(r.code == kExitOk);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 202);
  CHECK(ls[0].rfind("# maxbell verify", 0) == 0);
  CHECK(ls[1] == "name,trial,lhs,rhs,margin,pass");
  CHECK(r.out == run({"verify", "--suite", "doob", "--trials", "200", "--seed", "7"}).out);

  r = run({"verify", "--suite", "prop2", "--p", "2", "--F", "2", "--f", "1", "--h", "1.3333", "--z", "1",
           "--alphas", "0.1,0.01,0.001", "--format", "json"});
  CHECK(r.code == kExitOk);
  const Json doc = Json::parse(r.out);
  const double ratio = doc["reports"][0]["details"]["table"].back()["ratio"].get<double>();
  CHECK(std::abs(ratio - 1) < 0.01);

  CHECK(run({"verify", "--suite", "thm2", "--p", "2", "--k", "1", "--b", "0", "--trials", "500", "--seed", "1"})
            .code == kExitOk);
  CHECK(run({"verify", "--suite", "bogus"}).code == kExitUsage);
  CHECK(run({"verify", "--suite", "thm2", "--b", "5"}).code == kExitUsage);
  CHECK(run({"verify", "--suite", "prop1", "--trials", "x"}).code == kExitUsage);
}

TEST_CASE("verify on an imported tree") {
  const std::string path = "cli_test_tree.json";
  {
    std::ofstream out(path);
    out << R"({"arity_children": [[1, 2], [], []], "measure": [1, 0.5, 0.5],
               "leaf_values": {"phi": [4, 0], "w": [2, 0.5]}})";
  }
  for (const char* suite : {"prop1", "thm3", "doob", "thm1"}) {
    const Run r = run({"verify", "--suite", suite, "--tree", path, "--p", "2", "--trials", "3"});
    CHECK_MESSAGE(r.code == kExitOk, suite);
  }
  CHECK(run({"verify", "--suite", "prop1", "--tree", "missing.json"}).code == kExitUsage);
  std::remove(path.c_str());
}

TEST_CASE("table") {
  Run r = run({"table", "--expr", "bellman", "--p", "2", "--F", "1", "--f", "0:1:11"});
  CHECK(r.code == kExitOk);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 12);
  CHECK(ls[0] == "p,F,f,value,note");
  CHECK(ls[1] == "2,1,0,4,");
  CHECK(ls[11] == "2,1,1,1,");

  r = run({"table", "--expr", "bellman_star", "--p", "2", "--a", "1", "--c", "1", "--F", "1", "--f", "0:1:5"});
  const auto star = lines(r.out);
  const auto plain = lines(run({"table", "--expr", "bellman", "--p", "2", "--F", "1", "--f", "0:1:5"}).out);
  REQUIRE(star.size() == plain.size());
  for (std::size_t i = 1; i < star.size(); ++i) {
    CHECK(value_column(star[i]) == value_column(plain[i]));
  }

  r = run({"table", "--expr", "prop2_rhs", "--p", "2", "--F", "1", "--f", "1", "--h", "1:2:3", "--z", "1"});
  ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[1] == "2,1,1,1,1,1,");

  r = run({"table", "--expr", "bellman", "--p", "2", "--F", "1", "--f", "0:2:3"});
  ls = lines(r.out);
  CHECK(ls[3].find("NA") != std::string::npos);
  CHECK(run({"table", "--expr", "bellman", "--p", "2", "--F", "1", "--f", "0:1"}).code == kExitUsage);
  CHECK(run({"table", "--expr", "bellman", "--p", "2", "--F", "1"}).code == kExitUsage);
}

TEST_CASE("output file") {
  const std::string path = "cli_test_out.csv";
  CHECK(run({"omega", "--p", "3", "--y", "0", "--out", path, "--format", "csv"}).code == kExitOk);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "p,y,omega");
  CHECK(row == "3,0,1.5");
  std::remove(path.c_str());
}
