#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "isfu_cli.hpp"

namespace fs = std::filesystem;
using namespace isfu;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("isfu_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& text) {
    auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int call(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::dispatch(args, out_, err_);
  }

  std::string out() const { return out_.str(); }
  std::string err() const { return err_.str(); }

 private:
  fs::path dir_;
  std::ostringstream out_, err_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_F(Cli, RunTwoIncrements) {
  auto p = file("p.isq", "f.incr ; f.incr ; +f.iszero ; !t ; !f");
  EXPECT_EQ(call({"run", "--program", p, "--family", "f=counter:0"}), 1);
  EXPECT_EQ(out(), "reply=F state=2\nstatus=completed steps=3\n");
}

TEST_F(Cli, RunTrace) {
  auto p = file("p.isq", "f.incr ; f.incr ; +f.iszero ; !t ; !f");
  EXPECT_EQ(call({"run", "--program", p, "--family", "f=counter:0", "--trace"}), 1);
  auto ls = lines(out());
  ASSERT_EQ(ls.size(), 5u);
  EXPECT_EQ(ls[0], "pos=1 action=f.incr reply=T state=1");
  EXPECT_EQ(ls[2], "pos=3 action=f.iszero reply=F state=2");
}

TEST_F(Cli, RunJson) {
  auto p = file("p.isq", "f.incr ; !t");
  EXPECT_EQ(call({"--json", "run", "--program", p, "--family", "f=counter:4"}), 0);
  auto j = nlohmann::json::parse(lines(out()).back());
  EXPECT_EQ(j["status"], "completed");
  EXPECT_EQ(j["reply"], "T");
  EXPECT_EQ(j["family"]["f"], "5");
  EXPECT_EQ(j["steps"], 1);
}

TEST_F(Cli, RunDivergentAndBudget) {
  auto loop = file("loop.isq", "+f.iszero ; \\1 ; !t");
  EXPECT_EQ(call({"run", "--program", loop, "--family", "f=counter:0"}), 2);
  EXPECT_NE(out().find("status=divergent"), std::string::npos);
  auto grow = file("grow.isq", "f.incr ; \\1");
  EXPECT_EQ(call({"run", "--program", grow, "--family", "f=counter:0", "--budget", "50"}),
            3);
  EXPECT_NE(out().find("status=budget_exhausted steps=50"), std::string::npos);
  EXPECT_EQ(call({"run", "--program", loop, "--family", "f=counter:0", "--budget", "40",
                  "--no-cycle-detection"}),
            3);
}

TEST_F(Cli, RunFamilies) {
  auto p = file("p.isq", "f.incr ; g.succ0 ; !t");
  EXPECT_EQ(call({"run", "--program", p, "--family", "f=counter:1,g=univ:3"}), 0);
  EXPECT_EQ(lines(out())[0], "reply=T state=f:2,g:6");
  EXPECT_EQ(call({"run", "--program", p, "--family", "f=counter:1,f=counter:2"}), 2);
  auto t = file("u.tbl", "states 2\nmethod a\n0 -> T 1\n1 -> F 0\n");
  auto q = file("q.isq", "+f.a ; !t ; !f");
  EXPECT_EQ(call({"run", "--program", q, "--family", "f=table:" + t + ":1"}), 1);
  EXPECT_EQ(lines(out())[0], "reply=F state=0");
  EXPECT_EQ(call({"run", "--program", q, "--family", "f=table:" + t + ":2"}), 64);
  EXPECT_EQ(call({"run", "--program", q, "--family", "f=bogus:1"}), 64);
  EXPECT_EQ(call({"run", "--program", q, "--family", "f=counter:x"}), 64);
}

TEST_F(Cli, UsageAndDataErrors) {
  EXPECT_EQ(call({}), 64);
  EXPECT_EQ(call({"run"}), 64);
  EXPECT_EQ(call({"frobnicate"}), 64);
  EXPECT_EQ(call({"run", "--program", "/nonexistent/p", "--family", "f=counter:0"}), 65);
  auto bad = file("bad.isq", "f.m ; ;");
  EXPECT_EQ(call({"run", "--program", bad, "--family", "f=counter:0"}), 65);
  EXPECT_NE(err().find("error:"), std::string::npos);
  EXPECT_EQ(call({"--help"}), 0);
  EXPECT_NE(out().find("degrees"), std::string::npos);
}

TEST_F(Cli, ExtractJumpChain) {
  auto p = file("p.isq", "#2 ; !t ; \\2");
  EXPECT_EQ(call({"extract", "--program", p}), 0);
  EXPECT_EQ(out(), "*1: D\n");
}

TEST_F(Cli, ExtractJson) {
  auto p = file("p.isq", "+f.m ; !t ; !f");
  EXPECT_EQ(call({"--json", "extract", "--program", p}), 0);
  auto ls = lines(out());
  ASSERT_EQ(ls.size(), 3u);
  auto root = nlohmann::json::parse(ls[0]);
  EXPECT_EQ(root["kind"], "post");
  EXPECT_EQ(root["action"], "f.m");
  EXPECT_EQ(root["root"], true);
}

TEST_F(Cli, NormalizeAndCompile) {
  auto p = file("p.isq", "-f.m ; !t ; !f");
  EXPECT_EQ(call({"normalize", "--program", p}), 0);
  auto y = parse_program(out());
  EXPECT_TRUE(is_normal_form(y));
  EXPECT_TRUE(bisimilar(extract(y), extract(parse_program("-f.m ; !t ; !f"))));

  auto dumpfile = file("s.txt", dump(extract(parse_program("+f.a ; \\1 ; !f"))));
  EXPECT_EQ(call({"--json", "compile-thread", "--spec", dumpfile}), 0);
  auto j = nlohmann::json::parse(lines(out())[0]);
  auto x = parse_program(j["program"].get<std::string>());
  EXPECT_EQ(j["length"], x.size());
  EXPECT_TRUE(bisimilar(extract(x), extract(parse_program("+f.a ; \\1 ; !f"))));

  auto tau = file("tau.txt", "*1: tau ? 1 : 1\n");
  EXPECT_EQ(call({"compile-thread", "--spec", tau}), 65);
  auto junk = file("junk.txt", "hello\n");
  EXPECT_EQ(call({"compile-thread", "--spec", junk}), 65);
}

TEST_F(Cli, TranslateAndCosim) {
  auto p = file("succ.rml", "+r0.iszero ; #4 ; r0.decr ; r2.incr ; \\4 ; r2.incr ; #1");
  EXPECT_EQ(call({"translate", "--rml", p}), 0);
  EXPECT_EQ(lines(out())[0].rfind("f.exp2 ; +f.iszero0 ; ", 0), 0u);
  EXPECT_EQ(call({"cosim", "--rml", p, "--inputs", "0..4"}), 0);
  auto ls = lines(out());
  ASSERT_EQ(ls.size(), 5u);
  EXPECT_EQ(ls[4], "input=4 oracle=(T, 5) translated=(T, 5) agree=yes");
  EXPECT_EQ(call({"--json", "cosim", "--rml", p, "--inputs", "2,7"}), 0);
  auto j = nlohmann::json::parse(lines(out())[1]);
  EXPECT_EQ(j["input"], "7");
  EXPECT_EQ(j["agree"], true);
  EXPECT_EQ(call({"cosim", "--rml", p, "--inputs", "x"}), 64);
  auto bad = file("bad.rml", "r0.incr ; +r0.iszero");
  EXPECT_EQ(call({"translate", "--rml", bad}), 65);
}

TEST_F(Cli, Degrees) {
  EXPECT_EQ(call({"degrees", "--k", "2"}), 0);
  EXPECT_EQ(out(), "degrees=12\n");
  EXPECT_EQ(call({"degrees", "--k", "1", "--list"}), 0);
  auto ls = lines(out());
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "fingerprint={T0,F0} size=2 generators={}");
  EXPECT_EQ(call({"--json", "degrees", "--k", "2", "--max-sets", "3"}), 0);
  auto j = nlohmann::json::parse(lines(out()).back());
  EXPECT_EQ(j["exact"], false);
  EXPECT_EQ(call({"degrees", "--k", "2", "--max-sets", "3"}), 0);
  EXPECT_EQ(out().rfind("degrees>=", 0), 0u);
  EXPECT_EQ(call({"degrees", "--k", "5"}), 64);
}

TEST_F(Cli, Leq) {
  auto swap = file("swap.tbl", "states 2\nmethod a\n0 -> T 1\n1 -> T 0\n");
  auto id = file("id.tbl", "states 2\nmethod a\n0 -> T 0\n1 -> T 1\n");
  EXPECT_EQ(call({"leq", "--left", id, "--right", swap}), 0);
  EXPECT_EQ(out(), "true\n");
  EXPECT_EQ(call({"--json", "leq", "--left", swap, "--right", id}), 0);
  EXPECT_EQ(out(), "{\"leq\":false}\n");
  auto three = file("three.tbl", "states 3\nmethod a\n0 -> T 0\n1 -> T 1\n2 -> T 2\n");
  EXPECT_EQ(call({"leq", "--left", id, "--right", three}), 65);
}
