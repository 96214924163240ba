#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "support/paths.hpp"
#include "tccp/cli.hpp"
#include "tccp/interpreter.hpp"
#include "tccp/oracle.hpp"
#include "tccp/trace.hpp"

using namespace tccp;
namespace fs = std::filesystem;

namespace {

struct Golden {
  std::string name;
  std::string program;
  std::string entry;
  std::size_t steps = 0;
  std::string expected;
};

std::string directive(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line, tag = "% " + key + ": ";
  while (std::getline(in, line))
    if (line.rfind(tag, 0) == 0) return line.substr(tag.size());
  return {};
}

std::vector<Golden> goldens() {
  std::vector<Golden> out;
  for (const auto& e : fs::directory_iterator(paths::repo("programs/rules"))) {
    if (e.path().extension() != ".tccp") continue;
    Golden g;
    g.name = e.path().stem().string();
    g.program = cli::read_file(e.path().string());
    g.entry = directive(g.program, "entry");
    g.steps = std::stoul(directive(g.program, "steps"));
    auto trace = e.path();
    trace.replace_extension(".trace");
    g.expected = cli::read_file(trace.string());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

}  // namespace

TEST(Rules, OneGoldenPerRule) {
  std::vector<std::string> names;
  for (const auto& g : goldens()) names.push_back(g.name);
  EXPECT_EQ(names, (std::vector<std::string>{"ask", "hid", "now1", "now2", "now3", "now4", "par1", "par2", "proc",
                                              "tell"}));
}

TEST(Rules, TracesMatchBitExactly) {
  for (const auto& g : goldens()) {
    SCOPED_TRACE(g.name);
    ASSERT_FALSE(g.entry.empty());
    auto p = cli::load(g.program, g.entry);
    Trace t = run(p, g.steps, ChoicePolicy::first());
    std::string got;
    for (const auto& s : t) got += render_text(s, false);
    EXPECT_EQ(got, g.expected);
    // A golden covers one to three transitions of its rule plus setup, and
    // each ends before its step budget.
    EXPECT_NE(t.back().status, Status::Running);
  }
}

TEST(Rules, OracleAgreesOnGoldens) {
  for (const auto& g : goldens()) {
    SCOPED_TRACE(g.name);
    auto p = cli::load(g.program, g.entry);
    auto probes = oracle::probes(p);
    auto a = oracle::observe(run(p, g.steps, ChoicePolicy::first()), probes);
    auto b = oracle::observe(oracle::run(p, g.steps, ChoicePolicy::first()), probes);
    EXPECT_TRUE(a == b);
  }
}
