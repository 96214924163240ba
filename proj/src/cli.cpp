#include "tccp/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tccp/syntax.hpp"
#include "tccp/trace.hpp"

namespace tccp::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ast::Program load(const std::string& text, const std::string& entry) {
  ast::Program p = parse_program(text);
  attach_entry(p, parse_agent(entry));
  return p;
}

StatsRow measure(const std::string& text, const std::string& entry, std::size_t steps, ChoicePolicy policy) {
  StatsRow row;
  row.steps = steps;
  auto t0 = Clock::now();
  ast::Program p = load(text, entry);
  row.parse_ms = ms_since(t0);

  t0 = Clock::now();
  Machine m(p, policy);
  while (m.clock() < steps && m.status() == Status::Running) m.step();
  row.simulate_ms = ms_since(t0);

  row.clock = m.clock();
  row.status = m.status();
  row.nodes = m.store().scope_count();
  row.registers = m.store().register_count();
  row.dims = m.store().dims();
  return row;
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  Trace trace;
  try {
    ast::Program p = load(read_file(opts.program_path), opts.entry);
    trace = run(p, opts.steps, opts.policy);
  } catch (const Error& e) {
    err << opts.program_path << ":" << e.what() << "\n";
    return 1;
  }
  // Rendering happens after the run so the simulation is not slowed by output.
  std::string buffer;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    bool dump = dump_due(trace[i].clock, opts.dump_every, i + 1 == trace.size());
    if (opts.format == Format::Jsonl)
      buffer += render_json(trace[i], dump) + "\n";
    else
      buffer += render_text(trace[i], dump);
  }
  out << buffer;
  return trace.back().status == Status::Failed ? 2 : 0;
}

int cmd_check(const std::string& program_path, std::ostream& out, std::ostream& err) {
  try {
    ast::Program p = parse_program(read_file(program_path));
    out << program_path << ": ok, " << p.decls.size() << " declaration" << (p.decls.size() == 1 ? "" : "s") << "\n";
    for (const auto& d : p.decls) out << "  " << d.name << "/" << d.formals.size() << "\n";
    return 0;
  } catch (const Error& e) {
    err << program_path << ":" << e.what() << "\n";
    return 1;
  }
}

int cmd_stats(const StatsOptions& opts, std::ostream& out, std::ostream& err) {
  std::vector<StatsRow> rows;
  try {
    std::string text = read_file(opts.program_path);
    for (auto n : opts.steps) rows.push_back(measure(text, opts.entry, n, opts.policy));
  } catch (const Error& e) {
    err << opts.program_path << ":" << e.what() << "\n";
    return 1;
  }
  auto line = [&](const std::string& label, auto get) {
    out << std::left << std::setw(24) << label << std::right;
    for (const auto& r : rows) out << std::setw(12) << get(r);
    out << "\n";
  };
  auto fixed = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << v;
    return s.str();
  };
  line("", [](const StatsRow& r) { return std::to_string(r.steps) + " steps"; });
  line("instants run", [](const StatsRow& r) { return r.clock; });
  line("status", [](const StatsRow& r) { return std::string(to_string(r.status)); });
  line("symbol table (nodes)", [](const StatsRow& r) { return r.nodes; });
  line("global memory (regs)", [](const StatsRow& r) { return r.registers; });
  line("linear (dimensions)", [](const StatsRow& r) { return r.dims; });
  line("parse (ms)", [&](const StatsRow& r) { return fixed(r.parse_ms); });
  line("simulate (ms)", [&](const StatsRow& r) { return fixed(r.simulate_ms); });
  for (const auto& r : rows)
    if (r.status == Status::Failed) return 2;
  return 0;
}

namespace {

const std::map<std::string, ChoicePolicy::Kind> kPolicies{
    {"first", ChoicePolicy::Kind::First}, {"last", ChoicePolicy::Kind::Last}, {"random", ChoicePolicy::Kind::Random}};

// CLI11 option group for --policy/--seed shared by run and stats.
struct PolicyFlags {
  ChoicePolicy::Kind kind = ChoicePolicy::Kind::First;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--policy", kind, "branch selection among enabled guards")
        ->transform(CLI::CheckedTransformer(kPolicies, CLI::ignore_case));
    seed_opt = app->add_option("--seed", seed, "seed for --policy random");
  }

  ChoicePolicy resolve() const {
    bool random = kind == ChoicePolicy::Kind::Random;
    if (random && seed_opt->count() == 0) throw CLI::ValidationError("--seed", "required with --policy random");
    if (!random && seed_opt->count() > 0) throw CLI::ValidationError("--seed", "only valid with --policy random");
    return {kind, seed};
  }
};

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"tccp simulator"};
  app.require_subcommand(1);

  RunOptions run_opts;
  PolicyFlags run_policy;
  auto* run_cmd = app.add_subcommand("run", "simulate a program and print its trace");
  run_cmd->add_option("--program", run_opts.program_path, "program file")->required();
  run_cmd->add_option("--entry", run_opts.entry, "entry agent, e.g. \"p(X) || tell(X = 1)\"");
  run_cmd->add_option("--steps", run_opts.steps, "number of time instants");
  run_policy.attach(run_cmd);
  run_cmd->add_option("--format", run_opts.format, "text or jsonl")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"text", Format::Text}, {"jsonl", Format::Jsonl}},
                                          CLI::ignore_case));
  run_cmd->add_option("--dump-every", run_opts.dump_every, "dump the store every M instants (0 = final only)");

  std::string check_path;
  auto* check_cmd = app.add_subcommand("check", "parse and scope-check a program");
  check_cmd->add_option("--program", check_path, "program file")->required();

  StatsOptions stats_opts;
  PolicyFlags stats_policy;
  auto* stats_cmd = app.add_subcommand("stats", "store sizes and timings after N instants");
  stats_cmd->add_option("--program", stats_opts.program_path, "program file")->required();
  stats_cmd->add_option("--entry", stats_opts.entry, "entry agent");
  stats_cmd->add_option("--steps", stats_opts.steps, "one or more step counts")->expected(1, -1);
  stats_policy.attach(stats_cmd);

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
    if (*run_cmd) {
      run_opts.policy = run_policy.resolve();
      return cmd_run(run_opts, out, err);
    }
    if (*check_cmd) return cmd_check(check_path, out, err);
    stats_opts.policy = stats_policy.resolve();
    return cmd_stats(stats_opts, out, err);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.get_name() << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tccp::cli
