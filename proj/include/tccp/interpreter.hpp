#pragma once

// Synchronous step engine. Every thread of the active set runs on its own
// snapshot of the store taken at the start of the instant; the snapshots are
// merged into the next store, and the continuations form the next active set.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tccp/ast.hpp"
#include "tccp/store.hpp"

namespace tccp {

struct Thread {
  ast::AgentPtr agent;
  NodeId scope = Store::kRoot;
};

enum class Status { Running, Quiescent, Failed };

const char* to_string(Status s);

struct ChoicePolicy {
  enum class Kind { First, Last, Random };
  Kind kind = Kind::First;
  std::uint64_t seed = 0;

  static ChoicePolicy first() { return {Kind::First, 0}; }
  static ChoicePolicy last() { return {Kind::Last, 0}; }
  static ChoicePolicy random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

/// Resolves among `n` enabled branches (n >= 1). Shared by the machine and
/// the reference interpreter so both make the same picks.
class BranchPicker {
 public:
  explicit BranchPicker(ChoicePolicy policy) : policy_(policy), rng_(policy.seed) {}
  std::size_t pick(std::size_t n);

 private:
  ChoicePolicy policy_;
  std::mt19937_64 rng_;
};

/// One element c_i of a trace.
struct TraceStep {
  std::size_t clock = 0;
  Status status = Status::Running;
  Store store;
  std::vector<Thread> active;
};

using Trace = std::vector<TraceStep>;

class Machine {
 public:
  /// The program must have an entry agent. Free variables of the entry become
  /// variables of the root scope, in order of first occurrence.
  Machine(const ast::Program& program, ChoicePolicy policy);

  /// One time instant. No-op unless the status is Running.
  void step();

  const Store& store() const { return store_; }
  const std::vector<Thread>& active() const { return active_; }
  std::size_t clock() const { return clock_; }
  Status status() const { return status_; }

  TraceStep snapshot() const { return {clock_, status_, store_, active_}; }

 private:
  void execute(const ast::AgentPtr& agent, NodeId scope, Store& local, std::vector<Thread>& next);
  Status classify() const;

  const ast::Program& program_;
  BranchPicker picker_;
  Store store_;
  std::vector<Thread> active_;
  std::size_t clock_ = 0;
  Status status_ = Status::Running;
};

/// c_0 ... c_n with n <= steps, stopping early once the run fails or becomes
/// quiescent.
Trace run(const ast::Program& program, std::size_t steps, ChoicePolicy policy);

}  // namespace tccp
