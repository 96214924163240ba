#pragma once

// Rendering of trace elements. The jsonl schema is documented in
// docs/trace.md.

#include <cstddef>
#include <string>

#include "tccp/interpreter.hpp"

namespace tccp {

/// Whether instant `clock` gets a full store dump: every `every`-th instant
/// when every > 0, and always the last instant of a trace.
bool dump_due(std::size_t clock, std::size_t every, bool last);

/// Header line, active agents, root variables and optionally the store dump.
std::string render_text(const TraceStep& step, bool with_store);

/// A single-line JSON object (no trailing newline).
std::string render_json(const TraceStep& step, bool with_store);

}  // namespace tccp
