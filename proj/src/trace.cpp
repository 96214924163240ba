#include "tccp/trace.hpp"

#include <sstream>

#include <json.hpp>

#include "tccp/syntax.hpp"

namespace tccp {

using json = nlohmann::ordered_json;

bool dump_due(std::size_t clock, std::size_t every, bool last) {
  if (last) return true;
  return every > 0 && clock % every == 0;
}

std::string render_text(const TraceStep& step, bool with_store) {
  const Store& s = step.store;
  std::ostringstream out;
  out << "instant " << step.clock << " " << to_string(step.status) << " nodes=" << s.scope_count()
      << " registers=" << s.register_count() << " dims=" << s.dims() << "\n";
  for (const auto& [name, reg] : s.scope(Store::kRoot).symbols) out << "  " << name << " = " << s.render(reg) << "\n";
  for (const auto& t : step.active) out << "  | N" << t.scope << ": " << pretty(*t.agent) << "\n";
  if (with_store) {
    std::istringstream dump(s.dump());
    for (std::string line; std::getline(dump, line);) out << "    " << line << "\n";
  }
  return out.str();
}

namespace {

json cell_json(Reg i, const MemCell& c) {
  json j{{"reg", i}, {"kind", to_string(c.kind)}};
  switch (c.kind) {
    case CellKind::Constant:
      if (const auto* a = std::get_if<AtomValue>(&c.value))
        j["atom"] = a->name;
      else
        j["number"] = to_string(std::get<Rational>(c.value));
      break;
    case CellKind::DiscreteVar: j["dim"] = c.index; break;
    case CellKind::Reference: j["target"] = c.index; break;
    case CellKind::Functor: j["head"] = c.index; break;
    default: break;
  }
  return j;
}

json store_json(const Store& s) {
  json scopes = json::array();
  for (NodeId id = 0; id < s.scope_count(); ++id) {
    const ScopeNode& n = s.scope(id);
    json syms = json::object();
    for (const auto& [name, reg] : n.symbols) syms[name] = reg;
    scopes.push_back({{"id", n.id},
                      {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                      {"kind", to_string(n.kind)},
                      {"label", n.label},
                      {"symbols", syms}});
  }
  json memory = json::array();
  for (Reg r = 0; r < s.register_count(); ++r) memory.push_back(cell_json(r, s.cell(r)));
  json cons = json::array();
  for (const auto& c : s.lin().constraints()) cons.push_back(c.str());
  return {{"scopes", scopes},
          {"memory", memory},
          {"linear", {{"dims", s.dims()}, {"constraints", cons}, {"empty", s.lin().is_empty()}}},
          {"stream_consistent", !s.stream_inconsistent()}};
}

}  // namespace

std::string render_json(const TraceStep& step, bool with_store) {
  const Store& s = step.store;
  json roots = json::object();
  for (const auto& [name, reg] : s.scope(Store::kRoot).symbols) roots[name] = s.render(reg);
  json active = json::array();
  for (const auto& t : step.active) active.push_back({{"scope", t.scope}, {"agent", pretty(*t.agent)}});
  json j{{"clock", step.clock},
         {"status", to_string(step.status)},
         {"consistent", s.is_consistent()},
         {"nodes", s.scope_count()},
         {"registers", s.register_count()},
         {"dims", s.dims()},
         {"roots", roots},
         {"active", active}};
  j["store"] = with_store ? store_json(s) : json(nullptr);
  return j.dump();
}

}  // namespace tccp
