// Python bindings: parsing, checking, running and measuring tccp programs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "tccp/cli.hpp"
#include "tccp/interpreter.hpp"
#include "tccp/syntax.hpp"
#include "tccp/trace.hpp"

namespace py = pybind11;
using namespace tccp;

namespace {

ChoicePolicy make_policy(const std::string& name, std::optional<std::uint64_t> seed) {
  if (name == "random") {
    if (!seed) throw py::value_error("policy 'random' needs a seed");
    return ChoicePolicy::random(*seed);
  }
  if (seed) throw py::value_error("a seed is only accepted with policy 'random'");
  if (name == "first") return ChoicePolicy::first();
  if (name == "last") return ChoicePolicy::last();
  throw py::value_error("unknown policy '" + name + "' (expected first, last or random)");
}

/// A program together with a machine running it. The machine keeps a
/// reference to the program, so both live here.
class Simulation {
 public:
  Simulation(const std::string& text, const std::string& entry, const std::string& policy,
             std::optional<std::uint64_t> seed)
      : program_(std::make_unique<ast::Program>(cli::load(text, entry))),
        machine_(std::make_unique<Machine>(*program_, make_policy(policy, seed))) {}

  void step(std::size_t n) {
    for (std::size_t i = 0; i < n && machine_->status() == Status::Running; ++i) machine_->step();
  }
  std::size_t clock() const { return machine_->clock(); }
  std::string status() const { return to_string(machine_->status()); }
  bool entails(const std::string& constraint) const {
    return machine_->store().entails(Store::kRoot, parse_constraint(constraint));
  }
  std::string value(const std::string& var) const {
    const Store& s = machine_->store();
    return s.render(s.lookup(Store::kRoot, var));
  }
  std::string dump() const { return machine_->store().dump(); }
  std::string json(bool with_store) const { return render_json(machine_->snapshot(), with_store); }
  std::string text(bool with_store) const { return render_text(machine_->snapshot(), with_store); }
  std::size_t nodes() const { return machine_->store().scope_count(); }
  std::size_t registers() const { return machine_->store().register_count(); }
  std::size_t dims() const { return machine_->store().dims(); }

 private:
  std::unique_ptr<ast::Program> program_;
  std::unique_ptr<Machine> machine_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "tccp simulator core";

  py::register_exception<Error>(m, "TccpError", PyExc_ValueError);

  m.def(
      "check", [](const std::string& text) { check_program(parse_program(text)); }, py::arg("text"),
      "Parse and scope-check a program; raises TccpError on the first problem.");

  m.def(
      "pretty", [](const std::string& text) { return pretty(parse_program(text)); }, py::arg("text"),
      "Canonical rendering of a program.");

  m.def(
      "declarations",
      [](const std::string& text) {
        std::vector<std::pair<std::string, std::vector<std::string>>> out;
        for (const auto& d : parse_program(text).decls) out.emplace_back(d.name, d.formals);
        return out;
      },
      py::arg("text"), "(name, formals) of every declaration in source order.");

  m.def(
      "run_jsonl",
      [](const std::string& text, const std::string& entry, std::size_t steps, const std::string& policy,
         std::optional<std::uint64_t> seed, std::size_t dump_every) {
        auto program = cli::load(text, entry);
        Trace t;
        {
          py::gil_scoped_release release;
          t = run(program, steps, make_policy(policy, seed));
        }
        std::vector<std::string> out;
        for (std::size_t i = 0; i < t.size(); ++i)
          out.push_back(render_json(t[i], dump_due(t[i].clock, dump_every, i + 1 == t.size())));
        return out;
      },
      py::arg("text"), py::arg("entry") = "skip", py::arg("steps") = 30, py::arg("policy") = "first",
      py::arg("seed") = py::none(), py::arg("dump_every") = 0, "One JSON object per instant, as `tccp run --format jsonl`.");

  m.def(
      "stats",
      [](const std::string& text, const std::string& entry, std::size_t steps, const std::string& policy,
         std::optional<std::uint64_t> seed) {
        auto pol = make_policy(policy, seed);
        cli::StatsRow r;
        {
          py::gil_scoped_release release;
          r = cli::measure(text, entry, steps, pol);
        }
        py::dict d;
        d["steps"] = r.steps;
        d["clock"] = r.clock;
        d["status"] = to_string(r.status);
        d["nodes"] = r.nodes;
        d["registers"] = r.registers;
        d["dims"] = r.dims;
        d["parse_ms"] = r.parse_ms;
        d["simulate_ms"] = r.simulate_ms;
        return d;
      },
      py::arg("text"), py::arg("entry") = "skip", py::arg("steps") = 30, py::arg("policy") = "first",
      py::arg("seed") = py::none());

  py::class_<Simulation>(m, "Simulation")
      .def(py::init<const std::string&, const std::string&, const std::string&, std::optional<std::uint64_t>>(),
           py::arg("text"), py::arg("entry") = "skip", py::arg("policy") = "first", py::arg("seed") = py::none())
      .def("step", &Simulation::step, py::arg("n") = 1, "Advance up to n instants; stops once not running.")
      .def_property_readonly("clock", &Simulation::clock)
      .def_property_readonly("status", &Simulation::status)
      .def_property_readonly("nodes", &Simulation::nodes)
      .def_property_readonly("registers", &Simulation::registers)
      .def_property_readonly("dims", &Simulation::dims)
      .def("entails", &Simulation::entails, py::arg("constraint"), "Ask a constraint over the entry's variables.")
      .def("value", &Simulation::value, py::arg("var"))
      .def("dump", &Simulation::dump)
      .def("json", &Simulation::json, py::arg("with_store") = true)
      .def("text", &Simulation::text, py::arg("with_store") = false);
}
