#include "soundni/driver.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>

namespace py = pybind11;
using namespace soundni;

namespace {

py::int_ to_py(const Value& v) {
    std::string s = to_string(v);
    return py::reinterpret_steal<py::int_>(PyLong_FromString(s.c_str(), nullptr, 10));
}

AnalysisConfig make_config(const std::string& engine, const std::string& single_engine, const std::string& domain,
                           unsigned bound, std::size_t path_cap, bool all_paths, const std::optional<std::string>& solver,
                           unsigned timeout_ms) {
    AnalysisConfig cfg;
    cfg.engine = parse_engine(engine);
    cfg.single_engine = parse_single_engine(single_engine);
    cfg.domain = parse_domain(domain);
    cfg.bound = bound;
    cfg.path_cap = path_cap;
    cfg.all_paths = all_paths;
    if (solver) {
        cfg.solver.command = *solver;
    }
    cfg.solver.timeout_ms = timeout_ms;
    cfg.validate();
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Noninterference checking by relational symbolic execution";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def(
        "check",
        [](const std::string& source, const std::string& engine, const std::string& single_engine,
           const std::string& domain, unsigned bound, std::size_t path_cap, bool all_paths,
           const std::optional<std::string>& solver, unsigned timeout_ms, const std::string& name) {
            AnalysisConfig cfg =
                make_config(engine, single_engine, domain, bound, path_cap, all_paths, solver, timeout_ms);
            Program p = parse_program(source);
            Verdict v;
            {
                py::gil_scoped_release release;
                v = verify_ni(p, cfg);
            }
            return verdict_json(name, cfg, v);
        },
        py::arg("source"), py::arg("engine") = "redsoundrse", py::arg("single_engine") = "soundse",
        py::arg("domain") = "intervals", py::arg("bound") = 3, py::arg("path_cap") = 4096,
        py::arg("all_paths") = false, py::arg("solver") = py::none(), py::arg("timeout_ms") = 5000,
        py::arg("name") = "<string>", "Verdict for one program, as a JSON document.");

    m.def(
        "corpus",
        [](const std::string& dir, unsigned bound, const std::optional<std::string>& solver) {
            AnalysisConfig base;
            base.bound = bound;
            if (solver) {
                base.solver.command = *solver;
            }
            auto s = make_solver(base.solver);
            CorpusReport r;
            {
                py::gil_scoped_release release;
                r = run_corpus(dir, default_matrix(base), *s);
            }
            return report_json(r);
        },
        py::arg("dir"), py::arg("bound") = 3, py::arg("solver") = py::none(),
        "Default matrix over a corpus directory, as a JSON document.");

    m.def(
        "parse",
        [](const std::string& source) {
            Program p = parse_program(source);
            py::dict out;
            out["low"] = std::vector<std::string>(p.low_vars.begin(), p.low_vars.end());
            out["vars"] = std::vector<std::string>(p.all_vars.begin(), p.all_vars.end());
            out["body"] = to_string(*p.body);
            return out;
        },
        py::arg("source"), "Declarations and the normalized program text.");

    m.def(
        "run",
        [](const std::string& source, const std::map<std::string, py::int_>& store, std::size_t fuel) -> py::object {
            Program p = parse_program(source);
            Store mu;
            for (const auto& x : p.all_vars) {
                auto it = store.find(x);
                mu[x] = it == store.end() ? Value(0) : parse_value(py::str(it->second).cast<std::string>());
            }
            Outcome o = run(p, mu, fuel);
            if (!o.terminated()) {
                return py::none();
            }
            py::dict out;
            for (const auto& [x, v] : *o.final_store) {
                out[py::str(x)] = to_py(v);
            }
            return out;
        },
        py::arg("source"), py::arg("store") = std::map<std::string, py::int_>{}, py::arg("fuel") = 1000000,
        "Final store of a concrete run, or None when fuel runs out. Missing variables start at 0.");
}
