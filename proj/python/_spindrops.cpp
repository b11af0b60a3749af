#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spindrops/drops.hpp"
#include "spindrops/dynamics.hpp"
#include "spindrops/error.hpp"
#include "spindrops/lisa.hpp"
#include "spindrops/opexpr.hpp"
#include "spindrops/symgroup.hpp"

namespace py = pybind11;
using namespace spindrops;

namespace {

py::object to_python(const nlohmann::json &j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object &o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Operator as_operator(const Matrix &m, const SpinSystem &system) {
    if (m.rows() != static_cast<Eigen::Index>(system.dim()) || m.cols() != m.rows())
        throw DimensionError("matrix shape does not match the system dimension " + std::to_string(system.dim()));
    return Operator(system, m);
}

py::list droplets_to_list(const std::vector<drops::DropletFunction> &d) {
    py::list out;
    for (const auto &f : d) {
        py::dict coeffs;
        for (const auto &c : f.coeffs)
            coeffs[py::make_tuple(c.j, c.m)] = c.value;
        py::dict item;
        item["label"] = f.label.to_string();
        item["label_json"] = to_python(f.label.to_json());
        item["coeffs"] = coeffs;
        item["weight"] = f.weight();
        item["zero"] = f.zero;
        out.append(item);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_spindrops, m) {
    m.doc() = "LISA tensor bases, DROPS droplet decompositions and spin dynamics";
    m.attr("__version__") = SPINDROPS_VERSION;

    auto base = py::register_exception<Error>(m, "SpindropsError", PyExc_RuntimeError);
    py::register_exception<ScopeError>(m, "ScopeError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    py::class_<lisa::LisaBasis, std::shared_ptr<lisa::LisaBasis>>(m, "Basis")
        .def_property_readonly("spins", [](const lisa::LisaBasis &b) { return b.system.to_string(); })
        .def_property_readonly("dim", [](const lisa::LisaBasis &b) { return b.system.dim(); })
        .def_property_readonly("method", [](const lisa::LisaBasis &b) { return b.method; })
        .def("__len__", &lisa::LisaBasis::size)
        .def_property_readonly("droplet_count", [](const lisa::LisaBasis &b) { return b.groups.size(); })
        .def("droplet_labels",
             [](const lisa::LisaBasis &b) {
                 std::vector<std::string> out;
                 for (const auto &g : b.groups)
                     out.push_back(g.label.to_string());
                 return out;
             })
        .def("tensor_labels",
             [](const lisa::LisaBasis &b) {
                 std::vector<std::string> out;
                 for (const auto &e : b.entries)
                     out.push_back(e.label.to_string());
                 return out;
             })
        .def("matrix", [](const lisa::LisaBasis &b, std::size_t i) { return b.entries.at(i).matrix; })
        .def("orthonormality_error", &lisa::LisaBasis::orthonormality_error)
        .def("hash", &lisa::LisaBasis::hash)
        .def("inventory", [](const lisa::LisaBasis &b) { return lisa::basis_inventory(b); })
        .def("to_json", [](const lisa::LisaBasis &b) { return lisa::basis_to_json(b).dump(); })
        .def("__repr__", [](const lisa::LisaBasis &b) {
            return "<Basis " + b.system.to_string() + ": " + std::to_string(b.groups.size()) + " droplets, " +
                   std::to_string(b.size()) + " operators>";
        });

    m.def(
        "build_basis",
        [](const std::string &spins, const std::string &method) {
            return std::make_shared<lisa::LisaBasis>(
                lisa::build_basis(SpinSystem::parse(spins), lisa::method_from_name(method)));
        },
        py::arg("spins"), py::arg("method") = "auto", "Build the LISA basis of a spin system such as '1/2,1'.");
    m.def(
        "basis_from_json",
        [](const std::string &text) {
            return std::make_shared<lisa::LisaBasis>(lisa::basis_from_json(nlohmann::json::parse(text)));
        },
        py::arg("text"));

    m.def(
        "parse_operator",
        [](const std::string &text, const std::string &spins) {
            return opexpr::parse(text, SpinSystem::parse(spins)).matrix();
        },
        py::arg("text"), py::arg("spins"), "Dense matrix of a product-operator expression.");
    m.def(
        "canonical_expression", [](const std::string &text) { return opexpr::to_string(opexpr::parse_expr(text)); },
        py::arg("text"));

    m.def(
        "decompose",
        [](const Matrix &a, const lisa::LisaBasis &b, const std::string &scaling) {
            return droplets_to_list(drops::decompose(as_operator(a, b.system), b, drops::scaling_from_name(scaling)));
        },
        py::arg("matrix"), py::arg("basis"), py::arg("scaling") = "raw");
    m.def(
        "decompose_json",
        [](const Matrix &a, const lisa::LisaBasis &b, const std::string &scaling) {
            auto sc = drops::scaling_from_name(scaling);
            return drops::droplets_document(drops::decompose(as_operator(a, b.system), b, sc), b.system, sc).dump();
        },
        py::arg("matrix"), py::arg("basis"), py::arg("scaling") = "raw");
    m.def(
        "reconstruct_json",
        [](const std::string &doc, const lisa::LisaBasis &b) {
            drops::Scaling sc = drops::Scaling::raw;
            auto d = drops::droplets_from_document(nlohmann::json::parse(doc), &sc);
            return drops::reconstruct(d, b, sc).matrix();
        },
        py::arg("document"), py::arg("basis"));
    m.def(
        "coherence_order_spectrum",
        [](const Matrix &a, const lisa::LisaBasis &b) {
            return drops::coherence_order_spectrum(as_operator(a, b.system), b);
        },
        py::arg("matrix"), py::arg("basis"));
    m.def(
        "sample_droplet",
        [](const std::string &droplet_json, int n_theta, int n_phi) {
            auto f = drops::droplet_from_json(nlohmann::json::parse(droplet_json));
            return to_python(drops::mesh_to_json(drops::sample_droplet(f, n_theta, n_phi)));
        },
        py::arg("droplet_json"), py::arg("n_theta") = 64, py::arg("n_phi") = 128);

    m.def(
        "diagnose", [](int g) { return to_python(symgroup::diagnostics_to_json(symgroup::diagnose(g))); },
        py::arg("g"));

    m.def("scenario_names", &dynamics::scenario_names);
    m.def(
        "scenario", [](const std::string &name) { return to_python(dynamics::sequence_to_json(dynamics::scenario(name))); },
        py::arg("name"));
    m.def(
        "run_sequence",
        [](const py::object &doc) {
            dynamics::SequenceDocument d;
            if (py::isinstance<py::str>(doc))
                d = dynamics::sequence_from_text(doc.cast<std::string>());
            else
                d = dynamics::sequence_from_json(from_python(doc));
            auto tr = d.run();
            py::dict out;
            out["name"] = d.name;
            out["times"] = tr.times;
            out["steps"] = tr.steps;
            std::vector<Matrix> states;
            for (const auto &s : tr.states)
                states.push_back(s.matrix());
            out["states"] = states;
            return out;
        },
        py::arg("sequence"), "Run a sequence given as a dict, YAML or JSON text.");
    m.def(
        "run_scenario",
        [](const std::string &name) {
            auto d = dynamics::scenario(name);
            auto tr = d.run();
            py::dict out;
            out["name"] = d.name;
            out["spins"] = d.system.to_string();
            out["times"] = tr.times;
            out["steps"] = tr.steps;
            std::vector<Matrix> states;
            for (const auto &s : tr.states)
                states.push_back(s.matrix());
            out["states"] = states;
            if (d.target)
                out["target"] = *d.target;
            if (d.observable)
                out["observable"] = *d.observable;
            return out;
        },
        py::arg("name"));
    m.def(
        "expectation",
        [](const Matrix &rho, const Matrix &o) {
            if (rho.rows() != o.rows() || rho.cols() != o.cols())
                throw DimensionError("expectation needs matrices of equal shape");
            return cplx((rho.transpose().cwiseProduct(o)).sum());
        },
        py::arg("rho"), py::arg("observable"));
}
