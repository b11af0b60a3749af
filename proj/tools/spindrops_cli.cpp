#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spindrops/drops.hpp"
#include "spindrops/dynamics.hpp"
#include "spindrops/error.hpp"
#include "spindrops/lisa.hpp"
#include "spindrops/opexpr.hpp"
#include "spindrops/service.hpp"
#include "spindrops/symgroup.hpp"
#include "spindrops/tolerance.hpp"

using namespace spindrops;
namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitScope = 3;
constexpr int kExitMismatch = 4;

struct Mismatch : Error {
    using Error::Error;
};

struct UsageError : Error {
    using Error::Error;
};

nlohmann::json read_json(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json(const std::string &path, const nlohmann::json &j) {
    if (path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw UsageError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

lisa::LisaBasis basis_from_flags(const std::string &basis_path, const std::string &spins, const std::string &method) {
    if (!basis_path.empty())
        return lisa::basis_from_json(read_json(basis_path));
    if (spins.empty())
        throw UsageError("give --basis FILE or --spins LIST");
    return lisa::build_basis(SpinSystem::parse(spins), lisa::method_from_name(method));
}

/// Operator JSON file or opexpr text.
Operator operator_from_flag(const std::string &op, const SpinSystem &system) {
    if (fs::exists(op) && fs::is_regular_file(op)) {
        Operator a = operator_from_json(read_json(op));
        if (a.system().local_dims() != system.local_dims())
            throw DimensionError("operator file dimensions do not match the basis system " + system.to_string());
        return Operator(system, a.matrix());
    }
    return opexpr::parse(op, system);
}

// expected section VII results, g = 1..6
struct KnownDiagnostics {
    std::vector<int> corrupted;
    int kernel_dim;
    std::vector<std::pair<int, int>> pairs;
};

KnownDiagnostics known_diagnostics(int g) {
    if (g <= 4)
        return {{}, 0, {}};
    if (g == 5)
        return {{16}, 1, {{6, 10}, {17, 21}}};
    return {{15, 21, 24, 25},
            26,
            {{7, 14}, {8, 15}, {9, 15}, {26, 30}, {31, 41}, {31, 42}, {32, 43}, {32, 44}, {33, 45},
             {34, 46}, {35, 45}, {37, 46}, {47, 51}}};
}

int cmd_basis(const std::string &spins, const std::string &method, const std::string &out) {
    auto b = lisa::build_basis(SpinSystem::parse(spins), lisa::method_from_name(method));
    std::cout << lisa::basis_inventory(b);
    if (!out.empty())
        write_json(out, lisa::basis_to_json(b));
    return 0;
}

int cmd_decompose(const std::string &basis_path, const std::string &spins, const std::string &method,
                  const std::string &op, const std::string &scaling, const std::string &out) {
    auto b = basis_from_flags(basis_path, spins, method);
    Operator a = operator_from_flag(op, b.system);
    auto sc = drops::scaling_from_name(scaling);
    auto d = drops::decompose(a, b, sc);
    std::cout << drops::weight_table(d);
    if (!out.empty())
        write_json(out, drops::droplets_document(d, b.system, sc));
    return 0;
}

int cmd_reconstruct(const std::string &basis_path, const std::string &spins, const std::string &method,
                    const std::string &droplets, const std::string &out, const std::string &check, double tol,
                    bool strict) {
    auto b = basis_from_flags(basis_path, spins, method);
    drops::Scaling sc = drops::Scaling::raw;
    auto d = drops::droplets_from_document(read_json(droplets), &sc);
    Operator a = drops::reconstruct(d, b, sc);
    if (!out.empty())
        write_json(out, operator_to_json(a));
    if (!check.empty()) {
        Operator ref = operator_from_flag(check, b.system);
        double err = max_abs_diff(a, ref);
        bool ok = err < tol;
        std::cout << "max entry error " << std::setprecision(3) << err << (ok ? " (ok)" : " (exceeds tolerance)")
                  << "\n";
        if (!ok && strict)
            throw Mismatch("reconstruction error above tolerance");
    }
    return 0;
}

int cmd_simulate(const std::string &sequence, const std::string &scenario, const std::string &out, bool droplets,
                 const std::string &scaling, double tol, bool strict) {
    if (sequence.empty() == scenario.empty())
        throw UsageError("give exactly one of --sequence FILE or --scenario NAME");
    auto doc = sequence.empty() ? dynamics::scenario(scenario) : dynamics::load_sequence(sequence);
    auto tr = doc.run();
    std::optional<Operator> observable;
    if (doc.observable)
        observable = opexpr::parse(*doc.observable, doc.system);
    std::optional<lisa::LisaBasis> basis;
    auto sc = drops::scaling_from_name(scaling);
    if (droplets)
        basis = lisa::build_basis(doc.system);
    if (!out.empty())
        fs::create_directories(out);

    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
        const auto &rho = tr.states[k];
        nlohmann::json s = {{"index", k},
                            {"time", tr.times[k]},
                            {"step", tr.steps[k]},
                            {"trace", {{"re", rho.trace().real()}, {"im", rho.trace().imag()}}},
                            {"hs_norm", hs_norm(rho)}};
        if (observable) {
            cplx e = dynamics::expectation(rho, *observable);
            s["expectation"] = {{"re", e.real()}, {"im", e.imag()}};
        }
        if (!out.empty()) {
            std::ostringstream name;
            name << "state_" << std::setw(3) << std::setfill('0') << k << ".json";
            write_json((fs::path(out) / name.str()).string(), operator_to_json(rho));
            s["state_file"] = name.str();
            if (basis) {
                std::ostringstream dn;
                dn << "droplets_" << std::setw(3) << std::setfill('0') << k << ".json";
                write_json((fs::path(out) / dn.str()).string(),
                           drops::droplets_document(drops::decompose(rho, *basis, sc), doc.system, sc));
                s["droplet_file"] = dn.str();
            }
        }
        steps.push_back(s);
    }
    nlohmann::json result = {{"schema", "spindrops.trajectory/1"},
                             {"name", doc.name},
                             {"sequence", dynamics::sequence_to_json(doc)},
                             {"steps", steps}};
    std::cout << (doc.name.empty() ? std::string("sequence") : doc.name) << ": " << doc.sequence.events.size()
              << " events, total time " << std::setprecision(12) << tr.times.back() << " s\n";
    if (observable) {
        cplx e = dynamics::expectation(tr.states.back(), *observable);
        std::cout << "final <" << *doc.observable << "> = " << e.real() << (e.imag() >= 0 ? " + " : " - ")
                  << std::abs(e.imag()) << "i\n";
    }
    bool mismatch = false;
    if (doc.target) {
        Operator target = opexpr::parse(*doc.target, doc.system);
        const Operator &fin = tr.states.back();
        double fid = std::abs(hs_inner(target, fin)) / (hs_norm(target) * hs_norm(fin));
        result["target"] = *doc.target;
        result["fidelity"] = fid;
        std::cout << "fidelity with " << *doc.target << ": " << std::setprecision(15) << fid << "\n";
        mismatch = std::abs(fid - 1.0) > tol;
    }
    if (!out.empty())
        write_json((fs::path(out) / "trajectory.json").string(), result);
    if (mismatch && strict)
        throw Mismatch("final state misses the target beyond tolerance");
    return 0;
}

int cmd_diagnose(int g, const std::string &json_out, bool strict) {
    if (g < 1 || g > 6)
        throw ScopeError("diagnostics are available for g = 1..6, got " + std::to_string(g));
    auto d = symgroup::diagnose(g);
    std::cout << symgroup::diagnostics_to_text(d);
    if (!json_out.empty())
        write_json(json_out, symgroup::diagnostics_to_json(d));
    if (strict) {
        auto k = known_diagnostics(g);
        if (d.corrupted != k.corrupted || d.kernel_dim != k.kernel_dim || d.pairs != k.pairs)
            throw Mismatch("diagnostics differ from the reference values");
        std::cout << "matches reference values\n";
    }
    return 0;
}

int cmd_render(const std::string &droplets, const std::string &grid, const std::string &out, bool include_zero) {
    auto [nt, np] = service::parse_grid(grid);
    auto d = drops::droplets_from_document(read_json(droplets));
    nlohmann::json meshes = nlohmann::json::array();
    for (const auto &f : d)
        if (include_zero || !f.zero)
            meshes.push_back(drops::mesh_to_json(drops::sample_droplet(f, nt, np)));
    std::cout << meshes.size() << " meshes on a " << nt << "x" << np << " grid\n";
    write_json(out.empty() ? "-" : out, {{"schema", "spindrops.meshes/1"}, {"meshes", meshes}});
    return 0;
}

std::string env_or(const char *name, const std::string &def) {
    const char *v = std::getenv(name);
    return v ? std::string(v) : def;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"spindrops: LISA tensor bases, droplet decompositions and spin dynamics"};
    app.set_version_flag("--version", SPINDROPS_VERSION);
    app.require_subcommand(1);

    std::string spins, method = "auto", out, basis_path, op, scaling = "raw", droplets, check, sequence, scenario,
                       grid = "64x128", json_out;
    double tol = tol::basis, sim_tol = tol::simulation;
    bool strict = false, with_droplets = false, include_zero = false;
    int g = 0;

    auto *basis = app.add_subcommand("basis", "build a LISA basis and print its droplet inventory");
    basis->add_option("--spins", spins, "comma separated spin numbers, e.g. 1/2,1/2,1")->required();
    basis->add_option("--method", method, "auto, cfp or projection")->check(CLI::IsMember({"auto", "cfp", "projection"}));
    basis->add_option("--out", out, "write the basis JSON here");

    auto *dec = app.add_subcommand("decompose", "expand an operator into droplet functions");
    dec->add_option("--basis", basis_path, "basis JSON file");
    dec->add_option("--spins", spins, "build the basis for these spins instead");
    dec->add_option("--method", method, "basis method when building")->check(CLI::IsMember({"auto", "cfp", "projection"}));
    dec->add_option("--op", op, "operator expression or operator JSON file")->required();
    dec->add_option("--scaling", scaling, "raw or density")->check(CLI::IsMember({"raw", "density"}));
    dec->add_option("--out", out, "write the droplet JSON here");

    auto *rec = app.add_subcommand("reconstruct", "rebuild an operator from droplet functions");
    rec->add_option("--basis", basis_path, "basis JSON file");
    rec->add_option("--spins", spins, "build the basis for these spins instead");
    rec->add_option("--method", method, "basis method when building")->check(CLI::IsMember({"auto", "cfp", "projection"}));
    rec->add_option("--droplets", droplets, "droplet JSON file")->required();
    rec->add_option("--out", out, "write the operator JSON here");
    rec->add_option("--check", check, "compare with this operator (expression or JSON file)");
    rec->add_option("--tol", tol, "tolerance for --check");
    rec->add_flag("--strict", strict, "exit with code 4 when --check fails");

    auto *sim = app.add_subcommand("simulate", "run a pulse sequence");
    sim->add_option("--sequence", sequence, "sequence file (YAML or JSON)");
    sim->add_option("--scenario", scenario, "built-in scenario name");
    sim->add_option("--out", out, "output directory for states and trajectory.json");
    sim->add_flag("--droplets", with_droplets, "also write droplet files per stage");
    sim->add_option("--scaling", scaling, "droplet scaling")->check(CLI::IsMember({"raw", "density"}));
    sim->add_option("--tol", sim_tol, "target fidelity tolerance");
    sim->add_flag("--strict", strict, "exit with code 4 when the target is missed");

    auto *diag = app.add_subcommand("diagnose", "symmetric-group projector diagnostics");
    diag->add_option("--g", g, "number of spins, 1..6")->required();
    diag->add_option("--json", json_out, "write the JSON report here");
    diag->add_flag("--strict", strict, "exit with code 4 on a mismatch with the reference values");

    auto *ren = app.add_subcommand("render", "sample droplet functions on a sphere grid");
    ren->add_option("--droplets", droplets, "droplet JSON file")->required();
    ren->add_option("--grid", grid, "n_theta x n_phi, e.g. 64x128");
    ren->add_option("--out", out, "mesh JSON output (default stdout)");
    ren->add_flag("--include-zero", include_zero, "also render zero droplets");

    service::ServeOptions so;
    so.host = env_or("SPINDROPS_HOST", so.host);
    so.port = std::atoi(env_or("SPINDROPS_PORT", std::to_string(so.port)).c_str());
    auto *srv = app.add_subcommand("serve", "run the HTTP session service");
    srv->add_option("--host", so.host, "bind address (env SPINDROPS_HOST)");
    srv->add_option("--port", so.port, "port (env SPINDROPS_PORT)");
    srv->add_option("--cors-origin", so.cors_origin, "Access-Control-Allow-Origin value");
    srv->add_option("--state", so.state_file, "session persistence file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*basis)
            return cmd_basis(spins, method, out);
        if (*dec)
            return cmd_decompose(basis_path, spins, method, op, scaling, out);
        if (*rec)
            return cmd_reconstruct(basis_path, spins, method, droplets, out, check, tol, strict);
        if (*sim)
            return cmd_simulate(sequence, scenario, out, with_droplets, scaling, sim_tol, strict);
        if (*diag)
            return cmd_diagnose(g, json_out, strict);
        if (*ren)
            return cmd_render(droplets, grid, out, include_zero);
        if (*srv)
            return service::serve(so);
    } catch (const Mismatch &e) {
        std::cerr << "mismatch: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const ScopeError &e) {
        std::cerr << "out of scope: " << e.what() << "\n";
        return kExitScope;
    } catch (const DimensionError &e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return kExitScope;
    } catch (const ParseError &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SchemaError &e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError &e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
