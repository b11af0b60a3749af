#include "spindrops/drops.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "spindrops/angular.hpp"
#include "spindrops/error.hpp"
#include "spindrops/tolerance.hpp"

namespace spindrops::drops {

std::string scaling_name(Scaling s) { return s == Scaling::raw ? "raw" : "density"; }

Scaling scaling_from_name(const std::string &s) {
    if (s == "raw")
        return Scaling::raw;
    if (s == "density")
        return Scaling::density;
    throw Error("unknown scaling '" + s + "' (expected raw or density)");
}

double scaling_factor(const SpinSystem &system, Scaling s) {
    return s == Scaling::raw ? 1.0 : std::sqrt(static_cast<double>(system.dim()));
}

double DropletFunction::weight() const {
    double w = 0;
    for (const auto &c : coeffs)
        w += std::norm(c.value);
    return w;
}

cplx DropletFunction::coeff(int j, int m) const {
    for (const auto &c : coeffs)
        if (c.j == j && c.m == m)
            return c.value;
    return 0.0;
}

std::vector<DropletFunction> decompose(const Operator &a, const lisa::LisaBasis &basis, Scaling scaling) {
    if (a.system() != basis.system)
        throw DimensionError("operator system " + a.system().to_string() + " does not match basis system " +
                             basis.system.to_string());
    double s = scaling_factor(basis.system, scaling);
    std::vector<DropletFunction> out;
    out.reserve(basis.groups.size());
    for (const auto &g : basis.groups) {
        DropletFunction f;
        f.label = g.label;
        for (int idx : g.members) {
            const auto &e = basis.entries[static_cast<std::size_t>(idx)];
            cplx c = (e.matrix.conjugate().cwiseProduct(a.matrix())).sum() * s;
            f.coeffs.push_back({e.label.j, e.label.m, c});
        }
        std::sort(f.coeffs.begin(), f.coeffs.end(),
                  [](const Coefficient &x, const Coefficient &y) { return std::tie(x.j, x.m) < std::tie(y.j, y.m); });
        f.zero = f.weight() < tol::zero_weight * s * s;
        out.push_back(std::move(f));
    }
    return out;
}

Operator reconstruct(const std::vector<DropletFunction> &droplets, const lisa::LisaBasis &basis, Scaling scaling) {
    double s = scaling_factor(basis.system, scaling);
    auto dim = static_cast<Eigen::Index>(basis.system.dim());
    Matrix acc = Matrix::Zero(dim, dim);
    for (const auto &f : droplets) {
        int gi = basis.find_group(f.label);
        if (gi < 0)
            throw Error("unknown droplet label " + f.label.to_string());
        const auto &grp = basis.groups[static_cast<std::size_t>(gi)];
        for (const auto &c : f.coeffs) {
            int found = -1;
            for (int idx : grp.members) {
                const auto &l = basis.entries[static_cast<std::size_t>(idx)].label;
                if (l.j == c.j && l.m == c.m) {
                    found = idx;
                    break;
                }
            }
            if (found < 0)
                throw Error("droplet " + f.label.to_string() + " has no component j=" + std::to_string(c.j) +
                            " m=" + std::to_string(c.m));
            acc += basis.entries[static_cast<std::size_t>(found)].matrix * (c.value / s);
        }
    }
    return Operator(basis.system, std::move(acc));
}

double DropletMesh::theta(int i) const { return n_theta > 1 ? M_PI * i / (n_theta - 1) : 0.0; }
double DropletMesh::phi(int k) const { return 2.0 * M_PI * k / n_phi; }

cplx evaluate_droplet(const DropletFunction &f, double theta, double phi) {
    cplx v = 0;
    for (const auto &c : f.coeffs)
        if (c.value != cplx(0.0))
            v += c.value * angular::spherical_harmonic(c.j, c.m, theta, phi);
    return v;
}

DropletMesh sample_droplet(const DropletFunction &f, int n_theta, int n_phi) {
    if (n_theta < 2 || n_phi < 1)
        throw Error("mesh needs n_theta >= 2 and n_phi >= 1");
    DropletMesh mesh;
    mesh.label = f.label;
    mesh.n_theta = n_theta;
    mesh.n_phi = n_phi;
    mesh.r.reserve(static_cast<std::size_t>(n_theta * n_phi));
    mesh.eta.reserve(static_cast<std::size_t>(n_theta * n_phi));
    for (int i = 0; i < n_theta; ++i)
        for (int k = 0; k < n_phi; ++k) {
            cplx v = evaluate_droplet(f, mesh.theta(i), mesh.phi(k));
            double r = std::abs(v);
            double eta = std::arg(v);
            if (eta <= -M_PI + 1e-12)
                eta = M_PI;
            mesh.r.push_back(r);
            mesh.eta.push_back(eta);
            mesh.r_max = std::max(mesh.r_max, r);
        }
    return mesh;
}

std::map<int, double> coherence_order_spectrum(const Operator &a, const lisa::LisaBasis &basis) {
    std::map<int, double> out;
    for (const auto &f : decompose(a, basis, Scaling::raw))
        for (const auto &c : f.coeffs)
            out[c.m] += std::norm(c.value);
    return out;
}

nlohmann::json droplet_to_json(const DropletFunction &f) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto &c : f.coeffs)
        coeffs.push_back({{"j", c.j}, {"m", c.m}, {"re", c.value.real()}, {"im", c.value.imag()}});
    return {{"label", f.label.to_json()}, {"name", f.label.to_string()}, {"coeffs", coeffs}, {"zero", f.zero}};
}

DropletFunction droplet_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("label") || !j.contains("coeffs"))
        throw SchemaError("droplet JSON needs 'label' and 'coeffs'");
    DropletFunction f;
    f.label = lisa::DropletLabel::from_json(j.at("label"));
    for (const auto &c : j.at("coeffs")) {
        if (!c.contains("j") || !c.contains("m") || !c.contains("re") || !c.contains("im"))
            throw SchemaError("droplet coefficient needs j, m, re, im");
        Coefficient k;
        k.j = c.at("j").get<int>();
        k.m = c.at("m").get<int>();
        if (k.j < 0 || std::abs(k.m) > k.j)
            throw SchemaError("droplet coefficient has |m| > j");
        k.value = cplx(c.at("re").get<double>(), c.at("im").get<double>());
        f.coeffs.push_back(k);
    }
    f.zero = j.value("zero", false);
    return f;
}

nlohmann::json droplets_document(const std::vector<DropletFunction> &droplets, const SpinSystem &system,
                                 Scaling scaling) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto &f : droplets)
        list.push_back(droplet_to_json(f));
    std::vector<std::string> spins;
    for (auto j : system.spins())
        spins.push_back(j.to_string());
    return {{"schema", "spindrops.droplets/1"}, {"system", spins}, {"scaling", scaling_name(scaling)}, {"droplets", list}};
}

std::vector<DropletFunction> droplets_from_document(const nlohmann::json &doc, Scaling *scaling) {
    if (!doc.is_object() || doc.value("schema", "") != "spindrops.droplets/1")
        throw SchemaError("not a spindrops.droplets/1 document");
    if (scaling)
        *scaling = scaling_from_name(doc.value("scaling", "raw"));
    std::vector<DropletFunction> out;
    for (const auto &d : doc.at("droplets"))
        out.push_back(droplet_from_json(d));
    return out;
}

nlohmann::json mesh_to_json(const DropletMesh &m) {
    return {{"schema", "spindrops.mesh/1"}, {"label", m.label.to_json()}, {"name", m.label.to_string()},
            {"n_theta", m.n_theta},         {"n_phi", m.n_phi},           {"r", m.r},
            {"eta", m.eta},                 {"r_max", m.r_max}};
}

DropletMesh mesh_from_json(const nlohmann::json &j) {
    if (!j.is_object() || j.value("schema", "") != "spindrops.mesh/1")
        throw SchemaError("not a spindrops.mesh/1 document");
    DropletMesh m;
    m.label = lisa::DropletLabel::from_json(j.at("label"));
    m.n_theta = j.at("n_theta").get<int>();
    m.n_phi = j.at("n_phi").get<int>();
    m.r = j.at("r").get<std::vector<double>>();
    m.eta = j.at("eta").get<std::vector<double>>();
    m.r_max = j.at("r_max").get<double>();
    if (m.r.size() != static_cast<std::size_t>(m.n_theta * m.n_phi) || m.eta.size() != m.r.size())
        throw SchemaError("mesh arrays do not match the grid size");
    return m;
}

std::string weight_table(const std::vector<DropletFunction> &droplets) {
    std::ostringstream os;
    os << std::left << std::setw(32) << "droplet" << "weight\n";
    for (const auto &f : droplets) {
        os << std::left << std::setw(32) << f.label.to_string();
        if (f.zero)
            os << "0 (zero)\n";
        else
            os << std::setprecision(12) << f.weight() << "\n";
    }
    return os.str();
}

} // namespace spindrops::drops
