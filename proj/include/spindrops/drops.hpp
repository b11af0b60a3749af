#pragma once

#include <map>
#include <string>
#include <vector>

#include "spindrops/lisa.hpp"

namespace spindrops::drops {

enum class Scaling { raw, density };
std::string scaling_name(Scaling s);
Scaling scaling_from_name(const std::string &s);
/// Factor s multiplying the operator before expansion: 1 or sqrt(dim).
double scaling_factor(const SpinSystem &system, Scaling s);

struct Coefficient {
    int j = 0;
    int m = 0;
    cplx value;
};

struct DropletFunction {
    lisa::DropletLabel label;
    std::vector<Coefficient> coeffs; ///< ordered by (j, m)
    bool zero = false;

    double weight() const;
    /// Coefficient of (j, m), zero if absent.
    cplx coeff(int j, int m) const;
};

std::vector<DropletFunction> decompose(const Operator &a, const lisa::LisaBasis &basis,
                                       Scaling scaling = Scaling::raw);
/// Sum of c T over all droplets; scaling undoes the factor used by decompose.
Operator reconstruct(const std::vector<DropletFunction> &droplets, const lisa::LisaBasis &basis,
                     Scaling scaling = Scaling::raw);

struct DropletMesh {
    lisa::DropletLabel label;
    int n_theta = 0;
    int n_phi = 0;
    std::vector<double> r;   ///< row-major, theta index outer
    std::vector<double> eta; ///< phase in (-pi, pi]
    double r_max = 0;

    double theta(int i) const;
    double phi(int k) const;
};

/// Evaluate f = sum c_jm Y_jm on theta_i = pi i/(n_theta-1), phi_k = 2 pi k/n_phi.
DropletMesh sample_droplet(const DropletFunction &f, int n_theta = 64, int n_phi = 128);
cplx evaluate_droplet(const DropletFunction &f, double theta, double phi);

/// Hilbert-Schmidt weight per coherence order p = m.
std::map<int, double> coherence_order_spectrum(const Operator &a, const lisa::LisaBasis &basis);

nlohmann::json droplet_to_json(const DropletFunction &f);
DropletFunction droplet_from_json(const nlohmann::json &j);
/// Document with schema id, system, scaling and droplet list.
nlohmann::json droplets_document(const std::vector<DropletFunction> &droplets, const SpinSystem &system,
                                 Scaling scaling);
std::vector<DropletFunction> droplets_from_document(const nlohmann::json &doc, Scaling *scaling = nullptr);

nlohmann::json mesh_to_json(const DropletMesh &m);
DropletMesh mesh_from_json(const nlohmann::json &j);

/// Text table of per-droplet weights.
std::string weight_table(const std::vector<DropletFunction> &droplets);

} // namespace spindrops::drops
