#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spindrops/cfp.hpp"
#include "spindrops/operator.hpp"
#include "spindrops/symgroup.hpp"

namespace spindrops::lisa {

std::string adhoc_name(int adhoc);
int adhoc_from_name(const std::string &name);

/// Label of one droplet function.
struct DropletLabel {
    std::vector<int> sites;   ///< 1-based, sorted; empty for the identity droplet
    std::vector<int> parents; ///< parent ranks, empty when unused
    std::optional<symgroup::YoungTableau> tableau;
    int adhoc = 0;

    std::string to_string() const;
    nlohmann::json to_json() const;
    static DropletLabel from_json(const nlohmann::json &j);
    bool operator==(const DropletLabel &o) const {
        return sites == o.sites && parents == o.parents && tableau == o.tableau && adhoc == o.adhoc;
    }
    bool operator!=(const DropletLabel &o) const { return !(*this == o); }
};

/// Full sublabel tuple of one basis tensor component.
struct TensorLabel {
    std::vector<int> sites;
    std::vector<int> parents;
    std::optional<symgroup::YoungTableau> tableau;
    int adhoc = 0;
    int j = 0;
    int m = 0;

    int linearity() const { return static_cast<int>(sites.size()); }
    std::string to_string() const;
    nlohmann::json to_json() const;
    static TensorLabel from_json(const nlohmann::json &j);
    bool operator==(const TensorLabel &o) const {
        return sites == o.sites && parents == o.parents && tableau == o.tableau && adhoc == o.adhoc && j == o.j &&
               m == o.m;
    }
};

/// A tensor living on its own g-spin subsystem, before embedding.
struct LocalTensor {
    TensorLabel label; ///< sites are 1..g
    std::vector<Matrix> components; ///< index m + j
    int source_rank = -1; ///< rank of the (g-1)-linear input of a provisional tensor
};

enum class Method { cfp, projection, automatic };
std::string method_name(Method m);
Method method_from_name(const std::string &s);

struct BasisEntry {
    TensorLabel label;
    Matrix matrix;
    int group = 0;
};

struct DropletGroup {
    DropletLabel label;
    std::vector<int> members;
};

/// Orthonormal LISA basis of a spin system with its droplet grouping.
class LisaBasis {
  public:
    SpinSystem system;
    std::string method;
    std::vector<BasisEntry> entries;
    std::vector<DropletGroup> groups;

    std::size_t size() const { return entries.size(); }
    Operator op(std::size_t i) const { return Operator(system, entries[i].matrix); }
    /// Index of the entry with that label, or -1.
    int find(const TensorLabel &label) const;
    /// Index of the droplet group with that label, or -1.
    int find_group(const DropletLabel &label) const;
    /// max |Gram - I|.
    double orthonormality_error() const;
    /// FNV-1a hash over labels and matrix bit patterns.
    std::uint64_t hash() const;

    void rebuild_index();

  private:
    std::map<std::string, int> label_index_;
    std::map<std::string, int> group_index_;
};

// construction pieces

/// Sign factor multiplied onto raw spin-1/2 tensors.
cplx spin_half_sign(int g, int j, const symgroup::YoungTableau &tau);
/// Sign factor for bilinear qudit tensors built from parent ranks k, l.
cplx qudit_sign(int k, int l, int j);

/// Couple (g-1)-linear tensors with linear tensors of a new spin of spin number J_new.
/// Output labels keep the input tableau/adhoc and append q to parents.
std::vector<LocalTensor> chain_cg(const std::vector<LocalTensor> &prev, HalfInteger J_new);
/// Linear tensors T_q (q = 1..2J) of one spin J.
std::vector<LocalTensor> linear_tensors(HalfInteger J);

/// Method B: raw (unsigned) CFP-symmetrized g-linear tensors of spins 1/2 up to linearity g.
const std::vector<LocalTensor> &raw_cfp_tensors(int g);
/// Method A: raw projection-symmetrized tensors of spins 1/2 (g <= 4).
const std::vector<LocalTensor> &raw_projection_tensors(int g);

std::vector<LocalTensor> symmetrize_cfp(const std::vector<LocalTensor> &provisional, const CfpTable &table, int g);
/// With keep_parents the parent list of the first contributing provisional tensor is retained.
std::vector<LocalTensor> symmetrize_projection(const std::vector<LocalTensor> &provisional, int g, int local_dim,
                                               bool keep_parents = false);

/// Sign-adjusted copies.
std::vector<LocalTensor> apply_sign_convention(const std::vector<LocalTensor> &tensors, int g);

/// Embed a local tensor on the 1-based sites of a larger system.
Matrix embed(const Matrix &t, const std::vector<int> &sites, const SpinSystem &system);

LisaBasis build_basis(const SpinSystem &system, Method method = Method::automatic);
LisaBasis build_two_qudit_basis(HalfInteger J1, HalfInteger J2);

nlohmann::json basis_to_json(const LisaBasis &b);
LisaBasis basis_from_json(const nlohmann::json &j);

/// Counts of droplet groups per linearity and per shape, for reports.
std::string basis_inventory(const LisaBasis &b);

} // namespace spindrops::lisa
