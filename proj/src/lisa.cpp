#include "spindrops/lisa.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <set>
#include <sstream>

#include "spindrops/angular.hpp"
#include "spindrops/error.hpp"
#include "spindrops/tolerance.hpp"

namespace spindrops::lisa {

using symgroup::Partition;
using symgroup::YoungTableau;

std::string adhoc_name(int adhoc) {
    static const char *names[] = {"", "I", "II", "III", "IV", "V", "VI"};
    if (adhoc < 0 || adhoc > 6)
        return std::to_string(adhoc);
    return names[adhoc];
}

int adhoc_from_name(const std::string &name) {
    for (int k = 0; k <= 6; ++k)
        if (adhoc_name(k) == name)
            return k;
    throw SchemaError("unknown ad hoc sublabel '" + name + "'");
}

namespace {

std::string sites_string(const std::vector<int> &sites) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < sites.size(); ++i)
        os << (i ? "," : "") << sites[i];
    os << '}';
    return os.str();
}

std::string common_string(const std::vector<int> &sites, const std::vector<int> &parents,
                          const std::optional<YoungTableau> &tableau, int adhoc) {
    if (sites.empty())
        return "Id";
    std::ostringstream os;
    os << sites_string(sites);
    if (!parents.empty()) {
        os << " P(";
        for (std::size_t i = 0; i < parents.size(); ++i)
            os << (i ? "," : "") << parents[i];
        os << ')';
    }
    if (tableau && tableau->size() >= 2)
        os << " [" << tableau->to_string() << ']';
    if (adhoc)
        os << ' ' << adhoc_name(adhoc);
    return os.str();
}

nlohmann::json common_json(const std::vector<int> &sites, const std::vector<int> &parents,
                           const std::optional<YoungTableau> &tableau, int adhoc) {
    nlohmann::json j;
    j["sites"] = sites;
    j["parents"] = parents;
    if (tableau) {
        j["tableau"] = tableau->to_string();
        j["tableau_index"] = symgroup::tableau_index(*tableau);
    } else {
        j["tableau"] = nullptr;
        j["tableau_index"] = nullptr;
    }
    j["adhoc"] = adhoc ? nlohmann::json(adhoc_name(adhoc)) : nlohmann::json(nullptr);
    return j;
}

void common_from_json(const nlohmann::json &j, std::vector<int> &sites, std::vector<int> &parents,
                      std::optional<YoungTableau> &tableau, int &adhoc) {
    if (!j.is_object() || !j.contains("sites"))
        throw SchemaError("label needs 'sites'");
    sites = j.at("sites").get<std::vector<int>>();
    parents = j.value("parents", std::vector<int>{});
    tableau.reset();
    if (j.contains("tableau") && !j.at("tableau").is_null())
        tableau = YoungTableau::parse(j.at("tableau").get<std::string>());
    adhoc = 0;
    if (j.contains("adhoc") && !j.at("adhoc").is_null())
        adhoc = adhoc_from_name(j.at("adhoc").get<std::string>());
}

Matrix kron(const Matrix &x, const Matrix &y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

const Matrix &component(const LocalTensor &t, int m) {
    return t.components.at(static_cast<std::size_t>(m + t.label.j));
}

bool label_less(const LocalTensor &a, const LocalTensor &b) {
    int ia = a.label.tableau ? symgroup::tableau_index(*a.label.tableau) : 0;
    int ib = b.label.tableau ? symgroup::tableau_index(*b.label.tableau) : 0;
    return std::tie(ia, a.label.parents, a.label.adhoc, a.label.j) <
           std::tie(ib, b.label.parents, b.label.adhoc, b.label.j);
}

} // namespace

std::string DropletLabel::to_string() const { return common_string(sites, parents, tableau, adhoc); }
nlohmann::json DropletLabel::to_json() const { return common_json(sites, parents, tableau, adhoc); }
DropletLabel DropletLabel::from_json(const nlohmann::json &j) {
    DropletLabel d;
    common_from_json(j, d.sites, d.parents, d.tableau, d.adhoc);
    return d;
}

std::string TensorLabel::to_string() const {
    std::ostringstream os;
    os << common_string(sites, parents, tableau, adhoc) << " j=" << j << " m=" << m;
    return os.str();
}

nlohmann::json TensorLabel::to_json() const {
    auto out = common_json(sites, parents, tableau, adhoc);
    out["j"] = j;
    out["m"] = m;
    return out;
}

TensorLabel TensorLabel::from_json(const nlohmann::json &j) {
    TensorLabel t;
    common_from_json(j, t.sites, t.parents, t.tableau, t.adhoc);
    if (!j.contains("j") || !j.contains("m"))
        throw SchemaError("tensor label needs 'j' and 'm'");
    t.j = j.at("j").get<int>();
    t.m = j.at("m").get<int>();
    return t;
}

std::string method_name(Method m) {
    switch (m) {
    case Method::cfp:
        return "cfp";
    case Method::projection:
        return "projection";
    default:
        return "auto";
    }
}

Method method_from_name(const std::string &s) {
    if (s == "cfp")
        return Method::cfp;
    if (s == "projection")
        return Method::projection;
    if (s == "auto")
        return Method::automatic;
    throw Error("unknown construction method '" + s + "' (expected cfp, projection or auto)");
}

// ---------------------------------------------------------------- LisaBasis

void LisaBasis::rebuild_index() {
    label_index_.clear();
    group_index_.clear();
    for (std::size_t i = 0; i < entries.size(); ++i)
        label_index_[entries[i].label.to_string()] = static_cast<int>(i);
    for (std::size_t i = 0; i < groups.size(); ++i)
        group_index_[groups[i].label.to_string()] = static_cast<int>(i);
}

int LisaBasis::find(const TensorLabel &label) const {
    auto it = label_index_.find(label.to_string());
    return it == label_index_.end() ? -1 : it->second;
}

int LisaBasis::find_group(const DropletLabel &label) const {
    auto it = group_index_.find(label.to_string());
    return it == group_index_.end() ? -1 : it->second;
}

double LisaBasis::orthonormality_error() const {
    auto n = static_cast<Eigen::Index>(entries.size());
    if (n == 0)
        return 0.0;
    auto d2 = static_cast<Eigen::Index>(system.dim() * system.dim());
    std::vector<Eigen::Triplet<cplx>> trip;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Matrix &m = entries[static_cast<std::size_t>(k)].matrix;
        for (Eigen::Index i = 0; i < m.size(); ++i)
            if (m.data()[i] != cplx(0.0))
                trip.emplace_back(i, k, m.data()[i]);
    }
    Eigen::SparseMatrix<cplx> b(d2, n);
    b.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseMatrix<cplx> bt = b.adjoint();
    Eigen::SparseMatrix<cplx> gram = bt * b;
    double worst = 0.0;
    std::vector<bool> diag_seen(static_cast<std::size_t>(n), false);
    for (Eigen::Index c = 0; c < gram.outerSize(); ++c)
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(gram, c); it; ++it) {
            cplx v = it.value();
            if (it.row() == it.col()) {
                v -= 1.0;
                diag_seen[static_cast<std::size_t>(c)] = true;
            }
            worst = std::max(worst, std::abs(v));
        }
    for (bool seen : diag_seen)
        if (!seen)
            worst = std::max(worst, 1.0);
    return worst;
}

std::uint64_t LisaBasis::hash() const {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](const void *data, std::size_t len) {
        const auto *p = static_cast<const unsigned char *>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    auto sys = system.to_string();
    mix(sys.data(), sys.size());
    for (const auto &e : entries) {
        auto s = e.label.to_string();
        mix(s.data(), s.size());
        for (Eigen::Index k = 0; k < e.matrix.size(); ++k) {
            double re = e.matrix.data()[k].real() + 0.0, im = e.matrix.data()[k].imag() + 0.0; // -0 hashes as +0
            mix(&re, sizeof re);
            mix(&im, sizeof im);
        }
    }
    return h;
}

// ---------------------------------------------------------------- signs

cplx spin_half_sign(int g, int j, const YoungTableau &tau) {
    const cplx I(0, 1);
    if (g <= 1)
        return 1.0;
    if (g == 2) {
        if (j == 0)
            return -1.0;
        if (j == 1)
            return -I;
        return 1.0;
    }
    if (g == 3) {
        int idx = symgroup::tableau_index(tau);
        switch (j) {
        case 0:
            return I;
        case 1:
            return idx == 1 ? cplx(-1.0) : cplx(1.0);
        case 2:
            return I;
        default:
            return 1.0;
        }
    }
    int e = ((g - j) % 4 + 4) % 4;
    static const cplx powers[] = {1.0, I, -1.0, -I};
    return powers[e];
}

cplx qudit_sign(int k, int l, int j) {
    const cplx I(0, 1);
    static const cplx powers[] = {1.0, I, -1.0, -I};
    return powers[((k + l - j) % 4 + 4) % 4];
}

// ---------------------------------------------------------------- chain and symmetrize

std::vector<LocalTensor> linear_tensors(HalfInteger J) {
    std::vector<LocalTensor> out;
    for (int q = 1; q <= J.twice(); ++q) {
        LocalTensor t;
        t.label.sites = {1};
        t.label.j = q;
        t.label.tableau = YoungTableau{{{1}}};
        for (int m = -q; m <= q; ++m)
            t.components.push_back(angular::single_spin_tensor_matrix(J, q, m));
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<LocalTensor> chain_cg(const std::vector<LocalTensor> &prev, HalfInteger J_new) {
    auto lin = linear_tensors(J_new);
    std::vector<LocalTensor> out;
    for (const auto &p : prev) {
        int jp = p.label.j;
        for (const auto &q : lin) {
            int jq = q.label.j;
            for (int j = std::abs(jp - jq); j <= jp + jq; ++j) {
                LocalTensor t;
                t.label = p.label;
                t.label.sites.push_back(static_cast<int>(p.label.sites.size()) + 1);
                if (t.label.parents.empty())
                    t.label.parents.push_back(jp);
                t.label.parents.push_back(jq);
                t.label.j = j;
                t.source_rank = jp;
                for (int m = -j; m <= j; ++m) {
                    Matrix acc;
                    for (int mp = -jp; mp <= jp; ++mp) {
                        int mq = m - mp;
                        if (std::abs(mq) > jq)
                            continue;
                        double c = angular::cg(jp, mp, jq, mq, j, m);
                        if (c == 0.0)
                            continue;
                        Matrix term = kron(component(p, mp), component(q, mq)) * c;
                        if (acc.size() == 0)
                            acc = std::move(term);
                        else
                            acc += term;
                    }
                    if (acc.size() == 0) {
                        auto d = component(p, 0).rows() * component(q, 0).rows();
                        acc = Matrix::Zero(d, d);
                    }
                    t.components.push_back(std::move(acc));
                }
                out.push_back(std::move(t));
            }
        }
    }
    return out;
}

std::vector<LocalTensor> symmetrize_cfp(const std::vector<LocalTensor> &provisional, const CfpTable &table, int g) {
    // group by (parent tableau, target rank); the parent rank is the first parents entry of the new coupling
    std::map<std::pair<int, int>, std::map<int, const LocalTensor *>> groups;
    for (const auto &p : provisional) {
        if (!p.label.tableau)
            throw Error("symmetrize_cfp: provisional tensor without tableau");
        if (p.source_rank < 0)
            throw Error("symmetrize_cfp: provisional tensor without parent rank");
        int parent_rank = p.source_rank;
        int idx = symgroup::tableau_index(*p.label.tableau);
        groups[{idx, p.label.j}][parent_rank] = &p;
    }
    std::vector<LocalTensor> out;
    for (const auto &[key, by_rank] : groups) {
        const auto &tau_prev = symgroup::tableau_catalog(g - 1).at(static_cast<std::size_t>(key.first - 1));
        int j = key.second;
        const CfpBlock &blk = table.block(g, j, tau_prev.shape());
        if (blk.input_ranks.size() != by_rank.size())
            throw Error("CFP block g=" + std::to_string(g) + " j=" + std::to_string(j) + " " +
                        tau_prev.shape().to_string() + " does not match the provisional ranks");
        for (const auto &row : blk.rows) {
            LocalTensor t;
            // locate the row receiving the new box
            int newrow = -1;
            for (std::size_t r = 0; r < row.shape.parts.size(); ++r) {
                int old = r < tau_prev.rows.size() ? static_cast<int>(tau_prev.rows[r].size()) : 0;
                if (row.shape.parts[r] == old + 1) {
                    newrow = static_cast<int>(r);
                    break;
                }
            }
            if (newrow < 0)
                throw Error("CFP output shape " + row.shape.to_string() + " is not reachable from " +
                            tau_prev.to_string());
            t.label.sites.resize(static_cast<std::size_t>(g));
            for (int k = 0; k < g; ++k)
                t.label.sites[static_cast<std::size_t>(k)] = k + 1;
            t.label.tableau = tau_prev.extended(newrow);
            t.label.adhoc = row.adhoc;
            t.label.j = j;
            for (int m = -j; m <= j; ++m) {
                Matrix acc;
                for (std::size_t c = 0; c < blk.input_ranks.size(); ++c) {
                    auto it = by_rank.find(blk.input_ranks[c]);
                    if (it == by_rank.end())
                        throw Error("missing provisional rank " + std::to_string(blk.input_ranks[c]) +
                                    " for CFP block g=" + std::to_string(g) + " j=" + std::to_string(j));
                    Matrix term = component(*it->second, m) * row.coeffs[c].value();
                    if (acc.size() == 0)
                        acc = std::move(term);
                    else
                        acc += term;
                }
                t.components.push_back(std::move(acc));
            }
            out.push_back(std::move(t));
        }
    }
    std::stable_sort(out.begin(), out.end(), label_less);
    return out;
}

std::vector<LocalTensor> symmetrize_projection(const std::vector<LocalTensor> &provisional, int g, int local_dim,
                                               bool keep_parents) {
    const auto &projs = symgroup::projector_catalog(g);
    std::set<int> ranks;
    for (const auto &p : provisional)
        ranks.insert(p.label.j);
    std::vector<LocalTensor> out;
    for (const auto &proj : projs) {
        if (!symgroup::shape_carries_tensors(proj.tableau.shape(),
                                             HalfInteger::from_twice(local_dim - 1)))
            continue;
        std::vector<std::pair<symgroup::Permutation, double>> terms;
        for (const auto &[perm, c] : proj.element.terms())
            terms.emplace_back(perm, c.get_d());
        auto apply = [&](const Matrix &x) {
            Matrix acc = Matrix::Zero(x.rows(), x.cols());
            for (const auto &[perm, c] : terms)
                acc += symgroup::upsilon_apply(perm, x, local_dim) * c;
            return acc;
        };
        for (int j : ranks) {
            // images of the stretched components, orthonormalized in provisional order
            std::vector<Matrix> basis_top;
            std::vector<std::vector<std::pair<const LocalTensor *, cplx>>> combos;
            std::vector<std::vector<Matrix>> images;
            std::vector<const LocalTensor *> sources;
            for (const auto &p : provisional) {
                if (p.label.j != j)
                    continue;
                Matrix v = apply(component(p, j));
                if (v.norm() < tol::rank)
                    continue;
                if (proj.status == symgroup::ProjectorStatus::corrupted)
                    throw ScopeError("projector tau" + std::to_string(proj.index) + " (" + proj.tableau.to_string() +
                                     ") is corrupted; use the cfp construction method");
                // Gram-Schmidt against the accepted vectors, tracking combinations
                std::vector<std::pair<const LocalTensor *, cplx>> combo{{&p, 1.0}};
                for (std::size_t k = 0; k < basis_top.size(); ++k) {
                    cplx ov = (basis_top[k].conjugate().cwiseProduct(v)).sum();
                    v -= basis_top[k] * ov;
                    for (const auto &[src, c] : combos[k])
                        combo.emplace_back(src, -ov * c);
                }
                double nv = v.norm();
                if (nv < tol::rank)
                    continue;
                v /= nv;
                for (auto &[src, c] : combo)
                    c /= nv;
                basis_top.push_back(v);
                combos.push_back(std::move(combo));
                sources.push_back(&p);
            }
            int mult = static_cast<int>(basis_top.size());
            for (int k = 0; k < mult; ++k) {
                LocalTensor t;
                t.label.sites = sources[static_cast<std::size_t>(k)]->label.sites;
                if (keep_parents)
                    t.label.parents = sources[static_cast<std::size_t>(k)]->label.parents;
                t.label.tableau = proj.tableau;
                t.label.adhoc = mult > 1 ? k + 1 : 0;
                t.label.j = j;
                for (int m = -j; m <= j; ++m) {
                    Matrix acc;
                    for (const auto &[src, c] : combos[static_cast<std::size_t>(k)]) {
                        Matrix term = apply(component(*src, m)) * c;
                        if (acc.size() == 0)
                            acc = std::move(term);
                        else
                            acc += term;
                    }
                    t.components.push_back(std::move(acc));
                }
                out.push_back(std::move(t));
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), label_less);
    return out;
}

std::vector<LocalTensor> apply_sign_convention(const std::vector<LocalTensor> &tensors, int g) {
    std::vector<LocalTensor> out = tensors;
    for (auto &t : out) {
        cplx s = t.label.tableau ? spin_half_sign(g, t.label.j, *t.label.tableau) : cplx(1.0);
        for (auto &c : t.components)
            c *= s;
    }
    return out;
}

namespace {

std::vector<LocalTensor> level_one_spin_half() {
    auto lin = linear_tensors(HalfInteger::from_twice(1));
    return lin;
}

// Recorded phase alignment of projection images with the CFP phases (g, tableau index, rank).
double projection_phase(int g, int tau, int j) {
    struct Flip {
        int g, tau, j;
    };
    static const Flip flips[] = {{4, 5, 2}, {4, 6, 2}, {4, 9, 1}};
    for (const auto &f : flips)
        if (f.g == g && f.tau == tau && f.j == j)
            return -1.0;
    return 1.0;
}

template <class Builder>
const std::vector<LocalTensor> &cached_level(std::map<int, std::vector<LocalTensor>> &cache, std::mutex &mu, int g,
                                             Builder build) {
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(g);
        if (it != cache.end())
            return it->second;
    }
    auto v = build();
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(g, std::move(v)).first->second;
}

} // namespace

const std::vector<LocalTensor> &raw_cfp_tensors(int g) {
    static std::map<int, std::vector<LocalTensor>> cache;
    static std::mutex mu;
    if (g < 1 || g > 6)
        throw ScopeError("CFP construction supports 1 <= g <= 6");
    return cached_level(cache, mu, g, [g] {
        if (g == 1)
            return level_one_spin_half();
        auto prov = chain_cg(raw_cfp_tensors(g - 1), HalfInteger::from_twice(1));
        return symmetrize_cfp(prov, CfpTable::builtin(), g);
    });
}

const std::vector<LocalTensor> &raw_projection_tensors(int g) {
    static std::map<int, std::vector<LocalTensor>> cache;
    static std::mutex mu;
    if (g < 1 || g > 6)
        throw ScopeError("projection construction supports 1 <= g <= 6");
    return cached_level(cache, mu, g, [g] {
        if (g == 1)
            return level_one_spin_half();
        auto prov = chain_cg(raw_projection_tensors(g - 1), HalfInteger::from_twice(1));
        for (auto &p : prov)
            p.label.tableau.reset();
        auto out = symmetrize_projection(prov, g, 2);
        for (auto &t : out) {
            double s = projection_phase(g, symgroup::tableau_index(*t.label.tableau), t.label.j);
            for (auto &c : t.components)
                c *= s;
        }
        return out;
    });
}

// ---------------------------------------------------------------- embedding

Matrix embed(const Matrix &t, const std::vector<int> &sites, const SpinSystem &system) {
    int n = static_cast<int>(system.size());
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    Eigen::Index local = 1;
    for (int s : sites) {
        if (s < 1 || s > n || in[static_cast<std::size_t>(s - 1)])
            throw DimensionError("invalid embedding site list");
        in[static_cast<std::size_t>(s - 1)] = true;
        local *= system.local_dim(static_cast<std::size_t>(s - 1));
    }
    if (t.rows() != local)
        throw DimensionError("tensor dimension " + std::to_string(t.rows()) +
                             " does not match the spin numbers of the target sites");
    auto dim = static_cast<Eigen::Index>(system.dim());
    double rest_norm = 1.0 / std::sqrt(static_cast<double>(dim / local));
    std::vector<Eigen::Index> loc(static_cast<std::size_t>(dim)), rest(static_cast<std::size_t>(dim));
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        Eigen::Index v = idx, l = 0, r = 0, lm = 1, rm = 1;
        for (int k = n - 1; k >= 0; --k) {
            int d = system.local_dim(static_cast<std::size_t>(k));
            Eigen::Index digit = v % d;
            v /= d;
            if (in[static_cast<std::size_t>(k)]) {
                l += digit * lm;
                lm *= d;
            } else {
                r += digit * rm;
                rm *= d;
            }
        }
        loc[static_cast<std::size_t>(idx)] = l;
        rest[static_cast<std::size_t>(idx)] = r;
    }
    Matrix out = Matrix::Zero(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        for (Eigen::Index r = 0; r < dim; ++r)
            if (rest[static_cast<std::size_t>(r)] == rest[static_cast<std::size_t>(c)])
                out(r, c) = t(loc[static_cast<std::size_t>(r)], loc[static_cast<std::size_t>(c)]) * rest_norm;
    return out;
}

// ---------------------------------------------------------------- basis assembly

namespace {

void subsets_rec(int n, int k, int start, std::vector<int> &cur, std::vector<std::vector<int>> &out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (int s = start; s <= n; ++s) {
        cur.push_back(s);
        subsets_rec(n, k, s + 1, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    subsets_rec(n, k, 1, cur, out);
    return out;
}

class Assembler {
  public:
    explicit Assembler(LisaBasis &b) : b_(b) {}

    void add(const DropletLabel &droplet, const LocalTensor &t, const std::vector<int> &sites) {
        int gi = group(droplet);
        for (int m = -t.label.j; m <= t.label.j; ++m) {
            BasisEntry e;
            e.label = t.label;
            e.label.sites = sites;
            e.label.m = m;
            e.matrix = embed(component(t, m), sites, b_.system);
            e.group = gi;
            b_.groups[static_cast<std::size_t>(gi)].members.push_back(static_cast<int>(b_.entries.size()));
            b_.entries.push_back(std::move(e));
        }
    }

    void add_identity() {
        DropletLabel d;
        int gi = group(d);
        BasisEntry e;
        auto dim = static_cast<Eigen::Index>(b_.system.dim());
        e.matrix = Matrix::Identity(dim, dim) / std::sqrt(static_cast<double>(dim));
        e.group = gi;
        b_.groups[static_cast<std::size_t>(gi)].members.push_back(static_cast<int>(b_.entries.size()));
        b_.entries.push_back(std::move(e));
    }

  private:
    int group(const DropletLabel &d) {
        auto key = d.to_string();
        auto it = index_.find(key);
        if (it != index_.end())
            return it->second;
        int gi = static_cast<int>(b_.groups.size());
        b_.groups.push_back({d, {}});
        index_[key] = gi;
        return gi;
    }
    LisaBasis &b_;
    std::map<std::string, int> index_;
};

void check_supported(const SpinSystem &system) {
    if (system.size() == 0)
        throw ScopeError("empty spin system");
    for (auto j : system.spins())
        if (j.twice() < 1 || j.twice() > 7)
            throw ScopeError("spin numbers must lie in 1/2..7/2, got " + j.to_string());
    if (system.all_spin_half()) {
        if (system.size() > 6)
            throw ScopeError("at most six spins 1/2 are supported, got " + std::to_string(system.size()));
        return;
    }
    if (system.size() > 2)
        throw ScopeError("systems of three or more spins require all spin numbers 1/2 (got " + system.to_string() +
                         ")");
}

LisaBasis build_spin_half(const SpinSystem &system, Method method) {
    int n = static_cast<int>(system.size());
    if (method == Method::automatic)
        method = n <= 4 ? Method::projection : Method::cfp;
    if (method == Method::projection && n > 4)
        throw ScopeError("the projection method is not offered for five or more spins 1/2 (corrupted projectors); "
                         "use the cfp method");
    LisaBasis b;
    b.system = system;
    b.method = method_name(method);
    Assembler as(b);
    as.add_identity();
    for (int g = 1; g <= n; ++g) {
        const auto &raw = method == Method::cfp ? raw_cfp_tensors(g) : raw_projection_tensors(g);
        auto local = apply_sign_convention(raw, g);
        for (const auto &sites : subsets(n, g))
            for (const auto &t : local) {
                DropletLabel d;
                d.sites = sites;
                if (g >= 3) {
                    d.tableau = t.label.tableau;
                    d.adhoc = t.label.adhoc;
                }
                as.add(d, t, sites);
            }
    }
    b.rebuild_index();
    return b;
}

LisaBasis build_single_spin(const SpinSystem &system) {
    LisaBasis b;
    b.system = system;
    b.method = "direct";
    Assembler as(b);
    as.add_identity();
    DropletLabel d;
    d.sites = {1};
    for (const auto &t : linear_tensors(system.spin(0))) {
        LocalTensor u = t;
        u.label.tableau.reset();
        as.add(d, u, {1});
    }
    b.rebuild_index();
    return b;
}

} // namespace

LisaBasis build_two_qudit_basis(HalfInteger J1, HalfInteger J2) {
    SpinSystem system({J1, J2});
    check_supported(system);
    if (system.all_spin_half())
        return build_spin_half(system, Method::projection);
    LisaBasis b;
    b.system = system;
    b.method = "projection";
    Assembler as(b);
    as.add_identity();
    for (int site = 1; site <= 2; ++site) {
        DropletLabel d;
        d.sites = {site};
        for (auto t : linear_tensors(system.spin(static_cast<std::size_t>(site - 1)))) {
            t.label.tableau.reset();
            as.add(d, t, {site});
        }
    }
    auto lin1 = linear_tensors(J1);
    int K = J1.twice(), L = J2.twice();
    for (int k = 1; k <= K; ++k)
        for (int l = 1; l <= L; ++l) {
            if (J1 == J2 && l < k)
                continue;
            std::vector<LocalTensor> prov = chain_cg({lin1[static_cast<std::size_t>(k - 1)]}, J2);
            std::vector<LocalTensor> pair;
            for (auto &p : prov)
                if (p.label.parents == std::vector<int>{k, l})
                    pair.push_back(p);
            std::vector<LocalTensor> out;
            if (J1 == J2) {
                for (auto &p : pair)
                    p.label.tableau.reset();
                out = symmetrize_projection(pair, 2, J1.twice() + 1, true);
            } else {
                out = pair;
                bool both = k != l && l <= K && k <= L;
                for (auto &t : out) {
                    t.label.tableau.reset();
                    t.label.adhoc = both ? (k < l ? 1 : 2) : 0;
                }
            }
            for (auto &t : out) {
                cplx s = qudit_sign(k, l, t.label.j);
                for (auto &c : t.components)
                    c *= s;
                DropletLabel d;
                d.sites = {1, 2};
                d.parents = {k, l};
                if (J1 == J2 && k != l)
                    d.tableau = t.label.tableau;
                d.adhoc = t.label.adhoc;
                as.add(d, t, {1, 2});
            }
        }
    b.rebuild_index();
    return b;
}

LisaBasis build_basis(const SpinSystem &system, Method method) {
    check_supported(system);
    if (system.all_spin_half())
        return build_spin_half(system, method);
    if (system.size() == 1)
        return build_single_spin(system);
    return build_two_qudit_basis(system.spin(0), system.spin(1));
}

// ---------------------------------------------------------------- serialization

nlohmann::json basis_to_json(const LisaBasis &b) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto &e : b.entries) {
        nlohmann::json nz = nlohmann::json::array();
        for (Eigen::Index c = 0; c < e.matrix.cols(); ++c)
            for (Eigen::Index r = 0; r < e.matrix.rows(); ++r) {
                cplx v = e.matrix(r, c);
                if (v != cplx(0.0, 0.0))
                    nz.push_back({r, c, v.real(), v.imag()});
            }
        entries.push_back({{"label", e.label.to_json()}, {"group", e.group}, {"nz", std::move(nz)}});
    }
    nlohmann::json groups = nlohmann::json::array();
    for (const auto &g : b.groups)
        groups.push_back({{"label", g.label.to_json()}, {"members", g.members}});
    std::vector<std::string> spins;
    for (auto j : b.system.spins())
        spins.push_back(j.to_string());
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(b.hash()));
    return {{"schema", "spindrops.basis/1"},
            {"library_version", SPINDROPS_VERSION},
            {"system", spins},
            {"method", b.method},
            {"entries", std::move(entries)},
            {"droplets", std::move(groups)},
            {"hash", hash}};
}

LisaBasis basis_from_json(const nlohmann::json &j) {
    if (!j.is_object() || j.value("schema", "") != "spindrops.basis/1")
        throw SchemaError("not a spindrops.basis/1 document");
    LisaBasis b;
    std::vector<HalfInteger> spins;
    for (const auto &s : j.at("system"))
        spins.push_back(HalfInteger::parse(s.get<std::string>()));
    b.system = SpinSystem(spins);
    b.method = j.at("method").get<std::string>();
    auto dim = static_cast<Eigen::Index>(b.system.dim());
    for (const auto &e : j.at("entries")) {
        BasisEntry be;
        be.label = TensorLabel::from_json(e.at("label"));
        be.group = e.at("group").get<int>();
        be.matrix = Matrix::Zero(dim, dim);
        for (const auto &nz : e.at("nz")) {
            auto r = nz.at(0).get<Eigen::Index>(), c = nz.at(1).get<Eigen::Index>();
            if (r < 0 || r >= dim || c < 0 || c >= dim)
                throw SchemaError("basis entry index out of range");
            be.matrix(r, c) = cplx(nz.at(2).get<double>(), nz.at(3).get<double>());
        }
        b.entries.push_back(std::move(be));
    }
    for (const auto &g : j.at("droplets"))
        b.groups.push_back({DropletLabel::from_json(g.at("label")), g.at("members").get<std::vector<int>>()});
    b.rebuild_index();
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(b.hash()));
    if (j.contains("hash") && j.at("hash").get<std::string>() != hash)
        throw SchemaError("basis hash mismatch: file says " + j.at("hash").get<std::string>() + ", content gives " +
                          hash);
    return b;
}

std::string basis_inventory(const LisaBasis &b) {
    std::map<int, std::pair<int, int>> per_g;
    std::map<std::pair<int, std::string>, int> per_shape;
    for (const auto &g : b.groups) {
        int lin = static_cast<int>(g.label.sites.size());
        per_g[lin].first += 1;
        per_g[lin].second += static_cast<int>(g.members.size());
        if (g.label.tableau && lin >= 3)
            per_shape[{lin, g.label.tableau->shape().to_string()}] += 1;
    }
    std::ostringstream os;
    os << b.groups.size() << " droplets, " << b.entries.size() << " operators (system " << b.system.to_string()
       << ", method " << b.method << ")\n";
    for (const auto &[g, c] : per_g)
        os << "  g=" << g << ": " << c.first << " droplets, " << c.second << " operators\n";
    for (const auto &[k, c] : per_shape)
        os << "    g=" << k.first << " shape " << k.second << ": " << c << " droplets\n";
    return os.str();
}

} // namespace spindrops::lisa
