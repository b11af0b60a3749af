#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "spindrops/operator.hpp"

namespace spindrops::symgroup {

/// Bijection on {1..g}; stored 0-based, images_[i] = sigma(i).
class Permutation {
  public:
    Permutation() = default;
    explicit Permutation(std::vector<int> images0);
    static Permutation identity(int g);
    /// Transposition of the 1-based points a and b.
    static Permutation transposition(int g, int a, int b);
    /// Cycle notation with 1-based points, e.g. {1,3,2}.
    static Permutation cycle(int g, const std::vector<int> &points);

    int degree() const { return static_cast<int>(images_.size()); }
    /// 1-based image of a 1-based point.
    int operator()(int point) const { return images_.at(static_cast<std::size_t>(point - 1)) + 1; }
    const std::vector<int> &images0() const { return images_; }

    /// (this * o)(i) = this(o(i)).
    Permutation operator*(const Permutation &o) const;
    Permutation inverse() const;
    int cycle_count() const;
    int sign() const;
    /// Lexicographic rank in [0, g!).
    int rank() const;
    static Permutation unrank(int g, int r);

    std::string to_cycle_string() const;
    bool operator==(const Permutation &o) const { return images_ == o.images_; }
    bool operator<(const Permutation &o) const { return images_ < o.images_; }

  private:
    std::vector<int> images_;
};

long factorial(int n);

/// Non-increasing list of positive parts.
struct Partition {
    std::vector<int> parts;
    int size() const;
    bool valid() const;
    std::string to_string() const;
    bool operator==(const Partition &o) const { return parts == o.parts; }
    bool operator<(const Partition &o) const { return parts < o.parts; }
};

/// All partitions of g in the tableau enumeration order (rows of the g <= 6 catalogs).
std::vector<Partition> partitions_in_catalog_order(int g);

/// Young tableau; entries are 1-based.
struct YoungTableau {
    std::vector<std::vector<int>> rows;

    Partition shape() const;
    int size() const;
    bool is_standard() const;
    /// Row and column (0-based) of an entry.
    std::pair<int, int> position(int entry) const;
    /// Content col - row of an entry.
    int content(int entry) const;
    /// Row-reading word.
    std::vector<int> reading_word() const;
    /// Tableau with the largest entry removed.
    YoungTableau restricted() const;
    /// Tableau with entry size()+1 appended to the given row.
    YoungTableau extended(int row) const;
    /// Compact text, rows separated by '/', e.g. "12/3".
    std::string to_string() const;
    static YoungTableau parse(const std::string &text);

    bool operator==(const YoungTableau &o) const { return rows == o.rows; }
    bool operator<(const YoungTableau &o) const { return reading_word() < o.reading_word(); }
};

/// Standard tableaux of a shape, ordered by the reading word.
std::vector<YoungTableau> standard_tableaux(const Partition &shape);
/// Every standard tableau with g boxes; position i holds tau_{i+1}.
const std::vector<YoungTableau> &tableau_catalog(int g);
/// 1-based catalog index of a standard tableau.
int tableau_index(const YoungTableau &tau);
/// Number of standard tableaux of the shape.
long count_standard(const Partition &shape);

/// Signed axial distance from box a to box a+1 (down/left positive).
int axial_distance(const YoungTableau &tau, int a);

/// Exact element of the rational group ring Q[S_g], dense over permutation ranks.
class GroupRingElement {
  public:
    GroupRingElement() = default;
    explicit GroupRingElement(int g);
    static GroupRingElement from_permutation(const Permutation &p, const mpq_class &c = 1);

    int degree() const { return g_; }
    const mpq_class &coeff(const Permutation &p) const { return coeffs_.at(static_cast<std::size_t>(p.rank())); }
    const mpq_class &coeff_at(int rank) const { return coeffs_[static_cast<std::size_t>(rank)]; }
    void set(const Permutation &p, const mpq_class &c) { coeffs_.at(static_cast<std::size_t>(p.rank())) = c; }
    void add(const Permutation &p, const mpq_class &c) { coeffs_.at(static_cast<std::size_t>(p.rank())) += c; }
    std::size_t support_size() const;
    bool is_zero() const;

    GroupRingElement operator+(const GroupRingElement &o) const;
    GroupRingElement operator-(const GroupRingElement &o) const;
    GroupRingElement operator*(const GroupRingElement &o) const;
    GroupRingElement operator*(const mpq_class &s) const;
    bool operator==(const GroupRingElement &o) const { return g_ == o.g_ && coeffs_ == o.coeffs_; }

    /// Nonzero terms as (permutation, coefficient) in rank order.
    std::vector<std::pair<Permutation, mpq_class>> terms() const;
    std::string to_string() const;

  private:
    int g_ = 0;
    std::vector<mpq_class> coeffs_;
};

/// Row symmetrizer H, column antisymmetrizer V (integer sums).
GroupRingElement row_symmetrizer(const YoungTableau &tau);
GroupRingElement column_antisymmetrizer(const YoungTableau &tau);
/// e_tau = f_lambda H V with f_lambda = #SYT / g!.
GroupRingElement young_symmetrizer(const YoungTableau &tau);
/// f_lambda times the sum of e_T over every filling T of the shape.
GroupRingElement central_idempotent(const Partition &shape);

/// If x*x = c*x for a rational c, returns true and sets c.
bool idempotent_scale(const GroupRingElement &x, mpq_class &c);

enum class ProjectorStatus { ok, corrupted };

struct Projector {
    YoungTableau tableau;
    int index = 0; ///< catalog index tau_i
    GroupRingElement element;
    ProjectorStatus status = ProjectorStatus::ok;
    int parent = 0; ///< catalog index tau_t used in the recursion (0 for the first)
    int a = 0;      ///< swapped pair (a, a+1)
    int distance = 0;
};

/// Orthogonalized projectors P_p for every standard tableau of a shape.
std::vector<Projector> orthogonalized_projectors(const Partition &shape);
/// Cached projectors for every tableau of g boxes, in catalog order.
const std::vector<Projector> &projector_catalog(int g);

/// Apply a permutation to the tensor factors of an operator on g equal spins.
Operator upsilon_apply(const Permutation &p, const Operator &a);
Operator upsilon_apply(const GroupRingElement &x, const Operator &a);
/// Same on a raw matrix with local dimension d per factor.
Matrix upsilon_apply(const Permutation &p, const Matrix &a, int local_dim);

/// Dimension of the kernel of the group ring acting on operators of g spins J.
int upsilon_kernel_dim(int g, HalfInteger J);

/// Pairs of distinct standard tableaux (1-based catalog indices) with e_tau' e_tau != 0.
std::vector<std::pair<int, int>> symmetrizer_orthogonality_pairs(int g);

/// Shapes that carry g-linear tensors of spins J (at most (2J+1)^2 - 1 rows).
bool shape_carries_tensors(const Partition &shape, HalfInteger J);

/// Diagnostic report for the CLI. The plain fields cover tensor-carrying shapes of spins 1/2;
/// the *_all fields cover every shape of S_g.
struct Diagnostics {
    int g = 0;
    std::vector<Projector> projectors;
    std::vector<int> corrupted;
    std::vector<int> corrupted_all;
    int kernel_dim = 0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::pair<int, int>> pairs_all;
};
Diagnostics diagnose(int g);
nlohmann::json diagnostics_to_json(const Diagnostics &d);
std::string diagnostics_to_text(const Diagnostics &d);

} // namespace spindrops::symgroup
