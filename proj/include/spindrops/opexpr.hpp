#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spindrops/operator.hpp"

namespace spindrops::opexpr {

/// One factor of a product term. kind is 'I', 'S' or 'E' (the identity atom "Id").
struct Atom {
    char kind = 'E';
    int site = 0; ///< 1-based, unused for the identity
    char axis = 'z';
    std::size_t position = 0;

    bool operator==(const Atom &o) const { return kind == o.kind && site == o.site && axis == o.axis; }
};

struct Term {
    cplx scalar = 1.0;
    std::vector<Atom> atoms;
    std::size_t position = 0;
};

struct Expr {
    std::vector<Term> terms;
};

/// Syntax only; no system needed.
Expr parse_expr(std::string_view text);
/// Sites in range, one atom per site, I atoms only on spin-1/2 sites.
void validate(const Expr &e, const SpinSystem &system);
/// Atoms of every term sorted by site, redundant identity atoms removed.
Expr canonical(const Expr &e);
Operator to_operator(const Expr &e, const SpinSystem &system);
Operator parse(std::string_view text, const SpinSystem &system);

/// Text in canonical form that parses back to the same operator.
std::string to_string(const Expr &e);

/// Spin matrix of one site (axis x, y, z, p, m) embedded in the full system.
Operator site_operator(const SpinSystem &system, int site, char axis);

} // namespace spindrops::opexpr
