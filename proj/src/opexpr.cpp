#include "spindrops/opexpr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "spindrops/angular.hpp"
#include "spindrops/error.hpp"

namespace spindrops::opexpr {

namespace {

class Parser {
  public:
    explicit Parser(std::string_view text) {
        for (std::size_t i = 0; i < text.size(); ++i) {
            char c = text[i];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
                continue;
            s_.push_back(c);
            pos_.push_back(i);
        }
        end_ = text.size();
    }

    Expr run() {
        Expr e;
        if (s_.empty())
            fail("empty expression");
        bool negate = false;
        if (peek() == '-') {
            negate = true;
            ++i_;
        } else if (peek() == '+') {
            fail("unexpected '+'");
        }
        for (;;) {
            Term t = term();
            if (negate)
                t.scalar = -t.scalar;
            e.terms.push_back(std::move(t));
            if (at_end())
                break;
            char c = peek();
            if (c != '+' && c != '-')
                fail(std::string("expected '+', '-' or '*' but found '") + c + "'");
            negate = c == '-';
            ++i_;
        }
        return e;
    }

  private:
    bool at_end() const { return i_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[i_]; }
    std::size_t here() const { return at_end() ? end_ : pos_[i_]; }

    [[noreturn]] void fail(const std::string &msg) const {
        if (at_end())
            throw ParseError(msg + " (end of input)", end_);
        throw ParseError(msg, here());
    }

    static bool digit(char c) { return c >= '0' && c <= '9'; }

    bool starts_scalar() const {
        char c = peek();
        return digit(c) || c == '.' || c == 'i' || c == '(';
    }

    Term term() {
        Term t;
        t.position = here();
        if (at_end())
            fail("expected a term");
        if (starts_scalar()) {
            t.scalar = scalar();
        } else {
            t.atoms.push_back(atom());
        }
        while (peek() == '*') {
            ++i_;
            t.atoms.push_back(atom());
        }
        return t;
    }

    double decimal() {
        std::size_t start = i_;
        while (digit(peek()))
            ++i_;
        if (peek() == '.') {
            ++i_;
            while (digit(peek()))
                ++i_;
        }
        std::string lit(s_.begin() + static_cast<long>(start), s_.begin() + static_cast<long>(i_));
        if (lit.empty() || lit == ".") {
            i_ = start;
            fail("expected a number");
        }
        double v = 0;
        auto res = std::from_chars(lit.data(), lit.data() + lit.size(), v);
        if (res.ec != std::errc() || res.ptr != lit.data() + lit.size()) {
            i_ = start;
            fail("invalid number '" + lit + "'");
        }
        return v;
    }

    cplx scalar() {
        if (peek() == 'i') {
            ++i_;
            return {0.0, 1.0};
        }
        if (peek() == '(') {
            ++i_;
            double sign_re = 1.0;
            if (peek() == '-' || peek() == '+') {
                sign_re = peek() == '-' ? -1.0 : 1.0;
                ++i_;
            }
            double re = sign_re * decimal();
            if (peek() != '+' && peek() != '-')
                fail("expected '+' or '-' in complex literal");
            double sign_im = peek() == '-' ? -1.0 : 1.0;
            ++i_;
            double im = 1.0;
            if (peek() != 'i')
                im = decimal();
            if (peek() != 'i')
                fail("expected 'i' in complex literal");
            ++i_;
            if (peek() != ')')
                fail("expected ')'");
            ++i_;
            return {re, sign_im * im};
        }
        double v = decimal();
        if (peek() == 'i') {
            ++i_;
            return {0.0, v};
        }
        return {v, 0.0};
    }

    Atom atom() {
        Atom a;
        a.position = here();
        char c = peek();
        if (c == 'I' && i_ + 1 < s_.size() && s_[i_ + 1] == 'd') {
            i_ += 2;
            a.kind = 'E';
            a.site = 0;
            return a;
        }
        if (c != 'I' && c != 'S')
            fail("expected an operator atom (I<k><axis>, S<k><axis> or Id)");
        a.kind = c;
        ++i_;
        if (!digit(peek()))
            fail("expected a site index");
        long site = 0;
        while (digit(peek())) {
            site = site * 10 + (peek() - '0');
            if (site > 1000000)
                fail("site index too large");
            ++i_;
        }
        a.site = static_cast<int>(site);
        char ax = peek();
        if (ax != 'x' && ax != 'y' && ax != 'z' && ax != 'p' && ax != 'm')
            fail("expected an axis (x, y, z, p or m)");
        a.axis = ax;
        ++i_;
        return a;
    }

    std::string s_;
    std::vector<std::size_t> pos_;
    std::size_t i_ = 0;
    std::size_t end_ = 0;
};

Matrix local_matrix(HalfInteger J, char axis) {
    switch (axis) {
    case 'x':
        return angular::spin_x(J);
    case 'y':
        return angular::spin_y(J);
    case 'z':
        return angular::spin_z(J);
    case 'p':
        return angular::spin_plus(J);
    case 'm':
        return angular::spin_minus(J);
    default:
        throw Error(std::string("unknown axis '") + axis + "'");
    }
}

Matrix kron_all(const std::vector<Matrix> &factors) {
    Matrix acc = Matrix::Identity(1, 1);
    for (const auto &f : factors) {
        Matrix next(acc.rows() * f.rows(), acc.cols() * f.cols());
        for (Eigen::Index r = 0; r < acc.rows(); ++r)
            for (Eigen::Index c = 0; c < acc.cols(); ++c)
                next.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = acc(r, c) * f;
        acc = std::move(next);
    }
    return acc;
}

std::string format_real(double v) {
    char buf[400];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

std::string atom_string(const Atom &a) {
    if (a.kind == 'E')
        return "Id";
    return std::string(1, a.kind) + std::to_string(a.site) + a.axis;
}

} // namespace

Expr parse_expr(std::string_view text) { return Parser(text).run(); }

void validate(const Expr &e, const SpinSystem &system) {
    int n = static_cast<int>(system.size());
    for (const auto &t : e.terms) {
        std::map<int, std::size_t> seen;
        for (const auto &a : t.atoms) {
            if (a.kind == 'E')
                continue;
            if (a.site < 1 || a.site > n)
                throw ParseError("site " + std::to_string(a.site) + " out of range 1.." + std::to_string(n),
                                 a.position);
            auto [it, fresh] = seen.emplace(a.site, a.position);
            if (!fresh)
                throw ParseError("site " + std::to_string(a.site) + " appears twice in one product", a.position);
            auto J = system.spin(static_cast<std::size_t>(a.site - 1));
            if (a.kind == 'I' && J.twice() != 1)
                throw ParseError("I atoms need a spin-1/2 site; site " + std::to_string(a.site) + " has spin " +
                                     J.to_string() + " (use S)",
                                 a.position);
        }
    }
}

Expr canonical(const Expr &e) {
    Expr out = e;
    for (auto &t : out.terms) {
        std::vector<Atom> kept;
        for (const auto &a : t.atoms)
            if (a.kind != 'E')
                kept.push_back(a);
        std::stable_sort(kept.begin(), kept.end(), [](const Atom &x, const Atom &y) { return x.site < y.site; });
        t.atoms = std::move(kept);
    }
    return out;
}

Operator to_operator(const Expr &e, const SpinSystem &system) {
    validate(e, system);
    auto dim = static_cast<Eigen::Index>(system.dim());
    Matrix acc = Matrix::Zero(dim, dim);
    for (const auto &t : e.terms) {
        std::vector<Matrix> factors;
        for (std::size_t k = 0; k < system.size(); ++k)
            factors.push_back(Matrix::Identity(system.local_dim(k), system.local_dim(k)));
        for (const auto &a : t.atoms)
            if (a.kind != 'E') {
                auto site = static_cast<std::size_t>(a.site - 1);
                factors[site] = local_matrix(system.spin(site), a.axis);
            }
        acc += t.scalar * kron_all(factors);
    }
    return Operator(system, std::move(acc));
}

Operator parse(std::string_view text, const SpinSystem &system) { return to_operator(parse_expr(text), system); }

std::string to_string(const Expr &e) {
    Expr c = canonical(e);
    std::string out;
    bool first = true;
    for (const auto &t : c.terms) {
        cplx s = t.scalar;
        bool negative = false;
        if (s.imag() == 0.0 && std::signbit(s.real())) {
            negative = true;
            s = -s;
        } else if (s.real() == 0.0 && std::signbit(s.imag())) {
            negative = true;
            s = -s;
        }
        if (first)
            out += negative ? "-" : "";
        else
            out += negative ? " - " : " + ";
        first = false;

        std::string scalar;
        if (s.imag() == 0.0) {
            if (s.real() != 1.0 || t.atoms.empty())
                scalar = format_real(s.real());
        } else if (s.real() == 0.0) {
            scalar = s.imag() == 1.0 ? "i" : format_real(s.imag()) + "i";
        } else {
            scalar = "(" + format_real(s.real()) + (std::signbit(s.imag()) ? "-" : "+") +
                     format_real(std::abs(s.imag())) + "i)";
        }
        std::string body = scalar;
        for (const auto &a : t.atoms) {
            if (!body.empty())
                body += "*";
            body += atom_string(a);
        }
        out += body;
    }
    return out;
}

Operator site_operator(const SpinSystem &system, int site, char axis) {
    if (site < 1 || site > static_cast<int>(system.size()))
        throw DimensionError("site " + std::to_string(site) + " out of range");
    std::vector<Matrix> factors;
    for (std::size_t k = 0; k < system.size(); ++k)
        factors.push_back(Matrix::Identity(system.local_dim(k), system.local_dim(k)));
    auto s = static_cast<std::size_t>(site - 1);
    factors[s] = local_matrix(system.spin(s), axis);
    return Operator(system, kron_all(factors));
}

} // namespace spindrops::opexpr
