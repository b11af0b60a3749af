#include "spindrops/cfp.hpp"

#include <cmath>
#include <sstream>

#include "spindrops/error.hpp"

namespace spindrops::lisa {

namespace {

// g | j | parent shape | input ranks | rows "shape[:adhoc] = c1 c2 ..."
// Entries are signed squares: "-5/8" stands for -sqrt(5/8).
const char *const kTable = R"(
2 0 1 : 1 : 2 = 1
2 1 1 : 1 : 1,1 = 1
2 2 1 : 1 : 2 = 1
3 0 1,1 : 1 : 1,1,1 = 1
3 1 2 : 0,2 : 3 = 5/9 4/9 ; 2,1 = 4/9 -5/9
3 1 1,1 : 1 : 2,1 = 1
3 2 2 : 2 : 2,1 = 1
3 2 1,1 : 1 : 2,1 = 1
3 3 2 : 2 : 3 = 1
4 0 3 : 1 : 4 = 1
4 0 2,1 : 1 : 2,2 = 1
4 1 3 : 1 : 3,1 = 1
4 1 2,1 : 1,2 : 3,1 = -5/8 3/8 ; 2,1,1 = 3/8 5/8
4 1 1,1,1 : 0 : 2,1,1 = 1
4 2 3 : 1,3 : 4 = 7/10 3/10 ; 3,1 = 3/10 -7/10
4 2 2,1 : 1,2 : 3,1 = 3/4 1/4 ; 2,2 = -1/4 3/4
4 3 3 : 3 : 3,1 = 1
4 3 2,1 : 2 : 3,1 = 1
4 4 3 : 3 : 4 = 1
5 0 3,1 : 1 : 3,1,1 = 1
5 0 2,1,1 : 1 : 3,1,1 = 1
5 1 4 : 0,2 : 5 = 7/15 8/15 ; 4,1 = 8/15 -7/15
5 1 3,1 : 1,2 : 4,1 = 2/3 1/3 ; 3,2 = 1/3 -2/3
5 1 2,2 : 0,2 : 3,2 = -5/6 1/6 ; 2,2,1 = 1/6 5/6
5 1 2,1,1 : 1 : 2,2,1 = 1
5 2 4 : 2 : 4,1 = 1
5 2 3,1 : 1,2,3 : 4,1 = 126/225 -35/225 64/225 ; 3,2 = 18/45 20/45 -7/45 ; 3,1,1 = -1/25 10/25 14/25
5 2 2,2 : 2 : 3,2 = 1
5 2 2,1,1 : 1 : 3,1,1 = 1
5 3 4 : 2,4 : 5 = 27/35 8/35 ; 4,1 = 8/35 -27/35
5 3 3,1 : 2,3 : 4,1 = 8/9 1/9 ; 3,2 = 1/9 -8/9
5 3 2,2 : 2 : 3,2 = -1
5 4 4 : 4 : 4,1 = 1
5 4 3,1 : 3 : 4,1 = 1
5 5 4 : 4 : 5 = 1
6 0 5 : 1 : 6 = 1
6 0 4,1 : 1 : 4,2:I = 1
6 0 3,2 : 1 : 4,2:I = -1
6 0 2,2,1 : 1 : 2,2,2 = 1
6 1 5 : 1 : 5,1 = 1
6 1 4,1 : 1,2 : 5,1 = 7/12 -5/12 ; 4,1,1 = 5/12 7/12
6 1 3,2 : 1,2 : 3,3 = 2/3 -1/3 ; 3,2,1 = 1/3 2/3
6 1 3,1,1 : 0,2 : 4,1,1 = 5/9 4/9 ; 3,2,1 = 4/9 -5/9
6 1 2,2,1 : 1 : 3,2,1 = 1
6 2 5 : 1,3 : 6 = 15/25 10/25 ; 5,1 = 10/25 -15/25
6 2 4,1 : 1,2,3 : 5,1 = 63/120 25/120 32/120 ; 4,2:I = -9/240 175/240 -56/240 ; 4,2:II = 7/16 -1/16 -8/16
6 2 3,2 : 1,2,3 : 4,2:I = 18/30 -5/30 -7/30 ; 4,2:II = 14/50 35/50 1/50 ; 3,2,1 = -9/75 10/75 -56/75
6 2 3,1,1 : 2 : 3,2,1 = 1
6 2 2,2,1 : 1 : 3,2,1 = 1
6 3 5 : 3 : 5,1 = 1
6 3 4,1 : 2,3,4 : 5,1 = -80/112 7/112 -25/112 ; 4,2:I = 80/336 175/336 -81/336 ; 4,1,1 = -4/84 35/84 45/84
6 3 3,2 : 2,3 : 4,2:I = 2/3 -1/3 ; 3,3 = 1/3 2/3
6 3 3,1,1 : 2 : 4,1,1 = 1
6 4 5 : 3,5 : 6 = 22/27 5/27 ; 5,1 = 5/27 -22/27
6 4 4,1 : 3,4 : 5,1 = 15/16 1/16 ; 4,2:I = 1/16 -15/16
6 4 3,2 : 3 : 4,2:I = 1
6 5 5 : 5 : 5,1 = 1
6 5 4,1 : 4 : 5,1 = 1
6 6 5 : 5 : 6 = 1
)";

std::vector<int> parse_ints(const std::string &s, char sep) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty())
            out.push_back(std::stoi(item));
    return out;
}

std::string trim(const std::string &s) {
    auto b = s.find_first_not_of(' ');
    auto e = s.find_last_not_of(' ');
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(trim(item));
    return out;
}

// squarefree decomposition n = s^2 * f
void squarefree(mpz_class n, mpz_class &s, mpz_class &f) {
    s = 1;
    f = 1;
    for (unsigned long p = 2; mpz_class(p) * p <= n; ++p) {
        int e = 0;
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            n /= p;
            ++e;
        }
        for (int k = 0; k < e / 2; ++k)
            s *= p;
        if (e % 2)
            f *= p;
    }
    f *= n;
}

} // namespace

double Surd::value() const { return sign == 0 ? 0.0 : sign * std::sqrt(square.get_d()); }

Surd Surd::parse(const std::string &text) {
    Surd s;
    std::string t = trim(text);
    int sign = 1;
    if (!t.empty() && t[0] == '-') {
        sign = -1;
        t = t.substr(1);
    }
    s.square = mpq_class(t);
    s.square.canonicalize();
    s.sign = s.square == 0 ? 0 : sign;
    return s;
}

bool surd_sum_is_zero(const std::vector<Surd> &terms) {
    // group by squarefree radical: sign*sqrt(p/q) = sign*(s/q)*sqrt(f) with p*q = s^2 f
    std::map<mpz_class, mpq_class> by_radical;
    for (const auto &t : terms) {
        if (t.sign == 0)
            continue;
        mpz_class pq = t.square.get_num() * t.square.get_den();
        mpz_class s, f;
        squarefree(pq, s, f);
        mpq_class coeff(s, t.square.get_den());
        coeff.canonicalize();
        by_radical[f] += t.sign * coeff;
    }
    for (const auto &[f, c] : by_radical)
        if (c != 0)
            return false;
    return true;
}

bool surd_dot_rational(const std::vector<Surd> &a, const std::vector<Surd> &b, mpq_class &out) {
    std::vector<Surd> products;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        Surd p;
        p.sign = a[i].sign * b[i].sign;
        p.square = a[i].square * b[i].square;
        products.push_back(p);
    }
    std::map<mpz_class, mpq_class> by_radical;
    for (const auto &t : products) {
        if (t.sign == 0)
            continue;
        mpz_class pq = t.square.get_num() * t.square.get_den();
        mpz_class s, f;
        squarefree(pq, s, f);
        mpq_class coeff(s, t.square.get_den());
        coeff.canonicalize();
        by_radical[f] += t.sign * coeff;
    }
    out = 0;
    for (const auto &[f, c] : by_radical) {
        if (c == 0)
            continue;
        if (f != 1)
            return false;
        out += c;
    }
    return true;
}

const CfpTable &CfpTable::builtin() {
    static const CfpTable table = [] {
        CfpTable t;
        std::stringstream ss(kTable);
        std::string line;
        while (std::getline(ss, line)) {
            line = trim(line);
            if (line.empty())
                continue;
            auto parts = split(line, ':');
            // parts: "g j shape", "ranks", "rows..." (rows may contain ':' for adhoc)
            std::stringstream head(parts.at(0));
            CfpBlock b;
            std::string shape;
            head >> b.g >> b.j >> shape;
            b.parent_shape.parts = parse_ints(shape, ',');
            b.input_ranks = parse_ints(parts.at(1), ',');
            std::string rest;
            for (std::size_t i = 2; i < parts.size(); ++i)
                rest += (i > 2 ? ":" : "") + parts[i];
            for (const auto &row_text : split(rest, ';')) {
                auto eq = row_text.find('=');
                std::string lhs = trim(row_text.substr(0, eq));
                std::string rhs = trim(row_text.substr(eq + 1));
                CfpRow row;
                auto colon = lhs.find(':');
                if (colon != std::string::npos) {
                    std::string tag = lhs.substr(colon + 1);
                    row.adhoc = tag == "I" ? 1 : tag == "II" ? 2 : 0;
                    lhs = lhs.substr(0, colon);
                }
                row.shape.parts = parse_ints(lhs, ',');
                std::stringstream vs(rhs);
                std::string v;
                while (vs >> v)
                    row.coeffs.push_back(Surd::parse(v));
                if (row.coeffs.size() != b.input_ranks.size())
                    throw Error("malformed CFP row: " + line);
                b.rows.push_back(std::move(row));
            }
            if (b.rows.size() != b.input_ranks.size())
                throw Error("CFP block is not square: " + line);
            t.index_[{b.g, b.j, b.parent_shape.parts}] = t.blocks_.size();
            t.blocks_.push_back(std::move(b));
        }
        return t;
    }();
    return table;
}

bool CfpTable::has_block(int g, int j, const symgroup::Partition &parent_shape) const {
    return index_.count({g, j, parent_shape.parts}) > 0;
}

const CfpBlock &CfpTable::block(int g, int j, const symgroup::Partition &parent_shape) const {
    auto it = index_.find({g, j, parent_shape.parts});
    if (it == index_.end())
        throw Error("no CFP block for g=" + std::to_string(g) + ", j=" + std::to_string(j) + ", parent shape " +
                    parent_shape.to_string());
    return blocks_[it->second];
}

long CfpTable::assembled_dimension(int g) const {
    long dim = 0;
    for (const auto &b : blocks_)
        if (b.g == g)
            dim += static_cast<long>(b.rows.size()) * symgroup::count_standard(b.parent_shape);
    return dim;
}

bool CfpTable::rows_orthonormal(const CfpBlock &b) {
    for (std::size_t r = 0; r < b.rows.size(); ++r)
        for (std::size_t s = r; s < b.rows.size(); ++s) {
            mpq_class dot;
            if (!surd_dot_rational(b.rows[r].coeffs, b.rows[s].coeffs, dot))
                return false;
            if (dot != (r == s ? 1 : 0))
                return false;
        }
    return true;
}

std::uint64_t CfpTable::checksum() {
    std::uint64_t h = 14695981039346656037ULL;
    for (const char *p = kTable; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace spindrops::lisa
