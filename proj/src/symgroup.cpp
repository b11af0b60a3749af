#include "spindrops/symgroup.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "spindrops/error.hpp"

namespace spindrops::symgroup {

long factorial(int n) {
    long r = 1;
    for (int k = 2; k <= n; ++k)
        r *= k;
    return r;
}

// ---------------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<int> images0) : images_(std::move(images0)) {
    std::vector<bool> seen(images_.size(), false);
    for (int v : images_) {
        if (v < 0 || v >= static_cast<int>(images_.size()) || seen[static_cast<std::size_t>(v)])
            throw Error("permutation images are not a bijection");
        seen[static_cast<std::size_t>(v)] = true;
    }
}

Permutation Permutation::identity(int g) {
    std::vector<int> im(static_cast<std::size_t>(g));
    std::iota(im.begin(), im.end(), 0);
    return Permutation(std::move(im));
}

Permutation Permutation::transposition(int g, int a, int b) { return cycle(g, {a, b}); }

Permutation Permutation::cycle(int g, const std::vector<int> &points) {
    auto p = identity(g);
    for (std::size_t i = 0; i < points.size(); ++i) {
        int from = points[i] - 1, to = points[(i + 1) % points.size()] - 1;
        p.images_.at(static_cast<std::size_t>(from)) = to;
    }
    return Permutation(p.images_);
}

Permutation Permutation::operator*(const Permutation &o) const {
    if (o.degree() != degree())
        throw DimensionError("permutation degrees differ");
    std::vector<int> im(images_.size());
    for (std::size_t i = 0; i < im.size(); ++i)
        im[i] = images_[static_cast<std::size_t>(o.images_[i])];
    Permutation r;
    r.images_ = std::move(im);
    return r;
}

Permutation Permutation::inverse() const {
    std::vector<int> im(images_.size());
    for (std::size_t i = 0; i < im.size(); ++i)
        im[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
    Permutation r;
    r.images_ = std::move(im);
    return r;
}

int Permutation::cycle_count() const {
    std::vector<bool> seen(images_.size(), false);
    int cycles = 0;
    for (std::size_t i = 0; i < images_.size(); ++i) {
        if (seen[i])
            continue;
        ++cycles;
        for (std::size_t k = i; !seen[k]; k = static_cast<std::size_t>(images_[k]))
            seen[k] = true;
    }
    return cycles;
}

int Permutation::sign() const { return ((degree() - cycle_count()) % 2) ? -1 : 1; }

int Permutation::rank() const {
    int g = degree();
    int r = 0;
    for (int i = 0; i < g; ++i) {
        int smaller = 0;
        for (int k = i + 1; k < g; ++k)
            if (images_[static_cast<std::size_t>(k)] < images_[static_cast<std::size_t>(i)])
                ++smaller;
        r += smaller * static_cast<int>(factorial(g - 1 - i));
    }
    return r;
}

Permutation Permutation::unrank(int g, int r) {
    std::vector<int> pool(static_cast<std::size_t>(g));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> im;
    for (int i = 0; i < g; ++i) {
        long f = factorial(g - 1 - i);
        auto idx = static_cast<std::size_t>(r / f);
        r = static_cast<int>(r % f);
        im.push_back(pool[idx]);
        pool.erase(pool.begin() + static_cast<long>(idx));
    }
    Permutation p;
    p.images_ = std::move(im);
    return p;
}

std::string Permutation::to_cycle_string() const {
    std::ostringstream os;
    std::vector<bool> seen(images_.size(), false);
    bool any = false;
    for (std::size_t i = 0; i < images_.size(); ++i) {
        if (seen[i] || images_[i] == static_cast<int>(i)) {
            seen[i] = true;
            continue;
        }
        os << '(';
        bool first = true;
        for (std::size_t k = i; !seen[k]; k = static_cast<std::size_t>(images_[k])) {
            seen[k] = true;
            os << (first ? "" : ",") << k + 1;
            first = false;
        }
        os << ')';
        any = true;
    }
    return any ? os.str() : "e";
}

// ---------------------------------------------------------------- multiplication tables

namespace {

struct Tables {
    int n = 0;
    std::vector<Permutation> perms;
    std::vector<std::uint16_t> mul; // mul[a*n+b] = rank(perm a * perm b)
};

const Tables &tables(int g) {
    static std::mutex mu;
    static std::map<int, Tables> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(g);
    if (it != cache.end())
        return it->second;
    if (g < 1 || g > 7)
        throw ScopeError("group ring arithmetic supported for 1 <= g <= 7");
    Tables t;
    t.n = static_cast<int>(factorial(g));
    for (int r = 0; r < t.n; ++r)
        t.perms.push_back(Permutation::unrank(g, r));
    t.mul.resize(static_cast<std::size_t>(t.n) * static_cast<std::size_t>(t.n));
    for (int a = 0; a < t.n; ++a)
        for (int b = 0; b < t.n; ++b)
            t.mul[static_cast<std::size_t>(a) * static_cast<std::size_t>(t.n) + static_cast<std::size_t>(b)] =
                static_cast<std::uint16_t>((t.perms[static_cast<std::size_t>(a)] * t.perms[static_cast<std::size_t>(b)]).rank());
    return cache.emplace(g, std::move(t)).first->second;
}

} // namespace

// ---------------------------------------------------------------- Partition / tableaux

int Partition::size() const { return std::accumulate(parts.begin(), parts.end(), 0); }

bool Partition::valid() const {
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] <= 0)
            return false;
        if (i && parts[i] > parts[i - 1])
            return false;
    }
    return true;
}

std::string Partition::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < parts.size(); ++i)
        os << (i ? "," : "") << parts[i];
    os << ']';
    return os.str();
}

namespace {
void partitions_rec(int remaining, int maxpart, std::vector<int> &cur, std::vector<Partition> &out) {
    if (remaining == 0) {
        out.push_back({cur});
        return;
    }
    for (int p = std::min(remaining, maxpart); p >= 1; --p) {
        cur.push_back(p);
        partitions_rec(remaining - p, p, cur, out);
        cur.pop_back();
    }
}
} // namespace

std::vector<Partition> partitions_in_catalog_order(int g) {
    if (g == 6)
        return {{{6}},       {{5, 1}},       {{4, 2}},          {{4, 1, 1}}, {{3, 3}}, {{3, 2, 1}},
                {{2, 2, 2}}, {{3, 1, 1, 1}}, {{2, 2, 1, 1}}, {{2, 1, 1, 1, 1}}, {{1, 1, 1, 1, 1, 1}}};
    std::vector<Partition> out;
    std::vector<int> cur;
    partitions_rec(g, g, cur, out);
    return out;
}

Partition YoungTableau::shape() const {
    Partition p;
    for (const auto &r : rows)
        p.parts.push_back(static_cast<int>(r.size()));
    return p;
}

int YoungTableau::size() const {
    int n = 0;
    for (const auto &r : rows)
        n += static_cast<int>(r.size());
    return n;
}

bool YoungTableau::is_standard() const {
    if (!shape().valid())
        return false;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c && rows[r][c] <= rows[r][c - 1])
                return false;
            if (r && rows[r][c] <= rows[r - 1][c])
                return false;
        }
    return true;
}

std::pair<int, int> YoungTableau::position(int entry) const {
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            if (rows[r][c] == entry)
                return {static_cast<int>(r), static_cast<int>(c)};
    throw Error("entry " + std::to_string(entry) + " not in tableau " + to_string());
}

int YoungTableau::content(int entry) const {
    auto [r, c] = position(entry);
    return c - r;
}

std::vector<int> YoungTableau::reading_word() const {
    std::vector<int> w;
    for (const auto &r : rows)
        w.insert(w.end(), r.begin(), r.end());
    return w;
}

YoungTableau YoungTableau::restricted() const {
    YoungTableau t = *this;
    int big = size();
    for (auto &r : t.rows)
        r.erase(std::remove(r.begin(), r.end(), big), r.end());
    while (!t.rows.empty() && t.rows.back().empty())
        t.rows.pop_back();
    return t;
}

YoungTableau YoungTableau::extended(int row) const {
    YoungTableau t = *this;
    if (row == static_cast<int>(t.rows.size()))
        t.rows.emplace_back();
    t.rows.at(static_cast<std::size_t>(row)).push_back(size() + 1);
    return t;
}

std::string YoungTableau::to_string() const {
    std::ostringstream os;
    bool wide = size() >= 10;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r)
            os << '/';
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            os << (wide && c ? "," : "") << rows[r][c];
    }
    return os.str();
}

YoungTableau YoungTableau::parse(const std::string &text) {
    YoungTableau t;
    t.rows.emplace_back();
    bool commas = text.find(',') != std::string::npos;
    int acc = -1;
    auto flush = [&] {
        if (acc >= 0)
            t.rows.back().push_back(acc);
        acc = -1;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (ch == '/') {
            flush();
            t.rows.emplace_back();
        } else if (ch == ',') {
            flush();
        } else if (ch >= '0' && ch <= '9') {
            if (commas)
                acc = (acc < 0 ? 0 : acc * 10) + (ch - '0');
            else
                t.rows.back().push_back(ch - '0');
        } else {
            throw ParseError("invalid character in tableau '" + text + "'", i);
        }
    }
    flush();
    return t;
}

namespace {
void syt_rec(const Partition &shape, YoungTableau &cur, int next, std::vector<YoungTableau> &out) {
    if (next > shape.size()) {
        out.push_back(cur);
        return;
    }
    for (std::size_t r = 0; r < shape.parts.size(); ++r) {
        int len = r < cur.rows.size() ? static_cast<int>(cur.rows[r].size()) : 0;
        if (len >= shape.parts[r])
            continue;
        int above = r == 0 ? shape.parts[0] : static_cast<int>(cur.rows[r - 1].size());
        if (r > 0 && len >= above)
            continue;
        if (r == cur.rows.size())
            cur.rows.emplace_back();
        cur.rows[r].push_back(next);
        syt_rec(shape, cur, next + 1, out);
        cur.rows[r].pop_back();
        if (cur.rows[r].empty() && r + 1 == cur.rows.size())
            cur.rows.pop_back();
        if (r == cur.rows.size())
            break;
    }
}
} // namespace

std::vector<YoungTableau> standard_tableaux(const Partition &shape) {
    if (!shape.valid())
        throw Error("invalid partition " + shape.to_string());
    std::vector<YoungTableau> out;
    YoungTableau cur;
    syt_rec(shape, cur, 1, out);
    std::sort(out.begin(), out.end(), [](const YoungTableau &a, const YoungTableau &b) {
        return a.reading_word() < b.reading_word();
    });
    return out;
}

const std::vector<YoungTableau> &tableau_catalog(int g) {
    static std::mutex mu;
    static std::map<int, std::vector<YoungTableau>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(g);
    if (it != cache.end())
        return it->second;
    std::vector<YoungTableau> all;
    for (const auto &p : partitions_in_catalog_order(g)) {
        auto s = standard_tableaux(p);
        all.insert(all.end(), s.begin(), s.end());
    }
    return cache.emplace(g, std::move(all)).first->second;
}

int tableau_index(const YoungTableau &tau) {
    const auto &cat = tableau_catalog(tau.size());
    for (std::size_t i = 0; i < cat.size(); ++i)
        if (cat[i] == tau)
            return static_cast<int>(i) + 1;
    throw Error("tableau " + tau.to_string() + " is not standard");
}

long count_standard(const Partition &shape) {
    // hook length formula
    int n = shape.size();
    long num = factorial(n);
    long den = 1;
    for (std::size_t r = 0; r < shape.parts.size(); ++r)
        for (int c = 0; c < shape.parts[r]; ++c) {
            int arm = shape.parts[r] - c - 1;
            int leg = 0;
            for (std::size_t k = r + 1; k < shape.parts.size(); ++k)
                if (shape.parts[k] > c)
                    ++leg;
            den *= arm + leg + 1;
        }
    return num / den;
}

int axial_distance(const YoungTableau &tau, int a) {
    auto [ra, ca] = tau.position(a);
    auto [rb, cb] = tau.position(a + 1);
    return (rb - ra) + (ca - cb);
}

// ---------------------------------------------------------------- group ring

GroupRingElement::GroupRingElement(int g) : g_(g), coeffs_(static_cast<std::size_t>(factorial(g))) {}

GroupRingElement GroupRingElement::from_permutation(const Permutation &p, const mpq_class &c) {
    GroupRingElement x(p.degree());
    x.set(p, c);
    return x;
}

std::size_t GroupRingElement::support_size() const {
    std::size_t n = 0;
    for (const auto &c : coeffs_)
        if (c != 0)
            ++n;
    return n;
}

bool GroupRingElement::is_zero() const { return support_size() == 0; }

GroupRingElement GroupRingElement::operator+(const GroupRingElement &o) const {
    if (g_ != o.g_)
        throw DimensionError("group ring degrees differ");
    GroupRingElement r = *this;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        r.coeffs_[i] += o.coeffs_[i];
    return r;
}

GroupRingElement GroupRingElement::operator-(const GroupRingElement &o) const { return *this + o * mpq_class(-1); }

GroupRingElement GroupRingElement::operator*(const mpq_class &s) const {
    GroupRingElement r = *this;
    for (auto &c : r.coeffs_)
        c *= s;
    return r;
}

GroupRingElement GroupRingElement::operator*(const GroupRingElement &o) const {
    if (g_ != o.g_)
        throw DimensionError("group ring degrees differ");
    const Tables &t = tables(g_);
    auto n = static_cast<std::size_t>(t.n);
    GroupRingElement r(g_);
    std::vector<std::size_t> sa, sb;
    for (std::size_t i = 0; i < n; ++i) {
        if (coeffs_[i] != 0)
            sa.push_back(i);
        if (o.coeffs_[i] != 0)
            sb.push_back(i);
    }
    mpq_class tmp;
    for (auto a : sa)
        for (auto b : sb) {
            mpq_mul(tmp.get_mpq_t(), coeffs_[a].get_mpq_t(), o.coeffs_[b].get_mpq_t());
            auto &dst = r.coeffs_[t.mul[a * n + b]];
            mpq_add(dst.get_mpq_t(), dst.get_mpq_t(), tmp.get_mpq_t());
        }
    return r;
}

std::vector<std::pair<Permutation, mpq_class>> GroupRingElement::terms() const {
    std::vector<std::pair<Permutation, mpq_class>> out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (coeffs_[i] != 0)
            out.emplace_back(Permutation::unrank(g_, static_cast<int>(i)), coeffs_[i]);
    return out;
}

std::string GroupRingElement::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto &[p, c] : terms()) {
        if (!first)
            os << (c > 0 ? " + " : " - ");
        else if (c < 0)
            os << "-";
        mpq_class a = abs(c);
        if (a != 1)
            os << a.get_str() << "*";
        os << p.to_cycle_string();
        first = false;
    }
    return first ? "0" : os.str();
}

namespace {
// all permutations of {1..g} fixing every set in `blocks` setwise
std::vector<Permutation> block_permutations(int g, const std::vector<std::vector<int>> &blocks) {
    std::vector<Permutation> out{Permutation::identity(g)};
    for (const auto &blk : blocks) {
        if (blk.size() < 2)
            continue;
        std::vector<int> img = blk;
        std::sort(img.begin(), img.end());
        std::vector<Permutation> local;
        do {
            auto im = Permutation::identity(g).images0();
            for (std::size_t i = 0; i < blk.size(); ++i) {
                std::vector<int> sorted = blk;
                std::sort(sorted.begin(), sorted.end());
                im[static_cast<std::size_t>(sorted[i] - 1)] = img[i] - 1;
            }
            local.emplace_back(im);
        } while (std::next_permutation(img.begin(), img.end()));
        std::vector<Permutation> next;
        for (const auto &a : out)
            for (const auto &b : local)
                next.push_back(a * b);
        out = std::move(next);
    }
    return out;
}

std::vector<std::vector<int>> columns_of(const YoungTableau &tau) {
    std::vector<std::vector<int>> cols;
    for (const auto &r : tau.rows)
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (cols.size() <= c)
                cols.emplace_back();
            cols[c].push_back(r[c]);
        }
    return cols;
}
} // namespace

GroupRingElement row_symmetrizer(const YoungTableau &tau) {
    GroupRingElement h(tau.size());
    for (const auto &p : block_permutations(tau.size(), tau.rows))
        h.add(p, 1);
    return h;
}

GroupRingElement column_antisymmetrizer(const YoungTableau &tau) {
    GroupRingElement v(tau.size());
    for (const auto &p : block_permutations(tau.size(), columns_of(tau)))
        v.add(p, p.sign());
    return v;
}

GroupRingElement young_symmetrizer(const YoungTableau &tau) {
    int g = tau.size();
    mpq_class f(count_standard(tau.shape()), factorial(g));
    f.canonicalize();
    return row_symmetrizer(tau) * column_antisymmetrizer(tau) * f;
}

GroupRingElement central_idempotent(const Partition &shape) {
    int g = shape.size();
    auto base = standard_tableaux(shape).front();
    mpq_class f(count_standard(shape), factorial(g));
    f.canonicalize();
    GroupRingElement sum(g);
    for (int r = 0; r < factorial(g); ++r) {
        auto p = Permutation::unrank(g, r);
        YoungTableau t = base;
        for (auto &row : t.rows)
            for (auto &e : row)
                e = p(e);
        sum = sum + young_symmetrizer(t);
    }
    return sum * f;
}

bool idempotent_scale(const GroupRingElement &x, mpq_class &c) {
    auto sq = x * x;
    int g = x.degree();
    int n = static_cast<int>(factorial(g));
    int k = -1;
    for (int i = 0; i < n; ++i)
        if (x.coeff_at(i) != 0) {
            k = i;
            break;
        }
    if (k < 0)
        return false;
    c = sq.coeff_at(k) / x.coeff_at(k);
    if (c == 0)
        return false;
    for (int i = 0; i < n; ++i)
        if (sq.coeff_at(i) != c * x.coeff_at(i))
            return false;
    return true;
}

// ---------------------------------------------------------------- projectors

namespace {
YoungTableau swapped(const YoungTableau &t, int a) {
    YoungTableau s = t;
    for (auto &r : s.rows)
        for (auto &e : r) {
            if (e == a)
                e = a + 1;
            else if (e == a + 1)
                e = a;
        }
    return s;
}
} // namespace

std::vector<Projector> orthogonalized_projectors(const Partition &shape) {
    auto taus = standard_tableaux(shape);
    int g = shape.size();
    std::vector<Projector> out;
    for (std::size_t p = 0; p < taus.size(); ++p) {
        Projector pr;
        pr.tableau = taus[p];
        pr.index = tableau_index(taus[p]);
        if (p == 0) {
            pr.element = young_symmetrizer(taus[p]);
            out.push_back(std::move(pr));
            continue;
        }
        // earliest predecessor that differs by exchanging a and a+1
        std::size_t t = p;
        int a = 0;
        for (std::size_t q = 0; q < p && t == p; ++q)
            for (int x = 1; x < g; ++x)
                if (swapped(taus[q], x) == taus[p]) {
                    t = q;
                    a = x;
                    break;
                }
        if (t == p)
            throw Error("no predecessor tableau for " + taus[p].to_string());
        int d = axial_distance(taus[t], a);
        GroupRingElement step = GroupRingElement::from_permutation(Permutation::transposition(g, a, a + 1), d) +
                                GroupRingElement::from_permutation(Permutation::identity(g));
        GroupRingElement raw = step * out[t].element;
        pr.parent = out[t].index;
        pr.a = a;
        pr.distance = d;
        mpq_class c;
        if (idempotent_scale(raw, c)) {
            pr.element = raw * (1 / c);
        } else {
            pr.element = raw;
            pr.status = ProjectorStatus::corrupted;
        }
        out.push_back(std::move(pr));
    }
    return out;
}

const std::vector<Projector> &projector_catalog(int g) {
    static std::mutex mu;
    static std::map<int, std::vector<Projector>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(g);
        if (it != cache.end())
            return it->second;
    }
    std::vector<Projector> all;
    for (const auto &p : partitions_in_catalog_order(g)) {
        auto s = orthogonalized_projectors(p);
        all.insert(all.end(), s.begin(), s.end());
    }
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(g, std::move(all)).first->second;
}

// ---------------------------------------------------------------- Upsilon

namespace {
std::vector<Eigen::Index> factor_index_map(const Permutation &p, int d) {
    int g = p.degree();
    Eigen::Index n = 1;
    for (int i = 0; i < g; ++i)
        n *= d;
    std::vector<Eigen::Index> map(static_cast<std::size_t>(n));
    std::vector<int> digits(static_cast<std::size_t>(g)), src(static_cast<std::size_t>(g));
    const auto &im = p.images0();
    for (Eigen::Index idx = 0; idx < n; ++idx) {
        Eigen::Index v = idx;
        for (int k = g - 1; k >= 0; --k) {
            digits[static_cast<std::size_t>(k)] = static_cast<int>(v % d);
            v /= d;
        }
        Eigen::Index s = 0;
        for (int k = 0; k < g; ++k)
            s = s * d + digits[static_cast<std::size_t>(im[static_cast<std::size_t>(k)])];
        map[static_cast<std::size_t>(idx)] = s;
    }
    return map;
}
} // namespace

Matrix upsilon_apply(const Permutation &p, const Matrix &a, int local_dim) {
    auto map = factor_index_map(p, local_dim);
    if (static_cast<Eigen::Index>(map.size()) != a.rows())
        throw DimensionError("operator dimension does not match g factors of dimension " + std::to_string(local_dim));
    Matrix out(a.rows(), a.cols());
    for (Eigen::Index c = 0; c < a.cols(); ++c)
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            out(r, c) = a(map[static_cast<std::size_t>(r)], map[static_cast<std::size_t>(c)]);
    return out;
}

Operator upsilon_apply(const Permutation &p, const Operator &a) {
    const auto &sys = a.system();
    if (!sys.uniform())
        throw DimensionError("upsilon_apply needs equal spin numbers on all factors");
    if (static_cast<int>(sys.size()) != p.degree())
        throw DimensionError("permutation degree does not match the number of spins");
    return Operator(sys, upsilon_apply(p, a.matrix(), sys.local_dim(0)));
}

Operator upsilon_apply(const GroupRingElement &x, const Operator &a) {
    Operator out = Operator::zero(a.system());
    Matrix acc = Matrix::Zero(a.matrix().rows(), a.matrix().cols());
    for (const auto &[p, c] : x.terms())
        acc += upsilon_apply(p, a).matrix() * c.get_d();
    return Operator(a.system(), std::move(acc));
}

namespace {
using u64 = std::uint64_t;
int rank_mod_p(std::vector<std::vector<u64>> m, u64 prime) {
    auto mulmod = [prime](u64 x, u64 y) { return static_cast<u64>((static_cast<unsigned __int128>(x) * y) % prime); };
    auto powmod = [&](u64 b, u64 e) {
        u64 r = 1;
        while (e) {
            if (e & 1)
                r = mulmod(r, b);
            b = mulmod(b, b);
            e >>= 1;
        }
        return r;
    };
    std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t piv = row;
        while (piv < rows && m[piv][col] == 0)
            ++piv;
        if (piv == rows)
            continue;
        std::swap(m[piv], m[row]);
        u64 inv = powmod(m[row][col], prime - 2);
        for (std::size_t k = col; k < cols; ++k)
            m[row][k] = mulmod(m[row][k], inv);
        for (std::size_t r = row + 1; r < rows; ++r) {
            u64 f = m[r][col];
            if (!f)
                continue;
            for (std::size_t k = col; k < cols; ++k)
                m[r][k] = (m[r][k] + prime - mulmod(f, m[row][k])) % prime;
        }
        ++row;
        ++rank;
    }
    return rank;
}
} // namespace

int upsilon_kernel_dim(int g, HalfInteger J) {
    if (g < 1 || g > 6)
        throw ScopeError("upsilon_kernel_dim supports 1 <= g <= 6");
    const Tables &t = tables(g);
    auto n = static_cast<std::size_t>(t.n);
    u64 d2 = static_cast<u64>(J.twice() + 1) * static_cast<u64>(J.twice() + 1);
    std::vector<u64> by_cycles(static_cast<std::size_t>(g) + 1, 1);
    for (int c = 1; c <= g; ++c)
        by_cycles[static_cast<std::size_t>(c)] = by_cycles[static_cast<std::size_t>(c) - 1] * d2;
    std::vector<int> cycles(n), inverse(n);
    for (std::size_t i = 0; i < n; ++i) {
        cycles[i] = t.perms[i].cycle_count();
        inverse[i] = t.perms[i].inverse().rank();
    }
    int best = 0;
    for (u64 prime : {2305843009213693951ULL, 4611686018427387847ULL, 1000000007ULL}) {
        std::vector<std::vector<u64>> gram(n, std::vector<u64>(n));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                auto prod = t.mul[static_cast<std::size_t>(inverse[a]) * n + b];
                gram[a][b] = by_cycles[static_cast<std::size_t>(cycles[prod])] % prime;
            }
        best = std::max(best, rank_mod_p(std::move(gram), prime));
        if (best == t.n)
            break;
    }
    return t.n - best;
}

std::vector<std::pair<int, int>> symmetrizer_orthogonality_pairs(int g) {
    const Tables &t = tables(g);
    auto n = static_cast<std::size_t>(t.n);
    const auto &cat = tableau_catalog(g);
    // integer H*V; e_tau differs by a nonzero scalar only
    std::vector<std::vector<std::pair<std::size_t, long>>> hv;
    for (const auto &tau : cat) {
        auto e = row_symmetrizer(tau) * column_antisymmetrizer(tau);
        std::vector<std::pair<std::size_t, long>> sparse;
        for (std::size_t i = 0; i < n; ++i)
            if (e.coeff_at(static_cast<int>(i)) != 0)
                sparse.emplace_back(i, e.coeff_at(static_cast<int>(i)).get_num().get_si());
        hv.push_back(std::move(sparse));
    }
    std::vector<std::pair<int, int>> out;
    std::vector<long> acc(n);
    for (std::size_t a = 0; a < cat.size(); ++a)
        for (std::size_t b = 0; b < cat.size(); ++b) {
            if (a == b)
                continue;
            std::fill(acc.begin(), acc.end(), 0);
            for (const auto &[ia, ca] : hv[a])
                for (const auto &[ib, cb] : hv[b])
                    acc[t.mul[ia * n + ib]] += ca * cb;
            if (std::any_of(acc.begin(), acc.end(), [](long v) { return v != 0; }))
                out.emplace_back(static_cast<int>(a) + 1, static_cast<int>(b) + 1);
        }
    return out;
}

// ---------------------------------------------------------------- diagnostics

bool shape_carries_tensors(const Partition &shape, HalfInteger J) {
    int d = J.twice() + 1;
    return static_cast<int>(shape.parts.size()) <= d * d - 1;
}

Diagnostics diagnose(int g) {
    if (g < 1 || g > 6)
        throw ScopeError("diagnose supports 1 <= g <= 6, got " + std::to_string(g));
    Diagnostics d;
    d.g = g;
    d.projectors = projector_catalog(g);
    auto half = HalfInteger::from_twice(1);
    const auto &cat = tableau_catalog(g);
    auto relevant = [&](int idx) {
        return shape_carries_tensors(cat[static_cast<std::size_t>(idx - 1)].shape(), half);
    };
    for (const auto &p : d.projectors)
        if (p.status == ProjectorStatus::corrupted) {
            d.corrupted_all.push_back(p.index);
            if (relevant(p.index))
                d.corrupted.push_back(p.index);
        }
    d.kernel_dim = upsilon_kernel_dim(g, half);
    d.pairs_all = symmetrizer_orthogonality_pairs(g);
    for (const auto &pr : d.pairs_all)
        if (relevant(pr.first) && relevant(pr.second))
            d.pairs.push_back(pr);
    return d;
}

nlohmann::json diagnostics_to_json(const Diagnostics &d) {
    nlohmann::json projs = nlohmann::json::array();
    for (const auto &p : d.projectors)
        projs.push_back({{"index", p.index},
                         {"tableau", p.tableau.to_string()},
                         {"shape", p.tableau.shape().parts},
                         {"status", p.status == ProjectorStatus::ok ? "ok" : "corrupted"}});
    auto pair_list = [](const std::vector<std::pair<int, int>> &v) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto &[a, b] : v)
            out.push_back({a, b});
        return out;
    };
    return {{"schema", "spindrops.diagnostics/1"},
            {"g", d.g},
            {"projectors", projs},
            {"corrupted", d.corrupted},
            {"corrupted_all_shapes", d.corrupted_all},
            {"upsilon_kernel_dim", d.kernel_dim},
            {"nonorthogonal_pairs", pair_list(d.pairs)},
            {"nonorthogonal_pairs_all_shapes", pair_list(d.pairs_all)}};
}

std::string diagnostics_to_text(const Diagnostics &d) {
    std::ostringstream os;
    os << "g = " << d.g << "\n";
    std::string shape;
    for (const auto &p : d.projectors) {
        auto s = p.tableau.shape().to_string();
        if (s != shape) {
            os << "shape " << s << "\n";
            shape = s;
        }
        os << "  tau" << p.index << "  " << p.tableau.to_string() << "  "
           << (p.status == ProjectorStatus::ok ? "ok" : "CORRUPTED") << "\n";
    }
    auto list = [&](const char *title, const std::vector<int> &v) {
        os << title;
        if (v.empty())
            os << " none";
        for (int i : v)
            os << " tau" << i;
        os << "\n";
    };
    auto pairs = [&](const char *title, const std::vector<std::pair<int, int>> &v) {
        os << title << " (" << v.size() << "):";
        for (const auto &[a, b] : v)
            os << " (tau" << a << ",tau" << b << ")";
        os << "\n";
    };
    list("corrupted (tensor-carrying shapes):", d.corrupted);
    list("corrupted (all shapes):", d.corrupted_all);
    os << "upsilon kernel dimension: " << d.kernel_dim << "\n";
    pairs("non-orthogonal symmetrizer pairs (tensor-carrying shapes)", d.pairs);
    pairs("non-orthogonal symmetrizer pairs (all shapes)", d.pairs_all);
    return os.str();
}

} // namespace spindrops::symgroup
