#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <gmpxx.h>

#include "spindrops/symgroup.hpp"

namespace spindrops::lisa {

/// Exact signed square root sign * sqrt(square).
struct Surd {
    int sign = 0;
    mpq_class square = 0;
    double value() const;
    /// Parses "5/8" (= sqrt(5/8)), "-3/8", "1", "-1", "0".
    static Surd parse(const std::string &text);
};

struct CfpRow {
    symgroup::Partition shape; ///< output shape
    int adhoc = 0;             ///< 0 none, 1 = I, 2 = II
    std::vector<Surd> coeffs;  ///< one per input rank
};

/// One CFP block: target rank j, parent shape, input ranks (columns) and output rows.
struct CfpBlock {
    int g = 0;
    int j = 0;
    symgroup::Partition parent_shape;
    std::vector<int> input_ranks;
    std::vector<CfpRow> rows;
};

/// Fractional parentage blocks for spins 1/2, 2 <= g <= 6.
class CfpTable {
  public:
    static const CfpTable &builtin();

    /// Throws naming the block if it is absent.
    const CfpBlock &block(int g, int j, const symgroup::Partition &parent_shape) const;
    bool has_block(int g, int j, const symgroup::Partition &parent_shape) const;
    const std::vector<CfpBlock> &blocks() const { return blocks_; }

    /// Assembled dimension of CFP^g: block sizes weighted by the parent-shape tableau count.
    long assembled_dimension(int g) const;
    /// Exact row-orthonormality of one block.
    static bool rows_orthonormal(const CfpBlock &b);
    /// FNV-1a hash of the transcribed table text.
    static std::uint64_t checksum();

  private:
    std::vector<CfpBlock> blocks_;
    std::map<std::tuple<int, int, std::vector<int>>, std::size_t> index_;
};

/// Exact test whether sum_i sign_i sqrt(q_i) vanishes.
bool surd_sum_is_zero(const std::vector<Surd> &terms);
/// Exact value of sum_i a_i b_i for surds; returns false if the result is irrational and sets nothing.
bool surd_dot_rational(const std::vector<Surd> &a, const std::vector<Surd> &b, mpq_class &out);

} // namespace spindrops::lisa
