#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spindrops/half_integer.hpp"

namespace spindrops {

/// Ordered list of spin numbers of a coupled spin system.
class SpinSystem {
  public:
    SpinSystem() = default;
    explicit SpinSystem(std::vector<HalfInteger> spins);

    /// N spins 1/2.
    static SpinSystem qubits(int n);
    /// Comma separated list such as "1/2,1/2,1".
    static SpinSystem parse(const std::string &text);

    const std::vector<HalfInteger> &spins() const { return spins_; }
    std::size_t size() const { return spins_.size(); }
    HalfInteger spin(std::size_t site) const { return spins_.at(site); }
    /// Local dimension 2J+1 of a 0-based site.
    int local_dim(std::size_t site) const { return spins_.at(site).twice() + 1; }
    std::vector<int> local_dims() const;
    std::size_t dim() const { return dim_; }

    bool all_spin_half() const;
    bool uniform() const;

    /// Subsystem formed by the given 0-based sites, in that order.
    SpinSystem subsystem(const std::vector<int> &sites) const;

    std::string to_string() const;

    bool operator==(const SpinSystem &o) const { return spins_ == o.spins_; }
    bool operator!=(const SpinSystem &o) const { return !(*this == o); }

  private:
    std::vector<HalfInteger> spins_;
    std::size_t dim_ = 1;
};

} // namespace spindrops
