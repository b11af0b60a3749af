#include "spindrops/spin_system.hpp"

#include <sstream>

namespace spindrops {

SpinSystem::SpinSystem(std::vector<HalfInteger> spins) : spins_(std::move(spins)) {
    dim_ = 1;
    for (auto j : spins_) {
        if (j.twice() < 0)
            throw Error("spin numbers must be non-negative, got " + j.to_string());
        dim_ *= static_cast<std::size_t>(j.twice() + 1);
    }
}

SpinSystem SpinSystem::qubits(int n) {
    return SpinSystem(std::vector<HalfInteger>(static_cast<std::size_t>(n), HalfInteger::from_twice(1)));
}

SpinSystem SpinSystem::parse(const std::string &text) {
    std::vector<HalfInteger> spins;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            spins.push_back(HalfInteger::parse(piece));
        } catch (const ParseError &e) {
            throw ParseError("invalid spin list '" + text + "'", start + e.position());
        }
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    if (spins.empty())
        throw ParseError("empty spin list", 0);
    return SpinSystem(std::move(spins));
}

std::vector<int> SpinSystem::local_dims() const {
    std::vector<int> d;
    for (auto j : spins_)
        d.push_back(j.twice() + 1);
    return d;
}

bool SpinSystem::all_spin_half() const {
    for (auto j : spins_)
        if (j.twice() != 1)
            return false;
    return true;
}

bool SpinSystem::uniform() const {
    for (auto j : spins_)
        if (j != spins_.front())
            return false;
    return true;
}

SpinSystem SpinSystem::subsystem(const std::vector<int> &sites) const {
    std::vector<HalfInteger> s;
    for (int k : sites)
        s.push_back(spins_.at(static_cast<std::size_t>(k)));
    return SpinSystem(std::move(s));
}

std::string SpinSystem::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < spins_.size(); ++i)
        os << (i ? "," : "") << spins_[i].to_string();
    return os.str();
}

} // namespace spindrops
