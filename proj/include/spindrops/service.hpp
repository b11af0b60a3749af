#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "spindrops/drops.hpp"
#include "spindrops/dynamics.hpp"
#include "spindrops/lisa.hpp"

namespace httplib {
class Server;
}

namespace spindrops::service {

struct Response {
    int status = 200;
    nlohmann::json body;
};

/// Live simulation state. Writers are serialized by write_mu; readers copy under state_mu.
struct Session {
    std::string id;
    SpinSystem system;
    dynamics::HamiltonianSpec hamiltonian_spec;
    std::string rho0;
    std::unique_ptr<dynamics::FreeEvolution> evolution;

    std::mutex write_mu;
    mutable std::shared_mutex state_mu;
    Operator rho;
    double time = 0;
    std::uint64_t version = 0;
    std::vector<nlohmann::json> log;

    std::once_flag basis_once;
    std::shared_ptr<const lisa::LisaBasis> basis;
};

/// Small LRU of droplet payloads keyed by (state hash, grid, scaling).
class MeshCache {
  public:
    explicit MeshCache(std::size_t capacity) : capacity_(capacity) {}
    bool get(const std::string &key, nlohmann::json &out);
    void put(const std::string &key, const nlohmann::json &value);
    std::size_t size() const;

  private:
    std::size_t capacity_;
    mutable std::mutex mu_;
    std::list<std::pair<std::string, nlohmann::json>> items_;
    std::unordered_map<std::string, std::list<std::pair<std::string, nlohmann::json>>::iterator> index_;
};

/// FNV-1a over the bit patterns of a state matrix.
std::uint64_t state_hash(const Operator &rho);

/// Pure request handlers; the HTTP layer only routes to these.
class SessionStore {
  public:
    explicit SessionStore(std::size_t mesh_cache_capacity = 32) : cache_(mesh_cache_capacity) {}

    Response create(const nlohmann::json &body);
    Response list() const;
    Response get(const std::string &id) const;
    Response remove(const std::string &id);
    Response pulse(const std::string &id, const nlohmann::json &body);
    Response delay(const std::string &id, const nlohmann::json &body);
    Response reset(const std::string &id, const nlohmann::json &body);
    Response log(const std::string &id) const;
    Response expectation(const std::string &id, const nlohmann::json &body) const;
    /// grid "64x128", scaling raw|density; meshes=false returns coefficients only.
    Response droplets(const std::string &id, const std::string &grid, const std::string &scaling,
                      bool meshes = true, bool include_zero = false);

    nlohmann::json save() const;
    void load(const nlohmann::json &doc);

    const MeshCache &cache() const { return cache_; }

  private:
    std::shared_ptr<Session> find(const std::string &id) const;
    std::shared_ptr<const lisa::LisaBasis> basis_of(Session &s) const;
    nlohmann::json summary(Session &s) const;
    Response mutate(const std::string &id, const nlohmann::json &event);
    void apply(Session &s, const nlohmann::json &event);

    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
    MeshCache cache_;
};

/// Parse "64x128".
std::pair<int, int> parse_grid(const std::string &grid);

/// Register every endpoint on an httplib server; origin is sent in CORS headers.
void register_routes(httplib::Server &server, SessionStore &store, const std::string &cors_origin = "*");

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors_origin = "*";
    std::string state_file; ///< loaded at start and written on shutdown when set
};

/// Blocks until SIGINT/SIGTERM.
int serve(const ServeOptions &options);

} // namespace spindrops::service
