#include "spindrops/service.hpp"

#include <csignal>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "spindrops/error.hpp"
#include "spindrops/opexpr.hpp"

namespace spindrops::service {

namespace {

Response error_response(int status, const std::string &kind, const std::string &message) {
    return {status, {{"error", kind}, {"message", message}}};
}

template <class F>
Response guarded(F &&f) {
    try {
        return f();
    } catch (const ParseError &e) {
        Response r = error_response(422, "parse", e.what());
        r.body["position"] = e.position();
        return r;
    } catch (const ScopeError &e) {
        return error_response(422, "scope", e.what());
    } catch (const SchemaError &e) {
        return error_response(422, "schema", e.what());
    } catch (const DimensionError &e) {
        return error_response(422, "dimension", e.what());
    } catch (const nlohmann::json::exception &e) {
        return error_response(422, "schema", e.what());
    } catch (const Error &e) {
        return error_response(422, "invalid", e.what());
    }
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SpinSystem system_from_json(const nlohmann::json &j) {
    if (j.is_string())
        return SpinSystem::parse(j.get<std::string>());
    if (j.is_array()) {
        std::vector<HalfInteger> spins;
        for (const auto &s : j) {
            if (s.is_string())
                spins.push_back(HalfInteger::parse(s.get<std::string>()));
            else if (s.is_number())
                spins.push_back(HalfInteger::from_twice(static_cast<int>(std::lround(2 * s.get<double>()))));
            else
                throw SchemaError("spin numbers must be strings or numbers");
        }
        return SpinSystem(spins);
    }
    throw SchemaError("'spins' must be a string such as \"1/2,1\" or an array");
}

nlohmann::json require_object(const nlohmann::json &body) {
    if (body.is_null())
        return nlohmann::json::object();
    if (!body.is_object())
        throw SchemaError("payload must be a JSON object");
    return body;
}

} // namespace

bool MeshCache::get(const std::string &key, nlohmann::json &out) {
    std::lock_guard lock(mu_);
    auto it = index_.find(key);
    if (it == index_.end())
        return false;
    items_.splice(items_.begin(), items_, it->second);
    out = it->second->second;
    return true;
}

void MeshCache::put(const std::string &key, const nlohmann::json &value) {
    if (capacity_ == 0)
        return;
    std::lock_guard lock(mu_);
    auto it = index_.find(key);
    if (it != index_.end()) {
        it->second->second = value;
        items_.splice(items_.begin(), items_, it->second);
        return;
    }
    items_.emplace_front(key, value);
    index_[key] = items_.begin();
    while (items_.size() > capacity_) {
        index_.erase(items_.back().first);
        items_.pop_back();
    }
}

std::size_t MeshCache::size() const {
    std::lock_guard lock(mu_);
    return items_.size();
}

std::uint64_t state_hash(const Operator &rho) {
    std::uint64_t h = 14695981039346656037ULL;
    const auto *p = reinterpret_cast<const unsigned char *>(rho.matrix().data());
    std::size_t n = static_cast<std::size_t>(rho.matrix().size()) * sizeof(cplx);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    for (auto d : rho.system().local_dims()) {
        h ^= static_cast<std::uint64_t>(d);
        h *= 1099511628211ULL;
    }
    return h;
}

std::pair<int, int> parse_grid(const std::string &grid) {
    auto x = grid.find('x');
    if (x == std::string::npos)
        throw SchemaError("grid must look like 64x128");
    try {
        std::size_t a = 0, b = 0;
        int nt = std::stoi(grid.substr(0, x), &a);
        int np = std::stoi(grid.substr(x + 1), &b);
        if (a != x || b != grid.size() - x - 1 || nt < 2 || np < 1 || nt > 1024 || np > 2048)
            throw SchemaError("");
        return {nt, np};
    } catch (const std::exception &) {
        throw SchemaError("grid must look like 64x128 with 2 <= n_theta <= 1024 and 1 <= n_phi <= 2048");
    }
}

std::shared_ptr<Session> SessionStore::find(const std::string &id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<const lisa::LisaBasis> SessionStore::basis_of(Session &s) const {
    std::call_once(s.basis_once, [&] { s.basis = std::make_shared<lisa::LisaBasis>(lisa::build_basis(s.system)); });
    return s.basis;
}

nlohmann::json SessionStore::summary(Session &s) const {
    Operator rho;
    double time = 0;
    std::uint64_t version = 0;
    {
        std::shared_lock lock(s.state_mu);
        rho = s.rho;
        time = s.time;
        version = s.version;
    }
    auto basis = basis_of(s);
    nlohmann::json inventory = nlohmann::json::array();
    for (const auto &f : drops::decompose(rho, *basis))
        inventory.push_back({{"name", f.label.to_string()}, {"weight", f.weight()}, {"zero", f.zero}});
    cplx tr = rho.trace();
    return {{"schema", "spindrops.session/1"},
            {"session_id", s.id},
            {"system", s.system.to_string()},
            {"version", version},
            {"time", time},
            {"trace", {{"re", tr.real()}, {"im", tr.imag()}}},
            {"hs_norm", hs_norm(rho)},
            {"state_hash", hex64(state_hash(rho))},
            {"droplets", inventory}};
}

void SessionStore::apply(Session &s, const nlohmann::json &event) {
    auto type = event.at("type").get<std::string>();
    Operator next;
    double t = 0;
    {
        std::shared_lock lock(s.state_mu);
        next = s.rho;
        t = s.time;
    }
    nlohmann::json logged;
    if (type == "reset") {
        std::string text = event.value("rho0", s.rho0);
        next = opexpr::parse(text, s.system);
        t = 0;
        logged = {{"type", "reset"}, {"rho0", text}};
    } else {
        auto e = dynamics::event_from_json(event);
        for (int site : e.sites)
            if (site < 1 || site > static_cast<int>(s.system.size()))
                throw SchemaError("pulse site " + std::to_string(site) + " out of range");
        if (e.kind == dynamics::Event::Kind::pulse) {
            Operator u = dynamics::pulse_propagator(s.system, e.sites, e.axis, e.angle);
            next = u * next * u.dagger();
        } else if (e.kind == dynamics::Event::Kind::delay) {
            next = s.evolution->evolve(next, e.duration);
            t += e.duration;
        } else {
            throw SchemaError("sessions accept pulse, delay and reset events only");
        }
        logged = dynamics::event_to_json(e);
    }
    std::unique_lock lock(s.state_mu);
    s.rho = std::move(next);
    s.time = t;
    ++s.version;
    s.log.push_back(std::move(logged));
}

Response SessionStore::create(const nlohmann::json &raw) {
    return guarded([&]() -> Response {
        auto body = require_object(raw);
        auto s = std::make_shared<Session>();
        if (body.contains("spins"))
            s->system = system_from_json(body.at("spins"));
        else if (body.contains("system"))
            s->system = system_from_json(body.at("system"));
        else
            throw SchemaError("session needs 'spins'");
        s->hamiltonian_spec = dynamics::hamiltonian_from_json(body.value("hamiltonian", nlohmann::json()));
        s->evolution = std::make_unique<dynamics::FreeEvolution>(s->hamiltonian_spec.build(s->system));
        if (!body.contains("rho0") || !body.at("rho0").is_string())
            throw SchemaError("session needs a 'rho0' operator expression");
        s->rho0 = body.at("rho0").get<std::string>();
        s->rho = opexpr::parse(s->rho0, s->system);
        basis_of(*s);
        if (body.contains("events")) {
            if (!body.at("events").is_array())
                throw SchemaError("'events' must be an array");
            for (const auto &e : body.at("events"))
                apply(*s, e);
        }
        {
            std::unique_lock lock(mu_);
            s->id = "s" + std::to_string(next_id_++);
            sessions_[s->id] = s;
        }
        return {201, summary(*s)};
    });
}

Response SessionStore::list() const {
    std::shared_lock lock(mu_);
    nlohmann::json ids = nlohmann::json::array();
    for (const auto &[id, s] : sessions_)
        ids.push_back({{"session_id", id}, {"system", s->system.to_string()}});
    return {200, {{"schema", "spindrops.session-list/1"}, {"sessions", ids}}};
}

Response SessionStore::get(const std::string &id) const {
    auto s = find(id);
    if (!s)
        return error_response(404, "not_found", "unknown session '" + id + "'");
    return guarded([&]() -> Response { return {200, summary(*s)}; });
}

Response SessionStore::remove(const std::string &id) {
    std::unique_lock lock(mu_);
    if (!sessions_.erase(id))
        return error_response(404, "not_found", "unknown session '" + id + "'");
    return {200, {{"deleted", id}}};
}

Response SessionStore::mutate(const std::string &id, const nlohmann::json &event) {
    auto s = find(id);
    if (!s)
        return error_response(404, "not_found", "unknown session '" + id + "'");
    std::unique_lock writer(s->write_mu, std::try_to_lock);
    if (!writer.owns_lock())
        return error_response(409, "conflict", "another mutation of session '" + id + "' is in progress");
    return guarded([&]() -> Response {
        apply(*s, event);
        return {200, summary(*s)};
    });
}

Response SessionStore::pulse(const std::string &id, const nlohmann::json &raw) {
    return guarded([&]() -> Response {
        auto body = require_object(raw);
        if (!body.contains("angle"))
            throw SchemaError("pulse needs 'angle'");
        body["type"] = "pulse";
        return mutate(id, body);
    });
}

Response SessionStore::delay(const std::string &id, const nlohmann::json &raw) {
    return guarded([&]() -> Response {
        auto body = require_object(raw);
        if (!body.contains("seconds") || !body.at("seconds").is_number())
            throw SchemaError("delay needs a numeric 'seconds'");
        double t = body.at("seconds").get<double>();
        if (!(t >= 0))
            throw SchemaError("delay 'seconds' must be non-negative");
        return mutate(id, {{"type", "delay"}, {"duration", t}});
    });
}

Response SessionStore::reset(const std::string &id, const nlohmann::json &raw) {
    return guarded([&]() -> Response {
        auto body = require_object(raw);
        nlohmann::json e = {{"type", "reset"}};
        if (body.contains("rho0")) {
            if (!body.at("rho0").is_string())
                throw SchemaError("'rho0' must be an operator expression");
            e["rho0"] = body.at("rho0");
        }
        return mutate(id, e);
    });
}

Response SessionStore::log(const std::string &id) const {
    auto s = find(id);
    if (!s)
        return error_response(404, "not_found", "unknown session '" + id + "'");
    std::shared_lock lock(s->state_mu);
    return {200,
            {{"schema", "spindrops.log/1"},
             {"session_id", s->id},
             {"spins", s->system.to_string()},
             {"hamiltonian", dynamics::hamiltonian_to_json(s->hamiltonian_spec)},
             {"rho0", s->rho0},
             {"events", s->log}}};
}

Response SessionStore::expectation(const std::string &id, const nlohmann::json &raw) const {
    auto s = find(id);
    if (!s)
        return error_response(404, "not_found", "unknown session '" + id + "'");
    return guarded([&]() -> Response {
        auto body = require_object(raw);
        if (!body.contains("op") || !body.at("op").is_string())
            throw SchemaError("expectation needs an 'op' expression");
        Operator o = opexpr::parse(body.at("op").get<std::string>(), s->system);
        Operator rho;
        double t = 0;
        std::uint64_t v = 0;
        {
            std::shared_lock lock(s->state_mu);
            rho = s->rho;
            t = s->time;
            v = s->version;
        }
        cplx e = dynamics::expectation(rho, o);
        return {200, {{"session_id", s->id}, {"version", v}, {"time", t}, {"re", e.real()}, {"im", e.imag()}}};
    });
}

Response SessionStore::droplets(const std::string &id, const std::string &grid, const std::string &scaling,
                                bool meshes, bool include_zero) {
    auto s = find(id);
    if (!s)
        return error_response(404, "not_found", "unknown session '" + id + "'");
    return guarded([&]() -> Response {
        auto [nt, np] = parse_grid(grid.empty() ? "64x128" : grid);
        auto sc = drops::scaling_from_name(scaling.empty() ? "raw" : scaling);
        Operator rho;
        std::uint64_t v = 0;
        double t = 0;
        {
            std::shared_lock lock(s->state_mu);
            rho = s->rho;
            v = s->version;
            t = s->time;
        }
        std::uint64_t h = state_hash(rho);
        std::ostringstream key;
        key << hex64(h) << "|" << nt << "x" << np << "|" << drops::scaling_name(sc) << "|" << meshes << include_zero;
        nlohmann::json list;
        if (!cache_.get(key.str(), list)) {
            auto basis = basis_of(*s);
            list = nlohmann::json::array();
            for (const auto &f : drops::decompose(rho, *basis, sc)) {
                auto j = drops::droplet_to_json(f);
                j["weight"] = f.weight();
                if (meshes && (include_zero || !f.zero))
                    j["mesh"] = drops::mesh_to_json(drops::sample_droplet(f, nt, np));
                list.push_back(std::move(j));
            }
            cache_.put(key.str(), list);
        }
        return {200,
                {{"schema", "spindrops.session-droplets/1"},
                 {"session_id", s->id},
                 {"version", v},
                 {"time", t},
                 {"state_hash", hex64(h)},
                 {"scaling", drops::scaling_name(sc)},
                 {"grid", {{"n_theta", nt}, {"n_phi", np}}},
                 {"droplets", list}}};
    });
}

nlohmann::json SessionStore::save() const {
    nlohmann::json list = nlohmann::json::array();
    std::vector<std::string> ids;
    {
        std::shared_lock lock(mu_);
        for (const auto &[id, s] : sessions_)
            ids.push_back(id);
    }
    for (const auto &id : ids) {
        auto r = log(id);
        if (r.status != 200)
            continue;
        auto s = find(id);
        if (s) {
            std::shared_lock lock(s->state_mu);
            r.body["state_hash"] = hex64(state_hash(s->rho));
        }
        list.push_back(r.body);
    }
    std::shared_lock lock(mu_);
    return {{"schema", "spindrops.sessions/1"}, {"next_id", next_id_}, {"sessions", list}};
}

void SessionStore::load(const nlohmann::json &doc) {
    if (!doc.is_object() || doc.value("schema", "") != "spindrops.sessions/1")
        throw SchemaError("not a spindrops.sessions/1 document");
    std::uint64_t next = doc.value("next_id", std::uint64_t{1});
    for (const auto &entry : doc.at("sessions")) {
        auto r = create(entry);
        if (r.status != 201)
            throw SchemaError("cannot restore session " + entry.value("session_id", std::string("?")) + ": " +
                              r.body.value("message", std::string()));
        std::string fresh = r.body.at("session_id").get<std::string>();
        std::string wanted = entry.value("session_id", fresh);
        std::unique_lock lock(mu_);
        auto s = sessions_.at(fresh);
        sessions_.erase(fresh);
        s->id = wanted;
        sessions_[wanted] = s;
    }
    std::unique_lock lock(mu_);
    next_id_ = std::max(next_id_, next);
}

// ---------------------------------------------------------------- HTTP

void register_routes(httplib::Server &server, SessionStore &store, const std::string &cors_origin) {
    server.set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    auto send = [](httplib::Response &res, const Response &r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto body_of = [](const httplib::Request &req) -> nlohmann::json {
        if (req.body.empty())
            return nlohmann::json::object();
        return nlohmann::json::parse(req.body);
    };
    auto with_body = [send, body_of](auto handler) {
        return [send, body_of, handler](const httplib::Request &req, httplib::Response &res) {
            nlohmann::json body;
            try {
                body = body_of(req);
            } catch (const nlohmann::json::exception &e) {
                send(res, error_response(422, "schema", std::string("invalid JSON body: ") + e.what()));
                return;
            }
            send(res, handler(req, body));
        };
    };

    server.Options(R"(/.*)", [](const httplib::Request &, httplib::Response &res) { res.status = 204; });
    server.Get("/health", [send](const httplib::Request &, httplib::Response &res) {
        send(res, {200, {{"status", "ok"}, {"version", SPINDROPS_VERSION}}});
    });
    server.Get("/scenarios", [send](const httplib::Request &, httplib::Response &res) {
        send(res, {200, {{"scenarios", dynamics::scenario_names()}}});
    });
    server.Get(R"(/scenarios/([^/]+))", [send](const httplib::Request &req, httplib::Response &res) {
        try {
            send(res, {200, dynamics::sequence_to_json(dynamics::scenario(req.matches[1]))});
        } catch (const Error &e) {
            send(res, error_response(404, "not_found", e.what()));
        }
    });
    server.Post("/sessions", with_body([&store](const httplib::Request &, const nlohmann::json &b) {
                    return store.create(b);
                }));
    server.Get("/sessions", [send, &store](const httplib::Request &, httplib::Response &res) { send(res, store.list()); });
    server.Get(R"(/sessions/([^/]+))", [send, &store](const httplib::Request &req, httplib::Response &res) {
        send(res, store.get(req.matches[1]));
    });
    server.Delete(R"(/sessions/([^/]+))", [send, &store](const httplib::Request &req, httplib::Response &res) {
        send(res, store.remove(req.matches[1]));
    });
    server.Post(R"(/sessions/([^/]+)/pulse)", with_body([&store](const httplib::Request &req, const nlohmann::json &b) {
                    return store.pulse(req.matches[1], b);
                }));
    server.Post(R"(/sessions/([^/]+)/delay)", with_body([&store](const httplib::Request &req, const nlohmann::json &b) {
                    return store.delay(req.matches[1], b);
                }));
    server.Post(R"(/sessions/([^/]+)/reset)", with_body([&store](const httplib::Request &req, const nlohmann::json &b) {
                    return store.reset(req.matches[1], b);
                }));
    server.Post(R"(/sessions/([^/]+)/expectation)",
                with_body([&store](const httplib::Request &req, const nlohmann::json &b) {
                    return store.expectation(req.matches[1], b);
                }));
    server.Get(R"(/sessions/([^/]+)/log)", [send, &store](const httplib::Request &req, httplib::Response &res) {
        send(res, store.log(req.matches[1]));
    });
    server.Get(R"(/sessions/([^/]+)/droplets)", [send, &store](const httplib::Request &req, httplib::Response &res) {
        auto param = [&](const char *k, const char *def) {
            return req.has_param(k) ? req.get_param_value(k) : std::string(def);
        };
        send(res, store.droplets(req.matches[1], param("grid", "64x128"), param("scaling", "raw"),
                                 param("meshes", "true") != "false", param("include_zero", "false") == "true"));
    });
}

namespace {
httplib::Server *g_server = nullptr;
extern "C" void on_signal(int) {
    if (g_server)
        g_server->stop();
}
} // namespace

int serve(const ServeOptions &options) {
    SessionStore store;
    if (!options.state_file.empty()) {
        std::ifstream in(options.state_file);
        if (in) {
            nlohmann::json doc = nlohmann::json::parse(in);
            store.load(doc);
        }
    }
    httplib::Server server;
    register_routes(server, store, options.cors_origin);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::fprintf(stderr, "spindrops service listening on %s:%d\n", options.host.c_str(), options.port);
    bool ok = server.listen(options.host, options.port);
    g_server = nullptr;
    if (!options.state_file.empty()) {
        std::ofstream out(options.state_file);
        out << store.save().dump(2) << "\n";
    }
    return ok ? 0 : 1;
}

} // namespace spindrops::service
