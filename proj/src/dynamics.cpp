#include "spindrops/dynamics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "spindrops/error.hpp"
#include "spindrops/opexpr.hpp"
#include "spindrops/tolerance.hpp"

namespace spindrops::dynamics {

namespace {

void check_pair(const SpinSystem &system, const Coupling &c) {
    int n = static_cast<int>(system.size());
    if (c.k < 1 || c.l < 1 || c.k > n || c.l > n || c.k == c.l)
        throw Error("invalid coupling pair (" + std::to_string(c.k) + "," + std::to_string(c.l) + ") for " +
                    std::to_string(n) + " spins");
}

Matrix hermitian_exp(const Matrix &generator, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(generator);
    Eigen::VectorXcd phase = (es.eigenvalues().cast<cplx>() * cplx(0, -t)).array().exp();
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

Operator ising_hamiltonian(const SpinSystem &system, const std::vector<Coupling> &couplings) {
    if (!system.all_spin_half())
        throw ScopeError("the Ising Hamiltonian is defined for spins 1/2; use the isotropic form");
    Operator h = Operator::zero(system);
    for (const auto &c : couplings) {
        check_pair(system, c);
        h = h + (2 * M_PI * c.hz) * (opexpr::site_operator(system, c.k, 'z') * opexpr::site_operator(system, c.l, 'z'));
    }
    return h;
}

Operator isotropic_hamiltonian(const SpinSystem &system, const std::vector<Coupling> &couplings) {
    Operator h = Operator::zero(system);
    for (const auto &c : couplings) {
        check_pair(system, c);
        Operator sum = Operator::zero(system);
        for (char a : {'x', 'y', 'z'})
            sum = sum + opexpr::site_operator(system, c.k, a) * opexpr::site_operator(system, c.l, a);
        h = h + (2 * M_PI * c.hz) * sum;
    }
    return h;
}

std::string axis_name(Axis a) {
    switch (a) {
    case Axis::x:
        return "x";
    case Axis::y:
        return "y";
    case Axis::minus_x:
        return "-x";
    case Axis::minus_y:
        return "-y";
    case Axis::z:
        return "z";
    }
    return "?";
}

Axis axis_from_name(const std::string &s) {
    if (s == "x")
        return Axis::x;
    if (s == "y")
        return Axis::y;
    if (s == "-x")
        return Axis::minus_x;
    if (s == "-y")
        return Axis::minus_y;
    if (s == "z")
        return Axis::z;
    throw Error("unknown pulse axis '" + s + "' (expected x, y, -x, -y or z)");
}

Operator pulse_propagator(const SpinSystem &system, const std::vector<int> &sites, Axis axis, double angle) {
    std::vector<int> targets = sites;
    if (targets.empty())
        for (int k = 1; k <= static_cast<int>(system.size()); ++k)
            targets.push_back(k);
    char a = 'z';
    double sign = 1.0;
    switch (axis) {
    case Axis::x:
        a = 'x';
        break;
    case Axis::y:
        a = 'y';
        break;
    case Axis::minus_x:
        a = 'x';
        sign = -1.0;
        break;
    case Axis::minus_y:
        a = 'y';
        sign = -1.0;
        break;
    case Axis::z:
        a = 'z';
        break;
    }
    Operator f = Operator::zero(system);
    for (int k : targets)
        f = f + opexpr::site_operator(system, k, a);
    return Operator(system, hermitian_exp(f.matrix() * sign, angle));
}

FreeEvolution::FreeEvolution(const Operator &h) : h_(h) {
    if (!h.is_hermitian(tol::structural * std::max(1.0, h.matrix().cwiseAbs().maxCoeff())))
        throw Error("Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    w_ = es.eigenvalues();
    v_ = es.eigenvectors();
}

Operator FreeEvolution::propagator(double t) const {
    Eigen::VectorXcd phase = (w_.cast<cplx>() * cplx(0, -t)).array().exp();
    return Operator(h_.system(), v_ * phase.asDiagonal() * v_.adjoint());
}

Operator FreeEvolution::evolve(const Operator &rho, double t) const {
    if (rho.system() != h_.system())
        throw DimensionError("state and Hamiltonian live on different systems");
    if (t == 0.0)
        return rho;
    Eigen::VectorXcd phase = (w_.cast<cplx>() * cplx(0, -t)).array().exp();
    Matrix r = v_.adjoint() * rho.matrix() * v_;
    for (Eigen::Index c = 0; c < r.cols(); ++c)
        for (Eigen::Index k = 0; k < r.rows(); ++k)
            r(k, c) *= phase(k) * std::conj(phase(c));
    return Operator(rho.system(), v_ * r * v_.adjoint());
}

Operator evolve(const Operator &rho, const Operator &h, double t) { return FreeEvolution(h).evolve(rho, t); }

cplx expectation(const Operator &rho, const Operator &o) {
    if (rho.system() != o.system())
        throw DimensionError("expectation needs operators on the same system");
    return (rho.matrix().transpose().cwiseProduct(o.matrix())).sum();
}

std::string Event::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::pulse: {
        os << "pulse " << axis_name(axis) << " " << angle << " on ";
        if (sites.empty())
            os << "all";
        for (std::size_t i = 0; i < sites.size(); ++i)
            os << (i ? "," : "") << sites[i];
        break;
    }
    case Kind::delay:
        os << "delay " << duration << " s";
        break;
    case Kind::set_hamiltonian:
        os << "hamiltonian " << ref;
        break;
    }
    return os.str();
}

double PulseSequence::total_delay() const {
    double t = 0;
    for (const auto &e : events)
        if (e.kind == Event::Kind::delay)
            t += e.duration;
    return t;
}

Trajectory run_sequence(const Operator &rho0, const PulseSequence &seq, const Operator &h_default,
                        const std::map<std::string, Operator> &named, bool boundaries) {
    Trajectory tr;
    double t = 0;
    Operator rho = rho0;
    FreeEvolution current(h_default);
    std::map<std::string, FreeEvolution> cache;
    const FreeEvolution *active = &current;
    tr.times.push_back(0);
    tr.steps.push_back("initial");
    tr.states.push_back(rho);
    for (std::size_t i = 0; i < seq.events.size(); ++i) {
        const auto &e = seq.events[i];
        try {
            switch (e.kind) {
            case Event::Kind::pulse: {
                Operator u = pulse_propagator(rho.system(), e.sites, e.axis, e.angle);
                rho = u * rho * u.dagger();
                break;
            }
            case Event::Kind::delay:
                if (e.duration < 0)
                    throw Error("negative delay");
                rho = active->evolve(rho, e.duration);
                t += e.duration;
                break;
            case Event::Kind::set_hamiltonian: {
                auto it = cache.find(e.ref);
                if (it == cache.end()) {
                    auto nh = named.find(e.ref);
                    if (nh == named.end())
                        throw Error("unknown Hamiltonian '" + e.ref + "'");
                    it = cache.emplace(e.ref, FreeEvolution(nh->second)).first;
                }
                active = &it->second;
                break;
            }
            }
        } catch (const Error &err) {
            throw Error("event " + std::to_string(i) + " (" + e.describe() + "): " + err.what());
        }
        if (boundaries || i + 1 == seq.events.size()) {
            tr.times.push_back(t);
            tr.steps.push_back(e.describe());
            tr.states.push_back(rho);
        }
    }
    return tr;
}

Operator HamiltonianSpec::build(const SpinSystem &system) const {
    if (type == "zero" || type == "none")
        return Operator::zero(system);
    if (type == "ising")
        return ising_hamiltonian(system, couplings);
    if (type == "isotropic")
        return isotropic_hamiltonian(system, couplings);
    throw SchemaError("unknown Hamiltonian type '" + type + "' (expected zero, ising or isotropic)");
}

Trajectory SequenceDocument::run() const {
    Operator rho = opexpr::parse(rho0, system);
    std::map<std::string, Operator> named;
    for (const auto &[k, v] : hamiltonians)
        named.emplace(k, v.build(system));
    return run_sequence(rho, sequence, hamiltonian.build(system), named, record != "final");
}

double parse_angle(const std::string &text) {
    std::string s;
    for (char c : text)
        if (c != ' ')
            s.push_back(c);
    if (s.empty())
        throw SchemaError("empty angle");
    std::size_t i = 0;
    double sign = 1;
    if (s[i] == '-' || s[i] == '+') {
        sign = s[i] == '-' ? -1 : 1;
        ++i;
    }
    auto number = [&](double &out) {
        std::size_t start = i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' || s[i] == 'e' ||
                                ((s[i] == '-' || s[i] == '+') && i > start && s[i - 1] == 'e')))
            ++i;
        if (i == start)
            return false;
        try {
            std::size_t used = 0;
            out = std::stod(s.substr(start, i - start), &used);
            if (used != i - start)
                throw SchemaError("");
        } catch (const std::exception &) {
            throw SchemaError("invalid angle '" + text + "'");
        }
        return true;
    };
    double value = 1;
    bool have_number = number(value);
    bool have_pi = false;
    if (i < s.size() && s[i] == '*') {
        if (!have_number)
            throw SchemaError("invalid angle '" + text + "'");
        ++i;
    }
    if (s.compare(i, 2, "pi") == 0) {
        have_pi = true;
        i += 2;
    }
    if (!have_number && !have_pi)
        throw SchemaError("invalid angle '" + text + "'");
    if (have_pi)
        value *= M_PI;
    if (i < s.size() && s[i] == '/') {
        ++i;
        double den = 0;
        if (!number(den) || den == 0)
            throw SchemaError("invalid angle '" + text + "'");
        value /= den;
    }
    if (i != s.size())
        throw SchemaError("invalid angle '" + text + "'");
    return sign * value;
}

namespace {

std::vector<int> sites_from_json(const nlohmann::json &j) {
    if (j.is_null() || (j.is_string() && j.get<std::string>() == "all"))
        return {};
    if (j.is_number_integer())
        return {j.get<int>()};
    if (!j.is_array())
        throw SchemaError("'sites' must be an array of 1-based indices or \"all\"");
    return j.get<std::vector<int>>();
}

double number_or_angle(const nlohmann::json &j, const char *what) {
    if (j.is_number())
        return j.get<double>();
    if (j.is_string())
        return parse_angle(j.get<std::string>());
    throw SchemaError(std::string("'") + what + "' must be a number or an angle string");
}

void events_from_json(const nlohmann::json &list, std::vector<Event> &out, int depth) {
    if (!list.is_array())
        throw SchemaError("'events' must be an array");
    if (depth > 8)
        throw SchemaError("repeat blocks nested too deeply");
    for (const auto &j : list) {
        if (j.is_object() && j.value("type", "") == "repeat") {
            int count = j.at("count").get<int>();
            if (count < 0)
                throw SchemaError("repeat count must be non-negative");
            std::vector<Event> body;
            events_from_json(j.at("events"), body, depth + 1);
            for (int r = 0; r < count; ++r)
                out.insert(out.end(), body.begin(), body.end());
        } else {
            out.push_back(event_from_json(j));
        }
    }
}

std::vector<Coupling> couplings_from_json(const nlohmann::json &j) {
    std::vector<Coupling> out;
    if (j.is_null())
        return out;
    if (!j.is_array())
        throw SchemaError("'couplings' must be an array of {sites:[k,l], J:hz}");
    for (const auto &c : j) {
        auto s = c.at("sites").get<std::vector<int>>();
        if (s.size() != 2)
            throw SchemaError("a coupling needs exactly two sites");
        out.push_back({s[0], s[1], c.at("J").get<double>()});
    }
    return out;
}

nlohmann::json yaml_to_json(const YAML::Node &n) {
    switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
        return nullptr;
    case YAML::NodeType::Sequence: {
        nlohmann::json a = nlohmann::json::array();
        for (const auto &x : n)
            a.push_back(yaml_to_json(x));
        return a;
    }
    case YAML::NodeType::Map: {
        nlohmann::json o = nlohmann::json::object();
        for (const auto &kv : n)
            o[kv.first.as<std::string>()] = yaml_to_json(kv.second);
        return o;
    }
    case YAML::NodeType::Scalar: {
        const std::string &s = n.Scalar();
        if (n.Tag() == "!")
            return s;
        long long iv = 0;
        double dv = 0;
        if (s == "true" || s == "false")
            return s == "true";
        if (s == "null" || s == "~")
            return nullptr;
        if (YAML::convert<long long>::decode(n, iv))
            return iv;
        if (YAML::convert<double>::decode(n, dv))
            return dv;
        return s;
    }
    }
    return nullptr;
}

} // namespace

HamiltonianSpec hamiltonian_from_json(const nlohmann::json &j) {
    HamiltonianSpec h;
    if (j.is_null())
        return h;
    if (!j.is_object())
        throw SchemaError("'hamiltonian' must be an object");
    h.type = j.value("type", "zero");
    h.couplings = couplings_from_json(j.value("couplings", nlohmann::json()));
    return h;
}

nlohmann::json hamiltonian_to_json(const HamiltonianSpec &h) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto &x : h.couplings)
        c.push_back({{"sites", {x.k, x.l}}, {"J", x.hz}});
    return {{"type", h.type}, {"couplings", c}};
}

nlohmann::json event_to_json(const Event &e) {
    switch (e.kind) {
    case Event::Kind::pulse:
        return {{"type", "pulse"},
                {"sites", e.sites.empty() ? nlohmann::json("all") : nlohmann::json(e.sites)},
                {"axis", axis_name(e.axis)},
                {"angle", e.angle}};
    case Event::Kind::delay:
        return {{"type", "delay"}, {"duration", e.duration}};
    case Event::Kind::set_hamiltonian:
        return {{"type", "hamiltonian"}, {"ref", e.ref}};
    }
    return nullptr;
}

Event event_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("type"))
        throw SchemaError("an event must be an object with a 'type'");
    auto type = j.at("type").get<std::string>();
    Event e;
    if (type == "pulse") {
        e.kind = Event::Kind::pulse;
        e.sites = sites_from_json(j.value("sites", nlohmann::json("all")));
        e.axis = axis_from_name(j.value("axis", "x"));
        if (!j.contains("angle"))
            throw SchemaError("pulse event needs 'angle'");
        e.angle = number_or_angle(j.at("angle"), "angle");
    } else if (type == "delay") {
        e.kind = Event::Kind::delay;
        if (!j.contains("duration"))
            throw SchemaError("delay event needs 'duration'");
        e.duration = number_or_angle(j.at("duration"), "duration");
        if (e.duration < 0)
            throw SchemaError("delay duration must be non-negative");
    } else if (type == "hamiltonian") {
        e.kind = Event::Kind::set_hamiltonian;
        e.ref = j.at("ref").get<std::string>();
    } else {
        throw SchemaError("unknown event type '" + type + "'");
    }
    return e;
}

SequenceDocument sequence_from_json(const nlohmann::json &j) {
    try {
        if (!j.is_object())
            throw SchemaError("sequence document must be an object");
        SequenceDocument d;
        d.name = j.value("name", "");
        const auto &sys = j.at("system");
        if (sys.is_string()) {
            d.system = SpinSystem::parse(sys.get<std::string>());
        } else if (sys.is_array()) {
            std::vector<HalfInteger> spins;
            for (const auto &s : sys)
                spins.push_back(s.is_string() ? HalfInteger::parse(s.get<std::string>())
                                              : HalfInteger::from_twice(static_cast<int>(std::lround(2 * s.get<double>()))));
            d.system = SpinSystem(spins);
        } else {
            throw SchemaError("'system' must be a string or an array");
        }
        d.hamiltonian = hamiltonian_from_json(j.value("hamiltonian", nlohmann::json()));
        if (j.contains("hamiltonians"))
            for (const auto &[k, v] : j.at("hamiltonians").items())
                d.hamiltonians[k] = hamiltonian_from_json(v);
        d.rho0 = j.at("rho0").get<std::string>();
        events_from_json(j.value("events", nlohmann::json::array()), d.sequence.events, 0);
        d.record = j.value("record", "boundaries");
        if (d.record != "boundaries" && d.record != "final")
            throw SchemaError("'record' must be boundaries or final");
        if (j.contains("target"))
            d.target = j.at("target").get<std::string>();
        if (j.contains("observable"))
            d.observable = j.at("observable").get<std::string>();
        for (const auto &e : d.sequence.events)
            for (int s : e.sites)
                if (s < 1 || s > static_cast<int>(d.system.size()))
                    throw SchemaError("pulse site " + std::to_string(s) + " out of range");
        return d;
    } catch (const nlohmann::json::exception &e) {
        throw SchemaError(std::string("sequence document: ") + e.what());
    }
}

nlohmann::json sequence_to_json(const SequenceDocument &d) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto &e : d.sequence.events)
        events.push_back(event_to_json(e));
    nlohmann::json j = {{"schema", "spindrops.sequence/1"},
                        {"name", d.name},
                        {"system", d.system.to_string()},
                        {"hamiltonian", hamiltonian_to_json(d.hamiltonian)},
                        {"rho0", d.rho0},
                        {"events", events},
                        {"record", d.record}};
    if (!d.hamiltonians.empty()) {
        nlohmann::json h = nlohmann::json::object();
        for (const auto &[k, v] : d.hamiltonians)
            h[k] = hamiltonian_to_json(v);
        j["hamiltonians"] = h;
    }
    if (d.target)
        j["target"] = *d.target;
    if (d.observable)
        j["observable"] = *d.observable;
    return j;
}

SequenceDocument sequence_from_text(const std::string &text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error &e) {
            throw SchemaError(std::string("invalid JSON: ") + e.what());
        }
        return sequence_from_json(j);
    }
    try {
        return sequence_from_json(yaml_to_json(YAML::Load(text)));
    } catch (const YAML::Exception &e) {
        throw SchemaError(std::string("invalid YAML: ") + e.what());
    }
}

SequenceDocument load_sequence(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open sequence file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return sequence_from_text(ss.str());
}

// ---------------------------------------------------------------- scenarios

namespace {

constexpr double kChainJ = 10.0; // Hz, arbitrary; endpoints do not depend on it

Event pulse(std::vector<int> sites, Axis axis, double angle = M_PI / 2) {
    Event e;
    e.kind = Event::Kind::pulse;
    e.sites = std::move(sites);
    e.axis = axis;
    e.angle = angle;
    return e;
}

Event delay(double t) {
    Event e;
    e.kind = Event::Kind::delay;
    e.duration = t;
    return e;
}

std::vector<Coupling> chain(int n, double hz) {
    std::vector<Coupling> c;
    for (int k = 2; k <= n; ++k)
        c.push_back({k - 1, k, hz});
    return c;
}

SequenceDocument maxq(int n) {
    SequenceDocument d;
    d.name = "maxq-" + std::to_string(n);
    d.system = SpinSystem::qubits(n);
    d.hamiltonian = {"ising", chain(n, kChainJ)};
    std::string rho0;
    for (int k = 1; k <= n; ++k)
        rho0 += (k > 1 ? " + I" : "I") + std::to_string(k) + "z";
    d.rho0 = rho0;
    auto &ev = d.sequence.events;
    ev.push_back(pulse({}, Axis::y));
    for (int r = 0; r < n - 1; ++r) {
        ev.push_back(delay(1.0 / (2 * kChainJ)));
        ev.push_back(pulse({}, Axis::y));
    }
    return d;
}

SequenceDocument soliton6() {
    SequenceDocument d;
    d.name = "soliton-6";
    d.system = SpinSystem::qubits(6);
    d.hamiltonian = {"ising", chain(6, kChainJ)};
    d.rho0 = "I1x + i*I1y";
    d.target = "I6x + i*I6y";
    double tau = 1.0 / (2 * kChainJ);
    auto &ev = d.sequence.events;
    ev.push_back(pulse({1}, Axis::minus_x));
    ev.push_back(pulse({1}, Axis::y));
    ev.push_back(delay(tau));
    ev.push_back(pulse({1}, Axis::x));
    ev.push_back(pulse({2}, Axis::y));
    ev.push_back(delay(tau));
    for (int r = 0; r < 4; ++r) {
        ev.push_back(pulse({}, Axis::y));
        ev.push_back(delay(tau));
    }
    // phase -y here ends in -(I6x - i I6y)
    ev.push_back(pulse({5}, Axis::y));
    ev.push_back(pulse({6}, Axis::x));
    ev.push_back(delay(tau));
    ev.push_back(pulse({6}, Axis::x));
    return d;
}

SequenceDocument iso4() {
    SequenceDocument d;
    d.name = "iso-4";
    d.system = SpinSystem::qubits(4);
    d.hamiltonian = {"isotropic", {{1, 2, 4.1}, {1, 3, 9.4}, {1, 4, 6.8}, {2, 3, 5.3}, {2, 4, 8.2}, {3, 4, -4.6}}};
    d.rho0 = "I1z";
    d.sequence.events = {delay(0.020), delay(0.020), delay(0.093)};
    return d;
}

SequenceDocument iso12() {
    SequenceDocument d;
    d.name = "iso-12-1";
    d.system = SpinSystem::parse("1/2,1");
    d.hamiltonian = {"isotropic", {{1, 2, 11.0}}};
    d.rho0 = "S1x";
    d.observable = "S1x";
    for (int k = 0; k < 100; ++k)
        d.sequence.events.push_back(delay(0.001));
    return d;
}

} // namespace

std::vector<std::string> scenario_names() { return {"maxq-4", "maxq-5", "soliton-6", "iso-4", "iso-12-1"}; }

SequenceDocument scenario(const std::string &name) {
    if (name == "maxq-4")
        return maxq(4);
    if (name == "maxq-5")
        return maxq(5);
    if (name == "soliton-6")
        return soliton6();
    if (name == "iso-4")
        return iso4();
    if (name == "iso-12-1")
        return iso12();
    std::string known;
    for (const auto &n : scenario_names())
        known += (known.empty() ? "" : ", ") + n;
    throw Error("unknown scenario '" + name + "' (known: " + known + ")");
}

} // namespace spindrops::dynamics
