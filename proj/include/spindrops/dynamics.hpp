#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spindrops/operator.hpp"

namespace spindrops::dynamics {

struct Coupling {
    int k = 0; ///< 1-based
    int l = 0;
    double hz = 0;
};

/// H = 2 pi sum J_kl I_kz I_lz (rad/s); spins 1/2 only.
Operator ising_hamiltonian(const SpinSystem &system, const std::vector<Coupling> &couplings);
/// H = 2 pi sum J_kl (S_kx S_lx + S_ky S_ly + S_kz S_lz).
Operator isotropic_hamiltonian(const SpinSystem &system, const std::vector<Coupling> &couplings);

enum class Axis { x, y, minus_x, minus_y, z };
std::string axis_name(Axis a);
Axis axis_from_name(const std::string &s);

/// exp(-i angle sum_k F_k,axis).
Operator pulse_propagator(const SpinSystem &system, const std::vector<int> &sites, Axis axis, double angle);

/// Eigendecomposition of a Hermitian generator; reused across delays.
class FreeEvolution {
  public:
    explicit FreeEvolution(const Operator &h);
    Operator propagator(double t) const;
    Operator evolve(const Operator &rho, double t) const;
    const Operator &hamiltonian() const { return h_; }

  private:
    Operator h_;
    Eigen::VectorXd w_;
    Matrix v_;
};

/// U rho U^dagger with U = exp(-i H t); H must be Hermitian.
Operator evolve(const Operator &rho, const Operator &h, double t);
cplx expectation(const Operator &rho, const Operator &o);

struct Event {
    enum class Kind { pulse, delay, set_hamiltonian };
    Kind kind = Kind::delay;
    std::vector<int> sites; ///< empty means all sites
    Axis axis = Axis::x;
    double angle = 0;
    double duration = 0;
    std::string ref;

    std::string describe() const;
};

struct PulseSequence {
    std::vector<Event> events;
    double total_delay() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::string> steps;
    std::vector<Operator> states;
};

/// States at every event boundary, starting with rho0.
Trajectory run_sequence(const Operator &rho0, const PulseSequence &seq, const Operator &h_default,
                        const std::map<std::string, Operator> &named = {}, bool boundaries = true);

struct HamiltonianSpec {
    std::string type = "zero"; ///< zero, ising, isotropic
    std::vector<Coupling> couplings;
    Operator build(const SpinSystem &system) const;
};

HamiltonianSpec hamiltonian_from_json(const nlohmann::json &j);
nlohmann::json hamiltonian_to_json(const HamiltonianSpec &h);

/// Parsed sequence file.
struct SequenceDocument {
    std::string name;
    SpinSystem system;
    HamiltonianSpec hamiltonian;
    std::map<std::string, HamiltonianSpec> hamiltonians;
    std::string rho0;
    PulseSequence sequence;
    std::string record = "boundaries";
    std::optional<std::string> target;
    std::optional<std::string> observable;

    Trajectory run() const;
};

/// Accepts numbers and strings such as "pi/2", "-pi", "3*pi/4", "0.25".
double parse_angle(const std::string &text);

SequenceDocument sequence_from_json(const nlohmann::json &j);
nlohmann::json sequence_to_json(const SequenceDocument &d);
/// YAML or JSON text.
SequenceDocument sequence_from_text(const std::string &text);
SequenceDocument load_sequence(const std::string &path);

nlohmann::json event_to_json(const Event &e);
Event event_from_json(const nlohmann::json &j);

std::vector<std::string> scenario_names();
/// Built-in scenarios maxq-4, maxq-5, soliton-6, iso-4, iso-12-1.
SequenceDocument scenario(const std::string &name);

} // namespace spindrops::dynamics
