// harness.hpp — experiment scenarios, batch runs and result emission
//
// A Scenario names the protocol models to compare, the bath, the step lengths
// and the numbers of channel uses. run_scenario turns it into one RunRecord row
// per (model, d_anc, dt, N), dispatching independent optimizations to a worker
// pool and merging them in a fixed order so output is reproducible.
//
// Units: ω̃ = 1, so times, rates and frequencies are dimensionless.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmetro/embedding.hpp"
#include "pmetro/iss.hpp"

namespace pmetro::harness {

const char* version();

enum class Model { correlated, fresh, repeated_no_control };

std::string to_string(Model m);
Model model_from_string(const std::string& s);  // throws DomainError

struct Scenario {
    std::string name{"custom"};
    std::vector<Model> models{Model::correlated};
    embedding::SpectralDensity bath{2.457, 2.5, 0.0};
    double omega{0.0};
    std::vector<double> dts{0.5};
    // When set, bath.gamma0 is the coupling at step ref_dt and every other dt
    // uses the rescaled coupling that keeps the accumulated noise fixed.
    bool rescale{false};
    double ref_dt{0.5};
    std::vector<int> n_steps{1};
    double max_time{0.0};  // > 0 drops rows with N·dt beyond it
    std::vector<Index> d_anc{2};
    iss::IssConfig iss;
    int workers{1};

    void validate() const;  // throws DomainError
};

// "fig2b", "fig2c" or "fig3"; throws DomainError otherwise.
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& sc);
Scenario load_scenario(const std::string& path);

struct Row {
    Model model{Model::correlated};
    Index d_anc{1};
    double dt{0.0};
    double gamma0{0.0};  // coupling used at this dt
    int n{1};
    iss::QfiResult result;
    std::string error;  // solver failure message; empty on success

    double time() const { return n * dt; }
};

struct RunRecord {
    Scenario scenario;
    std::vector<Row> rows;
    double wall_seconds{0.0};
    std::string version;
    std::uint64_t seed{0};
    std::optional<double> gamma_c;  // constant-rate reference at ref_dt, rescaled runs only

    bool all_ok() const;
};

// Gamma0 used for step dt under the scenario's rescaling rule.
double coupling_for(const Scenario& sc, double dt);

RunRecord run_scenario(const Scenario& sc);

enum class Format { csv, json };
Format format_from_string(const std::string& s);

std::string to_csv(const RunRecord& rr);
std::string to_json(const RunRecord& rr);
RunRecord record_from_json(const std::string& text);
void emit(const RunRecord& rr, Format fmt, const std::string& path);

// Reduced-dynamics trajectory from the pseudomode embedding and the closed form.
struct DynamicsSample {
    double t;
    CMat numeric;
    CMat analytic;
    double rate;  // γ(t); NaN at divergences or off resonance
};

std::vector<DynamicsSample> simulate_dynamics(const embedding::SpectralDensity& bath, double omega,
                                              const CMat& rho0, double t_max, int points);
std::string dynamics_to_csv(const std::vector<DynamicsSample>& samples);

}  // namespace pmetro::harness
