// iss.hpp — iterative see-saw maximization of the pre-QFI
//
//   F(C, L) = 2 Tr(ρ̇ L) − Tr(ρ L²),   ρ = C ⋆ Λ^(N)
//
// For fixed strategy C the maximizer over Hermitian L is the SLD and the
// maximum is the QFI. For fixed L, F is linear in every tooth, so each tooth
// update is the semidefinite program
//
//   maximize Tr(C_k D_k)  s.t.  C_k ⪰ 0,  Tr_out C_k = 1_in.
//
// A run alternates forward sweeps over all teeth with L-steps until the
// increment of F drops below the tolerance, and keeps the best of several
// seeded restarts.

#pragma once

#include <cstdint>
#include <vector>

#include "pmetro/comb.hpp"
#include "pmetro/linalg.hpp"

namespace pmetro::iss {

struct IssConfig {
    int max_sweeps{200};
    double tol{1e-7};  // absolute increment of F that ends a run
    int restarts{5};
    std::uint64_t seed{20250101};
    Index d_anc{2};
    double tooth_tol{1e-10};  // relative duality gap of each tooth solve
    bool backward_sweeps{false};
    double sld_eps{kSldEps};
    int threads{1};  // restarts evaluated concurrently when > 1

    void validate() const;
};

struct QfiResult {
    double value{0.0};
    std::vector<double> sweep_history;  // QFI after initialization and after each sweep
    bool converged{false};
    comb::Strategy strategy;  // snapshot attaining `value`
    std::vector<double> restart_values;
    int best_restart{0};

    int sweeps() const { return sweep_history.empty() ? 0 : int(sweep_history.size()) - 1; }
};

double pre_qfi(const comb::OutputPair& out, const CMat& l);

CMat l_step(const comb::OutputPair& out, double eps = kSldEps);

struct ToothSolution {
    CMat choi;
    double objective{0.0};
    double gap{0.0};  // certified bound on optimum − objective
    int iterations{0};
};

// Maximizes Tr(C D) over Choi matrices C of channels d_in -> d_out (input factor
// first). d_in == 1 is the state-preparation case, solved exactly by the top
// eigenvector. Otherwise a primal-dual interior-point method (HKM direction,
// Mehrotra predictor-corrector) runs on the pair
//     max Tr(C D)  s.t. Tr_out C = 1_in, C ⪰ 0
//     min Tr(Y)    s.t. Y ⊗ 1_out ⪰ D
// and the returned C is renormalized to be exactly trace preserving. Throws
// SolverError (carrying the last feasible C) when the gap cannot be closed.
ToothSolution tooth_step(const CMat& d, Index d_in, Index d_out, double tol = 1e-10);

// One forward sweep of tooth updates with L fixed. Returns F(C_new, L).
double sweep(comb::Strategy& s, const comb::ChannelComb& cc, const CMat& l, double tooth_tol,
             bool backward = false);

// Single seeded run from a random initial strategy.
QfiResult iss_single(const comb::ChannelComb& cc, const IssConfig& cfg, int restart_index);

// Best over cfg.restarts runs; run r uses a generator seeded by (cfg.seed, r).
QfiResult iss_run(const comb::ChannelComb& cc, const IssConfig& cfg);

// QFI of a strategy evaluated through its output pair.
double strategy_qfi(const comb::Strategy& s, const comb::ChannelComb& cc, double eps = kSldEps);

// n independent repetitions of the optimal single-step protocol: n × F_1.
QfiResult repeated_no_control(const comb::ChannelComb& single, int n, const IssConfig& cfg);

// Scales a single-step result (value, history, restart values) by n.
QfiResult repeated_from(QfiResult single, int n);

}  // namespace pmetro::iss
