// comb.hpp — quantum combs: link products, strategy validation, and sequential
// contraction of a control strategy with an N-step channel comb.
//
// A strategy for N channel uses is a chain of N teeth. Tooth 0 prepares the
// probe on S ⊗ A_1; tooth k ≥ 1 maps (S, A_k) -> (S, A_{k+1}) between channel
// uses k and k+1. The channel comb acts on S ⊗ M with the memory M carried from
// step to step (M trivial for the fresh-environment model). After the last
// channel the memory is discarded and the state on S ⊗ A is measured.
//
// The contraction never builds the full comb: it propagates the pair
// (ρ, ∂ρ/∂Ω) on the running space S ⊗ M ⊗ A, in that factor order.

#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pmetro/choi.hpp"
#include "pmetro/embedding.hpp"
#include "pmetro/linalg.hpp"

namespace pmetro::comb {

// ---------------------------------------------------------------------------
// Link product on labeled wires
// ---------------------------------------------------------------------------

struct Wire {
    int label{0};
    Index dim{1};
};

struct LinkOperand {
    CMat op;
    std::vector<Wire> wires;  // factor order of op
};

// A ⋆ B = Tr_shared[(A^{T_shared} ⊗ 1)(1 ⊗ B)]; wires with equal labels are
// contracted. The result carries A's open wires followed by B's open wires.
LinkOperand link(const LinkOperand& a, const LinkOperand& b);

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

enum class ToothRole { control, channel };

// Choi matrix on (sys_in ⊗ anc_in) -> (sys_out ⊗ anc_out), factors in that order.
struct Tooth {
    CMat choi;
    Index sys_in{1};
    Index anc_in{1};
    Index sys_out{1};
    Index anc_out{1};
    ToothRole role{ToothRole::control};

    Index in_dim() const { return sys_in * anc_in; }
    Index out_dim() const { return sys_out * anc_out; }
};

struct Strategy {
    std::vector<Tooth> teeth;

    std::size_t size() const { return teeth.size(); }
    Index d_sys() const;
    // Ancilla dimension after each tooth.
    std::vector<Index> ancilla_schedule() const;
    // (system, ancilla) dims of the measured output.
    std::pair<Index, Index> output_dims() const;

    // Prepares `probe` on S ⊗ A and applies identity controls in between.
    static Strategy identity(int steps, Index d_sys, Index d_anc, const CMat& probe);
};

CMat identity_choi(Index d);
CMat random_cptp_choi(Index d_in, Index d_out, std::mt19937_64& rng, Index rank = 0);
CMat haar_pure_state(Index d, std::mt19937_64& rng);
Strategy random_strategy(int steps, Index d_sys, Index d_anc, std::mt19937_64& rng);

struct CombReport {
    std::vector<double> psd_violation;  // max(0, −λ_min) per tooth
    std::vector<double> tp_violation;   // ‖Tr_out C_k − 1_in‖_max per tooth
    std::vector<std::string> wire_errors;
    double tol{1e-9};

    double max_psd_violation() const;
    double max_tp_violation() const;
    // Index of the first tooth exceeding tol, if any.
    std::optional<std::size_t> first_violation(double tol) const;
    bool valid(double tol) const;
    bool ok() const { return valid(tol); }
};

// Positivity and the causal normalization of a chain of teeth. For a chain of
// channels the recursive trace conditions reduce to each tooth being trace
// preserving from its inputs to its outputs.
CombReport validate_comb(const Strategy& s, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Channel comb and contraction
// ---------------------------------------------------------------------------

struct ChannelComb {
    int steps{1};
    ChannelChoi channel;  // on S ⊗ M
    Index d_sys{2};
    Index d_mem{1};
    CMat initial_memory;  // d_mem × d_mem

    bool is_fresh() const { return d_mem == 1; }
    ChannelComb with_steps(int n) const;

    // Memory-carrying steps Λ = exp(L dt) on S ⊗ M, memory starting in vacuum.
    static ChannelComb correlated(const embedding::Liouvillian& lv, double dt, int steps);
    // Memory reset before every step: Λ^S applied N times.
    static ChannelComb fresh(const embedding::Liouvillian& lv, double dt, int steps);
    // Uncorrelated comb from an arbitrary system channel.
    static ChannelComb from_channel(const ChannelChoi& ch, int steps);
};

struct OutputPair {
    CMat rho;
    CMat rhodot;
};

struct ContractOptions {
    // Re-inject the memory initial state before every channel use after the first.
    bool reset_memory{false};
};

// ρ_Ω = C ⋆ Λ^(N) together with ∂ρ_Ω/∂Ω, on the final S ⊗ A wires.
OutputPair contract(const Strategy& s, const ChannelComb& cc, const ContractOptions& opt = {});

// Running pair on S ⊗ M ⊗ A.
struct StatePair {
    Tensor rho;
    Tensor rhodot;
};

// Linear functional F(ρ, ρ̇) = Tr(ρ̇ E_dot) + Tr(ρ E) pulled back to a cut.
struct EffectPair {
    Tensor e_dot;
    Tensor e;
};

// Inputs to each tooth (index 0..N−1) and the final pre-trace state (index N).
std::vector<StatePair> forward_states(const Strategy& s, const ChannelComb& cc,
                                      const ContractOptions& opt = {});

// Effects on the output of each tooth for the pre-QFI with fixed L.
std::vector<EffectPair> backward_effects(const Strategy& s, const ChannelComb& cc, const CMat& l,
                                         const ContractOptions& opt = {});

// Advances a pair through tooth k and channel use k.
StatePair step_forward(const StatePair& in, const Tooth& tooth, const ChannelComb& cc, int k,
                       const ContractOptions& opt = {});

// Gradient of the pre-QFI w.r.t. the Choi matrix of tooth k given the tooth's
// input pair and output effect.
CMat tooth_gradient(const StatePair& in, const EffectPair& out, const Tooth& tooth);

// Environment tensor D_k with F(C, L) = Tr(C_k D_k) for the current other teeth.
CMat tooth_env(const Strategy& s, const ChannelComb& cc, std::size_t k, const CMat& l);

}  // namespace pmetro::comb
