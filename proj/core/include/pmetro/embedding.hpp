// embedding.hpp — pseudomode Markovian embedding of a structured bosonic bath
//
// Lorentzian spectral density -> pole/residue expansion of the bath correlation
// function -> system + pseudomode GKLS generator -> elementary parametrized
// channel and its Ω-derivative.
//
// Basis conventions: the two-level system uses index 0 = excited, 1 = ground,
// so σ_z = diag(1, -1) and σ_+ = |0><1|. Pseudomodes use Fock states with
// index 0 = vacuum. Composite operators are ordered S ⊗ M_1 ⊗ ... ⊗ M_L.

#pragma once

#include <vector>

#include "pmetro/choi.hpp"
#include "pmetro/linalg.hpp"

namespace pmetro::embedding {

// γ(ω) = γ0 λ² / ((ω0 − ω)² + λ²); γ0 = 0 is the decoupled limit.
struct SpectralDensity {
    double gamma0{1.0};
    double lambda{1.0};
    double omega0{0.0};

    void validate() const;
    double operator()(double omega) const;
};

struct Pole {
    cplx z;        // ξ − iλ
    cplx residue;  // r
};

using PoleExpansion = std::vector<Pole>;

PoleExpansion poles_of_lorentzian(const SpectralDensity& sd);

// C(τ) = −i Σ r_l exp(−i z_l τ), τ ≥ 0.
cplx correlation_function(const PoleExpansion& pe, double tau);

struct PseudomodeModel {
    Index d_sys{2};
    Index d_mode{2};  // Fock truncation per pseudomode
    double omega{0.0};
    PoleExpansion modes;
    std::vector<double> couplings;  // g_l = sqrt(−i r_l)

    // Derives couplings from the poles; throws ContractViolation when some
    // −i r_l is not a nonnegative real number.
    static PseudomodeModel from_poles(PoleExpansion modes, double omega = 0.0, Index d_mode = 2);
    static PseudomodeModel lorentzian(const SpectralDensity& sd, double omega = 0.0,
                                      Index d_mode = 2);

    Index memory_dim() const;
    Index dim() const { return d_sys * memory_dim(); }
    Dims factor_dims() const;

    // H' = (Ω/2)σ_z + Σ ξ_l b_l†b_l + Σ g_l (σ_+ b_l + σ_- b_l†)
    CMat hamiltonian() const;
    CMat dhamiltonian_domega() const;
    // b_l embedded in the full S ⊗ M space
    CMat mode_lowering(std::size_t l) const;
};

struct Liouvillian {
    Index dim{0};
    Index d_sys{0};
    Index d_mem{0};
    CMat matrix;          // acts on column-stacked vec(ρ)
    CMat dmatrix_domega;  // ∂/∂Ω of `matrix`
};

Liouvillian build_liouvillian(const PseudomodeModel& pm);

// Superoperator of −i[H, ·].
CMat commutator_superop(const CMat& h);
// Superoperator of J · J† − ½{J†J, ·}.
CMat dissipator_superop(const CMat& j);

// Λ = exp(L dt) on S ⊗ M as a Choi matrix, with its Ω-derivative from the
// Fréchet derivative of the exponential.
ChannelChoi channel_from_liouvillian(const Liouvillian& lv, double dt);

// S-only channel: attach the memory vacuum, evolve for dt, trace the memory.
ChannelChoi fresh_channel(const Liouvillian& lv, double dt);

// Reduced system state Tr_M exp(L t)(ρ_S ⊗ |0><0|_M).
CMat reduced_state(const Liouvillian& lv, const CMat& rho_sys, double t);

// Memory vacuum |0><0| on all pseudomodes.
CMat memory_vacuum(const Liouvillian& lv);

// Two-point function ⟨B'(τ)B'(0)⟩ of the pseudomode-plus-reservoir bath seen by
// the system, evaluated through the regression theorem on the damped mode
// alone: B' = Σ g_l (b_l + b_l†), vacuum initial state.
cplx pseudomode_correlation(const PseudomodeModel& pm, double tau);

}  // namespace pmetro::embedding
