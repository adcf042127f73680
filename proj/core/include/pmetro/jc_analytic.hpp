// jc_analytic.hpp — closed-form damped Jaynes–Cummings reference dynamics
//
// The excited-state amplitude of a two-level system coupled to a Lorentzian
// bath at zero temperature, relative to its initial value and in the frame
// rotating with the system frequency Ω:
//
//   c1(t) = exp(−x t/2) [cosh(d t/2) + (x/d) sinh(d t/2)],
//   x = λ − i(Ω − ω0),   d = sqrt(x² − 2γ0λ).
//
// The Schrödinger-picture coherence picks up the extra phase exp(−iΩt).

#pragma once

#include <vector>

#include "pmetro/choi.hpp"
#include "pmetro/linalg.hpp"

namespace pmetro::jc {

struct JcParams {
    double gamma0{1.0};
    double lambda{1.0};
    double omega0{0.0};
    double omega{0.0};

    // gamma0 == 0 is accepted (decoupled limit); negative values are not.
    void validate() const;
};

cplx c1(const JcParams& p, double t);
cplx dc1_domega(const JcParams& p, double t);

// Time-dependent decay rate of the equivalent time-local master equation at
// Ω = ω0. Throws PoleError where the rate diverges (c1(t) = 0).
double gamma_t(const JcParams& p, double t);

struct RateSample {
    double t;
    double rate;
};

// Samples gamma_t on (0, t_max] with spacing dt, skipping divergence points.
std::vector<RateSample> gamma_scan(const JcParams& p, double t_max, double dt);

// Amplitude-damping channel of the exact reduced dynamics, with analytic ∂/∂Ω.
ChannelChoi analytic_fresh_channel(const JcParams& p, double t);

// State after the reduced dynamics acts on rho_sys for time t.
CMat analytic_state(const JcParams& p, const CMat& rho_sys, double t);

// New coupling γ0,f for step t_f so that the noise accumulated over the longer of
// the two steps is unchanged at Ω = ω0:
//   t_i = n t_f:  c1(t_f; γ0,f)^n = c1(t_i; γ0,i)
//   t_f = m t_i:  c1(t_f; γ0,f)   = c1(t_i; γ0,i)^m
// Solved by bracketed bisection with secant refinement on [1e-6, 1e3·γ0,i].
double rescale_gamma0(double t_i, double t_f, double lambda, double gamma0_i);

// Constant Markovian rate x with exp(−x t_i) = |c1(t_i)|² at Ω = ω0 = 0.
double gamma_c(double t_i, double gamma0, double lambda);

}  // namespace pmetro::jc
