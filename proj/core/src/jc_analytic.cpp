// jc_analytic.cpp — damped Jaynes–Cummings closed forms

#include "pmetro/jc_analytic.hpp"

#include <cmath>
#include <sstream>

namespace pmetro::jc {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kSeriesRadius = 0.1;

struct Kernel {
    cplx x;  // λ − i(Ω − ω0)
    cplx d;
    cplx u;  // d t / 2
};

Kernel kernel(const JcParams& p, double t) {
    const cplx x = cplx(p.lambda, -(p.omega - p.omega0));
    const cplx d = std::sqrt(x * x - 2.0 * p.gamma0 * p.lambda);
    return {x, d, 0.5 * d * t};
}

// exp(−x t/2)·cosh(u) and exp(−x t/2)·sinh(u)/d, overflow-safe and continuous at d = 0.
void damped_hyperbolics(const Kernel& k, double t, cplx& ch, cplx& shd) {
    const cplx damp = -0.5 * k.x * t;
    if (std::abs(k.u) < kSeriesRadius) {
        const cplx u2 = k.u * k.u;
        const cplx e = std::exp(damp);
        ch = e * std::cosh(k.u);
        shd = e * 0.5 * t * (1.0 + u2 / 6.0 + u2 * u2 / 120.0 + u2 * u2 * u2 / 5040.0);
        return;
    }
    const cplx ep = std::exp(damp + k.u);
    const cplx em = std::exp(damp - k.u);
    ch = 0.5 * (ep + em);
    shd = 0.5 * (ep - em) / k.d;
}

}  // namespace

void JcParams::validate() const {
    if (!(gamma0 >= 0.0)) throw DomainError("JcParams: gamma0 must be >= 0");
    if (!(lambda > 0.0)) throw DomainError("JcParams: lambda must be > 0");
}

cplx c1(const JcParams& p, double t) {
    p.validate();
    if (t < 0.0) throw DomainError("c1: t must be >= 0");
    const auto k = kernel(p, t);
    cplx ch;
    cplx shd;
    damped_hyperbolics(k, t, ch, shd);
    return ch + k.x * shd;
}

cplx dc1_domega(const JcParams& p, double t) {
    p.validate();
    if (t < 0.0) throw DomainError("dc1_domega: t must be >= 0");
    const auto k = kernel(p, t);
    // ∂c1/∂x = exp(−xt/2) γ0λ [t cosh(u) − 2 sinh(u)/d] / d², and ∂x/∂Ω = −i.
    cplx bracket;
    if (std::abs(k.u) < kSeriesRadius) {
        const cplx u2 = k.u * k.u;
        bracket = std::exp(-0.5 * k.x * t) * (t * t * t / 4.0) *
                  (1.0 / 3.0 + u2 / 30.0 + u2 * u2 / 840.0 + u2 * u2 * u2 / 45360.0);
    } else {
        cplx ch;
        cplx shd;
        damped_hyperbolics(k, t, ch, shd);
        bracket = (t * ch - 2.0 * shd) / (k.d * k.d);
    }
    return -kI * p.gamma0 * p.lambda * bracket;
}

double gamma_t(const JcParams& p, double t) {
    p.validate();
    if (t < 0.0) throw DomainError("gamma_t: t must be >= 0");
    if (p.omega != p.omega0) throw DomainError("gamma_t: defined on resonance (omega == omega0)");
    if (t == 0.0) return 0.0;
    const auto k = kernel(p, t);
    cplx ch;
    cplx shd;
    damped_hyperbolics(k, t, ch, shd);
    // γ(t) = 2γ0λ sinh/(d cosh + λ sinh); the common factor exp(−λt/2)/d cancels.
    const cplx den = ch + p.lambda * shd;
    const double scale = std::abs(ch) + p.lambda * std::abs(shd);
    if (std::abs(den) <= 1e-13 * scale) {
        throw PoleError("gamma_t: decay rate diverges at t = " + std::to_string(t), t);
    }
    return (2.0 * p.gamma0 * p.lambda * shd / den).real();
}

std::vector<RateSample> gamma_scan(const JcParams& p, double t_max, double dt) {
    if (!(dt > 0.0)) throw DomainError("gamma_scan: dt must be > 0");
    std::vector<RateSample> out;
    const auto steps = static_cast<long>(std::floor(t_max / dt + 1e-9));
    out.reserve(static_cast<std::size_t>(std::max(0L, steps)));
    for (long s = 1; s <= steps; ++s) {
        const double t = static_cast<double>(s) * dt;
        try {
            out.push_back({t, gamma_t(p, t)});
        } catch (const PoleError&) {
        }
    }
    return out;
}

ChannelChoi analytic_fresh_channel(const JcParams& p, double t) {
    const cplx a = c1(p, t);
    const cplx da = dc1_domega(p, t);
    const cplx rot = std::exp(-kI * p.omega * t);
    const cplx coh = rot * a;
    const cplx dcoh = rot * (-kI * t * a + da);
    const double pop = std::norm(a);
    const double dpop = 2.0 * (std::conj(a) * da).real();

    ChannelChoi ch{2, 2, CMat::Zero(4, 4), CMat::Zero(4, 4)};
    // Choi index (input, output) -> input*2 + output; basis 0 = excited.
    ch.choi(0, 0) = pop;
    ch.choi(1, 1) = 1.0 - pop;
    ch.choi(3, 3) = 1.0;
    ch.choi(0, 3) = coh;
    ch.choi(3, 0) = std::conj(coh);
    ch.dchoi(0, 0) = dpop;
    ch.dchoi(1, 1) = -dpop;
    ch.dchoi(0, 3) = dcoh;
    ch.dchoi(3, 0) = std::conj(dcoh);
    return ch;
}

CMat analytic_state(const JcParams& p, const CMat& rho_sys, double t) {
    const auto ch = analytic_fresh_channel(p, t);
    return comb::apply_choi(ch.choi, 2, 2, rho_sys);
}

namespace {

double resonant_c1(double t, double lambda, double gamma0) {
    return c1(JcParams{gamma0, lambda, 0.0, 0.0}, t).real();
}

}  // namespace

double rescale_gamma0(double t_i, double t_f, double lambda, double gamma0_i) {
    if (!(t_i > 0.0) || !(t_f > 0.0)) throw DomainError("rescale_gamma0: times must be > 0");
    if (!(lambda > 0.0) || !(gamma0_i > 0.0)) {
        throw DomainError("rescale_gamma0: lambda and gamma0_i must be > 0");
    }
    if (t_i == t_f) return gamma0_i;

    const double ratio = t_i / t_f;
    const bool refine = ratio > 1.0;  // finer steps: n sub-steps per original step
    const double multiple = refine ? ratio : 1.0 / ratio;
    const double rounded = std::round(multiple);
    if (std::abs(multiple - rounded) > 1e-9 * multiple) {
        throw DomainError("rescale_gamma0: step lengths must be integer multiples of each other");
    }
    const int n = static_cast<int>(rounded);
    const double base = resonant_c1(t_i, lambda, gamma0_i);
    const double target = refine ? base : std::pow(base, n);
    auto f = [&](double g) {
        const double c = resonant_c1(t_f, lambda, g);
        return (refine ? std::pow(c, n) : c) - target;
    };

    const double lo_end = 1e-6;
    const double hi_end = 1e3 * gamma0_i;
    constexpr int kGrid = 2000;
    double a = lo_end;
    double fa = f(a);
    double b = a;
    double fb = fa;
    bool found = false;
    for (int s = 1; s <= kGrid; ++s) {
        b = lo_end * std::pow(hi_end / lo_end, static_cast<double>(s) / kGrid);
        fb = f(b);
        if (fb == 0.0) return b;
        if ((fa < 0.0) != (fb < 0.0)) {
            found = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!found) {
        std::ostringstream msg;
        msg << "rescale_gamma0: no root in bracket [" << lo_end << ", " << hi_end
            << "]; f(lo) = " << f(lo_end) << ", f(hi) = " << f(hi_end);
        throw DomainError(msg.str());
    }

    // Bisection until the bracket is tight, then secant steps kept inside it.
    for (int it = 0; it < 200; ++it) {
        const double width = b - a;
        double m = 0.5 * (a + b);
        if (width < 1e-3 * m && fa != fb) {
            const double s = b - fb * (b - a) / (fb - fa);
            if (s > a && s < b) m = s;
        }
        const double fm = f(m);
        if (fm == 0.0 || std::abs(fm) < 1e-15 || width < 4e-16 * m) return m;
        if ((fa < 0.0) != (fm < 0.0)) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

double gamma_c(double t_i, double gamma0, double lambda) {
    if (!(t_i > 0.0)) throw DomainError("gamma_c: t_i must be > 0");
    const double surv = std::norm(c1(JcParams{gamma0, lambda, 0.0, 0.0}, t_i));
    if (!(surv > 0.0)) throw DomainError("gamma_c: |c1(t_i)| = 0, rate diverges");
    return -std::log(surv) / t_i;
}

}  // namespace pmetro::jc
