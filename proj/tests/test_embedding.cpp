// test_embedding.cpp — pole expansion, pseudomode generator and elementary channels

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pmetro/embedding.hpp"
#include "pmetro/jc_analytic.hpp"

using namespace pmetro;
using namespace pmetro::embedding;

namespace {

constexpr cplx kI{0.0, 1.0};

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

Liouvillian lorentzian_liouvillian(double g0, double lam, double w0, double omega) {
    return build_liouvillian(PseudomodeModel::lorentzian({g0, lam, w0}, omega));
}

}  // namespace

TEST(Poles, FigureParameters) {
    const auto pe = poles_of_lorentzian({2.457, 2.5, 0.0});
    ASSERT_EQ(pe.size(), 1u);
    EXPECT_NEAR(std::abs(pe[0].z - cplx(0.0, -2.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(pe[0].residue - cplx(0.0, 3.07125)), 0.0, 1e-12);
}

TEST(Poles, DetunedCentre) {
    const auto pe = poles_of_lorentzian({1.0, 1.0, 5.0});
    EXPECT_NEAR(std::abs(pe[0].z - cplx(5.0, -1.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(pe[0].residue - cplx(0.0, 0.5)), 0.0, 1e-15);
}

TEST(Poles, ResidueImaginaryPartPositive) {
    for (double g : {0.1, 1.0, 7.0})
        for (double l : {0.3, 2.5, 100.0}) {
            const auto pe = poles_of_lorentzian({g, l, 0.3});
            EXPECT_NEAR(pe[0].residue.imag(), g * l / 2.0, 1e-12 * g * l);
            EXPECT_EQ(pe[0].residue.real(), 0.0);
        }
}

TEST(Poles, InvalidDensityThrows) {
    EXPECT_THROW(poles_of_lorentzian({-1.0, 1.0, 0.0}), DomainError);
    EXPECT_THROW(poles_of_lorentzian({1.0, 0.0, 0.0}), DomainError);
}

TEST(CorrelationFunction, ValueAtZero) {
    const auto pe = poles_of_lorentzian({2.457, 2.5, 0.0});
    EXPECT_NEAR(std::abs(correlation_function(pe, 0.0) - cplx(2.457 * 2.5 / 2.0)), 0.0, 1e-12);
}

TEST(CorrelationFunction, ExponentialDecay) {
    const auto pe = poles_of_lorentzian({2.457, 2.5, 0.0});
    for (double t1 : {0.0, 0.3, 1.1})
        for (double t2 : {0.4, 2.0}) {
            const cplx ratio = correlation_function(pe, t2) / correlation_function(pe, t1);
            EXPECT_NEAR(std::abs(ratio - std::exp(-2.5 * (t2 - t1))), 0.0, 1e-12);
        }
}

TEST(CorrelationFunction, TwoPoleSum) {
    const PoleExpansion pe{{cplx(1.0, -0.5), cplx(0.0, 0.3)}, {cplx(-2.0, -1.5), cplx(0.2, 0.7)}};
    for (double t : {0.0, 0.25, 1.0, 3.0}) {
        cplx want = 0.0;
        want += -kI * cplx(0.0, 0.3) * std::exp(-kI * cplx(1.0, -0.5) * t);
        want += -kI * cplx(0.2, 0.7) * std::exp(-kI * cplx(-2.0, -1.5) * t);
        EXPECT_NEAR(std::abs(correlation_function(pe, t) - want), 0.0, 1e-14);
    }
}

TEST(CorrelationFunction, ReproducedByDampedMode) {
    for (double w0 : {0.0, 1.3}) {
        const auto pm = PseudomodeModel::lorentzian({2.457, 2.5, w0});
        const auto pe = poles_of_lorentzian({2.457, 2.5, w0});
        for (double t : {0.0, 0.2, 0.9, 2.0}) {
            EXPECT_NEAR(std::abs(pseudomode_correlation(pm, t) - correlation_function(pe, t)), 0.0, 1e-10);
        }
    }
}

TEST(Pseudomode, CouplingFromResidue) {
    const auto pm = PseudomodeModel::lorentzian({2.457, 2.5, 0.0});
    ASSERT_EQ(pm.couplings.size(), 1u);
    EXPECT_NEAR(pm.couplings[0], std::sqrt(2.457 * 2.5 / 2.0), 1e-14);
    EXPECT_EQ(pm.dim(), 4);
}

TEST(Pseudomode, NonPhysicalResidueRejected) {
    EXPECT_THROW(PseudomodeModel::from_poles({{cplx(0.0, -1.0), cplx(1.0, 0.0)}}), ContractViolation);
}

TEST(Liouvillian, TracePreserving) {
    const auto lv = lorentzian_liouvillian(2.457, 2.5, 0.0, 0.0);
    const CVec vid = vec(ops::identity(lv.dim));
    EXPECT_LT((vid.transpose() * lv.matrix).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((vid.transpose() * lv.dmatrix_domega).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Liouvillian, DecoupledLimitIsCommutator) {
    const double omega = 0.8;
    const double w0 = 0.6;
    const auto lv = lorentzian_liouvillian(0.0, 1e-12, w0, omega);
    const CMat h = 0.5 * omega * kron(ops::sigma_z(), ops::identity(2)) +
                   w0 * kron(ops::identity(2), ops::annihilation(2).adjoint() * ops::annihilation(2));
    EXPECT_LT(max_abs(lv.matrix - commutator_superop(h)), 1e-10);
}

TEST(Liouvillian, GroundStateStationary) {
    for (double omega : {0.0, 0.7, -3.0}) {
        const auto lv = lorentzian_liouvillian(2.457, 2.5, 0.0, omega);
        const CMat ground = kron(ops::basis_op(2, 1, 1), ops::basis_op(2, 0, 0));
        EXPECT_LT((lv.matrix * vec(ground)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Liouvillian, OmegaDerivativeMatchesDifference) {
    const double h = 1e-5;
    const auto lp = lorentzian_liouvillian(2.457, 2.5, 0.0, 0.3 + h);
    const auto lm = lorentzian_liouvillian(2.457, 2.5, 0.0, 0.3 - h);
    const auto l0 = lorentzian_liouvillian(2.457, 2.5, 0.0, 0.3);
    EXPECT_LT(max_abs((lp.matrix - lm.matrix) / (2 * h) - l0.dmatrix_domega), 1e-9);
}

TEST(Channel, SmallStepNearIdentity) {
    const auto lv = lorentzian_liouvillian(2.457, 2.5, 0.0, 0.0);
    const auto ch = channel_from_liouvillian(lv, 1e-8);
    EXPECT_LT(max_abs(ch.choi - oracle::choi_of_map([](const CMat& x) { return x; }, 4, 4)), 1e-6);
}

TEST(Channel, InvariantsAtFigureParameters) {
    const auto lv = lorentzian_liouvillian(2.457, 2.5, 0.0, 0.0);
    const auto ch = channel_from_liouvillian(lv, 0.5);
    const auto rep = check_channel(ch);
    EXPECT_GE(rep.min_eigenvalue, -1e-10);
    EXPECT_LE(rep.tp_defect, 1e-12);
    EXPECT_LE(rep.dtp_defect, 1e-12);
    EXPECT_LT(max_abs(partial_trace(ch.choi, {4, 4}, {0}) - ops::identity(4)), 1e-12);
}

TEST(Channel, SemigroupComposition) {
    const auto lv = lorentzian_liouvillian(2.457, 2.5, 0.0, 0.2);
    const CMat s1 = comb::choi_unshuffle(channel_from_liouvillian(lv, 0.3).choi, 4, 4);
    const CMat s2 = comb::choi_unshuffle(channel_from_liouvillian(lv, 0.6).choi, 4, 4);
    EXPECT_LT(max_abs(s1 * s1 - s2), 1e-12);
}

TEST(Channel, DerivativeMatchesDifference) {
    const double h = 1e-6;
    for (double omega : {0.0, 0.9}) {
        const auto c0 = channel_from_liouvillian(lorentzian_liouvillian(2.457, 2.5, 0.0, omega), 0.5);
        const auto cp = channel_from_liouvillian(lorentzian_liouvillian(2.457, 2.5, 0.0, omega + h), 0.5);
        const auto cm = channel_from_liouvillian(lorentzian_liouvillian(2.457, 2.5, 0.0, omega - h), 0.5);
        EXPECT_LT(max_abs((cp.choi - cm.choi) / (2 * h) - c0.dchoi), 1e-8);
        const auto f0 = fresh_channel(lorentzian_liouvillian(2.457, 2.5, 0.0, omega), 0.5);
        const auto fp = fresh_channel(lorentzian_liouvillian(2.457, 2.5, 0.0, omega + h), 0.5);
        const auto fm = fresh_channel(lorentzian_liouvillian(2.457, 2.5, 0.0, omega - h), 0.5);
        EXPECT_LT(max_abs((fp.choi - fm.choi) / (2 * h) - f0.dchoi), 1e-8);
    }
}

TEST(Channel, NonPositiveStepThrows) {
    const auto lv = lorentzian_liouvillian(2.457, 2.5, 0.0, 0.0);
    EXPECT_THROW(channel_from_liouvillian(lv, 0.0), DomainError);
    EXPECT_THROW(fresh_channel(lv, -1.0), DomainError);
}

TEST(FreshChannel, MatchesClosedForm) {
    for (double omega : {0.0, 0.4}) {
        const auto lv = lorentzian_liouvillian(2.457, 2.5, 0.0, omega);
        const auto num = fresh_channel(lv, 0.5);
        const auto ana = jc::analytic_fresh_channel({2.457, 2.5, 0.0, omega}, 0.5);
        EXPECT_LT(max_abs(num.choi - ana.choi), 1e-8);
        EXPECT_LT(max_abs(num.dchoi - ana.dchoi), 1e-8);
    }
}

TEST(FreshChannel, UncoupledIsPhaseRotation) {
    const double omega = 0.7;
    const double dt = 0.5;
    const auto lv = lorentzian_liouvillian(0.0, 2.5, 0.0, omega);
    const CMat u = (-kI * 0.5 * omega * dt * ops::sigma_z()).exp();
    const CMat want = oracle::choi_of_map([&](const CMat& x) { return CMat(u * x * u.adjoint()); }, 2, 2);
    EXPECT_LT(max_abs(fresh_channel(lv, dt).choi - want), 1e-13);
}

TEST(FreshChannel, MarkovSurvival) {
    const double g0 = 2.457;
    const double dt = 0.5;
    const auto lv = lorentzian_liouvillian(g0, 100.0 * g0, 0.0, 0.0);
    const CMat out = comb::apply_choi(fresh_channel(lv, dt).choi, 2, 2, ops::basis_op(2, 0, 0));
    EXPECT_NEAR(out(0, 0).real() / std::exp(-g0 * dt), 1.0, 1e-2);
}

TEST(ReducedDynamics, MatchesClosedFormWeakAndStrong) {
    std::mt19937_64 rng(21);
    for (double ratio : {0.1, 0.983}) {
        const double lam = 2.5;
        const jc::JcParams p{ratio * lam, lam, 0.0, 0.0};
        const auto lv = lorentzian_liouvillian(p.gamma0, lam, 0.0, 0.0);
        for (int rep = 0; rep < 3; ++rep) {
            const CMat rho0 = oracle::random_density(2, rng);
            for (int k = 0; k < 50; ++k) {
                const double t = 5.0 * k / 49.0;
                EXPECT_LT(trace_distance(reduced_state(lv, rho0, t), jc::analytic_state(p, rho0, t)), 1e-8);
            }
        }
    }
}
