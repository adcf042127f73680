// embedding.cpp — pseudomode construction and elementary channels

#include "pmetro/embedding.hpp"

#include <cmath>
#include <string>

namespace pmetro::embedding {

void SpectralDensity::validate() const {
    if (!(gamma0 >= 0.0)) throw DomainError("SpectralDensity: gamma0 must be >= 0");
    if (!(lambda > 0.0)) throw DomainError("SpectralDensity: lambda must be > 0");
}

double SpectralDensity::operator()(double omega) const {
    const double det = omega0 - omega;
    return gamma0 * lambda * lambda / (det * det + lambda * lambda);
}

PoleExpansion poles_of_lorentzian(const SpectralDensity& sd) {
    sd.validate();
    return {Pole{cplx(sd.omega0, -sd.lambda), cplx(0.0, 0.5 * sd.gamma0 * sd.lambda)}};
}

cplx correlation_function(const PoleExpansion& pe, double tau) {
    if (tau < 0.0) throw DomainError("correlation_function: tau must be >= 0");
    cplx acc = 0.0;
    for (const auto& p : pe) acc += p.residue * std::exp(cplx(0.0, -1.0) * p.z * tau);
    return cplx(0.0, -1.0) * acc;
}

PseudomodeModel PseudomodeModel::from_poles(PoleExpansion modes, double omega, Index d_mode) {
    if (d_mode < 2) throw DimensionError("PseudomodeModel: d_mode must be >= 2");
    PseudomodeModel pm;
    pm.d_mode = d_mode;
    pm.omega = omega;
    for (const auto& p : modes) {
        if (!(p.z.imag() < 0.0)) {
            throw DomainError("PseudomodeModel: pole must lie in the lower half plane");
        }
        const cplx g2 = cplx(0.0, -1.0) * p.residue;
        if (std::abs(g2.imag()) > 1e-12 * std::max(1.0, std::abs(g2)) || g2.real() < 0.0) {
            throw ContractViolation("PseudomodeModel: coupling sqrt(-i r) is not real");
        }
        pm.couplings.push_back(std::sqrt(g2.real()));
    }
    pm.modes = std::move(modes);
    return pm;
}

PseudomodeModel PseudomodeModel::lorentzian(const SpectralDensity& sd, double omega,
                                            Index d_mode) {
    return from_poles(poles_of_lorentzian(sd), omega, d_mode);
}

Index PseudomodeModel::memory_dim() const {
    Index d = 1;
    for (std::size_t l = 0; l < modes.size(); ++l) d *= d_mode;
    return d;
}

Dims PseudomodeModel::factor_dims() const {
    Dims dims{d_sys};
    for (std::size_t l = 0; l < modes.size(); ++l) dims.push_back(d_mode);
    return dims;
}

CMat PseudomodeModel::mode_lowering(std::size_t l) const {
    std::vector<CMat> factors{ops::identity(d_sys)};
    for (std::size_t k = 0; k < modes.size(); ++k) {
        factors.push_back(k == l ? ops::annihilation(d_mode) : ops::identity(d_mode));
    }
    return kron_all(factors);
}

CMat PseudomodeModel::dhamiltonian_domega() const {
    if (d_sys != 2) throw DimensionError("PseudomodeModel: the system must be a qubit");
    return kron(0.5 * ops::sigma_z(), ops::identity(memory_dim()));
}

CMat PseudomodeModel::hamiltonian() const {
    const Index dm = memory_dim();
    CMat h = omega * dhamiltonian_domega();
    const CMat sp = kron(ops::sigma_plus(), ops::identity(dm));
    for (std::size_t l = 0; l < modes.size(); ++l) {
        const CMat b = mode_lowering(l);
        h += modes[l].z.real() * b.adjoint() * b;
        h += couplings[l] * (sp * b + (sp * b).adjoint());
    }
    return h;
}

CMat commutator_superop(const CMat& h) {
    const CMat id = CMat::Identity(h.rows(), h.cols());
    return cplx(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
}

CMat dissipator_superop(const CMat& j) {
    const CMat id = CMat::Identity(j.rows(), j.cols());
    const CMat jdj = j.adjoint() * j;
    return kron(j.conjugate(), j) - 0.5 * (kron(id, jdj) + kron(jdj.transpose(), id));
}

Liouvillian build_liouvillian(const PseudomodeModel& pm) {
    if (pm.d_mode < 2) throw DimensionError("build_liouvillian: d_mode must be >= 2");
    if (pm.couplings.size() != pm.modes.size()) {
        throw DimensionError("build_liouvillian: one coupling per mode required");
    }
    Liouvillian lv;
    lv.dim = pm.dim();
    lv.d_sys = pm.d_sys;
    lv.d_mem = pm.memory_dim();
    lv.matrix = commutator_superop(pm.hamiltonian());
    for (std::size_t l = 0; l < pm.modes.size(); ++l) {
        lv.matrix += 2.0 * (-pm.modes[l].z.imag()) * dissipator_superop(pm.mode_lowering(l));
    }
    lv.dmatrix_domega = commutator_superop(pm.dhamiltonian_domega());
    return lv;
}

CMat memory_vacuum(const Liouvillian& lv) { return ops::basis_op(lv.d_mem, 0, 0); }

ChannelChoi channel_from_liouvillian(const Liouvillian& lv, double dt) {
    if (!(dt > 0.0)) throw DomainError("channel_from_liouvillian: dt must be > 0");
    const CMat s = expm(lv.matrix * dt);
    const CMat ds = expm_frechet(lv.matrix * dt, lv.dmatrix_domega * dt);
    return {lv.dim, lv.dim, hermitian_part(comb::choi_reshuffle(s, lv.dim, lv.dim)),
            hermitian_part(comb::choi_reshuffle(ds, lv.dim, lv.dim))};
}

namespace {

// Choi of X -> Tr_M[unvec(S vec(X ⊗ vac))] for a superoperator S on S ⊗ M.
CMat reduce_superop_to_choi(const CMat& s, const Liouvillian& lv) {
    const Index ds = lv.d_sys;
    const CMat vac = memory_vacuum(lv);
    const Dims dims{ds, lv.d_mem};
    CMat choi(ds * ds, ds * ds);
    for (Index i = 0; i < ds; ++i) {
        for (Index j = 0; j < ds; ++j) {
            const CMat in = kron(ops::basis_op(ds, i, j), vac);
            const CMat out = unvec(s * vec(in), lv.dim, lv.dim);
            choi.block(i * ds, j * ds, ds, ds) = partial_trace(out, dims, {0});
        }
    }
    return choi;
}

}  // namespace

ChannelChoi fresh_channel(const Liouvillian& lv, double dt) {
    if (!(dt > 0.0)) throw DomainError("fresh_channel: dt must be > 0");
    const CMat s = expm(lv.matrix * dt);
    const CMat ds = expm_frechet(lv.matrix * dt, lv.dmatrix_domega * dt);
    return {lv.d_sys, lv.d_sys, hermitian_part(reduce_superop_to_choi(s, lv)),
            hermitian_part(reduce_superop_to_choi(ds, lv))};
}

CMat reduced_state(const Liouvillian& lv, const CMat& rho_sys, double t) {
    if (rho_sys.rows() != lv.d_sys) throw DimensionError("reduced_state: system dimension");
    const CMat rho = kron(rho_sys, memory_vacuum(lv));
    const CMat out = unvec(expm(lv.matrix * t) * vec(rho), lv.dim, lv.dim);
    return partial_trace(out, {lv.d_sys, lv.d_mem}, {0});
}

cplx pseudomode_correlation(const PseudomodeModel& pm, double tau) {
    if (tau < 0.0) throw DomainError("pseudomode_correlation: tau must be >= 0");
    // Mode-only model: drop the system factor.
    const Index dm = pm.memory_dim();
    std::vector<CMat> lowering;
    for (std::size_t l = 0; l < pm.modes.size(); ++l) {
        std::vector<CMat> factors;
        for (std::size_t k = 0; k < pm.modes.size(); ++k) {
            factors.push_back(k == l ? ops::annihilation(pm.d_mode) : ops::identity(pm.d_mode));
        }
        lowering.push_back(kron_all(factors));
    }
    CMat h = CMat::Zero(dm, dm);
    CMat bath_op = CMat::Zero(dm, dm);
    for (std::size_t l = 0; l < pm.modes.size(); ++l) {
        h += pm.modes[l].z.real() * lowering[l].adjoint() * lowering[l];
        bath_op += pm.couplings[l] * (lowering[l] + lowering[l].adjoint());
    }
    CMat gen = commutator_superop(h);
    for (std::size_t l = 0; l < pm.modes.size(); ++l) {
        gen += 2.0 * (-pm.modes[l].z.imag()) * dissipator_superop(lowering[l]);
    }
    const CMat vac = ops::basis_op(dm, 0, 0);
    const CMat evolved = unvec(expm(gen * tau) * vec(bath_op * vac), dm, dm);
    return (bath_op * evolved).trace();
}

}  // namespace pmetro::embedding
