// iss.cpp — see-saw sweeps, the tooth SDP and restarts

#include "pmetro/iss.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace pmetro::iss {

void IssConfig::validate() const {
    if (!(tol > 0.0)) throw DomainError("IssConfig: tol must be > 0");
    if (restarts < 1) throw DomainError("IssConfig: restarts must be >= 1");
    if (max_sweeps < 1) throw DomainError("IssConfig: max_sweeps must be >= 1");
    if (d_anc < 1) throw DomainError("IssConfig: d_anc must be >= 1");
    if (!(tooth_tol > 0.0)) throw DomainError("IssConfig: tooth_tol must be > 0");
}

double pre_qfi(const comb::OutputPair& out, const CMat& l) {
    if (l.rows() != out.rho.rows() || l.cols() != out.rho.cols()) {
        throw DimensionError("pre_qfi: L dims do not match the output state");
    }
    const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());
    if (hermitian_defect(l) > 1e-9 * scale) throw ContractViolation("pre_qfi: L is not Hermitian");
    return (2.0 * (out.rhodot * l).trace() - (out.rho * l * l).trace()).real();
}

CMat l_step(const comb::OutputPair& out, double eps) { return sld_solve(out.rho, out.rhodot, eps); }

// ---------------------------------------------------------------------------
// Tooth SDP
// ---------------------------------------------------------------------------

namespace {

// Orthonormal basis of Hermitian n×n matrices, stored densely.
std::vector<CMat> hermitian_basis(Index n) {
    std::vector<CMat> b;
    b.reserve(static_cast<std::size_t>(n * n));
    const double r = 1.0 / std::sqrt(2.0);
    for (Index i = 0; i < n; ++i) {
        CMat e = CMat::Zero(n, n);
        e(i, i) = 1.0;
        b.push_back(e);
    }
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            CMat s = CMat::Zero(n, n);
            s(i, j) = r;
            s(j, i) = r;
            b.push_back(s);
            CMat a = CMat::Zero(n, n);
            a(i, j) = cplx(0.0, r);
            a(j, i) = cplx(0.0, -r);
            b.push_back(a);
        }
    return b;
}

// Primal  max <D, X>  s.t.  Tr_out X = 1_in, X ⪰ 0
// Dual    min Tr(Y)   s.t.  S = Y ⊗ 1_out − D ⪰ 0
// The equality constraints are written in an orthonormal Hermitian basis {B_i}
// of the input space: A(X)_i = <B_i ⊗ 1, X>, A*(y) = Σ y_i B_i ⊗ 1.
class ToothSdp {
public:
    ToothSdp(const CMat& d, Index d_in, Index d_out)
        : d_(d), d_in_(d_in), d_out_(d_out), basis_(hermitian_basis(d_in)) {
        const Index m = d_in * d_in;
        b_.resize(m);
        beta_.resize(m, m);
        for (Index i = 0; i < m; ++i) {
            const auto& bi = basis_[static_cast<std::size_t>(i)];
            b_(i) = bi.trace().real();
            for (Index p = 0; p < d_in; ++p)
                for (Index q = 0; q < d_in; ++q) beta_(p * d_in + q, i) = bi(p, q);
        }
    }

    Index constraints() const { return d_in_ * d_in_; }
    const RVec& b() const { return b_; }

    RVec apply(const CMat& x) const {
        const CMat t = partial_trace(x, {d_in_, d_out_}, {0});
        RVec r(constraints());
        for (Index i = 0; i < constraints(); ++i) {
            r(i) = (basis_[static_cast<std::size_t>(i)] * t).trace().real();
        }
        return r;
    }

    CMat small(const RVec& y) const {
        CMat m = CMat::Zero(d_in_, d_in_);
        for (Index i = 0; i < constraints(); ++i) m += y(i) * basis_[static_cast<std::size_t>(i)];
        return m;
    }

    CMat adjoint(const RVec& y) const { return kron(small(y), CMat::Identity(d_out_, d_out_)); }

    // Schur complement M_ij = Re Tr((B_i ⊗ 1) X (B_j ⊗ 1) S⁻¹).
    Eigen::MatrixXd schur(const CMat& x, const CMat& s_inv) const {
        // K[(a,b),(c,e)] = Tr(X_bc P_ea), blocks of size d_out.
        const Index n = d_in_;
        const Index o = d_out_;
        CMat k(n * n, n * n);
        for (Index a = 0; a < n; ++a)
            for (Index b = 0; b < n; ++b)
                for (Index c = 0; c < n; ++c)
                    for (Index e = 0; e < n; ++e) {
                        k(a * n + b, c * n + e) =
                            x.block(b * o, c * o, o, o)
                                .cwiseProduct(s_inv.block(e * o, a * o, o, o).transpose())
                                .sum();
                    }
        Eigen::MatrixXd m = (beta_.transpose() * k * beta_).real();
        return 0.5 * (m + m.transpose());
    }

    double objective(const CMat& x) const { return (d_ * x).trace().real(); }

private:
    const CMat& d_;
    Index d_in_;
    Index d_out_;
    std::vector<CMat> basis_;
    RVec b_;
    CMat beta_;
};

// Largest α ≤ 1 keeping M + α ΔM ⪰ 0, scaled back from the boundary by `frac`.
double step_to_boundary(const Eigen::LLT<CMat>& llt, const CMat& dm, double frac) {
    const CMat l_inv = llt.matrixL().solve(CMat::Identity(dm.rows(), dm.cols()));
    const CMat w = hermitian_part(l_inv * dm * l_inv.adjoint());
    const double lo = Eigen::SelfAdjointEigenSolver<CMat>(w, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (lo >= 0.0) return 1.0;
    return std::min(1.0, frac * (-1.0 / lo));
}

// Renormalizes a PSD C so that Tr_out C = 1_in exactly.
CMat make_trace_preserving(const CMat& c, Index d_in, Index d_out) {
    const CMat w = partial_trace(c, {d_in, d_out}, {0});
    const CMat n = kron(psd_inv_sqrt(hermitian_part(w)), CMat::Identity(d_out, d_out));
    return hermitian_part(n * c * n);
}

}  // namespace

ToothSolution tooth_step(const CMat& d, Index d_in, Index d_out, double tol) {
    if (d.rows() != d_in * d_out || d.cols() != d.rows()) {
        throw DimensionError("tooth_step: D must be (d_in·d_out)²");
    }
    if (!(tol > 0.0)) throw DomainError("tooth_step: tol must be > 0");
    const double dscale = std::max(1.0, d.cwiseAbs().maxCoeff());
    if (hermitian_defect(d) > 1e-8 * dscale) throw ContractViolation("tooth_step: D not Hermitian");
    const CMat dh = hermitian_part(d);

    if (d_in == 1) {
        const auto eig = herm_eig(dh);
        const CVec v = eig.vectors.col(eig.vectors.cols() - 1);
        return {v * v.adjoint(), eig.values(eig.values.size() - 1), 0.0, 0};
    }

    // Mehrotra predictor-corrector on the HKM direction, started from the
    // strictly feasible pair X = 1/d_out, Y = (λ_max(D) + 1)·1.
    const ToothSdp sdp(dh, d_in, d_out);
    const double d_norm = dh.selfadjointView<Eigen::Lower>().operatorNorm();
    const Index dim = d_in * d_out;
    const double n_cone = static_cast<double>(dim);
    const CMat id = CMat::Identity(dim, dim);

    CMat x = id / static_cast<double>(d_out);
    RVec y = RVec::Zero(sdp.constraints());
    const double shift = max_eigenvalue(dh) + 1.0;
    for (Index i = 0; i < d_in; ++i) y(i) = shift;  // diagonal basis elements come first
    CMat s = sdp.adjoint(y) - dh;

    auto certified = [&](const CMat& xc, const RVec& yc, double& obj) {
        const CMat c = make_trace_preserving(xc, d_in, d_out);
        obj = sdp.objective(c);
        return std::pair{c, std::max(0.0, sdp.b().dot(yc) - obj)};
    };

    constexpr int kMaxIter = 100;
    constexpr double kFrac = 0.98;
    int iter = 0;
    CMat best_c = x;
    double best_obj = sdp.objective(x);
    double best_gap = std::numeric_limits<double>::infinity();
    for (; iter < kMaxIter; ++iter) {
        const Eigen::LLT<CMat> lx(x);
        const Eigen::LLT<CMat> ls(s);
        if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) break;

        double obj = 0.0;
        auto [c, gap] = certified(x, y, obj);
        if (gap < best_gap) {
            best_c = c;
            best_obj = obj;
            best_gap = gap;
        }
        const double target = std::max(tol * std::max(1.0, std::abs(best_obj)), 1e-13 * d_norm);
        if (best_gap <= target) break;

        const CMat s_inv = ls.solve(id);
        const double mu = (x * s).trace().real() / n_cone;
        const RVec rp = sdp.b() - sdp.apply(x);
        const CMat rd = dh + s - sdp.adjoint(y);
        const Eigen::LDLT<Eigen::MatrixXd> m(sdp.schur(x, s_inv));

        // ΔX = σμS⁻¹ − X − X ΔS S⁻¹ − corr·S⁻¹, ΔS = A*(Δy) − R_d
        auto direction = [&](double sigma, const CMat& corr, CMat& dx, RVec& dy, CMat& ds) {
            const CMat base = sigma * mu * s_inv - x + x * rd * s_inv - corr * s_inv;
            dy = m.solve(sdp.apply(hermitian_part(base)) - rp);
            ds = sdp.adjoint(dy) - rd;
            dx = hermitian_part(sigma * mu * s_inv - x - x * ds * s_inv - corr * s_inv);
        };

        CMat dx;
        RVec dy;
        CMat ds;
        direction(0.0, CMat::Zero(dim, dim), dx, dy, ds);
        const double ap_aff = step_to_boundary(lx, dx, 1.0);
        const double ad_aff = step_to_boundary(ls, ds, 1.0);
        const double mu_aff = ((x + ap_aff * dx) * (s + ad_aff * ds)).trace().real() / n_cone;
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        const CMat corr = dx * ds;
        direction(sigma, corr, dx, dy, ds);
        const double ap = step_to_boundary(lx, dx, kFrac);
        const double ad = step_to_boundary(ls, ds, kFrac);
        x = hermitian_part(x + ap * dx);
        y += ad * dy;
        s = hermitian_part(sdp.adjoint(y) - dh);
        if (ap < 1e-12 && ad < 1e-12) break;
    }

    // Rounding limits the attainable gap to about 1e-12·‖D‖; accept that floor.
    const double want = std::max(tol * std::max(1.0, std::abs(best_obj)), 1e-11 * d_norm);
    if (!(best_gap <= want)) {
        throw SolverError("tooth_step: duality gap " + std::to_string(best_gap) +
                              " above tolerance " + std::to_string(want),
                          best_c);
    }
    return {best_c, best_obj, best_gap, iter};
}

// ---------------------------------------------------------------------------
// Sweeps and runs
// ---------------------------------------------------------------------------

namespace {

comb::StatePair initial_pair(const comb::ChannelComb& cc) {
    const Dims d0{1, cc.d_mem, 1};
    return {{cc.initial_memory, d0}, {CMat::Zero(cc.d_mem, cc.d_mem), d0}};
}

// Replaces the tooth by the SDP optimum unless that fails to improve on it, so
// a sweep never decreases F even when a solve ends early.
void update_tooth(comb::Tooth& tooth, const CMat& d, double tol) {
    const double current = (tooth.choi * d).trace().real();
    try {
        const auto sol = tooth_step(d, tooth.in_dim(), tooth.out_dim(), tol);
        if (sol.objective >= current) tooth.choi = sol.choi;
    } catch (const SolverError& e) {
        const CMat& c = e.last_feasible();
        if (c.rows() == tooth.choi.rows() && (c * d).trace().real() > current) tooth.choi = c;
    }
}

}  // namespace

double sweep(comb::Strategy& s, const comb::ChannelComb& cc, const CMat& l, double tooth_tol,
             bool backward) {
    const std::size_t n = s.size();
    if (!backward) {
        const auto effects = comb::backward_effects(s, cc, l);
        comb::StatePair cur = initial_pair(cc);
        for (std::size_t k = 0; k < n; ++k) {
            update_tooth(s.teeth[k], comb::tooth_gradient(cur, effects[k], s.teeth[k]), tooth_tol);
            cur = comb::step_forward(cur, s.teeth[k], cc, static_cast<int>(k));
        }
    } else {
        const auto states = comb::forward_states(s, cc);
        for (std::size_t k = n; k-- > 0;) {
            const auto effects = comb::backward_effects(s, cc, l);
            update_tooth(s.teeth[k], comb::tooth_gradient(states[k], effects[k], s.teeth[k]),
                         tooth_tol);
        }
    }
    return pre_qfi(comb::contract(s, cc), l);
}

double strategy_qfi(const comb::Strategy& s, const comb::ChannelComb& cc, double eps) {
    const auto out = comb::contract(s, cc);
    return qfi_of_state(out.rho, out.rhodot, eps);
}

QfiResult iss_single(const comb::ChannelComb& cc, const IssConfig& cfg, int restart_index) {
    cfg.validate();
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(restart_index)};
    std::mt19937_64 rng(seq);
    comb::Strategy s = comb::random_strategy(cc.steps, cc.d_sys, cfg.d_anc, rng);

    QfiResult r;
    auto out = comb::contract(s, cc);
    CMat l = l_step(out, cfg.sld_eps);
    r.value = pre_qfi(out, l);
    r.sweep_history.push_back(r.value);
    r.strategy = s;

    for (int k = 0; k < cfg.max_sweeps; ++k) {
        sweep(s, cc, l, cfg.tooth_tol, cfg.backward_sweeps);
        out = comb::contract(s, cc);
        l = l_step(out, cfg.sld_eps);
        const double q = pre_qfi(out, l);
        const double prev = r.sweep_history.back();
        r.sweep_history.push_back(q);
        r.strategy = s;
        if (std::abs(q - prev) < cfg.tol) {
            r.converged = true;
            break;
        }
    }
    r.value = r.sweep_history.back();
    r.restart_values = {r.value};
    r.best_restart = restart_index;
    return r;
}

QfiResult iss_run(const comb::ChannelComb& cc, const IssConfig& cfg) {
    cfg.validate();
    std::vector<QfiResult> runs(static_cast<std::size_t>(cfg.restarts));
    if (cfg.threads > 1 && cfg.restarts > 1) {
        std::vector<std::future<QfiResult>> jobs;
        for (int r = 0; r < cfg.restarts; ++r) {
            jobs.push_back(std::async(std::launch::async, iss_single, std::cref(cc), std::cref(cfg), r));
        }
        for (int r = 0; r < cfg.restarts; ++r) runs[static_cast<std::size_t>(r)] = jobs[static_cast<std::size_t>(r)].get();
    } else {
        for (int r = 0; r < cfg.restarts; ++r) runs[static_cast<std::size_t>(r)] = iss_single(cc, cfg, r);
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].value > runs[best].value) best = r;
    }
    QfiResult out = std::move(runs[best]);
    out.restart_values.clear();
    for (const auto& r : runs) out.restart_values.push_back(r.value);
    out.best_restart = static_cast<int>(best);
    return out;
}

QfiResult repeated_no_control(const comb::ChannelComb& single, int n, const IssConfig& cfg) {
    if (n < 1) throw DomainError("repeated_no_control: n must be >= 1");
    if (!single.is_fresh()) throw ContractViolation("repeated_no_control: needs a fresh comb");
    return repeated_from(iss_run(single.with_steps(1), cfg), n);
}

QfiResult repeated_from(QfiResult r, int n) {
    if (n < 1) throw DomainError("repeated_from: n must be >= 1");
    const double k = static_cast<double>(n);
    r.value *= k;
    for (auto& h : r.sweep_history) h *= k;
    for (auto& v : r.restart_values) v *= k;
    return r;
}

}  // namespace pmetro::iss
