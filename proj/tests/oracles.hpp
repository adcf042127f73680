// oracles.hpp — independent reference computations used only by the tests
//
// Nothing here calls into the code path it is meant to check: channels are
// built from explicit basis actions, exponentials from Eigen's unsupported
// module or plain Taylor sums, QFI optima by brute-force search.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "pmetro/linalg.hpp"

namespace oracle {

using pmetro::CMat;
using pmetro::CVec;
using pmetro::cplx;
using pmetro::Index;

inline CMat random_matrix(Index r, Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMat m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) m(i, j) = cplx(n(rng), n(rng));
    return m;
}

inline CMat random_hermitian(Index d, std::mt19937_64& rng) {
    const CMat g = random_matrix(d, d, rng);
    return 0.5 * (g + g.adjoint());
}

inline CMat random_density(Index d, std::mt19937_64& rng) {
    const CMat g = random_matrix(d, d, rng);
    CMat r = g * g.adjoint();
    return r / r.trace();
}

inline CMat random_unitary(Index d, std::mt19937_64& rng) {
    Eigen::HouseholderQR<CMat> qr(random_matrix(d, d, rng));
    return qr.householderQ() * CMat::Identity(d, d);
}

inline CMat expm_reference(const CMat& a) { return a.exp(); }

// Plain Taylor series with scaling and squaring, no Padé.
inline CMat expm_taylor(const CMat& a, int terms = 40) {
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int s = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
    const CMat b = a / std::pow(2.0, s);
    CMat sum = CMat::Identity(a.rows(), a.cols());
    CMat term = sum;
    for (int k = 1; k <= terms; ++k) {
        term = term * b / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

// Choi matrix Σ |i><j| ⊗ T(|i><j|) from the action of the map.
inline CMat choi_of_map(const std::function<CMat(const CMat&)>& t, Index d_in, Index d_out) {
    CMat c = CMat::Zero(d_in * d_out, d_in * d_out);
    for (Index i = 0; i < d_in; ++i)
        for (Index j = 0; j < d_in; ++j) {
            CMat e = CMat::Zero(d_in, d_in);
            e(i, j) = 1.0;
            c.block(i * d_out, j * d_out, d_out, d_out) = t(e);
        }
    return c;
}

// Map with the given Kraus operators.
inline std::function<CMat(const CMat&)> kraus_map(std::vector<CMat> ks) {
    return [ks = std::move(ks)](const CMat& x) {
        CMat out = CMat::Zero(ks.front().rows(), ks.front().rows());
        for (const auto& k : ks) out += k * x * k.adjoint();
        return out;
    };
}

// Kraus operators of a random channel d_in -> d_out with `rank` operators.
inline std::vector<CMat> random_kraus(Index d_in, Index d_out, Index rank, std::mt19937_64& rng) {
    Eigen::HouseholderQR<CMat> qr(random_matrix(d_out * rank, d_in, rng));
    const CMat v = qr.householderQ() * CMat::Identity(d_out * rank, d_in);
    std::vector<CMat> ks;
    for (Index r = 0; r < rank; ++r) ks.push_back(v.block(r * d_out, 0, d_out, d_in));
    return ks;
}

// 4(<ψ'|ψ'> − |<ψ|ψ'>|²) for a normalized family.
inline double pure_state_qfi(const CVec& psi, const CVec& dpsi) {
    return 4.0 * (dpsi.squaredNorm() - std::norm(psi.dot(dpsi)));
}

// QFI from the fidelity-free eigen formula, written out independently.
inline double qfi_eigen(const CMat& rho, const CMat& rhodot) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho + rho.adjoint()));
    const CMat v = es.eigenvectors();
    const CMat r = v.adjoint() * rhodot * v;
    const auto& p = es.eigenvalues();
    double f = 0.0;
    for (Index i = 0; i < p.size(); ++i)
        for (Index j = 0; j < p.size(); ++j) {
            const double s = p(i) + p(j);
            if (s > 1e-10 * p.maxCoeff()) f += 2.0 * std::norm(r(i, j)) / s;
        }
    return f;
}

// Minimal Nelder–Mead simplex search (maximizes f).
inline std::vector<double> nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                                           std::vector<double> x0, double step, int iters,
                                           double* best_value = nullptr) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> s(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += step;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = -f(s[i]);
    auto point = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = c[k] + t * (w[k] - c[k]);
        return p;
    };
    for (int it = 0; it < iters; ++it) {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (auto i : idx) {
            s2.push_back(s[i]);
            f2.push_back(fv[i]);
        }
        s = s2;
        fv = f2;
        if (std::abs(fv[n] - fv[0]) < 1e-15 * (1.0 + std::abs(fv[0]))) break;
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) c[k] += s[i][k] / static_cast<double>(n);
        const auto xr = point(c, s[n], -1.0);
        const double fr = -f(xr);
        if (fr < fv[0]) {
            const auto xe = point(c, s[n], -2.0);
            const double fe = -f(xe);
            if (fe < fr) {
                s[n] = xe;
                fv[n] = fe;
            } else {
                s[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            s[n] = xr;
            fv[n] = fr;
        } else {
            const auto xc = point(c, s[n], 0.5);
            const double fc = -f(xc);
            if (fc < fv[n]) {
                s[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    s[i] = point(s[0], s[i], 0.5);
                    fv[i] = -f(s[i]);
                }
            }
        }
    }
    const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
    if (best_value) *best_value = -fv[static_cast<std::size_t>(best)];
    return s[static_cast<std::size_t>(best)];
}

// Optimal single-use QFI of a qubit channel with a qubit ancilla, by a grid
// over Schmidt-form probes followed by simplex refinement over all pure
// two-qubit states. `apply` and `dapply` give Λ(X) and ∂Λ(X) on the system.
inline double brute_force_channel_qfi(const std::function<CMat(const CMat&)>& apply,
                                      const std::function<CMat(const CMat&)>& dapply, int grid = 10) {
    auto extend = [](const std::function<CMat(const CMat&)>& t, const CMat& rho) {
        // (T ⊗ id) on S ⊗ A, system factor first.
        CMat out = CMat::Zero(4, 4);
        for (Index a = 0; a < 2; ++a)
            for (Index b = 0; b < 2; ++b) {
                CMat blk(2, 2);
                for (Index i = 0; i < 2; ++i)
                    for (Index j = 0; j < 2; ++j) blk(i, j) = rho(i * 2 + a, j * 2 + b);
                const CMat tb = t(blk);
                for (Index i = 0; i < 2; ++i)
                    for (Index j = 0; j < 2; ++j) out(i * 2 + a, j * 2 + b) += tb(i, j);
            }
        return out;
    };
    auto value = [&](const CVec& psi) {
        const CMat rho = psi * psi.adjoint();
        return qfi_eigen(extend(apply, rho), extend(dapply, rho));
    };
    auto from_params = [](const std::vector<double>& x) {
        CVec v(4);
        for (Index i = 0; i < 4; ++i) v(i) = cplx(x[2 * i], x[2 * i + 1]);
        return CVec(v / v.norm());
    };
    const double pi = std::acos(-1.0);
    double best = -1.0;
    CVec best_psi;
    for (int ia = 0; ia < grid; ++ia)
        for (int ib = 0; ib < 2 * grid; ++ib)
            for (int it = 0; it <= grid; ++it)
                for (int ip = 0; ip < 2 * grid; ++ip) {
                    const double alpha = pi * ia / grid;
                    const double beta = pi * ib / grid;
                    const double theta = 0.5 * pi * it / grid;
                    const double phi = pi * ip / grid;
                    // system basis {u0, u1} rotated by (alpha, beta), ancilla basis fixed
                    CVec u0(2), u1(2);
                    u0 << std::cos(alpha / 2), std::polar(std::sin(alpha / 2), beta);
                    u1 << -std::polar(std::sin(alpha / 2), -beta), std::cos(alpha / 2);
                    CVec a0(2), a1(2);
                    a0 << 1, 0;
                    a1 << 0, 1;
                    CVec psi = std::cos(theta) * pmetro::kron(u0, a0) +
                               std::polar(std::sin(theta), phi) * pmetro::kron(u1, a1);
                    const double v = value(psi);
                    if (v > best) {
                        best = v;
                        best_psi = psi;
                    }
                }
    std::vector<double> x0(8);
    for (Index i = 0; i < 4; ++i) {
        x0[2 * i] = best_psi(i).real();
        x0[2 * i + 1] = best_psi(i).imag();
    }
    for (int round = 0; round < 3; ++round) {
        double v = 0.0;
        x0 = nelder_mead_max([&](const std::vector<double>& x) { return value(from_params(x)); }, x0,
                             0.05 / (round + 1), 4000, &v);
        best = std::max(best, v);
    }
    return best;
}

}  // namespace oracle
