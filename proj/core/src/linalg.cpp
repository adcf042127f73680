// linalg.cpp — dense complex kernel

#include "pmetro/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace pmetro {

Index dim_product(const Dims& dims) {
    return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

void check_dims(const Dims& dims, Index total, const char* where) {
    for (Index d : dims) {
        if (d < 1) throw DimensionError(std::string(where) + ": subsystem dimension < 1");
    }
    if (dim_product(dims) != total) {
        throw DimensionError(std::string(where) + ": product of dims " +
                             std::to_string(dim_product(dims)) + " != matrix dimension " +
                             std::to_string(total));
    }
}

namespace ops {

CMat identity(Index d) { return CMat::Identity(d, d); }

CMat sigma_x() {
    CMat m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

CMat sigma_y() {
    CMat m(2, 2);
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return m;
}

CMat sigma_z() {
    CMat m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

CMat sigma_plus() { return basis_op(2, 0, 1); }

CMat sigma_minus() { return basis_op(2, 1, 0); }

CMat annihilation(Index d) {
    CMat a = CMat::Zero(d, d);
    for (Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

CMat basis_op(Index d, Index i, Index j) {
    if (i < 0 || j < 0 || i >= d || j >= d) throw DimensionError("basis_op: index out of range");
    CMat m = CMat::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

}  // namespace ops

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMat kron_all(const std::vector<CMat>& factors) {
    CMat out = CMat::Identity(1, 1);
    for (const auto& f : factors) out = kron(out, f);
    return out;
}

namespace {

// Flat index of the permuted layout for every flat index of the original layout.
std::vector<Index> permutation_map(const Dims& dims, const std::vector<int>& perm) {
    const auto n = dims.size();
    const Index total = dim_product(dims);
    Dims new_dims(n);
    for (std::size_t j = 0; j < n; ++j) new_dims[j] = dims[static_cast<std::size_t>(perm[j])];

    // stride of old factor perm[j] inside the new layout
    std::vector<Index> new_stride_of_old(n);
    Index stride = 1;
    for (std::size_t j = n; j-- > 0;) {
        new_stride_of_old[static_cast<std::size_t>(perm[j])] = stride;
        stride *= new_dims[j];
    }

    std::vector<Index> map(static_cast<std::size_t>(total));
    std::vector<Index> digit(n, 0);
    for (Index flat = 0; flat < total; ++flat) {
        Index target = 0;
        for (std::size_t f = 0; f < n; ++f) target += digit[f] * new_stride_of_old[f];
        map[static_cast<std::size_t>(flat)] = target;
        for (std::size_t f = n; f-- > 0;) {
            if (++digit[f] < dims[f]) break;
            digit[f] = 0;
        }
    }
    return map;
}

void check_perm(const std::vector<int>& perm, std::size_t n, const char* where) {
    std::vector<int> sorted(perm);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (sorted.size() != n || sorted[i] != static_cast<int>(i)) {
            throw DimensionError(std::string(where) + ": not a permutation of the factors");
        }
    }
}

}  // namespace

CMat permute_subsystems(const CMat& m, const Dims& dims, const std::vector<int>& perm) {
    check_dims(dims, m.rows(), "permute_subsystems");
    if (m.rows() != m.cols()) throw DimensionError("permute_subsystems: matrix not square");
    check_perm(perm, dims.size(), "permute_subsystems");
    const auto map = permutation_map(dims, perm);
    CMat out(m.rows(), m.cols());
    for (Index c = 0; c < m.cols(); ++c) {
        const Index nc = map[static_cast<std::size_t>(c)];
        for (Index r = 0; r < m.rows(); ++r) out(map[static_cast<std::size_t>(r)], nc) = m(r, c);
    }
    return out;
}

CMat partial_trace(const CMat& m, const Dims& dims, const std::vector<int>& keep) {
    check_dims(dims, m.rows(), "partial_trace");
    if (m.rows() != m.cols()) throw DimensionError("partial_trace: matrix not square");
    std::vector<int> kept(keep);
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    std::vector<int> perm;
    Index dk = 1;
    for (int k : kept) {
        if (k < 0 || static_cast<std::size_t>(k) >= dims.size()) {
            throw DimensionError("partial_trace: keep index out of range");
        }
        perm.push_back(k);
        dk *= dims[static_cast<std::size_t>(k)];
    }
    for (int f = 0; f < static_cast<int>(dims.size()); ++f) {
        if (!std::binary_search(kept.begin(), kept.end(), f)) perm.push_back(f);
    }
    const CMat p = permute_subsystems(m, dims, perm);
    const Index dt = m.rows() / dk;
    CMat out = CMat::Zero(dk, dk);
    for (Index i = 0; i < dk; ++i) {
        for (Index j = 0; j < dk; ++j) {
            cplx s = 0.0;
            for (Index t = 0; t < dt; ++t) s += p(i * dt + t, j * dt + t);
            out(i, j) = s;
        }
    }
    return out;
}

CMat partial_transpose(const CMat& m, const Dims& dims, const std::vector<int>& which) {
    check_dims(dims, m.rows(), "partial_transpose");
    const auto n = dims.size();
    std::vector<Index> stride(n);
    Index s = 1;
    for (std::size_t f = n; f-- > 0;) {
        stride[f] = s;
        s *= dims[f];
    }
    std::vector<bool> flip(n, false);
    for (int w : which) {
        if (w < 0 || static_cast<std::size_t>(w) >= n) {
            throw DimensionError("partial_transpose: factor index out of range");
        }
        flip[static_cast<std::size_t>(w)] = true;
    }
    CMat out(m.rows(), m.cols());
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            Index nr = 0;
            Index nc = 0;
            for (std::size_t f = 0; f < n; ++f) {
                const Index dr = (r / stride[f]) % dims[f];
                const Index dc = (c / stride[f]) % dims[f];
                nr += (flip[f] ? dc : dr) * stride[f];
                nc += (flip[f] ? dr : dc) * stride[f];
            }
            out(nr, nc) = m(r, c);
        }
    }
    return out;
}

CVec vec(const CMat& m) { return Eigen::Map<const CVec>(m.data(), m.size()); }

CMat unvec(const CVec& v, Index rows, Index cols) {
    if (v.size() != rows * cols) throw DimensionError("unvec: size mismatch");
    return Eigen::Map<const CMat>(v.data(), rows, cols);
}

namespace {

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// 1-norm thresholds below which degree m keeps the backward error under 2^-53.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double norm1(const CMat& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

template <std::size_t N>
void pade_low(const CMat& a, const std::array<double, N>& b, CMat& u, CMat& v) {
    const Index n = a.rows();
    const CMat a2 = a * a;
    CMat power = CMat::Identity(n, n);
    CMat uo = CMat::Zero(n, n);
    CMat ve = CMat::Zero(n, n);
    for (std::size_t k = 0; k < N; k += 2) {
        ve += b[k] * power;
        uo += b[k + 1] * power;
        power = power * a2;
    }
    u = a * uo;
    v = ve;
}

void pade13(const CMat& a, CMat& u, CMat& v) {
    const auto& b = kPade13;
    const Index n = a.rows();
    const CMat id = CMat::Identity(n, n);
    const CMat a2 = a * a;
    const CMat a4 = a2 * a2;
    const CMat a6 = a4 * a2;
    const CMat uu = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                    b[3] * a2 + b[1] * id;
    u = a * uu;
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
        b[0] * id;
}

}  // namespace

CMat expm(const CMat& a) {
    if (a.rows() != a.cols()) throw DimensionError("expm: matrix not square");
    const Index n = a.rows();
    if (n == 0) return a;
    const double nrm = norm1(a);
    CMat u;
    CMat v;
    int squarings = 0;
    if (nrm <= kTheta3) {
        pade_low(a, kPade3, u, v);
    } else if (nrm <= kTheta5) {
        pade_low(a, kPade5, u, v);
    } else if (nrm <= kTheta7) {
        pade_low(a, kPade7, u, v);
    } else if (nrm <= kTheta9) {
        pade_low(a, kPade9, u, v);
    } else {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta13))));
        pade13(a / std::ldexp(1.0, squarings), u, v);
    }
    CMat r = (v - u).partialPivLu().solve(v + u);
    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

CMat expm_frechet(const CMat& a, const CMat& e) {
    if (a.rows() != a.cols() || e.rows() != a.rows() || e.cols() != a.cols()) {
        throw DimensionError("expm_frechet: a and e must be square with equal dims");
    }
    const Index n = a.rows();
    CMat block = CMat::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = a;
    block.topRightCorner(n, n) = e;
    block.bottomRightCorner(n, n) = a;
    return expm(block).topRightCorner(n, n);
}

double hermitian_defect(const CMat& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

HermEig herm_eig(const CMat& h, double tol) {
    if (h.rows() != h.cols()) throw DimensionError("herm_eig: matrix not square");
    const double scale = h.size() ? std::max(1.0, h.cwiseAbs().maxCoeff()) : 1.0;
    if (hermitian_defect(h) > tol * scale) {
        throw ContractViolation("herm_eig: input is not Hermitian (defect " +
                                std::to_string(hermitian_defect(h)) + ")");
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h));
    return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const CMat& h) {
    return Eigen::SelfAdjointEigenSolver<CMat>(hermitian_part(h), Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
}

double max_eigenvalue(const CMat& h) {
    return Eigen::SelfAdjointEigenSolver<CMat>(hermitian_part(h), Eigen::EigenvaluesOnly)
        .eigenvalues()
        .maxCoeff();
}

double trace_distance(const CMat& a, const CMat& b) {
    const CMat diff = hermitian_part(a - b);
    return 0.5 * Eigen::SelfAdjointEigenSolver<CMat>(diff, Eigen::EigenvaluesOnly)
                     .eigenvalues()
                     .cwiseAbs()
                     .sum();
}

CMat psd_sqrt(const CMat& h) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h));
    const RVec w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

CMat psd_inv_sqrt(const CMat& h, double floor) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h));
    const RVec w = es.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

struct EigenFrame {
    RVec p;
    CMat rdot;  // rhodot in rho's eigenbasis
    CMat vecs;
    double cutoff;
};

EigenFrame eigen_frame(const CMat& rho, const CMat& rhodot, double eps) {
    if (rhodot.rows() != rho.rows() || rhodot.cols() != rho.cols()) {
        throw DimensionError("sld: rho and rhodot dimensions differ");
    }
    auto [p, v] = herm_eig(rho, 1e-9);
    const double pmax = std::max(p.maxCoeff(), 0.0);
    return {p, v.adjoint() * hermitian_part(rhodot) * v, v,
            eps * std::max(pmax, std::numeric_limits<double>::min())};
}

}  // namespace

CMat sld_solve(const CMat& rho, const CMat& rhodot, double eps) {
    const auto f = eigen_frame(rho, rhodot, eps);
    const Index n = rho.rows();
    CMat l = CMat::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double s = f.p(i) + f.p(j);
            if (s > f.cutoff) l(i, j) = 2.0 * f.rdot(i, j) / s;
        }
    }
    return hermitian_part(f.vecs * l * f.vecs.adjoint());
}

double qfi_of_state(const CMat& rho, const CMat& rhodot, double eps) {
    const auto f = eigen_frame(rho, rhodot, eps);
    const Index n = rho.rows();
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double s = f.p(i) + f.p(j);
            if (s > f.cutoff) acc += 2.0 * std::norm(f.rdot(i, j)) / s;
        }
    }
    return acc;
}

}  // namespace pmetro
