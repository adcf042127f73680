// linalg.hpp — dense complex kernel: tensor products, partial traces, Hermitian
// eigensolver, matrix exponential with Fréchet derivative and the state QFI.
//
// Conventions used across pmetro:
//   * Multi-partite operators are stored with the first listed factor as the most
//     significant index (row index = i0*d1*d2 + i1*d2 + i2 for dims [d0,d1,d2]).
//   * Vectorization is column stacking: vec(X)[i + d*j] = X(i,j), so that
//     vec(A X B) = (B^T ⊗ A) vec(X).

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "pmetro/errors.hpp"

namespace pmetro {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

// Ordered subsystem dimensions annotating a matrix.
using Dims = std::vector<Index>;

Index dim_product(const Dims& dims);

// Throws DimensionError unless every entry is >= 1 and the product equals `total`.
void check_dims(const Dims& dims, Index total, const char* where);

namespace ops {

CMat identity(Index d);
CMat sigma_x();
CMat sigma_y();
CMat sigma_z();
// |0><1| with index 0 the excited level: raises the two-level system.
CMat sigma_plus();
// |1><0|: lowers the two-level system.
CMat sigma_minus();
// Truncated bosonic annihilation operator on Fock states |0>..|d-1>: a|n> = sqrt(n)|n-1>.
CMat annihilation(Index d);
// |i><j| in dimension d.
CMat basis_op(Index d, Index i, Index j);

}  // namespace ops

CMat kron(const CMat& a, const CMat& b);
CMat kron_all(const std::vector<CMat>& factors);

// Reorders tensor factors: factor j of the result is factor perm[j] of the input.
CMat permute_subsystems(const CMat& m, const Dims& dims, const std::vector<int>& perm);

// Traces out every factor not listed in `keep`; kept factors retain their order.
CMat partial_trace(const CMat& m, const Dims& dims, const std::vector<int>& keep);

// Transposes the listed factors.
CMat partial_transpose(const CMat& m, const Dims& dims, const std::vector<int>& which);

CVec vec(const CMat& m);
CMat unvec(const CVec& v, Index rows, Index cols);

// exp(a) by scaling and squaring with degree 3..13 Padé approximants, degree
// selected from the 1-norm. Accurate to roughly unit roundoff relative to
// exp(‖a‖) for the matrix sizes used here (≤ 256).
CMat expm(const CMat& a);

// Directional derivative D exp(a)[e], read off the upper-right block of
// exp([[a, e], [0, a]]).
CMat expm_frechet(const CMat& a, const CMat& e);

// max |m - m^†| over entries.
double hermitian_defect(const CMat& m);
CMat hermitian_part(const CMat& m);

struct HermEig {
    RVec values;   // ascending
    CMat vectors;  // columns are eigenvectors
};

// Eigendecomposition of a Hermitian matrix. Throws ContractViolation when the
// input deviates from Hermitian by more than tol·max(1, ‖h‖_max).
HermEig herm_eig(const CMat& h, double tol = 1e-10);

double min_eigenvalue(const CMat& h);
double max_eigenvalue(const CMat& h);

// ½‖a - b‖_1 for Hermitian a, b.
double trace_distance(const CMat& a, const CMat& b);

// Principal square root of a positive semidefinite matrix.
CMat psd_sqrt(const CMat& h);
// Inverse square root; eigenvalues below floor are treated as floor.
CMat psd_inv_sqrt(const CMat& h, double floor = 1e-300);

// Default cutoff for the SLD: pairs with p_i + p_j <= eps·p_max are dropped.
inline constexpr double kSldEps = 1e-10;

// Symmetric logarithmic derivative: solves rho L + L rho = 2 rhodot in rho's eigenbasis.
CMat sld_solve(const CMat& rho, const CMat& rhodot, double eps = kSldEps);

// Quantum Fisher information of the family rho with derivative rhodot.
double qfi_of_state(const CMat& rho, const CMat& rhodot, double eps = kSldEps);

}  // namespace pmetro
