// choi.hpp — Choi–Jamiołkowski representation of linear maps and their local action
// on multi-partite operators.
//
// A map T: L(H_in) -> L(H_out) is represented by
//     C = Σ_ij |i><j| ⊗ T(|i><j|)       (input factor first),
// so that T(X) = Tr_in[(X^T ⊗ 1) C]. The superoperator S acts on column-stacked
// vectors: vec(T(X)) = S vec(X).

#pragma once

#include <vector>

#include "pmetro/linalg.hpp"

namespace pmetro {

// Choi matrix of a parametrized channel together with its parameter derivative.
struct ChannelChoi {
    Index d_in{0};
    Index d_out{0};
    CMat choi;
    CMat dchoi;
};

struct ChannelReport {
    double min_eigenvalue{0.0};  // of choi
    double tp_defect{0.0};       // ‖Tr_out choi − 1‖_max
    double dtp_defect{0.0};      // ‖Tr_out dchoi‖_max
    double dchoi_hermitian_defect{0.0};

    bool ok(double tol = 1e-9) const {
        return min_eigenvalue >= -tol && tp_defect <= tol && dtp_defect <= tol &&
               dchoi_hermitian_defect <= tol;
    }
};

ChannelReport check_channel(const ChannelChoi& ch);

namespace comb {

// Superoperator (d_out² × d_in²) -> Choi matrix (d_in·d_out square).
CMat choi_reshuffle(const CMat& superop, Index d_in, Index d_out);
// Choi matrix -> superoperator.
CMat choi_unshuffle(const CMat& choi, Index d_in, Index d_out);

// T(X) for a map given by its Choi matrix.
CMat apply_choi(const CMat& choi, Index d_in, Index d_out, const CMat& x);
// Heisenberg-picture adjoint T†(E).
CMat apply_choi_adjoint(const CMat& choi, Index d_in, Index d_out, const CMat& e);

// A multi-partite operator tagged with its factor dimensions.
struct Tensor {
    CMat op;
    Dims dims;
};

// Applies (T ⊗ id) where T acts on the listed factors of `state`, in the listed
// order. T maps factors with dims `in_dims` to factors with dims `out_dims`;
// each acted factor is replaced in place.
Tensor apply_on(const CMat& choi, const Dims& in_dims, const Dims& out_dims, const Tensor& state,
                const std::vector<int>& factors);

// Adjoint action (T† ⊗ id) on an effect operator living on the output side.
Tensor apply_adjoint_on(const CMat& choi, const Dims& in_dims, const Dims& out_dims,
                        const Tensor& effect, const std::vector<int>& factors);

// Operator D with Tr[(T ⊗ id)(state) · effect] = Tr[C D] for every Choi matrix C
// with the given wire dims. `state` carries input dims, `effect` output dims.
CMat choi_gradient(const Tensor& state, const Tensor& effect, const Dims& in_dims,
                   const Dims& out_dims, const std::vector<int>& factors);

}  // namespace comb
}  // namespace pmetro
