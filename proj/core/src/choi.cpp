// choi.cpp — Choi reshuffling and local map application

#include "pmetro/choi.hpp"

#include <algorithm>
#include <string>

namespace pmetro {

ChannelReport check_channel(const ChannelChoi& ch) {
    ChannelReport r;
    const Dims dims{ch.d_in, ch.d_out};
    r.min_eigenvalue = min_eigenvalue(ch.choi);
    r.tp_defect = (partial_trace(ch.choi, dims, {0}) - CMat::Identity(ch.d_in, ch.d_in))
                      .cwiseAbs()
                      .maxCoeff();
    r.dtp_defect = partial_trace(ch.dchoi, dims, {0}).cwiseAbs().maxCoeff();
    r.dchoi_hermitian_defect = hermitian_defect(ch.dchoi);
    return r;
}

namespace comb {

CMat choi_reshuffle(const CMat& superop, Index d_in, Index d_out) {
    if (superop.rows() != d_out * d_out || superop.cols() != d_in * d_in) {
        throw DimensionError("choi_reshuffle: superoperator shape does not match d_in, d_out");
    }
    CMat c(d_in * d_out, d_in * d_out);
    for (Index i = 0; i < d_in; ++i)
        for (Index j = 0; j < d_in; ++j)
            for (Index k = 0; k < d_out; ++k)
                for (Index l = 0; l < d_out; ++l)
                    c(i * d_out + k, j * d_out + l) = superop(k + d_out * l, i + d_in * j);
    return c;
}

CMat choi_unshuffle(const CMat& choi, Index d_in, Index d_out) {
    if (choi.rows() != d_in * d_out || choi.cols() != d_in * d_out) {
        throw DimensionError("choi_unshuffle: Choi shape does not match d_in, d_out");
    }
    CMat s(d_out * d_out, d_in * d_in);
    for (Index i = 0; i < d_in; ++i)
        for (Index j = 0; j < d_in; ++j)
            for (Index k = 0; k < d_out; ++k)
                for (Index l = 0; l < d_out; ++l)
                    s(k + d_out * l, i + d_in * j) = choi(i * d_out + k, j * d_out + l);
    return s;
}

CMat apply_choi(const CMat& choi, Index d_in, Index d_out, const CMat& x) {
    if (choi.rows() != d_in * d_out || x.rows() != d_in || x.cols() != d_in) {
        throw DimensionError("apply_choi: dimension mismatch");
    }
    CMat y = CMat::Zero(d_out, d_out);
    for (Index i = 0; i < d_in; ++i) {
        for (Index j = 0; j < d_in; ++j) {
            if (x(i, j) == cplx(0.0)) continue;
            y.noalias() += x(i, j) * choi.block(i * d_out, j * d_out, d_out, d_out);
        }
    }
    return y;
}

CMat apply_choi_adjoint(const CMat& choi, Index d_in, Index d_out, const CMat& e) {
    if (choi.rows() != d_in * d_out || e.rows() != d_out || e.cols() != d_out) {
        throw DimensionError("apply_choi_adjoint: dimension mismatch");
    }
    // T†(E)_{ji} = Tr[C_{ij} E] with C_{ij} the (i,j) output block.
    CMat g(d_in, d_in);
    for (Index i = 0; i < d_in; ++i) {
        for (Index j = 0; j < d_in; ++j) {
            g(j, i) = (choi.block(i * d_out, j * d_out, d_out, d_out).transpose().array() *
                       e.array())
                          .sum();
        }
    }
    return g;
}

namespace {

struct FrontLayout {
    std::vector<int> perm;  // acted factors first, rest in original order
    Index d_act{1};
    Index d_rest{1};
};

FrontLayout front_layout(const Dims& dims, const std::vector<int>& factors, const Dims& expected,
                         const char* where) {
    if (factors.size() != expected.size()) {
        throw DimensionError(std::string(where) + ": factor list and wire dims differ in length");
    }
    FrontLayout fl;
    std::vector<bool> used(dims.size(), false);
    for (std::size_t k = 0; k < factors.size(); ++k) {
        const int f = factors[k];
        if (f < 0 || static_cast<std::size_t>(f) >= dims.size() ||
            used[static_cast<std::size_t>(f)]) {
            throw DimensionError(std::string(where) + ": invalid factor index");
        }
        if (dims[static_cast<std::size_t>(f)] != expected[k]) {
            throw DimensionError(std::string(where) + ": wire dimension mismatch on factor " +
                                 std::to_string(f));
        }
        used[static_cast<std::size_t>(f)] = true;
        fl.perm.push_back(f);
        fl.d_act *= expected[k];
    }
    for (std::size_t f = 0; f < dims.size(); ++f) {
        if (!used[f]) {
            fl.perm.push_back(static_cast<int>(f));
            fl.d_rest *= dims[f];
        }
    }
    return fl;
}

Dims replaced_dims(const Dims& dims, const std::vector<int>& factors, const Dims& new_dims) {
    Dims out(dims);
    for (std::size_t k = 0; k < factors.size(); ++k) {
        out[static_cast<std::size_t>(factors[k])] = new_dims[k];
    }
    return out;
}

Dims permuted(const Dims& dims, const std::vector<int>& perm) {
    Dims out(perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) out[j] = dims[static_cast<std::size_t>(perm[j])];
    return out;
}

std::vector<int> inverse(const std::vector<int>& perm) {
    std::vector<int> inv(perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) inv[static_cast<std::size_t>(perm[j])] =
        static_cast<int>(j);
    return inv;
}

// Applies `blockwise` to every (r, r') block of a front-permuted operator,
// writing blocks of size d_new into the result.
template <typename F>
CMat map_blocks(const CMat& p, Index d_old, Index d_new, Index d_rest, F&& blockwise) {
    CMat out(d_new * d_rest, d_new * d_rest);
    CMat blk(d_old, d_old);
    for (Index r = 0; r < d_rest; ++r) {
        for (Index rp = 0; rp < d_rest; ++rp) {
            for (Index x = 0; x < d_old; ++x)
                for (Index xp = 0; xp < d_old; ++xp) blk(x, xp) = p(x * d_rest + r, xp * d_rest + rp);
            const CMat nb = blockwise(blk);
            for (Index y = 0; y < d_new; ++y)
                for (Index yp = 0; yp < d_new; ++yp) out(y * d_rest + r, yp * d_rest + rp) = nb(y, yp);
        }
    }
    return out;
}

}  // namespace

Tensor apply_on(const CMat& choi, const Dims& in_dims, const Dims& out_dims, const Tensor& state,
                const std::vector<int>& factors) {
    check_dims(state.dims, state.op.rows(), "apply_on");
    const auto fl = front_layout(state.dims, factors, in_dims, "apply_on");
    const Index d_out = dim_product(out_dims);
    if (choi.rows() != fl.d_act * d_out) throw DimensionError("apply_on: Choi size mismatch");
    const CMat p = std::is_sorted(fl.perm.begin(), fl.perm.end())
                       ? state.op
                       : permute_subsystems(state.op, state.dims, fl.perm);
    const CMat mapped = map_blocks(p, fl.d_act, d_out, fl.d_rest, [&](const CMat& b) {
        return apply_choi(choi, fl.d_act, d_out, b);
    });
    const Dims new_dims = replaced_dims(state.dims, factors, out_dims);
    return {permute_subsystems(mapped, permuted(new_dims, fl.perm), inverse(fl.perm)), new_dims};
}

Tensor apply_adjoint_on(const CMat& choi, const Dims& in_dims, const Dims& out_dims,
                        const Tensor& effect, const std::vector<int>& factors) {
    check_dims(effect.dims, effect.op.rows(), "apply_adjoint_on");
    const auto fl = front_layout(effect.dims, factors, out_dims, "apply_adjoint_on");
    const Index d_in = dim_product(in_dims);
    if (choi.rows() != fl.d_act * d_in) {
        throw DimensionError("apply_adjoint_on: Choi size mismatch");
    }
    const CMat p = permute_subsystems(effect.op, effect.dims, fl.perm);
    const CMat mapped = map_blocks(p, fl.d_act, d_in, fl.d_rest, [&](const CMat& b) {
        return apply_choi_adjoint(choi, d_in, fl.d_act, b);
    });
    const Dims new_dims = replaced_dims(effect.dims, factors, in_dims);
    return {permute_subsystems(mapped, permuted(new_dims, fl.perm), inverse(fl.perm)), new_dims};
}

CMat choi_gradient(const Tensor& state, const Tensor& effect, const Dims& in_dims,
                   const Dims& out_dims, const std::vector<int>& factors) {
    const auto fs = front_layout(state.dims, factors, in_dims, "choi_gradient(state)");
    const auto fe = front_layout(effect.dims, factors, out_dims, "choi_gradient(effect)");
    if (fs.d_rest != fe.d_rest) throw DimensionError("choi_gradient: spectator dims differ");
    const Index din = fs.d_act;
    const Index dout = fe.d_act;
    const Index dr = fs.d_rest;
    const CMat ps = permute_subsystems(state.op, state.dims, fs.perm);
    const CMat pe = permute_subsystems(effect.op, effect.dims, fe.perm);
    // D[(x',y'),(x,y)] = Σ_{r,r'} σ[(x,r),(x',r')] E[(y',r'),(y,r)]
    CMat d = CMat::Zero(din * dout, din * dout);
    CMat sb(din, din);
    CMat eb(dout, dout);
    for (Index r = 0; r < dr; ++r) {
        for (Index rp = 0; rp < dr; ++rp) {
            for (Index x = 0; x < din; ++x)
                for (Index xp = 0; xp < din; ++xp) sb(xp, x) = ps(x * dr + r, xp * dr + rp);
            for (Index y = 0; y < dout; ++y)
                for (Index yp = 0; yp < dout; ++yp) eb(yp, y) = pe(yp * dr + rp, y * dr + r);
            d += kron(sb, eb);
        }
    }
    return d;
}

}  // namespace comb
}  // namespace pmetro
