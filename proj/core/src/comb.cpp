// comb.cpp — link product, strategy bookkeeping and sequential contraction

#include "pmetro/comb.hpp"

#include <algorithm>
#include <set>

namespace pmetro::comb {

namespace {

constexpr int kSys = 0;
constexpr int kMem = 1;
constexpr int kAnc = 2;

void check_unique_labels(const std::vector<Wire>& wires, const char* which) {
    std::set<int> seen;
    for (const auto& w : wires) {
        if (!seen.insert(w.label).second) {
            throw DimensionError(std::string("link: duplicate wire label in operand ") + which);
        }
    }
}

Dims wire_dims(const std::vector<Wire>& wires) {
    Dims d;
    for (const auto& w : wires) d.push_back(w.dim);
    return d;
}

}  // namespace

LinkOperand link(const LinkOperand& a, const LinkOperand& b) {
    check_unique_labels(a.wires, "A");
    check_unique_labels(b.wires, "B");
    check_dims(wire_dims(a.wires), a.op.rows(), "link(A)");
    check_dims(wire_dims(b.wires), b.op.rows(), "link(B)");

    std::vector<int> a_free, a_shared, b_shared, b_free;
    for (std::size_t i = 0; i < a.wires.size(); ++i) {
        const auto it = std::find_if(b.wires.begin(), b.wires.end(),
                                     [&](const Wire& w) { return w.label == a.wires[i].label; });
        if (it == b.wires.end()) {
            a_free.push_back(static_cast<int>(i));
        } else {
            if (it->dim != a.wires[i].dim) {
                throw DimensionError("link: shared wire " + std::to_string(it->label) +
                                     " has different dims");
            }
            a_shared.push_back(static_cast<int>(i));
            b_shared.push_back(static_cast<int>(it - b.wires.begin()));
        }
    }
    for (std::size_t j = 0; j < b.wires.size(); ++j) {
        if (std::find(b_shared.begin(), b_shared.end(), static_cast<int>(j)) == b_shared.end()) {
            b_free.push_back(static_cast<int>(j));
        }
    }

    std::vector<int> pa(a_free);
    pa.insert(pa.end(), a_shared.begin(), a_shared.end());
    std::vector<int> pb(b_shared);
    pb.insert(pb.end(), b_free.begin(), b_free.end());
    const CMat A = permute_subsystems(a.op, wire_dims(a.wires), pa);
    const CMat B = permute_subsystems(b.op, wire_dims(b.wires), pb);

    Index na = 1, ns = 1, nb = 1;
    for (int i : a_free) na *= a.wires[static_cast<std::size_t>(i)].dim;
    for (int i : a_shared) ns *= a.wires[static_cast<std::size_t>(i)].dim;
    for (int j : b_free) nb *= b.wires[static_cast<std::size_t>(j)].dim;

    // (A⋆B)[(a,b),(a',b')] = Σ_{s,t} A[(a,t),(a',s)] B[(t,b),(s,b')]
    CMat out = CMat::Zero(na * nb, na * nb);
    for (Index x = 0; x < na; ++x)
        for (Index xp = 0; xp < na; ++xp)
            for (Index s = 0; s < ns; ++s)
                for (Index t = 0; t < ns; ++t) {
                    const cplx av = A(x * ns + t, xp * ns + s);
                    if (av == cplx(0.0)) continue;
                    for (Index y = 0; y < nb; ++y)
                        for (Index yp = 0; yp < nb; ++yp)
                            out(x * nb + y, xp * nb + yp) += av * B(t * nb + y, s * nb + yp);
                }

    LinkOperand res{out, {}};
    for (int i : a_free) res.wires.push_back(a.wires[static_cast<std::size_t>(i)]);
    for (int j : b_free) res.wires.push_back(b.wires[static_cast<std::size_t>(j)]);
    return res;
}

// ---------------------------------------------------------------------------

Index Strategy::d_sys() const { return teeth.empty() ? 0 : teeth.front().sys_out; }

std::vector<Index> Strategy::ancilla_schedule() const {
    std::vector<Index> out;
    for (const auto& t : teeth) out.push_back(t.anc_out);
    return out;
}

std::pair<Index, Index> Strategy::output_dims() const {
    if (teeth.empty()) return {0, 0};
    return {teeth.back().sys_out, teeth.back().anc_out};
}

CMat identity_choi(Index d) {
    CMat c = CMat::Zero(d * d, d * d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) c(i * d + i, j * d + j) = 1.0;
    return c;
}

Strategy Strategy::identity(int steps, Index d_sys, Index d_anc, const CMat& probe) {
    if (probe.rows() != d_sys * d_anc) throw DimensionError("Strategy::identity: probe dims");
    Strategy s;
    s.teeth.push_back(Tooth{probe, 1, 1, d_sys, d_anc, ToothRole::control});
    for (int k = 1; k < steps; ++k) {
        s.teeth.push_back(
            Tooth{identity_choi(d_sys * d_anc), d_sys, d_anc, d_sys, d_anc, ToothRole::control});
    }
    return s;
}

namespace {

CMat gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMat g(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) g(r, c) = cplx(n(rng), n(rng));
    return g;
}

}  // namespace

CMat random_cptp_choi(Index d_in, Index d_out, std::mt19937_64& rng, Index rank) {
    const Index d = d_in * d_out;
    const CMat g = gaussian_matrix(d, rank > 0 ? rank : d, rng);
    const CMat w = g * g.adjoint();
    const CMat t = partial_trace(w, {d_in, d_out}, {0});
    const CMat norm = kron(psd_inv_sqrt(t), CMat::Identity(d_out, d_out));
    return hermitian_part(norm * w * norm);
}

CMat haar_pure_state(Index d, std::mt19937_64& rng) {
    CVec v = gaussian_matrix(d, 1, rng).col(0);
    v.normalize();
    return v * v.adjoint();
}

Strategy random_strategy(int steps, Index d_sys, Index d_anc, std::mt19937_64& rng) {
    Strategy s;
    s.teeth.push_back(
        Tooth{haar_pure_state(d_sys * d_anc, rng), 1, 1, d_sys, d_anc, ToothRole::control});
    for (int k = 1; k < steps; ++k) {
        s.teeth.push_back(Tooth{random_cptp_choi(d_sys * d_anc, d_sys * d_anc, rng), d_sys, d_anc,
                                d_sys, d_anc, ToothRole::control});
    }
    return s;
}

double CombReport::max_psd_violation() const {
    return psd_violation.empty() ? 0.0
                                 : *std::max_element(psd_violation.begin(), psd_violation.end());
}

double CombReport::max_tp_violation() const {
    return tp_violation.empty() ? 0.0
                                : *std::max_element(tp_violation.begin(), tp_violation.end());
}

std::optional<std::size_t> CombReport::first_violation(double tol) const {
    for (std::size_t k = 0; k < psd_violation.size(); ++k) {
        if (psd_violation[k] > tol || tp_violation[k] > tol) return k;
    }
    return std::nullopt;
}

bool CombReport::valid(double tol) const {
    return wire_errors.empty() && !first_violation(tol).has_value();
}

CombReport validate_comb(const Strategy& s, double tol) {
    CombReport r;
    r.tol = tol;
    for (std::size_t k = 0; k < s.teeth.size(); ++k) {
        const auto& t = s.teeth[k];
        const std::string tag = "tooth " + std::to_string(k) + ": ";
        if (t.choi.rows() != t.in_dim() * t.out_dim() || t.choi.cols() != t.choi.rows()) {
            r.wire_errors.push_back(tag + "Choi size does not match wire dims");
            r.psd_violation.push_back(std::numeric_limits<double>::infinity());
            r.tp_violation.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        if (k == 0 && t.in_dim() != 1) r.wire_errors.push_back(tag + "first tooth has inputs");
        if (k > 0) {
            const auto& prev = s.teeth[k - 1];
            if (t.anc_in != prev.anc_out) r.wire_errors.push_back(tag + "ancilla wire mismatch");
            if (t.sys_in != prev.sys_out) r.wire_errors.push_back(tag + "system wire mismatch");
        }
        r.psd_violation.push_back(std::max(0.0, -min_eigenvalue(t.choi)));
        const CMat tr = partial_trace(t.choi, {t.in_dim(), t.out_dim()}, {0});
        r.tp_violation.push_back(
            (tr - CMat::Identity(t.in_dim(), t.in_dim())).cwiseAbs().maxCoeff());
    }
    return r;
}

// ---------------------------------------------------------------------------

ChannelComb ChannelComb::with_steps(int n) const {
    ChannelComb c(*this);
    c.steps = n;
    return c;
}

ChannelComb ChannelComb::correlated(const embedding::Liouvillian& lv, double dt, int steps) {
    return {steps, embedding::channel_from_liouvillian(lv, dt), lv.d_sys, lv.d_mem,
            embedding::memory_vacuum(lv)};
}

ChannelComb ChannelComb::fresh(const embedding::Liouvillian& lv, double dt, int steps) {
    return from_channel(embedding::fresh_channel(lv, dt), steps);
}

ChannelComb ChannelComb::from_channel(const ChannelChoi& ch, int steps) {
    if (ch.d_in != ch.d_out) throw DimensionError("ChannelComb: channel must preserve dimension");
    return {steps, ch, ch.d_in, 1, CMat::Identity(1, 1)};
}

namespace {

void check_compatible(const Strategy& s, const ChannelComb& cc) {
    if (static_cast<int>(s.size()) != cc.steps) {
        throw DimensionError("contract: strategy has " + std::to_string(s.size()) +
                             " teeth but the channel comb has " + std::to_string(cc.steps) +
                             " steps");
    }
    if (cc.channel.d_in != cc.d_sys * cc.d_mem) {
        throw DimensionError("contract: channel dims do not match S ⊗ M");
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
        const auto& t = s.teeth[k];
        if (t.sys_out != cc.d_sys) throw DimensionError("contract: tooth output system dim");
        if (k > 0 && t.sys_in != cc.d_sys) throw DimensionError("contract: tooth input system dim");
    }
}

CMat reset_choi(const ChannelComb& cc) {
    return kron(CMat::Identity(cc.d_mem, cc.d_mem), cc.initial_memory);
}

}  // namespace

StatePair step_forward(const StatePair& in, const Tooth& tooth, const ChannelComb& cc, int k,
                       const ContractOptions& opt) {
    const Dims tin{tooth.sys_in, tooth.anc_in};
    const Dims tout{tooth.sys_out, tooth.anc_out};
    const std::vector<int> tf{kSys, kAnc};
    Tensor rho = apply_on(tooth.choi, tin, tout, in.rho, tf);
    Tensor rhodot = apply_on(tooth.choi, tin, tout, in.rhodot, tf);
    if (opt.reset_memory && k > 0 && cc.d_mem > 1) {
        const CMat r = reset_choi(cc);
        rho = apply_on(r, {cc.d_mem}, {cc.d_mem}, rho, {kMem});
        rhodot = apply_on(r, {cc.d_mem}, {cc.d_mem}, rhodot, {kMem});
    }
    const Dims cd{cc.d_sys, cc.d_mem};
    const std::vector<int> cf{kSys, kMem};
    Tensor next_rho = apply_on(cc.channel.choi, cd, cd, rho, cf);
    Tensor next_dot = apply_on(cc.channel.choi, cd, cd, rhodot, cf);
    next_dot.op += apply_on(cc.channel.dchoi, cd, cd, rho, cf).op;
    return {std::move(next_rho), std::move(next_dot)};
}

std::vector<StatePair> forward_states(const Strategy& s, const ChannelComb& cc,
                                      const ContractOptions& opt) {
    check_compatible(s, cc);
    std::vector<StatePair> states;
    states.reserve(s.size() + 1);
    const Dims d0{1, cc.d_mem, 1};
    StatePair cur{{cc.initial_memory, d0}, {CMat::Zero(cc.d_mem, cc.d_mem), d0}};
    for (std::size_t k = 0; k < s.size(); ++k) {
        states.push_back(cur);
        cur = step_forward(cur, s.teeth[k], cc, static_cast<int>(k), opt);
    }
    states.push_back(std::move(cur));
    return states;
}

OutputPair contract(const Strategy& s, const ChannelComb& cc, const ContractOptions& opt) {
    const auto states = forward_states(s, cc, opt);
    const auto& fin = states.back();
    return {hermitian_part(partial_trace(fin.rho.op, fin.rho.dims, {kSys, kAnc})),
            hermitian_part(partial_trace(fin.rhodot.op, fin.rhodot.dims, {kSys, kAnc}))};
}

std::vector<EffectPair> backward_effects(const Strategy& s, const ChannelComb& cc, const CMat& l,
                                         const ContractOptions& opt) {
    check_compatible(s, cc);
    const auto [d_s, d_a] = s.output_dims();
    if (l.rows() != d_s * d_a) throw DimensionError("backward_effects: L dims");
    const Dims fin{d_s, cc.d_mem, d_a};
    const std::vector<int> to_sma{0, 2, 1};  // [S, A, M] -> [S, M, A]
    const CMat id_m = CMat::Identity(cc.d_mem, cc.d_mem);
    EffectPair cur{{permute_subsystems(kron(2.0 * l, id_m), {d_s, d_a, cc.d_mem}, to_sma), fin},
                   {permute_subsystems(kron(-(l * l), id_m), {d_s, d_a, cc.d_mem}, to_sma), fin}};

    const Dims cd{cc.d_sys, cc.d_mem};
    const std::vector<int> cf{kSys, kMem};
    std::vector<EffectPair> effects(s.size());
    for (std::size_t k = s.size(); k-- > 0;) {
        Tensor e_dot = apply_adjoint_on(cc.channel.choi, cd, cd, cur.e_dot, cf);
        Tensor e = apply_adjoint_on(cc.channel.choi, cd, cd, cur.e, cf);
        e.op += apply_adjoint_on(cc.channel.dchoi, cd, cd, cur.e_dot, cf).op;
        if (opt.reset_memory && k > 0 && cc.d_mem > 1) {
            const CMat r = reset_choi(cc);
            e_dot = apply_adjoint_on(r, {cc.d_mem}, {cc.d_mem}, e_dot, {kMem});
            e = apply_adjoint_on(r, {cc.d_mem}, {cc.d_mem}, e, {kMem});
        }
        effects[k] = {e_dot, e};
        const auto& t = s.teeth[k];
        const Dims tin{t.sys_in, t.anc_in};
        const Dims tout{t.sys_out, t.anc_out};
        cur = {apply_adjoint_on(t.choi, tin, tout, e_dot, {kSys, kAnc}),
               apply_adjoint_on(t.choi, tin, tout, e, {kSys, kAnc})};
    }
    return effects;
}

CMat tooth_gradient(const StatePair& in, const EffectPair& out, const Tooth& tooth) {
    const Dims tin{tooth.sys_in, tooth.anc_in};
    const Dims tout{tooth.sys_out, tooth.anc_out};
    const std::vector<int> tf{kSys, kAnc};
    return hermitian_part(choi_gradient(in.rhodot, out.e_dot, tin, tout, tf) +
                          choi_gradient(in.rho, out.e, tin, tout, tf));
}

CMat tooth_env(const Strategy& s, const ChannelComb& cc, std::size_t k, const CMat& l) {
    if (k >= s.size()) throw DimensionError("tooth_env: tooth index out of range");
    const auto states = forward_states(s, cc);
    const auto effects = backward_effects(s, cc, l);
    return tooth_gradient(states[k], effects[k], s.teeth[k]);
}

}  // namespace pmetro::comb
