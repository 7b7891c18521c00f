#include "nsmc/hitting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsmc {

AbsorbingSpec::AbsorbingSpec(std::vector<int> C_in, ColVec r_in, RowVec mu_in)
    : C(std::move(C_in)), r(std::move(r_in)), mu(std::move(mu_in)) {
    const int dim = static_cast<int>(r.size());
    if (C.empty() || static_cast<int>(C.size()) >= dim)
        throw std::invalid_argument("transient set must be nonempty and proper");
    for (size_t i = 0; i < C.size(); ++i) {
        if (C[i] < 0 || C[i] >= dim)
            throw std::invalid_argument("transient-set index out of range");
        if (i > 0 && C[i] <= C[i - 1])
            throw std::invalid_argument("transient-set indices must be strictly increasing");
    }
    if (static_cast<int>(mu.size()) != dim)
        throw std::invalid_argument("initial distribution dimension mismatch");
    double on_c = 0.0;
    size_t next = 0;
    for (int x = 0; x < dim; ++x) {
        const bool in_c = next < C.size() && C[next] == x;
        if (mu[x] < -1e-12)
            throw std::invalid_argument("initial distribution has a negative entry");
        if (in_c) {
            on_c += mu[x];
            ++next;
        } else if (std::fabs(mu[x]) > 1e-12) {
            throw std::invalid_argument("initial distribution puts mass outside the transient set");
        }
    }
    if (std::fabs(on_c - 1.0) > 1e-9)
        throw std::invalid_argument("initial distribution mass on the transient set is " +
                                    std::to_string(on_c) + ", expected 1");
}

Matrix principal_block(const Matrix& m, const std::vector<int>& C) {
    const int c = static_cast<int>(C.size());
    Matrix b(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) b(i, j) = m(C[i], C[j]);
    return b;
}

ColVec exit_reward(const Matrix& m, const std::vector<int>& C, const ColVec& r) {
    const int dim = m.cols();
    std::vector<char> in_c(dim, 0);
    for (int x : C) in_c[x] = 1;
    ColVec out(C.size(), 0.0);
    for (size_t i = 0; i < C.size(); ++i) {
        double acc = 0.0;
        for (int y = 0; y < dim; ++y)
            if (!in_c[y]) acc += m(C[i], y) * r[y];
        out[i] = acc;
    }
    return out;
}

RowVec restrict_row(const RowVec& mu, const std::vector<int>& C) {
    RowVec out(C.size());
    for (size_t i = 0; i < C.size(); ++i) out[i] = mu[C[i]];
    return out;
}

BlockData build_block(const StochasticMatrix& p, const AbsorbingSpec& spec) {
    BlockData bd;
    bd.B = principal_block(p.mat(), spec.C);
    bd.r_eff = exit_reward(p.mat(), spec.C, spec.r);
    for (size_t i = 0; i < spec.C.size(); ++i) bd.r_eff[i] += spec.r[spec.C[i]];
    return bd;
}

namespace {

void require_contraction(const Matrix& b) {
    if (!contraction_power(b, 4 * b.rows()))
        throw NotContracting(
            "no power of the transient block up to " + std::to_string(4 * b.rows()) +
            " contracts; the exit set may be unreachable from some state");
}

} // namespace

HittingValue stationary_hitting(const BlockData& block, const RowVec& mu_c) {
    if (mu_c.size() != static_cast<size_t>(block.B.rows()))
        throw std::invalid_argument("initial-row dimension must match the block");
    require_contraction(block.B);
    Matrix a = Matrix::identity(block.B.rows()) - block.B;
    ColVec w = solve(a, block.r_eff);
    return {w, dot(mu_c, w)};
}

double exact_hitting(const TransitionSequence& seq, const AbsorbingSpec& spec, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const int c = static_cast<int>(spec.C.size());
    BlockData first = build_block(seq.at(1), spec);
    auto l_opt = contraction_power(first.B, 4 * c);
    if (!l_opt)
        throw NotContracting("no power of the first transient block up to " +
                             std::to_string(4 * c) + " contracts");
    const int l = *l_opt;
    Matrix power = first.B;
    for (int i = 1; i < l; ++i) power = power * first.B;
    // Allowed window level: halfway between the first block's contraction
    // factor and 1, re-verified on every completed window of the drifting
    // products below.
    const double beta = (1.0 + norm_rowsum(power)) / 2.0;
    const double rbar = 2.0 * norm_max(spec.r); // |r_eff| <= 2 ||r|| always

    RowVec a = restrict_row(spec.mu, spec.C);
    double total = 0.0;
    Matrix window = Matrix::identity(c);
    int in_window = 0;
    for (long j = 0;; ++j) {
        BlockData bd = build_block(seq.at(j + 1), spec);
        total += dot(a, bd.r_eff);
        a = a * bd.B;
        window = window * bd.B;
        if (++in_window == l) {
            if (norm_rowsum(window) > beta)
                throw NotContracting(
                    "uniform contraction violated on the evaluated range near step " +
                    std::to_string(j + 1));
            window = Matrix::identity(c);
            in_window = 0;
        }
        if (norm_l1(a) * l / (1.0 - beta) * rbar <= tol) return total;
        if (j > 100'000'000)
            throw std::runtime_error("hitting-time series did not reach the "
                                     "requested tolerance within 1e8 terms");
    }
}

double first_order_hitting(const DriftModel& dm, const AbsorbingSpec& spec) {
    BlockData bd = build_block(dm.base(), spec);
    require_contraction(bd.B);
    const Matrix b1 = principal_block(dm.e1(), spec.C);
    const ColVec rt1 = exit_reward(dm.e1(), spec.C, spec.r);
    const RowVec mu_c = restrict_row(spec.mu, spec.C);

    LuFactors lu(Matrix::identity(bd.B.rows()) - bd.B);
    const ColVec w = lu.solve(bd.r_eff);            // (I-B)^{-1} rt
    RowVec left = lu.solve_row(lu.solve_row(mu_c * bd.B)); // mu B (I-B)^{-2}
    return dot(mu_c, w) + dot(left, b1 * w) + dot(left, rt1);
}

} // namespace nsmc
