#include "nsmc/tables.hpp"

#include <cmath>
#include <stdexcept>

#include "nsmc/chains.hpp"
#include "nsmc/discounted.hpp"
#include "nsmc/linalg.hpp"
#include "nsmc/parallel.hpp"

namespace nsmc {

namespace {

constexpr double kBaseDemandMean = 1.0;
constexpr double kReportEps = 0.001;  // truncation rule uses the smallest positive drift rate
constexpr double kCalibrationTolPct = 0.05;

// Everything eps-independent about one model convention on one table.
struct Convention {
    bool review;  // review chain on {0..S} vs reorder chain on {s..S}
    ReorderVariant variant;
    ColVec reward;
    RowVec mu;
};

RowVec point_mass(int dim, int index) {
    RowVec mu(dim, 0.0);
    mu[index] = 1.0;
    return mu;
}

Convention make_convention(const TableSpec& t, const TableChoice& choice) {
    Convention c;
    c.review = (choice.variant == "review");
    if (choice.variant == "below-s") {
        c.variant = ReorderVariant::below_s;
    } else if (choice.variant == "below-S") {
        c.variant = ReorderVariant::below_S;
    } else if (!c.review) {
        throw std::invalid_argument("unknown reorder variant: " + choice.variant);
    }

    InventoryParams base_par(t.s, t.S, kBaseDemandMean, 0.0);
    int dim = c.review ? t.S + 1 : t.S - t.s + 1;
    int lo = c.review ? 0 : t.s;
    c.reward = identity_reward(lo, t.S);

    if (choice.mu == "S") {
        c.mu = point_mass(dim, t.S - lo);
    } else if (choice.mu == "s") {
        c.mu = point_mass(dim, t.s - lo);
    } else if (choice.mu == "uniform") {
        c.mu = RowVec(dim, 1.0 / dim);
    } else if (choice.mu == "stationary") {
        StochasticMatrix p1 = c.review ? review_chain_matrix(base_par, 1)
                                       : inventory_matrix(base_par, 1, c.variant);
        c.mu = stationary_distribution(p1);
    } else if (choice.mu == "binomial") {
        if (!c.review)
            throw std::invalid_argument(
                "initial distribution 'binomial' lives on {0..S} and needs the review variant");
        c.mu = binomial_initial(t.S, kBaseDemandMean);
    } else {
        throw std::invalid_argument("unknown initial distribution: " + choice.mu);
    }
    return c;
}

TransitionSequence make_sequence(const Convention& c, const InventoryParams& par) {
    return c.review ? review_chain_sequence(par) : inventory_sequence(par, c.variant);
}

StochasticMatrix base_matrix(const Convention& c, const InventoryParams& par) {
    return c.review ? review_chain_matrix(par, 1) : inventory_matrix(par, 1, c.variant);
}

Matrix exact_deriv(const Convention& c, const InventoryParams& par, int order) {
    return c.review ? review_chain_deriv(par, 1, order)
                    : inventory_matrix_deriv(par, 1, c.variant, order);
}

double pct_error(double approx, double reference) {
    return 100.0 * std::fabs(approx - reference) / reference;
}

}  // namespace

const std::array<TableSpec, 6>& table_specs() {
    static const std::array<TableSpec, 6> specs = {{
        {1, 4, 10, 0.1},
        {2, 4, 10, 0.5},
        {3, 4, 10, 1.0},
        {4, 40, 100, 0.1},
        {5, 40, 100, 0.5},
        {6, 40, 100, 1.0},
    }};
    return specs;
}

const std::array<double, 7>& drift_grid() {
    static const std::array<double, 7> grid = {0.0,   0.001, 0.004, 0.016,
                                               0.064, 0.256, 1.024};
    return grid;
}

const std::array<double, 6>& reference_kappa0() {
    static const std::array<double, 6> ref = {64.0915,  13.0039, 5.8910,
                                              853.5824, 151.2317, 58.2770};
    return ref;
}

CalibrationResult calibrate() {
    // reorder-chain conventions with each simple initial distribution, plus
    // the review convention with its natural binomial start
    std::vector<TableChoice> candidates;
    for (const char* variant : {"below-s", "below-S"})
        for (const char* mu : {"S", "s", "uniform", "stationary"})
            candidates.push_back({variant, mu});
    candidates.push_back({"review", "binomial"});

    CalibrationResult result;
    result.selected = -1;
    for (const auto& choice : candidates) {
        CalibrationCandidate cand;
        cand.choice = choice;
        cand.kappa0.fill(std::nan(""));
        cand.rel_err.fill(std::nan(""));
        cand.ok = true;
        for (size_t i = 0; i < table_specs().size(); ++i) {
            const TableSpec& t = table_specs()[i];
            try {
                Convention c = make_convention(t, choice);
                InventoryParams par(t.s, t.S, kBaseDemandMean, 0.0);
                DiscountSpec spec(t.alpha, RewardSpec(c.reward, c.mu));
                cand.kappa0[i] = stationary_value(base_matrix(c, par), spec).kappa0;
                cand.rel_err[i] = pct_error(cand.kappa0[i], reference_kappa0()[i]);
                if (cand.rel_err[i] > kCalibrationTolPct) cand.ok = false;
            } catch (const std::exception& e) {
                cand.ok = false;
                if (cand.note.empty()) cand.note = e.what();
            }
        }
        if (cand.ok && result.selected < 0)
            result.selected = static_cast<int>(result.candidates.size());
        result.candidates.push_back(std::move(cand));
    }
    return result;
}

TableResult reproduce_table(const TableSpec& spec, const TableChoice& choice) {
    TableResult result;
    result.spec = spec;
    result.choice = choice;
    result.rows.resize(drift_grid().size());

    int j = default_fd_index(spec.alpha);
    parallel_for(static_cast<int>(drift_grid().size()), [&](int i) {
        double eps = drift_grid()[i];
        InventoryParams par(spec.s, spec.S, kBaseDemandMean, eps);
        Convention c = make_convention(spec, choice);
        DiscountSpec dspec(spec.alpha, RewardSpec(c.reward, c.mu));
        TransitionSequence seq = make_sequence(c, par);

        TruncatedValue tt = exact_truncated(seq, dspec, kReportEps);
        StochasticMatrix base = base_matrix(c, par);

        Matrix e1_fd = fd_first(seq, j);
        Matrix e2_fd = fd_second(seq, j);
        Matrix e1_ex = exact_deriv(c, par, 1);
        Matrix e2_ex = exact_deriv(c, par, 2);

        double k1_fd = first_order_linear(DriftModel(base, e1_fd), dspec).kappa1;
        double k2_fd = second_order_linear(DriftModel(base, e1_fd, e2_fd), dspec);
        double k1_ex = first_order_linear(DriftModel(base, e1_ex), dspec).kappa1;
        double k2_ex = second_order_linear(DriftModel(base, e1_ex, e2_ex), dspec);

        TableRow& row = result.rows[i];
        row.eps = eps;
        row.truncated_true = tt.kappa;
        row.n_trunc = tt.n_trunc;
        row.err1_fd = pct_error(k1_fd, tt.kappa);
        row.err1_exact = pct_error(k1_ex, tt.kappa);
        row.err2_fd = pct_error(k2_fd, tt.kappa);
        row.err2_exact = pct_error(k2_ex, tt.kappa);
    });
    return result;
}

ReportTable table_report(const TableResult& result, int precision) {
    ReportTable out;
    out.title = "Table " + std::to_string(result.spec.id) +
                " (s=" + std::to_string(result.spec.s) +
                ", S=" + std::to_string(result.spec.S) +
                ", alpha=" + format_fixed(result.spec.alpha, 1) + ")";
    out.header = {"eps",          "truncated_true", "err1_fd_pct",
                  "err1_exact_pct", "err2_fd_pct",    "err2_exact_pct"};
    for (const auto& row : result.rows) {
        out.rows.push_back({
            format_fixed(row.eps, 3),
            format_fixed(row.truncated_true, precision),
            format_fixed(row.err1_fd, precision),
            format_fixed(row.err1_exact, precision),
            format_fixed(row.err2_fd, precision),
            format_fixed(row.err2_exact, precision),
        });
    }
    return out;
}

ReportTable calibration_report(const CalibrationResult& result, int precision) {
    ReportTable out;
    out.title = "Calibration of reorder variant and initial distribution";
    out.header = {"variant", "mu", "status"};
    for (size_t i = 0; i < table_specs().size(); ++i) {
        out.header.push_back("kappa0_table" + std::to_string(table_specs()[i].id));
        out.header.push_back("err_pct_table" + std::to_string(table_specs()[i].id));
    }
    for (size_t ci = 0; ci < result.candidates.size(); ++ci) {
        const CalibrationCandidate& cand = result.candidates[ci];
        std::vector<std::string> row = {cand.choice.variant, cand.choice.mu};
        if (!cand.note.empty())
            row.push_back("error: " + cand.note);
        else if (static_cast<int>(ci) == result.selected)
            row.push_back("selected");
        else
            row.push_back(cand.ok ? "pass" : "fail");
        for (size_t i = 0; i < table_specs().size(); ++i) {
            row.push_back(std::isnan(cand.kappa0[i]) ? "-"
                                                     : format_fixed(cand.kappa0[i], precision));
            row.push_back(std::isnan(cand.rel_err[i]) ? "-"
                                                      : format_fixed(cand.rel_err[i], precision));
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace nsmc
