#pragma once

#include <array>
#include <string>
#include <vector>

#include "nsmc/report.hpp"

namespace nsmc {

// One (s, S, alpha) combination of the bundled inventory study.
struct TableSpec {
    int id;  // 1..6
    int s;
    int S;
    double alpha;
};

const std::array<TableSpec, 6>& table_specs();

// Drift rates evaluated per table.
const std::array<double, 7>& drift_grid();

// Reference discounted values at eps = 0, one per table, used to calibrate
// the model convention (reorder rule and initial distribution).
const std::array<double, 6>& reference_kappa0();

// state-space / reorder conventions the calibration compares
inline constexpr const char* kVariantLabels[] = {"below-s", "below-S", "review"};
// initial-distribution choices
inline constexpr const char* kMuLabels[] = {"S", "s", "uniform", "stationary", "binomial"};

struct TableChoice {
    std::string variant;  // below-s | below-S | review
    std::string mu;       // S | s | uniform | stationary | binomial
};

struct CalibrationCandidate {
    TableChoice choice;
    std::array<double, 6> kappa0;   // eps = 0 value per table
    std::array<double, 6> rel_err;  // percent deviation from reference
    bool ok;                        // every table within 0.05%
    std::string note;               // failure detail when evaluation threw
};

struct CalibrationResult {
    std::vector<CalibrationCandidate> candidates;
    int selected;  // index of first passing candidate, -1 if none
};

// Evaluates every convention candidate against reference_kappa0().
CalibrationResult calibrate();

struct TableRow {
    double eps;
    double truncated_true;
    long n_trunc;
    // percent relative errors of the four approximations
    double err1_fd;
    double err1_exact;
    double err2_fd;
    double err2_exact;
};

struct TableResult {
    TableSpec spec;
    TableChoice choice;
    std::vector<TableRow> rows;
};

// Evaluates one table: for each eps, the truncated brute-force value plus
// first/second order approximations with finite-difference and analytic
// derivative matrices.  Grid points run in parallel (see parallel.hpp).
TableResult reproduce_table(const TableSpec& spec, const TableChoice& choice);

ReportTable table_report(const TableResult& result, int precision = 4);
ReportTable calibration_report(const CalibrationResult& result, int precision = 4);

}  // namespace nsmc
