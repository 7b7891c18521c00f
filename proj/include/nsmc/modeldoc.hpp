#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsmc/matrix.hpp"

namespace nsmc {

// Which performance measure a document asks for.
enum class MeasureKind { discounted, transient, cumulative, hitting, jump };
enum class TransientMode { forward, backward, backward_second };

struct MeasureDoc {
    MeasureKind kind = MeasureKind::discounted;
    double alpha = 0.0;       // discounted
    double eps_report = 0.001;  // discounted truncation knob
    long n = 0;               // transient / cumulative horizon
    TransientMode mode = TransientMode::forward;
    std::vector<int> target;  // hitting: pre-absorption states C
    double t = 0.0;           // jump horizon
};

struct GeneratorDoc {
    std::string name;  // inventory | birth_death
    // inventory parameters
    int s = 0;
    int S = 0;
    double m = 1.0;
    double eps = 0.0;
    std::string variant = "review";  // below-s | below-S | review
    // birth_death parameters
    std::vector<double> up;
    std::vector<double> down;
};

// Parsed model document.  The format is line oriented: `key value...`
// lines, `#` comments, and matrix blocks (`base`, `e1`, `e2`, `qbase`,
// `f1`, `f2`) that consume the following `dim` rows of numbers.
struct ModelDoc {
    int dim = 0;
    std::optional<Matrix> base, e1, e2;     // discrete-time chain
    std::optional<Matrix> qbase, f1, f2;    // continuous-time rates
    std::optional<GeneratorDoc> generator;
    std::string reward_kw;  // "identity" when requested by keyword
    ColVec reward;          // explicit reward vector otherwise
    std::string mu_kw;      // S | s | uniform | stationary | binomial
    RowVec mu;              // explicit initial distribution otherwise
    std::optional<MeasureDoc> measure;
    std::string fd_index = "exact";  // exact | auto | <positive integer>
    int precision = 4;
};

// Throws ParseError (with a 1-based line number) on malformed input.
ModelDoc parse_model_doc(std::istream& in);
ModelDoc load_model_doc(const std::string& path);

// Command-line options shared by the subcommands.
struct CliOptions {
    std::string format = "markdown";  // csv | json-lines | markdown
    std::string out_dir = ".";
    std::vector<int> tables = {1, 2, 3, 4, 5, 6};
    std::string fd_index;   // overrides the document when nonempty
    int precision = -1;     // overrides when >= 0
    std::string mu;         // overrides the document / calibration
    std::string variant;    // overrides the document / calibration
};

// Front-end entry points.  They print to `out`/`err` and return the
// process exit code: 0 success, 2 parse or validation failure, 3 model
// condition failure (non-stochastic rows mid-sequence, reducible chain,
// non-contracting block, singular system).
int cmd_eval(const std::string& model_path, const CliOptions& opt,
             std::ostream& out, std::ostream& err);
int cmd_check(const std::string& model_path, std::ostream& out, std::ostream& err);
int cmd_reproduce_tables(const CliOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace nsmc
