#include "nsmc/modeldoc.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nsmc/chains.hpp"
#include "nsmc/cumulative.hpp"
#include "nsmc/discounted.hpp"
#include "nsmc/errors.hpp"
#include "nsmc/hitting.hpp"
#include "nsmc/jump.hpp"
#include "nsmc/linalg.hpp"
#include "nsmc/report.hpp"
#include "nsmc/tables.hpp"
#include "nsmc/transient.hpp"

namespace nsmc {

namespace {

// ---------------------------------------------------------------------
// tokenizing
// ---------------------------------------------------------------------

std::vector<std::string> tokenize(const std::string& raw) {
    std::string line = raw;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

double parse_double(const std::string& s, int line) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError("expected a number, got '" + s + "'", line);
    return v;
}

bool looks_numeric(const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size();
}

long parse_integer(const std::string& s, int line) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError("expected an integer, got '" + s + "'", line);
    return v;
}

std::vector<double> parse_list(const std::string& s, int line) {
    std::vector<double> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t comma = s.find(',', start);
        std::string item = s.substr(start, comma == std::string::npos ? comma : comma - start);
        out.push_back(parse_double(item, line));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// splits "key=value" and errors on anything else
std::pair<std::string, std::string> split_kv(const std::string& tok, int line) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
        throw ParseError("expected key=value, got '" + tok + "'", line);
    return {tok.substr(0, eq), tok.substr(eq + 1)};
}

// ---------------------------------------------------------------------
// document parsing
// ---------------------------------------------------------------------

struct LineReader {
    std::istream& in;
    int line = 0;
    bool next(std::vector<std::string>& toks) {
        std::string raw;
        while (std::getline(in, raw)) {
            ++line;
            toks = tokenize(raw);
            if (!toks.empty()) return true;
        }
        return false;
    }
};

Matrix parse_matrix_block(LineReader& rd, int dim, const std::string& key, int key_line) {
    if (dim <= 0)
        throw ParseError("'" + key + "' needs 'dim' declared first", key_line);
    Matrix m(dim, dim);
    std::vector<std::string> toks;
    for (int i = 0; i < dim; ++i) {
        if (!rd.next(toks))
            throw ParseError("'" + key + "' block ended after " + std::to_string(i) +
                                 " of " + std::to_string(dim) + " rows",
                             rd.line);
        if (static_cast<int>(toks.size()) != dim)
            throw ParseError("'" + key + "' row has " + std::to_string(toks.size()) +
                                 " entries, expected " + std::to_string(dim),
                             rd.line);
        for (int j = 0; j < dim; ++j) m(i, j) = parse_double(toks[j], rd.line);
    }
    return m;
}

GeneratorDoc parse_generator(const std::vector<std::string>& toks, int line) {
    if (toks.size() < 2)
        throw ParseError("'generator' needs a name (inventory or birth_death)", line);
    GeneratorDoc g;
    g.name = toks[1];
    bool have_s = false, have_S = false;
    for (size_t i = 2; i < toks.size(); ++i) {
        auto [k, v] = split_kv(toks[i], line);
        if (g.name == "inventory") {
            if (k == "s") {
                g.s = static_cast<int>(parse_integer(v, line));
                have_s = true;
            } else if (k == "S") {
                g.S = static_cast<int>(parse_integer(v, line));
                have_S = true;
            } else if (k == "m") {
                g.m = parse_double(v, line);
            } else if (k == "eps") {
                g.eps = parse_double(v, line);
            } else if (k == "variant") {
                if (v != "below-s" && v != "below-S" && v != "review")
                    throw ParseError("unknown variant '" + v + "'", line);
                g.variant = v;
            } else {
                throw ParseError("unknown inventory parameter '" + k + "'", line);
            }
        } else if (g.name == "birth_death") {
            if (k == "up")
                g.up = parse_list(v, line);
            else if (k == "down")
                g.down = parse_list(v, line);
            else
                throw ParseError("unknown birth_death parameter '" + k + "'", line);
        } else {
            throw ParseError("unknown generator '" + g.name + "'", line);
        }
    }
    if (g.name == "inventory" && (!have_s || !have_S))
        throw ParseError("inventory generator needs s= and S=", line);
    if (g.name == "birth_death" && (g.up.empty() || g.up.size() != g.down.size()))
        throw ParseError("birth_death needs up= and down= lists of equal length", line);
    return g;
}

MeasureDoc parse_measure(const std::vector<std::string>& toks, int line) {
    if (toks.size() < 2)
        throw ParseError("'measure' needs a kind "
                         "(discounted|transient|cumulative|hitting|jump)",
                         line);
    MeasureDoc m;
    const std::string& kind = toks[1];
    bool have_alpha = false, have_n = false, have_C = false, have_t = false;
    for (size_t i = 2; i < toks.size(); ++i) {
        auto [k, v] = split_kv(toks[i], line);
        if (k == "alpha") {
            m.alpha = parse_double(v, line);
            have_alpha = true;
        } else if (k == "eps-report") {
            m.eps_report = parse_double(v, line);
        } else if (k == "n") {
            m.n = parse_integer(v, line);
            have_n = true;
        } else if (k == "mode") {
            if (v == "forward")
                m.mode = TransientMode::forward;
            else if (v == "backward")
                m.mode = TransientMode::backward;
            else if (v == "backward-second")
                m.mode = TransientMode::backward_second;
            else
                throw ParseError("unknown transient mode '" + v + "'", line);
        } else if (k == "C") {
            for (double x : parse_list(v, line)) {
                if (x != std::floor(x) || x < 0)
                    throw ParseError("C entries must be nonnegative integers", line);
                m.target.push_back(static_cast<int>(x));
            }
            have_C = true;
        } else if (k == "t") {
            m.t = parse_double(v, line);
            have_t = true;
        } else {
            throw ParseError("unknown measure parameter '" + k + "'", line);
        }
    }
    if (kind == "discounted") {
        m.kind = MeasureKind::discounted;
        if (!have_alpha) throw ParseError("discounted measure needs alpha=", line);
    } else if (kind == "transient") {
        m.kind = MeasureKind::transient;
        if (!have_n) throw ParseError("transient measure needs n=", line);
    } else if (kind == "cumulative") {
        m.kind = MeasureKind::cumulative;
        if (!have_n) throw ParseError("cumulative measure needs n=", line);
    } else if (kind == "hitting") {
        m.kind = MeasureKind::hitting;
        if (!have_C) throw ParseError("hitting measure needs C=", line);
    } else if (kind == "jump") {
        m.kind = MeasureKind::jump;
        if (!have_t) throw ParseError("jump measure needs t=", line);
    } else {
        throw ParseError("unknown measure kind '" + kind + "'", line);
    }
    return m;
}

}  // namespace

ModelDoc parse_model_doc(std::istream& in) {
    ModelDoc doc;
    LineReader rd{in};
    std::vector<std::string> toks;
    auto reject_dup = [&](bool already, const std::string& key) {
        if (already) throw ParseError("duplicate key '" + key + "'", rd.line);
    };
    while (rd.next(toks)) {
        const std::string& key = toks[0];
        int line = rd.line;
        if (key == "dim") {
            reject_dup(doc.dim != 0, key);
            if (toks.size() != 2) throw ParseError("'dim' takes one integer", line);
            long d = parse_integer(toks[1], line);
            if (d < 1) throw ParseError("'dim' must be positive", line);
            doc.dim = static_cast<int>(d);
        } else if (key == "base" || key == "e1" || key == "e2" || key == "qbase" ||
                   key == "f1" || key == "f2") {
            if (toks.size() != 1)
                throw ParseError("'" + key + "' starts a matrix block; extra tokens", line);
            auto& slot = key == "base" ? doc.base
                         : key == "e1" ? doc.e1
                         : key == "e2" ? doc.e2
                         : key == "qbase" ? doc.qbase
                         : key == "f1" ? doc.f1
                                       : doc.f2;
            reject_dup(slot.has_value(), key);
            slot = parse_matrix_block(rd, doc.dim, key, line);
        } else if (key == "generator") {
            reject_dup(doc.generator.has_value(), key);
            doc.generator = parse_generator(toks, line);
        } else if (key == "reward") {
            reject_dup(!doc.reward_kw.empty() || !doc.reward.empty(), key);
            if (toks.size() == 2 && toks[1] == "identity") {
                doc.reward_kw = "identity";
            } else if (toks.size() >= 2 && looks_numeric(toks[1])) {
                for (size_t i = 1; i < toks.size(); ++i)
                    doc.reward.push_back(parse_double(toks[i], line));
            } else {
                throw ParseError("'reward' takes 'identity' or a list of numbers", line);
            }
        } else if (key == "mu") {
            reject_dup(!doc.mu_kw.empty() || !doc.mu.empty(), key);
            if (toks.size() == 2 && !looks_numeric(toks[1])) {
                const std::string& kw = toks[1];
                if (kw != "S" && kw != "s" && kw != "uniform" && kw != "stationary" &&
                    kw != "binomial")
                    throw ParseError("unknown initial distribution '" + kw + "'", line);
                doc.mu_kw = kw;
            } else if (toks.size() >= 2 && looks_numeric(toks[1])) {
                for (size_t i = 1; i < toks.size(); ++i)
                    doc.mu.push_back(parse_double(toks[i], line));
            } else {
                throw ParseError("'mu' takes a keyword or a list of numbers", line);
            }
        } else if (key == "measure") {
            reject_dup(doc.measure.has_value(), key);
            doc.measure = parse_measure(toks, line);
        } else if (key == "fd-index") {
            if (toks.size() != 2) throw ParseError("'fd-index' takes one value", line);
            if (toks[1] != "auto" && toks[1] != "exact" &&
                !(looks_numeric(toks[1]) && parse_integer(toks[1], line) >= 2))
                throw ParseError("'fd-index' takes auto, exact, or an integer >= 2", line);
            doc.fd_index = toks[1];
        } else if (key == "precision") {
            if (toks.size() != 2) throw ParseError("'precision' takes one integer", line);
            long p = parse_integer(toks[1], line);
            if (p < 0 || p > 18) throw ParseError("'precision' out of range 0..18", line);
            doc.precision = static_cast<int>(p);
        } else {
            throw ParseError("unknown key '" + key + "'", line);
        }
    }

    // cross-field sanity that does not need numerics
    bool dense = doc.base.has_value();
    bool rate = doc.qbase.has_value();
    bool gen = doc.generator.has_value();
    if (dense + rate + gen != 1)
        throw ParseError("document needs exactly one of 'base', 'qbase', or 'generator'",
                         rd.line);
    if (!doc.measure) throw ParseError("document needs a 'measure' line", rd.line);
    if (doc.reward_kw.empty() && doc.reward.empty())
        throw ParseError("document needs a 'reward' line", rd.line);
    bool needs_mu = doc.measure->kind != MeasureKind::jump;
    if (needs_mu && doc.mu_kw.empty() && doc.mu.empty())
        throw ParseError("document needs a 'mu' line", rd.line);
    if ((doc.e1 || doc.e2) && !dense)
        throw ParseError("'e1'/'e2' only apply to a 'base' model", rd.line);
    if ((doc.f1 || doc.f2) && !rate)
        throw ParseError("'f1'/'f2' only apply to a 'qbase' model", rd.line);
    if (doc.measure->kind == MeasureKind::jump && !rate)
        throw ParseError("jump measure needs a 'qbase' model", rd.line);
    if (doc.measure->kind != MeasureKind::jump && rate)
        throw ParseError("'qbase' model only supports the jump measure", rd.line);
    return doc;
}

ModelDoc load_model_doc(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open model file: " + path);
    return parse_model_doc(in);
}

namespace {

// ---------------------------------------------------------------------
// resolution: document -> evaluator inputs
// ---------------------------------------------------------------------

struct Resolved {
    // discrete side (unset when the doc is a rate model)
    std::optional<StochasticMatrix> base;
    Matrix e1, e2;          // explicit or analytic drift derivatives (zero when absent)
    bool has_e2 = false;
    std::optional<TransitionSequence> seq;      // available for generator docs
    std::optional<InventoryParams> inv;         // inventory specifics
    bool review = false;
    ReorderVariant variant = ReorderVariant::below_s;
    // rate side
    std::optional<RateMatrix> qbase;
    Matrix f1, f2;
    bool has_f2 = false;
    // shared
    ColVec reward;
    RowVec mu;
    int dim = 0;
    int fd_j = 0;  // 0: no finite-difference channel
};

RowVec resolve_mu(const ModelDoc& doc, const Resolved& r, const std::string& kw) {
    if (kw == "uniform") return RowVec(r.dim, 1.0 / r.dim);
    if (kw == "stationary")
        return r.base ? stationary_distribution(*r.base) : ctmc_stationary(r.qbase->mat());
    if (!r.inv)
        throw std::invalid_argument("initial distribution '" + kw +
                                    "' needs the inventory generator");
    int lo = r.review ? 0 : r.inv->s;
    if (kw == "S") {
        RowVec mu(r.dim, 0.0);
        mu[r.inv->S - lo] = 1.0;
        return mu;
    }
    if (kw == "s") {
        RowVec mu(r.dim, 0.0);
        mu[r.inv->s - lo] = 1.0;
        return mu;
    }
    // binomial
    if (!r.review)
        throw std::invalid_argument(
            "initial distribution 'binomial' lives on {0..S} and needs variant=review");
    return binomial_initial(r.inv->S, doc.generator->m);
}

Resolved resolve(const ModelDoc& doc, const CliOptions& opt) {
    Resolved r;
    std::string variant = !opt.variant.empty() ? opt.variant
                          : doc.generator      ? doc.generator->variant
                                               : std::string("review");
    std::string mu_kw = !opt.mu.empty() ? opt.mu : doc.mu_kw;
    std::string fd = !opt.fd_index.empty() ? opt.fd_index : doc.fd_index;

    if (doc.generator) {
        const GeneratorDoc& g = *doc.generator;
        if (g.name == "inventory") {
            r.inv = InventoryParams(g.s, g.S, g.m, g.eps);
            r.review = (variant == "review");
            if (variant == "below-s")
                r.variant = ReorderVariant::below_s;
            else if (variant == "below-S")
                r.variant = ReorderVariant::below_S;
            else if (!r.review)
                throw std::invalid_argument("unknown reorder variant '" + variant + "'");
            r.dim = r.review ? g.S + 1 : g.S - g.s + 1;
            r.base = r.review ? review_chain_matrix(*r.inv, 1)
                              : inventory_matrix(*r.inv, 1, r.variant);
            r.e1 = r.review ? review_chain_deriv(*r.inv, 1, 1)
                            : inventory_matrix_deriv(*r.inv, 1, r.variant, 1);
            r.e2 = r.review ? review_chain_deriv(*r.inv, 1, 2)
                            : inventory_matrix_deriv(*r.inv, 1, r.variant, 2);
            r.has_e2 = true;
            r.seq = r.review ? review_chain_sequence(*r.inv)
                             : inventory_sequence(*r.inv, r.variant);
        } else {  // birth_death
            r.base = birth_death(g.up, g.down);
            r.dim = r.base->dim();
            r.e1 = Matrix(r.dim, r.dim);
            r.e2 = Matrix(r.dim, r.dim);
        }
    } else if (doc.base) {
        r.base = validate_stochastic(*doc.base);
        r.dim = r.base->dim();
        r.e1 = doc.e1 ? *doc.e1 : Matrix(r.dim, r.dim);
        r.e2 = doc.e2 ? *doc.e2 : Matrix(r.dim, r.dim);
        r.has_e2 = doc.e2.has_value();
    } else {
        r.qbase = validate_rate(*doc.qbase);
        r.dim = r.qbase->dim();
        r.f1 = doc.f1 ? *doc.f1 : Matrix(r.dim, r.dim);
        r.f2 = doc.f2 ? *doc.f2 : Matrix(r.dim, r.dim);
        r.has_f2 = doc.f2.has_value();
    }

    // reward
    if (doc.reward_kw == "identity") {
        int lo = r.inv && !r.review ? r.inv->s : 0;
        r.reward = identity_reward(lo, lo + r.dim - 1);
    } else {
        if (static_cast<int>(doc.reward.size()) != r.dim)
            throw std::invalid_argument("reward has " + std::to_string(doc.reward.size()) +
                                        " entries, model dim is " + std::to_string(r.dim));
        r.reward = doc.reward;
    }

    // initial distribution (jump measures ignore it; use stationary)
    if (!mu_kw.empty()) {
        r.mu = resolve_mu(doc, r, mu_kw);
    } else if (!doc.mu.empty()) {
        if (static_cast<int>(doc.mu.size()) != r.dim)
            throw std::invalid_argument("mu has " + std::to_string(doc.mu.size()) +
                                        " entries, model dim is " + std::to_string(r.dim));
        r.mu = doc.mu;
    } else {
        r.mu = resolve_mu(doc, r, "stationary");
    }

    // finite-difference channel (needs a proper transition sequence)
    if (fd != "exact") {
        if (!r.seq)
            throw std::invalid_argument(
                "fd-index needs a generator model with a transition sequence");
        if (fd == "auto") {
            if (doc.measure->kind != MeasureKind::discounted)
                throw std::invalid_argument("fd-index auto is tied to the discount rate; "
                                            "give an explicit index");
            r.fd_j = default_fd_index(doc.measure->alpha);
        } else {
            r.fd_j = static_cast<int>(std::stol(fd));
        }
    }
    return r;
}

// ---------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------

using Quantities = std::vector<std::pair<std::string, double>>;

void eval_discounted(const ModelDoc& doc, const Resolved& r, Quantities& q) {
    const MeasureDoc& m = *doc.measure;
    DiscountSpec spec(m.alpha, RewardSpec(r.reward, r.mu));
    q.emplace_back("kappa0", stationary_value(*r.base, spec).kappa0);
    q.emplace_back("kappa1", first_order_linear(DriftModel(*r.base, r.e1), spec).kappa1);
    if (r.has_e2)
        q.emplace_back("kappa2",
                       second_order_linear(DriftModel(*r.base, r.e1, r.e2), spec));
    if (r.fd_j > 0) {
        Matrix e1_fd = fd_first(*r.seq, r.fd_j);
        Matrix e2_fd = fd_second(*r.seq, r.fd_j);
        q.emplace_back("kappa1_fd",
                       first_order_linear(DriftModel(*r.base, e1_fd), spec).kappa1);
        q.emplace_back("kappa2_fd",
                       second_order_linear(DriftModel(*r.base, e1_fd, e2_fd), spec));
    }
    if (r.seq) {
        TruncatedValue tt = exact_truncated(*r.seq, spec, m.eps_report);
        q.emplace_back("truncated_true", tt.kappa);
        q.emplace_back("n_trunc", static_cast<double>(tt.n_trunc));
    }
}

void push_transient(const TransientResult& t, bool second, Quantities& q) {
    q.emplace_back("value", t.value);
    q.emplace_back("order0", t.order0);
    q.emplace_back("order1_n", t.order1_n_coeff);
    q.emplace_back("order1_const", t.order1_const);
    if (second) q.emplace_back("order2", t.order2);
}

void eval_transient(const ModelDoc& doc, const Resolved& r, Quantities& q) {
    RewardSpec rw(r.reward, r.mu);
    DriftModel dm(*r.base, r.e1, r.has_e2 ? std::optional<Matrix>(r.e2) : std::nullopt);
    switch (doc.measure->mode) {
        case TransientMode::forward:
            push_transient(forward_first(dm, rw, doc.measure->n), false, q);
            break;
        case TransientMode::backward:
            push_transient(backward_first(dm, rw), false, q);
            break;
        case TransientMode::backward_second:
            if (!r.has_e2)
                throw std::invalid_argument("mode=backward-second needs an e2 block");
            push_transient(backward_second(dm, rw), true, q);
            break;
    }
}

void eval_cumulative(const ModelDoc& doc, const Resolved& r, Quantities& q) {
    CumulativeResult c =
        cumulative_first(DriftModel(*r.base, r.e1), RewardSpec(r.reward, r.mu),
                         doc.measure->n);
    q.emplace_back("value", c.value);
    q.emplace_back("order_n2", c.order_n2);
    q.emplace_back("order_n", c.order_n);
    q.emplace_back("order_1", c.order_1);
}

void eval_hitting(const ModelDoc& doc, const Resolved& r, Quantities& q) {
    AbsorbingSpec spec(doc.measure->target, r.reward, r.mu);
    BlockData block = build_block(*r.base, spec);
    q.emplace_back("delta0",
                   stationary_hitting(block, restrict_row(r.mu, doc.measure->target)).delta0);
    q.emplace_back("delta1", first_order_hitting(DriftModel(*r.base, r.e1), spec));
}

void eval_jump(const ModelDoc&, const Resolved& r, Quantities& q) {
    RowVec pi = ctmc_stationary(r.qbase->mat());
    RewardSpec rw(r.reward, pi);
    q.emplace_back("order0", dot(pi, r.reward));
    RateDriftModel rm1(*r.qbase, r.f1);
    q.emplace_back("order1", jump_first(rm1, rw));
    if (r.has_f2) {
        RateDriftModel rm2(*r.qbase, r.f1, r.f2);
        q.emplace_back("order2", jump_second(rm2, rw));
    }
}

void print_quantities(const Quantities& q, const std::string& format, int precision,
                      std::ostream& out) {
    if (format == "json-lines") {
        // full-precision doubles so results re-ingest exactly
        for (const auto& [name, value] : q) {
            nlohmann::ordered_json obj;
            obj["quantity"] = name;
            obj["value"] = value;
            out << obj.dump() << "\n";
        }
        return;
    }
    ReportTable table;
    table.title = "eval";
    table.header = {"quantity", "value"};
    for (const auto& [name, value] : q)
        table.rows.push_back({name, format_fixed(value, precision)});
    out << (format == "csv" ? to_csv(table) : to_markdown(table));
}

int map_failure(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const NotContracting*>(&e) || dynamic_cast<const NotIrreducible*>(&e) ||
        dynamic_cast<const SingularMatrix*>(&e))
        return 3;
    return 2;  // parse / validation (including non-stochastic rows)
}

}  // namespace

int cmd_eval(const std::string& model_path, const CliOptions& opt, std::ostream& out,
             std::ostream& err) {
    ModelDoc doc;
    try {
        doc = load_model_doc(model_path);
    } catch (const ParseError& e) {
        err << "error: " << model_path << ":" << e.line << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        Resolved r = resolve(doc, opt);
        Quantities q;
        switch (doc.measure->kind) {
            case MeasureKind::discounted: eval_discounted(doc, r, q); break;
            case MeasureKind::transient: eval_transient(doc, r, q); break;
            case MeasureKind::cumulative: eval_cumulative(doc, r, q); break;
            case MeasureKind::hitting: eval_hitting(doc, r, q); break;
            case MeasureKind::jump: eval_jump(doc, r, q); break;
        }
        int precision = opt.precision >= 0 ? opt.precision : doc.precision;
        print_quantities(q, opt.format, precision, out);
        return 0;
    } catch (const std::exception& e) {
        return map_failure(e, err);
    }
}

namespace {

// one named condition check; `detail` explains a failure
struct CheckLine {
    std::string name;
    bool pass;
    std::string detail;
};

void add_check(std::vector<CheckLine>& checks, const std::string& name,
               const std::function<void()>& body) {
    try {
        body();
        checks.push_back({name, true, ""});
    } catch (const std::exception& e) {
        checks.push_back({name, false, e.what()});
    }
}

// A strictly positive power within the bound (dim-1)^2+1 implies the chain
// is irreducible and aperiodic; above the bound positivity never appears.
// Works on the boolean support pattern with binary exponentiation, so large
// state spaces stay cheap.  (Positivity is monotone in the exponent for
// stochastic matrices, so testing at a power >= the bound is equivalent.)
void require_primitive(const Matrix& p) {
    int n = p.rows();
    long bound = static_cast<long>(n - 1) * (n - 1) + 1;
    using Pattern = std::vector<std::vector<char>>;
    auto mul = [n](const Pattern& a, const Pattern& b) {
        Pattern c(n, std::vector<char>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (a[i][k])
                    for (int j = 0; j < n; ++j)
                        if (b[k][j]) c[i][j] = 1;
        return c;
    };
    Pattern power(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) power[i][j] = p(i, j) > 0 ? 1 : 0;
    long k = 1;
    while (k < bound) {
        power = mul(power, power);
        k *= 2;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!power[i][j])
                throw NotIrreducible("no strictly positive power up to (dim-1)^2+1; "
                                     "chain is reducible or periodic");
}

void require_zero_rows(const Matrix& m, const std::string& what) {
    double scale = std::max(1.0, norm_rowsum(m));
    for (int i = 0; i < m.rows(); ++i) {
        double s = 0;
        for (int j = 0; j < m.cols(); ++j) s += m(i, j);
        if (std::fabs(s) > 1e-9 * scale)
            throw std::invalid_argument(what + " row " + std::to_string(i) +
                                        " sums to " + std::to_string(s) +
                                        ", expected 0");
    }
}

}  // namespace

int cmd_check(const std::string& model_path, std::ostream& out, std::ostream& err) {
    ModelDoc doc;
    try {
        doc = load_model_doc(model_path);
    } catch (const ParseError& e) {
        err << "error: " << model_path << ":" << e.line << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    std::vector<CheckLine> checks;
    CliOptions none;
    std::optional<Resolved> resolved;
    add_check(checks, "model resolves and rows are stochastic (or valid rates)",
              [&] { resolved = resolve(doc, none); });

    if (resolved && resolved->base) {
        const Matrix& p = resolved->base->mat();
        add_check(checks, "chain has a strictly positive power (irreducible, aperiodic)",
                  [&] { require_primitive(p); });
        add_check(checks, "stationary distribution solves",
                  [&] { stationary_distribution(*resolved->base); });
        add_check(checks, "drift matrices have zero row sums", [&] {
            require_zero_rows(resolved->e1, "e1");
            require_zero_rows(resolved->e2, "e2");
        });
        if (doc.measure->kind == MeasureKind::hitting) {
            add_check(checks, "pre-absorption block is contracting", [&] {
                Matrix b = principal_block(p, doc.measure->target);
                if (!contraction_power(b, 4 * static_cast<int>(doc.measure->target.size())))
                    throw NotContracting("no power of the pre-absorption block has norm "
                                         "below 1; absorption is not certain");
            });
        }
    }
    if (resolved && resolved->qbase) {
        add_check(checks, "uniformized chain is stochastic", [&] {
            uniformize(*resolved->qbase, default_uniformization_rate(*resolved->qbase));
        });
        add_check(checks, "rate matrix admits a stationary distribution",
                  [&] { ctmc_stationary(resolved->qbase->mat()); });
        add_check(checks, "rate drift matrices have zero row sums", [&] {
            require_zero_rows(resolved->f1, "f1");
            require_zero_rows(resolved->f2, "f2");
        });
    }

    const CheckLine* first_fail = nullptr;
    for (const auto& c : checks) {
        out << "check: " << c.name << ": " << (c.pass ? "pass" : "FAIL") << "\n";
        if (!c.pass) {
            out << "       " << c.detail << "\n";
            if (!first_fail) first_fail = &c;
        }
    }
    if (first_fail) {
        err << "condition violated: " << first_fail->name << ": " << first_fail->detail
            << "\n";
        return 3;
    }
    return 0;
}

int cmd_reproduce_tables(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        CalibrationResult cal = calibrate();
        TableChoice choice;
        if (!opt.variant.empty() || !opt.mu.empty()) {
            choice.variant = opt.variant.empty() ? "review" : opt.variant;
            choice.mu = opt.mu.empty() ? "binomial" : opt.mu;
        } else if (cal.selected >= 0) {
            choice = cal.candidates[cal.selected].choice;
        } else {
            err << "calibration failed for every candidate:\n"
                << to_markdown(calibration_report(cal));
            return 3;
        }

        namespace fs = std::filesystem;
        fs::create_directories(opt.out_dir);

        int precision = opt.precision >= 0 ? opt.precision : 4;
        std::string note = "# Inventory study\n\n";
        note += "Selected convention: variant=" + choice.variant + ", mu=" + choice.mu +
                "\n\n";
        note += to_markdown(calibration_report(cal, precision));
        fs::path note_path = fs::path(opt.out_dir) / "calibration.md";
        std::ofstream(note_path) << note;
        out << "wrote " << note_path.string() << "\n";

        for (int id : opt.tables) {
            if (id < 1 || id > 6)
                throw std::invalid_argument("table id out of range 1..6: " +
                                            std::to_string(id));
            TableResult result = reproduce_table(table_specs()[id - 1], choice);
            fs::path csv_path =
                fs::path(opt.out_dir) / ("table" + std::to_string(id) + ".csv");
            std::ofstream(csv_path) << to_csv(table_report(result, precision));
            out << "wrote " << csv_path.string() << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        return map_failure(e, err);
    }
}

}  // namespace nsmc
