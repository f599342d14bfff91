// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "trivergence/divergence.hpp"
#include "trivergence/error.hpp"
#include "trivergence/ingest.hpp"
#include "trivergence/trivergence.hpp"

namespace trivergence::cli {

std::string format_number(double v, int digits) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kNotEvaluable = "not evaluable: undefined in source";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A library error raised while reading one input file.
struct InputError : std::runtime_error {
    InputError(const std::string& path, const Error& e)
        : std::runtime_error(path + ": " + e.what()), kind(e.kind()) {}
    ErrorKind kind;
};

struct RunConfig {
    std::string command;
    std::string base = "kl";
    std::string form = "product";
    std::string mode = "paper-literal";
    std::string denom = "auto";
    std::size_t ngram_n = 1;
    std::string input_kind;  // empty: chosen per file by extension
    std::string output = "json";
    std::string qr_norm = "union";
    std::string split = "unicode";
    bool no_lowercase = false;
    bool evaluate = false;
    std::vector<std::string> inputs;
};

struct Denominator {
    enum Kind { Auto, PairSum, TripletUnion, Explicit } kind = Auto;
    std::uint64_t n = 0;
};

Denominator parse_denominator(const std::string& text) {
    if (text == "auto") return {Denominator::Auto, 0};
    if (text == "pair-sum") return {Denominator::PairSum, 0};
    if (text == "triplet-union") return {Denominator::TripletUnion, 0};
    std::uint64_t n = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || end != text.data() + text.size() || n == 0) {
        throw UsageError("--denom expects auto, pair-sum, triplet-union or an integer >= 1, got '" +
                         text + "'");
    }
    return {Denominator::Explicit, n};
}

NormalizationMode parse_mode(const std::string& s) {
    if (s == "token") return NormalizationMode::TokenNormalized;
    if (s == "strict") return NormalizationMode::Strict;
    return NormalizationMode::PaperLiteral;
}

DivergenceKind parse_base(const std::string& s) {
    return s == "js" ? DivergenceKind::JS : DivergenceKind::KL;
}

TrivergenceForm parse_form(const std::string& s) {
    return s == "compound" ? TrivergenceForm::Compound : TrivergenceForm::Product;
}

int output_digits() {
    const char* env = std::getenv("TRIVERGE_PRECISION");
    if (!env || !*env) return 17;
    int digits = 0;
    const std::string_view s(env);
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), digits);
    if (ec != std::errc{} || end != s.data() + s.size() || digits < 1 || digits > 17) {
        throw UsageError("TRIVERGE_PRECISION must be an integer in [1, 17]");
    }
    return digits;
}

// Input -----------------------------------------------------------------------

std::string read_file(const std::string& path) {
    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) throw IoError("'" + path + "' is a directory");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + path + "'");
    return ss.str();
}

bool is_tsv(const RunConfig& cfg, const std::string& path) {
    if (!cfg.input_kind.empty()) return cfg.input_kind == "tsv";
    return std::filesystem::path(path).extension() == ".tsv";
}

std::vector<CountDistribution> load_inputs(const RunConfig& cfg) {
    ingest::TokenizerConfig tok;
    tok.lowercase = !cfg.no_lowercase;
    tok.split_policy = cfg.split == "whitespace" ? ingest::SplitPolicy::WhitespaceOnly
                                                 : ingest::SplitPolicy::UnicodeWhitespacePunct;
    tok.ngram_n = cfg.ngram_n;

    std::vector<CountDistribution> out;
    for (const auto& path : cfg.inputs) {
        const std::string content = read_file(path);
        try {
            out.push_back(is_tsv(cfg, path) ? ingest::distribution_from_tsv(content, path)
                                            : ingest::distribution_from_text(content, tok, path));
        } catch (const Error& e) {
            throw InputError(path, e);
        }
    }
    return out;
}

void require_arity(const RunConfig& cfg, std::size_t n, bool at_least) {
    const std::size_t got = cfg.inputs.size();
    if (at_least ? got < n : got != n) {
        throw UsageError(cfg.command + " needs " + (at_least ? "at least " : "exactly ") +
                         std::to_string(n) + " inputs, got " + std::to_string(got));
    }
}

// Output ----------------------------------------------------------------------

void write_json(const Json& j, std::string& out, int digits, int depth) {
    const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
    const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                out += Json(key).dump(-1, ' ', false, Json::error_handler_t::replace);
                out += ": ";
                write_json(value, out, digits, depth + 1);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                write_json(j[i], out, digits, depth + 1);
            }
            out += "\n" + close_pad + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_number(v, digits) : "null";
            return;
        }
        default:
            out += j.dump(-1, ' ', false, Json::error_handler_t::replace);
    }
}

void emit_json(std::ostream& out, const Json& j) {
    std::string text;
    write_json(j, text, output_digits(), 0);
    out << text << '\n';
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string csv_number(double v) { return format_number(v, output_digits()); }

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json region_json(const RegionTerms& t) {
    Json j;
    j["only_first"] = t.only_first;
    j["both"] = t.both;
    j["only_second"] = optional_number(t.only_second);
    return j;
}

Json denominator_json(const SmoothingContext& ctx) {
    Json j;
    j["policy"] = std::string(to_string(ctx.policy));
    j["value"] = ctx.denominator;
    return j;
}

Json pair_json(const DivergenceReport& r) {
    Json j;
    j["first"] = r.first_label;
    j["second"] = r.second_label;
    j["value"] = r.value;
    j["region_terms"] = region_json(r.region_terms);
    return j;
}

// Commands --------------------------------------------------------------------

SmoothingContext pair_context(const Denominator& d, const CountDistribution& p,
                              const CountDistribution& q, NormalizationMode mode) {
    switch (d.kind) {
        case Denominator::Auto:
        case Denominator::PairSum: return SmoothingContext::pair_sum(p, q, mode);
        case Denominator::Explicit: return SmoothingContext::explicit_denominator(d.n, mode);
        case Denominator::TripletUnion: break;
    }
    throw UsageError("triplet-union needs three distributions; use pair-sum or an explicit N");
}

TrivergenceOptions triple_options(const RunConfig& cfg) {
    const Denominator d = parse_denominator(cfg.denom);
    if (d.kind == Denominator::PairSum) {
        throw UsageError("pair-sum is defined for two distributions; use triplet-union or an explicit N");
    }
    TrivergenceOptions opts;
    opts.mode = parse_mode(cfg.mode);
    opts.qr_normalizer = cfg.qr_norm == "sum" ? QrNormalizer::CardinalitySum : QrNormalizer::Union;
    if (d.kind == Denominator::Explicit) opts.explicit_denominator = d.n;
    return opts;
}

int run_div(const RunConfig& cfg, std::ostream& out) {
    require_arity(cfg, 2, false);
    const Denominator denom = parse_denominator(cfg.denom);
    const auto mode = parse_mode(cfg.mode);
    const auto d = load_inputs(cfg);
    const auto ctx = pair_context(denom, d[0], d[1], mode);
    const DivergenceReport r = divergence(parse_base(cfg.base), d[0], d[1], ctx);
    const bool tie = d[0].distinct_count() == d[1].distinct_count();

    if (cfg.output == "csv") {
        out << "command,base,mode,denominator_policy,denominator,first,second,value_bits\n";
        out << "div," << cfg.base << ',' << cfg.mode << ',' << to_string(ctx.policy) << ','
            << ctx.denominator << ',' << csv_field(r.first_label) << ','
            << csv_field(r.second_label) << ',' << csv_number(r.value) << '\n';
        return kOk;
    }
    Json j;
    j["command"] = "div";
    j["base"] = cfg.base;
    j["mode"] = cfg.mode;
    j["denominator"] = denominator_json(ctx);
    j["value_bits"] = r.value;
    j["region_terms"] = region_json(r.region_terms);
    j["support_size"] = r.support_size;
    j["labels"] = Json::array({r.first_label, r.second_label});
    j["tie_flags"] = Json::array({tie});
    emit_json(out, j);
    return kOk;
}

Json components_json(const TrivergenceResult& r) {
    Json j;
    if (r.compound) {
        const CompoundComponents& c = *r.compound;
        j["inner"] = pair_json(c.inner);
        j["scalar"] = c.scalar;
        j["normalizer"] = c.normalizer;
        j["normalizer_kind"] = c.normalizer_kind;
        j["zero_branch"] = c.zero_branch;
        j["effective_scalar"] = c.effective_scalar;
        j["outer_label"] = c.outer_label;
        j["outer_terms"] = region_json(c.outer_terms);
    } else {
        j["factors"] = Json::array();
        for (const auto& f : r.factors) j["factors"].push_back(pair_json(f));
    }
    return j;
}

int run_triv(const RunConfig& cfg, std::ostream& out) {
    require_arity(cfg, 3, false);
    const TrivergenceOptions opts = triple_options(cfg);
    const auto d = load_inputs(cfg);
    const auto base = parse_base(cfg.base);
    const TrivergenceResult r = parse_form(cfg.form) == TrivergenceForm::Product
                                    ? triv_product(d[0], d[1], d[2], base, opts)
                                    : triv_compound(d[0], d[1], d[2], base, opts);

    if (cfg.output == "csv") {
        out << "command,form,base,mode,denominator_policy,denominator,first,second,third,value,"
               "units,zero_branch\n";
        out << "triv," << cfg.form << ',' << cfg.base << ',' << cfg.mode << ','
            << to_string(r.context.policy) << ',' << r.context.denominator << ','
            << csv_field(r.labels[0]) << ',' << csv_field(r.labels[1]) << ','
            << csv_field(r.labels[2]) << ',' << csv_number(r.value) << ',' << r.units() << ','
            << (r.zero_branch() ? "true" : "false") << '\n';
        return kOk;
    }
    Json j;
    j["command"] = "triv";
    j["form"] = cfg.form;
    j["base"] = cfg.base;
    j["mode"] = cfg.mode;
    j["qr_normalizer"] = std::string(to_string(opts.qr_normalizer));
    j["denominator"] = denominator_json(r.context);
    j["value"] = r.value;
    j["units"] = std::string(r.units());
    j["variant"] = r.variant;
    j["components"] = components_json(r);
    Json order;
    order["permutation"] = r.permutation;
    order["labels"] = r.labels;
    order["tie_flags"] = r.tie;
    j["canonical_order"] = order;
    j["zero_branch_flag"] = r.zero_branch();
    emit_json(out, j);
    return kOk;
}

int run_matrix(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    require_arity(cfg, 2, true);
    const Denominator denom = parse_denominator(cfg.denom);
    const auto mode = parse_mode(cfg.mode);
    const auto base = parse_base(cfg.base);
    if (denom.kind == Denominator::TripletUnion) {
        throw UsageError("triplet-union needs three distributions; use pair-sum or an explicit N");
    }
    const auto d = load_inputs(cfg);
    const std::size_t n = d.size();

    // Cells are independent; each worker writes only its own slots.
    std::vector<double> cells(n * n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
        const std::size_t workers = std::min(hw, n * n);
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < n * n; k = next++) {
                    try {
                        const auto& p = d[k / n];
                        const auto& q = d[k % n];
                        cells[k] = divergence(base, p, q, pair_context(denom, p, q, mode)).value;
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);

    bool symmetric = true;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) symmetric &= cells[i * n + k] == cells[k * n + i];
    }
    if (base == DivergenceKind::JS && !symmetric) {
        err << "internal error: JS matrix is not symmetric\n";
        return kInternal;
    }

    if (cfg.output == "csv") {
        out << "row,column,value\n";
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                out << csv_field(d[i].label()) << ',' << csv_field(d[k].label()) << ','
                    << csv_number(cells[i * n + k]) << '\n';
            }
        }
        return kOk;
    }
    Json j;
    j["command"] = "matrix";
    j["base"] = cfg.base;
    j["mode"] = cfg.mode;
    Json dj;
    dj["policy"] = denom.kind == Denominator::Explicit ? "explicit" : "pair-sum";
    dj["value"] = denom.kind == Denominator::Explicit ? Json(denom.n) : Json(nullptr);
    j["denominator"] = dj;
    j["labels"] = Json::array();
    for (const auto& x : d) j["labels"].push_back(x.label());
    j["values"] = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < n; ++k) row.push_back(cells[i * n + k]);
        j["values"].push_back(std::move(row));
    }
    j["symmetric"] = symmetric;
    emit_json(out, j);
    return kOk;
}

int run_variants(const RunConfig& cfg, std::ostream& out) {
    if (cfg.evaluate) {
        require_arity(cfg, 3, false);
    } else if (!cfg.inputs.empty()) {
        throw UsageError("variants takes inputs only with --evaluate");
    }
    const auto form = parse_form(cfg.form);
    const auto base = parse_base(cfg.base);
    const auto variants = enumerate_variants(form);

    std::vector<CountDistribution> d;
    TrivergenceOptions opts;
    if (cfg.evaluate) {
        opts = triple_options(cfg);
        d = load_inputs(cfg);
    }

    struct Row {
        const VariantDescriptor* v;
        std::optional<TrivergenceResult> result;
    };
    std::vector<Row> rows;
    std::size_t evaluable = 0;
    for (const auto& v : variants) {
        Row row{&v, std::nullopt};
        evaluable += v.evaluable ? 1 : 0;
        if (cfg.evaluate && v.evaluable) row.result = evaluate_variant(v, d[0], d[1], d[2], base, opts);
        rows.push_back(std::move(row));
    }

    if (cfg.output == "csv") {
        out << "form,index,text,evaluable,value,note\n";
        for (const auto& row : rows) {
            out << cfg.form << ',' << row.v->index << ',' << csv_field(row.v->text) << ','
                << (row.v->evaluable ? "true" : "false") << ','
                << (row.result ? csv_number(row.result->value) : "") << ','
                << (row.v->evaluable ? "" : csv_field(std::string(kNotEvaluable))) << '\n';
        }
        return kOk;
    }
    Json j;
    j["command"] = "variants";
    j["form"] = cfg.form;
    j["base"] = cfg.base;
    j["mode"] = cfg.mode;
    j["evaluated"] = cfg.evaluate;
    j["count"] = rows.size();
    j["evaluable_count"] = evaluable;
    j["labels"] = Json::array();
    for (const auto& x : d) j["labels"].push_back(x.label());
    j["rows"] = Json::array();
    for (const auto& row : rows) {
        Json r;
        r["index"] = row.v->index;
        r["text"] = row.v->text;
        r["evaluable"] = row.v->evaluable;
        r["value"] = row.result ? Json(row.result->value) : Json(nullptr);
        r["zero_branch"] = row.result ? Json(row.result->zero_branch()) : Json(nullptr);
        r["denominator"] = row.result ? denominator_json(row.result->context) : Json(nullptr);
        r["note"] = row.v->evaluable ? Json(nullptr) : Json(std::string(kNotEvaluable));
        j["rows"].push_back(std::move(r));
    }
    emit_json(out, j);
    return kOk;
}

// Parsing -----------------------------------------------------------------------

void add_common(CLI::App* sub, RunConfig& cfg, bool with_form) {
    sub->add_option("--base", cfg.base, "Divergence: kl or js")
        ->check(CLI::IsMember({"kl", "js"}));
    sub->add_option("--mode", cfg.mode, "Normalization: paper-literal, token or strict")
        ->check(CLI::IsMember({"paper-literal", "token", "strict"}));
    sub->add_option("--denom", cfg.denom, "Smoothing denominator: auto, pair-sum, triplet-union or N");
    sub->add_option("--ngram", cfg.ngram_n, "Token n-gram length for text inputs")
        ->check(CLI::PositiveNumber);
    sub->add_option("--input", cfg.input_kind, "Input format: text or tsv (default: by extension)")
        ->check(CLI::IsMember({"text", "tsv"}));
    sub->add_option("--output", cfg.output, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--split", cfg.split, "Token boundaries: unicode or whitespace")
        ->check(CLI::IsMember({"unicode", "whitespace"}));
    sub->add_flag("--no-lowercase", cfg.no_lowercase, "Keep case when tokenizing");
    if (with_form) {
        sub->add_option("--form", cfg.form, "Trivergence form: product or compound")
            ->check(CLI::IsMember({"product", "compound"}));
        sub->add_option("--qr-norm", cfg.qr_norm, "Compound JS scalar normalizer: union or sum")
            ->check(CLI::IsMember({"union", "sum"}));
    }
    sub->add_option("inputs", cfg.inputs, "Input files");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Divergences and trivergences of count distributions", "triverge"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* div = app.add_subcommand("div", "Divergence between two inputs");
    auto* triv = app.add_subcommand("triv", "Trivergence of three inputs");
    auto* matrix = app.add_subcommand("matrix", "Pairwise divergence matrix");
    auto* variants = app.add_subcommand("variants", "Enumerate trivergence compositions");
    add_common(div, cfg, false);
    add_common(triv, cfg, true);
    add_common(matrix, cfg, false);
    add_common(variants, cfg, true);
    variants->add_flag("--evaluate", cfg.evaluate, "Evaluate each composition on three inputs");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        (void)output_digits();  // reject a bad override before writing anything
        if (div->parsed()) {
            cfg.command = "div";
            return run_div(cfg, out);
        }
        if (triv->parsed()) {
            cfg.command = "triv";
            return run_triv(cfg, out);
        }
        if (matrix->parsed()) {
            cfg.command = "matrix";
            return run_matrix(cfg, out, err);
        }
        cfg.command = "variants";
        return run_variants(cfg, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return e.kind == ErrorKind::InvalidContext ? kUsage : kInvalidDistribution;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::InvalidContext ? kUsage : kInvalidDistribution;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

}  // namespace trivergence::cli
