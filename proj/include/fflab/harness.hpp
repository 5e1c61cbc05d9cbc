#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "circle.hpp"
#include "exponent_audit.hpp"
#include "latgon.hpp"
#include "moduli.hpp"
#include "weyl.hpp"

namespace fflab::harness {

enum class Status : int { Pass = 0, Fail = 1, ConfigInvalid = 2, BudgetExhausted = 3 };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- records

/// Exact values travel as strings ("num/den", "[c_0,...]"); small integers and
/// flags keep their JSON types.
using Value = std::variant<bool, std::int64_t, std::string>;

struct Record {
    std::string task;
    std::vector<std::pair<std::string, Value>> fields;

    Record& set(const std::string& key, Value v) {
        for (auto& [k, x] : fields)
            if (k == key) {
                x = std::move(v);
                return *this;
            }
        fields.emplace_back(key, std::move(v));
        return *this;
    }
    Record& set(const std::string& key, bool b) { return set(key, Value(b)); }
    Record& set(const std::string& key, const std::string& s) { return set(key, Value(s)); }
    Record& set(const std::string& key, const char* s) { return set(key, Value(std::string(s))); }
    Record& set(const std::string& key, int v) { return set(key, Value(static_cast<std::int64_t>(v))); }
    Record& set(const std::string& key, long v) { return set(key, Value(static_cast<std::int64_t>(v))); }
    Record& set(const std::string& key, std::uint64_t v) { return set(key, Value(static_cast<std::int64_t>(v))); }
    Record& set(const std::string& key, std::uint32_t v) { return set(key, Value(static_cast<std::int64_t>(v))); }
    Record& set(const std::string& key, const Integer& v) { return set(key, Value(v.get_str())); }
    Record& set(const std::string& key, const Rational& v) { return set(key, Value(to_string(v))); }
    Record& set(const std::string& key, const CyclotomicValue& v) { return set(key, Value(v.to_string())); }

    const Value* get(const std::string& key) const {
        for (const auto& [k, x] : fields)
            if (k == key) return &x;
        return nullptr;
    }
    friend bool operator==(const Record&, const Record&) = default;
};

inline std::string value_text(const Value& v) {
    if (auto b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (auto i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    return std::get<std::string>(v);
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void write_csv(std::ostream& os, const std::vector<std::string>& columns, const std::vector<Record>& records) {
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : records) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const Value* v = r.get(columns[i]);
            os << (i ? "," : "") << (v ? csv_escape(value_text(*v)) : "");
        }
        os << '\n';
    }
}

inline nlohmann::ordered_json to_json(const Record& r) {
    nlohmann::ordered_json j;
    j["task"] = r.task;
    for (const auto& [k, v] : r.fields) std::visit([&](const auto& x) { j[k] = x; }, v);
    return j;
}

inline Record from_json(const nlohmann::ordered_json& j) {
    Record r;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "task") {
            r.task = it.value().get<std::string>();
        } else if (it.value().is_boolean()) {
            r.fields.emplace_back(it.key(), it.value().get<bool>());
        } else if (it.value().is_number_integer()) {
            r.fields.emplace_back(it.key(), it.value().get<std::int64_t>());
        } else if (it.value().is_string()) {
            r.fields.emplace_back(it.key(), it.value().get<std::string>());
        } else {
            throw std::invalid_argument("unsupported JSON value for " + it.key());
        }
    }
    return r;
}

inline void write_jsonl(std::ostream& os, const std::vector<Record>& records) {
    for (const auto& r : records) os << to_json(r).dump() << '\n';
}

inline std::vector<Record> read_jsonl(std::istream& in) {
    std::vector<Record> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(from_json(nlohmann::ordered_json::parse(line)));
    return out;
}

// ----------------------------------------------------------------- config

struct RunConfig {
    std::string task;
    std::string source;  // config path, for diagnostics
    std::optional<std::uint32_t> p;
    std::vector<std::uint32_t> modulus;
    std::string form_path;
    int n = 0, d = 0, e = 1;
    std::uint64_t budget = 1'000'000'000;
    unsigned workers = 1;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string format = "csv";
    boost::property_tree::ptree tree;
    std::map<std::string, int> lines;  // "section.key" -> line

    std::string where(const std::string& key) const {
        auto it = lines.find(key);
        return source + (it != lines.end() ? ":" + std::to_string(it->second) : "") + ": field " + key;
    }
    bool has(const std::string& key) const { return tree.get_optional<std::string>(key).has_value(); }
    std::string str(const std::string& key, const std::string& fallback) const { return tree.get<std::string>(key, fallback); }

    long integer(const std::string& key, std::optional<long> fallback = std::nullopt) const {
        auto v = tree.get_optional<std::string>(key);
        if (!v) {
            if (fallback) return *fallback;
            throw ConfigError(where(key) + ": required");
        }
        try {
            std::size_t used = 0;
            long x = std::stol(*v, &used);
            if (used != v->size()) throw std::invalid_argument(*v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError(where(key) + ": expected an integer, got '" + *v + "'");
        }
    }

    Rational rational(const std::string& key, std::optional<Rational> fallback = std::nullopt) const {
        auto v = tree.get_optional<std::string>(key);
        if (!v) {
            if (fallback) return *fallback;
            throw ConfigError(where(key) + ": required");
        }
        try {
            Rational r(*v);
            r.canonicalize();
            return r;
        } catch (const std::exception&) {
            throw ConfigError(where(key) + ": expected a rational, got '" + *v + "'");
        }
    }

    bool flag(const std::string& key, bool fallback) const {
        auto v = tree.get_optional<std::string>(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError(where(key) + ": expected true/false, got '" + *v + "'");
    }

    std::vector<long> integers(const std::string& key, std::vector<long> fallback) const {
        auto v = tree.get_optional<std::string>(key);
        if (!v) return fallback;
        std::vector<long> out;
        std::string s = *v;
        for (auto& c : s)
            if (c == ',') c = ' ';
        std::istringstream is(s);
        std::string tok;
        while (is >> tok) {
            try {
                std::size_t used = 0;
                out.push_back(std::stol(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError(where(key) + ": bad integer '" + tok + "'");
            }
        }
        return out;
    }
};

inline std::map<std::string, int> ini_key_lines(std::istream& in) {
    std::map<std::string, int> out;
    std::string line, section;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        auto a = line.find_first_not_of(" \t");
        if (a == std::string::npos || line[a] == ';' || line[a] == '#') continue;
        if (line[a] == '[') {
            section = line.substr(a + 1, line.find(']') - a - 1);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(a, eq - a);
        key.erase(key.find_last_not_of(" \t") + 1);
        out[section.empty() ? key : section + "." + key] = no;
    }
    return out;
}

/// Sections: [field] p, modulus; [form] file, n, d; [problem] e;
/// [run] workers, budget, seed, out, format, task; [task] task parameters.
inline RunConfig parse_config(std::istream& in, const std::string& source, const std::string& base_dir = ".") {
    RunConfig c;
    c.source = source;
    std::stringstream buf;
    buf << in.rdbuf();
    {
        std::istringstream s1(buf.str());
        try {
            boost::property_tree::ini_parser::read_ini(s1, c.tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
        }
    }
    {
        std::istringstream s2(buf.str());
        c.lines = ini_key_lines(s2);
    }
    if (c.has("field.p")) {
        const long p = c.integer("field.p");
        if (p < 2 || !detail::is_prime(static_cast<std::uint64_t>(p))) throw ConfigError(c.where("field.p") + ": not a prime");
        c.p = static_cast<std::uint32_t>(p);
        for (long x : c.integers("field.modulus", {})) {
            if (x < 0 || x >= p) throw ConfigError(c.where("field.modulus") + ": coefficient out of range");
            c.modulus.push_back(static_cast<std::uint32_t>(x));
        }
        if (!c.modulus.empty()) {
            if (c.modulus.back() != 1) throw ConfigError(c.where("field.modulus") + ": modulus must be monic (coefficients low to high)");
            if (c.modulus.size() > 2 && !detail::fp_irreducible(c.modulus, *c.p)) throw ConfigError(c.where("field.modulus") + ": not irreducible");
        }
    }
    if (c.has("form.file")) {
        std::filesystem::path fp(c.str("form.file", ""));
        c.form_path = fp.is_absolute() ? fp.string() : (std::filesystem::path(base_dir) / fp).string();
    }
    c.n = static_cast<int>(c.integer("form.n", 0));
    c.d = static_cast<int>(c.integer("form.d", 0));
    c.e = static_cast<int>(c.integer("problem.e", 1));
    if (c.e < 1) throw ConfigError(c.where("problem.e") + ": must be >= 1");
    if (c.p && c.d && *c.p <= static_cast<std::uint32_t>(c.d))
        throw ConfigError(c.where("field.p") + ": characteristic must exceed the degree d = " + std::to_string(c.d));
    const long budget = c.integer("run.budget", 1'000'000'000L);
    if (budget <= 0) throw ConfigError(c.where("run.budget") + ": must be positive");
    c.budget = static_cast<std::uint64_t>(budget);
    const long workers = c.integer("run.workers", 1);
    if (workers < 1) throw ConfigError(c.where("run.workers") + ": must be positive");
    c.workers = static_cast<unsigned>(workers);
    c.seed = static_cast<std::uint64_t>(c.integer("run.seed", 1));
    c.out_dir = c.str("run.out", "out");
    c.format = c.str("run.format", "csv");
    if (c.format != "csv" && c.format != "jsonl") throw ConfigError(c.where("run.format") + ": expected csv or jsonl");
    c.task = c.str("run.task", "");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse_config(in, path, std::filesystem::path(path).parent_path().string());
}

// ------------------------------------------------------------------ tasks

struct Context {
    const RunConfig& cfg;
    Budget& budget;
    unsigned workers;
    std::mt19937_64 rng;
    std::function<void(Record)> emit;
};

struct TaskSpec {
    std::string name;
    std::vector<std::string> columns;
    bool needs_form = true;
    std::function<bool(Context&)> run;  // true iff every asserted invariant held
};

inline FieldSpec field_of(const RunConfig& c) {
    if (!c.p) throw ConfigError(c.source + ": field.p is required for this task");
    try {
        return FieldSpec(*c.p, c.modulus);
    } catch (const DomainError& e) {
        throw ConfigError(c.where("field.modulus") + ": " + e.what());
    }
}

inline CountingProblem problem_of(const RunConfig& c) {
    if (c.form_path.empty()) throw ConfigError(c.source + ": form.file is required for this task");
    auto F = field_of(c);
    try {
        auto form = forms::load_form(F, c.form_path, c.n, c.d);
        if (F.p() <= static_cast<std::uint32_t>(form.d()))
            throw ConfigError(c.where("field.p") + ": characteristic must exceed the degree d = " + std::to_string(form.d()));
        return CountingProblem(std::move(form), c.e);
    } catch (const forms::FormFileError& e) {
        throw ConfigError(c.form_path + ": " + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(c.form_path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

/// Atom keys chosen by task.alpha: "all" or "sample" with task.samples draws.
inline std::vector<AtomKey> alpha_keys(Context& ctx, const CountingProblem& prob) {
    const std::uint64_t total = upow_checked(prob.q(), static_cast<unsigned>(prob.B()));
    const std::string mode = ctx.cfg.str("task.alpha", "sample");
    std::vector<AtomKey> keys;
    if (mode == "all") {
        for (AtomKey k = 0; k < total; ++k) keys.push_back(k);
    } else if (mode == "sample") {
        const long s = ctx.cfg.integer("task.samples", 50);
        if (s < 1) throw ConfigError(ctx.cfg.where("task.samples") + ": must be positive");
        for (long i = 0; i < s; ++i) keys.push_back(ctx.rng() % total);
    } else {
        throw ConfigError(ctx.cfg.where("task.alpha") + ": expected all or sample");
    }
    return keys;
}

inline std::string join(const std::vector<long>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}

inline std::string fixed_ratio(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

inline weyl::PointwiseLemma lemma_of(const RunConfig& c) {
    const std::string s = c.str("task.lemma", "general");
    if (s == "general") return weyl::PointwiseLemma::General;
    if (s == "deg-r-positive") return weyl::PointwiseLemma::DegRPositive;
    if (s == "deg-r-zero") return weyl::PointwiseLemma::DegRZero;
    throw ConfigError(c.where("task.lemma") + ": expected general, deg-r-positive or deg-r-zero");
}

inline std::vector<TaskSpec> task_table() {
    std::vector<TaskSpec> t;

    t.push_back({"dissect-verify",
                 {"q", "n", "d", "e", "arcs", "atoms", "measure", "total", "major", "minor", "brute", "identity_holds", "measure_is_one", "pass"},
                 true, [](Context& ctx) {
                     auto prob = problem_of(ctx.cfg);
                     auto rep = circle::dissect_verify(prob, ctx.workers, &ctx.budget);
                     const bool ok = rep.identity_holds && rep.measure_is_one;
                     Record r;
                     r.set("q", prob.q()).set("n", prob.n()).set("d", prob.d()).set("e", prob.e());
                     r.set("arcs", rep.arcs).set("atoms", rep.atoms).set("measure", rep.measure);
                     r.set("total", rep.total).set("major", rep.major).set("minor", rep.minor).set("brute", rep.brute);
                     r.set("identity_holds", rep.identity_holds).set("measure_is_one", rep.measure_is_one).set("pass", ok);
                     ctx.emit(r);
                     return ok;
                 }});

    t.push_back({"major-arc", {"q", "n", "d", "e", "mu_hat", "major", "expected", "pass"}, true, [](Context& ctx) {
                     auto prob = problem_of(ctx.cfg);
                     auto rep = circle::dissect_verify(prob, ctx.workers, &ctx.budget);
                     Record r;
                     r.set("q", prob.q()).set("n", prob.n()).set("d", prob.d()).set("e", prob.e()).set("mu_hat", prob.mu_hat());
                     r.set("major", rep.major).set("expected", qpow(prob.q(), prob.mu_hat())).set("pass", rep.major_is_q_mu_hat);
                     ctx.emit(r);
                     return rep.major_is_q_mu_hat;
                 }});

    t.push_back({"weyl-check", {"inequality", "atom", "alpha", "S", "power", "count", "rhs", "pass"}, true, [](Context& ctx) {
                     auto prob = problem_of(ctx.cfg);
                     const std::string kind = ctx.cfg.str("task.inequality", "weyl");
                     if (kind != "weyl" && kind != "M_v" && kind != "curly") throw ConfigError(ctx.cfg.where("task.inequality") + ": expected weyl, M_v or curly");
                     const int v = static_cast<int>(ctx.cfg.integer("task.v", 2));
                     if (kind == "M_v" && (v < 1 || v > prob.d() - 1)) throw ConfigError(ctx.cfg.where("task.v") + ": needs 1 <= v <= d-1");
                     ExpSumEngine eng(prob, &ctx.budget, ctx.workers);
                     const auto keys = alpha_keys(ctx, prob);
                     if (ctx.cfg.str("task.alpha", "sample") == "all") eng.fill_all(ctx.workers, &ctx.budget);
                     bool ok = true;
                     for (AtomKey k : keys) {
                         auto alpha = eng.alpha_of(k);
                         auto rep = kind == "weyl"  ? weyl::check_weyl(eng, alpha, ctx.workers, &ctx.budget)
                                    : kind == "M_v" ? weyl::check_M_v(eng, alpha, v, ctx.workers, &ctx.budget)
                                                    : weyl::check_curly_chain(eng, alpha, ctx.workers, &ctx.budget);
                         ok = ok && rep.pass;
                         Record r;
                         r.set("inequality", kind == "M_v" ? "M_v(" + std::to_string(v) + ")" : kind).set("atom", k).set("alpha", alpha.to_string(prob.field()));
                         r.set("S", rep.S).set("power", static_cast<std::uint32_t>(rep.power)).set("count", rep.count).set("rhs", rep.rhs).set("pass", rep.pass);
                         ctx.emit(r);
                     }
                     return ok;
                 }});

    t.push_back({"shrink-check", {"atom", "alpha", "eta", "k", "N", "N_eta", "rhs", "pass"}, true, [](Context& ctx) {
                     auto prob = problem_of(ctx.cfg);
                     std::vector<int> ks;
                     if (ctx.cfg.has("task.eta")) {
                         try {
                             ks.push_back(weyl::eta_to_k(prob, ctx.cfg.rational("task.eta")));
                         } catch (const DomainError& e) {
                             throw ConfigError(ctx.cfg.where("task.eta") + ": " + e.what());
                         }
                         if (!weyl::shrink_hypothesis(prob, ks[0])) throw ConfigError(ctx.cfg.where("task.eta") + ": (e+1)(eta+1)/2 is not an integer");
                     } else {
                         ks = weyl::admissible_k(prob);
                     }
                     ExpSumEngine eng(prob, &ctx.budget, 1);
                     const auto keys = alpha_keys(ctx, prob);
                     bool ok = true;
                     for (int k : ks)
                         for (AtomKey key : keys) {
                             auto alpha = eng.alpha_of(key);
                             auto rep = weyl::check_shrink(prob, alpha, k, ctx.workers, &ctx.budget);
                             ok = ok && rep.pass;
                             Record r;
                             Rational eta(k, prob.e() + 1);
                             eta.canonicalize();
                             r.set("atom", key).set("alpha", alpha.to_string(prob.field())).set("eta", eta).set("k", k);
                             r.set("N", rep.N).set("N_eta", rep.N_eta).set("rhs", rep.rhs).set("pass", rep.pass);
                             ctx.emit(r);
                         }
                     return ok;
                 }});

    t.push_back({"pointwise-measure",
                 {"q", "lemma", "deg_r", "ord_theta", "found", "a", "r", "theta", "branch", "Gamma", "k", "bound_exponent", "S", "abs_S", "ratio", "pass"},
                 true, [](Context& ctx) {
                     auto prob = problem_of(ctx.cfg);
                     const auto lemma = lemma_of(ctx.cfg);
                     const long deg_r = ctx.cfg.integer("task.deg_r", 1);
                     std::optional<long> ord;
                     if (ctx.cfg.has("task.ord_theta") && ctx.cfg.str("task.ord_theta", "") != "none") ord = ctx.cfg.integer("task.ord_theta");
                     ExpSumEngine eng(prob, &ctx.budget, ctx.workers);
                     eng.fill_all(ctx.workers, &ctx.budget);
                     std::optional<weyl::PointwiseReport> best;
                     try {
                         best = weyl::max_pointwise_ratio(eng, lemma, deg_r, ord);
                     } catch (const DomainError& e) {
                         throw ConfigError(ctx.cfg.where("task.ord_theta") + ": " + e.what());
                     }
                     Record r;
                     r.set("q", prob.q()).set("lemma", weyl::lemma_name(lemma)).set("deg_r", deg_r).set("ord_theta", ord ? std::to_string(*ord) : "none");
                     r.set("found", best.has_value());
                     if (best) {
                         r.set("a", poly::to_string(prob.field(), best->a)).set("r", poly::to_string(prob.field(), best->r)).set("theta", best->theta.to_string(prob.field()));
                         r.set("branch", best->branch).set("Gamma", best->Gamma).set("k", best->k).set("bound_exponent", best->bound_exponent);
                         r.set("S", best->S).set("abs_S", fixed_ratio(best->abs_S)).set("ratio", fixed_ratio(best->ratio));
                     }
                     const bool ok = best && std::isfinite(best->ratio);
                     r.set("pass", ok);
                     ctx.emit(r);
                     return ok;
                 }});

    t.push_back({"lattice-minima", {"instance", "m", "R", "duality", "symmetric", "oracle_R", "oracle_match", "counts_match", "pass"}, false,
                 [](Context& ctx) {
                     auto F = field_of(ctx.cfg);
                     const long N = ctx.cfg.integer("task.instances", 100), n = ctx.cfg.integer("task.n", 2);
                     const auto ms = ctx.cfg.integers("task.m", {1, 2});
                     if (N < 1 || n < 1 || ms.empty()) throw ConfigError(ctx.cfg.where("task.instances") + ": instances, n and m must be positive");
                     bool ok = true;
                     for (long i = 0; i < N; ++i) {
                         const auto gamma = latgon::random_gamma(ctx.rng, F, static_cast<std::size_t>(n));
                         for (const long mv : ms) {
                             const int m = static_cast<int>(mv);
                             SpecialLatticePair pair(F, gamma, m);
                             auto red = latgon::successive_minima(pair.M());
                             auto orc = latgon::minima_by_enumeration(pair.M());
                             bool counts = true;
                             for (long Z = -4; Z <= 4 && counts; ++Z)
                                 counts = latgon::count_lattice_points(pair.M(), Z) == ipow(F.q(), static_cast<unsigned>(latgon::predicted_count_exponent(red.profile, Z)));
                             const bool dual = pair.duality_holds(), sym = latgon::minima_symmetric(red.profile), match = red.profile.R == orc.R;
                             const bool pass = dual && sym && match && counts;
                             ok = ok && pass;
                             Record r;
                             r.set("instance", i).set("m", m).set("R", join(red.profile.R)).set("duality", dual).set("symmetric", sym);
                             r.set("oracle_R", join(orc.R)).set("oracle_match", match).set("counts_match", counts).set("pass", pass);
                             ctx.emit(r);
                         }
                     }
                     return ok;
                 }});

    t.push_back({"ratio-lemma", {"instance", "m", "Z1", "Z2", "strict", "M1", "M2", "formula_case", "formula_exponent", "formula_matches", "pass"}, false,
                 [](Context& ctx) {
                     auto F = field_of(ctx.cfg);
                     const long N = ctx.cfg.integer("task.instances", 100), n = ctx.cfg.integer("task.n", 2);
                     const auto ms = ctx.cfg.integers("task.m", {1, 2});
                     bool ok = true;
                     for (long i = 0; i < N; ++i) {
                         const auto gamma = latgon::random_gamma(ctx.rng, F, static_cast<std::size_t>(n));
                         for (const long mv : ms) {
                             const int m = static_cast<int>(mv);
                             SpecialLatticePair pair(F, gamma, m);
                             const long Z2 = -static_cast<long>(ctx.rng() % 4), Z1 = Z2 - static_cast<long>(ctx.rng() % 4);
                             for (bool strict : {false, true}) {
                                 auto rep = latgon::check_ratio_lemma(pair, Z1, Z2, strict);
                                 const bool pass = rep.pass && rep.formula_matches;
                                 ok = ok && pass;
                                 Record r;
                                 r.set("instance", i).set("m", m).set("Z1", Z1).set("Z2", Z2).set("strict", strict).set("M1", rep.M1).set("M2", rep.M2);
                                 r.set("formula_case", rep.formula_case).set("formula_exponent", rep.formula_exponent).set("formula_matches", rep.formula_matches).set("pass", pass);
                                 ctx.emit(r);
                             }
                         }
                     }
                     return ok;
                 }});

    t.push_back({"cape-lemma", {"instance", "a", "Z1", "Z2", "K", "N1", "N2", "sandwich", "pass"}, false, [](Context& ctx) {
                     auto F = field_of(ctx.cfg);
                     const long N = ctx.cfg.integer("task.instances", 100), n = ctx.cfg.integer("task.n", 2);
                     bool ok = true;
                     for (long i = 0; i < N; ++i) {
                         auto g = latgon::random_gamma(ctx.rng, F, static_cast<std::size_t>(n));
                         const Rational a(static_cast<long>(1 + ctx.rng() % 8), 2);
                         const Rational Z2(-static_cast<long>(ctx.rng() % 6), 2);
                         const Rational Z1 = Z2 - Rational(static_cast<long>(ctx.rng() % 6), 2);
                         Rational ac = a, z1 = Z1, z2 = Z2;
                         ac.canonicalize();
                         z1.canonicalize();
                         z2.canonicalize();
                         auto rep = latgon::check_cape(F, g, ac, z1, z2);
                         const bool sandwich = ac >= 1 ? latgon::check_sandwich(F, g, ac, z2).pass : true;
                         const bool pass = rep.pass && sandwich;
                         ok = ok && pass;
                         Record r;
                         r.set("instance", i).set("a", ac).set("Z1", z1).set("Z2", z2).set("K", rep.K).set("N1", rep.N1).set("N2", rep.N2);
                         r.set("sandwich", sandwich).set("pass", pass);
                         ctx.emit(r);
                     }
                     return ok;
                 }});

    t.push_back({"exponent-audit",
                 {"d", "n", "e", "alpha", "beta", "Gamma", "kappa", "k_eta", "delta", "k", "l", "iota", "case", "gamma_identity", "eta_identity",
                  "saving_A", "saving_B", "route", "saving", "positive"},
                 false, [](Context& ctx) {
                     const long d = ctx.cfg.integer("task.d", ctx.cfg.d ? std::optional<long>(ctx.cfg.d) : std::nullopt);
                     const long n = ctx.cfg.integer("task.n", ctx.cfg.n ? std::optional<long>(ctx.cfg.n) : std::nullopt);
                     if (d < 3) throw ConfigError(ctx.cfg.where("task.d") + ": audit needs d >= 3");
                     const auto es = ctx.cfg.integers("task.e", {ctx.cfg.e});
                     bool ok = true;
                     for (long e : es) {
                         if (e < 1) throw ConfigError(ctx.cfg.where("task.e") + ": must be >= 1");
                         auto rep = audit::audit_minor_arcs(static_cast<int>(d), n, static_cast<int>(e));
                         ok = ok && rep.pass;
                         for (const auto& x : rep.pairs) {
                             Record r;
                             r.set("d", x.in.d).set("n", x.in.n).set("e", x.in.e).set("alpha", x.in.alpha).set("beta", x.in.beta);
                             r.set("Gamma", x.Gamma).set("kappa", x.kappa).set("k_eta", audit::opt_str(x.k_eta)).set("delta", audit::opt_str(x.delta));
                             r.set("k", audit::opt_str(x.k)).set("l", audit::opt_str(x.l)).set("iota", audit::opt_str(x.iota)).set("case", x.case_taken);
                             r.set("gamma_identity", x.gamma_identity).set("eta_identity", x.eta_identity);
                             r.set("saving_A", audit::opt_str(x.saving_A)).set("saving_B", audit::opt_str(x.saving_B)).set("route", x.route);
                             r.set("saving", x.saving).set("positive", x.positive);
                             ctx.emit(r);
                         }
                         Record m;
                         m.set("d", d).set("n", n).set("e", e).set("route", "min-saving").set("saving", rep.min_saving).set("positive", rep.pass);
                         ctx.emit(m);
                     }
                     return ok;
                 }});

    t.push_back({"count-cone", {"q", "ell", "n", "d", "e", "cone", "brute_NP", "identity", "divisible", "pass"}, true, [](Context& ctx) {
                     auto prob = problem_of(ctx.cfg);
                     const int ell = static_cast<int>(ctx.cfg.integer("task.ell", 1));
                     if (ell < 1) throw ConfigError(ctx.cfg.where("task.ell") + ": must be >= 1");
                     auto G = moduli::form_over(prob.form(), ell);
                     const Integer cone = moduli::cone_counts(G, prob.e(), false, ctx.workers, &ctx.budget).nonzero;
                     const std::uint64_t qe = G.field().q();
                     const bool divisible = cone % (qe - 1) == 0;
                     Record r;
                     r.set("q", qe).set("ell", ell).set("n", prob.n()).set("d", prob.d()).set("e", prob.e()).set("cone", cone);
                     bool ok = divisible;
                     if (ctx.cfg.flag("task.brute", ell == 1)) {
                         CountingProblem lifted(G, prob.e());
                         const Integer np = circle::brute_count_NP(lifted, &ctx.budget, ctx.workers);
                         const bool id = cone + 1 == np;
                         ok = ok && id;
                         r.set("brute_NP", np).set("identity", id);
                     }
                     r.set("divisible", divisible).set("pass", ok);
                     ctx.emit(r);
                     return ok;
                 }});

    t.push_back({"count-morphisms", {"q", "ell", "n", "d", "e", "morphisms", "coprime_tuples", "lines", "lines_times_pgl2", "lines_match", "pass"}, true,
                 [](Context& ctx) {
                     auto prob = problem_of(ctx.cfg);
                     const int ell = static_cast<int>(ctx.cfg.integer("task.ell", 1));
                     if (ell < 1) throw ConfigError(ctx.cfg.where("task.ell") + ": must be >= 1");
                     auto G = moduli::form_over(prob.form(), ell);
                     auto c = moduli::cone_counts(G, prob.e(), true, ctx.workers, &ctx.budget);
                     const std::uint64_t qe = G.field().q();
                     Record r;
                     r.set("q", qe).set("ell", ell).set("n", prob.n()).set("d", prob.d()).set("e", prob.e());
                     r.set("morphisms", c.coprime_orbits).set("coprime_tuples", Integer(c.coprime_orbits * (qe - 1)));
                     bool ok = true;
                     if (prob.e() == 1) {
                         const auto lines = moduli::count_lines(G, &ctx.budget);
                         const Integer expect = Integer(std::to_string(lines)) * moduli::pgl2_order(qe);
                         ok = expect == c.coprime_orbits;
                         r.set("lines", lines).set("lines_times_pgl2", expect).set("lines_match", ok);
                     }
                     r.set("pass", ok);
                     ctx.emit(r);
                     return ok;
                 }});

    t.push_back({"langweil-report", {"ell", "q_ell", "raw_cone", "morphisms", "coprime_tuples", "mu", "mu_hat", "ratio_mu", "ratio_mu_hat", "pass"}, true,
                 [](Context& ctx) {
                     auto prob = problem_of(ctx.cfg);
                     const int lmax = static_cast<int>(ctx.cfg.integer("task.ell_max", 2));
                     if (lmax < 1) throw ConfigError(ctx.cfg.where("task.ell_max") + ": must be >= 1");
                     bool ok = true;
                     for (const auto& row : moduli::langweil_report(prob, lmax, ctx.workers, &ctx.budget)) {
                         const bool pass = row.ratio_mu > 0 && row.ratio_mu_hat > 0 && row.raw_cone >= row.coprime_tuples;
                         ok = ok && pass;
                         Record r;
                         r.set("ell", row.ell).set("q_ell", row.q_ell).set("raw_cone", row.raw_cone).set("morphisms", row.morphisms);
                         r.set("coprime_tuples", row.coprime_tuples).set("mu", row.mu).set("mu_hat", row.mu_hat);
                         r.set("ratio_mu", row.ratio_mu).set("ratio_mu_hat", row.ratio_mu_hat).set("pass", pass);
                         ctx.emit(r);
                     }
                     return ok;
                 }});
    return t;
}

inline const TaskSpec& find_task(const std::string& name) {
    static const std::vector<TaskSpec> table = task_table();
    for (const auto& t : table)
        if (t.name == name) return t;
    std::string known;
    for (const auto& t : table) known += (known.empty() ? "" : ", ") + t.name;
    throw ConfigError("unknown task '" + name + "' (known: " + known + ")");
}

struct RunResult {
    Status status = Status::Pass;
    std::vector<Record> records;
    std::vector<std::string> columns;
    std::string message;
    std::uint64_t budget_used = 0;
    bool complete = true;
};

/// Runs one task; config problems surface as ConfigInvalid, budget exhaustion
/// keeps the records emitted so far and marks the run incomplete.
inline RunResult run_task(const RunConfig& cfg) {
    RunResult res;
    try {
        const auto& spec = find_task(cfg.task);
        res.columns = spec.columns;
        Budget budget(cfg.budget);
        Context ctx{cfg, budget, cfg.workers, std::mt19937_64(cfg.seed), [&](Record r) {
                        r.task = spec.name;
                        res.records.push_back(std::move(r));
                    }};
        try {
            const bool ok = spec.run(ctx);
            res.status = ok ? Status::Pass : Status::Fail;
            res.message = ok ? "pass" : "assertion failure";
        } catch (const BudgetExceeded& e) {
            res.status = Status::BudgetExhausted;
            res.complete = false;
            res.message = e.what();
        }
        res.budget_used = std::min(budget.used(), budget.limit());
    } catch (const ConfigError& e) {
        res.status = Status::ConfigInvalid;
        res.message = e.what();
    }
    return res;
}

/// Writes <out>/<task>.<format>; an incomplete run also leaves <task>.incomplete.
inline std::string emit_report(const RunResult& res, const std::string& task, const std::string& out_dir, const std::string& format) {
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / (task + "." + format);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    if (format == "csv") {
        write_csv(os, res.columns, res.records);
    } else {
        write_jsonl(os, res.records);
    }
    if (!os) throw std::runtime_error("write failed for " + path.string());
    const auto marker = std::filesystem::path(out_dir) / (task + ".incomplete");
    if (!res.complete) {
        std::ofstream(marker) << res.message << '\n';
    } else {
        std::filesystem::remove(marker);
    }
    return path.string();
}

}  // namespace fflab::harness
