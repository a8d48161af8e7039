#include "zkt/cli.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "zkt/closed_set.hpp"
#include "zkt/config.hpp"
#include "zkt/described_set.hpp"
#include "zkt/descriptor.hpp"
#include "zkt/generators.hpp"
#include "zkt/oracle.hpp"
#include "zkt/parse.hpp"
#include "zkt/realize.hpp"

namespace zkt {
namespace {

using json = nlohmann::ordered_json;

struct CliFailure {
    int code = 2;
    std::string message;
};

// ---- config <-> json ----

json config_json(const Config& c) {
    return json{
        {"max_transversal", c.max_transversal},
        {"max_enumeration", c.max_enumeration},
        {"prefix_length", c.prefix_length},
        {"count_bound", c.count_bound},
        {"zero_divisor_window", c.zero_divisor_window},
        {"chars", c.chars},
        {"realize_prefix", c.realize_prefix},
        {"eps", c.eps},
        {"truncation_window", c.truncation_window},
        {"quasi_depth", c.quasi_depth},
        {"rational_den", c.rational_den},
        {"build_retries", c.build_retries},
        {"sample_points", c.sample_points},
        {"seed", c.seed},
    };
}

void config_from_json(const json& j, Config& c) {
    c.max_transversal = j.value("max_transversal", c.max_transversal);
    c.max_enumeration = j.value("max_enumeration", c.max_enumeration);
    c.prefix_length = j.value("prefix_length", c.prefix_length);
    c.count_bound = j.value("count_bound", c.count_bound);
    c.zero_divisor_window = j.value("zero_divisor_window", c.zero_divisor_window);
    c.chars = j.value("chars", c.chars);
    c.realize_prefix = j.value("realize_prefix", c.realize_prefix);
    c.eps = j.value("eps", c.eps);
    c.truncation_window = j.value("truncation_window", c.truncation_window);
    c.quasi_depth = j.value("quasi_depth", c.quasi_depth);
    c.rational_den = j.value("rational_den", c.rational_den);
    c.build_retries = j.value("build_retries", c.build_retries);
    c.sample_points = j.value("sample_points", c.sample_points);
    c.seed = j.value("seed", c.seed);
}

// ---- session ----

struct StoredSet {
    std::string group;  // canonical group expression
    std::string expr;   // canonical, self-contained set expression
};

struct Session {
    Config cfg;
    std::map<std::string, std::string> groups;
    std::map<std::string, StoredSet> sets;
    std::map<std::string, std::pair<std::string, Order>> generators;  // group expr, order
};

bool valid_name(const std::string& n) {
    static const std::set<std::string> reserved{"Z", "Q",    "Zp",  "G",  "round",
                                                "span", "w", "inf", "seq"};
    if (n.empty() || !std::isalpha(static_cast<unsigned char>(n[0]))) return false;
    for (char c : n)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    if (reserved.count(n)) return false;
    // e<digit>... is unit territory
    if (n[0] == 'e' && n.size() > 1 && std::isdigit(static_cast<unsigned char>(n[1]))) return false;
    return true;
}

json session_json(const Session& s) {
    json groups = json::object();
    for (auto& [name, text] : s.groups) groups[name] = text;
    json sets = json::object();
    for (auto& [name, st] : s.sets) sets[name] = json{{"group", st.group}, {"expr", st.expr}};
    json gens = json::object();
    for (auto& [name, gd] : s.generators)
        gens[name] = json{{"group", gd.first}, {"order", gd.second}};
    return json{
        {"schema", "zkt-session/1"},
        {"config", config_json(s.cfg)},
        {"groups", groups},
        {"sets", sets},
        {"generators", gens},
    };
}

Session session_from_json(const json& j) {
    Session s;
    if (j.contains("config")) config_from_json(j.at("config"), s.cfg);
    if (j.contains("groups"))
        for (auto& [name, text] : j.at("groups").items()) s.groups[name] = text.get<std::string>();
    if (j.contains("sets"))
        for (auto& [name, st] : j.at("sets").items())
            s.sets[name] = StoredSet{st.at("group").get<std::string>(),
                                     st.at("expr").get<std::string>()};
    if (j.contains("generators"))
        for (auto& [name, gd] : j.at("generators").items())
            s.generators[name] = {gd.at("group").get<std::string>(), gd.at("order").get<Order>()};
    return s;
}

Session load_session(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) return {};  // fresh session; created on first save
    try {
        json j = json::parse(in);
        return session_from_json(j);
    } catch (const std::exception& e) {
        throw CliFailure{2, "session file " + path + " is unreadable: " + e.what()};
    }
}

void save_session(const Session& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CliFailure{2, "cannot write session file " + path};
    out << session_json(s).dump(2) << "\n";
}

// ---- expression plumbing with exit-code mapping ----

template <class F>
auto guarded(std::string_view text, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw CliFailure{1, "parse error: " + annotate_error(text, e, e.pos)};
    } catch (const SemanticError& e) {
        throw CliFailure{2, "domain error: " + annotate_error(text, e, e.pos)};
    }
}

// Engine calls after parsing: reject bad values as domain errors.
template <class F>
auto engine(F&& f) {
    try {
        return f();
    } catch (const CliFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw CliFailure{2, std::string("domain error: ") + e.what()};
    }
}

Group resolve_group(const Session& s, const std::string& text) {
    auto it = s.groups.find(text);
    const std::string& src = it != s.groups.end() ? it->second : text;
    return make_group(guarded(src, [&] { return parse_group(src); }));
}

struct Materialized {
    std::map<std::string, DescribedSet> sets;
    std::map<std::string, RoundGenerator> gens;
};

Materialized materialize(const Session& s) {
    Materialized m;
    for (auto& [name, st] : s.sets) {
        Group g = resolve_group(s, st.group);
        m.sets.emplace(name, guarded(st.expr, [&] { return parse_set(st.expr, g, {}, s.cfg); }));
    }
    for (auto& [name, gd] : s.generators) {
        Group g = resolve_group(s, gd.first);
        m.gens.emplace(name, engine([&] { return make_round(g, gd.second); }));
    }
    return m;
}

DescribedSet resolve_set(const Session& s, const Materialized& m, const Group& g,
                         const std::string& text) {
    SetEnv env{&m.sets, &m.gens};
    return guarded(text, [&] { return parse_set(text, g, env, s.cfg); });
}

// ---- result serialization ----

void emit(std::ostream& out, const std::string& command, const Config& cfg, json result) {
    json j;
    j["schema"] = "zkt/1";
    j["command"] = command;
    j["config"] = config_json(cfg);
    j["result"] = std::move(result);
    out << j.dump(2) << "\n";
}

json dim_json(const DimValue& v) {
    return json{{"infinite", v.infinite},
                {"value", v.infinite ? json() : json(v.value)},
                {"str", v.str()}};
}

json elements_json(const std::vector<Element>& pts) {
    json arr = json::array();
    for (const Element& e : pts) arr.push_back(print_element(e));
    return arr;
}

json closure_json(const ClosureCertificate& cert, const Config& cfg) {
    json parts = json::array();
    for (const TorsionCoset& p : cert.closure.parts()) parts.push_back(print_coset(p));
    json pieces = json::array();
    for (const ClosurePiece& p : cert.pieces)
        pieces.push_back(json{{"part", print_coset(p.coset)}, {"witness_atom", p.witness_atom}});
    json idx = json::array();
    for (auto& [n, a] : cert.index_set)
        idx.push_back(json{{"order", n}, {"anchor", print_element(a)}});
    return json{
        {"closed", print_closed(cert.closure)},
        {"components", irreducible_components(cert.closure, cfg).size()},
        {"isolated", elements_json(cert.isolated)},
        {"parts", parts},
        {"pieces", pieces},
        {"index_set", idx},
    };
}

json round_cert_json(const RoundCertificate& c) {
    json j{
        {"certified", c.certified},
        {"structural", c.structural},
        {"order_tag", c.order_tag},
        {"prefix_checked", c.prefix_checked},
        {"count_bound", c.count_bound},
        {"max_count", c.max_count},
        {"divisors_checked", c.divisors_checked},
    };
    if (c.refutation) {
        json r{{"reason", c.refutation->reason}, {"divisor", c.refutation->divisor}};
        r["value"] = c.refutation->value ? json(print_element(*c.refutation->value)) : json();
        r["indices"] = c.refutation->indices;
        j["refutation"] = std::move(r);
    } else {
        j["refutation"] = nullptr;
    }
    return j;
}

json density_json(const DensityReport& r) {
    return json{
        {"pass", r.pass},
        {"grid_order", r.grid_order},
        {"cells", r.cells},
        {"hit", r.hit},
        {"covering", r.covering},
        {"prefix_used", r.prefix_used},
        {"worst_empty", r.worst_empty},
        {"note", r.note},
    };
}

json verdict_json(const RealizeVerdict& v) {
    json targets = json::array();
    for (const DensityReport& r : v.targets) targets.push_back(density_json(r));
    return json{
        {"pass", v.pass}, {"sound", v.sound},     {"tight", v.tight},
        {"retries", v.retries}, {"targets", targets}, {"note", v.note},
    };
}

json oracle_json(const OracleReport& r) {
    return json{
        {"suite", r.suite},       {"cases", r.cases},
        {"checks", r.checks},     {"mismatches", r.mismatches},
        {"seconds", r.seconds},   {"failures", r.failures},
    };
}

std::string kind_str(RoundKind k) {
    switch (k) {
        case RoundKind::CanonicalBasis: return "basis";
        case RoundKind::GreedyEscape: return "tower";
        case RoundKind::UserSequence: return "user";
    }
    return "?";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Markov-Zariski topology of countable abelian groups"};
    app.require_subcommand(1);

    std::string session_path;
    app.add_option("--session", session_path, "JSON file holding named groups, sets and config");
    std::optional<std::uint64_t> seed_flag;
    app.add_option("--seed", seed_flag, "seed for seeded commands (overrides ZK_SEED)");

    // expression echo
    auto* print_cmd = app.add_subcommand("print", "reprint an expression in canonical form");
    print_cmd->require_subcommand(1);
    std::string pr_expr, pr_group;
    auto* prg = print_cmd->add_subcommand("group", "canonicalize a group expression");
    prg->add_option("expr", pr_expr, "group expression")->required();
    auto* prs = print_cmd->add_subcommand("set", "canonicalize a set expression");
    prs->add_option("group", pr_group, "ambient group")->required();
    prs->add_option("expr", pr_expr, "set expression")->required();
    auto* pre = print_cmd->add_subcommand("elem", "canonicalize an element expression");
    pre->add_option("group", pr_group, "ambient group")->required();
    pre->add_option("expr", pr_expr, "element expression")->required();

    std::string g_text, x_text;
    std::uint64_t n_arg = 0;

    auto* eo_cmd = app.add_subcommand("eo", "essential order of a group");
    eo_cmd->add_option("group", g_text)->required();

    auto* exp_cmd = app.add_subcommand("exponent", "exponent of a group (0 = unbounded)");
    exp_cmd->add_option("group", g_text)->required();

    auto* tor_cmd = app.add_subcommand("torsion", "the subgroup G[n]");
    tor_cmd->add_option("group", g_text)->required();
    tor_cmd->add_option("n", n_arg, "torsion order")->required();

    auto* clo_cmd = app.add_subcommand("closure", "closure of a described set");
    clo_cmd->add_option("group", g_text)->required();
    clo_cmd->add_option("set", x_text)->required();

    auto* com_cmd = app.add_subcommand("components", "traces of a set on its closure components");
    com_cmd->add_option("group", g_text)->required();
    com_cmd->add_option("set", x_text)->required();

    auto* con_cmd = app.add_subcommand("connected", "connectedness of the closure");
    con_cmd->add_option("group", g_text)->required();
    con_cmd->add_option("set", x_text)->required();

    auto* dim_cmd = app.add_subcommand("dim", "dimension of the group or of a set");
    dim_cmd->add_option("group", g_text)->required();
    std::string dim_set;
    dim_cmd->add_option("set", dim_set, "optional set (defaults to the whole group)");

    auto* mval_cmd = app.add_subcommand("mval", "least order with an infinite coset trace");
    mval_cmd->add_option("group", g_text)->required();
    mval_cmd->add_option("set", x_text)->required();

    auto* den_cmd = app.add_subcommand("dense", "Zariski density of a described set");
    den_cmd->add_option("group", g_text)->required();
    den_cmd->add_option("set", x_text)->required();

    auto* pot_cmd = app.add_subcommand("potdense", "potential density under Hausdorff topologies");
    pot_cmd->add_option("group", g_text)->required();
    pot_cmd->add_option("set", x_text)->required();

    auto* cur_cmd = app.add_subcommand("curve", "is the set a translated round set of its order");
    cur_cmd->add_option("group", g_text)->required();
    cur_cmd->add_option("set", x_text)->required();

    auto* irr_cmd = app.add_subcommand("irreducible", "irreducibility of a set or of G[n]");
    irr_cmd->add_option("group", g_text)->required();
    std::string irr_set;
    irr_cmd->add_option("set", irr_set, "described set");
    std::optional<std::uint64_t> irr_order;
    irr_cmd->add_option("--order", irr_order, "check the level G[n] instead of a set");

    auto* round_cmd = app.add_subcommand("round", "build or certify round sequences");
    round_cmd->require_subcommand(1);
    auto* rmk = round_cmd->add_subcommand("make", "standard n-round sequence of G[n]");
    std::string rname;
    rmk->add_option("group", g_text)->required();
    rmk->add_option("n", n_arg, "round order")->required();
    rmk->add_option("--name", rname, "store under this name in the session");
    auto* rck = round_cmd->add_subcommand("check", "collision counts over a prefix");
    std::string rck_name;
    std::optional<std::uint64_t> rck_n;
    std::uint64_t rck_prefix = 0;
    rck->add_option("group", g_text, "group (with n) unless --name is given");
    rck->add_option("n", rck_n, "round order");
    rck->add_option("--name", rck_name, "check a sequence stored in the session");
    rck->add_option("--prefix", rck_prefix, "prefix length (default: config)");

    auto* trim_cmd = app.add_subcommand("trim", "split a round prefix into difference-disjoint halves");
    trim_cmd->add_option("group", g_text)->required();
    trim_cmd->add_option("n", n_arg, "round order")->required();
    std::uint64_t trim_prefix = 0;
    trim_cmd->add_option("--prefix", trim_prefix, "prefix length (default: config)");

    auto* rea_cmd = app.add_subcommand("realize", "character realization of a closure");
    rea_cmd->add_option("group", g_text)->required();
    rea_cmd->add_option("set", x_text)->required();
    std::optional<std::uint32_t> rea_chars;
    std::optional<std::uint64_t> rea_prefix;
    std::optional<double> rea_eps;
    std::optional<std::uint64_t> rea_seed;
    std::string rea_csv;
    rea_cmd->add_option("--chars", rea_chars, "number of characters K");
    rea_cmd->add_option("--prefix", rea_prefix, "sample prefix length L");
    rea_cmd->add_option("--eps", rea_eps, "density resolution");
    rea_cmd->add_option("--seed", rea_seed, "realization seed");
    rea_cmd->add_option("--csv", rea_csv, "dump sampled character images to this file");

    auto* ora_cmd = app.add_subcommand("oracle", "ground-truth verification suites");
    ora_cmd->require_subcommand(1);
    auto* orun = ora_cmd->add_subcommand("run", "run one suite or all of them");
    std::string suite = "all";
    std::uint64_t ora_cap = 64;
    std::optional<std::uint64_t> ora_cases;
    std::uint64_t ora_copies = 2;
    std::optional<std::uint64_t> ora_seed;
    orun->add_option("--suite", suite, "coset|decomp|round|chain|laws|all")
        ->check(CLI::IsMember({"coset", "decomp", "round", "chain", "laws", "all"}));
    orun->add_option("--cap", ora_cap, "max group order for the coset suite");
    orun->add_option("--cases", ora_cases, "random cases for decomp/laws suites");
    orun->add_option("--copies", ora_copies, "truncation copies per omega class");
    orun->add_option("--seed", ora_seed, "oracle seed");

    auto* def_cmd = app.add_subcommand("define", "name a group or a set in the session");
    def_cmd->require_subcommand(1);
    std::string def_name;
    auto* dgrp = def_cmd->add_subcommand("group", "bind a name to a group");
    dgrp->add_option("name", def_name)->required();
    dgrp->add_option("expr", g_text, "group expression")->required();
    auto* dset = def_cmd->add_subcommand("set", "bind a name to a set");
    dset->add_option("name", def_name)->required();
    dset->add_option("group", g_text, "ambient group")->required();
    dset->add_option("expr", x_text, "set expression")->required();

    auto* ses_cmd = app.add_subcommand("session", "session maintenance");
    ses_cmd->require_subcommand(1);
    auto* sshow = ses_cmd->add_subcommand("show", "dump the session file");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        Session session = load_session(session_path);

        // seed precedence: session config < ZK_SEED < --seed
        if (const char* env = std::getenv("ZK_SEED")) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (end == env || *end != '\0') throw CliFailure{2, "ZK_SEED is not an integer"};
            session.cfg.seed = v;
        }
        if (seed_flag) session.cfg.seed = *seed_flag;
        Config cfg = session.cfg;

        auto group_of = [&] { return resolve_group(session, g_text); };
        auto set_of = [&](const Group& g, const std::string& text) {
            Materialized m = materialize(session);
            return resolve_set(session, m, g, text);
        };

        if (app.got_subcommand(print_cmd)) {
            if (print_cmd->got_subcommand(prg)) {
                GroupDescriptor d = guarded(pr_expr, [&] { return parse_group(pr_expr); });
                emit(out, "print", cfg, json{{"canonical", print_group(d)}});
            } else if (print_cmd->got_subcommand(prs)) {
                Group g = resolve_group(session, pr_group);
                Materialized m = materialize(session);
                DescribedSet x = resolve_set(session, m, g, pr_expr);
                emit(out, "print", cfg,
                     json{{"group", print_group(*g)}, {"canonical", print_set(x)}});
            } else {
                Group g = resolve_group(session, pr_group);
                Element e = guarded(pr_expr, [&] { return parse_element(pr_expr, g); });
                emit(out, "print", cfg,
                     json{{"group", print_group(*g)}, {"canonical", print_element(e)}});
            }
            return 0;
        }

        if (app.got_subcommand(eo_cmd)) {
            Group g = group_of();
            emit(out, "eo", cfg,
                 json{{"group", print_group(*g)}, {"eo", g->essential_order()}});
            return 0;
        }

        if (app.got_subcommand(exp_cmd)) {
            Group g = group_of();
            emit(out, "exponent", cfg,
                 json{{"group", print_group(*g)}, {"exponent", g->exponent()}});
            return 0;
        }

        if (app.got_subcommand(tor_cmd)) {
            Group g = group_of();
            GroupDescriptor sub = engine([&] { return g->torsion_subgroup(n_arg); });
            emit(out, "torsion", cfg,
                 json{{"group", print_group(*g)},
                      {"n", n_arg},
                      {"order", g->canonical_torsion_order(n_arg)},
                      {"subgroup", print_group(sub)}});
            return 0;
        }

        if (app.got_subcommand(clo_cmd)) {
            Group g = group_of();
            DescribedSet x = set_of(g, x_text);
            ClosureCertificate cert = engine([&] { return closure_with_certificate(x, cfg); });
            emit(out, "closure", cfg, closure_json(cert, cfg));
            return 0;
        }

        if (app.got_subcommand(com_cmd)) {
            Group g = group_of();
            DescribedSet x = set_of(g, x_text);
            auto comps = engine([&] { return components_of_set(x, cfg); });
            json arr = json::array();
            for (const SetComponent& c : comps)
                arr.push_back(json{{"part", print_coset(c.closure_part)},
                                   {"trace", print_set(c.trace)}});
            emit(out, "components", cfg,
                 json{{"count", comps.size()},
                      {"irreducible", comps.size() == 1},
                      {"components", arr}});
            return 0;
        }

        if (app.got_subcommand(con_cmd)) {
            Group g = group_of();
            DescribedSet x = set_of(g, x_text);
            AlgebraicSet cl = engine([&] { return closure(x, cfg); });
            auto pieces = engine([&] { return connected_components(cl, cfg); });
            json arr = json::array();
            for (const AlgebraicSet& p : pieces) arr.push_back(print_closed(p));
            emit(out, "connected", cfg,
                 json{{"connected", pieces.size() <= 1},
                      {"pieces", pieces.size()},
                      {"closed", print_closed(cl)},
                      {"piece_sets", arr}});
            return 0;
        }

        if (app.got_subcommand(dim_cmd)) {
            Group g = group_of();
            DimValue v;
            if (dim_set.empty()) {
                v = engine([&] { return dim(AlgebraicSet::whole_group(g)); });
            } else {
                DescribedSet x = set_of(g, dim_set);
                v = engine([&] { return dim_of_set(x, cfg); });
            }
            emit(out, "dim", cfg,
                 json{{"group", print_group(*g)},
                      {"set", dim_set.empty() ? json() : json(dim_set)},
                      {"dim", dim_json(v)}});
            return 0;
        }

        if (app.got_subcommand(mval_cmd)) {
            Group g = group_of();
            DescribedSet x = set_of(g, x_text);
            Order m = engine([&] { return least_infinite_trace(x); });
            auto classes = engine([&] { return infinite_trace_classes(x); });
            emit(out, "mval", cfg, json{{"m", m}, {"classes", classes}});
            return 0;
        }

        if (app.got_subcommand(den_cmd)) {
            Group g = group_of();
            DescribedSet x = set_of(g, x_text);
            const bool dense = engine([&] { return is_dense(x, cfg); });
            json by_multiples;  // null on bounded groups, where the route does not apply
            if (g->exponent() == 0)
                by_multiples = engine([&] { return dense_by_multiples(x); });
            emit(out, "dense", cfg,
                 json{{"dense", dense}, {"multiples_criterion", by_multiples}});
            return 0;
        }

        if (app.got_subcommand(pot_cmd)) {
            Group g = group_of();
            DescribedSet x = set_of(g, x_text);
            PotentialDensityVerdict v = engine([&] { return is_potentially_dense(x, cfg); });
            emit(out, "potdense", cfg,
                 json{{"zariski_dense", v.zariski_dense},
                      {"potentially_dense", v.potentially_dense},
                      {"note", v.note}});
            return 0;
        }

        if (app.got_subcommand(cur_cmd)) {
            Group g = group_of();
            DescribedSet x = set_of(g, x_text);
            CurveVerdict v = engine([&] { return is_curve(x, cfg); });
            emit(out, "curve", cfg,
                 json{{"curve", v.curve},
                      {"round_order", v.round_order},
                      {"base", v.base ? json(print_element(*v.base)) : json()},
                      {"reason", v.reason}});
            return 0;
        }

        if (app.got_subcommand(irr_cmd)) {
            Group g = group_of();
            if (irr_order && !irr_set.empty())
                throw CliFailure{1, "give a set or --order, not both"};
            if (irr_order) {
                const Order canon = g->canonical_torsion_order(*irr_order);
                auto cert = engine([&] { return g->torsion_irreducibility(canon); });
                json leading = json::array();
                for (const auto& r : cert.leading)
                    leading.push_back(json{{"p", r.p},
                                           {"s", r.s},
                                           {"multiplicity", r.multiplicity.str()},
                                           {"infinite_ok", r.infinite_ok}});
                emit(out, "irreducible", cfg,
                     json{{"requested", *irr_order},
                          {"order", canon},
                          {"irreducible", cert.irreducible},
                          {"leading", leading},
                          {"unbounded_witness", cert.unbounded_witness}});
                return 0;
            }
            if (irr_set.empty()) throw CliFailure{1, "give a set or --order"};
            DescribedSet x = set_of(g, irr_set);
            const bool irr = engine([&] { return is_irreducible_set(x, cfg); });
            emit(out, "irreducible", cfg, json{{"irreducible", irr}});
            return 0;
        }

        if (app.got_subcommand(round_cmd)) {
            if (round_cmd->got_subcommand(rmk)) {
                Group g = group_of();
                RoundGenerator gen = engine([&] { return make_round(g, n_arg); });
                const std::size_t peek = 8;
                json sample = elements_json(gen.prefix(peek));
                RoundCertificate cert = engine([&] {
                    return certify_round(gen, std::min<std::uint64_t>(cfg.prefix_length, 256), cfg);
                });
                json result{{"group", print_group(*g)},
                            {"order_tag", gen.order_tag()},
                            {"kind", kind_str(gen.kind())},
                            {"sample", sample},
                            {"certificate", round_cert_json(cert)}};
                if (!rname.empty()) {
                    if (!valid_name(rname)) throw CliFailure{2, "invalid name " + rname};
                    session.generators[rname] = {print_group(*g), n_arg};
                    if (!session_path.empty()) save_session(session, session_path);
                    else err << "note: no --session file, definition not persisted\n";
                    result["defined"] = rname;
                }
                emit(out, "round make", cfg, result);
                return 0;
            }
            // round check
            RoundGenerator gen = [&] {
                if (!rck_name.empty()) {
                    auto it = session.generators.find(rck_name);
                    if (it == session.generators.end())
                        throw CliFailure{2, "unknown sequence " + rck_name};
                    Group g = resolve_group(session, it->second.first);
                    return engine([&] { return make_round(g, it->second.second); });
                }
                if (g_text.empty() || !rck_n)
                    throw CliFailure{1, "round check needs <group> <n> or --name"};
                Group g = resolve_group(session, g_text);
                return engine([&] { return make_round(g, *rck_n); });
            }();
            const std::uint64_t L = rck_prefix ? rck_prefix : cfg.prefix_length;
            RoundCertificate cert = engine([&] { return certify_round(gen, L, cfg); });
            emit(out, "round check", cfg, round_cert_json(cert));
            return cert.certified ? 0 : 3;
        }

        if (app.got_subcommand(trim_cmd)) {
            Group g = group_of();
            RoundGenerator gen = engine([&] { return make_round(g, n_arg); });
            const std::uint64_t L = trim_prefix ? trim_prefix : cfg.prefix_length;
            SplitResult split = engine([&] { return split_trim(gen, L, cfg); });
            const std::size_t peek = 6;
            emit(out, "trim", cfg,
                 json{{"consumed", split.consumed},
                      {"skipped", split.skipped},
                      {"max_cross_count", split.max_cross_count},
                      {"first", elements_json(split.first.prefix(peek))},
                      {"second", elements_json(split.second.prefix(peek))}});
            return 0;
        }

        if (app.got_subcommand(rea_cmd)) {
            if (rea_chars) cfg.chars = *rea_chars;
            if (rea_prefix) cfg.realize_prefix = *rea_prefix;
            if (rea_eps) cfg.eps = *rea_eps;
            if (rea_seed) cfg.seed = *rea_seed;
            Group g = group_of();
            DescribedSet x = set_of(g, x_text);
            err << "[realize] K=" << cfg.chars << " L=" << cfg.realize_prefix
                << " eps=" << cfg.eps << " seed=" << cfg.seed << "\n";
            RealizeVerdict v = engine([&] { return realize_closure(x, cfg); });
            json result = verdict_json(v);
            if (!rea_csv.empty()) {
                std::vector<RoundAtom> targets;
                for (const SetAtom& a : x.atoms())
                    if (const auto* r = std::get_if<RoundAtom>(&a)) targets.push_back(*r);
                CharacterBuild build = engine(
                    [&] { return build_characters(g, targets, cfg.chars, cfg); });
                std::ofstream csv(rea_csv);
                if (!csv) throw CliFailure{2, "cannot write " + rea_csv};
                csv << image_csv(build.chi, x.sample(cfg.realize_prefix, cfg));
                result["csv"] = rea_csv;
                result["csv_seed"] = build.chi.seed();
            }
            emit(out, "realize", cfg, result);
            return v.pass ? 0 : 3;
        }

        if (app.got_subcommand(ora_cmd)) {
            if (ora_seed) cfg.seed = *ora_seed;
            std::vector<OracleReport> reports;
            auto want = [&](const char* s) { return suite == s || suite == "all"; };
            if (want("coset")) {
                err << "[oracle] coset-lemmas, order cap " << ora_cap << "\n";
                reports.push_back(check_coset_lemmas(ora_cap, cfg));
            }
            if (want("decomp")) {
                err << "[oracle] decomposition\n";
                reports.push_back(check_decomposition(ora_cases.value_or(80), ora_copies, cfg));
            }
            if (want("round")) {
                err << "[oracle] round-prefixes\n";
                reports.push_back(check_round_prefixes(cfg));
            }
            if (want("chain")) {
                err << "[oracle] dim-chains\n";
                reports.push_back(check_dim_chains(cfg));
            }
            if (want("laws")) {
                err << "[oracle] closure-laws\n";
                reports.push_back(check_closure_laws(ora_cases.value_or(100), cfg));
            }
            json arr = json::array();
            bool ok = true;
            for (const OracleReport& r : reports) {
                arr.push_back(oracle_json(r));
                ok = ok && r.ok();
            }
            emit(out, "oracle run", cfg, json{{"ok", ok}, {"reports", arr}});
            return ok ? 0 : 3;
        }

        if (app.got_subcommand(def_cmd)) {
            if (!valid_name(def_name)) throw CliFailure{2, "invalid name " + def_name};
            json result;
            if (def_cmd->got_subcommand(dgrp)) {
                GroupDescriptor d = guarded(g_text, [&] { return parse_group(g_text); });
                session.groups[def_name] = print_group(d);
                result = json{{"defined", def_name}, {"canonical", print_group(d)}};
            } else {
                Group g = group_of();
                Materialized m = materialize(session);
                DescribedSet x = resolve_set(session, m, g, x_text);
                session.sets[def_name] = StoredSet{print_group(*g), print_set(x)};
                result = json{{"defined", def_name},
                              {"group", print_group(*g)},
                              {"canonical", print_set(x)}};
            }
            if (!session_path.empty()) save_session(session, session_path);
            else err << "note: no --session file, definition not persisted\n";
            emit(out, "define", cfg, result);
            return 0;
        }

        if (app.got_subcommand(ses_cmd) && ses_cmd->got_subcommand(sshow)) {
            out << session_json(session).dump(2) << "\n";
            return 0;
        }

        throw CliFailure{1, "no command"};
    } catch (const CliFailure& f) {
        err << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        err << "domain error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace zkt
