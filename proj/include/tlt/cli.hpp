#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "errors.hpp"
#include "io.hpp"
#include "reachability.hpp"
#include "steer_service.hpp"
#include "synth.hpp"
#include "tlt.hpp"
#include "verify.hpp"

namespace tlt::cli {

constexpr int kExitProved = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitDeadlock = 3;
constexpr int kExitError = 64;

struct RunConfig {
    std::string system_path;
    std::string formula_text;
    std::string formula_path;
    std::uint64_t seed = 0;
    std::size_t steps = 50;
    bool steps_given = false;
    std::string resolver = "random";
    std::vector<std::size_t> grid;
    std::vector<std::size_t> inputs;
    std::string out;
    bool progress_filter = false;
    std::string x0;
    // reach
    std::string op, from = "S", to, set;
    // tlt
    std::string flavor = "universal";
    // serve
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir, trace_dir;
};

inline Formula load_formula(const RunConfig& c) {
    if (!c.formula_text.empty() && !c.formula_path.empty()) throw Error("invalid-arguments", "give --formula or --formula-file, not both", "formula");
    if (!c.formula_path.empty()) {
        std::ifstream in(c.formula_path);
        if (!in) throw Error("io-error", "cannot open " + c.formula_path, "formula");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_ltl(ss.str());
    }
    if (c.formula_text.empty()) throw Error("invalid-arguments", "a formula is required", "formula");
    return parse_ltl(c.formula_text);
}

inline std::optional<GridSpec> grid_override(const RunConfig& c, const json& j) {
    if (c.grid.empty() && c.inputs.empty()) return std::nullopt;
    GridSpec g;
    if (is_linear_spec(j) && j.contains("grid")) {
        g.cells_per_axis = j.at("grid").at("cells").get<std::vector<std::size_t>>();
        g.input_samples_per_axis = j.at("grid").at("inputs").get<std::vector<std::size_t>>();
    }
    if (!c.grid.empty()) g.cells_per_axis = c.grid;
    if (!c.inputs.empty()) g.input_samples_per_axis = c.inputs;
    return g;
}

inline FiniteSystem load_system(const RunConfig& c) {
    if (c.system_path.empty()) throw Error("invalid-arguments", "--system is required", "system");
    json j = read_json_file(c.system_path);
    if (is_linear_spec(j)) return controlled_from_json(j, grid_override(c, j));
    return system_from_json(j);
}

inline const TransitionSystem& need_ts(const FiniteSystem& s, const std::string& what) {
    if (!std::holds_alternative<TransitionSystem>(s)) throw Error("invalid-arguments", what + " needs an autonomous system", "system");
    return std::get<TransitionSystem>(s);
}
inline const ControlledTransitionSystem& need_cts(const FiniteSystem& s, const std::string& what) {
    if (!std::holds_alternative<ControlledTransitionSystem>(s)) throw Error("invalid-arguments", what + " needs a controlled system", "system");
    return std::get<ControlledTransitionSystem>(s);
}

/// Evaluates a propositional set expression: atoms, S/all, empty, true, false, !, &, |.
inline StateSet eval_set_expr(const Labeled& sys, const std::string& text) {
    Formula f = parse_ltl(text);
    std::function<StateSet(const Formula&)> ev = [&](const Formula& g) -> StateSet {
        switch (g.kind()) {
            case Kind::True: return sys.all();
            case Kind::False: return sys.none();
            case Kind::Atom:
                if (sys.has_atom(g.name())) return sys.label_set(g.name());
                if (g.name() == "S" || g.name() == "all") return sys.all();
                if (g.name() == "empty") return sys.none();
                throw UnknownAtom(g.name());
            case Kind::Not: return ev(g.sub()).complement();
            case Kind::And: return ev(g.left()) & ev(g.right());
            case Kind::Or: return ev(g.left()) | ev(g.right());
            default: throw Error("invalid-set-expression", "temporal operators are not allowed in set expressions", "set");
        }
    };
    return ev(f);
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw Error("io-error", "cannot write " + path, "out");
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

inline int cmd_check(const RunConfig& c, std::ostream& out) {
    auto sys = load_system(c);
    auto& ts = need_ts(sys, "check");
    Formula phi = load_formula(c);
    for (auto& a : atoms_of(phi)) ts.atom_index(a);
    Verdict v = model_check(ts, phi);
    Output o(c.out, out);
    json j = verdict_to_json(v, ts);
    j["formula"] = to_string(phi);
    o.stream() << j.dump(2) << "\n";
    switch (v.kind) {
        case VerdictKind::Proved: return kExitProved;
        case VerdictKind::Refuted: return kExitRefuted;
        case VerdictKind::Unknown: return kExitUnknown;
    }
    return kExitUnknown;
}

inline int cmd_synth(const RunConfig& c, std::ostream& out) {
    auto sys = load_system(c);
    auto cts = std::make_shared<const ControlledTransitionSystem>(need_cts(sys, "synth"));
    Formula phi = load_formula(c);
    for (auto& a : atoms_of(phi)) cts->atom_index(a);

    StateId x0;
    if (!c.x0.empty()) {
        auto x = cts->find_state(c.x0);
        if (!x) throw Error("invalid-arguments", "unknown state '" + c.x0 + "'", "x0");
        x0 = *x;
    } else {
        if (cts->initial().empty()) throw Error("invalid-arguments", "system has no initial state; pass --x0", "x0");
        x0 = cts->initial().first();
    }

    Resolver resolver = Resolver::random();
    std::vector<std::optional<InputId>> scripted_inputs;
    std::size_t steps = c.steps;
    if (c.resolver == "adversarial") resolver = Resolver::adversarial();
    else if (c.resolver.rfind("scripted:", 0) == 0) {
        auto script = script_from_json(read_json_file(c.resolver.substr(9)));
        std::vector<StateId> next;
        for (auto& s : script) {
            auto y = cts->find_state(s.next);
            if (!y) throw Error("invalid-script", "unknown state '" + s.next + "'", "resolver");
            next.push_back(*y);
            if (s.input) {
                auto u = cts->find_input(*s.input);
                if (!u) throw Error("invalid-script", "unknown input '" + *s.input + "'", "resolver");
                scripted_inputs.push_back(*u);
            } else
                scripted_inputs.push_back(std::nullopt);
        }
        if (!c.steps_given) steps = next.size();
        resolver = Resolver::scripted(std::move(next));
    } else if (c.resolver != "random")
        throw Error("invalid-arguments", "resolver must be random, adversarial or scripted:<file>", "resolver");

    SynthesisSession s(cts, phi, x0, std::move(resolver), c.seed);
    s.set_progress(c.progress_filter);
    Output o(c.out, out);
    auto& os = o.stream();
    os << json({{"type", "header"},
                {"formula", to_string(phi)},
                {"x0", cts->state_name(x0)},
                {"seed", c.seed},
                {"resolver", c.resolver},
                {"tlt_nodes", s.tree().size()}})
              .dump()
       << "\n";
    for (std::size_t i = 0; i < steps && s.status() == SessionStatus::Active; ++i) {
        InputId u = s.auto_choice();
        if (i < scripted_inputs.size() && scripted_inputs[i]) u = *scripted_inputs[i];
        s.apply_input(u);
        json line = step_to_json(*cts, s.history().back());
        line["type"] = "step";
        os << line.dump() << "\n";
    }
    os << json({{"type", "end"}, {"status", to_string(s.status())}, {"k", s.k()}, {"state", cts->state_name(s.state())}}).dump() << "\n";
    return s.status() == SessionStatus::Deadlock ? kExitDeadlock : 0;
}

inline int cmd_reach(const RunConfig& c, std::ostream& out) {
    auto sys = load_system(c);
    const Labeled& lab = std::visit([](const auto& s) -> const Labeled& { return s; }, sys);
    ReachResult r;
    auto two = [&]() {
        if (c.to.empty()) throw Error("invalid-arguments", "--op " + c.op + " needs --to", "to");
        return std::make_pair(eval_set_expr(lab, c.from), eval_set_expr(lab, c.to));
    };
    auto one = [&]() {
        if (c.set.empty()) throw Error("invalid-arguments", "--op " + c.op + " needs --set", "set");
        return eval_set_expr(lab, c.set);
    };
    if (c.op == "min") {
        auto [a, b] = two();
        r = reach_min(need_ts(sys, "reach min"), a, b);
    } else if (c.op == "max") {
        auto [a, b] = two();
        r = reach_max(need_ts(sys, "reach max"), a, b);
    } else if (c.op == "ri") r = robust_invariant(need_ts(sys, "reach ri"), one());
    else if (c.op == "inv") r = invariant(need_ts(sys, "reach inv"), one());
    else if (c.op == "ctrl") {
        auto [a, b] = two();
        r = ctrl_reach(need_cts(sys, "reach ctrl"), a, b);
    } else if (c.op == "rcis") r = rcis(need_cts(sys, "reach rcis"), one());
    else throw Error("invalid-arguments", "--op must be min, max, ri, inv, ctrl or rcis", "op");

    std::map<int, std::size_t> hist;
    for (int l : r.layers)
        if (l >= 0) ++hist[l];
    json h = json::object();
    for (auto& [l, n] : hist) h[std::to_string(l)] = n;
    json j = set_to_json(lab, r.set);
    j["op"] = c.op;
    j["iterations"] = r.iterations;
    j["layers"] = h;
    Output o(c.out, out);
    o.stream() << j.dump(2) << "\n";
    return 0;
}

inline int cmd_tlt(const RunConfig& c, std::ostream& out) {
    auto sys = load_system(c);
    Formula phi = load_formula(c);
    Tlt t;
    const Labeled* lab = nullptr;
    if (c.flavor == "universal" || c.flavor == "existential") {
        auto& ts = need_ts(sys, "tlt --flavor " + c.flavor);
        for (auto& a : atoms_of(phi)) ts.atom_index(a);
        t = c.flavor == "universal" ? build_universal_tlt(ts, phi) : build_existential_tlt(ts, phi);
        lab = &ts;
    } else if (c.flavor == "controlled") {
        auto& cts = need_cts(sys, "tlt --flavor controlled");
        for (auto& a : atoms_of(phi)) cts.atom_index(a);
        t = build_controlled_tlt(cts, phi);
        lab = &cts;
    } else
        throw Error("invalid-arguments", "--flavor must be universal, existential or controlled", "flavor");
    json j = tlt_to_json(t, *lab);
    j["formula"] = to_string(phi);
    j["pnf"] = to_string(to_wu_pnf(phi));
    Output o(c.out, out);
    o.stream() << j.dump(2) << "\n";
    return 0;
}

inline int cmd_serve(const RunConfig& c, std::ostream& out) {
    SteerService svc;
    if (!c.static_dir.empty()) svc.set_static_dir(c.static_dir);
    if (!c.trace_dir.empty()) svc.set_trace_dir(c.trace_dir);
    out << "listening on http://" << c.host << ":" << c.port << std::endl;
    if (!svc.listen(c.host, c.port)) throw Error("io-error", "cannot listen on " + c.host + ":" + std::to_string(c.port), "port");
    return 0;
}

inline void print_error(std::ostream& err, const Error& e) {
    json j = error_body(e.code(), e.what(), e.field());
    if (auto* s = dynamic_cast<const SyntaxError*>(&e)) {
        j["offset"] = s->offset();
        j["expected"] = s->expected();
    }
    err << j.dump() << "\n";
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Temporal logic tree toolkit"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--system", c.system_path, "System JSON file")->required();
        sub->add_option("--out", c.out, "Output file (default stdout)");
        sub->add_option("--grid", c.grid, "Cells per state axis for linear systems")->delimiter(',');
        sub->add_option("--inputs", c.inputs, "Input samples per axis for linear systems")->delimiter(',');
    };
    auto formula = [&](CLI::App* sub) {
        auto* f = sub->add_option("--formula", c.formula_text, "LTL formula text");
        auto* p = sub->add_option("--formula-file", c.formula_path, "File holding the formula");
        f->excludes(p);
    };

    auto* check = app.add_subcommand("check", "Model check a transition system");
    common(check);
    formula(check);

    auto* synth = app.add_subcommand("synth", "Run online control synthesis and write a JSON-lines trace");
    common(synth);
    formula(synth);
    synth->add_option("--steps", c.steps, "Number of steps (default 50, or the script length)");
    synth->add_option("--seed", c.seed, "Resolver seed (default 0)");
    synth->add_option("--resolver", c.resolver, "random | adversarial | scripted:<file>");
    synth->add_option("--x0", c.x0, "Initial state name (default: first initial state)");
    synth->add_flag("--progress-filter", c.progress_filter, "Prefer inputs that descend reach layers");

    auto* reach = app.add_subcommand("reach", "Compute one reachability or invariance operator");
    common(reach);
    reach->add_option("--op", c.op, "min | max | ri | inv | ctrl | rcis")->required();
    reach->add_option("--from", c.from, "Set expression for the constraint set (default S)");
    reach->add_option("--to", c.to, "Set expression for the target set");
    reach->add_option("--set", c.set, "Set expression for invariance operators");

    auto* tree = app.add_subcommand("tlt", "Build and dump a temporal logic tree");
    common(tree);
    formula(tree);
    tree->add_option("--flavor", c.flavor, "universal | existential | controlled");

    auto* serve = app.add_subcommand("serve", "Start the session service");
    serve->add_option("--host", c.host, "Bind address");
    serve->add_option("--port", c.port, "Port");
    serve->add_option("--static", c.static_dir, "Directory of static UI assets");
    serve->add_option("--trace-dir", c.trace_dir, "Directory for per-session JSON-lines traces");

    std::vector<const char*> argv{"tlt-synth"};
    for (auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_body("invalid-arguments", e.what()).dump() << "\n";
        return kExitError;
    }
    c.steps_given = synth->count("--steps") > 0;

    try {
        if (*check) return cmd_check(c, out);
        if (*synth) return cmd_synth(c, out);
        if (*reach) return cmd_reach(c, out);
        if (*tree) return cmd_tlt(c, out);
        if (*serve) return cmd_serve(c, out);
    } catch (const Error& e) {
        print_error(err, e);
        return kExitError;
    } catch (const std::exception& e) {
        err << error_body("internal", e.what()).dump() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace tlt::cli
