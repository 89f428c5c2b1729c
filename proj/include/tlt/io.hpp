#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "abstraction.hpp"
#include "errors.hpp"
#include "synth.hpp"
#include "systems.hpp"
#include "tlt.hpp"
#include "verify.hpp"

namespace tlt {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io-error", "cannot open " + path, "system");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error("invalid-json", path + ": " + e.what(), "system");
    }
}

namespace detail {

inline std::vector<std::string> string_list(const json& j, const std::string& field) {
    if (!j.is_array()) throw InvalidSystem(field + " must be an array", field);
    std::vector<std::string> out;
    for (auto& e : j) {
        if (!e.is_string()) throw InvalidSystem(field + " entries must be strings", field);
        out.push_back(e.get<std::string>());
    }
    return out;
}

inline Box box_of(const json& j, const std::string& field) {
    try {
        Box b{j.at(0).get<std::vector<double>>(), j.at(1).get<std::vector<double>>()};
        return b;
    } catch (const json::exception&) {
        throw InvalidSystem(field + " must be [[lo...],[hi...]]", field);
    }
}

inline std::vector<std::vector<double>> matrix_of(const json& j, const std::string& field) {
    try {
        return j.get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
        throw InvalidSystem(field + " must be a row-major matrix", field);
    }
}

}  // namespace detail

/// A finite system file holds either an autonomous or a controlled transition system.
using FiniteSystem = std::variant<TransitionSystem, ControlledTransitionSystem>;

inline FiniteSystem system_from_json(const json& j) {
    try {
        std::vector<std::string> atoms = j.contains("atoms") ? detail::string_list(j.at("atoms"), "atoms") : std::vector<std::string>{};
        const json& states = j.at("states");
        std::size_t n = states.size();
        std::vector<std::string> names(n);
        std::vector<std::vector<std::size_t>> labels(n);
        std::vector<bool> seen(n, false);
        for (auto& s : states) {
            auto id = s.at("id").get<std::size_t>();
            if (id >= n || seen[id]) throw InvalidSystem("state ids must be dense and unique", "states");
            seen[id] = true;
            names[id] = s.contains("name") ? s.at("name").get<std::string>() : std::to_string(id);
            if (s.contains("labels"))
                for (auto& a : detail::string_list(s.at("labels"), "states.labels")) {
                    auto it = std::find(atoms.begin(), atoms.end(), a);
                    if (it == atoms.end()) {
                        if (j.contains("atoms")) throw InvalidSystem("label '" + a + "' is not in atoms", "states.labels");
                        atoms.push_back(a);
                        it = atoms.end() - 1;
                    }
                    labels[id].push_back(static_cast<std::size_t>(it - atoms.begin()));
                }
        }
        auto resolve_state = [&](const json& e) -> StateId {
            if (e.is_number_unsigned() || e.is_number_integer()) {
                auto v = e.get<long long>();
                if (v < 0 || static_cast<std::size_t>(v) >= n) throw InvalidSystem("state id out of range", "transitions");
                return static_cast<StateId>(v);
            }
            auto name = e.get<std::string>();
            for (std::size_t i = 0; i < n; ++i)
                if (names[i] == name) return i;
            throw InvalidSystem("unknown state '" + name + "'", "transitions");
        };
        StateSet init(n);
        if (j.contains("initial"))
            for (auto& e : j.at("initial")) init.insert(resolve_state(e));

        if (j.contains("inputs")) {
            auto inputs = detail::string_list(j.at("inputs"), "inputs");
            std::vector<std::vector<std::vector<StateId>>> succ(n, std::vector<std::vector<StateId>>(inputs.size()));
            for (auto& t : j.at("transitions")) {
                if (t.size() != 3) throw InvalidSystem("controlled transitions are [from, input, to]", "transitions");
                std::size_t u;
                if (t[1].is_string()) {
                    auto it = std::find(inputs.begin(), inputs.end(), t[1].get<std::string>());
                    if (it == inputs.end()) throw InvalidSystem("unknown input '" + t[1].get<std::string>() + "'", "transitions");
                    u = static_cast<std::size_t>(it - inputs.begin());
                } else {
                    u = t[1].get<std::size_t>();
                    if (u >= inputs.size()) throw InvalidSystem("input index out of range", "transitions");
                }
                succ[resolve_state(t[0])][u].push_back(resolve_state(t[2]));
            }
            return ControlledTransitionSystem(std::move(succ), std::move(inputs), std::move(init), std::move(atoms), std::move(labels),
                                              std::move(names));
        }
        std::vector<std::vector<StateId>> succ(n);
        for (auto& t : j.at("transitions")) {
            if (t.size() != 2) throw InvalidSystem("transitions are [from, to]", "transitions");
            succ[resolve_state(t[0])].push_back(resolve_state(t[1]));
        }
        return TransitionSystem(std::move(succ), std::move(init), std::move(atoms), std::move(labels), std::move(names));
    } catch (const json::exception& e) {
        throw InvalidSystem(std::string("malformed system: ") + e.what());
    }
}

inline bool is_linear_spec(const json& j) { return j.contains("A"); }

struct LinearFile {
    LinearSystemSpec spec;
    std::optional<GridSpec> grid;
};

inline LinearFile linear_from_json(const json& j) {
    LinearFile f;
    auto& s = f.spec;
    s.A = detail::matrix_of(j.at("A"), "A");
    s.B = detail::matrix_of(j.at("B"), "B");
    s.X = detail::box_of(j.at("X"), "X");
    s.U = detail::box_of(j.at("U"), "U");
    s.W = j.contains("W") ? detail::box_of(j.at("W"), "W") : Box{std::vector<double>(s.A.size(), 0.0), std::vector<double>(s.A.size(), 0.0)};
    if (j.contains("regions"))
        for (auto& r : j.at("regions")) {
            Region reg;
            reg.atom = r.at("atom").get<std::string>();
            reg.box = detail::box_of(r.at("box"), "regions.box");
            auto mode = r.value("mode", std::string("inner"));
            if (mode == "inner") reg.mode = LabelMode::Inner;
            else if (mode == "outer") reg.mode = LabelMode::Outer;
            else throw InvalidSystem("region mode must be inner or outer", "regions.mode");
            s.regions.push_back(std::move(reg));
        }
    if (j.contains("initial")) s.initial = detail::matrix_of(j.at("initial"), "initial");
    if (j.contains("grid")) {
        GridSpec g;
        g.cells_per_axis = j.at("grid").at("cells").get<std::vector<std::size_t>>();
        g.input_samples_per_axis = j.at("grid").at("inputs").get<std::vector<std::size_t>>();
        f.grid = g;
    }
    return f;
}

/// Controlled system from a finite CTS file or a linear spec; `grid` overrides the file's grid.
inline ControlledTransitionSystem controlled_from_json(const json& j, const std::optional<GridSpec>& grid = std::nullopt) {
    if (is_linear_spec(j)) {
        auto f = linear_from_json(j);
        auto g = grid ? grid : f.grid;
        if (!g) throw InvalidSystem("linear system needs a grid", "grid");
        return abstract_linear(f.spec, *g);
    }
    auto sys = system_from_json(j);
    if (!std::holds_alternative<ControlledTransitionSystem>(sys)) throw InvalidSystem("expected a controlled system (with inputs)", "inputs");
    return std::get<ControlledTransitionSystem>(std::move(sys));
}

inline json set_to_json(const Labeled& sys, const StateSet& s, std::size_t limit = std::numeric_limits<std::size_t>::max()) {
    json members = json::array();
    std::size_t c = 0;
    bool elided = false;
    s.for_each([&](std::size_t x) {
        if (c++ < limit) members.push_back(sys.state_name(x));
        else elided = true;
    });
    json j = {{"size", s.size()}, {"members", members}};
    if (elided) j["elided"] = true;
    return j;
}

inline json control_set_to_json(const ControlledTransitionSystem& cts, const ControlSet& cs) {
    json a = json::array();
    cs.for_each([&](std::size_t u) { a.push_back(cts.input_names()[u]); });
    return a;
}

inline json tlt_to_json(const Tlt& t, const Labeled& sys, std::size_t member_limit = 64) {
    json nodes = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        auto& n = t.node(i);
        json e = {{"id", i}, {"children", n.children}};
        if (n.parent) e["parent"] = *n.parent;
        if (n.is_set) {
            e["kind"] = "set";
            auto s = set_to_json(sys, n.set, member_limit);
            e["size"] = s["size"];
            e["members"] = s["members"];
            if (s.contains("elided")) e["elided"] = true;
            e["formula"] = to_string(n.provenance);
            e["rule"] = to_string(n.rule);
        } else {
            e["kind"] = "op";
            e["op"] = to_string(n.op);
        }
        nodes.push_back(std::move(e));
    }
    return {{"flavor", to_string(t.flavor())}, {"root", 0}, {"nodes", nodes}};
}

inline json verdict_to_json(const Verdict& v, const Labeled& sys) {
    json w = set_to_json(sys, v.witness);
    w["condition"] = v.via;
    json j = {{"verdict", to_string(v.kind)}, {"witness", w}, {"proved_by", v.proved_by}, {"refuted_by", v.refuted_by}};
    j["via"] = v.via.empty() ? json(nullptr) : json(v.via);
    return j;
}

inline json state_to_json(const ControlledTransitionSystem& cts, StateId x) {
    json j = {{"id", x}, {"name", cts.state_name(x)}, {"labels", cts.label_names(x)}};
    if (x < cts.cells().size()) {
        auto& b = cts.cells()[x];
        std::vector<double> c;
        for (std::size_t i = 0; i < b.lo.size(); ++i) c.push_back(0.5 * (b.lo[i] + b.hi[i]));
        j["cell"] = {{"lo", b.lo}, {"hi", b.hi}, {"center", c}};
    }
    return j;
}

inline json input_to_json(const ControlledTransitionSystem& cts, InputId u) {
    json j = {{"index", u}, {"label", cts.input_names()[u]}};
    if (u < cts.input_vectors().size()) j["vector"] = cts.input_vectors()[u];
    return j;
}

inline json step_to_json(const ControlledTransitionSystem& cts, const StepRecord& r) {
    json j = {{"k", r.k},
              {"state", cts.state_name(r.state)},
              {"feasible", control_set_to_json(cts, r.feasible)},
              {"chosen", cts.input_names()[r.chosen]},
              {"next", cts.state_name(r.next)}};
    if (r.state < cts.cells().size()) j["x"] = state_to_json(cts, r.state)["cell"]["center"];
    if (r.chosen < cts.input_vectors().size()) j["u"] = cts.input_vectors()[r.chosen];
    return j;
}

/// One scripted step: an optional input and the successor the environment produces.
struct ScriptStep {
    std::optional<std::string> input;
    std::string next;
};

inline std::vector<ScriptStep> script_from_json(const json& j) {
    if (!j.is_array()) throw Error("invalid-script", "script must be an array", "resolver");
    std::vector<ScriptStep> out;
    for (auto& e : j) {
        ScriptStep s;
        if (e.is_string()) s.next = e.get<std::string>();
        else {
            if (e.contains("input")) s.input = e.at("input").get<std::string>();
            s.next = e.at("next").get<std::string>();
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace tlt
