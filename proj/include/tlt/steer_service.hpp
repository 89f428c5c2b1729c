#pragma once

#include <atomic>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>

#include "errors.hpp"
#include "io.hpp"
#include "ltl.hpp"
#include "synth.hpp"

namespace tlt {

struct HttpResult {
    int status = 200;
    json body;
    std::string text;  // used instead of body when content_type is not JSON
    std::string content_type = "application/json";
};

inline json error_body(const std::string& code, const std::string& message, const std::string& field = {}) {
    json j = {{"code", code}, {"message", message}};
    if (!field.empty()) j["field"] = field;
    return j;
}

inline int status_for(const std::string& code) {
    if (code == "unknown-session" || code == "not-found") return 404;
    if (code == "session-not-active" || code == "session-busy" || code == "infeasible-initial-state") return 409;
    if (code == "input-not-feasible" || code == "prefix-inconsistent") return 422;
    return 400;
}

/// In-memory sessions of the online synthesis loop behind an HTTP+JSON API.
class SteerService {
public:
    SteerService() = default;

    /// Directory that receives one JSON-lines trace per session.
    void set_trace_dir(std::string dir) { trace_dir_ = std::move(dir); }
    /// Directory of static assets served at "/".
    void set_static_dir(std::string dir) { static_dir_ = std::move(dir); }

    HttpResult handle(const std::string& method, const std::string& path, const std::string& body) {
        try {
            std::vector<std::string> seg;
            for (std::size_t i = 0; i < path.size();) {
                auto j = path.find('/', i);
                if (j == std::string::npos) j = path.size();
                if (j > i) seg.push_back(path.substr(i, j - i));
                i = j + 1;
            }
            auto payload = [&]() {
                if (body.empty()) return json::object();
                try {
                    return json::parse(body);
                } catch (const json::parse_error& e) {
                    throw Error("invalid-json", e.what(), "body");
                }
            };
            if (method == "POST" && seg == std::vector<std::string>{"parse"}) return parse(payload());
            if (seg.empty() || seg[0] != "sessions" || seg.size() > 3) return fail("not-found", "no route for " + path);
            if (seg.size() == 1) {
                if (method == "POST") return create(payload());
                return fail("not-found", "no route for " + method + " " + path);
            }
            const std::string& id = seg[1];
            if (seg.size() == 2 && method == "GET") return view(id);
            if (seg.size() == 3) {
                const std::string& verb = seg[2];
                if (method == "POST" && verb == "step") return step(id, payload());
                if (method == "POST" && verb == "fork") return fork(id);
                if (method == "POST" && verb == "spec") return spec(id, payload());
                if (method == "GET" && verb == "tlt") return tree(id);
                if (method == "GET" && verb == "trace") return trace(id);
            }
            return fail("not-found", "no route for " + method + " " + path);
        } catch (const SyntaxError& e) {
            HttpResult r{400, error_body(e.code(), e.what(), "formula")};
            r.body["offset"] = e.offset();
            r.body["expected"] = e.expected();
            return r;
        } catch (const Error& e) {
            return {status_for(e.code()), error_body(e.code(), e.what(), e.field())};
        } catch (const json::exception& e) {
            return {400, error_body("invalid-request", e.what())};
        } catch (const std::exception& e) {
            return {500, error_body("internal", e.what())};
        }
    }

    HttpResult create(const json& req) {
        if (!req.contains("formula") || !req.at("formula").is_string()) throw Error("invalid-request", "formula is required", "formula");
        json sys;
        if (req.contains("system")) sys = req.at("system");
        else if (req.contains("system_path")) sys = read_json_file(req.at("system_path").get<std::string>());
        else throw Error("invalid-request", "system or system_path is required", "system");
        std::optional<GridSpec> grid;
        if (req.contains("grid")) {
            GridSpec g;
            g.cells_per_axis = req.at("grid").at("cells").get<std::vector<std::size_t>>();
            g.input_samples_per_axis = req.at("grid").at("inputs").get<std::vector<std::size_t>>();
            grid = g;
        }
        auto cts = std::make_shared<const ControlledTransitionSystem>(controlled_from_json(sys, grid));
        Formula phi = parse_ltl(req.at("formula").get<std::string>());
        for (auto& a : atoms_of(phi)) cts->atom_index(a);
        StateId x0 = resolve_state(*cts, req.contains("x0") ? req.at("x0") : json(nullptr), "x0");
        Resolver resolver = resolver_from(*cts, req.value("resolver", json("random")));
        std::uint64_t seed = req.value("seed", std::uint64_t{0});

        auto entry = std::make_shared<Entry>(SynthesisSession(cts, phi, x0, std::move(resolver), seed));
        entry->session.set_progress(req.value("progress_filter", false));
        if (entry->session.status() == SessionStatus::Deadlock)
            throw Error("infeasible-initial-state", "initial state " + cts->state_name(x0) + " is outside the root set", "x0");
        auto id = store(entry);
        persist(id, {{"type", "header"}, {"formula", to_string(phi)}, {"x0", cts->state_name(x0)}, {"seed", seed}});
        std::lock_guard lock(entry->m);
        return {201, step_view(id, entry->session)};
    }

    HttpResult view(const std::string& id) {
        auto e = find(id);
        auto lock = busy_lock(*e);
        return {200, step_view(id, e->session)};
    }

    HttpResult step(const std::string& id, const json& req) {
        auto e = find(id);
        auto lock = busy_lock(*e);
        auto& s = e->session;
        if (s.status() != SessionStatus::Active) throw SessionNotActive();
        if (!req.contains("input")) throw Error("invalid-request", "input is required", "input");
        InputId u = resolve_input(s.system(), req.at("input"));
        std::optional<StateId> next;
        if (req.contains("next")) {
            if (s.resolver().kind != ResolverKind::External)
                throw Error("invalid-request", "next is only accepted by the external resolver", "next");
            next = resolve_state(s.system(), req.at("next"), "next");
        }
        s.apply_input(u, next);
        persist(id, step_to_json(s.system(), s.history().back()));
        return {200, step_view(id, s)};
    }

    HttpResult fork(const std::string& id) {
        auto e = find(id);
        std::shared_ptr<Entry> copy;
        {
            auto lock = busy_lock(*e);
            copy = std::make_shared<Entry>(e->session.fork());
        }
        auto nid = store(copy);
        std::lock_guard lock(copy->m);
        json v = step_view(nid, copy->session);
        v["forked_from"] = id;
        return {201, v};
    }

    HttpResult spec(const std::string& id, const json& req) {
        auto e = find(id);
        auto lock = busy_lock(*e);
        if (!req.contains("formula") || !req.at("formula").is_string()) throw Error("invalid-request", "formula is required", "formula");
        Formula phi = parse_ltl(req.at("formula").get<std::string>());
        for (auto& a : atoms_of(phi)) e->session.system().atom_index(a);
        e->session.update_spec(phi);
        persist(id, {{"type", "spec"}, {"k", e->session.k()}, {"formula", to_string(phi)}});
        return {200, step_view(id, e->session)};
    }

    HttpResult tree(const std::string& id) {
        auto e = find(id);
        auto lock = busy_lock(*e);
        return {200, tlt_to_json(e->session.tree(), e->session.system())};
    }

    HttpResult trace(const std::string& id) {
        auto e = find(id);
        auto lock = busy_lock(*e);
        HttpResult r;
        r.content_type = "application/x-ndjson";
        for (auto& h : e->session.history()) r.text += step_to_json(e->session.system(), h).dump() + "\n";
        return r;
    }

    HttpResult parse(const json& req) {
        if (!req.contains("formula") || !req.at("formula").is_string()) throw Error("invalid-request", "formula is required", "formula");
        Formula f = parse_ltl(req.at("formula").get<std::string>());
        auto atoms = atoms_of(f);
        return {200, {{"formula", to_string(f)}, {"pnf", to_string(to_wu_pnf(f))}, {"atoms", std::vector<std::string>(atoms.begin(), atoms.end())}}};
    }

    std::size_t session_count() const {
        std::lock_guard lock(store_m_);
        return sessions_.size();
    }

    /// Blocks serving HTTP until stop() is called.
    bool listen(const std::string& host, int port) {
        install_routes();
        return server_.listen(host, port);
    }
    /// Binds to a free port and returns it; serve with listen_after_bind().
    int bind_any(const std::string& host) {
        install_routes();
        return server_.bind_to_any_port(host);
    }
    bool listen_after_bind() { return server_.listen_after_bind(); }
    void stop() { server_.stop(); }
    void wait_until_ready() { server_.wait_until_ready(); }

private:
    struct Entry {
        explicit Entry(SynthesisSession s) : session(std::move(s)) {}
        std::mutex m;
        SynthesisSession session;
    };

    static HttpResult fail(const std::string& code, const std::string& message, const std::string& field = {}) {
        return {status_for(code), error_body(code, message, field)};
    }

    static std::unique_lock<std::mutex> busy_lock(Entry& e) {
        std::unique_lock lock(e.m, std::try_to_lock);
        if (!lock.owns_lock()) throw Error("session-busy", "session is processing another request");
        return lock;
    }

    std::shared_ptr<Entry> find(const std::string& id) {
        std::lock_guard lock(store_m_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw Error("unknown-session", "no session '" + id + "'", "id");
        return it->second;
    }

    std::string store(std::shared_ptr<Entry> e) {
        std::lock_guard lock(store_m_);
        std::string id = "s" + std::to_string(++counter_);
        sessions_[id] = std::move(e);
        return id;
    }

    void persist(const std::string& id, const json& line) {
        if (trace_dir_.empty()) return;
        std::ofstream out(trace_dir_ + "/" + id + ".jsonl", std::ios::app);
        out << line.dump() << "\n";
    }

    static StateId resolve_state(const ControlledTransitionSystem& cts, const json& v, const std::string& field) {
        if (v.is_null()) {
            if (cts.initial().empty()) throw Error("invalid-request", "system has no initial state", field);
            return cts.initial().first();
        }
        if (v.is_number_integer()) {
            auto i = v.get<long long>();
            if (i < 0 || static_cast<std::size_t>(i) >= cts.size()) throw Error("invalid-request", "state index out of range", field);
            return static_cast<StateId>(i);
        }
        auto x = cts.find_state(v.get<std::string>());
        if (!x) throw Error("invalid-request", "unknown state '" + v.get<std::string>() + "'", field);
        return *x;
    }

    static InputId resolve_input(const ControlledTransitionSystem& cts, const json& v) {
        if (v.is_number_integer()) {
            auto i = v.get<long long>();
            if (i < 0 || static_cast<std::size_t>(i) >= cts.num_inputs()) throw InputNotFeasible("input index out of range");
            return static_cast<InputId>(i);
        }
        auto u = cts.find_input(v.get<std::string>());
        if (!u) throw InputNotFeasible("unknown input '" + v.get<std::string>() + "'");
        return *u;
    }

    static Resolver resolver_from(const ControlledTransitionSystem& cts, const json& v) {
        if (v.is_string()) {
            auto s = v.get<std::string>();
            if (s == "random") return Resolver::random();
            if (s == "adversarial") return Resolver::adversarial();
            if (s == "external") return Resolver::external();
            throw Error("invalid-request", "unknown resolver '" + s + "'", "resolver");
        }
        if (v.is_object() && v.contains("scripted")) {
            std::vector<StateId> script;
            for (auto& e : v.at("scripted")) script.push_back(resolve_state(cts, e, "resolver.scripted"));
            return Resolver::scripted(std::move(script));
        }
        throw Error("invalid-request", "resolver must be a name or {\"scripted\": [...]}", "resolver");
    }

    static json step_view(const std::string& id, const SynthesisSession& s) {
        auto& cts = s.system();
        json feasible = json::array();
        if (s.status() == SessionStatus::Active) s.feasible().for_each([&](std::size_t u) { feasible.push_back(input_to_json(cts, u)); });
        json active = json::array(), contains = json::array();
        auto& t = s.tree();
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!t.node(i).is_set) continue;
            if (s.activation().active[i]) active.push_back(i);
            if (t.node(i).set.contains(s.state())) contains.push_back(i);
        }
        json history = json::array();
        for (auto& h : s.history()) history.push_back(step_to_json(cts, h));
        return {{"session", id},
                {"k", s.k()},
                {"status", to_string(s.status())},
                {"formula", to_string(s.formula())},
                {"state", state_to_json(cts, s.state())},
                {"feasible", feasible},
                {"tlt", {{"size", t.size()}, {"active", active}, {"contains_state", contains}}},
                {"resolver", to_string(s.resolver().kind)},
                {"reused_nodes", s.last_reused_nodes()},
                {"history", history}};
    }

    void install_routes() {
        if (routes_) return;
        routes_ = true;
        if (!static_dir_.empty()) server_.set_mount_point("/", static_dir_);
        auto bridge = [this](const httplib::Request& req, httplib::Response& res) {
            auto r = handle(req.method, req.path, req.body);
            res.status = r.status;
            if (r.content_type == "application/json") res.set_content(r.body.dump(), r.content_type);
            else res.set_content(r.text, r.content_type);
        };
        server_.Post("/parse", bridge);
        server_.Post("/sessions", bridge);
        server_.Get(R"(/sessions/[^/]+)", bridge);
        server_.Post(R"(/sessions/[^/]+/(step|fork|spec))", bridge);
        server_.Get(R"(/sessions/[^/]+/(tlt|trace))", bridge);
    }

    mutable std::mutex store_m_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::size_t counter_ = 0;
    std::string trace_dir_, static_dir_;
    httplib::Server server_;
    bool routes_ = false;
};

}  // namespace tlt
