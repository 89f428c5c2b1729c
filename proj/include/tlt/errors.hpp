#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tlt {

/// Base for every error raised by the library. `code()` is a stable kebab-case token.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::string field = {})
        : std::runtime_error(message), code_(std::move(code)), field_(std::move(field)) {}
    const std::string& code() const { return code_; }
    const std::string& field() const { return field_; }

private:
    std::string code_;
    std::string field_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
        : Error("syntax-error", describe(offset, expected, found)), offset_(offset), expected_(std::move(expected)) {}
    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    static std::string describe(std::size_t offset, const std::vector<std::string>& expected, const std::string& found) {
        std::string m = "syntax error at offset " + std::to_string(offset) + ": found " + found + ", expected one of";
        for (auto& e : expected) m += " " + e;
        return m;
    }
    std::size_t offset_;
    std::vector<std::string> expected_;
};

struct UnknownAtom : Error {
    explicit UnknownAtom(const std::string& name) : Error("unknown-atom", "unknown atom '" + name + "'") {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what, std::string field = {})
        : Error("dimension-mismatch", what, std::move(field)) {}
};
struct EmptyGrid : Error {
    explicit EmptyGrid(const std::string& what) : Error("empty-grid", what) {}
};
struct InvalidSystem : Error {
    explicit InvalidSystem(const std::string& what, std::string field = {})
        : Error("invalid-system", what, std::move(field)) {}
};
struct IncompleteCoding : Error {
    explicit IncompleteCoding(const std::string& what) : Error("incomplete-coding", what) {}
};
struct PrefixInconsistent : Error {
    explicit PrefixInconsistent(const std::string& what) : Error("prefix-inconsistent", what) {}
};
struct SessionNotActive : Error {
    SessionNotActive() : Error("session-not-active", "session is not active") {}
};
struct InputNotFeasible : Error {
    explicit InputNotFeasible(const std::string& what) : Error("input-not-feasible", what, "input") {}
};
struct EmptySuccessor : Error {
    explicit EmptySuccessor(const std::string& what) : Error("empty-successor", what) {}
};

}  // namespace tlt
