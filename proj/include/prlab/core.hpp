#pragma once

// Basic vocabulary shared by every prlab module: carrier indices, operation
// selectors, three-valued verdicts and the error hierarchy.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace prlab {

// Canonical carrier index. Ordering of elements is the ordering of indices.
using Element = std::uint32_t;

// Marker for an operation result that falls outside a windowed carrier.
inline constexpr Element kUndefined = std::numeric_limits<Element>::max();

enum class Op : std::uint8_t { add, mul };

enum class Kind : std::uint8_t { semigroup, semiring };

enum class Verdict : std::uint8_t { yes, no, inconclusive };

inline std::string_view to_string(Op op) { return op == Op::add ? "add" : "mul"; }

inline std::string_view to_string(Kind kind) {
    return kind == Kind::semiring ? "semiring" : "semigroup";
}

inline std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

inline Verdict negate(Verdict v) {
    switch (v) {
    case Verdict::yes: return Verdict::no;
    case Verdict::no: return Verdict::yes;
    default: return Verdict::inconclusive;
    }
}

// Malformed user input: structure/subset/pattern text, table shapes, indices.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A pattern source that failed to parse. `position` is a 0-based offset.
class ParseError : public InputError {
public:
    ParseError(std::size_t position, const std::string& message)
        : InputError("parse error at position " + std::to_string(position) + ": " + message),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// An operation was invoked on inputs violating its stated precondition.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A hard budget or window limit made a computation impossible to finish.
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Op parse_op(std::string_view text) {
    if (text == "add" || text == "+")
        return Op::add;
    if (text == "mul" || text == "*")
        return Op::mul;
    throw InputError("unknown operation '" + std::string(text) + "' (expected add or mul)");
}

} // namespace prlab
