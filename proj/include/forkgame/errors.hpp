#pragma once

#include <stdexcept>
#include <string>

namespace forkgame {

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_number(line) {}
    long line_number;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyChain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllegalAction : std::runtime_error {
    explicit IllegalAction(const std::string& what, int player = -1, int round = -1)
        : std::runtime_error(what), player(player), round(round) {}
    int player;
    int round;
};

struct GameNotOver : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownStrategy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InstanceTooLarge : std::runtime_error {
    InstanceTooLarge(const std::string& what, double required)
        : std::runtime_error(what), required_budget(required) {}
    double required_budget;
};

struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConflictViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConditionViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace forkgame
