#pragma once

#include <stdexcept>
#include <string>

namespace voiplan {

// Common base so callers (and the CLI) can catch everything from this
// library in one place.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke an operation's precondition (infeasible action, empty
// action set, impossible placement, search-space guard, ...).
class contract_error : public error {
public:
    explicit contract_error(const std::string& what) : error(what) {}
};

// A value object violates one of its declared invariants. Carries the
// offending field name in the message.
class invariant_error : public error {
public:
    invariant_error(const std::string& field, const std::string& what)
        : error(field + ": " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// A serialized document is malformed. Carries the field path.
class schema_error : public error {
public:
    schema_error(const std::string& path, const std::string& what)
        : error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

} // namespace voiplan
