#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace atlr
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed text input. Line and column are 1-based; 0 means unknown.
class InputError : public Error
{
    std::size_t _line;
    std::size_t _column;

public:
    InputError( const std::string& message, std::size_t line = 0, std::size_t column = 0 );

    [[nodiscard]] std::size_t line() const { return _line; }
    [[nodiscard]] std::size_t column() const { return _column; }
};

// Well-formed input that violates a semantic rule (unknown agent, clashing
// names, non-surjective map, ...).
class ModelError : public Error
{
public:
    using Error::Error;
};

// An operation was called outside its precondition.
class ContractError : public Error
{
public:
    using Error::Error;
};

class ResourceExceeded : public Error
{
public:
    using Error::Error;
};

} // namespace atlr
