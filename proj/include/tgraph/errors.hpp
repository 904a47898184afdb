#ifndef TGRAPH_ERRORS_HPP
#define TGRAPH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tgraph
{

/// Malformed or inconsistent input: unknown ids, shape mismatches, bad JSON.
class InvalidInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A parameter outside the domain where the construction is defined,
/// e.g. an inverse temperature at or below the critical value.
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// The requested object would exceed the configured size limits.
class SizeError : public std::length_error
{
public:
    using std::length_error::length_error;
};

/// An internal identity that must hold failed to hold.
class VerificationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace tgraph

#endif
