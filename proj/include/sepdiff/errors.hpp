#pragma once

#include <stdexcept>
#include <string>

namespace sepdiff {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::string expected)
        : Error("syntax error at offset " + std::to_string(offset) + ": expected " + expected),
          offset(offset), expected(std::move(expected)) {}
    std::size_t offset;
    std::string expected;
};

class UnknownFunction : public Error {
public:
    explicit UnknownFunction(std::string name)
        : Error("unknown function '" + name + "'"), name(std::move(name)) {}
    std::string name;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

// Exponent fit could not decide convergence of an improper integral.
class InconclusiveTail : public Error {
public:
    InconclusiveTail(double point, const std::string& what)
        : Error("inconclusive tail at " + std::to_string(point) + ": " + what), point(point) {}
    double point;
};

class InternalInconsistency : public Error {
public:
    using Error::Error;
};

class DomainMismatch : public Error {
public:
    using Error::Error;
};

class Inconclusive : public Error {
public:
    Inconclusive(double point, const std::string& what)
        : Error("inconclusive at " + std::to_string(point) + ": " + what), point(point) {}
    double point;
};

class UnboundedDomainWithoutTruncation : public Error {
public:
    using Error::Error;
};

class NotRecurrent : public Error {
public:
    using Error::Error;
};

class NotLowerBounded : public Error {
public:
    using Error::Error;
};

class SpecError : public Error {
public:
    using Error::Error;
};

}  // namespace sepdiff
