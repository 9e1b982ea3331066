#pragma once

#include <stdexcept>
#include <string>

namespace cordfol {

enum class ErrorKind { structural, domain, numeric, parse };

inline const char* to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::structural: return "structural";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::parse: return "parse";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Mismatched codimension, order, basepoint, degree or chart.
struct StructuralError : Error {
    explicit StructuralError(const std::string& w) : Error(ErrorKind::structural, w) {}
};

// Violated precondition: non-invertible linear part, singular vector field, ...
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};

// Tolerance exceeded or integration failed to converge.
struct NumericError : Error {
    explicit NumericError(const std::string& w) : Error(ErrorKind::numeric, w) {}
};

struct ParseError : Error {
    ParseError(int line, int col, const std::string& w)
        : Error(ErrorKind::parse, std::to_string(line) + ":" + std::to_string(col) + ": " + w), line(line), col(col)
    {}
    int line;
    int col;
};

} // namespace cordfol
