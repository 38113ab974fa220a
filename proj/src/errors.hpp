#pragma once

#include <stdexcept>
#include <string>

namespace netflow {

enum class ErrorCode {
    Domain = 1,   // invalid input object, constraint violation, infeasibility
    Parse = 2,    // malformed file or schema
    Numeric = 3,  // solver breakdown, singular geometry
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline Error domain_error(const std::string& what) { return Error(ErrorCode::Domain, what); }
inline Error parse_error(const std::string& what) { return Error(ErrorCode::Parse, what); }
inline Error numeric_error(const std::string& what) { return Error(ErrorCode::Numeric, what); }

} // namespace netflow
