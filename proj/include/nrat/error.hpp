#pragma once

#include <stdexcept>
#include <string>

namespace nrat {

enum class ErrorCode {
    validation,   // bad input data (CLI exit 2)
    no_limit,     // a sequence refused to converge (CLI exit 3)
    unsupported,  // declared out of scope (CLI exit 4)
    budget,       // evaluation budget exhausted (CLI exit 5)
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nrat
