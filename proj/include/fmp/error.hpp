#pragma once
#include <stdexcept>
#include <string>

namespace fmp {

// Precondition violated by the caller (bad state index, scope mismatch, ...).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A computation would exceed a configured size cap.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Message passing was asked to run without the inputs it needs.
struct protocol_error : std::logic_error {
    using std::logic_error::logic_error;
};

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace fmp
