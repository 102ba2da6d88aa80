#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fraclab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when inputs violate documented preconditions. Carries every
/// violation found, not only the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations);
    explicit ValidationError(const std::string& violation)
        : ValidationError(std::vector<std::string>{violation}) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// A point fell on the singular set of a projection or retraction.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

inline ValidationError::ValidationError(std::vector<std::string> violations)
    : Error([&] {
          std::string msg = "validation failed:";
          for (const auto& v : violations) msg += "\n  - " + v;
          return msg;
      }()),
      violations_(std::move(violations)) {}

/// Collects violations and throws them together.
class Violations {
public:
    void check(bool ok, std::string message) {
        if (!ok) list_.push_back(std::move(message));
    }
    void add(std::string message) { list_.push_back(std::move(message)); }
    bool empty() const { return list_.empty(); }
    void append(const Violations& other) { list_.insert(list_.end(), other.list_.begin(), other.list_.end()); }
    const std::vector<std::string>& list() const { return list_; }
    void throw_if_any() const {
        if (!list_.empty()) throw ValidationError(list_);
    }

private:
    std::vector<std::string> list_;
};

}  // namespace fraclab
