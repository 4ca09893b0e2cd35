#pragma once

#include <stdexcept>
#include <string>

namespace linfb {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error { public: using Error::Error; };
class NotSymmetric : public Error { public: using Error::Error; };
class NotPositiveDefinite : public Error { public: using Error::Error; };
class NoRootInInterval : public Error { public: using Error::Error; };
class InfeasibleBudget : public Error { public: using Error::Error; };
class ZeroVector : public Error { public: using Error::Error; };
class IndexOutOfRange : public Error { public: using Error::Error; };
class StructureError : public Error { public: using Error::Error; };

// Bad user input. `field` names the offending flag or key.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace linfb
