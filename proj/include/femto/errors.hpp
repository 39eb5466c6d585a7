#ifndef FEMTO_ERRORS_HPP
#define FEMTO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace femto {

/// Invalid scenario or model parameters (rejected before any run).
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Caller broke a documented precondition on a structured argument.
class ContractError : public std::logic_error {
public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Exhaustive oracle asked to enumerate a problem above its size limit.
class SizeLimitError : public std::length_error {
public:
  explicit SizeLimitError(const std::string& what) : std::length_error(what) {}
};

}  // namespace femto

#endif  // FEMTO_ERRORS_HPP
