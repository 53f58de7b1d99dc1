#pragma once

#include <stdexcept>
#include <string>

namespace evipath {

// Input that could not be decoded at all (bad JSON, bad vectors file).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Decodable input that does not match the expected key/type layout.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed input whose content breaks a data-model invariant.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation was called with arguments outside its contract.
struct ArgumentError : std::invalid_argument {
  explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A precondition the caller was supposed to guarantee did not hold.
struct ContractError : std::logic_error {
  explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace evipath
