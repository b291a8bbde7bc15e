#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hotspot/types.hpp"

namespace hotspot {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input table is missing its header or a required column.
class SchemaError : public Error {
public:
  using Error::Error;
};

/// A cell could not be parsed. `line()` is the 1-based line of the record
/// in the source (the header is line 1).
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Content is well-formed but semantically invalid (duplicates, coincident
/// centres, out-of-range coordinates).
class DataError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// A precondition on a function argument was violated.
class ContractError : public Error {
public:
  using Error::Error;
};

/// The geocoding backend could not be reached. Retrying later may succeed;
/// `failed_keys()` lists every key that was not attempted successfully.
class ProviderTransportError : public Error {
public:
  ProviderTransportError(const std::string& what, std::vector<DivisionKey> failed)
      : Error(what), failed_(std::move(failed)) {}

  const std::vector<DivisionKey>& failed_keys() const noexcept { return failed_; }

private:
  std::vector<DivisionKey> failed_;
};

}  // namespace hotspot
