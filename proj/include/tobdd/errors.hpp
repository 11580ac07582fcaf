// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace tobdd {

/// Base class for all pipeline errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in SMT-LIB input, with 1-based source position.
class parse_error : public error {
 public:
  parse_error(const std::string& what, int line, int col)
      : error(std::to_string(line) + ":" + std::to_string(col) + ": " + what),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

/// Input uses a construct outside the supported QF_LRA fragment.
class unsupported_error : public parse_error {
 public:
  unsupported_error(const std::string& construct, int line, int col)
      : parse_error("unsupported construct: " + construct, line, col),
        construct_(construct) {}
  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

/// A formula mentions an atom that is not registered in the atom map.
class missing_atom_error : public error {
 public:
  using error::error;
};

/// Enumeration exceeded the configured assignment cap.
class resource_limit_error : public error {
 public:
  using error::error;
};

}  // namespace tobdd
