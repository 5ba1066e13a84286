#pragma once

#include <stdexcept>
#include <string>

namespace qcsolve {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : Error("line " + std::to_string(line) + ":" + std::to_string(column) +
              ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

#define QCSOLVE_ERROR(Name)            \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  };

QCSOLVE_ERROR(UnsupportedFeature)
QCSOLVE_ERROR(FilterScopeError)
QCSOLVE_ERROR(IllFormedTriple)
QCSOLVE_ERROR(NotALiteral)
QCSOLVE_ERROR(NotWellDesigned)
QCSOLVE_ERROR(UnsupportedShape)
QCSOLVE_ERROR(BlowupLimitExceeded)
QCSOLVE_ERROR(ProjectionInSuperQuery)
QCSOLVE_ERROR(SolverNotFound)
QCSOLVE_ERROR(SolverProtocolError)

#undef QCSOLVE_ERROR

}  // namespace qcsolve
