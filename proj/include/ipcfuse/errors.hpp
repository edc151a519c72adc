#pragma once

#include <stdexcept>
#include <string>

namespace ipcfuse {

/// Base class for all pipeline errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// geometry
class InvalidRing : public Error {
public:
  using Error::Error;
};
class InvalidPolygon : public Error {
public:
  using Error::Error;
};

// ingest
class NotAShapefile : public Error {
public:
  using Error::Error;
};
class UnsupportedShapeType : public Error {
public:
  using Error::Error;
};
class CorruptPair : public Error {
public:
  using Error::Error;
};
class TruncatedFile : public Error {
public:
  using Error::Error;
};
class SchemaError : public Error {
public:
  using Error::Error;
};

/// A bad data row; carries the 1-based row number of the offending line.
class RowError : public Error {
public:
  RowError(size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  size_t row() const { return row_; }

private:
  size_t row_;
};

// stats
class InsufficientData : public Error {
public:
  using Error::Error;
};

// predict
class SplitError : public Error {
public:
  using Error::Error;
};
class DegenerateTraining : public Error {
public:
  using Error::Error;
};
class EvalError : public Error {
public:
  using Error::Error;
};

}  // namespace ipcfuse
