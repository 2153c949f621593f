#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace topoloss {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExtentMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidWindow : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised by the graph text reader; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A node whose coordinates fall outside the raster it is drawn into.
class RasterizeError : public Error {
 public:
  RasterizeError(long long node_id, const std::string& what)
      : Error("node " + std::to_string(node_id) + ": " + what), node_id_(node_id) {}
  long long node_id() const noexcept { return node_id_; }

 private:
  long long node_id_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace topoloss
