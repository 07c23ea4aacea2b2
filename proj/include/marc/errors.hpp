#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace marc {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A per-bank ACT-to-ACT gap is shorter than tRCmin.
class TimingViolation : public Error {
 public:
  explicit TimingViolation(std::size_t index)
      : Error("timing violation at command " + std::to_string(index)), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class UnorderedTrace : public Error {
 public:
  explicit UnorderedTrace(std::size_t index)
      : Error("timestamps decrease at command " + std::to_string(index)), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class BelowTrcMin : public Error {
 public:
  explicit BelowTrcMin(long long trc_ns)
      : Error("tRC of " + std::to_string(trc_ns) + " ns is below tRCmin") {}
};

class WindowFull : public Error {
 public:
  explicit WindowFull(std::size_t capacity)
      : Error("short-tRC buffer overflow (capacity " + std::to_string(capacity) + ")") {}
};

class NotPending : public Error {
 public:
  explicit NotPending(unsigned bank)
      : Error("RFM issued on bank " + std::to_string(bank) + " without a pending request") {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& content)
      : Error("parse error at line " + std::to_string(line) + ": '" + content + "'"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ZeroBaseline : public Error {
 public:
  ZeroBaseline() : Error("MER baseline must be positive") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace marc
