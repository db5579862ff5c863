// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace blogflux {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

// Index of a post inside a Corpus.
using PostId = std::uint32_t;
// Index of a blogger inside Corpus::bloggers().
using BloggerId = std::uint32_t;
// Index of a term inside a Vocabulary.
using TermId = std::uint32_t;

inline constexpr std::int64_t kSecondsPerHour = 3600;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The input stream could not be read at all.
class IngestError : public Error {
 public:
  using Error::Error;
};

// Too many malformed records for the input to be trusted.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An optimizer produced a non-finite objective.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

// A recommendation query that has no in-vocabulary keyword.
class UnanswerableQuery : public Error {
 public:
  UnanswerableQuery() : Error("unanswerable query") {}
};

}  // namespace blogflux
