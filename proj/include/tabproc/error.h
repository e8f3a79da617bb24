// Exception types shared by every tabproc module.

#pragma once

#include <stdexcept>
#include <string>

namespace tabproc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value fell outside its legal range (MIDI, fret, bar number, ...).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed XML. line() is the 1-based line reported by the XML reader.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Well-formed document that does not have the expected MusicXML structure.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

/// No (string, fret) position can produce the requested pitch.
class NotPlayable : public RangeError {
 public:
  using RangeError::RangeError;
};

}  // namespace tabproc
