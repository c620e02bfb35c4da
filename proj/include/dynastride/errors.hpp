#ifndef DYNASTRIDE_ERRORS_HPP
#define DYNASTRIDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dynastride {

// Base class for all pipeline errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration: invalid parameter values, dimension mismatches, etc.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Data that violates a documented invariant (mismatched frame shapes,
// duplicate manifest keys, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Malformed structured text: manifest documents, backend replies.
// Carries the offending raw text so callers can log it.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg, std::string raw = "")
      : Error(msg), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

// Filesystem problems: missing directories, unreadable files.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Caller bug: out-of-range index, empty input where non-empty is required.
class LogicError : public Error {
 public:
  explicit LogicError(const std::string& msg) : Error(msg) {}
};

// Remote backend failure. Transient errors (5xx, timeouts) may be retried;
// permanent ones (4xx) may not.
class BackendError : public Error {
 public:
  BackendError(const std::string& msg, bool transient, std::string endpoint = "",
               std::string model_id = "")
      : Error(msg),
        transient_(transient),
        endpoint_(std::move(endpoint)),
        model_id_(std::move(model_id)) {}
  bool transient() const { return transient_; }
  const std::string& endpoint() const { return endpoint_; }
  const std::string& model_id() const { return model_id_; }

 private:
  bool transient_ = false;
  std::string endpoint_;
  std::string model_id_;
};

}  // namespace dynastride

#endif  // DYNASTRIDE_ERRORS_HPP
