#pragma once

#include <stdexcept>
#include <string>

namespace atchan {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A token, type, index or classification is referenced but not declared.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// An attack tree violates a structural invariant.
class TreeError : public Error {
 public:
  using Error::Error;
};

class UnvaluedLeafError : public Error {
 public:
  explicit UnvaluedLeafError(std::string node_id)
      : Error("unvalued leaf: " + node_id), node_id_(std::move(node_id)) {}
  const std::string& node_id() const { return node_id_; }

 private:
  std::string node_id_;
};

/// A child token has no preimage under the token part of an infomorphism.
class UnliftableTokenError : public Error {
 public:
  using Error::Error;
};

/// An effect relation does not hold in its classification.
class EffectError : public Error {
 public:
  using Error::Error;
};

/// A bounded procedure refused its input because a size cap was exceeded.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace atchan
