#pragma once

#include <stdexcept>
#include <string>

namespace demonsim {

/// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model parameters or a truncation that cannot hold its mass.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Objects built over incompatible state spaces.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Absolutely irreversible pair: supp(p) is not contained in supp(q).
class SupportError : public Error {
 public:
  using Error::Error;
};

/// An outcome that the forward process assigns zero probability.
class ZeroProbabilityError : public Error {
 public:
  using Error::Error;
};

/// A probability-weighted observable took an infinite value.
class DivergentObservableError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration input; the message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace demonsim
