#pragma once

#include <stdexcept>
#include <string>

namespace bprec {

// Environment family cannot produce a nondegenerate offspring law
// (sigma would be zero).
class DegenerateEnvironmentError : public std::domain_error {
public:
  explicit DegenerateEnvironmentError(const std::string& what)
      : std::domain_error(what) {}
};

// The variance normalizer V_{m,n,rho} is zero: rho = 1 together with
// sigma1 = sigma2 and n = m is excluded by the standing assumption.
class DegenerateVarianceError : public std::domain_error {
public:
  explicit DegenerateVarianceError(const std::string& what)
      : std::domain_error(what) {}
};

// A numeric routine could not reach its documented accuracy.
class PrecisionError : public std::runtime_error {
public:
  explicit PrecisionError(const std::string& what)
      : std::runtime_error(what) {}
};

// A diagnostic was asked to run on fewer samples than it supports.
class InsufficientSampleError : public std::invalid_argument {
public:
  explicit InsufficientSampleError(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace bprec
