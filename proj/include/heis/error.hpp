#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace heis {

/// Checked integer arithmetic left the representable range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Input outside an operation's mathematical domain (empty set, p <= 2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configured size or memory cap was hit. `progress` says how far the
/// computation got before stopping (e.g. the last completed BFS layer).
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t reached, std::size_t cap,
                long progress = -1)
      : std::runtime_error(what), reached_(reached), cap_(cap),
        progress_(progress) {}

  std::size_t reached() const noexcept { return reached_; }
  std::size_t cap() const noexcept { return cap_; }
  long progress() const noexcept { return progress_; }

 private:
  std::size_t reached_;
  std::size_t cap_;
  long progress_;
};

/// The instance is larger than an exact algorithm supports.
class CapabilityError : public ResourceError {
 public:
  CapabilityError(const std::string& what, std::size_t requested,
                  std::size_t supported)
      : ResourceError(what, requested, supported) {}
};

/// An iterative solver stopped without meeting its tolerances.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace heis
