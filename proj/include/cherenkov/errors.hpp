#pragma once

#include <stdexcept>
#include <string>

namespace cherenkov {

// Argument outside an operation's domain (negative frequency, missing loss, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// A quadrature or series did not reach its requested tolerance.
class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// The response model is singular at the requested point (e.g. a pole of kappa).
class DegenerateModelError : public std::runtime_error {
  public:
    DegenerateModelError(const std::string& what, double omega)
        : std::runtime_error(what), omega_(omega) {}
    double omega() const noexcept { return omega_; }

  private:
    double omega_;
};

class RootCountError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class PolishDivergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Cherenkov threshold not met: n * beta <= 1.
class NoRadiationError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

}  // namespace cherenkov
