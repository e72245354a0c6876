#pragma once

#include <stdexcept>
#include <string>

namespace grushin {

enum class ErrorKind { Config, Hypothesis, Numerical };

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& name, const std::string& what)
        : std::runtime_error(name + ": " + what), kind_(kind), name_(name) {}
    ErrorKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

  private:
    ErrorKind kind_;
    std::string name_;
};

#define GRUSHIN_ERROR(Name, Kind)                                              \
    struct Name : Error {                                                      \
        explicit Name(const std::string& w) : Error(ErrorKind::Kind, #Name, w) {} \
    };

// bad input / unmet preconditions
GRUSHIN_ERROR(ConfigError, Config)
GRUSHIN_ERROR(InvalidArgument, Config)
GRUSHIN_ERROR(OutOfInterval, Config)
GRUSHIN_ERROR(EpsilonTooLarge, Config)
GRUSHIN_ERROR(DegreeTooLarge, Config)
GRUSHIN_ERROR(TruncationTooSmall, Config)
GRUSHIN_ERROR(GridTooCoarse, Config)
GRUSHIN_ERROR(MissingEigenpair, Config)
GRUSHIN_ERROR(DegreeRange, Config)
GRUSHIN_ERROR(EmptyRegion, Config)
GRUSHIN_ERROR(GridMismatch, Config)

// outside the paper's assumptions
GRUSHIN_ERROR(HypothesisViolation, Hypothesis)
GRUSHIN_ERROR(NoCounterexamplePoint, Hypothesis)

// numerical failures
GRUSHIN_ERROR(SingularAmplitude, Numerical)
GRUSHIN_ERROR(NoConvergence, Numerical)
GRUSHIN_ERROR(ShiftOnSpectrum, Numerical)
GRUSHIN_ERROR(OverflowGuard, Numerical)
GRUSHIN_ERROR(RatioTooLarge, Numerical)
GRUSHIN_ERROR(GramianIllConditioned, Numerical)

#undef GRUSHIN_ERROR

} // namespace grushin
