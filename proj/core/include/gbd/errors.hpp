#pragma once

#include <stdexcept>
#include <string>

namespace gbd {

// Every failure surfaced by the library carries a stable machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define GBD_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  };

GBD_DEFINE_ERROR(ColumnSupportUnbounded)
GBD_DEFINE_ERROR(InvalidWindow)
GBD_DEFINE_ERROR(InvalidMatrix)
GBD_DEFINE_ERROR(NoReturnFound)
GBD_DEFINE_ERROR(DivergenceDetected)
GBD_DEFINE_ERROR(NoPositiveSolution)
GBD_DEFINE_ERROR(RowSumViolation)
GBD_DEFINE_ERROR(NoWitnessWithinHorizon)
GBD_DEFINE_ERROR(ConditionFails)
GBD_DEFINE_ERROR(ConeCollapse)
GBD_DEFINE_ERROR(ParamOutOfRange)
GBD_DEFINE_ERROR(InvalidPath)
GBD_DEFINE_ERROR(InvalidOrder)
GBD_DEFINE_ERROR(ConfigError)

#undef GBD_DEFINE_ERROR

}  // namespace gbd
