#pragma once

#include <stdexcept>
#include <string>

namespace swtr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SWTR_ERROR(Name)                                  \
  struct Name : Error {                                   \
    explicit Name(const std::string& m) : Error(#Name ": " + m) {} \
  }

SWTR_ERROR(DivisionByZeroSeries);
SWTR_ERROR(NotInvertible);
SWTR_ERROR(BranchUndefined);
SWTR_ERROR(NonzeroResidue);
SWTR_ERROR(UnknownCoefficient);
SWTR_ERROR(TruncationInsufficient);
SWTR_ERROR(InvalidGauge);
SWTR_ERROR(DegenerateDisc);
SWTR_ERROR(OutOfAnnulus);
SWTR_ERROR(SingularCurve);
SWTR_ERROR(CycleConstructionFailed);
SWTR_ERROR(QuadratureNotConverged);
SWTR_ERROR(NormalizationSolveFailed);
SWTR_ERROR(OutOfNeighbourhood);
SWTR_ERROR(ExtractionNotConverged);
SWTR_ERROR(BasisMismatch);
SWTR_ERROR(ConfigError);
SWTR_ERROR(InversionNotConverged);

#undef SWTR_ERROR

}  // namespace swtr
