#pragma once

#include <stdexcept>
#include <string>

namespace pmle {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define PMLE_ERROR(name)          \
  struct name : error {           \
    using error::error;           \
  }

PMLE_ERROR(ParseError);
PMLE_ERROR(DivisionByZero);
PMLE_ERROR(EntryNotBinary);
PMLE_ERROR(DimensionMismatch);
PMLE_ERROR(IndexError);
PMLE_ERROR(RankOneViolation);
PMLE_ERROR(CountExceedsMultiplicity);
PMLE_ERROR(ZeroMarginal);
PMLE_ERROR(NonNormalizedData);
PMLE_ERROR(NonPositiveData);
PMLE_ERROR(GripRequired);
PMLE_ERROR(FloretsUndefined);
PMLE_ERROR(NotStratified);
PMLE_ERROR(InvalidFacetOrder);
PMLE_ERROR(InvalidComplex);
PMLE_ERROR(FacetCountTooLarge);
PMLE_ERROR(NotMultihomogeneous);
PMLE_ERROR(IndexingUndefined);
PMLE_ERROR(GeneratorLimitExceeded);

#undef PMLE_ERROR

}  // namespace pmle
