#pragma once

#include <stdexcept>
#include <string>

namespace tce {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TCE_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

TCE_DEFINE_ERROR(InvalidMap);
TCE_DEFINE_ERROR(InvalidArgument);
TCE_DEFINE_ERROR(SolverDiverged);
TCE_DEFINE_ERROR(CriticalOnJulia);
TCE_DEFINE_ERROR(DepthTooLarge);
TCE_DEFINE_ERROR(EmptyPeriodicSet);
TCE_DEFINE_ERROR(EmptySelection);
TCE_DEFINE_ERROR(UnknownObservable);
TCE_DEFINE_ERROR(NonConvexCurve);
TCE_DEFINE_ERROR(Reducible);
TCE_DEFINE_ERROR(NotInvariant);
TCE_DEFINE_ERROR(BoundaryItinerary);
TCE_DEFINE_ERROR(ConfigInvalid);
TCE_DEFINE_ERROR(IoError);

#undef TCE_DEFINE_ERROR

}  // namespace tce
