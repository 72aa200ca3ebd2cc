#pragma once

#include <stdexcept>
#include <string>

namespace hpk {

// Base of every error raised by the library. Subclasses name the failure
// mode so callers (and the CLI exit-code mapping) can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HPK_DEFINE_ERROR(Name)            \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

HPK_DEFINE_ERROR(DomainError);
HPK_DEFINE_ERROR(PoleError);
HPK_DEFINE_ERROR(OverflowError);
HPK_DEFINE_ERROR(NonConvergence);
HPK_DEFINE_ERROR(IllConditioned);
HPK_DEFINE_ERROR(DegreeError);
HPK_DEFINE_ERROR(MomentDivergence);
HPK_DEFINE_ERROR(GridTooCoarse);
HPK_DEFINE_ERROR(QuadFailure);
HPK_DEFINE_ERROR(NearSingular);
HPK_DEFINE_ERROR(EigenFailure);
HPK_DEFINE_ERROR(SingularCayley);
HPK_DEFINE_ERROR(InvalidSpec);

#undef HPK_DEFINE_ERROR

}  // namespace hpk
