#pragma once

#include <stdexcept>
#include <string>

namespace cp3d {

/// Base class for all recoverable errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define CP3D_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& what) : Error(what) {}     \
  }

// geometry
CP3D_DEFINE_ERROR(PointAtInfinity);
CP3D_DEFINE_ERROR(DegenerateSystem);

// homography
CP3D_DEFINE_ERROR(DegenerateConfiguration);
CP3D_DEFINE_ERROR(NumericalFailure);
CP3D_DEFINE_ERROR(IndexMismatch);

// matching
CP3D_DEFINE_ERROR(ViewMismatch);
CP3D_DEFINE_ERROR(InvalidCost);
CP3D_DEFINE_ERROR(MissingFeet);
CP3D_DEFINE_ERROR(RingTopologyError);

// reconstruction
CP3D_DEFINE_ERROR(DegenerateGeometry);
CP3D_DEFINE_ERROR(ZeroLengthBone);

// metrics
CP3D_DEFINE_ERROR(NoMatches);
CP3D_DEFINE_ERROR(MissingConstants);
CP3D_DEFINE_ERROR(NoGroundTruth);

// synthetic scenes
CP3D_DEFINE_ERROR(InfeasibleSpec);

#undef CP3D_DEFINE_ERROR

}  // namespace cp3d
