#pragma once

#include <vector>

#include "crowdpose3d/geometry.hpp"

namespace cp3d {

/// Axis-aligned pixel rectangle, (x, y) top-left.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  double diagonal() const;
};

/// One joint observation of a 2D skeleton.
struct JointObs {
  Point2 position = Point2::Zero();  // pixels
  double confidence = 0.0;           // in [0, 1]
  bool present = false;
};

/// One person's detected 2D skeleton in one view.
struct Detection2D {
  int view = 0;
  int person_index = 0;              // index within the view's detections
  std::vector<JointObs> joints;      // M entries
  BBox bbox;
  std::vector<double> sigma;         // M detection uncertainties (pixels)
};

}  // namespace cp3d
