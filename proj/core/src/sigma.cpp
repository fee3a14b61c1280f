#include <algorithm>
#include <cmath>

#include "crowdpose3d/reconstruct.hpp"

namespace cp3d {

double BBox::diagonal() const { return std::hypot(w, h); }

double sigma_model(const BBox& bbox, double confidence,
                   const SigmaModel& model) {
  const double diag = std::max(bbox.diagonal(), 1e-6);
  const double conf =
      std::max(std::clamp(confidence, 0.0, 1.0), model.conf_floor);
  return model.sigma0 * (diag / model.d_ref) / conf;
}

}  // namespace cp3d
