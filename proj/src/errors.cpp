#include "maxbell/errors.hpp"

namespace maxbell {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kStructural: return "structural";
    case ErrorKind::kMeasure: return "measure";
    case ErrorKind::kIntegrability: return "integrability";
    case ErrorKind::kConvergence: return "convergence";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kNotApStar: return "not-ap-star";
    case ErrorKind::kDegenerateConstants: return "degenerate-constants";
    case ErrorKind::kTailCondition: return "tail-condition";
    case ErrorKind::kInstanceTooLarge: return "instance-too-large";
    case ErrorKind::kFit: return "fit";
  }
  return "unknown";
}

}  // namespace maxbell
