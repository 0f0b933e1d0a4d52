#include "rqbe/error.hpp"

namespace rqbe {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "invalid parameters";
    case ErrorKind::DegenerateGeometry: return "degenerate geometry";
    case ErrorKind::CollinearGeometry: return "collinear geometry";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::GridMismatch: return "grid mismatch";
    case ErrorKind::Nonconvergence: return "nonconvergence";
    case ErrorKind::NonzeroMomentum: return "nonzero net momentum";
    case ErrorKind::InsufficientSamples: return "insufficient samples";
    case ErrorKind::NonpositiveValue: return "nonpositive value";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::EigenSolver: return "eigensolver failure";
  }
  return "unknown";
}

}  // namespace rqbe
