#pragma once

#include <string>

#include "iterx/error.hpp"
#include "iterx/witness.hpp"

namespace iterx {

/// Every numeric policy knob of a run. Defaults are the library defaults.
struct RunConfig {
  long precision = 60;          // p-adic absolute precision, digits of p
  int depth = 0;                // APF depth; 0 picks 3 when p^r > 8, else 6
  double tolerance_scale = 1.0; // scales every complex tolerance, in (0, 1]
  int bound_n = 64;             // orbit length bound for PCF and period detection
  int m_max = 8;                // power-like search bound
  std::string max_height;       // orbit height bound; empty picks max(1e6, 10 * map height)
  int max_inert = 4;            // largest residue extension for the unit equation
  std::string input;            // map file, "-" for stdin
  std::string output;           // report file, empty for stdout

  void validate() const {
    if (precision <= 0) fail(ErrorCode::InvalidInput, "precision must be positive");
    if (depth < 0) fail(ErrorCode::InvalidInput, "depth must be positive");
    if (bound_n <= 0) fail(ErrorCode::InvalidInput, "bound-n must be positive");
    if (m_max <= 0) fail(ErrorCode::InvalidInput, "m-max must be positive");
    if (max_inert <= 0) fail(ErrorCode::InvalidInput, "max-inert must be positive");
    if (!(tolerance_scale > 0 && tolerance_scale <= 1)) fail(ErrorCode::InvalidInput, "tolerance scale must lie in (0, 1]");
  }

  Tolerances tolerances() const { return Tolerances{}.scaled(tolerance_scale); }
};

}  // namespace iterx
