#pragma once

// Hidden-variable strategy files, in the same `key = value` format as
// experiment configs:
//
//   [strategy]
//   prep = 0.5, 0.5
//   a1 = 1, -1
//   a2 = 1, 1
//   b1 = 1, -1
//   b2 = -1, 1
//   invasiveness1 = 0.2
//
//   [noise1]           ; alpha_1 detector, same layout for [noise2]
//   kind = gaussian    ; none | gaussian | two_point
//   scale = 1          ; one value for all hidden states, or one per state
//   bias = 0
//
// Omitted noise sections mean noiseless detectors.

#include <string>

#include "blgi/cli/config_file.hpp"
#include "blgi/lhv.hpp"

namespace blgi::cli {

/// Builds the strategy and checks its full invariants (InvalidArgument on failure).
LhvStrategy parse_strategy(const ConfigDocument& doc);
LhvStrategy load_strategy(const std::string& path);

std::string write_strategy(const LhvStrategy& strategy);

}  // namespace blgi::cli
