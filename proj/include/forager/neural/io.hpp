#pragma once

#include <string>

#include "forager/neural/net.hpp"

namespace forager::neural {

// Flat binary parameter container. 16-byte header (8-byte magic "FRGPARAM",
// u32 version, u32 layer count), then per layer: u32 out, u32 in, the weight
// matrix row-major, then the bias vector, all little-endian float64.
// Full layout notes live in docs/params_format.md.
void save_params(const Params& params, const std::string& path);
Params load_params(const std::string& path);

} // namespace forager::neural
