#pragma once

#include "smellnet/nn/layers.hpp"

namespace smellnet::nn {

void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// Zeroed value and gradient of the given shape.
void init_param(Param& p, Shape shape);

}  // namespace smellnet::nn
