#pragma once

#include <span>
#include <vector>

#include "accrete/beam.hpp"

namespace accrete::detail {

struct Interval {
  double lo;
  double hi;
};

/// Occupied y-range of the base section (index 0) and of every layer.
std::vector<Interval> layer_intervals(std::span<const double> heights);

/// Integrals of the prestrain over the section: int e^p dy and int y e^p dy.
struct PrestrainMoments {
  double force;
  double moment;
};
PrestrainMoments prestrain_moments(std::span<const double> heights,
                                   std::span<const PrestrainPair> prestrains);

}  // namespace accrete::detail
