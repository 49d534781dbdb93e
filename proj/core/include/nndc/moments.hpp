#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "nndc/random.hpp"

namespace nndc {

/// Absolute moments of a per-coordinate value distribution V:
///   m_p       = E|V|^p          m_2p       = E|V|^2p
///   mprime_p  = E|V1 - V2|^p    mprime_2p  = E|V1 - V2|^2p
/// with V1, V2 independent copies of V.
struct MomentSet {
  double m_p = 0.0;
  double m_2p = 0.0;
  double mprime_p = 0.0;
  double mprime_2p = 0.0;
};

/// Draws one value of V from the supplied stream.
using ScalarSampler = std::function<double(RandomStream&)>;

/// U(0, 1), the only distribution with a closed form below.
ScalarSampler uniform01_sampler();

/// Closed-form moments of U(0, 1):
///   m_p = 1/(p+1),  mprime_p = 2/(p+1) - 2/(p+2),  2p entries at 2p.
MomentSet uniform_moments(double p);

struct MomentEstimate {
  MomentSet moments;
  /// Every draw was identical; the difference moments are exactly zero.
  bool degenerate = false;
};

/// Monte Carlo estimate from `samples` triples (V, V1, V2). The p and 2p
/// moments share the same draws. Deterministic in (sampler, p, samples, seed)
/// and independent of the thread count. Requires samples >= 1000.
MomentEstimate mc_moments(const ScalarSampler& sampler, double p, std::size_t samples,
                          std::uint64_t seed);

}  // namespace nndc
