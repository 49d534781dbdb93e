#include "nndc/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nndc/error.hpp"
#include "nndc/parallel.hpp"

namespace nndc {

namespace {

void check_p(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw InvalidArgument("moment order p must be positive, got " + std::to_string(p));
  }
}

// Block size is fixed so the reduction order never depends on threads.
constexpr std::size_t kBlock = 4096;

struct BlockSums {
  double m_p = 0, m_2p = 0, mp_p = 0, mp_2p = 0;
  double first = 0;
  bool all_equal = true;
};

}  // namespace

ScalarSampler uniform01_sampler() {
  return [](RandomStream& rng) { return rng.uniform(); };
}

MomentSet uniform_moments(double p) {
  check_p(p);
  const auto m = [](double q) { return 1.0 / (q + 1.0); };
  const auto mprime = [](double q) { return 2.0 / (q + 1.0) - 2.0 / (q + 2.0); };
  return {m(p), m(2.0 * p), mprime(p), mprime(2.0 * p)};
}

MomentEstimate mc_moments(const ScalarSampler& sampler, double p, std::size_t samples,
                          std::uint64_t seed) {
  check_p(p);
  if (samples < 1000) {
    throw InvalidArgument("mc_moments needs at least 1000 samples, got " +
                          std::to_string(samples));
  }
  if (!sampler) throw InvalidArgument("mc_moments: empty sampler");

  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<BlockSums> partial(blocks);
  parallel_for(0, blocks, [&](std::size_t b) {
    RandomStream rng(seed, 0x6d6f6d656e7473ULL, b);
    BlockSums s;
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(samples, lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = sampler(rng);
      const double v1 = sampler(rng);
      const double v2 = sampler(rng);
      if (i == lo) s.first = v;
      s.all_equal = s.all_equal && v == s.first && v1 == s.first && v2 == s.first;
      const double a = std::pow(std::fabs(v), p);
      const double b2 = std::pow(std::fabs(v1 - v2), p);
      s.m_p += a;
      s.m_2p += a * a;
      s.mp_p += b2;
      s.mp_2p += b2 * b2;
    }
    partial[b] = s;
  });

  CompensatedSum m_p, m_2p, mp_p, mp_2p;
  bool degenerate = true;
  for (const auto& s : partial) {
    m_p.add(s.m_p);
    m_2p.add(s.m_2p);
    mp_p.add(s.mp_p);
    mp_2p.add(s.mp_2p);
    degenerate = degenerate && s.all_equal && s.first == partial.front().first;
  }
  const double inv = 1.0 / static_cast<double>(samples);
  MomentEstimate out;
  out.moments = {m_p.value() * inv, m_2p.value() * inv, mp_p.value() * inv, mp_2p.value() * inv};
  out.degenerate = degenerate;
  return out;
}

}  // namespace nndc
