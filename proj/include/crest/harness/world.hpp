#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crest/embed.hpp"
#include "crest/rng.hpp"

namespace crest::harness {

// Ground truth for the exponential-family model over embeddings. The density
// factorizes over documents and coordinates, so each draw of document i is
// truth + N(0, 1/(2 theta_i)) independently per coordinate.
struct SyntheticWorld {
  std::vector<double> truth;
  std::vector<double> theta;
  std::uint64_t seed = 0;

  std::size_t dim() const { return truth.size(); }
  std::size_t documents() const { return theta.size(); }
  // Per-coordinate noise variance 1/(2 theta_i).
  std::vector<double> variance() const;
  // E||x_i - truth||^2 = m / (2 theta_i).
  std::vector<double> expected_sq_distance() const;

  // One independent draw of all n document embeddings, ids "w0".."w{n-1}".
  embed::EmbeddingSet draw(Rng& rng) const;
};

struct WorldSample {
  SyntheticWorld world;
  embed::EmbeddingSet embeddings;
  Rng rng;  // positioned after the first draw, for further draws
};

// truth is uniform on the unit sphere; throws std::invalid_argument for
// n < 3, m < 1, or a non-positive theta.
WorldSample sample_world(std::size_t n, std::size_t m, const std::vector<double>& theta, std::uint64_t seed);

std::vector<double> log_uniform_theta(std::size_t n, double lo, double hi, Rng& rng);

}  // namespace crest::harness
