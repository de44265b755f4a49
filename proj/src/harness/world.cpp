#include "crest/harness/world.hpp"

#include <cmath>
#include <stdexcept>

namespace crest::harness {

std::vector<double> SyntheticWorld::variance() const {
  std::vector<double> v;
  v.reserve(theta.size());
  for (double t : theta) v.push_back(1.0 / (2.0 * t));
  return v;
}

std::vector<double> SyntheticWorld::expected_sq_distance() const {
  auto v = variance();
  for (double& x : v) x *= static_cast<double>(dim());
  return v;
}

embed::EmbeddingSet SyntheticWorld::draw(Rng& rng) const {
  embed::EmbeddingSet set("oracle");
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double sd = std::sqrt(1.0 / (2.0 * theta[i]));
    std::vector<double> v(truth);
    for (double& x : v) x += sd * rng.normal();
    set.add("w" + std::to_string(i), std::move(v));
  }
  return set;
}

WorldSample sample_world(std::size_t n, std::size_t m, const std::vector<double>& theta, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("sample_world: n must be >= 3");
  if (m < 1) throw std::invalid_argument("sample_world: m must be >= 1");
  if (theta.size() != n) throw std::invalid_argument("sample_world: theta must have n entries");
  for (double t : theta) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("sample_world: theta must be positive and finite");
  }
  Rng rng(seed);
  SyntheticWorld world;
  world.theta = theta;
  world.seed = seed;
  world.truth.resize(m);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : world.truth) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : world.truth) x /= norm;
  auto embeddings = world.draw(rng);
  return WorldSample{std::move(world), std::move(embeddings), std::move(rng)};
}

std::vector<double> log_uniform_theta(std::size_t n, double lo, double hi, Rng& rng) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_uniform_theta: need 0 < lo <= hi");
  std::vector<double> theta(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (double& t : theta) t = std::exp(rng.uniform(a, b));
  return theta;
}

}  // namespace crest::harness
