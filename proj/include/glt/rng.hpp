#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace glt {

// Chain-private random stream. Not thread-safe; give each chain its own.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform();  // open interval (0,1)
  double normal();
  double gamma(double shape, double scale);
  double inv_gamma(double shape, double scale);  // density ∝ x^{-shape-1} exp(-scale/x)
  double beta(double a, double b);
  bool bernoulli(double p) { return uniform() < p; }
  int uniform_int(int n);  // {0, ..., n-1}
  std::vector<int> permutation(int n);

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Seed for chain `index` derived from a base seed; distinct and reproducible.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace glt
