#include "glt/rng.hpp"

#include <numeric>

namespace glt {

double Rng::uniform() {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x;
  do x = u(eng_);
  while (x <= 0.0);
  return x;
}

double Rng::normal() { return normal_(eng_); }

double Rng::gamma(double shape, double scale) {
  std::gamma_distribution<double> g(shape, scale);
  return g(eng_);
}

double Rng::inv_gamma(double shape, double scale) {
  double g;
  do g = gamma(shape, 1.0);
  while (g <= 0.0);
  return scale / g;
}

double Rng::beta(double a, double b) {
  // Small shapes underflow the Gamma route; fall back to logs then.
  if (a < 1.0 && b < 1.0) {
    const double la = std::log(uniform()) / a + std::log(gamma(a + 1.0, 1.0));
    const double lb = std::log(uniform()) / b + std::log(gamma(b + 1.0, 1.0));
    const double mx = std::max(la, lb);
    const double x = std::exp(la - mx) / (std::exp(la - mx) + std::exp(lb - mx));
    return std::clamp(x, 1e-300, 1.0 - 1e-16);
  }
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return std::clamp(x / (x + y), 1e-300, 1.0 - 1e-16);
}

int Rng::uniform_int(int n) {
  std::uniform_int_distribution<int> u(0, n - 1);
  return u(eng_);
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[uniform_int(i + 1)]);
  return p;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace glt
