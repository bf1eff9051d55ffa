// Ratio-of-uniforms sampler of Hormann and Leydold (2014) on the two-parameter
// form y^{lambda-1} exp(-omega (y + 1/y) / 2), rescaled by sqrt(b/a).

#include "glt/gig.hpp"

#include "glt/errors.hpp"

#include <cmath>
#include <numbers>

namespace glt {
namespace {

double gig_mode(double lambda, double omega) {
  if (lambda >= 1.0) return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega) + (lambda - 1.0)) / omega;
  return omega / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega) + (1.0 - lambda));
}

double rou_noshift(double lambda, double omega, Rng& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double ym = ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
  while (true) {
    const double u = um * rng.uniform();
    const double v = rng.uniform();
    const double x = u / v;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

double rou_shift(double lambda, double omega, Rng& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  // Cubic for the bounding rectangle.
  const double a = -(2.0 * (lambda + 1.0) / omega + xm);
  const double b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double fi = std::acos(-q / (2.0 * std::sqrt(-(p * p * p) / 27.0)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
  const double y2 = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * std::numbers::pi) - a / 3.0;
  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);
  while (true) {
    const double u = uminus + rng.uniform() * (uplus - uminus);
    const double v = rng.uniform();
    const double x = u / v + xm;
    if (x > 0.0 && std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Non-T-concave region 0 <= lambda < 1, small omega.
double rejection_small(double lambda, double omega, Rng& rng) {
  const double xm = gig_mode(lambda, omega);
  const double x0 = omega / (1.0 - lambda);
  const double k0 = std::exp((lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
  double A[3];
  double k1, k2;
  A[0] = k0 * x0;
  if (x0 >= 2.0 / omega) {
    k1 = 0.0;
    A[1] = 0.0;
    k2 = std::pow(x0, lambda - 1.0);
    A[2] = k2 * 2.0 * std::exp(-omega * x0 / 2.0) / omega;
  } else {
    k1 = std::exp(-omega);
    A[1] = lambda == 0.0 ? k1 * std::log(2.0 / (omega * omega))
                         : k1 / lambda * (std::pow(2.0 / omega, lambda) - std::pow(x0, lambda));
    k2 = std::pow(2.0 / omega, lambda - 1.0);
    A[2] = k2 * 2.0 * std::exp(-1.0) / omega;
  }
  const double Atot = A[0] + A[1] + A[2];
  while (true) {
    double v = Atot * rng.uniform();
    double x, hx;
    if (v <= A[0]) {
      x = x0 * v / A[0];
      hx = k0;
    } else if ((v -= A[0]) <= A[1]) {
      if (lambda == 0.0) {
        x = omega * std::exp(std::exp(omega) * v);
        hx = k1 / x;
      } else {
        x = std::pow(std::pow(x0, lambda) + lambda / k1 * v, 1.0 / lambda);
        hx = k1 * std::pow(x, lambda - 1.0);
      }
    } else {
      v -= A[1];
      const double lo = x0 > 2.0 / omega ? x0 : 2.0 / omega;
      x = -2.0 / omega * std::log(std::exp(-omega / 2.0 * lo) - omega / (2.0 * k2) * v);
      hx = k2 * std::exp(-omega / 2.0 * x);
    }
    const double u = rng.uniform() * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - omega / 2.0 * (x + 1.0 / x)) return x;
  }
}

}  // namespace

double sample_gig(double p, double a, double b, Rng& rng) {
  if (!(a >= 0) || !(b >= 0) || !std::isfinite(p) || (a == 0 && b == 0))
    throw DomainError("GIG requires a, b >= 0, not both zero");
  if (b == 0) {
    if (!(p > 0)) throw DomainError("GIG with b = 0 requires p > 0");
    return rng.gamma(p, 2.0 / a);
  }
  if (a == 0) {
    if (!(p < 0)) throw DomainError("GIG with a = 0 requires p < 0");
    return rng.inv_gamma(-p, b / 2.0);
  }
  const double lambda = std::abs(p);
  const double omega = std::sqrt(a * b);
  const double alpha = std::sqrt(b / a);
  double x;
  if (lambda > 2.0 || omega > 3.0)
    x = rou_shift(lambda, omega, rng);
  else if (lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2)
    x = rou_noshift(lambda, omega, rng);
  else
    x = rejection_small(lambda, omega, rng);
  return p < 0 ? alpha / x : alpha * x;
}

double gig_log_kernel(double y, double p, double a, double b) {
  return (p - 1.0) * std::log(y) - 0.5 * a * y - 0.5 * b / y;
}

double gig_mean(double p, double a, double b) {
  const double w = std::sqrt(a * b);
  return std::sqrt(b / a) * std::cyl_bessel_k(std::abs(p + 1.0), w) / std::cyl_bessel_k(std::abs(p), w);
}

}  // namespace glt
