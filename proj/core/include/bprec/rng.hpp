#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace bprec {

// Reproducible random number generation.
//
// The toolkit promises that simulation output depends only on
// (master_seed, replication_index), never on scheduling, platform or
// library version.  Everything here is therefore pinned: the engine is
// xoshiro256++, per-replication streams are derived with the splitmix64
// finalizer, normal variates use the inverse-CDF method with Wichura's
// AS241 rational approximation, and the discrete samplers are the
// classic exact algorithms (BINV/BTPE for the binomial, inversion/PTRS
// for the Poisson, Marsaglia-Tsang for the gamma).

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer (Stafford mix13 variant used by splitmix64).
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// AS241 (Wichura 1988), the PPND16 double-precision branch: rational
// approximation of the standard normal quantile, |relative error|
// below ~1e-15 over (0,1).  Used only by the samplers; the library-level
// phi_quantile keeps its own bisection/Newton contract.
inline double ppnd16(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

}  // namespace detail

// Derives the seed for replication `rep` from the master seed.
// seed_rep = mix64(master + golden * (rep + 1)); the streams are as
// independent as the splitmix64 sequence itself.
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t rep) {
  return detail::mix64(master_seed + detail::kGolden * (rep + 1));
}

// xoshiro256++ engine seeded through a splitmix64 expansion.
class Rng {
public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s += detail::kGolden;
      word = detail::mix64(s);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1); safe to pass to a quantile.
  double next_double_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal, inverse-CDF method (AS241).
  double next_normal() { return detail::ppnd16(next_double_open()); }

private:
  std::uint64_t state_[4];
};

namespace detail {

// Binomial by inversion ("BINV"); expected cost O(n*p), used for small
// n*min(p,1-p).  p must be in (0, 1) and should be <= 0.5.
inline std::uint64_t binomial_binv(Rng& rng, std::uint64_t n, double p) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = static_cast<double>(n + 1) * s;
  const double qn = std::exp(static_cast<double>(n) * std::log(q));
  const double bound =
      std::min<double>(static_cast<double>(n),
                       static_cast<double>(n) * p +
                           10.0 * std::sqrt(static_cast<double>(n) * p * q + 1.0));
  while (true) {
    double u = rng.next_double();
    double px = qn;
    std::uint64_t x = 0;
    bool restart = false;
    while (u > px) {
      ++x;
      if (static_cast<double>(x) > bound) {
        restart = true;
        break;
      }
      u -= px;
      px *= (a / static_cast<double>(x) - s);
    }
    if (!restart) return x;
  }
}

// Binomial by the BTPE rejection algorithm (Kachitvichyanukul &
// Schmeiser 1988) for n*min(p,1-p) >= 30.  Exact; expected O(1).
// p must be in (0, 1) and <= 0.5.
inline std::uint64_t binomial_btpe(Rng& rng, std::uint64_t n, double p) {
  const double r = p;
  const double q = 1.0 - r;
  const double dn = static_cast<double>(n);
  const double fm = dn * r + r;
  const std::int64_t m = static_cast<std::int64_t>(std::floor(fm));
  const double nrq = dn * r * q;
  const double p1 = std::floor(2.195 * std::sqrt(nrq) - 4.6 * q) + 0.5;
  const double xm = static_cast<double>(m) + 0.5;
  const double xl = xm - p1;
  const double xr = xm + p1;
  const double c = 0.134 + 20.5 / (15.3 + static_cast<double>(m));
  double al = (fm - xl) / (fm - xl * r);
  const double laml = al * (1.0 + 0.5 * al);
  al = (xr - fm) / (xr * q);
  const double lamr = al * (1.0 + 0.5 * al);
  const double p2 = p1 * (1.0 + 2.0 * c);
  const double p3 = p2 + c / laml;
  const double p4 = p3 + c / lamr;

  while (true) {
    const double u = rng.next_double() * p4;
    double v = rng.next_double();
    std::int64_t y;
    bool accept_direct = false;

    if (u <= p1) {
      y = static_cast<std::int64_t>(std::floor(xm - p1 * v + u));
      accept_direct = true;
    } else if (u <= p2) {
      const double x = xl + (u - p1) / c;
      v = v * c + 1.0 - std::fabs(static_cast<double>(m) - x + 0.5) / p1;
      if (v > 1.0) continue;
      y = static_cast<std::int64_t>(std::floor(x));
    } else if (u <= p3) {
      y = static_cast<std::int64_t>(std::floor(xl + std::log(v) / laml));
      if (y < 0) continue;
      v = v * (u - p2) * laml;
    } else {
      y = static_cast<std::int64_t>(std::floor(xr - std::log(v) / lamr));
      if (y > static_cast<std::int64_t>(n)) continue;
      v = v * (u - p3) * lamr;
    }

    if (!accept_direct) {
      const double k = std::fabs(static_cast<double>(y - m));
      if (k <= 20.0 || k >= 0.5 * nrq - 1.0) {
        // Explicit f(y)/f(m) by the pmf recursion.
        const double s = r / q;
        const double aa = s * (dn + 1.0);
        double f = 1.0;
        if (m < y) {
          for (std::int64_t i = m + 1; i <= y; ++i)
            f *= (aa / static_cast<double>(i) - s);
        } else if (m > y) {
          for (std::int64_t i = y + 1; i <= m; ++i)
            f /= (aa / static_cast<double>(i) - s);
        }
        if (v > f) continue;
      } else {
        // Squeeze, then Stirling-series comparison.
        const double rho =
            (k / nrq) * ((k * (k / 3.0 + 0.625) + 0.1666666666666666) / nrq + 0.5);
        const double t = -0.5 * k * k / nrq;
        const double big_a = std::log(v);
        if (big_a < t - rho) {
          // accepted by squeeze
        } else if (big_a > t + rho) {
          continue;
        } else {
          const double x1 = static_cast<double>(y + 1);
          const double f1 = static_cast<double>(m + 1);
          const double z = dn + 1.0 - static_cast<double>(m);
          const double w = dn - static_cast<double>(y) + 1.0;
          const double z2 = z * z;
          const double x2 = x1 * x1;
          const double f2 = f1 * f1;
          const double w2 = w * w;
          const double bound =
              xm * std::log(f1 / x1) +
              (dn - static_cast<double>(m) + 0.5) * std::log(z / w) +
              static_cast<double>(y - m) * std::log(w * r / (x1 * q)) +
              (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / f2) / f2) / f2) / f2) /
                  f1 / 166320.0 +
              (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / z2) / z2) / z2) / z2) /
                  z / 166320.0 +
              (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / x2) / x2) / x2) / x2) /
                  x1 / 166320.0 +
              (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / w2) / w2) / w2) / w2) /
                  w / 166320.0;
          if (big_a > bound) continue;
        }
      }
    }
    return static_cast<std::uint64_t>(y);
  }
}

// Poisson by unnormalized inversion (product of uniforms); O(mu).
inline std::uint64_t poisson_small(Rng& rng, double mu) {
  const double limit = std::exp(-mu);
  double prod = 1.0;
  std::uint64_t x = 0;
  while (true) {
    prod *= rng.next_double();
    if (prod <= limit) return x;
    ++x;
  }
}

// Poisson by Hormann's transformed rejection with squeeze (PTRS);
// exact for mu >= 10, expected O(1) for any size of mu.
inline std::uint64_t poisson_ptrs(Rng& rng, double mu) {
  const double log_mu = std::log(mu);
  const double b = 0.931 + 2.53 * std::sqrt(mu);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  while (true) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_double();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        -mu + k * log_mu - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(kf);
    }
  }
}

}  // namespace detail

// Exact Binomial(n, p) sample.
inline std::uint64_t sample_binomial(Rng& rng, std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("sample_binomial: p outside [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const double r = std::min(p, 1.0 - p);
  const std::uint64_t x = (static_cast<double>(n) * r >= 30.0)
                              ? detail::binomial_btpe(rng, n, r)
                              : detail::binomial_binv(rng, n, r);
  return (p > 0.5) ? n - x : x;
}

// Exact Poisson(mu) sample.
inline std::uint64_t sample_poisson(Rng& rng, double mu) {
  if (!(mu >= 0.0)) throw std::domain_error("sample_poisson: mu < 0");
  if (mu == 0.0) return 0;
  return (mu < 10.0) ? detail::poisson_small(rng, mu)
                     : detail::poisson_ptrs(rng, mu);
}

// Gamma(shape, scale 1) by Marsaglia-Tsang; shape boost below 1.
inline double sample_gamma(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw std::domain_error("sample_gamma: shape <= 0");
  if (shape < 1.0) {
    const double u = rng.next_double_open();
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x;
    double v;
    do {
      x = rng.next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_double_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Exact NegativeBinomial(r, p): number of failures before the r-th
// success with success probability p, via the gamma-Poisson mixture.
inline std::uint64_t sample_negative_binomial(Rng& rng, std::uint64_t r, double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("sample_negative_binomial: p outside (0,1]");
  if (p == 1.0) return 0;
  const double y = sample_gamma(rng, static_cast<double>(r)) * (1.0 - p) / p;
  return sample_poisson(rng, y);
}

}  // namespace bprec
