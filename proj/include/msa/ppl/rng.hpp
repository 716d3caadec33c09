#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace msa::ppl {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives an independent stream key from a base seed and a stream index.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view tag) {
  return derive_stream(seed, fnv1a64(tag));
}

// Seedable, splittable generator: mt19937_64 engine with hand-rolled
// distribution transforms so that identical seeds give identical draws on
// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t stream_key) : engine_(stream_key) {}

  static Rng for_attempt(std::uint64_t seed, std::uint64_t attempt_index) {
    return Rng(derive_stream(seed, attempt_index));
  }

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform01() {
    ++draw_count_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // Box-Muller; always consumes exactly two uniforms.
  double gaussian(double mu, double sigma) {
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mu + sigma * r * std::cos(2.0 * M_PI * u2);
  }

  // Marsaglia-Tsang for shape >= 1; boost transform below 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      double u = uniform01();
      while (u <= 0.0) u = uniform01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = gaussian(0.0, 1.0);
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
  }

  std::uint64_t draw_count() const { return draw_count_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draw_count_ = 0;
};

// Deterministic Fisher-Yates shuffle (std::shuffle is implementation-defined).
template <typename T>
void deterministic_shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i));
    if (j >= i) j = i - 1;
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace msa::ppl
