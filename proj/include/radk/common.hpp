// Shared utilities: portable hashing, seeded RNG streams, parallel loops.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <cstring>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace radk {

inline constexpr const char* kToolVersion = "radk 0.1.0";

// ---------------------------------------------------------------------------
// Hashing. FNV-1a over bytes; used for scenario fingerprints and config
// hashes. Doubles are hashed through their IEEE-754 bit pattern so a
// fingerprint is stable across runs of the same build.
// ---------------------------------------------------------------------------

class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= static_cast<std::uint64_t>(p[i]);
      state_ *= 0x100000001b3ull;
    }
  }
  void add(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    add_bytes(&bits, sizeof(bits));
  }
  void add(std::uint64_t v) { add_bytes(&v, sizeof(v)); }
  void add(const std::string& s) {
    add(static_cast<std::uint64_t>(s.size()));
    add_bytes(s.data(), s.size());
  }
  void add(const std::vector<double>& v) {
    add(static_cast<std::uint64_t>(v.size()));
    for (double x : v) add(x);
  }
  std::uint64_t value() const { return state_; }
  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t v = state_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = digits[v & 0xf];
      v >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// ---------------------------------------------------------------------------
// RNG. xoshiro256** seeded through splitmix64. Distribution helpers are
// hand-rolled (std:: distributions are implementation-defined, which would
// break byte-identical reports across standard libraries).
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = x = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return n == 0 ? 0 : next_u64() % n;
  }

  // Geometric on {1, 2, ...} with success probability p (number of trials
  // up to and including the first success). p = 1 gives the constant 1.
  std::uint64_t geometric_from_one(double p) {
    if (p >= 1.0) return 1;
    if (p <= 0.0) throw std::invalid_argument("geometric: p must be > 0");
    double u = uniform();
    double g = std::floor(std::log1p(-u) / std::log1p(-p));
    return static_cast<std::uint64_t>(g) + 1;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4] = {};
};

// Derives an independent stream for a named subcomponent of a seeded
// process, e.g. (seed, scenario, unit id). Streams are stable across
// resource-set augmentation, which keeps baseline realizations fixed when
// new units are added.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index,
                                   const std::string& tag) {
  Fnv1a h;
  h.add(seed);
  h.add(index);
  h.add(tag);
  return splitmix64(h.value());
}

// ---------------------------------------------------------------------------
// Parallel loop over [0, n) with a fixed worker count. Workers pull strided
// indices so results land in caller-owned slots; no locks, deterministic
// output independent of scheduling.
// ---------------------------------------------------------------------------

inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline unsigned default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace radk
