#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace langlab {

uint64_t splitmix64(uint64_t x);
uint64_t fnv1a(std::string_view s);

// Deterministic RNG facade. All sampling goes through hand-rolled
// transforms of mt19937_64 output, so results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

  uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller; consumes exactly two draws
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // [0, n)
  int uniform_int(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<unsigned __int128>(n)) >>
                            64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      int j = uniform_int(i + 1);
      std::swap(v[i], v[static_cast<size_t>(j)]);
    }
  }

  // Independent stream derived from this RNG's seed.
  Rng fork(uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL)));
  }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
};

std::string ascii_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

// Split UTF-8 text into code points; invalid bytes pass through one by one.
std::vector<std::string> utf8_chars(std::string_view s);

// Shortest decimal form that round-trips through strtod.
std::string format_double(double v);
// Fixed number of significant digits (%.Ng).
std::string format_sig(double v, int significant);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

}  // namespace langlab
