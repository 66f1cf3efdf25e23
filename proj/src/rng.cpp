#include "refill/rng.hpp"

#include "refill/errors.hpp"

namespace refill {

std::uint64_t Rng::next_u64() {
  // splitmix64 (Steele, Lea, Flood 2014); public domain reference constants.
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::next_below(std::uint64_t n) {
  if (n == 0) raise(Errc::invalid_argument, "next_below(0)");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % n;
}

double Rng::next_unit() {
  // 53 high bits -> [0,1)
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV offset basis
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x00000100000001b3ULL;  // FNV prime
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(base_seed >> (8 * i)));
  for (char c : label) mix(static_cast<unsigned char>(c));
  // One splitmix scramble so nearby seeds do not produce nearby streams.
  Rng r(h);
  return r.next_u64();
}

}  // namespace refill
