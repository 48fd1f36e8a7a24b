#include "simplexmc/rng.hpp"

#include <cmath>

namespace simplexmc {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}

Rng Rng::stream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) {
  std::uint64_t s = mix(seed + kGamma);
  s = mix(s ^ (domain * kGamma + 0x7f4a7c15ULL));
  s = mix(s ^ (index * kGamma + 0x165667b19e3779f9ULL));
  return Rng(s);
}

std::uint64_t Rng::next() {
  state_ += kGamma;
  return mix(state_);
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double Rng::exponential(double rate) {
  // -log(1-u) with u in (0,1): strictly positive, so waiting times never
  // collapse onto the present instant.
  return -std::log1p(-uniform_pos()) / rate;
}

bool Rng::bernoulli(double p) {
  return uniform() < p;
}

int Rng::categorical(const double* w, int k) {
  double u = uniform();
  double acc = 0.0;
  for (int i = 0; i + 1 < k; ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  return k - 1;
}

}
