#pragma once

#include <cstdint>

namespace segsketch::analysis {

// Full: every peer address hashed whole. Host: only the suffix below the
// inferred prefix is hashed, so outside peers leak in only when their first
// floor(l/G) segment hashes all collide with the subnet's.
enum class Strategy { Full, Host };

const char* to_string(Strategy s) noexcept;

// N: distinct peers of the host, C: distinct peers inside the subnet,
// l: true subnet prefix length, G: segment width.
struct BoundInputs {
  double N = 0;
  double C = 0;
  int l = 16;
  int G = 4;

  int depth_r() const noexcept { return l / G; }
  double outside() const noexcept { return N - C; }
  void validate() const;
};

struct Table1Variables {
  double epsilon;
  double M;
  double U;
};

struct Bound {
  double raw;      // epsilon^-1 * M[1 - (1 - 1/M)^U]
  double clamped;  // min(raw, 1)
};

struct Gap {
  double exact;   // E_full - E_host evaluated exactly
  double taylor;  // second-order truncation
};

// M[1 - (1 - 1/M)^R], evaluated through log1p/expm1.
double expected_set_bits(double M, double R);

// R - expected_set_bits(M, R) without cancellation, the Linear Counting
// expected shortfall.
double expected_shortfall(double M, double R);

Table1Variables table1_variables(Strategy s, const BoundInputs& in);

// Throws NonPositiveEpsilon when epsilon <= 0.
Bound theorem1_bound(Strategy s, const BoundInputs& in);

// (1/2)^floor(l/G).
double misclassification_prob(int l, int G);

// Gap for Q = N - C outside peers at depth_r = floor(l/G).
Gap theorem2_gap(double Q, int depth_r, int G);
inline Gap theorem2_gap(const BoundInputs& in) { return theorem2_gap(in.outside(), in.depth_r(), in.G); }

struct SimulationParams {
  std::uint32_t bitmap_bits = 4096;
  int trials = 500;
  std::uint64_t seed = 1;
  bool level_salt = false;
};

// Monte-Carlo mean of |C_hat - C| / C. Each trial draws a random /l subnet,
// C distinct addresses in it and N - C distinct addresses outside it.
// Requires at least 100 trials.
double simulate_are(Strategy s, const BoundInputs& in, const SimulationParams& params);

}  // namespace segsketch::analysis
