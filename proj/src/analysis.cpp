#include "segsketch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "segsketch/bitmap.hpp"
#include "segsketch/errors.hpp"
#include "segsketch/hash.hpp"
#include "segsketch/prefix_inference.hpp"

namespace segsketch::analysis {

namespace {

// 1 + log1p(-u)/u = -(u/2 + u^2/3 + u^3/4 + ...)
double one_plus_log1p_over(double u) {
  if (u < 1e-3) {
    double term = u;
    double sum = 0.0;
    for (int k = 2; k <= 8; ++k) {
      sum += term / k;
      term *= u;
    }
    return -sum;
  }
  return 1.0 + std::log1p(-u) / u;
}

// expm1(y) - y = y^2/2 + y^3/6 + ...
double expm1_minus_identity(double y) {
  if (std::fabs(y) < 1e-2) {
    double term = y * y / 2.0;
    double sum = 0.0;
    for (int k = 3; k <= 12; ++k) {
      sum += term;
      term *= y / k;
    }
    return sum;
  }
  return std::expm1(y) - y;
}

// Draws `count` distinct values from `draw()`.
template <class Draw>
std::vector<std::uint32_t> distinct_sample(std::size_t count, Draw&& draw) {
  std::vector<std::uint32_t> out;
  out.reserve(count + count / 8 + 8);
  while (out.size() < count) {
    while (out.size() < count) out.push_back(draw());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

}  // namespace

const char* to_string(Strategy s) noexcept { return s == Strategy::Full ? "full" : "host"; }

void BoundInputs::validate() const {
  if (!(C > 0) || C > N) throw InvalidConfig("bound inputs need 0 < C <= N");
  if (G != 2 && G != 4 && G != 6 && G != 8) throw InvalidConfig("G must be one of 2, 4, 6, 8");
  if (l <= 0 || l >= 32) throw InvalidConfig("l must lie in (0, 32)");
  if (depth_r() * G >= 32) throw InvalidConfig("floor(l/G)*G must be below 32");
}

double expected_set_bits(double M, double R) {
  if (R <= 0) return 0.0;
  if (M <= 1) return 1.0;
  return -M * std::expm1(R * std::log1p(-1.0 / M));
}

double expected_shortfall(double M, double R) {
  if (R <= 0) return 0.0;
  if (R == 1.0) return 0.0;
  if (M <= 1) return R - 1.0;
  const double u = 1.0 / M;
  const double y = R * std::log1p(-u);
  return R * one_plus_log1p_over(u) + M * expm1_minus_identity(y);
}

Table1Variables table1_variables(Strategy s, const BoundInputs& in) {
  in.validate();
  if (s == Strategy::Full) {
    const double M = std::ldexp(1.0, 32);
    return {expected_shortfall(M, in.N), M, in.outside()};
  }
  const int r = in.depth_r();
  const double M = std::ldexp(1.0, 32 - r * in.G);
  const double U = std::ldexp(in.outside(), -r);
  return {expected_shortfall(M, in.C + U), M, U};
}

Bound theorem1_bound(Strategy s, const BoundInputs& in) {
  const Table1Variables v = table1_variables(s, in);
  if (!(v.epsilon > 0)) {
    throw NonPositiveEpsilon("expected Linear Counting error is not positive (epsilon = " +
                             std::to_string(v.epsilon) + ")");
  }
  const double raw = expected_set_bits(v.M, v.U) / v.epsilon;
  return {raw, std::min(raw, 1.0)};
}

double misclassification_prob(int l, int G) {
  if (G <= 0 || l < 0) throw InvalidConfig("misclassification needs l >= 0 and G > 0");
  return std::ldexp(1.0, -(l / G));
}

Gap theorem2_gap(double Q, int depth_r, int G) {
  if (Q < 0) throw InvalidConfig("Q must be non-negative");
  if (depth_r < 1 || depth_r * G >= 32) throw InvalidConfig("gap needs depth_r >= 1 and depth_r*G < 32");
  const int r = depth_r;
  const int rg = r * G;
  const double exact = expected_set_bits(std::ldexp(1.0, 32), Q) -
                       expected_set_bits(std::ldexp(1.0, 32 - rg), std::ldexp(Q, -r));
  const double taylor = Q * Q * std::ldexp(1.0, -33) * (std::ldexp(1.0, rg - 2 * r) - 1.0) +
                        Q * (1.0 - std::ldexp(1.0, -r) - std::ldexp(1.0, rg - r - 33) + std::ldexp(1.0, -33));
  return {exact, taylor};
}

double simulate_are(Strategy s, const BoundInputs& in, const SimulationParams& params) {
  in.validate();
  if (params.trials < 100) throw InvalidConfig("simulation needs at least 100 trials");
  const auto C = static_cast<std::size_t>(in.C);
  const auto Q = static_cast<std::size_t>(in.N - in.C);
  const int suffix_bits = 32 - in.l;
  if (static_cast<double>(C) > std::ldexp(1.0, suffix_bits)) throw InvalidConfig("C exceeds the subnet size");

  const std::uint32_t prefix_mask = ~std::uint32_t{0} << suffix_bits;
  const int r = in.depth_r();
  const SegmentConfig seg = SegmentConfig::with_width(in.G, 32, params.level_salt);

  double total = 0.0;
  for (int t = 0; t < params.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(params.seed, static_cast<std::uint64_t>(t));
    std::mt19937_64 rng(trial_seed);
    const std::uint32_t base = static_cast<std::uint32_t>(rng()) & prefix_mask;

    auto inside = distinct_sample(C, [&] {
      return base | (static_cast<std::uint32_t>(rng()) & ~prefix_mask);
    });
    auto outside = distinct_sample(Q, [&] {
      for (;;) {
        const auto a = static_cast<std::uint32_t>(rng());
        if ((a & prefix_mask) != base) return a;
      }
    });

    Bitmap bitmap(params.bitmap_bits);
    const std::uint64_t bitmap_seed = derive_seed(trial_seed, 1);
    if (s == Strategy::Full) {
      for (auto a : inside) bitmap.insert(host_suffix(a, 0).key(), bitmap_seed);
      for (auto a : outside) bitmap.insert(host_suffix(a, 0).key(), bitmap_seed);
    } else {
      const SegmentHasher hasher(seg, derive_seed(trial_seed, 2));
      const int p = r * in.G;
      for (auto a : inside) bitmap.insert(host_suffix(a, p).key(), bitmap_seed);
      for (auto a : outside) {
        bool match = true;
        for (int d = 1; d <= r && match; ++d) {
          match = hasher.bit(d, segment_value(a, d, in.G)) == hasher.bit(d, segment_value(base, d, in.G));
        }
        if (match) bitmap.insert(host_suffix(a, p).key(), bitmap_seed);
      }
    }
    total += std::fabs(bitmap.estimate() - in.C) / in.C;
  }
  return total / params.trials;
}

}  // namespace segsketch::analysis
