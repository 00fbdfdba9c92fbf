#pragma once

#include <algorithm>
#include <random>
#include <set>

#include "dynauc/model.hpp"

namespace testutil {

using namespace dynauc;

inline Rational R(long a, long b = 1) { return Rational(a, b); }

inline Distribution sample_dist() { return Distribution({{R(2), R(1, 2)}, {R(4), R(1, 4)}, {R(0), R(1, 4)}}); }

inline std::vector<Rational> random_weights(std::mt19937& rng, size_t n) {
  std::uniform_int_distribution<long> w(1, 9);
  std::vector<long> ws(n);
  long total = 0;
  for (auto& x : ws) total += (x = w(rng));
  std::vector<Rational> out;
  for (auto x : ws) out.push_back(R(x, total));
  return out;
}

// Distinct integer values drawn from `pool`.
inline Distribution random_dist_from(std::mt19937& rng, std::vector<Rational> pool, int max_atoms) {
  std::shuffle(pool.begin(), pool.end(), rng);
  int m = std::uniform_int_distribution<int>(1, std::min<int>(max_atoms, int(pool.size())))(rng);
  auto w = random_weights(rng, size_t(m));
  std::vector<Distribution::Atom> atoms;
  for (int k = 0; k < m; ++k) atoms.emplace_back(pool[k], w[k]);
  return Distribution(std::move(atoms));
}

inline Distribution random_dist(std::mt19937& rng, int max_atoms, int max_value) {
  std::vector<Rational> pool;
  for (int v = 0; v <= max_value; ++v) pool.push_back(R(v));
  return random_dist_from(rng, pool, max_atoms);
}

inline std::vector<Rational> distinct_values(std::mt19937& rng, size_t n, int max_value) {
  std::vector<Rational> pool;
  for (int v = 0; v <= max_value; ++v) pool.push_back(R(v));
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

inline TwoDayInstance random_instance(std::mt19937& rng, size_t types, int max_support, int max_value) {
  TwoDayInstance inst;
  auto v1 = distinct_values(rng, types, max_value);
  auto w = random_weights(rng, types);
  for (size_t i = 0; i < types; ++i) inst.types.push_back({w[i], v1[i], random_dist(rng, max_support, max_value)});
  return inst;
}

// Day-2 supports drawn from one shared pool of `pool_size` values, so the
// union of supports stays small.
inline TwoDayInstance random_pool_instance(std::mt19937& rng, size_t types, size_t pool_size, int max_value) {
  TwoDayInstance inst;
  auto v1 = distinct_values(rng, types, max_value);
  auto pool = distinct_values(rng, pool_size, max_value);
  auto w = random_weights(rng, types);
  for (size_t i = 0; i < types; ++i) inst.types.push_back({w[i], v1[i], random_dist_from(rng, pool, int(pool_size))});
  return inst;
}

// Identical day-2 distribution for every type.
inline TwoDayInstance random_independent_instance(std::mt19937& rng, size_t types, size_t support, int max_value) {
  TwoDayInstance inst;
  auto v1 = distinct_values(rng, types, max_value);
  auto w = random_weights(rng, types);
  auto d2 = random_dist(rng, int(support), max_value);
  for (size_t i = 0; i < types; ++i) inst.types.push_back({w[i], v1[i], d2});
  return inst;
}

inline Price random_price(std::mt19937& rng, int max_value) {
  if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) return Price::no_sale();
  return Price(R(std::uniform_int_distribution<int>(0, 2 * max_value)(rng), 2));
}

inline DeterministicMechanism random_det_mechanism(std::mt19937& rng, const TwoDayInstance& inst, int max_value) {
  DeterministicMechanism m;
  for (auto& t : inst.types) {
    Price p = random_price(rng, max_value);
    if (p.finite() && std::uniform_int_distribution<int>(0, 4)(rng) > 0) p = Price(min(p.value(), t.v1));
    m.prices.push_back({p, random_price(rng, max_value)});
  }
  return m;
}

inline Lottery random_lottery(std::mt19937& rng, int max_value) {
  int m = std::uniform_int_distribution<int>(1, 3)(rng);
  auto w = random_weights(rng, size_t(m));
  Lottery l;
  for (int k = 0; k < m; ++k) l.emplace_back(random_price(rng, max_value), w[k]);
  return canonical_lottery(l);
}

inline RandomizedMechanism random_lottery_mechanism(std::mt19937& rng, const TwoDayInstance& inst, int max_value) {
  RandomizedMechanism m;
  for (size_t i = 0; i < inst.size(); ++i) m.lotteries.push_back({random_lottery(rng, max_value), random_lottery(rng, max_value)});
  return m;
}

}  // namespace testutil
