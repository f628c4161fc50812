/**
 * @file compress.hpp
 * @brief Deterministic two-stage compressor used as a computable stand-in for
 * the algorithmic information content of a record sequence.
 *
 * Stage one is run-length encoding. Stage two is a static order-0 entropy
 * code whose length is the arithmetic-coding bound sum(-log2 p) with counts
 * sent in the header as Elias-gamma integers. Three modes are costed and the
 * cheapest is kept (2 mode bits):
 *
 *   raw      n * b bits, b = max(1, ceil(log2 alphabet))
 *   literal  order-0 code of the symbols; header: gamma(count_s + 1) per symbol
 *   runs     first symbol in b bits; later run symbols in log2(alphabet - 1)
 *            bits each (a run never repeats its predecessor); run lengths in
 *            an order-0 code; header: gamma(#distinct lengths), then
 *            gamma(length) and gamma(count) per distinct length
 *
 * The sequence length is known to the decoder, as for the raw baseline.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace einsel {

enum class CompressionMode { Raw, Literal, Runs };

struct CompressionCost {
  CompressionMode mode = CompressionMode::Raw;
  double raw_bits = 0.0;
  double compressed_bits = 0.0;  ///< including the 2 mode bits
  double ratio() const { return compressed_bits / raw_bits; }
};

namespace detail {

inline double elias_gamma_bits(std::uint64_t v) {
  if (v == 0) throw std::invalid_argument("Elias gamma codes positive integers only");
  int bits = 0;
  while ((v >> bits) > 1) ++bits;
  return 2.0 * bits + 1.0;
}

template <typename Key>
double order0_bits(const std::map<Key, std::size_t>& counts, std::size_t total) {
  double bits = 0.0;
  for (const auto& [key, c] : counts)
    bits -= static_cast<double>(c) * std::log2(static_cast<double>(c) / static_cast<double>(total));
  return bits;
}

}  // namespace detail

inline CompressionCost compression_cost(std::span<const std::uint32_t> symbols, std::uint32_t alphabet) {
  if (alphabet == 0) throw std::invalid_argument("alphabet must be nonempty");
  if (symbols.empty()) throw std::invalid_argument("cannot compress an empty sequence");
  for (auto s : symbols)
    if (s >= alphabet) throw std::invalid_argument("symbol " + std::to_string(s) + " outside the alphabet");

  const double symbol_bits = std::max(1.0, std::ceil(std::log2(static_cast<double>(alphabet))));
  const double n = static_cast<double>(symbols.size());
  CompressionCost cost;
  cost.raw_bits = n * symbol_bits;

  // literal
  std::map<std::uint32_t, std::size_t> sym_counts;
  for (auto s : symbols) ++sym_counts[s];
  double literal = detail::order0_bits(sym_counts, symbols.size());
  for (std::uint32_t s = 0; s < alphabet; ++s) {
    auto it = sym_counts.find(s);
    literal += detail::elias_gamma_bits((it == sym_counts.end() ? 0 : it->second) + 1);
  }

  // runs
  std::vector<std::size_t> lengths;
  for (std::size_t i = 0; i < symbols.size();) {
    std::size_t j = i;
    while (j < symbols.size() && symbols[j] == symbols[i]) ++j;
    lengths.push_back(j - i);
    i = j;
  }
  std::map<std::size_t, std::size_t> len_counts;
  for (auto l : lengths) ++len_counts[l];
  double runs = symbol_bits;
  if (alphabet > 2) runs += static_cast<double>(lengths.size() - 1) * std::log2(static_cast<double>(alphabet - 1));
  runs += detail::elias_gamma_bits(len_counts.size());
  for (const auto& [len, c] : len_counts) runs += detail::elias_gamma_bits(len) + detail::elias_gamma_bits(c);
  runs += detail::order0_bits(len_counts, lengths.size());

  cost.mode = CompressionMode::Raw;
  double best = cost.raw_bits;
  if (literal < best) {
    best = literal;
    cost.mode = CompressionMode::Literal;
  }
  if (runs < best) {
    best = runs;
    cost.mode = CompressionMode::Runs;
  }
  cost.compressed_bits = 2.0 + std::ceil(best - 1e-9);
  return cost;
}

}  // namespace einsel
