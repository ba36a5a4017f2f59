#pragma once

#include "specbeam/distribution.hpp"
#include "specbeam/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace specbeam {

using Token = int;
using TokenSeq = std::vector<Token>;

/// Dense zero-based token id space, optionally with display glyphs for
/// reports. size must be at least 2.
struct Vocabulary {
  int size = 0;
  std::vector<std::string> glyphs;  // optional, per token

  std::string glyph(Token t) const {
    if (t >= 0 && static_cast<std::size_t>(t) < glyphs.size()) return glyphs[t];
    return std::to_string(t);
  }
};

/// Counts batched model invocations. One batched call over any number of
/// contexts counts as a single call; this is what the efficiency metrics
/// consume.
struct CallCounter {
  std::uint64_t calls = 0;
};

/// Finite-order Markov table model: a conditional distribution over the
/// vocabulary keyed by the last `order` context tokens. Rows are drawn once
/// at construction from a seeded symmetric Dirichlet, so the model is purely
/// functional afterwards: identical context, identical Distribution,
/// bit-for-bit.
///
/// Contexts shorter than `order` are left-padded with token 0.
class Model {
 public:
  Model() = default;
  Model(Vocabulary vocab, int order, std::vector<Distribution> rows);

  const Vocabulary& vocab() const { return vocab_; }
  int order() const { return order_; }

  /// Conditional distribution of the next token given a context.
  const Distribution& next(std::span<const Token> context) const;

  /// log p(token | context); -inf for zero-probability tokens.
  double log_next(std::span<const Token> context, Token token) const;

  const std::vector<Distribution>& rows() const { return rows_; }

 private:
  std::size_t row_index(std::span<const Token> context) const;

  Vocabulary vocab_;
  int order_ = 0;
  std::vector<Distribution> rows_;  // vocab.size^order rows
};

/// A coupled large/small model pair sharing one vocabulary. The small model's
/// rows are a convex mixture of the large rows with independent random rows;
/// divergence 0 makes the two models identical, divergence 1 makes them
/// independent.
struct ModelPair {
  Model large;
  Model small;
  double divergence = 0.0;
};

/// Builds a seeded Markov model. Rows are symmetric-Dirichlet draws with the
/// given concentration; order 0 yields a context-free model.
Model make_markov_model(std::uint64_t seed, const Vocabulary& vocab, int order,
                        double concentration);

/// Builds a large/small pair: small rows = (1 - divergence) * large row +
/// divergence * fresh row, renormalized. divergence must lie in [0, 1];
/// divergence == 0 copies the large rows bit-for-bit.
ModelPair make_model_pair(std::uint64_t seed, const Vocabulary& vocab, int order,
                          double divergence, double concentration = 1.0);

/// Sum over positions of log p(x_t | prefix, x_<t). Returns -inf (a value,
/// not an error) when any factor has probability zero.
double sequence_log_prob(const Model& model, std::span<const Token> prefix,
                         std::span<const Token> continuation);

/// Evaluates the model on every context in one batched call. Element-wise
/// identical to single calls; increments the counter exactly once regardless
/// of batch size.
std::vector<Distribution> batch_next_distributions(const Model& model,
                                                   const std::vector<TokenSeq>& contexts,
                                                   CallCounter* counter = nullptr);

}  // namespace specbeam
