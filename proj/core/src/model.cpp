#include "specbeam/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace specbeam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t table_size(int vocab, int order) {
  std::size_t n = 1;
  for (int i = 0; i < order; ++i) {
    n *= static_cast<std::size_t>(vocab);
    if (n > (1u << 22)) {
      throw std::invalid_argument("Model: vocab^order table too large");
    }
  }
  return n;
}

Distribution dirichlet_row(Rng& rng, int size, double concentration) {
  std::vector<double> w(static_cast<std::size_t>(size));
  for (double& x : w) x = rng.next_gamma(concentration);
  return Distribution::from_weights(std::move(w));
}

}  // namespace

Model::Model(Vocabulary vocab, int order, std::vector<Distribution> rows)
    : vocab_(std::move(vocab)), order_(order), rows_(std::move(rows)) {
  if (vocab_.size < 2) throw std::invalid_argument("Model: vocab size must be >= 2");
  if (order_ < 0) throw std::invalid_argument("Model: negative order");
  if (rows_.size() != table_size(vocab_.size, order_)) {
    throw std::invalid_argument("Model: row table size mismatch");
  }
}

std::size_t Model::row_index(std::span<const Token> context) const {
  std::size_t key = 0;
  // Key on the last `order` tokens, most recent token in the lowest digit;
  // short contexts are left-padded with token 0.
  for (int i = 0; i < order_; ++i) {
    const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(context.size()) - 1 - i;
    Token t = 0;
    if (pos >= 0) {
      t = context[static_cast<std::size_t>(pos)];
      if (t < 0 || t >= vocab_.size) throw std::invalid_argument("Model: token id out of range");
    }
    key = key * static_cast<std::size_t>(vocab_.size) + static_cast<std::size_t>(t);
  }
  return key;
}

const Distribution& Model::next(std::span<const Token> context) const {
  return rows_[row_index(context)];
}

double Model::log_next(std::span<const Token> context, Token token) const {
  if (token < 0 || token >= vocab_.size) throw std::invalid_argument("Model: token id out of range");
  const double p = next(context)[static_cast<std::size_t>(token)];
  return p > 0.0 ? std::log(p) : kNegInf;
}

Model make_markov_model(std::uint64_t seed, const Vocabulary& vocab, int order,
                        double concentration) {
  if (vocab.size < 2) throw std::invalid_argument("make_markov_model: vocab size must be >= 2");
  if (order < 0) throw std::invalid_argument("make_markov_model: negative order");
  if (!(concentration > 0.0)) throw std::invalid_argument("make_markov_model: concentration must be > 0");

  Rng rng = Rng(seed).child(1);
  const std::size_t n_rows = table_size(vocab.size, order);
  std::vector<Distribution> rows;
  rows.reserve(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    rows.push_back(dirichlet_row(rng, vocab.size, concentration));
  }
  return Model(vocab, order, std::move(rows));
}

ModelPair make_model_pair(std::uint64_t seed, const Vocabulary& vocab, int order,
                          double divergence, double concentration) {
  if (divergence < 0.0 || divergence > 1.0) {
    throw std::invalid_argument("make_model_pair: divergence must be in [0, 1]");
  }
  Model large = make_markov_model(seed, vocab, order, concentration);

  std::vector<Distribution> small_rows;
  small_rows.reserve(large.rows().size());
  if (divergence == 0.0) {
    small_rows = large.rows();  // bit-identical by contract
  } else {
    Rng fresh = Rng(seed).child(2);
    for (const Distribution& row : large.rows()) {
      const Distribution noise = dirichlet_row(fresh, vocab.size, concentration);
      std::vector<double> mixed(row.size());
      for (std::size_t i = 0; i < mixed.size(); ++i) {
        mixed[i] = (1.0 - divergence) * row[i] + divergence * noise[i];
      }
      small_rows.push_back(Distribution::from_weights(std::move(mixed)));
    }
  }
  return ModelPair{std::move(large), Model(vocab, order, std::move(small_rows)), divergence};
}

double sequence_log_prob(const Model& model, std::span<const Token> prefix,
                         std::span<const Token> continuation) {
  if (continuation.empty()) {
    throw std::invalid_argument("sequence_log_prob: empty continuation");
  }
  TokenSeq context(prefix.begin(), prefix.end());
  double total = 0.0;
  for (Token t : continuation) {
    const double lp = model.log_next(context, t);
    if (std::isinf(lp) && lp < 0) return kNegInf;
    total += lp;
    context.push_back(t);
  }
  return total;
}

std::vector<Distribution> batch_next_distributions(const Model& model,
                                                   const std::vector<TokenSeq>& contexts,
                                                   CallCounter* counter) {
  if (counter != nullptr) counter->calls += 1;
  std::vector<Distribution> out;
  out.reserve(contexts.size());
  for (const TokenSeq& ctx : contexts) {
    out.push_back(model.next(ctx));
  }
  return out;
}

}  // namespace specbeam
