#pragma once

#include "specbeam/model.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace specbeam {

/// A token sequence plus its accumulated log-likelihood under a designated
/// model. The likelihood covers the generated continuation; the conditioning
/// prefix contributes zero (it is the conditioning event).
struct Beam {
  TokenSeq tokens;
  double log_likelihood = 0.0;
};

/// An ordered set of beams of equal length. Width is always at least 1.
class BeamSet {
 public:
  explicit BeamSet(std::vector<Beam> beams) : beams_(std::move(beams)) {
    if (beams_.empty()) throw std::invalid_argument("BeamSet: at least one beam required");
    const std::size_t len = beams_.front().tokens.size();
    for (const Beam& b : beams_) {
      if (b.tokens.size() != len) {
        throw std::invalid_argument("BeamSet: beams must share one length");
      }
    }
  }

  std::size_t width() const { return beams_.size(); }
  std::size_t length() const { return beams_.front().tokens.size(); }
  const Beam& operator[](std::size_t i) const { return beams_[i]; }
  const std::vector<Beam>& beams() const { return beams_; }

  auto begin() const { return beams_.begin(); }
  auto end() const { return beams_.end(); }

 private:
  std::vector<Beam> beams_;
};

/// A cell of the joint (beam, token) index space; the flattened cell id is
/// beam_index * vocab + token.
struct JointIndex {
  int beam_index = 0;
  Token token = 0;
};

inline std::size_t joint_cell(int beam_index, Token token, int vocab) {
  return static_cast<std::size_t>(beam_index) * static_cast<std::size_t>(vocab) +
         static_cast<std::size_t>(token);
}

inline JointIndex joint_unflatten(std::size_t cell, int vocab) {
  return JointIndex{static_cast<int>(cell / static_cast<std::size_t>(vocab)),
                    static_cast<Token>(cell % static_cast<std::size_t>(vocab))};
}

}  // namespace specbeam
