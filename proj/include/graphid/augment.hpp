#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "graphid/common.hpp"
#include "graphid/sampling.hpp"

namespace graphid {

enum class AugmentOp : uint8_t { Identity = 0, FeatureMask = 1, NodeDrop = 2 };

struct AugmentSpec {
  AugmentOp op = AugmentOp::Identity;
  double p = 0.0;

  bool operator==(const AugmentSpec&) const = default;
};

/// Parses "identity", "fm:P" or "nd:P" (e.g. "nd:0.2").
AugmentSpec parse_augment_spec(const std::string& text);
std::string to_string(const AugmentSpec& spec);

/// Zeroes each feature dimension with probability p across all nodes of the
/// view (column masking); topology and label are unchanged. The per_node
/// variant draws an independent mask per node instead.
AccountSubgraph feature_mask(const AccountSubgraph& g, double p, Rng& rng, bool per_node = false);

/// Drops each non-center node independently with probability p; the center is
/// always retained; survivors are re-indexed compactly and the adjacency is
/// restricted to them; label unchanged.
AccountSubgraph node_drop(const AccountSubgraph& g, double p, Rng& rng);

AccountSubgraph apply_augment(const AccountSubgraph& g, const AugmentSpec& spec, Rng& rng,
                              bool per_node_mask = false);

/// The RNG stream for one (seed, subgraph ordinal, view ordinal) triple, so a
/// subgraph's views never depend on batch composition or schedule.
inline Rng view_rng(uint64_t seed, uint64_t ordinal, uint64_t view) {
  return Rng(mix_seed(seed, ordinal, view));
}

/// Two aligned view datasets: out.first[i] = spec1(D[i]), out.second[i] =
/// spec2(D[i]), labels carried through position-wise.
std::pair<std::vector<AccountSubgraph>, std::vector<AccountSubgraph>> make_view_datasets(
    const std::vector<AccountSubgraph>& D, const AugmentSpec& spec1, const AugmentSpec& spec2,
    uint64_t seed, bool per_node_mask = false);

}  // namespace graphid
