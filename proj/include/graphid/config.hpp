#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "graphid/augment.hpp"
#include "graphid/sampling.hpp"

namespace graphid {

/// Training/evaluation knobs, parsed from flat key=value text. Defaults mirror
/// the reference configuration except where noted in default_config_text().
struct TrainConfig {
  uint32_t sample_h = 2;
  uint32_t sample_k = 20;
  RankAttr sample_attr = RankAttr::T;

  uint32_t model_layers = 2;  // accepted for completeness; only 2 is supported
  uint32_t model_hidden = 128;
  double model_dropout = 0.3;
  bool classify_on_projection = false;
  bool weighted_adjacency = false;

  double lambda = 0.2;
  uint32_t epochs = 200;
  uint32_t batch_size = 150;
  double lr = 1e-3;
  uint64_t seed = 42;

  uint32_t folds = 3;
  uint32_t repeats = 10;

  double tau = 0.5;
  bool standard_ntxent = false;

  AugmentSpec view1 = {AugmentOp::NodeDrop, 0.2};
  AugmentSpec view2 = {AugmentOp::FeatureMask, 0.2};
  bool per_node_mask = false;
  bool freeze_views = false;
};

TrainConfig parse_train_config(const std::string& text);
TrainConfig load_train_config(const std::string& path);

/// Canonical key=value form of every knob, for echoing into metrics output.
std::map<std::string, std::string> config_items(const TrainConfig& cfg);

/// Annotated config file with all defaults spelled out.
std::string default_config_text();

}  // namespace graphid
