#include "graphid/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "graphid/common.hpp"

namespace graphid {
namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) a++;
  while (b > a && std::isspace((unsigned char)s[b - 1])) b--;
  return s.substr(a, b - a);
}

uint64_t parse_uint(const std::string& key, const std::string& v) {
  if (v.empty()) throw Error("config key " + key + ": empty value");
  uint64_t out = 0;
  for (char c : v) {
    if (c < '0' || c > '9') throw Error("config key " + key + ": expected integer, got " + v);
    uint64_t d = uint64_t(c - '0');
    if (out > (UINT64_MAX - d) / 10) throw Error("config key " + key + ": integer overflow");
    out = out * 10 + d;
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  double out = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw Error("config key " + key + ": expected number, got " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error("config key " + key + ": expected true/false, got " + v);
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

TrainConfig parse_train_config(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  size_t row = 0;
  while (std::getline(in, line)) {
    row++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(row) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));

    if (key == "sample.h") cfg.sample_h = uint32_t(parse_uint(key, val));
    else if (key == "sample.k") cfg.sample_k = uint32_t(parse_uint(key, val));
    else if (key == "sample.attr") cfg.sample_attr = parse_rank_attr(val);
    else if (key == "model.layers") cfg.model_layers = uint32_t(parse_uint(key, val));
    else if (key == "model.hidden") cfg.model_hidden = uint32_t(parse_uint(key, val));
    else if (key == "model.dropout") cfg.model_dropout = parse_real(key, val);
    else if (key == "model.classify_on_projection") cfg.classify_on_projection = parse_bool(key, val);
    else if (key == "model.weighted_adjacency") cfg.weighted_adjacency = parse_bool(key, val);
    else if (key == "train.lambda") cfg.lambda = parse_real(key, val);
    else if (key == "train.epochs") cfg.epochs = uint32_t(parse_uint(key, val));
    else if (key == "train.batch_size") cfg.batch_size = uint32_t(parse_uint(key, val));
    else if (key == "train.lr") cfg.lr = parse_real(key, val);
    else if (key == "train.seed") cfg.seed = parse_uint(key, val);
    else if (key == "eval.folds") cfg.folds = uint32_t(parse_uint(key, val));
    else if (key == "eval.repeats") cfg.repeats = uint32_t(parse_uint(key, val));
    else if (key == "contrast.tau") cfg.tau = parse_real(key, val);
    else if (key == "contrast.standard_ntxent") cfg.standard_ntxent = parse_bool(key, val);
    else if (key == "augment.view1") cfg.view1 = parse_augment_spec(val);
    else if (key == "augment.view2") cfg.view2 = parse_augment_spec(val);
    else if (key == "augment.per_node_mask") cfg.per_node_mask = parse_bool(key, val);
    else if (key == "augment.freeze_views") cfg.freeze_views = parse_bool(key, val);
    else throw Error("unknown config key: " + key);
  }

  if (cfg.model_layers != 2) throw Error("model.layers: only 2 is supported");
  if (cfg.sample_h < 1) throw Error("sample.h must be >= 1");
  if (cfg.sample_k < 1) throw Error("sample.k must be >= 1");
  if (cfg.model_hidden < 1) throw Error("model.hidden must be >= 1");
  if (!(cfg.model_dropout >= 0.0 && cfg.model_dropout < 1.0))
    throw Error("model.dropout must be in [0,1)");
  if (cfg.lambda < 0.0) throw Error("train.lambda must be >= 0");
  if (cfg.epochs < 1) throw Error("train.epochs must be >= 1");
  if (cfg.batch_size < 1) throw Error("train.batch_size must be >= 1");
  if (!(cfg.lr > 0.0)) throw Error("train.lr must be > 0");
  if (cfg.folds < 2) throw Error("eval.folds must be >= 2");
  if (cfg.repeats < 1) throw Error("eval.repeats must be >= 1");
  if (!(cfg.tau > 0.0)) throw Error("contrast.tau must be > 0");
  return cfg;
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_train_config(buf.str());
}

std::map<std::string, std::string> config_items(const TrainConfig& cfg) {
  std::map<std::string, std::string> m;
  m["sample.h"] = std::to_string(cfg.sample_h);
  m["sample.k"] = std::to_string(cfg.sample_k);
  m["sample.attr"] = to_string(cfg.sample_attr);
  m["model.layers"] = std::to_string(cfg.model_layers);
  m["model.hidden"] = std::to_string(cfg.model_hidden);
  m["model.dropout"] = fmt_real(cfg.model_dropout);
  m["model.classify_on_projection"] = cfg.classify_on_projection ? "true" : "false";
  m["model.weighted_adjacency"] = cfg.weighted_adjacency ? "true" : "false";
  m["train.lambda"] = fmt_real(cfg.lambda);
  m["train.epochs"] = std::to_string(cfg.epochs);
  m["train.batch_size"] = std::to_string(cfg.batch_size);
  m["train.lr"] = fmt_real(cfg.lr);
  m["train.seed"] = std::to_string(cfg.seed);
  m["eval.folds"] = std::to_string(cfg.folds);
  m["eval.repeats"] = std::to_string(cfg.repeats);
  m["contrast.tau"] = fmt_real(cfg.tau);
  m["contrast.standard_ntxent"] = cfg.standard_ntxent ? "true" : "false";
  m["augment.view1"] = to_string(cfg.view1);
  m["augment.view2"] = to_string(cfg.view2);
  m["augment.per_node_mask"] = cfg.per_node_mask ? "true" : "false";
  m["augment.freeze_views"] = cfg.freeze_views ? "true" : "false";
  return m;
}

std::string default_config_text() {
  return
      "# Subgraph sampling\n"
      "sample.h = 2                # hops (reference configuration)\n"
      "sample.k = 20               # neighbors kept per expansion (reference configuration)\n"
      "sample.attr = t             # ranking attribute: t | w_tilde (reference configuration)\n"
      "\n"
      "# Encoder\n"
      "model.layers = 2            # graph-conv layers (reference configuration)\n"
      "model.hidden = 128          # embedding width (reference configuration)\n"
      "model.dropout = 0.3         # between the conv layers (implementation default)\n"
      "model.classify_on_projection = false   # classify pooled embedding, not projection (implementation default)\n"
      "model.weighted_adjacency = false       # binarized symmetric adjacency (implementation default)\n"
      "\n"
      "# Joint objective\n"
      "train.lambda = 0.2          # weight of the contrastive term (reference configuration)\n"
      "train.epochs = 200          # (reference configuration)\n"
      "train.batch_size = 150      # subgraphs per step (implementation default)\n"
      "train.lr = 1e-3             # Adam step size (implementation default)\n"
      "train.seed = 42             # master seed (implementation default)\n"
      "\n"
      "# Evaluation protocol\n"
      "eval.folds = 3              # stratified folds (reference configuration)\n"
      "eval.repeats = 10           # re-shuffled repetitions (reference configuration)\n"
      "\n"
      "# Contrastive head\n"
      "contrast.tau = 0.5          # temperature (implementation default)\n"
      "contrast.standard_ntxent = false  # true: stacked 2n anchors with positive in denominator\n"
      "\n"
      "# Views\n"
      "augment.view1 = nd:0.2      # node dropping, p=0.2 (implementation default)\n"
      "augment.view2 = fm:0.2      # feature masking, p=0.2 (implementation default)\n"
      "augment.per_node_mask = false  # false: one mask per subgraph (implementation default)\n"
      "augment.freeze_views = false   # true: same views every epoch\n";
}

}  // namespace graphid
