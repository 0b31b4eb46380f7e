#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphid/baseline.hpp"
#include "graphid/common.hpp"
#include "graphid/config.hpp"
#include "graphid/graph.hpp"
#include "graphid/labels.hpp"
#include "graphid/pipeline.hpp"
#include "graphid/record.hpp"
#include "graphid/sampling.hpp"
#include "graphid/synth.hpp"

namespace {

using namespace graphid;

TrainConfig config_or_default(const std::string& path) {
  return path.empty() ? TrainConfig{} : load_train_config(path);
}

std::string derive_path(const std::string& out, const char* suffix) {
  std::string base = out;
  if (base.size() > 4 && base.substr(base.size() - 4) == ".csv")
    base.resize(base.size() - 4);
  return base + suffix;
}

int cmd_ingest(const std::string& in, const std::string& out, bool strict,
               const std::string& unit) {
  ParseOptions opt;
  opt.unit = parse_value_unit(unit);
  opt.strict = strict;
  ParseResult res = parse_records_file(in, opt);
  size_t shown = 0;
  for (const auto& e : res.errors) {
    if (shown++ == 50) {
      std::cerr << "... and " << (res.errors.size() - 50) << " more rows skipped\n";
      break;
    }
    std::cerr << "row " << e.row << ": " << e.message << "\n";
  }
  save_records(out, res.records);
  std::cout << "accepted " << res.accepted << " rejected " << res.rejected << "\n";
  return 0;
}

int cmd_build_graph(const std::string& in, const std::string& out, uint32_t min_calls,
                    const std::string& scale, bool ca_column) {
  std::vector<InteractionRecord> records = load_records(in);
  FeatureOptions opts;
  opts.scale = parse_feature_scale(scale);
  opts.is_contract_column = ca_column;
  opts.min_contract_calls = min_calls;
  RoleMap roles = account_roles(records);
  if (roles.conflict_warnings > 0)
    std::cerr << "warning: " << roles.conflict_warnings
              << " account(s) appeared as both wallet and contract; kept as contract\n";
  LwAig graph = build_graph(records, opts);
  save_graph(graph, out);
  std::cout << "nodes " << graph.node_count() << " edges " << graph.edge_count()
            << " feature-columns " << graph.contract_ids.size() << "\n";
  return 0;
}

int cmd_sample(const std::string& graph_path, const std::string& labels_path,
               const std::string& cls, const std::string& attr, uint32_t h, uint32_t k,
               uint64_t seed, const std::string& negative_pool, const std::string& out) {
  LwAig graph = load_graph(graph_path);
  auto labels = load_labels(labels_path);
  std::string positive = resolve_class(cls);

  std::vector<uint32_t> positives;
  std::vector<uint32_t> labeled_others;
  size_t missing = 0;
  for (const auto& [account, label] : labels) {
    auto idx = graph.find_node(account);
    if (!idx) {
      missing++;
      continue;
    }
    if (label == positive)
      positives.push_back(*idx);
    else
      labeled_others.push_back(*idx);
  }
  if (missing > 0)
    std::cerr << "warning: " << missing << " labeled account(s) not present in the graph\n";
  if (positives.empty()) throw Error("no account of class " + positive + " found in the graph");

  std::vector<uint32_t> pool;
  if (negative_pool == "labeled") {
    pool = labeled_others;
  } else if (negative_pool == "any") {
    std::vector<char> is_pos(graph.node_count(), 0);
    for (uint32_t v : positives) is_pos[v] = 1;
    for (uint32_t v = 0; v < graph.node_count(); ++v)
      if (!is_pos[v] && graph.roles[v] == Role::EOA) pool.push_back(v);
  } else {
    throw Error("--negative-pool must be labeled or any");
  }

  LabeledDataset ds = build_labeled_dataset(graph, positives, pool, positive, h, k,
                                            parse_rank_attr(attr), seed);
  save_dataset(ds, out);
  std::cout << "subgraphs " << ds.subgraphs.size() << " positives " << positives.size()
            << " feature-width " << ds.feat_width << "\n";
  return 0;
}

int cmd_train(const std::string& ds_path, const std::string& cfg_path, const std::string& out,
              const std::string& metrics) {
  LabeledDataset ds = load_dataset(ds_path);
  TrainConfig cfg = config_or_default(cfg_path);
  std::vector<uint32_t> all(ds.subgraphs.size());
  for (uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  TrainResult tr = train_model(ds, all, cfg, cfg.seed);
  save_model(tr.params, out);
  std::vector<uint8_t> pred = predict(tr.params, ds, all, cfg);
  std::vector<uint8_t> truth;
  for (const auto& g : ds.subgraphs) truth.push_back(g.label.value_or(0));
  FoldStats fit = score_binary(truth, pred);
  if (!metrics.empty()) write_train_metrics(metrics, cfg, ds_path, ds, cfg.seed, tr.history, fit);
  char buf[160];
  std::snprintf(buf, sizeof buf, "final loss %.6f train f1 %.4f", tr.history.back().l_total,
                fit.f1);
  std::cout << buf << "\n";
  return 0;
}

int cmd_crossval(const std::string& ds_path, const std::string& cfg_path,
                 const std::string& metrics) {
  LabeledDataset ds = load_dataset(ds_path);
  TrainConfig cfg = config_or_default(cfg_path);
  CrossvalResult res = cross_validate(ds, cfg);
  if (!metrics.empty()) write_crossval_metrics(metrics, "crossval", cfg, ds_path, &ds, res);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "runs %zu f1 %.4f +/- %.4f macro-f1 %.4f +/- %.4f accuracy %.4f +/- %.4f",
                res.runs.size(), res.f1_mean, res.f1_std, res.macro_f1_mean, res.macro_f1_std,
                res.accuracy_mean, res.accuracy_std);
  std::cout << buf << "\n";
  return 0;
}

int cmd_baseline(const std::string& records_path, const std::string& labels_path,
                 const std::string& cls, const std::string& cfg_path,
                 const std::string& metrics) {
  std::vector<InteractionRecord> records = load_records(records_path);
  auto labels = load_labels(labels_path);
  TrainConfig cfg = config_or_default(cfg_path);
  std::string positive = resolve_class(cls);

  std::vector<std::string> accounts;  // map iteration = sorted by account id
  std::vector<uint8_t> y;
  for (const auto& [account, label] : labels) {
    accounts.push_back(account);
    y.push_back(label == positive ? 1 : 0);
  }
  Tensor x = compute_manual_features(records, accounts);
  CrossvalResult res = cross_validate_features(x, y, cfg);
  if (!metrics.empty())
    write_crossval_metrics(metrics, "baseline", cfg, records_path, nullptr, res);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "runs %zu f1 %.4f +/- %.4f macro-f1 %.4f +/- %.4f accuracy %.4f +/- %.4f",
                res.runs.size(), res.f1_mean, res.f1_std, res.macro_f1_mean, res.macro_f1_std,
                res.accuracy_mean, res.accuracy_std);
  std::cout << buf << "\n";
  return 0;
}

int cmd_export(const std::string& model_path, const std::string& ds_path,
               const std::string& cfg_path, const std::string& out, bool pca) {
  ModelParams params = load_model(model_path);
  LabeledDataset ds = load_dataset(ds_path);
  TrainConfig cfg = config_or_default(cfg_path);
  export_embeddings(out, params, ds, cfg, pca);
  std::cout << "wrote " << ds.subgraphs.size() << " embedding(s)\n";
  return 0;
}

int cmd_synth(const std::string& profile, const std::string& out, uint64_t seed,
              uint32_t scale) {
  SynthProfile p = SynthProfile::by_name(profile);
  std::string labels = derive_path(out, ".labels.csv");
  std::string manifest = derive_path(out, ".manifest.txt");
  SynthResult res = generate_ledger(p, seed, scale, out, labels, manifest);
  std::cout << "records " << res.records << " labeled " << res.labeled << " accounts "
            << res.accounts << "\n";
  return 0;
}

int cmd_default_config(const std::string& out) {
  if (out.empty()) {
    std::cout << default_config_text();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + out);
    f << default_config_text();
    f.close();
    if (!f) throw Error("write failed: " + out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  graphid::tune_allocator();
  CLI::App app{"account identity inference over coarsened ledger interaction graphs"};
  app.set_help_flag("--help", "print help and exit");  // frees -h for option names
  app.require_subcommand(1);
  int rc = 0;
  auto sub = [&app](const char* name, const char* desc) {
    auto* c = app.add_subcommand(name, desc);
    c->set_help_flag("--help", "print help and exit");
    return c;
  };

  {
    auto* c = sub("ingest", "parse a ledger CSV (.gz supported) into a record pack");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto strict = std::make_shared<bool>(false);
    auto unit = std::make_shared<std::string>("ether");
    c->add_option("--in", *in, "ledger CSV path")->required();
    c->add_option("--out", *out, "output record pack")->required();
    c->add_flag("--strict", *strict, "fail on the first malformed row");
    c->add_option("--unit", *unit, "value column unit: wei | ether (default ether)");
    c->callback([=, &rc] { rc = cmd_ingest(*in, *out, *strict, *unit); });
  }
  {
    auto* c = sub("build-graph", "coarsen records into the interaction graph");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto min_calls = std::make_shared<uint32_t>(0);
    auto scale = std::make_shared<std::string>("count");
    auto ca_col = std::make_shared<bool>(false);
    c->add_option("--in", *in, "record pack")->required();
    c->add_option("--out", *out, "output graph snapshot")->required();
    c->add_option("--min-contract-calls", *min_calls,
                  "drop feature columns with fewer total calls");
    c->add_option("--feature-scale", *scale, "count | binary | log1p (default count)");
    c->add_flag("--is-contract-column", *ca_col, "append a 0/1 contract-flag column");
    c->callback([=, &rc] { rc = cmd_build_graph(*in, *out, *min_calls, *scale, *ca_col); });
  }
  {
    auto* c = sub("sample", "build a balanced per-account subgraph dataset");
    auto graph = std::make_shared<std::string>();
    auto labels = std::make_shared<std::string>();
    auto cls = std::make_shared<std::string>();
    auto attr = std::make_shared<std::string>("t");
    auto h = std::make_shared<uint32_t>(2);
    auto k = std::make_shared<uint32_t>(20);
    auto seed = std::make_shared<uint64_t>(42);
    auto pool = std::make_shared<std::string>("labeled");
    auto out = std::make_shared<std::string>();
    c->add_option("--graph", *graph, "graph snapshot")->required();
    c->add_option("--labels", *labels, "account,label CSV")->required();
    c->add_option("--class", *cls, "positive class (substring of a known label)")->required();
    c->add_option("--attr", *attr, "neighbor ranking attribute: t | w_tilde (default t)");
    c->add_option("--h", *h, "hops (default 2)");
    c->add_option("--k", *k, "neighbors kept per expansion (default 20)");
    c->add_option("--seed", *seed, "negative sampling seed (default 42)");
    c->add_option("--negative-pool", *pool, "labeled | any (default labeled)");
    c->add_option("--out", *out, "output dataset pack")->required();
    c->callback(
        [=, &rc] { rc = cmd_sample(*graph, *labels, *cls, *attr, *h, *k, *seed, *pool, *out); });
  }
  {
    auto* c = sub("train", "train on the full dataset and save a checkpoint");
    auto ds = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto metrics = std::make_shared<std::string>();
    c->add_option("--dataset", *ds, "dataset pack")->required();
    c->add_option("--config", *cfg, "key=value config file (defaults when omitted)");
    c->add_option("--out", *out, "output checkpoint")->required();
    c->add_option("--metrics", *metrics, "write loss history JSON here");
    c->callback([=, &rc] { rc = cmd_train(*ds, *cfg, *out, *metrics); });
  }
  {
    auto* c = sub("crossval",
                                 "repeated stratified cross-validation with fresh runs");
    auto ds = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto metrics = std::make_shared<std::string>();
    c->add_option("--dataset", *ds, "dataset pack")->required();
    c->add_option("--config", *cfg, "key=value config file (defaults when omitted)");
    c->add_option("--metrics", *metrics, "write per-run metrics JSON here");
    c->callback([=, &rc] { rc = cmd_crossval(*ds, *cfg, *metrics); });
  }
  {
    auto* c = sub("baseline",
                                 "hand-crafted-feature logistic baseline, same protocol");
    auto records = std::make_shared<std::string>();
    auto labels = std::make_shared<std::string>();
    auto cls = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto metrics = std::make_shared<std::string>();
    c->add_option("--records", *records, "record pack")->required();
    c->add_option("--labels", *labels, "account,label CSV")->required();
    c->add_option("--class", *cls, "positive class")->required();
    c->add_option("--config", *cfg, "key=value config file (folds/repeats/seed apply)");
    c->add_option("--metrics", *metrics, "write per-run metrics JSON here");
    c->callback([=, &rc] { rc = cmd_baseline(*records, *labels, *cls, *cfg, *metrics); });
  }
  {
    auto* c = sub("export-embeddings", "write pooled embeddings as TSV");
    auto model = std::make_shared<std::string>();
    auto ds = std::make_shared<std::string>();
    auto cfg = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto pca = std::make_shared<bool>(false);
    c->add_option("--model", *model, "checkpoint")->required();
    c->add_option("--dataset", *ds, "dataset pack")->required();
    c->add_option("--config", *cfg, "key=value config file (defaults when omitted)");
    c->add_option("--out", *out, "output TSV")->required();
    c->add_flag("--pca", *pca, "project to the first two principal components");
    c->callback([=, &rc] { rc = cmd_export(*model, *ds, *cfg, *out, *pca); });
  }
  {
    auto* c = sub("synth", "generate a deterministic synthetic ledger");
    auto profile = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto seed = std::make_shared<uint64_t>(1);
    auto scale = std::make_shared<uint32_t>(1);
    c->add_option("--profile", *profile, "planted | null")->required();
    c->add_option("--out", *out, "output ledger CSV (labels/manifest derive from it)")
        ->required();
    c->add_option("--seed", *seed, "generator seed (default 1)");
    c->add_option("--scale", *scale, "background noise multiplier (default 1)");
    c->callback([=, &rc] { rc = cmd_synth(*profile, *out, *seed, *scale); });
  }
  {
    auto* c = sub("default-config", "print the annotated default config");
    auto out = std::make_shared<std::string>();
    c->add_option("--out", *out, "write here instead of stdout");
    c->callback([=, &rc] { rc = cmd_default_config(*out); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
