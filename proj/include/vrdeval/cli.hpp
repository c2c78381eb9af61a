// Copyright 2026 The vrdeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. `run` is the whole program; tools/vrdeval.cpp
// only forwards argv to it.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vrdeval/analysis.hpp"
#include "vrdeval/baseline.hpp"
#include "vrdeval/codec.hpp"
#include "vrdeval/core.hpp"
#include "vrdeval/metrics.hpp"
#include "vrdeval/transforms.hpp"

namespace vrdeval::cli {

inline constexpr const char* kToolVersion = "0.1.0";

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kValidationFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kParse = 3;
inline constexpr int kScoring = 4;
inline constexpr int kIo = 5;
}  // namespace exit_code

using ojson = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --------------------------------------------------------------------------
// Report blocks

inline ojson to_json(const PRF& p) {
  return {{"true_positives", p.true_positives},
          {"predicted", p.predicted_count},
          {"gold", p.gold_count},
          {"precision", p.precision()},
          {"recall", p.recall()},
          {"f1", p.f1()}};
}

inline ojson to_json(const analysis::Fraction& f) {
  return {{"hits", f.hits}, {"total", f.total}, {"value", f.value()}};
}

inline ojson to_json(const SubsetRecall& r) {
  return {{"recalled", r.recalled},
          {"total", r.total},
          {"recall", r.recall()},
          {"empty_subset", r.empty_subset}};
}

inline ojson to_json(const StatsReport& s) {
  ojson j = {{"samples", s.samples},
             {"segments", s.segments},
             {"words", s.words},
             {"entities", s.entities},
             {"relation_triplets", s.relations},
             {"segments_per_sample", s.segments_per_sample},
             {"words_per_sample", s.words_per_sample},
             {"avg_segment_length", s.avg_segment_length},
             {"entities_per_sample", s.entities_per_sample},
             {"avg_entity_length", s.avg_entity_length},
             {"relation_triplets_per_sample", s.relations_per_sample}};
  if (s.complex_count) j["complex_entities"] = *s.complex_count;
  if (s.complex_proportion) j["complex_proportion"] = *s.complex_proportion;
  return j;
}

inline ojson to_json(const analysis::DiagnosticsReport& r) {
  ojson docs = ojson::array();
  for (const auto& d : r.documents)
    docs.push_back({{"id", d.id},
                    {"entity_layout_uniformity", to_json(d.layout_uniformity)},
                    {"boundary_alignment", to_json(d.boundary_alignment)},
                    {"entities", d.entity_count},
                    {"complex_entities", d.complex_entities}});
  return {{"entity_layout_uniformity", to_json(r.layout_uniformity)},
          {"boundary_alignment", to_json(r.boundary_alignment)},
          {"complex",
           {{"count", r.complex_count},
            {"entities", r.entity_count},
            {"proportion", r.complex_proportion()},
            {"multi_row_only", r.multi_row_only},
            {"intruded_only", r.intruded_only},
            {"both_clauses", r.both_clauses}}},
          {"documents", docs}};
}

namespace detail {

inline void markdown_rows(const ojson& j, const std::string& prefix, std::string& out) {
  for (const auto& item : j.items()) {
    const std::string key = prefix.empty() ? item.key() : prefix + "." + item.key();
    if (item.value().is_object()) {
      markdown_rows(item.value(), key, out);
    } else if (item.value().is_array() && !item.value().empty() &&
               item.value().front().is_structured()) {
      out += "| " + key + " | " + std::to_string(item.value().size()) + " entries |\n";
    } else {
      out += "| " + key + " | " + item.value().dump() + " |\n";
    }
  }
}

}  // namespace detail

/// Renders a report as JSON (2-space indent) or as a markdown key/value
/// table. Both end with a newline.
inline std::string render(const ojson& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  std::string out = "# " + report.value("command", std::string("report")) + "\n\n";
  out += "| key | value |\n|---|---|\n";
  detail::markdown_rows(report, "", out);
  return out;
}

// --------------------------------------------------------------------------
// Options

struct RunConfig {
  std::vector<std::string> datasets;
  std::optional<std::string> split;
  std::optional<std::string> out;
  std::uint64_t seed = 0;
  std::string format = "json";
  unsigned threads = 0;

  PerturbParams perturb;
  baseline::BaselineConfig baseline;
  std::string task = "ser";

  std::optional<std::string> predictions;
  std::optional<std::string> subset;

  bool keep_invalid_links = false;
  bool other_as_entity = false;
  std::string direction = "question-to-answer";
};

struct Loaded {
  Dataset dataset;
  std::size_t split_index = 0;
  const Split& split() const { return dataset.splits[split_index]; }
};

inline Loaded load(const RunConfig& cfg) {
  if (cfg.datasets.empty()) throw UsageError("--dataset is required");
  Loaded l;
  for (std::size_t i = 0; i < cfg.datasets.size(); ++i) {
    std::string arg = cfg.datasets[i], name = "all", path = arg;
    if (auto eq = arg.find('='); eq != std::string::npos && eq > 0 &&
                                  arg.substr(0, eq).find('/') == std::string::npos &&
                                  !std::filesystem::exists(arg)) {
      name = arg.substr(0, eq);
      path = arg.substr(eq + 1);
    }
    Dataset part = parse_dataset(path, name);
    if (i == 0) {
      l.dataset = std::move(part);
      continue;
    }
    if (part.label_set != l.dataset.label_set ||
        part.relation_label_set != l.dataset.relation_label_set)
      throw UsageError("dataset files disagree on label sets: " + path);
    if (l.dataset.find_split(name)) throw UsageError("split '" + name + "' given twice");
    l.dataset.splits.push_back(std::move(part.splits.front()));
  }
  if (cfg.split) {
    const Split* s = l.dataset.find_split(*cfg.split);
    if (!s) throw UsageError("unknown split '" + *cfg.split + "'");
    l.split_index = static_cast<std::size_t>(s - l.dataset.splits.data());
  } else if (l.dataset.splits.size() != 1) {
    throw UsageError("several splits loaded, pass --split");
  }
  return l;
}

inline unsigned thread_count(const RunConfig& cfg) {
  return cfg.threads == 0 ? default_threads() : cfg.threads;
}

inline void emit(const RunConfig& cfg, const std::string& bytes, std::ostream& out) {
  if (cfg.out)
    write_file(*cfg.out, bytes);
  else
    out << bytes;
}

inline ojson report_header(const std::string& command, const RunConfig& cfg, const Loaded& l) {
  ojson config = {{"dataset", cfg.datasets}, {"split", l.split().name}};
  return {{"command", command},
          {"tool_version", kToolVersion},
          {"config", config},
          {"dataset_fingerprint", fingerprint(l.dataset, l.split())}};
}

inline ojson perturb_echo(const PerturbParams& p) {
  return {{"split_rate", p.split_rate},
          {"rot_min", p.rot_min},
          {"rot_max", p.rot_max},
          {"sigma_min", p.sigma_min},
          {"sigma_max", p.sigma_max}};
}

// --------------------------------------------------------------------------
// Commands

inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  std::size_t violations = 0, documents = 0;
  for (const auto& arg : cfg.datasets) {
    std::string path = arg;
    if (auto eq = arg.find('='); eq != std::string::npos && !std::filesystem::exists(arg))
      path = arg.substr(eq + 1);
    try {
      const Dataset ds = parse_dataset(path);
      documents += ds.splits.front().documents.size();
    } catch (const InvariantError& e) {
      for (const auto& v : e.violations()) {
        out << path << "\t" << v.rule << "\t" << v.location << "\t" << v.message << "\n";
        ++violations;
      }
    }
  }
  if (violations) {
    out << violations << " violation(s)\n";
    return exit_code::kValidationFailed;
  }
  out << "ok: " << documents << " document(s) valid\n";
  return exit_code::kOk;
}

inline int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load(cfg);
  StatsReport stats = stats_of(l.split().documents);
  analysis::annotate_complexity(stats, l.dataset, l.split().name);
  ojson r = report_header("stats", cfg, l);
  r["stats"] = to_json(stats);
  emit(cfg, render(r, cfg.format), out);
  return exit_code::kOk;
}

inline int cmd_import_funsd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.datasets.size() != 1) throw UsageError("import-funsd takes one --dataset directory");
  ImportOptions options;
  options.drop_invalid_links = !cfg.keep_invalid_links;
  options.relation_direction = cfg.direction;
  options.other_as_entity = cfg.other_as_entity;
  ImportResult result = import_funsd(cfg.datasets.front(), options);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";

  const std::string split = cfg.split.value_or("all");
  Dataset ds = result.dataset;
  if (split == "all")
    ds = merge_splits(ds, "all");
  else if (!ds.find_split(split))
    throw UsageError("import has no split '" + split + "'");
  emit(cfg, serialize_split(ds, ds.split(split)), out);
  return exit_code::kOk;
}

inline int cmd_transform(const std::string& command, const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load(cfg);
  ojson prov = {{"transform", command}};
  Split result{l.split().name, {}};
  if (command == "perturb") {
    cfg.perturb.check();
    prov["master_seed"] = cfg.seed;
    prov["params"] = perturb_echo(cfg.perturb);
    prov["rng"] = "mt19937_64; seed splitmix64(fnv1a64(id, fnv1a64(seed_le64)))";
    result.documents = perturb_all(l.split().documents, cfg.perturb, cfg.seed, thread_count(cfg));
  } else {
    result.documents = mask_all(l.split().documents, thread_count(cfg));
  }
  prov["source_fingerprint"] = fingerprint(l.dataset, l.split());
  if (!l.dataset.provenance.empty()) prov["source"] = ojson::parse(l.dataset.provenance);

  Dataset ds = l.dataset;
  ds.provenance = prov.dump();
  ds.splits = {result};
  emit(cfg, serialize_split(ds, ds.splits.front()), out);
  return exit_code::kOk;
}

inline int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load(cfg);
  ojson r = report_header("diagnose", cfg, l);
  r["diagnostics"] = to_json(analysis::diagnose(l.dataset, l.split().name));
  emit(cfg, render(r, cfg.format), out);
  return exit_code::kOk;
}

inline int cmd_fairness_subset(const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load(cfg);
  const auto diag = analysis::diagnose(l.dataset, l.split().name);
  ojson docs = ojson::array();
  for (const auto& d : diag.documents)
    docs.push_back({{"id", d.id}, {"entities", d.complex_entities}});
  ojson r = report_header("fairness-subset", cfg, l);
  r["complex"] = {{"count", diag.complex_count},
                  {"entities", diag.entity_count},
                  {"proportion", diag.complex_proportion()},
                  {"multi_row_only", diag.multi_row_only},
                  {"intruded_only", diag.intruded_only},
                  {"both_clauses", diag.both_clauses}};
  r["documents"] = docs;
  emit(cfg, render(r, cfg.format), out);
  return exit_code::kOk;
}

inline EntitySubset read_subset(const std::string& path) {
  ojson j;
  try {
    j = ojson::parse(vrdeval::detail::read_file(path));
  } catch (const ojson::parse_error& e) {
    throw SyntaxError(path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("documents") || !j["documents"].is_array())
    throw SchemaError(path + ": expected an object with a \"documents\" array");
  EntitySubset subset;
  for (const auto& d : j["documents"]) {
    if (!d.is_object() || !d.contains("id") || !d["id"].is_string() || !d.contains("entities") ||
        !d["entities"].is_array())
      throw SchemaError(path + ": document entries need \"id\" and \"entities\"");
    auto& list = subset[d["id"].get<std::string>()];
    for (const auto& e : d["entities"]) {
      if (!e.is_number_unsigned()) throw SchemaError(path + ": entity indices must be unsigned");
      list.push_back(e.get<std::size_t>());
    }
  }
  return subset;
}

inline int cmd_eval(const std::string& command, const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load(cfg);
  if (!cfg.predictions) throw UsageError("--predictions is required");
  const PredictionSet preds = parse_predictions(*cfg.predictions);
  try {
    check_predictions(preds, l.dataset, l.split());
  } catch (const SchemaError& e) {
    throw ScoringError(e.what());
  }
  ojson r = report_header(command, cfg, l);
  r["config"]["predictions"] = *cfg.predictions;
  r["predictions_fingerprint"] = "fnv1a64:" + hex64(fnv1a64(serialize_predictions(preds)));

  if (command == "eval-ser") {
    std::vector<PRF> per_doc;
    const PRF total = ser_prf(l.split(), preds, &l.dataset.label_set, &per_doc);
    r["metrics"] = {{"ser", to_json(total)}};
  } else if (command == "eval-el") {
    const PRF total = el_prf(l.split(), preds);
    r["metrics"] = {{"el", to_json(total)}};
  } else {
    EntitySubset subset;
    if (cfg.subset) {
      r["config"]["subset"] = *cfg.subset;
      subset = read_subset(*cfg.subset);
    } else {
      subset = analysis::complex_subset(l.dataset, l.split().name);
    }
    EntitySubset everything;
    for (const auto& doc : l.split().documents) {
      auto& list = everything[doc.id];
      for (std::size_t e = 0; e < doc.entities.size(); ++e) list.push_back(e);
    }
    const SubsetRecall all = subset_recall(l.split(), preds, everything, &l.dataset.label_set);
    const SubsetRecall complex = subset_recall(l.split(), preds, subset, &l.dataset.label_set);
    r["metrics"] = {{"recall_all", to_json(all)}, {"recall_complex", to_json(complex)}};
    if (complex.empty_subset) r["warnings"] = {"complex subset is empty; recall reported as 0"};
  }
  emit(cfg, render(r, cfg.format), out);
  return exit_code::kOk;
}

inline int cmd_baseline(const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load(cfg);
  Task task;
  if (cfg.task == "ser")
    task = Task::kSer;
  else if (cfg.task == "el")
    task = Task::kEl;
  else
    throw UsageError("--task must be ser or el");
  emit(cfg, serialize_predictions(baseline::predict(l.split(), task, cfg.baseline)), out);
  return exit_code::kOk;
}

// --------------------------------------------------------------------------
// Entry point

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Evaluation harness for visually-rich document information extraction",
               "vrdeval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  RunConfig cfg;
  std::optional<double> link_max;

  auto common = [&](CLI::App* sub, bool with_out = true) {
    sub->add_option("--dataset", cfg.datasets, "Dataset file; NAME=PATH names the split")
        ->required();
    sub->add_option("--split", cfg.split, "Split to use");
    if (with_out) sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--format", cfg.format, "Report format")
        ->check(CLI::IsMember({"json", "markdown"}));
  };

  auto* validate = app.add_subcommand("validate", "Parse and validate dataset files");
  validate->add_option("--dataset", cfg.datasets, "Dataset file")->required();

  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  common(stats);

  auto* import = app.add_subcommand("import-funsd", "Convert FUNSD annotations to canonical form");
  import->add_option("--dataset", cfg.datasets, "FUNSD release or annotation directory")
      ->required();
  import->add_option("--split", cfg.split, "train, test or all (default all)");
  import->add_option("--out", cfg.out, "Output file (default stdout)");
  import->add_flag("--keep-invalid-links", cfg.keep_invalid_links,
                   "Fail on invalid links instead of dropping them");
  import->add_flag("--other-as-entity", cfg.other_as_entity,
                   "Also turn 'other' blocks into entities");
  import->add_option("--direction", cfg.direction, "Link direction rule")
      ->check(CLI::IsMember({"question-to-answer", "file-order"}));

  auto* mask = app.add_subcommand("mask-segments", "Replace segments with per-word segments");
  common(mask);
  mask->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");

  auto* perturb_cmd = app.add_subcommand("perturb", "Seeded layout perturbation");
  common(perturb_cmd);
  perturb_cmd->add_option("--seed", cfg.seed, "Master seed");
  perturb_cmd->add_option("--split-rate", cfg.perturb.split_rate, "Exponential cutoff rate");
  perturb_cmd->add_option("--rot-min", cfg.perturb.rot_min, "Minimum rotation (degrees)");
  perturb_cmd->add_option("--rot-max", cfg.perturb.rot_max, "Maximum rotation (degrees)");
  perturb_cmd->add_option("--sigma-min", cfg.perturb.sigma_min, "Minimum offset sigma (px)");
  perturb_cmd->add_option("--sigma-max", cfg.perturb.sigma_max, "Maximum offset sigma (px)");
  perturb_cmd->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");

  auto* diagnose = app.add_subcommand("diagnose", "Spurious-correlation diagnostics");
  common(diagnose);

  auto* fsubset = app.add_subcommand("fairness-subset", "Complex-entity subset");
  common(fsubset);

  auto* eval_ser = app.add_subcommand("eval-ser", "Entity-level SER scores");
  common(eval_ser);
  eval_ser->add_option("--predictions", cfg.predictions, "Prediction file")->required();

  auto* eval_el = app.add_subcommand("eval-el", "Relation-triplet EL scores");
  common(eval_el);
  eval_el->add_option("--predictions", cfg.predictions, "Prediction file")->required();

  auto* fairness = app.add_subcommand("fairness", "Recall on all and on complex entities");
  common(fairness);
  fairness->add_option("--predictions", cfg.predictions, "Prediction file")->required();
  fairness->add_option("--subset", cfg.subset, "Subset file from fairness-subset");

  auto* base = app.add_subcommand("baseline", "Rule-based SER/EL predictions");
  common(base);
  base->add_option("--task", cfg.task, "ser or el")->check(CLI::IsMember({"ser", "el"}));
  base->add_option("--header-band", cfg.baseline.header_band, "Header zone fraction");
  base->add_option("--link-max-distance", link_max, "Maximum link distance (px)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough(false);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return exit_code::kOk;
    }
    err << "usage error: " << e.what() << "\n";
    return exit_code::kUsage;
  }
  cfg.baseline.link_max_distance = link_max;

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "validate") return cmd_validate(cfg, out);
    if (command == "stats") return cmd_stats(cfg, out);
    if (command == "import-funsd") return cmd_import_funsd(cfg, out, err);
    if (command == "mask-segments" || command == "perturb") return cmd_transform(command, cfg, out);
    if (command == "diagnose") return cmd_diagnose(cfg, out);
    if (command == "fairness-subset") return cmd_fairness_subset(cfg, out);
    if (command == "eval-ser" || command == "eval-el" || command == "fairness")
      return cmd_eval(command, cfg, out);
    if (command == "baseline") return cmd_baseline(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const std::out_of_range& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return exit_code::kIo;
  } catch (const InvariantError& e) {
    err << "invalid data: " << e.what() << "\n";
    return exit_code::kParse;
  } catch (const CodecError& e) {
    err << "parse error: " << e.what() << "\n";
    return exit_code::kParse;
  } catch (const ScoringError& e) {
    err << "scoring error: " << e.what() << "\n";
    return exit_code::kScoring;
  }
  err << "usage error: unknown command " << command << "\n";
  return exit_code::kUsage;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace vrdeval::cli
