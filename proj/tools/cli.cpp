/*
 * Copyright 2026 The tiger-eval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "tiger/tiger_eval.hpp"

namespace tiger::cli {
namespace {

using ojson = nlohmann::ordered_json;

// A dataset row to be scored: one per scored record, two per pair record.
struct Row {
  RowKey key;
  const Caption* candidate = nullptr;
  const std::vector<Caption>* references = nullptr;
};

struct Inputs {
  bool pairs = false;
  std::vector<ScoredRecord> scored;
  std::vector<PairRecord> pair_records;
  std::vector<Row> rows;
};

Inputs load_inputs(const RunConfig& cfg, bool required = true) {
  Inputs in;
  if (!cfg.dataset.empty() && !cfg.pairs.empty()) {
    throw UsageError("give either --dataset or --pairs, not both");
  }
  if (!cfg.dataset.empty()) {
    in.scored = load_scored_dataset(cfg.dataset);
    for (std::size_t i = 0; i < in.scored.size(); ++i) {
      const auto& r = in.scored[i];
      in.rows.push_back({{i, std::nullopt, r.image_id, r.candidate.id}, &r.candidate, &r.references});
    }
  } else if (!cfg.pairs.empty()) {
    in.pairs = true;
    in.pair_records = load_pair_dataset(cfg.pairs);
    for (std::size_t i = 0; i < in.pair_records.size(); ++i) {
      const auto& r = in.pair_records[i];
      in.rows.push_back({{i, 'a', r.image_id, r.candidate_a.id}, &r.candidate_a, &r.references});
      in.rows.push_back({{i, 'b', r.image_id, r.candidate_b.id}, &r.candidate_b, &r.references});
    }
  } else if (required) {
    throw UsageError("a dataset is required (--dataset or --pairs)");
  }
  return in;
}

std::vector<ScoringTask> tasks_for(const std::vector<Row>& rows) {
  std::vector<ScoringTask> tasks;
  tasks.reserve(rows.size());
  for (const auto& r : rows) {
    ScoringTask t{r.key.image_id, r.candidate->id, {}};
    for (const auto& ref : *r.references) t.reference_ids.push_back(ref.id);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::shared_ptr<Grounder> make_grounder(const RunConfig& cfg, std::ostream& err) {
  if (cfg.manifest.empty()) throw UsageError("--manifest is required");
  GroundingConfig gcfg{cfg.lambda};
  gcfg.validate();
  auto store = std::make_shared<const FeatureStore>(load_manifest(cfg.manifest));
  const char* cache_dir = std::getenv(kCacheDirEnv);
  if (cache_dir != nullptr && *cache_dir != '\0') {
    return std::make_shared<GroundingCache>(store, gcfg, cache_dir, [&err](const std::string& w) {
      err << "warning: " << w << '\n';
    });
  }
  return std::make_shared<DirectGrounder>(store, gcfg);
}

void report_cache(const Grounder& g, std::ostream& err) {
  if (const auto* cache = dynamic_cast<const GroundingCache*>(&g)) {
    const CacheStats s = cache->stats();
    err << "cache " << cache->directory().string() << ": " << s.hits << " hits, " << s.computed
        << " computed, " << s.recovered << " recovered\n";
  }
}

TigerConfig tiger_config(const RunConfig& cfg) {
  TigerConfig t{cfg.tau, cfg.gain_floor};
  t.validate();
  return t;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + cfg.out + "' for writing");
  file << text;
  if (!file) throw IoError("write failure on '" + cfg.out + "'");
}

// ---------------------------------------------------------------------------
// TIGEr scoring

std::vector<ScoreRow> score_rows(const Grounder& grounder, const std::vector<Row>& rows,
                                 const TigerConfig& tcfg, std::size_t threads) {
  const std::vector<ScoringTask> tasks = tasks_for(rows);
  std::vector<InstanceOutcome> outcomes = score_tasks(grounder, tasks, tcfg, threads);
  std::vector<ScoreRow> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.push_back({rows[i].key, std::move(outcomes[i])});
  return out;
}

int cmd_score(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ReportFormat format = parse_report_format(cfg.format);
  const TigerConfig tcfg = tiger_config(cfg);
  const Inputs in = load_inputs(cfg);
  const auto grounder = make_grounder(cfg, err);
  const std::vector<ScoreRow> rows = score_rows(*grounder, in.rows, tcfg, cfg.threads);

  std::ostringstream text;
  write_score_report(text, rows, format, grounder->config(), tcfg);
  emit(cfg, text.str(), out);

  std::size_t skipped = 0;
  for (const auto& r : rows) skipped += r.outcome.ok() ? 0 : 1;
  err << "scored " << rows.size() - skipped << " instances, skipped " << skipped << '\n';
  report_cache(*grounder, err);
  return !rows.empty() && skipped == rows.size() ? kExitDegenerateOnly : kExitOk;
}

std::vector<GroundingKey> keys_for(const std::vector<Row>& rows) {
  return grounding_keys(tasks_for(rows));
}

std::vector<GroundingKey> unique_keys(const std::vector<GroundingKey>& keys) {
  std::vector<GroundingKey> unique;
  std::set<GroundingKey> seen;
  for (const auto& k : keys) {
    if (seen.insert(k).second) unique.push_back(k);
  }
  return unique;
}

int cmd_ground(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ReportFormat format = parse_report_format(cfg.format);
  const Inputs in = load_inputs(cfg);
  const auto grounder = make_grounder(cfg, err);
  const auto keys = unique_keys(keys_for(in.rows));
  const GroundingTable table = compute_groundings(*grounder, keys, cfg.threads);

  std::ostringstream text;
  std::size_t failed = 0;
  if (format == ReportFormat::kCsv) {
    text << "image_id,caption_id,status,scores\n";
    for (const auto& k : keys) {
      std::string why;
      const GroundingVector* v = table.find(k, &why);
      text << csv_field(k.first) << ',' << csv_field(k.second) << ',';
      if (v == nullptr) {
        ++failed;
        text << "failed," << csv_field(why) << '\n';
        continue;
      }
      text << "ok,";
      for (std::size_t i = 0; i < v->size(); ++i) {
        text << (i ? " " : "") << format_double(v->scores[i]);
      }
      text << '\n';
    }
  } else {
    ojson doc;
    doc["kind"] = "groundings";
    doc["lambda"] = grounder->config().lambda;
    doc["vectors"] = ojson::array();
    doc["failures"] = ojson::array();
    for (const auto& k : keys) {
      std::string why;
      const GroundingVector* v = table.find(k, &why);
      ojson j{{"image_id", k.first}, {"caption_id", k.second}};
      if (v == nullptr) {
        ++failed;
        j["reason"] = why;
        doc["failures"].push_back(std::move(j));
      } else {
        j["scores"] = v->scores;
        doc["vectors"].push_back(std::move(j));
      }
    }
    text << doc.dump(2) << '\n';
  }
  emit(cfg, text.str(), out);
  err << "grounded " << keys.size() - failed << " caption/image pairs, " << failed << " failed\n";
  report_cache(*grounder, err);
  return !keys.empty() && failed == keys.size() ? kExitDegenerateOnly : kExitOk;
}

int cmd_export_weights(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ReportFormat format = parse_report_format(cfg.format);
  const Inputs in = load_inputs(cfg);
  const auto grounder = make_grounder(cfg, err);
  const auto keys = unique_keys(keys_for(in.rows));
  const GroundingTable table = compute_groundings(*grounder, keys, cfg.threads);

  std::ostringstream text;
  ojson doc;
  doc["kind"] = "grounding-weights";
  doc["lambda"] = grounder->config().lambda;
  doc["rows"] = ojson::array();
  if (format == ReportFormat::kCsv) text << "image_id,caption_id,region_index,grounding_score\n";
  std::size_t failed = 0;
  for (const auto& k : keys) {
    std::string why;
    const GroundingVector* v = table.find(k, &why);
    if (v == nullptr) {
      ++failed;
      err << "warning: no weights for (" << k.first << ", " << k.second << "): " << why << '\n';
      continue;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (format == ReportFormat::kCsv) {
        text << csv_field(k.first) << ',' << csv_field(k.second) << ',' << i << ','
             << format_double(v->scores[i]) << '\n';
      } else {
        doc["rows"].push_back({{"image_id", k.first},
                               {"caption_id", k.second},
                               {"region_index", i},
                               {"grounding_score", v->scores[i]}});
      }
    }
  }
  if (format == ReportFormat::kJson) text << doc.dump(2) << '\n';
  emit(cfg, text.str(), out);
  report_cache(*grounder, err);
  return !keys.empty() && failed == keys.size() ? kExitDegenerateOnly : kExitOk;
}

// ---------------------------------------------------------------------------
// Text baselines

std::vector<TokenizedCaption> tokenize_all(const std::vector<Caption>& captions,
                                           std::span<const std::size_t> subset = {}) {
  std::vector<TokenizedCaption> out;
  if (subset.empty()) {
    for (const auto& c : captions) out.push_back(tokenize(c.text));
  } else {
    for (std::size_t k : subset) out.push_back(tokenize(captions.at(k).text));
  }
  return out;
}

// `subsets`, when nonempty, holds per-row reference index lists.
std::vector<BaselineRow> baseline_rows(const std::vector<Row>& rows,
                                       std::span<const std::vector<std::size_t>> subsets = {}) {
  std::vector<std::vector<TokenizedCaption>> refs(rows.size());
  std::vector<std::vector<TokenizedCaption>> corpus;
  std::set<std::string> images;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    refs[i] = subsets.empty() ? tokenize_all(*rows[i].references)
                              : tokenize_all(*rows[i].references, subsets[i]);
    // One document per image: rows of the same image share references.
    if (images.insert(rows[i].key.image_id).second) corpus.push_back(refs[i]);
  }
  if (!rows.empty() && corpus.empty()) throw UsageError("empty reference corpus");
  const CorpusIdf idf = build_idf(corpus);

  std::vector<BaselineRow> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TokenizedCaption cand = tokenize(rows[i].candidate->text);
    BaselineRow b;
    b.key = rows[i].key;
    const BaselineScore b1 = bleu(cand, refs[i], 1);
    b.bleu1 = b1.value;
    b.bleu4 = bleu(cand, refs[i], 4).value;
    b.rouge_l = rouge_l(cand, refs[i]).value;
    b.cider = cider(cand, refs[i], idf).value;
    b.empty_candidate = b1.empty_candidate;
    out.push_back(std::move(b));
  }
  return out;
}

int cmd_baselines(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ReportFormat format = parse_report_format(cfg.format);
  const Inputs in = load_inputs(cfg);
  if (in.rows.empty()) throw UsageError("empty corpus: the dataset has no records");
  const std::vector<BaselineRow> rows = baseline_rows(in.rows);
  std::ostringstream text;
  write_baseline_report(text, rows, format);
  emit(cfg, text.str(), out);
  std::size_t empty = 0;
  for (const auto& r : rows) empty += r.empty_candidate ? 1 : 0;
  err << "scored " << rows.size() << " captions with baselines (" << empty
      << " empty candidates)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Metric collection for evaluate / map-groups

using ColumnKey = std::pair<std::size_t, char>;

ColumnKey column_key(const RowKey& k) { return {k.index, k.slot.value_or('\0')}; }

std::vector<MetricColumn> tiger_columns(const std::vector<ScoreRow>& rows) {
  std::vector<MetricColumn> cols;
  for (const char* name : kTigerMetrics) cols.push_back({name, {}});
  for (const auto& r : rows) {
    const auto key = column_key(r.key);
    if (!r.outcome.ok()) {
      for (auto& c : cols) c.values[key] = std::nullopt;
      continue;
    }
    cols[0].values[key] = r.outcome.breakdown->rrs;
    cols[1].values[key] = r.outcome.breakdown->wds;
    cols[2].values[key] = r.outcome.breakdown->tiger;
  }
  return cols;
}

std::vector<MetricColumn> baseline_columns(const std::vector<BaselineRow>& rows) {
  std::vector<MetricColumn> cols;
  for (const char* name : kBaselineMetrics) cols.push_back({name, {}});
  for (const auto& r : rows) {
    const auto key = column_key(r.key);
    cols[0].values[key] = r.bleu1;
    cols[1].values[key] = r.bleu4;
    cols[2].values[key] = r.rouge_l;
    cols[3].values[key] = r.cider;
  }
  return cols;
}

std::vector<MetricColumn> collect_columns(const RunConfig& cfg, const Inputs& in,
                                          std::ostream& err) {
  std::vector<MetricColumn> cols;
  if (!cfg.scores.empty()) {
    for (const auto& path : cfg.scores) {
      std::ifstream file(path);
      if (!file) throw IoError("cannot open score report '" + path + "'");
      auto more = read_metric_report(file, path);
      cols.insert(cols.end(), more.begin(), more.end());
    }
    return cols;
  }
  if (!cfg.manifest.empty()) {
    const auto grounder = make_grounder(cfg, err);
    cols = tiger_columns(score_rows(*grounder, in.rows, tiger_config(cfg), cfg.threads));
    report_cache(*grounder, err);
  }
  auto base = baseline_columns(baseline_rows(in.rows));
  cols.insert(cols.end(), base.begin(), base.end());
  return cols;
}

ojson cell_json(const AccuracyCell& c) {
  ojson j{{"correct", c.correct}, {"total", c.total}};
  const auto acc = c.accuracy();
  j["accuracy"] = acc ? ojson(*acc) : ojson(nullptr);
  return j;
}

ojson accuracy_json(const PairwiseAccuracy& acc) {
  ojson j;
  for (PairType t : kPairTypes) j[to_string(t)] = cell_json(acc[t]);
  j["All"] = cell_json(acc.all);
  return j;
}

void accuracy_csv(std::ostream& os, const std::string& metric, const std::string& ref_count,
                  const PairwiseAccuracy& acc) {
  auto line = [&](const char* type, const AccuracyCell& c) {
    const auto a = c.accuracy();
    os << csv_field(metric) << ',' << ref_count << ',' << type << ',' << c.correct << ','
       << c.total << ',' << (a ? format_double(*a) : "undefined") << '\n';
  };
  for (PairType t : kPairTypes) line(to_string(t), acc[t]);
  line("All", acc.all);
}

std::vector<std::pair<double, double>> pair_scores(const MetricColumn& col, std::size_t n_pairs) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<double, double>> scores(n_pairs, {nan, nan});
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const auto a = col.values.find({i, 'a'});
    const auto b = col.values.find({i, 'b'});
    if (a == col.values.end() || b == col.values.end()) {
      throw UsageError("metric '" + col.metric + "' has no score for pair " + std::to_string(i));
    }
    if (a->second) scores[i].first = *a->second;
    if (b->second) scores[i].second = *b->second;
  }
  return scores;
}

std::vector<SweepPoint> sweep_metrics(const RunConfig& cfg, const Inputs& in,
                                      const std::vector<std::string>& metrics,
                                      std::ostream& err, std::vector<std::string>& names) {
  std::vector<PairInstance> pairs;
  std::vector<std::size_t> available;
  for (const auto& p : in.pair_records) {
    pairs.push_back(p.instance());
    available.push_back(p.references.size());
  }
  const std::size_t n = pairs.size();
  auto row_subsets = [&](std::span<const std::vector<std::size_t>> per_pair) {
    std::vector<std::vector<std::size_t>> rows;
    for (std::size_t i = 0; i < n; ++i) {
      rows.push_back(per_pair[i]);
      rows.push_back(per_pair[i]);
    }
    return rows;
  };
  auto split = [&](const std::vector<double>& per_row) {
    std::vector<std::pair<double, double>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {per_row[2 * i], per_row[2 * i + 1]};
    return out;
  };

  std::vector<SweepPoint> points;
  std::shared_ptr<Grounder> grounder;
  std::optional<GroundingTable> table;
  const TigerConfig tcfg = tiger_config(cfg);
  for (const auto& metric : metrics) {
    const bool is_tiger = metric == "rrs" || metric == "wds" || metric == "tiger";
    if (is_tiger && !table) {
      grounder = make_grounder(cfg, err);
      table = compute_groundings(*grounder, keys_for(in.rows), cfg.threads);
    }
    auto scorer = [&](std::span<const std::vector<std::size_t>> per_pair) {
      const auto subsets = row_subsets(per_pair);
      std::vector<double> per_row(in.rows.size());
      if (is_tiger) {
        std::vector<ScoringTask> tasks = tasks_for(in.rows);
        for (std::size_t r = 0; r < tasks.size(); ++r) {
          std::vector<std::string> ids;
          for (std::size_t k : subsets[r]) ids.push_back(tasks[r].reference_ids.at(k));
          tasks[r].reference_ids = std::move(ids);
        }
        const auto outcomes = score_tasks(*table, tasks, tcfg, cfg.threads);
        for (std::size_t r = 0; r < outcomes.size(); ++r) {
          if (!outcomes[r].ok()) {
            per_row[r] = std::numeric_limits<double>::quiet_NaN();
          } else if (metric == "rrs") {
            per_row[r] = outcomes[r].breakdown->rrs;
          } else if (metric == "wds") {
            per_row[r] = outcomes[r].breakdown->wds;
          } else {
            per_row[r] = outcomes[r].breakdown->tiger;
          }
        }
      } else {
        const auto rows = baseline_rows(in.rows, subsets);
        for (std::size_t r = 0; r < rows.size(); ++r) {
          per_row[r] = metric == "bleu1"   ? rows[r].bleu1
                       : metric == "bleu4" ? rows[r].bleu4
                       : metric == "rouge_l" ? rows[r].rouge_l
                                             : rows[r].cider;
        }
      }
      return split(per_row);
    };
    auto curve = reference_sweep(std::span<const PairInstance>(pairs),
                                 std::span<const std::size_t>(available), scorer,
                                 std::span<const std::size_t>(cfg.refs), cfg.seed);
    for (auto& p : curve) {
      names.push_back(metric);
      points.push_back(std::move(p));
    }
  }
  return points;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ReportFormat format = parse_report_format(cfg.format);
  const Inputs in = load_inputs(cfg);
  if (!cfg.refs.empty() && !in.pairs) {
    throw UsageError("--refs sweeps need a pair dataset (--pairs)");
  }
  if (!cfg.refs.empty() && !cfg.scores.empty()) {
    throw UsageError("--refs recomputes scores and cannot be combined with --scores");
  }
  const std::vector<MetricColumn> cols = collect_columns(cfg, in, err);
  std::ostringstream text;
  std::size_t usable_metrics = 0;

  if (!in.pairs) {
    std::vector<MetricReport> reports;
    for (const auto& col : cols) {
      std::vector<double> metric, human;
      std::size_t degenerate = 0;
      for (std::size_t i = 0; i < in.scored.size(); ++i) {
        const auto it = col.values.find({i, '\0'});
        if (it == col.values.end()) {
          throw UsageError("metric '" + col.metric + "' has no score for record " +
                           std::to_string(i));
        }
        if (!it->second) {
          ++degenerate;
          continue;
        }
        metric.push_back(*it->second);
        human.push_back(in.scored[i].human_score);
      }
      if (metric.size() >= 2) {
        reports.push_back(make_metric_report(col.metric, metric, human, degenerate));
        ++usable_metrics;
      } else {
        MetricReport r;
        r.metric = col.metric;
        r.instances = metric.size();
        r.degenerate = degenerate;
        reports.push_back(r);
      }
    }
    if (format == ReportFormat::kCsv) {
      text << "metric,kendall_tau,spearman_rho,instances,degenerate\n";
      for (const auto& r : reports) {
        text << csv_field(r.metric) << ','
             << (r.kendall_tau ? format_double(*r.kendall_tau) : "undefined") << ','
             << (r.spearman_rho ? format_double(*r.spearman_rho) : "undefined") << ','
             << r.instances << ',' << r.degenerate << '\n';
      }
    } else {
      ojson doc;
      doc["kind"] = "correlation";
      doc["metrics"] = ojson::array();
      for (const auto& r : reports) {
        doc["metrics"].push_back(
            {{"metric", r.metric},
             {"kendall_tau", r.kendall_tau ? ojson(*r.kendall_tau) : ojson(nullptr)},
             {"spearman_rho", r.spearman_rho ? ojson(*r.spearman_rho) : ojson(nullptr)},
             {"instances", r.instances},
             {"degenerate", r.degenerate}});
      }
      text << doc.dump(2) << '\n';
    }
  } else {
    std::vector<PairInstance> pairs;
    for (const auto& p : in.pair_records) pairs.push_back(p.instance());
    std::vector<std::pair<std::string, PairwiseAccuracy>> tables;
    std::vector<std::string> metric_names;
    for (const auto& col : cols) {
      const auto scores = pair_scores(col, pairs.size());
      tables.emplace_back(col.metric, pairwise_accuracy(pairs, scores));
      metric_names.push_back(col.metric);
      if (tables.back().second.all.total > 0) ++usable_metrics;
    }
    std::vector<std::string> sweep_names;
    const std::vector<SweepPoint> sweep =
        cfg.refs.empty() ? std::vector<SweepPoint>{}
                         : sweep_metrics(cfg, in, metric_names, err, sweep_names);
    if (format == ReportFormat::kCsv) {
      text << "metric,ref_count,pair_type,correct,total,accuracy\n";
      for (const auto& [metric, acc] : tables) accuracy_csv(text, metric, "", acc);
      for (std::size_t i = 0; i < sweep.size(); ++i) {
        accuracy_csv(text, sweep_names[i], std::to_string(sweep[i].ref_count), sweep[i].accuracy);
      }
    } else {
      ojson doc;
      doc["kind"] = "pairwise-accuracy";
      doc["metrics"] = ojson::array();
      for (const auto& [metric, acc] : tables) {
        doc["metrics"].push_back(
            {{"metric", metric}, {"excluded", acc.excluded}, {"accuracy", accuracy_json(acc)}});
      }
      if (!cfg.refs.empty()) {
        doc["seed"] = cfg.seed;
        doc["sweep"] = ojson::array();
        for (std::size_t i = 0; i < sweep.size(); ++i) {
          doc["sweep"].push_back({{"metric", sweep_names[i]},
                                  {"ref_count", sweep[i].ref_count},
                                  {"clamped_images", sweep[i].clamped_images},
                                  {"excluded", sweep[i].accuracy.excluded},
                                  {"accuracy", accuracy_json(sweep[i].accuracy)}});
        }
      }
      text << doc.dump(2) << '\n';
    }
    for (const auto& p : sweep) {
      if (p.clamped_images > 0) {
        err << "warning: " << p.clamped_images << " images have fewer than " << p.ref_count
            << " references; all of theirs were used\n";
      }
    }
  }
  emit(cfg, text.str(), out);
  return usable_metrics == 0 ? kExitDegenerateOnly : kExitOk;
}

int cmd_map_groups(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ReportFormat format = parse_report_format(cfg.format);
  if (cfg.dataset.empty()) throw UsageError("map-groups needs a scored dataset (--dataset)");
  const Inputs in = load_inputs(cfg);
  const std::vector<MetricColumn> cols = collect_columns(cfg, in, err);
  const auto col = std::find_if(cols.begin(), cols.end(),
                                [&](const MetricColumn& c) { return c.metric == cfg.metric; });
  if (col == cols.end()) throw UsageError("metric '" + cfg.metric + "' is not available");

  std::vector<std::size_t> used;
  std::vector<double> metric, human;
  for (std::size_t i = 0; i < in.scored.size(); ++i) {
    const auto it = col->values.find({i, '\0'});
    if (it == col->values.end() || !it->second) continue;
    used.push_back(i);
    metric.push_back(*it->second);
    human.push_back(in.scored[i].human_score);
  }
  const std::set<double> levels(human.begin(), human.end());
  if (levels.size() < 2) {
    err << "error: fewer than two distinct human scores among usable instances\n";
    return kExitDegenerateOnly;
  }
  const std::vector<double> groups =
      map_score_groups<double>(metric, std::span<const double>(human), levels.size());

  std::map<double, std::size_t> differences;
  for (std::size_t k = 0; k < used.size(); ++k) ++differences[groups[k] - human[k]];

  std::ostringstream text;
  if (format == ReportFormat::kCsv) {
    text << "index,image_id,caption_id,metric_score,human_score,group\n";
    for (std::size_t k = 0; k < used.size(); ++k) {
      const auto& r = in.scored[used[k]];
      text << used[k] << ',' << csv_field(r.image_id) << ',' << csv_field(r.candidate.id) << ','
           << format_double(metric[k]) << ',' << format_double(human[k]) << ','
           << format_double(groups[k]) << '\n';
    }
  } else {
    ojson doc;
    doc["kind"] = "score-groups";
    doc["metric"] = cfg.metric;
    doc["levels"] = std::vector<double>(levels.begin(), levels.end());
    doc["rows"] = ojson::array();
    for (std::size_t k = 0; k < used.size(); ++k) {
      const auto& r = in.scored[used[k]];
      doc["rows"].push_back({{"index", used[k]},
                             {"image_id", r.image_id},
                             {"caption_id", r.candidate.id},
                             {"metric_score", metric[k]},
                             {"human_score", human[k]},
                             {"group", groups[k]}});
    }
    doc["difference_histogram"] = ojson::array();
    for (const auto& [diff, count] : differences) {
      doc["difference_histogram"].push_back({{"difference", diff}, {"count", count}});
    }
    text << doc.dump(2) << '\n';
  }
  emit(cfg, text.str(), out);
  return kExitOk;
}

void error_summary(std::ostream& out, std::ostream& err, const char* kind,
                   const std::string& message) {
  err << "error: " << message << '\n';
  out << ojson{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"TIGEr caption metric engine and meta-evaluation harness", "tiger"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool scoring) {
    sub->add_option("--dataset", cfg.dataset, "Scored JSONL dataset");
    sub->add_option("--pairs", cfg.pairs, "Pairwise JSONL dataset");
    sub->add_option("--out", cfg.out, "Write the report here instead of stdout");
    sub->add_option("--format", cfg.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
    if (scoring) {
      sub->add_option("--manifest", cfg.manifest, "Feature manifest (JSON)");
      sub->add_option("--lambda", cfg.lambda, "Attention inverse temperature")
          ->capture_default_str();
      sub->add_option("--tau", cfg.tau, "WDS sigmoid temperature")->capture_default_str();
      sub->add_option("--gain-floor", cfg.gain_floor, "Lower clamp of DCG gains")
          ->capture_default_str();
      sub->add_option("--threads", cfg.threads, "Worker threads")
          ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
    }
  };

  auto* ground = app.add_subcommand("ground", "Compute grounding vectors");
  add_common(ground, true);
  auto* score = app.add_subcommand("score", "Score candidates with TIGEr");
  add_common(score, true);
  auto* baselines = app.add_subcommand("baselines", "Score candidates with BLEU/ROUGE-L/CIDEr");
  add_common(baselines, false);
  auto* evaluate = app.add_subcommand("evaluate", "Compare metrics with human judgments");
  add_common(evaluate, true);
  evaluate->add_option("--scores", cfg.scores, "Score report(s) to evaluate instead of "
                                               "recomputing");
  evaluate->add_option("--refs", cfg.refs, "Reference counts to sweep, e.g. 1,5,10")
      ->delimiter(',');
  evaluate->add_option("--seed", cfg.seed, "Seed for reference subset sampling");
  auto* groups = app.add_subcommand("map-groups", "Map metric scores onto the human scale");
  add_common(groups, true);
  groups->add_option("--scores", cfg.scores, "Score report(s) to read instead of recomputing");
  groups->add_option("--metric", cfg.metric, "Metric to map")->capture_default_str();
  auto* weights = app.add_subcommand("export-weights", "Dump per-region grounding weights");
  add_common(weights, true);

  if (!args.empty() && !args[0].starts_with("-")) {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == args[0];
    if (!known) {
      error_summary(out, err, "validation", "unknown subcommand '" + args[0] + "'");
      return kExitValidation;
    }
  }

  std::vector<std::string> storage = args;
  std::vector<char*> argv;
  std::string program = "tiger";
  argv.push_back(program.data());
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out, help_err;
    const int code = app.exit(e, help_out, help_err);
    if (code == 0) {
      out << help_out.str();
      return kExitOk;
    }
    err << help_out.str() << help_err.str();
    error_summary(out, err, "validation", e.what());
    return kExitValidation;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (cfg.subcommand == "ground") return cmd_ground(cfg, out, err);
    if (cfg.subcommand == "score") return cmd_score(cfg, out, err);
    if (cfg.subcommand == "baselines") return cmd_baselines(cfg, out, err);
    if (cfg.subcommand == "evaluate") return cmd_evaluate(cfg, out, err);
    if (cfg.subcommand == "map-groups") return cmd_map_groups(cfg, out, err);
    return cmd_export_weights(cfg, out, err);
  } catch (const IoError& e) {
    error_summary(out, err, "io", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    error_summary(out, err, "validation", e.what());
    return kExitValidation;
  }
}

}  // namespace tiger::cli
