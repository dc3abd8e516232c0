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

#pragma once

// Machine-readable score reports (JSON or CSV). Doubles are written with
// round-trip precision, so a report read back yields bit-identical values.

#include <cstddef>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tiger/baselines.hpp"
#include "tiger/error.hpp"
#include "tiger/grounding.hpp"
#include "tiger/pipeline.hpp"
#include "tiger/tiger.hpp"

namespace tiger {

enum class ReportFormat { kJson, kCsv };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::kJson;
  if (s == "csv") return ReportFormat::kCsv;
  throw UsageError("unknown report format '" + s + "' (expected json or csv)");
}

// Identifies the dataset row a score belongs to: record index plus, for pair
// datasets, which candidate ('a' or 'b').
struct RowKey {
  std::size_t index = 0;
  std::optional<char> slot;
  std::string image_id;
  std::string caption_id;
};

struct ScoreRow {
  RowKey key;
  InstanceOutcome outcome;
};

struct BaselineRow {
  RowKey key;
  double bleu1 = 0.0;
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  double cider = 0.0;
  bool empty_candidate = false;
};

inline constexpr const char* kTigerMetrics[] = {"rrs", "wds", "tiger"};
inline constexpr const char* kBaselineMetrics[] = {"bleu1", "bleu4", "rouge_l", "cider"};

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace detail {

inline nlohmann::ordered_json key_json(const RowKey& k) {
  nlohmann::ordered_json j;
  j["index"] = k.index;
  if (k.slot) j["slot"] = std::string(1, *k.slot);
  j["image_id"] = k.image_id;
  j["caption_id"] = k.caption_id;
  return j;
}

inline std::string key_csv(const RowKey& k) {
  return std::to_string(k.index) + "," + (k.slot ? std::string(1, *k.slot) : "") + "," +
         csv_field(k.image_id) + "," + csv_field(k.caption_id);
}

}  // namespace detail

inline void write_score_report(std::ostream& out, std::span<const ScoreRow> rows,
                               ReportFormat format, const GroundingConfig& gcfg,
                               const TigerConfig& tcfg) {
  if (format == ReportFormat::kCsv) {
    out << "index,slot,image_id,caption_id,status,rrs,wds,d_kl,d_rel,tiger,reason\n";
    for (const auto& r : rows) {
      out << detail::key_csv(r.key) << ',';
      if (r.outcome.ok()) {
        const auto& b = *r.outcome.breakdown;
        out << "ok," << format_double(b.rrs) << ',' << format_double(b.wds) << ','
            << format_double(b.d_kl) << ',' << format_double(b.d_rel) << ','
            << format_double(b.tiger) << ",\n";
      } else {
        out << "skipped,,,,,," << csv_field(r.outcome.skip_reason) << '\n';
      }
    }
    return;
  }
  nlohmann::ordered_json doc;
  doc["kind"] = "tiger-scores";
  doc["lambda"] = gcfg.lambda;
  doc["tau"] = tcfg.tau;
  doc["gain_floor"] = tcfg.gain_floor;
  doc["rows"] = nlohmann::ordered_json::array();
  doc["skipped"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    auto j = detail::key_json(r.key);
    if (r.outcome.ok()) {
      const auto& b = *r.outcome.breakdown;
      j["rrs"] = b.rrs;
      j["wds"] = b.wds;
      j["d_kl"] = b.d_kl;
      j["d_rel"] = b.d_rel;
      j["tiger"] = b.tiger;
      doc["rows"].push_back(std::move(j));
    } else {
      j["reason"] = r.outcome.skip_reason;
      doc["skipped"].push_back(std::move(j));
    }
  }
  out << doc.dump(2) << '\n';
}

inline void write_baseline_report(std::ostream& out, std::span<const BaselineRow> rows,
                                  ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    out << "index,slot,image_id,caption_id,bleu1,bleu4,rouge_l,cider,empty_candidate\n";
    for (const auto& r : rows) {
      out << detail::key_csv(r.key) << ',' << format_double(r.bleu1) << ','
          << format_double(r.bleu4) << ',' << format_double(r.rouge_l) << ','
          << format_double(r.cider) << ',' << (r.empty_candidate ? "true" : "false") << '\n';
    }
    return;
  }
  nlohmann::ordered_json doc;
  doc["kind"] = "baseline-scores";
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    auto j = detail::key_json(r.key);
    j["bleu1"] = r.bleu1;
    j["bleu4"] = r.bleu4;
    j["rouge_l"] = r.rouge_l;
    j["cider"] = r.cider;
    j["empty_candidate"] = r.empty_candidate;
    doc["rows"].push_back(std::move(j));
  }
  out << doc.dump(2) << '\n';
}

/// One metric's values keyed by (index, slot); nullopt marks a skipped row.
struct MetricColumn {
  std::string metric;
  std::map<std::pair<std::size_t, char>, std::optional<double>> values;
};

/// Reads a JSON score report (TIGEr or baselines) into per-metric columns.
inline std::vector<MetricColumn> read_metric_report(std::istream& in, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(source + ": score reports are read as JSON: " + e.what());
  }
  const std::string kind = doc.value("kind", "");
  std::vector<std::string> names;
  if (kind == "tiger-scores") {
    names.assign(std::begin(kTigerMetrics), std::end(kTigerMetrics));
  } else if (kind == "baseline-scores") {
    names.assign(std::begin(kBaselineMetrics), std::end(kBaselineMetrics));
  } else {
    throw UsageError(source + ": unrecognised report kind '" + kind + "'");
  }
  std::vector<MetricColumn> columns(names.size());
  for (std::size_t m = 0; m < names.size(); ++m) columns[m].metric = names[m];

  auto key_of = [&](const nlohmann::json& row) {
    if (!row.contains("index") || !row["index"].is_number_unsigned()) {
      throw UsageError(source + ": report row without an index");
    }
    const char slot = row.contains("slot") ? row["slot"].get<std::string>().at(0) : '\0';
    return std::make_pair(row["index"].get<std::size_t>(), slot);
  };
  for (const auto& row : doc.at("rows")) {
    const auto key = key_of(row);
    for (auto& col : columns) {
      if (!row.contains(col.metric) || !row[col.metric].is_number()) {
        throw UsageError(source + ": row " + std::to_string(key.first) + " lacks '" +
                         col.metric + "'");
      }
      col.values[key] = row[col.metric].get<double>();
    }
  }
  if (doc.contains("skipped")) {
    for (const auto& row : doc["skipped"]) {
      const auto key = key_of(row);
      for (auto& col : columns) col.values[key] = std::nullopt;
    }
  }
  return columns;
}

}  // namespace tiger
