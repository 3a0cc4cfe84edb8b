// Copyright 2026 The tracellm Authors.
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

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracellm/corpus.hpp"
#include "tracellm/error.hpp"

namespace tracellm {

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  void add(bool predicted, bool actual) {
    if (predicted && actual) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
    else ++tn;
  }
};

inline double precision(const Confusion& c) {
  return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

inline double recall(const Confusion& c) {
  return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

/// (1 + b^2) P R / (b^2 P + R); 0 when P = R = 0.
inline double f_beta(double p, double r, double beta) {
  const double b2 = beta * beta;
  const double den = b2 * p + r;
  return den == 0.0 ? 0.0 : (1.0 + b2) * p * r / den;
}

struct RunMetrics {
  Confusion confusion;
  double precision = 0, recall = 0, f1 = 0, f2 = 0;
  int run_index = 0;
  int shots = 0;
  std::string strategy;
  std::uint64_t seed = 0;
  std::size_t unparseable = 0;
};

inline RunMetrics metrics_from(const Confusion& c) {
  RunMetrics m;
  m.confusion = c;
  m.precision = precision(c);
  m.recall = recall(c);
  m.f1 = f_beta(m.precision, m.recall, 1.0);
  m.f2 = f_beta(m.precision, m.recall, 2.0);
  return m;
}

/// Key sets of `predictions` and `labels` must be equal.
inline RunMetrics score(const std::map<PairKey, bool>& predictions,
                        const std::map<PairKey, bool>& labels) {
  if (predictions.size() != labels.size()) {
    throw Error("score: " + std::to_string(predictions.size()) + " predictions for " +
                std::to_string(labels.size()) + " labels");
  }
  Confusion c;
  auto it = labels.begin();
  for (const auto& [key, pred] : predictions) {
    if (it->first != key) throw Error("score: key mismatch at " + key.str());
    c.add(pred, it->second);
    ++it;
  }
  return metrics_from(c);
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and sample (n-1) standard deviation; std is 0 for one value.
inline MeanStd mean_std(std::span<const double> xs) {
  if (xs.empty()) throw Error("mean_std of an empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

struct AggregateMetrics {
  MeanStd precision, recall, f1, f2;
  std::size_t n_runs = 0;
};

inline AggregateMetrics aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw Error("aggregate needs at least one run");
  std::vector<double> p, r, f1, f2;
  for (const auto& m : runs) {
    p.push_back(m.precision);
    r.push_back(m.recall);
    f1.push_back(m.f1);
    f2.push_back(m.f2);
  }
  return {mean_std(p), mean_std(r), mean_std(f1), mean_std(f2), runs.size()};
}

inline nlohmann::json to_json(const RunMetrics& m) {
  return {{"run", m.run_index},        {"shots", m.shots},
          {"strategy", m.strategy},    {"seed", m.seed},
          {"tp", m.confusion.tp},      {"fp", m.confusion.fp},
          {"fn", m.confusion.fn},      {"tn", m.confusion.tn},
          {"precision", m.precision},  {"recall", m.recall},
          {"f1", m.f1},                {"f2", m.f2},
          {"unparseable", m.unparseable}};
}

}  // namespace tracellm
