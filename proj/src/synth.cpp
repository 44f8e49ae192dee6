// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>

#include "binary_io.hpp"
#include "milvad/error.hpp"
#include "milvad/eval.hpp"
#include "milvad/pooling_loss.hpp"

namespace milvad {
namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t purpose, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    purpose, stream};
  return std::mt19937_64(seq);
}

std::string video_name(std::uint32_t stream, char kind, std::size_t index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "s%u_%c%04zu", stream, kind, index);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (num_segments < 1) throw_invalid("num_segments must be >= 1");
  if (i3d_dim < 1 || tsf_dim < 1) throw_invalid("feature dims must be >= 1");
  if (anomalous_segments_per_video > num_segments) {
    throw_invalid("anomalous_segments_per_video exceeds num_segments");
  }
  if (num_anomalous > 0 && anomalous_segments_per_video < 1) {
    throw_invalid("anomalous videos need at least one planted segment");
  }
  if (!std::isfinite(signal_shift) || signal_shift < 0.0) {
    throw_invalid("signal_shift must be finite and non-negative");
  }
}

std::string GroundTruthMask::to_text() const {
  std::string out;
  for (const auto& entry : entries) {
    out += entry.video_id;
    for (std::size_t s : entry.segments) out += ' ' + std::to_string(s);
    out += '\n';
  }
  return out;
}

void write_masks(const std::filesystem::path& path, const GroundTruthMask& masks) {
  const std::string text = masks.to_text();
  detail::write_file(path, std::span<const std::uint8_t>(
                               reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<double> planted_direction(const SynthConfig& config) {
  config.validate();
  auto rng = make_rng(config.seed, 0x64697200u, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(config.i3d_dim + config.tsf_dim);
  double norm = 0.0;
  do {
    for (double& x : u) x = normal(rng);
    norm = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
  } while (norm == 0.0);
  for (double& x : u) x /= norm;
  return u;
}

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  const std::vector<double> direction = planted_direction(config);
  const std::size_t width = config.i3d_dim + config.tsf_dim;
  const double magnitude = config.signal_shift * std::sqrt(static_cast<double>(width));

  auto rng = make_rng(config.seed, 0x73616d70u, config.stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> all_segments(config.num_segments);
  std::iota(all_segments.begin(), all_segments.end(), std::size_t{0});

  SynthDataset data;
  const std::size_t total = config.num_normal + config.num_anomalous;
  data.bags.reserve(total);
  std::vector<double> row(width);
  for (std::size_t v = 0; v < total; ++v) {
    const bool anomalous = v >= config.num_normal;
    SegmentFeatureBag bag;
    bag.video_id = anomalous ? video_name(config.stream, 'a', v - config.num_normal)
                             : video_name(config.stream, 'n', v);
    bag.label = anomalous ? 1 : 0;
    bag.num_segments = config.num_segments;
    bag.i3d_dim = config.i3d_dim;
    bag.tsf_dim = config.tsf_dim;

    std::vector<std::size_t> planted;
    if (anomalous) {
      std::sample(all_segments.begin(), all_segments.end(), std::back_inserter(planted),
                  static_cast<std::ptrdiff_t>(config.anomalous_segments_per_video), rng);
      data.masks.entries.push_back({bag.video_id, planted});
    }

    bag.i3d_features.reserve(config.num_segments * config.i3d_dim);
    bag.tsf_features.reserve(config.num_segments * config.tsf_dim);
    for (std::size_t s = 0; s < config.num_segments; ++s) {
      for (double& x : row) x = normal(rng);
      if (std::binary_search(planted.begin(), planted.end(), s)) {
        for (std::size_t c = 0; c < width; ++c) row[c] += magnitude * direction[c];
      }
      for (std::size_t c = 0; c < config.i3d_dim; ++c) bag.i3d_features.push_back(static_cast<float>(row[c]));
      for (std::size_t c = config.i3d_dim; c < width; ++c) bag.tsf_features.push_back(static_cast<float>(row[c]));
    }
    data.bags.push_back(std::move(bag));
  }
  return data;
}

double oracle_auc(std::span<const SegmentFeatureBag> bags, const GroundTruthMask& masks,
                  const SynthConfig& config, std::size_t k) {
  const std::vector<double> direction = planted_direction(config);

  std::size_t mask_index = 0;
  for (const auto& bag : bags) {
    if (bag.i3d_dim != config.i3d_dim || bag.tsf_dim != config.tsf_dim) {
      throw_invalid("video '" + bag.video_id + "' dims do not match the synth config");
    }
    if (bag.label == 0) continue;
    if (mask_index >= masks.entries.size() || masks.entries[mask_index].video_id != bag.video_id) {
      throw_invalid("no ground-truth mask entry for anomalous video '" + bag.video_id + "'");
    }
    const auto& segments = masks.entries[mask_index].segments;
    if (segments.size() != config.anomalous_segments_per_video ||
        std::any_of(segments.begin(), segments.end(),
                    [&](std::size_t s) { return s >= bag.num_segments; })) {
      throw_invalid("ground-truth mask for '" + bag.video_id + "' does not match the config");
    }
    ++mask_index;
  }
  if (mask_index != masks.entries.size()) throw_invalid("ground-truth mask has extra entries");

  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& bag : bags) {
    if (k < 1 || k > bag.num_segments) throw_invalid("oracle k out of range");
    std::vector<double> projections(bag.num_segments);
    for (std::size_t s = 0; s < bag.num_segments; ++s) {
      double p = 0.0;
      const auto i3d = bag.i3d_row(s);
      const auto tsf = bag.tsf_row(s);
      for (std::size_t c = 0; c < bag.i3d_dim; ++c) p += i3d[c] * direction[c];
      for (std::size_t c = 0; c < bag.tsf_dim; ++c) p += tsf[c] * direction[bag.i3d_dim + c];
      projections[s] = p;
    }
    std::partial_sort(projections.begin(), projections.begin() + static_cast<std::ptrdiff_t>(k),
                      projections.end(), std::greater<>());
    scores.push_back(std::accumulate(projections.begin(), projections.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
                     static_cast<double>(k));
    labels.push_back(bag.label);
  }
  return roc_auc(scores, labels);
}

double composite_loss(const HeadParameters& params, const FusedBag& bag, std::size_t k, int y) {
  const HeadOutput out = head_forward(bag.features, params);
  const PoolResult pooled =
      topk_pool(std::span<const double>(out.scores.data(), static_cast<std::size_t>(out.scores.size())), k);
  return bce_from_logit(pooled.logit, y).loss;
}

double finite_diff_loss(const HeadParameters& params, const FusedBag& bag, std::size_t k, int y,
                        std::size_t coordinate, double h) {
  if (!(h > 0.0)) throw_invalid("finite-difference step must be positive");
  if (coordinate >= params.num_parameters()) {
    throw_invalid("parameter coordinate " + std::to_string(coordinate) + " out of range");
  }
  HeadParameters shifted = params;
  const double original = params.coordinate(coordinate);
  shifted.coordinate(coordinate) = original + h;
  const double plus = composite_loss(shifted, bag, k, y);
  shifted.coordinate(coordinate) = original - h;
  const double minus = composite_loss(shifted, bag, k, y);
  return (plus - minus) / (2.0 * h);
}

}  // namespace milvad
