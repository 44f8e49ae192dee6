// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "milvad/checkpoint.hpp"
#include "milvad/error.hpp"
#include "milvad/mil_head.hpp"
#include "test_support.hpp"

using namespace milvad;

namespace {

// Independent forward pass: plain loops over one segment, no Eigen products.
double reference_score(const HeadParameters& p, const Eigen::VectorXd& x) {
  std::vector<double> a(x.data(), x.data() + x.size());
  for (std::size_t l = 0; l < kNumHeadLayers; ++l) {
    const auto& W = p.layers[l].weight;
    std::vector<double> z(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      double s = p.layers[l].bias(r);
      for (Eigen::Index c = 0; c < W.cols(); ++c) s += W(r, c) * a[static_cast<std::size_t>(c)];
      z[static_cast<std::size_t>(r)] = (l + 1 < kNumHeadLayers && s < 0) ? p.leaky_slope * s : s;
    }
    a = std::move(z);
  }
  return a[0];
}

double weighted_sum(const HeadParameters& p, const Eigen::MatrixXd& x, const Eigen::VectorXd& dscore) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) s += dscore(i) * reference_score(p, x.row(i).transpose());
  return s;
}

double min_abs_preactivation(const ForwardCache& cache) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& z : cache.pre) m = std::min(m, z.cwiseAbs().minCoeff());
  return m;
}

// A 64-bit central difference at h = 1e-5 carries ~1e-11 absolute roundoff,
// so gradients below 1e-3 are compared absolutely (|a - b| < 1e-9).
double rel_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
}

}  // namespace

TEST_CASE("zero parameters give zero scores") {
  const auto params = HeadParameters::zeros(16);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 16);
  CHECK(head_forward(x, params).scores.isZero(0.0));
}

TEST_CASE("hand-computed one-dimensional chain") {
  auto params = HeadParameters::zeros(1, {1, 1, 1}, 0.01);
  for (auto& layer : params.layers) layer.weight(0, 0) = 1.0;
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(1, 1, -1.0);
  // -1 -> -0.01 -> -0.0001 -> -0.000001, then identity.
  CHECK(head_forward(x, params).scores(0) == doctest::Approx(-1e-6).epsilon(1e-12));
}

TEST_CASE("forward matches the loop reference and is deterministic") {
  const auto params = HeadParameters::initialize(12, {7, 5, 3}, 0.01, 11);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd x(6, 12);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = dist(rng);
  const auto first = head_forward(x, params).scores;
  CHECK(first.allFinite());
  CHECK(head_forward(x, params).scores == first);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    CHECK(first(i) == doctest::Approx(reference_score(params, x.row(i).transpose())).epsilon(1e-12));
  }
}

TEST_CASE("shape mismatches are rejected") {
  const auto params = HeadParameters::zeros(8, {4, 4, 4});
  CHECK_THROWS_AS(head_forward(Eigen::MatrixXd::Zero(3, 7), params), Error);
  const auto out = head_forward(Eigen::MatrixXd::Zero(3, 8), params);
  CHECK_THROWS_AS(head_backward(out.cache, params, Eigen::VectorXd::Zero(4)), Error);
  CHECK_THROWS_AS(head_backward(out.cache, HeadParameters::zeros(8, {5, 4, 4}), Eigen::VectorXd::Zero(3)), Error);
  auto broken = params;
  broken.layers[2].weight = Eigen::MatrixXd::Zero(4, 3);
  CHECK_THROWS_AS(broken.validate(), Error);
}

TEST_CASE("zero upstream gradient gives zero gradients") {
  const auto params = HeadParameters::initialize(8, {4, 4, 4}, 0.01, 1);
  const auto out = head_forward(Eigen::MatrixXd::Random(5, 8), params);
  const auto grads = head_backward(out.cache, params, Eigen::VectorXd::Zero(5));
  for (std::size_t i = 0; i < grads.num_parameters(); ++i) REQUIRE(grads.coordinate(i) == 0.0);
  CHECK(grads.features.isZero(0.0));
}

TEST_CASE("property: backward matches central differences of the weighted score sum") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> dist;
  const double h = 1e-5;
  int checked_draws = 0;
  double worst = 0.0;
  while (checked_draws < 100) {
    auto params = HeadParameters::initialize(8, {4, 4, 4}, 0.01, rng());
    for (auto& layer : params.layers) {
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = 0.1 * dist(rng);
    }
    Eigen::MatrixXd x(5, 8);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = dist(rng);
    Eigen::VectorXd dscore(5);
    for (Eigen::Index i = 0; i < 5; ++i) dscore(i) = dist(rng);

    const auto out = head_forward(x, params);
    if (min_abs_preactivation(out.cache) < 1e-3) continue;  // kink exclusion with margin for h
    ++checked_draws;
    const auto grads = head_backward(out.cache, params, dscore);

    for (std::size_t c = 0; c < params.num_parameters(); ++c) {
      auto shifted = params;
      shifted.coordinate(c) = params.coordinate(c) + h;
      const double plus = weighted_sum(shifted, x, dscore);
      shifted.coordinate(c) = params.coordinate(c) - h;
      const double minus = weighted_sum(shifted, x, dscore);
      const double err = rel_error(grads.coordinate(c), (plus - minus) / (2 * h));
      worst = std::max(worst, err);
      INFO("coordinate " << c << " analytic " << grads.coordinate(c));
      REQUIRE(err < 1e-6);
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::MatrixXd xp = x, xm = x;
      xp.data()[i] += h;
      xm.data()[i] -= h;
      const double fd = (weighted_sum(params, xp, dscore) - weighted_sum(params, xm, dscore)) / (2 * h);
      REQUIRE(rel_error(grads.features.data()[i], fd) < 1e-6);
    }
  }
  MESSAGE("worst relative error " << worst);
}

TEST_CASE("linear regime: input gradient is the product of the weight matrices") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(0.1, 1.0);
  auto params = HeadParameters::zeros(6, {5, 4, 3}, 0.01);
  for (auto& layer : params.layers) {
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = pos(rng);
  }
  Eigen::MatrixXd x(4, 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = pos(rng);
  Eigen::VectorXd dscore(4);
  dscore << 0.5, -1.0, 2.0, 0.25;

  const auto out = head_forward(x, params);
  REQUIRE(min_abs_preactivation(out.cache) > 0.0);
  for (const auto& z : out.cache.pre) REQUIRE((z.array() > 0).all());
  const auto grads = head_backward(out.cache, params, dscore);

  const Eigen::RowVectorXd chain = params.layers[3].weight * params.layers[2].weight *
                                   params.layers[1].weight * params.layers[0].weight;
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index c = 0; c < 6; ++c) {
      CHECK(grads.features(i, c) == doctest::Approx(dscore(i) * chain(c)).epsilon(1e-12));
    }
  }

  SUBCASE("positive homogeneity") {
    const auto scaled = head_forward(3.0 * x, params).scores;
    for (Eigen::Index i = 0; i < 4; ++i) {
      CHECK(scaled(i) == doctest::Approx(3.0 * out.scores(i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("kink subgradient uses the slope") {
  auto params = HeadParameters::zeros(1, {1, 1, 1}, 0.2);
  for (auto& layer : params.layers) layer.weight(0, 0) = 1.0;
  const auto out = head_forward(Eigen::MatrixXd::Zero(1, 1), params);
  const auto grads = head_backward(out.cache, params, Eigen::VectorXd::Ones(1));
  CHECK(grads.features(0, 0) == doctest::Approx(0.2 * 0.2 * 0.2));
}

TEST_CASE("property: permuting segments permutes scores") {
  const auto params = HeadParameters::initialize(10, {6, 5, 4}, 0.01, 5);
  std::mt19937_64 rng(6);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(9, 10);
  const auto scores = head_forward(x, params).scores;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::Index> perm(9);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd permuted(9, 10);
    for (Eigen::Index i = 0; i < 9; ++i) permuted.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    const auto ps = head_forward(permuted, params).scores;
    for (Eigen::Index i = 0; i < 9; ++i) REQUIRE(ps(i) == scores(perm[static_cast<std::size_t>(i)]));
  }
}

TEST_CASE("initialization is seeded and bounded") {
  const auto a = HeadParameters::initialize(64, kDefaultHiddenSizes, 0.01, 42);
  const auto b = HeadParameters::initialize(64, kDefaultHiddenSizes, 0.01, 42);
  const auto c = HeadParameters::initialize(64, kDefaultHiddenSizes, 0.01, 43);
  CHECK(a.layers[0].weight == b.layers[0].weight);
  CHECK(a.layers[0].weight != c.layers[0].weight);
  for (const auto& layer : a.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
    CHECK(layer.weight.cwiseAbs().maxCoeff() <= limit);
    CHECK(layer.bias.isZero(0.0));
  }
  CHECK(a.num_parameters() == 64 * 512 + 512 + 512 * 128 + 128 + 128 * 32 + 32 + 32 + 1);
}

TEST_CASE("checkpoint round trip and error taxonomy") {
  milvad::testing::TempDir dir;
  const auto params = HeadParameters::initialize(9, {5, 4, 3}, 0.01, 7);
  save_checkpoint(dir.file("h.ckpt"), params);
  const auto loaded = load_checkpoint(dir.file("h.ckpt"));
  CHECK(loaded.hidden_sizes() == params.hidden_sizes());
  CHECK(loaded.input_dim() == 9);
  for (std::size_t i = 0; i < params.num_parameters(); ++i) {
    REQUIRE(loaded.coordinate(i) == static_cast<double>(static_cast<float>(params.coordinate(i))));
  }
  CHECK(loaded.leaky_slope == static_cast<double>(0.01f));

  const auto bytes = encode_checkpoint(params);
  auto error_of = [](std::vector<std::uint8_t> b) {
    try {
      decode_checkpoint(b);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kOk;
  };
  auto bad = bytes;
  bad[0] = 'X';
  CHECK(error_of(bad) == ErrorCode::kBadMagic);
  bad = bytes;
  bad[14] ^= 1;
  CHECK(error_of(bad) == ErrorCode::kHeaderChecksum);
  bad = bytes;
  bad.pop_back();
  CHECK(error_of(bad) == ErrorCode::kTruncated);
  bad = bytes;
  bad.push_back(0);
  CHECK(error_of(bad) == ErrorCode::kCorruptRecord);
  bad = bytes;
  bad[kCheckpointHeaderSize + 3] = 0x7f;  // exponent all ones
  bad[kCheckpointHeaderSize + 2] = 0xc0;
  CHECK(error_of(bad) == ErrorCode::kNonFinite);
}
