// Copyright 2026 The QHD Authors
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

#include "qhd/qmodel.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "qhd/errors.hpp"

namespace qhd {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes little-endian");

constexpr char kMagic[4] = {'Q', 'H', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("checkpoint: truncated file");
  return v;
}

}  // namespace

QModel::QModel(std::size_t dim, std::size_t n_actions, QModelOptions options)
    : dim_(dim), options_(options) {
  if (dim == 0) throw ConfigError("qmodel: dim must be >= 1");
  if (n_actions == 0) throw ConfigError("qmodel: need at least one action");
  models_.assign(n_actions, ComplexAccumulator(dim));
}

void QModel::check_action(std::size_t action) const {
  if (action >= models_.size()) {
    throw ActionError("qmodel: action " + std::to_string(action) + " out of range [0, " +
                      std::to_string(models_.size()) + ")");
  }
}

const ComplexAccumulator& QModel::model(std::size_t action) const {
  check_action(action);
  return models_[action];
}

ComplexAccumulator& QModel::mutable_model(std::size_t action) {
  check_action(action);
  return models_[action];
}

double QModel::inner(const ComplexAccumulator& m, const EncodedState& s) const {
  const double d = raw_dot(m.view(), s.view());
  return options_.normalize_by_dim ? d : d * static_cast<double>(dim_);
}

double QModel::predict(const EncodedState& s, std::size_t action) const {
  check_action(action);
  if (s.dim() != dim_) throw DimensionError("qmodel: encoded state dim differs from model dim");
  return inner(models_[action], s);
}

std::vector<double> QModel::predict_all(const EncodedState& s) const {
  if (s.dim() != dim_) throw DimensionError("qmodel: encoded state dim differs from model dim");
  std::vector<double> q(models_.size());
  for (std::size_t a = 0; a < models_.size(); ++a) q[a] = inner(models_[a], s);
  return q;
}

void QModel::update(const EncodedState& s, std::size_t action, double q_true, double q_pred,
                    double beta) {
  check_action(action);
  if (s.dim() != dim_) throw DimensionError("qmodel: encoded state dim differs from model dim");
  if (!(beta > 0.0)) throw DomainError("qmodel: learning rate must be positive");
  const double step = beta * (q_true - q_pred);
  if (!std::isfinite(step)) {
    throw DivergenceError("qmodel: non-finite update (q_true=" + std::to_string(q_true) +
                          ", q_pred=" + std::to_string(q_pred) + ", beta=" + std::to_string(beta) +
                          ")");
  }
  if (step == 0.0) return;
  auto& m = models_[action];
  auto re = m.re();
  auto im = m.im();
  const auto v = s.view();
  const double sign = options_.convention == UpdateConvention::kState ? 1.0 : -1.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    re[j] += step * v.re[j];
    im[j] += sign * step * v.im[j];
  }
}

void QModel::save(const std::filesystem::path& path, std::uint64_t encoder_seed) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(dim_));
  write_pod(out, static_cast<std::uint64_t>(models_.size()));
  write_pod(out, encoder_seed);
  write_pod(out, static_cast<std::uint8_t>(options_.normalize_by_dim ? 1 : 0));
  write_pod(out, static_cast<std::uint8_t>(options_.convention == UpdateConvention::kState ? 0 : 1));
  for (const auto& m : models_) {
    out.write(reinterpret_cast<const char*>(m.re().data()),
              static_cast<std::streamsize>(dim_ * sizeof(double)));
    out.write(reinterpret_cast<const char*>(m.im().data()),
              static_cast<std::streamsize>(dim_ * sizeof(double)));
  }
  if (!out) throw IoError("checkpoint: write failed for " + path.string());
}

QModel QModel::load(const std::filesystem::path& path, std::uint64_t* encoder_seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("checkpoint: bad magic in " + path.string());
  }
  if (read_pod<std::uint32_t>(in) != kVersion) throw IoError("checkpoint: unsupported version");
  const auto dim = read_pod<std::uint64_t>(in);
  const auto n_actions = read_pod<std::uint64_t>(in);
  const auto seed = read_pod<std::uint64_t>(in);
  QModelOptions options;
  options.normalize_by_dim = read_pod<std::uint8_t>(in) != 0;
  options.convention =
      read_pod<std::uint8_t>(in) == 0 ? UpdateConvention::kState : UpdateConvention::kConjugate;
  QModel model(dim, n_actions, options);
  for (auto& m : model.models_) {
    in.read(reinterpret_cast<char*>(m.re().data()), static_cast<std::streamsize>(dim * sizeof(double)));
    in.read(reinterpret_cast<char*>(m.im().data()), static_cast<std::streamsize>(dim * sizeof(double)));
    if (!in) throw IoError("checkpoint: truncated model data");
  }
  if (encoder_seed != nullptr) *encoder_seed = seed;
  return model;
}

}  // namespace qhd
