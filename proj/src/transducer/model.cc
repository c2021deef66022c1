// src/transducer/model.cc

// Copyright 2026  The pcasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pcasr/transducer/model.h"

#include <cmath>
#include <random>

#include "pcasr/error.h"

namespace pcasr::transducer {

namespace {

void LogSoftmaxRows(Matrix* m) {
  for (Eigen::Index r = 0; r < m->rows(); ++r) {
    auto row = m->row(r);
    const double mx = row.maxCoeff();
    const double lse = mx + std::log((row.array() - mx).exp().sum());
    row.array() -= lse;
  }
}

Matrix TanhDerivative(const Matrix& activation) {
  return (1.0 - activation.array().square()).matrix();
}

template <class T>
void AssertShape(const T& m, Eigen::Index rows, Eigen::Index cols,
                 const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ConfigError("parameter " + name + " has shape " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
}

}  // namespace

ModelWeights ModelWeights::ZerosLike() const {
  ModelWeights out = *this;
  out.SetZero();
  return out;
}

void ModelWeights::SetZero() {
  ForEachParameter(*this, [](const std::string&, auto& t) { t.setZero(); });
}

ModelWeights& ModelWeights::operator+=(const ModelWeights& other) {
  std::vector<const double*> src;
  ForEachParameter(other, [&](const std::string&, const auto& t) {
    src.push_back(t.data());
  });
  size_t i = 0;
  ForEachParameter(*this, [&](const std::string&, auto& t) {
    const double* s = src[i++];
    double* d = t.data();
    for (Eigen::Index k = 0; k < t.size(); ++k) d[k] += s[k];
  });
  return *this;
}

ModelWeights& ModelWeights::operator*=(double scale) {
  ForEachParameter(*this, [&](const std::string&, auto& t) { t *= scale; });
  return *this;
}

double ModelWeights::SquaredNorm() const {
  double total = 0.0;
  ForEachParameter(*this, [&](const std::string&, const auto& t) {
    total += t.squaredNorm();
  });
  return total;
}

size_t ModelWeights::ParameterCount() const {
  size_t total = 0;
  ForEachParameter(*this, [&](const std::string&, const auto& t) {
    total += static_cast<size_t>(t.size());
  });
  return total;
}

bool ModelWeights::operator==(const ModelWeights& other) const {
  std::vector<std::pair<const double*, Eigen::Index>> a, b;
  ForEachParameter(*this, [&](const std::string&, const auto& t) {
    a.emplace_back(t.data(), t.size());
  });
  ForEachParameter(other, [&](const std::string&, const auto& t) {
    b.emplace_back(t.data(), t.size());
  });
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].second != b[i].second) return false;
    for (Eigen::Index k = 0; k < a[i].second; ++k) {
      if (a[i].first[k] != b[i].first[k]) return false;
    }
  }
  return true;
}

TransducerModel::TransducerModel(const ModelConfig& config) : config_(config) {
  config_.Validate();
  const auto A = static_cast<Eigen::Index>(config_.input_dim);
  const auto C = static_cast<Eigen::Index>(config_.encoder_hidden);
  const auto K1 = static_cast<Eigen::Index>(config_.encoder_kernel);
  const auto K2 = static_cast<Eigen::Index>(config_.encoder_context_kernel);
  EncoderWeights& e = weights_.encoder;
  e.conv1 = Matrix::Zero(C, K1 * A);
  e.conv1_bias = RowVector::Zero(C);
  e.conv2 = Matrix::Zero(C, K2 * C);
  e.conv2_bias = RowVector::Zero(C);
  e.proj = Matrix::Zero(C, C);
  e.proj_bias = RowVector::Zero(C);

  const auto V = static_cast<Eigen::Index>(config_.vocab_size);
  const auto D = static_cast<Eigen::Index>(config_.token_embed_dim);
  const auto P = static_cast<Eigen::Index>(config_.predictor_hidden);
  const auto J = static_cast<Eigen::Index>(config_.joiner_hidden);
  const size_t n_dec =
      config_.architecture == Architecture::kTwoDecoder ? 2 : 1;
  for (size_t d = 0; d < n_dec; ++d) {
    DecoderWeights dec;
    if (d == 0 || !config_.share_token_embedding) {
      dec.token_embedding = Matrix::Zero(V, D);
    }
    dec.predictor = Matrix::Zero(P, static_cast<Eigen::Index>(PredictorInputDim()));
    dec.predictor_bias = RowVector::Zero(P);
    dec.join_encoder = Matrix::Zero(J, C);
    dec.join_predictor = Matrix::Zero(J, P);
    dec.join_bias = RowVector::Zero(J);
    dec.output = Matrix::Zero(V, J);
    dec.output_bias = RowVector::Zero(V);
    weights_.decoders.push_back(std::move(dec));
  }
  if (config_.architecture == Architecture::kConditionedPredictor) {
    weights_.mode_embedding =
        Matrix::Zero(2, static_cast<Eigen::Index>(config_.mode_embed_dim));
  }
}

TransducerModel TransducerModel::Zeros(const ModelConfig& config) {
  return TransducerModel(config);
}

TransducerModel::TransducerModel(const ModelConfig& config, uint64_t seed)
    : TransducerModel(config) {
  const double A = static_cast<double>(config_.input_dim);
  const double C = static_cast<double>(config_.encoder_hidden);
  const double J_in =
      static_cast<double>(config_.encoder_hidden + config_.predictor_hidden);
  const double J = static_cast<double>(config_.joiner_hidden);
  const double pred_in = static_cast<double>(PredictorInputDim());

  std::mt19937_64 rng(seed);
  auto fill = [&rng](auto& t, double fan_in) {
    const double s = 1.0 / std::sqrt(fan_in);
    std::uniform_real_distribution<double> dist(-s, s);
    for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = dist(rng);
  };
  EncoderWeights& e = weights_.encoder;
  fill(e.conv1, config_.encoder_kernel * A);
  fill(e.conv1_bias, config_.encoder_kernel * A);
  fill(e.conv2, config_.encoder_context_kernel * C);
  fill(e.conv2_bias, config_.encoder_context_kernel * C);
  fill(e.proj, C);
  fill(e.proj_bias, C);
  for (DecoderWeights& dec : weights_.decoders) {
    fill(dec.token_embedding, 1.0);
    fill(dec.predictor, pred_in);
    fill(dec.predictor_bias, pred_in);
    fill(dec.join_encoder, J_in);
    fill(dec.join_predictor, J_in);
    fill(dec.join_bias, J_in);
    fill(dec.output, J);
    fill(dec.output_bias, J);
  }
  if (config_.architecture == Architecture::kConditionedPredictor) {
    fill(weights_.mode_embedding, 1.0);
    const auto D = static_cast<Eigen::Index>(config_.token_embed_dim);
    const auto M = static_cast<Eigen::Index>(config_.mode_embed_dim);
    const auto k = static_cast<Eigen::Index>(config_.predictor_context);
    const Matrix& w = weights_.decoders[0].predictor;
    if (w.rows() < k * M) {
      throw ConfigError(
          "predictor_hidden must be >= predictor_context * mode_embed_dim so "
          "the mode columns can have full column rank");
    }
    Matrix mode_cols(w.rows(), k * M);
    for (Eigen::Index j = 0; j < k; ++j) {
      mode_cols.middleCols(j * M, M) = w.middleCols(j * (D + M) + D, M);
    }
    Eigen::FullPivLU<Matrix> lu(mode_cols);
    if (lu.rank() != k * M) {
      throw Error("predictor mode columns are rank deficient; use another seed");
    }
  }
}

TransducerModel::TransducerModel(const ModelConfig& config,
                                 ModelWeights weights)
    : TransducerModel(config) {
  ModelWeights expected = std::move(weights_);
  weights_ = std::move(weights);
  if (expected.decoders.size() != weights_.decoders.size()) {
    throw ConfigError("checkpoint has the wrong number of decoders");
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  ForEachParameter(expected, [&](const std::string&, const auto& t) {
    shapes.emplace_back(t.rows(), t.cols());
  });
  size_t i = 0;
  ForEachParameter(weights_, [&](const std::string& name, const auto& t) {
    AssertShape(t, shapes[i].first, shapes[i].second, name);
    if (!t.allFinite()) throw ConfigError("parameter " + name + " is not finite");
    ++i;
  });
}

size_t TransducerModel::PredictorInputDim() const {
  const size_t m = config_.architecture == Architecture::kConditionedPredictor
                       ? config_.mode_embed_dim
                       : 0;
  return config_.predictor_context * (config_.token_embed_dim + m);
}

const Matrix& TransducerModel::TokenEmbedding(size_t decoder) const {
  if (config_.share_token_embedding) return weights_.decoders[0].token_embedding;
  return weights_.decoders[decoder].token_embedding;
}

bool TransducerModel::Supports(ModeId output) const {
  return !(config_.architecture == Architecture::kPunctuatedOnly &&
           output == ModeId::kNormalized);
}

DecoderRoute TransducerModel::RouteFor(ModeId output) const {
  switch (config_.architecture) {
    case Architecture::kPunctuatedOnly:
      if (output == ModeId::kNormalized) {
        throw ConfigError("punctuated-only model has no normalized output");
      }
      return {0, std::nullopt};
    case Architecture::kTwoDecoder:
      return {output == ModeId::kNormalized ? size_t{0} : size_t{1},
              std::nullopt};
    case Architecture::kConditionedPredictor:
      return {0, output};
  }
  return {};
}

void TransducerModel::CheckCondition(std::optional<ModeId> condition) const {
  const bool conditioned =
      config_.architecture == Architecture::kConditionedPredictor;
  if (conditioned && !condition) {
    throw ConfigError("conditioned predictor needs a mode id");
  }
  if (!conditioned && condition) {
    throw ConfigError("mode id given to a model without a conditioned predictor");
  }
}

Matrix TransducerModel::EncodeWithCache(const FeatureSequence& x,
                                        EncoderCache* cache) const {
  x.Validate();
  if (x.dim() != config_.input_dim) {
    throw Error("feature dim " + std::to_string(x.dim()) +
                " does not match model input dim " +
                std::to_string(config_.input_dim));
  }
  const EncoderWeights& e = weights_.encoder;
  const auto L = static_cast<Eigen::Index>(x.length());
  const auto A = static_cast<Eigen::Index>(x.dim());
  const auto ds = static_cast<Eigen::Index>(config_.encoder_downsample);
  const auto K1 = static_cast<Eigen::Index>(config_.encoder_kernel);
  const auto K2 = static_cast<Eigen::Index>(config_.encoder_context_kernel);
  const auto C = static_cast<Eigen::Index>(config_.encoder_hidden);
  const Eigen::Index T = (L + ds - 1) / ds;

  EncoderCache local;
  EncoderCache& c = cache ? *cache : local;
  c.col1 = Matrix::Zero(T, K1 * A);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index j = 0; j < K1; ++j) {
      const Eigen::Index p = t * ds - j;
      if (p >= 0) c.col1.block(t, j * A, 1, A) = x.frames.row(p);
    }
  }
  c.h1 = ((c.col1 * e.conv1.transpose()).rowwise() + e.conv1_bias)
             .array()
             .tanh()
             .matrix();
  c.col2 = Matrix::Zero(T, K2 * C);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index j = 0; j < K2 && t - j >= 0; ++j) {
      c.col2.block(t, j * C, 1, C) = c.h1.row(t - j);
    }
  }
  c.g2 = ((c.col2 * e.conv2.transpose()).rowwise() + e.conv2_bias)
             .array()
             .tanh()
             .matrix();
  c.h2 = c.h1 + c.g2;
  return (c.h2 * e.proj.transpose()).rowwise() + e.proj_bias;
}

Matrix TransducerModel::Encode(const FeatureSequence& x) const {
  return EncodeWithCache(x, nullptr);
}

void TransducerModel::FillPredictorInput(std::span<const int> history,
                                         std::optional<ModeId> condition,
                                         size_t decoder, double* out) const {
  const Matrix& emb = TokenEmbedding(decoder);
  const auto D = static_cast<Eigen::Index>(config_.token_embed_dim);
  const Eigen::Index M =
      condition ? static_cast<Eigen::Index>(config_.mode_embed_dim) : 0;
  const auto k = static_cast<std::ptrdiff_t>(config_.predictor_context);
  const auto n = static_cast<std::ptrdiff_t>(history.size());
  for (std::ptrdiff_t j = 0; j < k; ++j) {
    const std::ptrdiff_t idx = n - k + j;
    const int tok = idx >= 0 ? history[idx] : config_.blank_index;
    if (tok < 0 || static_cast<size_t>(tok) >= config_.vocab_size) {
      throw Error("history token " + std::to_string(tok) + " out of range");
    }
    double* slot = out + j * (D + M);
    Eigen::Map<RowVector>(slot, D) = emb.row(tok);
    if (condition) {
      Eigen::Map<RowVector>(slot + D, M) =
          weights_.mode_embedding.row(static_cast<int>(*condition));
    }
  }
}

RowVector TransducerModel::Predict(std::span<const int> history,
                                   std::optional<ModeId> condition,
                                   size_t decoder) const {
  CheckCondition(condition);
  if (decoder >= num_decoders()) throw Error("decoder index out of range");
  RowVector in(static_cast<Eigen::Index>(PredictorInputDim()));
  FillPredictorInput(history, condition, decoder, in.data());
  const DecoderWeights& dec = weights_.decoders[decoder];
  return ((in * dec.predictor.transpose()) + dec.predictor_bias)
      .array()
      .tanh()
      .matrix();
}

RowVector TransducerModel::Join(const RowVector& encoder_state,
                                const RowVector& predictor_state,
                                size_t decoder) const {
  if (decoder >= num_decoders()) throw Error("decoder index out of range");
  const DecoderWeights& dec = weights_.decoders[decoder];
  if (encoder_state.size() != dec.join_encoder.cols() ||
      predictor_state.size() != dec.join_predictor.cols()) {
    throw Error("joiner input dimension mismatch");
  }
  const RowVector enc_proj = encoder_state * dec.join_encoder.transpose();
  const RowVector pred_proj =
      predictor_state * dec.join_predictor.transpose() + dec.join_bias;
  const RowVector hidden = (enc_proj + pred_proj).array().tanh().matrix();
  Matrix logits = hidden * dec.output.transpose() + dec.output_bias;
  LogSoftmaxRows(&logits);
  return logits.row(0);
}

LogitLattice TransducerModel::DecoderForward(const Matrix& encoded,
                                             std::span<const int> labels,
                                             const DecoderRoute& route,
                                             DecoderCache* cache) const {
  CheckCondition(route.condition);
  for (int y : labels) {
    if (y < 0 || static_cast<size_t>(y) >= config_.vocab_size ||
        y == config_.blank_index) {
      throw Error("label " + std::to_string(y) + " is blank or out of range");
    }
  }
  const DecoderWeights& dec = weights_.decoders[route.decoder];
  const Eigen::Index T = encoded.rows();
  const auto U1 = static_cast<Eigen::Index>(labels.size() + 1);
  const auto k = config_.predictor_context;
  const Eigen::Index J = dec.join_bias.size();

  DecoderCache local;
  DecoderCache& c = cache ? *cache : local;
  c.route = route;
  c.histories.assign(static_cast<size_t>(U1) * k, config_.blank_index);
  c.pred_in.resize(U1, static_cast<Eigen::Index>(PredictorInputDim()));
  for (Eigen::Index u = 0; u < U1; ++u) {
    const auto history = labels.first(static_cast<size_t>(u));
    FillPredictorInput(history, route.condition, route.decoder,
                       c.pred_in.row(u).data());
    for (size_t j = 0; j < k; ++j) {
      const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(u) -
                                 static_cast<std::ptrdiff_t>(k) +
                                 static_cast<std::ptrdiff_t>(j);
      if (idx >= 0) c.histories[u * k + j] = labels[idx];
    }
  }
  c.pred = ((c.pred_in * dec.predictor.transpose()).rowwise() +
            dec.predictor_bias)
               .array()
               .tanh()
               .matrix();
  const Matrix enc_proj = encoded * dec.join_encoder.transpose();
  const Matrix pred_proj =
      (c.pred * dec.join_predictor.transpose()).rowwise() + dec.join_bias;
  c.hidden.resize(T * U1, J);
  for (Eigen::Index t = 0; t < T; ++t) {
    c.hidden.middleRows(t * U1, U1) =
        (pred_proj.rowwise() + enc_proj.row(t)).array().tanh().matrix();
  }
  LogitLattice lattice(static_cast<size_t>(T), static_cast<size_t>(U1),
                       config_.vocab_size);
  lattice.values().noalias() = c.hidden * dec.output.transpose();
  lattice.values().rowwise() += dec.output_bias;
  LogSoftmaxRows(&lattice.values());
  return lattice;
}

LogitLattice TransducerModel::ComputeLattice(const FeatureSequence& x,
                                             std::span<const int> labels,
                                             ModeId output) const {
  return DecoderForward(Encode(x), labels, RouteFor(output), nullptr);
}

void TransducerModel::DecoderBackward(const Matrix& encoded,
                                      const LogitLattice& lattice,
                                      const DecoderCache& c,
                                      const LogitLattice& lattice_grad,
                                      ModelWeights* grad,
                                      Matrix* d_encoded) const {
  const size_t d = c.route.decoder;
  const DecoderWeights& dec = weights_.decoders[d];
  DecoderWeights& gd = grad->decoders[d];
  const Eigen::Index T = encoded.rows();
  const auto U1 = static_cast<Eigen::Index>(lattice.label_positions());

  // Through the log-softmax: dz = g - softmax * sum(g).
  const Matrix& g = lattice_grad.values();
  Matrix d_logits = g;
  d_logits -= (lattice.values().array().exp().colwise() *
               g.rowwise().sum().array())
                  .matrix();
  gd.output.noalias() += d_logits.transpose() * c.hidden;
  gd.output_bias += d_logits.colwise().sum();
  Matrix d_pre = d_logits * dec.output;
  d_pre.array() *= 1.0 - c.hidden.array().square();

  Matrix d_enc_proj(T, d_pre.cols());
  Matrix d_pred_proj = Matrix::Zero(U1, d_pre.cols());
  for (Eigen::Index t = 0; t < T; ++t) {
    auto block = d_pre.middleRows(t * U1, U1);
    d_enc_proj.row(t) = block.colwise().sum();
    d_pred_proj += block;
  }
  gd.join_encoder.noalias() += d_enc_proj.transpose() * encoded;
  d_encoded->noalias() += d_enc_proj * dec.join_encoder;
  gd.join_predictor.noalias() += d_pred_proj.transpose() * c.pred;
  gd.join_bias += d_pred_proj.colwise().sum();

  Matrix d_pred_pre = d_pred_proj * dec.join_predictor;
  d_pred_pre.array() *= TanhDerivative(c.pred).array();
  gd.predictor.noalias() += d_pred_pre.transpose() * c.pred_in;
  gd.predictor_bias += d_pred_pre.colwise().sum();
  const Matrix d_pred_in = d_pred_pre * dec.predictor;

  const auto D = static_cast<Eigen::Index>(config_.token_embed_dim);
  const Eigen::Index M =
      c.route.condition ? static_cast<Eigen::Index>(config_.mode_embed_dim) : 0;
  const auto k = config_.predictor_context;
  Matrix& emb_grad = config_.share_token_embedding
                         ? grad->decoders[0].token_embedding
                         : gd.token_embedding;
  for (Eigen::Index u = 0; u < U1; ++u) {
    for (size_t j = 0; j < k; ++j) {
      const int tok = c.histories[u * k + j];
      const Eigen::Index off = static_cast<Eigen::Index>(j) * (D + M);
      emb_grad.row(tok) += d_pred_in.block(u, off, 1, D);
      if (M > 0) {
        grad->mode_embedding.row(static_cast<int>(*c.route.condition)) +=
            d_pred_in.block(u, off + D, 1, M);
      }
    }
  }
}

void TransducerModel::EncoderBackward(const EncoderCache& c,
                                      const Matrix& d_encoded,
                                      ModelWeights* grad) const {
  const EncoderWeights& e = weights_.encoder;
  EncoderWeights& ge = grad->encoder;
  const Eigen::Index T = d_encoded.rows();
  const auto C = static_cast<Eigen::Index>(config_.encoder_hidden);
  const auto K2 = static_cast<Eigen::Index>(config_.encoder_context_kernel);

  ge.proj.noalias() += d_encoded.transpose() * c.h2;
  ge.proj_bias += d_encoded.colwise().sum();
  Matrix d_h1 = d_encoded * e.proj;  // d loss / d h2, the residual path

  Matrix d_pre2 = d_h1;
  d_pre2.array() *= TanhDerivative(c.g2).array();
  ge.conv2.noalias() += d_pre2.transpose() * c.col2;
  ge.conv2_bias += d_pre2.colwise().sum();
  const Matrix d_col2 = d_pre2 * e.conv2;
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index j = 0; j < K2 && t - j >= 0; ++j) {
      d_h1.row(t - j) += d_col2.block(t, j * C, 1, C);
    }
  }

  Matrix d_pre1 = std::move(d_h1);
  d_pre1.array() *= TanhDerivative(c.h1).array();
  ge.conv1.noalias() += d_pre1.transpose() * c.col1;
  ge.conv1_bias += d_pre1.colwise().sum();
}

}  // namespace pcasr::transducer
