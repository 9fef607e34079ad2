#include "egodoa/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace egodoa {

using ad::Tensor;

ad::Tensor& ParameterStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw std::out_of_range("ParameterStore: unknown parameter " + name);
  }
  return it->second;
}

const ad::Tensor& ParameterStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw std::out_of_range("ParameterStore: unknown parameter " + name);
  }
  return it->second;
}

void ParameterStore::insert(const std::string& name, ad::Tensor t) {
  if (!params_.emplace(name, std::move(t)).second) {
    throw std::invalid_argument("ParameterStore: duplicate parameter " + name);
  }
}

bool ParameterStore::contains(const std::string& name) const {
  return params_.count(name) != 0;
}

std::vector<std::string> ParameterStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [k, v] : params_) out.push_back(k);
  return out;
}

void ParameterStore::zero_grad() {
  for (auto& [k, v] : params_) v.zero_grad();
}

namespace {

Eigen::MatrixXd randn(std::mt19937_64& rng, int rows, int cols, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

Eigen::MatrixXd xavier(std::mt19937_64& rng, int rows, int cols) {
  return randn(rng, rows, cols, std::sqrt(2.0 / (rows + cols)));
}

void add_linear(ParameterStore& p, std::mt19937_64& rng,
                const std::string& prefix, int in, int out) {
  p.insert(prefix + ".W", ad::parameter(xavier(rng, in, out)));
  p.insert(prefix + ".b", ad::parameter(Eigen::MatrixXd::Zero(1, out)));
}

void add_encoder_layer(ParameterStore& p, std::mt19937_64& rng,
                       const std::string& prefix, const ModelConfig& cfg) {
  const int h = cfg.hidden;
  p.insert(prefix + ".Wq", ad::parameter(xavier(rng, h, h)));
  p.insert(prefix + ".Wk", ad::parameter(xavier(rng, h, h)));
  p.insert(prefix + ".Wv", ad::parameter(xavier(rng, h, h)));
  p.insert(prefix + ".Wo", ad::parameter(xavier(rng, h, h)));
  p.insert(prefix + ".ln1.g", ad::parameter(Eigen::MatrixXd::Ones(1, h)));
  p.insert(prefix + ".ln1.b", ad::parameter(Eigen::MatrixXd::Zero(1, h)));
  p.insert(prefix + ".ln2.g", ad::parameter(Eigen::MatrixXd::Ones(1, h)));
  p.insert(prefix + ".ln2.b", ad::parameter(Eigen::MatrixXd::Zero(1, h)));
  add_linear(p, rng, prefix + ".mlp1", h, cfg.ff);
  add_linear(p, rng, prefix + ".mlp2", cfg.ff, h);
}

Tensor linear(const Tensor& x, const ParameterStore& p,
              const std::string& prefix) {
  return ad::add_rowvec(ad::matmul(x, p.at(prefix + ".W")),
                        p.at(prefix + ".b"));
}

Tensor embed(const Eigen::MatrixXd& feat, int expected_len, int expected_dim,
             const std::string& modality, const ModelConfig& cfg,
             const ParameterStore& params) {
  if (feat.rows() != expected_len || feat.cols() != expected_dim) {
    throw std::invalid_argument("embed_" + modality + ": feature shape (" +
                                std::to_string(feat.rows()) + ", " +
                                std::to_string(feat.cols()) +
                                ") does not match config");
  }
  Tensor proj = linear(ad::constant(feat), params, modality + ".embed");
  Tensor tokens = ad::concat_rows({params.at(modality + ".cls"), proj});
  return ad::add(tokens, params.at(modality + ".pos"));
}

}  // namespace

ParameterStore init_params(const ModelConfig& cfg) {
  if (cfg.hidden % cfg.heads != 0) {
    throw std::invalid_argument("init_params: hidden not divisible by heads");
  }
  std::mt19937_64 rng(cfg.seed);
  ParameterStore p;
  const int h = cfg.hidden;

  add_linear(p, rng, "audio.embed", cfg.audio_dim, h);
  p.insert("audio.cls", ad::parameter(randn(rng, 1, h, 0.02)));
  p.insert("audio.pos", ad::parameter(randn(rng, cfg.audio_len + 1, h, 0.02)));
  add_linear(p, rng, "visual.embed", cfg.visual_dim, h);
  p.insert("visual.cls", ad::parameter(randn(rng, 1, h, 0.02)));
  p.insert("visual.pos", ad::parameter(randn(rng, cfg.visual_len + 1, h, 0.02)));

  for (int d = 0; d < cfg.depth; ++d) {
    add_encoder_layer(p, rng, "audio.enc" + std::to_string(d), cfg);
    add_encoder_layer(p, rng, "visual.enc" + std::to_string(d), cfg);
  }

  p.insert("fuse.Wq", ad::parameter(xavier(rng, h, h)));
  p.insert("fuse.Wk", ad::parameter(xavier(rng, h, h)));
  p.insert("fuse.Wv", ad::parameter(xavier(rng, h, h)));
  p.insert("fuse.Wo", ad::parameter(xavier(rng, h, h)));

  add_linear(p, rng, "head.mlp1", 2 * h, cfg.ff);
  add_linear(p, rng, "head.mlp2", cfg.ff, cfg.bins);

  add_linear(p, rng, "sph.a", h, 4050);
  add_linear(p, rng, "sph.v", h, 4050);
  add_linear(p, rng, "wearer", h, 1);
  return p;
}

ad::Tensor embed_audio(const Eigen::MatrixXd& gcc_feature,
                       const ModelConfig& cfg, const ParameterStore& params) {
  return embed(gcc_feature, cfg.audio_len, cfg.audio_dim, "audio", cfg, params);
}

ad::Tensor embed_visual(const Eigen::MatrixXd& patches, const ModelConfig& cfg,
                        const ParameterStore& params) {
  return embed(patches, cfg.visual_len, cfg.visual_dim, "visual", cfg, params);
}

ad::Tensor msa(const ad::Tensor& z, const ad::Tensor& wq, const ad::Tensor& wk,
               const ad::Tensor& wv, const ad::Tensor& wo, int heads) {
  const int h = static_cast<int>(z.cols());
  if (h % heads != 0) throw std::invalid_argument("msa: bad head count");
  const int dk = h / heads;
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(dk));

  Tensor q = ad::matmul(z, wq);
  Tensor k = ad::matmul(z, wk);
  Tensor v = ad::matmul(z, wv);

  std::vector<Tensor> head_outputs;
  head_outputs.reserve(heads);
  for (int i = 0; i < heads; ++i) {
    Tensor qi = ad::slice_cols(q, i * dk, dk);
    Tensor ki = ad::slice_cols(k, i * dk, dk);
    Tensor vi = ad::slice_cols(v, i * dk, dk);
    Tensor att = ad::softmax_rows(
        ad::scale(ad::matmul(qi, ad::transpose(ki)), att_scale));
    head_outputs.push_back(ad::matmul(att, vi));
  }
  return ad::matmul(ad::concat_cols(head_outputs), wo);
}

ad::Tensor encoder_block(const ad::Tensor& z, const std::string& prefix,
                         const ModelConfig& cfg, const ParameterStore& params) {
  const auto& wq = params.at(prefix + ".Wq");
  const auto& wk = params.at(prefix + ".Wk");
  const auto& wv = params.at(prefix + ".Wv");
  const auto& wo = params.at(prefix + ".Wo");
  const auto& g1 = params.at(prefix + ".ln1.g");
  const auto& b1 = params.at(prefix + ".ln1.b");
  const auto& g2 = params.at(prefix + ".ln2.g");
  const auto& b2 = params.at(prefix + ".ln2.b");

  Tensor zhat;
  if (cfg.pre_ln) {
    Tensor att = msa(ad::layernorm_rows(z, g1, b1), wq, wk, wv, wo, cfg.heads);
    zhat = ad::add(att, z);
  } else {
    // Post-LN placement: normalize the sublayer output, then residual add.
    Tensor att = msa(z, wq, wk, wv, wo, cfg.heads);
    zhat = ad::add(ad::layernorm_rows(att, g1, b1), z);
  }

  Tensor mlp_in = cfg.pre_ln ? ad::layernorm_rows(zhat, g2, b2) : zhat;
  Tensor ff = linear(ad::relu(linear(mlp_in, params, prefix + ".mlp1")), params,
                     prefix + ".mlp2");
  if (cfg.pre_ln) return ad::add(ff, zhat);
  return ad::add(ad::layernorm_rows(ff, g2, b2), zhat);
}

ad::Tensor encode(const ad::Tensor& z0, const std::string& modality,
                  const ModelConfig& cfg, const ParameterStore& params) {
  Tensor z = z0;
  for (int d = 0; d < cfg.depth; ++d) {
    z = encoder_block(z, modality + ".enc" + std::to_string(d), cfg, params);
  }
  return z;
}

FusedOutput fuse_predict(const ad::Tensor& z_audio, const ad::Tensor& z_visual,
                         const ModelConfig& cfg, const ParameterStore& params) {
  Tensor joint = ad::concat_rows({z_audio, z_visual});
  Tensor fused = msa(joint, params.at("fuse.Wq"), params.at("fuse.Wk"),
                     params.at("fuse.Wv"), params.at("fuse.Wo"), cfg.heads);

  FusedOutput out;
  out.cls_audio = ad::slice_rows(fused, 0, 1);
  out.cls_visual =
      ad::slice_rows(fused, static_cast<int>(z_audio.rows()), 1);
  Tensor joined = ad::concat_cols({out.cls_audio, out.cls_visual});
  Tensor logits = linear(ad::relu(linear(joined, params, "head.mlp1")), params,
                         "head.mlp2");
  out.posterior = ad::softmax_rows(logits);
  return out;
}

ad::Tensor audio_only_predict(const ad::Tensor& z_audio, const ModelConfig& cfg,
                              const ParameterStore& params) {
  Tensor cls = ad::slice_rows(z_audio, 0, 1);
  // The classifier is shared with the fused path; the visual slot is
  // zero-filled.
  Tensor joined = ad::concat_cols(
      {cls, ad::constant(Eigen::MatrixXd::Zero(1, cfg.hidden))});
  Tensor logits = linear(ad::relu(linear(joined, params, "head.mlp1")), params,
                         "head.mlp2");
  return ad::softmax_rows(logits);
}

ad::Tensor emd_loss(const Eigen::VectorXd& target, const ad::Tensor& posterior) {
  if (target.size() != posterior.cols() || posterior.rows() != 1) {
    throw std::invalid_argument("emd_loss: length mismatch");
  }
  return ad::sum_sq_diff(posterior, ad::constant(target.transpose()));
}

SphericalMapOutput spherical_head(const ad::Tensor& cls_audio,
                                  const ad::Tensor& cls_visual,
                                  const ParameterStore& params) {
  Tensor pa = ad::reshape(linear(cls_audio, params, "sph.a"), 45, 90);
  Tensor pv = ad::reshape(linear(cls_visual, params, "sph.v"), 45, 90);
  SphericalMapOutput out;
  out.channel_a = ad::upsample_bilinear_2x(pa);
  out.channel_v = ad::upsample_bilinear_2x(pv);
  out.score = ad::scale(ad::add(out.channel_a, out.channel_v), 0.5);
  return out;
}

ad::Tensor wearer_activity_predict(const ad::Tensor& z_audio,
                                   const ParameterStore& params) {
  Tensor cls = ad::slice_rows(z_audio, 0, 1);
  return ad::sigmoid(linear(cls, params, "wearer"));
}

void SgdOptimizer::step(ParameterStore& params) {
  for (auto& [name, p] : params) {
    if (p.grad().size() == 0) continue;
    if (momentum > 0.0) {
      auto it = velocity.find(name);
      if (it == velocity.end()) {
        it = velocity
                 .emplace(name, Eigen::MatrixXd::Zero(p.rows(), p.cols()))
                 .first;
      }
      it->second = momentum * it->second - lr * p.grad();
      p.value() += it->second;
    } else {
      p.value() -= lr * p.grad();
    }
  }
}

StepStats train_step_separate(const std::vector<TrainChunk>& batch,
                              ParameterStore& params, const ModelConfig& cfg,
                              SgdOptimizer& opt) {
  if (batch.empty()) {
    throw std::invalid_argument("train_step_separate: empty batch");
  }
  params.zero_grad();

  StepStats stats;
  std::vector<Tensor> losses;
  losses.reserve(batch.size());
  for (const TrainChunk& chunk : batch) {
    Tensor z_a = encode(embed_audio(chunk.gcc, cfg, params), "audio", cfg, params);
    if (chunk.in_fov) {
      Tensor z_v =
          encode(embed_visual(chunk.patches, cfg, params), "visual", cfg, params);
      FusedOutput out = fuse_predict(z_a, z_v, cfg, params);
      Tensor loss = emd_loss(chunk.target, out.posterior);
      stats.loss_av += loss.value()(0, 0);
      ++stats.n_av;
      losses.push_back(loss);
    } else {
      Tensor posterior = audio_only_predict(z_a, cfg, params);
      Tensor loss = emd_loss(chunk.target, posterior);
      stats.loss_ao += loss.value()(0, 0);
      ++stats.n_ao;
      losses.push_back(loss);
    }
  }

  Tensor total = losses[0];
  for (size_t i = 1; i < losses.size(); ++i) total = ad::add(total, losses[i]);
  ad::backward(total);
  opt.step(params);
  return stats;
}

Eigen::VectorXd predict_posterior(const TrainChunk& chunk,
                                  const ModelConfig& cfg,
                                  const ParameterStore& params,
                                  bool use_visual) {
  Tensor z_a = encode(embed_audio(chunk.gcc, cfg, params), "audio", cfg, params);
  if (use_visual) {
    Tensor z_v =
        encode(embed_visual(chunk.patches, cfg, params), "visual", cfg, params);
    return fuse_predict(z_a, z_v, cfg, params).posterior.value().row(0);
  }
  return audio_only_predict(z_a, cfg, params).value().row(0);
}

}  // namespace egodoa
