#ifndef EGODOA_MODEL_HPP_
#define EGODOA_MODEL_HPP_

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "egodoa/autodiff.hpp"
#include "egodoa/doa_target.hpp"

namespace egodoa {

struct ModelConfig {
  int depth = 2;
  int heads = 4;
  int hidden = 128;
  int ff = 256;
  int audio_len = 22;        // L_a
  int visual_len = 196;      // L_v
  int audio_dim = 96;        // GCC-PHAT lag coefficients
  int visual_dim = 768;      // 3 * 16 * 16
  int bins = kDoaBins;
  bool pre_ln = false;       // default matches the post-LN equations
  std::uint64_t seed = 0;

  int head_dim() const { return hidden / heads; }
};

class ParameterStore {
 public:
  ad::Tensor& at(const std::string& name);
  const ad::Tensor& at(const std::string& name) const;
  void insert(const std::string& name, ad::Tensor t);
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;
  void zero_grad();
  std::size_t size() const { return params_.size(); }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, ad::Tensor> params_;
};

ParameterStore init_params(const ModelConfig& cfg);

// Token sequences are (1 + L) x hidden matrices; row 0 is the CLS token.
ad::Tensor embed_audio(const Eigen::MatrixXd& gcc_feature,
                       const ModelConfig& cfg, const ParameterStore& params);
ad::Tensor embed_visual(const Eigen::MatrixXd& patches, const ModelConfig& cfg,
                        const ParameterStore& params);

ad::Tensor msa(const ad::Tensor& z, const ad::Tensor& wq, const ad::Tensor& wk,
               const ad::Tensor& wv, const ad::Tensor& wo, int heads);

ad::Tensor encoder_block(const ad::Tensor& z, const std::string& prefix,
                         const ModelConfig& cfg, const ParameterStore& params);

// Applies all depth blocks of the given modality encoder ("audio"/"visual").
ad::Tensor encode(const ad::Tensor& z0, const std::string& modality,
                  const ModelConfig& cfg, const ParameterStore& params);

struct FusedOutput {
  ad::Tensor posterior;  // 1 x bins, on the simplex
  ad::Tensor cls_audio;  // 1 x hidden, after the cross-attention MSA
  ad::Tensor cls_visual;
};

FusedOutput fuse_predict(const ad::Tensor& z_audio, const ad::Tensor& z_visual,
                         const ModelConfig& cfg, const ParameterStore& params);

ad::Tensor audio_only_predict(const ad::Tensor& z_audio, const ModelConfig& cfg,
                              const ParameterStore& params);

ad::Tensor emd_loss(const Eigen::VectorXd& target, const ad::Tensor& posterior);

struct SphericalMapOutput {
  ad::Tensor channel_a;  // 90 x 180
  ad::Tensor channel_v;  // 90 x 180
  ad::Tensor score;      // 90 x 180, mean of the two channels
};

SphericalMapOutput spherical_head(const ad::Tensor& cls_audio,
                                  const ad::Tensor& cls_visual,
                                  const ParameterStore& params);

ad::Tensor wearer_activity_predict(const ad::Tensor& z_audio,
                                   const ParameterStore& params);

struct TrainChunk {
  Eigen::MatrixXd gcc;      // L_a x audio_dim
  Eigen::MatrixXd patches;  // L_v x visual_dim
  Eigen::VectorXd target;   // bins
  bool in_fov = false;
};

struct SgdOptimizer {
  double lr = 1e-3;
  double momentum = 0.0;
  std::map<std::string, Eigen::MatrixXd> velocity;

  void step(ParameterStore& params);
};

struct StepStats {
  double loss_av = 0.0;
  double loss_ao = 0.0;
  int n_av = 0;
  int n_ao = 0;

  double total() const { return loss_av + loss_ao; }
};

// One separate-training step: in-FOV chunks flow through the fused path,
// out-of-FOV chunks through the audio-only path, one summed EMD loss,
// one gradient step. Throws std::invalid_argument on an empty batch.
StepStats train_step_separate(const std::vector<TrainChunk>& batch,
                              ParameterStore& params, const ModelConfig& cfg,
                              SgdOptimizer& opt);

// Inference helper: argmax-bin prediction following the same split
// (fused when in FOV, audio-only otherwise).
Eigen::VectorXd predict_posterior(const TrainChunk& chunk,
                                  const ModelConfig& cfg,
                                  const ParameterStore& params,
                                  bool use_visual);

}  // namespace egodoa

#endif  // EGODOA_MODEL_HPP_
