#pragma once

#include <cstdint>
#include <vector>

#include "camid/types.hpp"

namespace camid {

struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;

    static Tensor zeros(std::vector<int> shape);
    long size() const { return static_cast<long>(v.size()); }
};

struct ConvBlockSpec {
    int filters = 0;
    bool pool_after = false;  // 2x2 max pool, stride 2, floor on odd dims
};

// conv blocks (3x3 valid + ReLU, optional pool) -> flatten -> dense + ReLU
// -> dense -> softmax.
struct CnnSpec {
    int input_height = 128;
    int input_width = 128;
    int input_channels = 3;
    std::vector<ConvBlockSpec> conv_blocks{{32, true}, {64, true}, {128, false}};
    int dense_units = 64;
    int num_classes = 4;

    struct StageShape {
        int h = 0, w = 0, c = 0;      // after conv (+ pool when configured)
        int conv_h = 0, conv_w = 0;   // after conv, before pool
    };
    // Throws ConfigError if any stage collapses below 1x1.
    std::vector<StageShape> stage_shapes() const;
    long flatten_dim() const;
    void validate() const;
};

CnnSpec default_cnn_spec(int num_classes = 4);

// Weight layout: conv_w[i] has shape {F, 3, 3, C}; dense weights {out, in}.
struct CnnParams {
    std::vector<Tensor> conv_w;
    std::vector<Tensor> conv_b;
    Tensor dense1_w, dense1_b;
    Tensor dense2_w, dense2_b;

    std::vector<Tensor*> tensors();
    std::vector<const Tensor*> tensors() const;
};

// Glorot-uniform weights, zero biases, deterministic fill order.
CnnParams glorot_init(const CnnSpec& spec, std::uint64_t seed);
CnnParams zeros_like(const CnnParams& params);

struct StageCache {
    Tensor relu_out;             // N,h,w,f after conv+ReLU
    Tensor pooled;               // N,ph,pw,f when pooled
    std::vector<long> pool_src;  // flat index into relu_out per pooled element
    bool has_pool = false;
};

struct BatchActivations {
    bool valid = false;
    int batch = 0;
    Tensor input;  // N,H,W,C
    std::vector<StageCache> stages;
    Tensor dense1_relu;  // N,units
    Grid logits;         // N x classes
    Grid probs;          // N x classes, rows sum to 1
};

// Inputs must match the spec's dims exactly and lie in [0,1].
// Returns class probabilities; fills `cache` when non-null.
Grid cnn_forward(const CnnSpec& spec, const CnnParams& params,
                 const std::vector<const RasterImage*>& batch,
                 BatchActivations* cache, int threads);

Grid softmax_rows(const Grid& logits);
Grid one_hot(const std::vector<int>& labels, int n_classes);

// L = -(1/N) sum_i sum_k y_ik log p_ik, probabilities clamped below at 1e-12.
double cross_entropy(const Grid& probs, const Grid& onehot);

// Exact analytic gradients; softmax+cross-entropy combine to (p - y)/N at the
// logits. Throws if the cache is missing/stale for this spec and label batch.
CnnParams cnn_backward(const CnnSpec& spec, const CnnParams& params,
                       const BatchActivations& cache, const Grid& onehot, int threads);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-7;
};

struct AdamState {
    CnnParams m;  // first moments, shaped like the parameters
    CnnParams v;  // second moments
    long t = 0;   // incremented before bias correction
};

AdamState make_adam_state(const CnnParams& params);

// Standard Adam update with bias-corrected moments. Throws on non-finite
// gradients.
void adam_step(CnnParams& params, const CnnParams& grads, AdamState& state,
               const AdamConfig& config);

struct CnnTrainOptions {
    int epochs = 5;
    int batch_size = 8;  // last partial batch included
    AdamConfig adam;
    std::uint64_t seed = 42;
    int threads = 1;
    bool record_trajectory = false;  // per-step parameter snapshots (tests)
};

struct CnnTrainResult {
    std::vector<double> loss_history;      // one entry per optimizer step
    std::vector<CnnParams> trajectory;     // only when recorded
};

// Seeded shuffle per epoch; deterministic given the seed for any thread count.
CnnTrainResult train_cnn(const CnnSpec& spec, CnnParams& params,
                         const std::vector<RasterImage>& images,
                         const std::vector<int>& labels, const CnnTrainOptions& options);

// argmax_k p_ik, ties -> lowest index.
std::vector<int> predict_cnn(const CnnSpec& spec, const CnnParams& params,
                             const std::vector<RasterImage>& images, int threads);

}  // namespace camid
