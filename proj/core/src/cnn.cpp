#include "camid/cnn.hpp"

#include <algorithm>
#include <cmath>

#include "camid/rng.hpp"
#include "camid/threading.hpp"

namespace camid {

Tensor Tensor::zeros(std::vector<int> shape) {
    Tensor t;
    long total = 1;
    for (int d : shape) {
        if (d < 1) throw Error("tensor dimension must be >= 1");
        total *= d;
    }
    t.shape = std::move(shape);
    t.v.assign(static_cast<std::size_t>(total), 0.0);
    return t;
}

std::vector<CnnSpec::StageShape> CnnSpec::stage_shapes() const {
    std::vector<StageShape> shapes;
    int h = input_height, w = input_width, c = input_channels;
    for (const auto& block : conv_blocks) {
        StageShape s;
        s.conv_h = h - 2;  // 3x3 valid
        s.conv_w = w - 2;
        s.c = block.filters;
        if (s.conv_h < 1 || s.conv_w < 1)
            throw ConfigError("conv stage collapses below 1x1 (input too small for the layer stack)");
        if (block.pool_after) {
            s.h = s.conv_h / 2;  // floor on odd dims
            s.w = s.conv_w / 2;
            if (s.h < 1 || s.w < 1)
                throw ConfigError("pool stage collapses below 1x1 (input too small for the layer stack)");
        } else {
            s.h = s.conv_h;
            s.w = s.conv_w;
        }
        shapes.push_back(s);
        h = s.h;
        w = s.w;
        c = s.c;
    }
    (void)c;
    return shapes;
}

long CnnSpec::flatten_dim() const {
    const auto shapes = stage_shapes();
    if (shapes.empty()) return static_cast<long>(input_height) * input_width * input_channels;
    const auto& last = shapes.back();
    return static_cast<long>(last.h) * last.w * last.c;
}

void CnnSpec::validate() const {
    if (input_height < 1 || input_width < 1 || (input_channels != 1 && input_channels != 3))
        throw ConfigError("invalid cnn input shape");
    if (conv_blocks.empty()) throw ConfigError("cnn needs at least one conv block");
    for (const auto& b : conv_blocks)
        if (b.filters < 1) throw ConfigError("conv filter count must be >= 1");
    if (dense_units < 1 || num_classes < 2) throw ConfigError("invalid dense/classes config");
    (void)stage_shapes();  // throws when a stage collapses
}

CnnSpec default_cnn_spec(int num_classes) {
    CnnSpec spec;
    spec.num_classes = num_classes;
    return spec;
}

std::vector<Tensor*> CnnParams::tensors() {
    std::vector<Tensor*> out;
    for (auto& t : conv_w) out.push_back(&t);
    for (auto& t : conv_b) out.push_back(&t);
    out.push_back(&dense1_w);
    out.push_back(&dense1_b);
    out.push_back(&dense2_w);
    out.push_back(&dense2_b);
    return out;
}

std::vector<const Tensor*> CnnParams::tensors() const {
    std::vector<const Tensor*> out;
    for (const auto& t : conv_w) out.push_back(&t);
    for (const auto& t : conv_b) out.push_back(&t);
    out.push_back(&dense1_w);
    out.push_back(&dense1_b);
    out.push_back(&dense2_w);
    out.push_back(&dense2_b);
    return out;
}

CnnParams glorot_init(const CnnSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 gen(seed);
    CnnParams p;
    int in_c = spec.input_channels;
    for (const auto& block : spec.conv_blocks) {
        Tensor w = Tensor::zeros({block.filters, 3, 3, in_c});
        const double fan_in = 9.0 * in_c;
        const double fan_out = 9.0 * block.filters;
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& v : w.v) v = uniform_range(gen, -limit, limit);
        p.conv_w.push_back(std::move(w));
        p.conv_b.push_back(Tensor::zeros({block.filters}));
        in_c = block.filters;
    }
    const long flat = spec.flatten_dim();
    p.dense1_w = Tensor::zeros({spec.dense_units, static_cast<int>(flat)});
    {
        const double limit = std::sqrt(6.0 / (static_cast<double>(flat) + spec.dense_units));
        for (double& v : p.dense1_w.v) v = uniform_range(gen, -limit, limit);
    }
    p.dense1_b = Tensor::zeros({spec.dense_units});
    p.dense2_w = Tensor::zeros({spec.num_classes, spec.dense_units});
    {
        const double limit = std::sqrt(6.0 / (static_cast<double>(spec.dense_units) + spec.num_classes));
        for (double& v : p.dense2_w.v) v = uniform_range(gen, -limit, limit);
    }
    p.dense2_b = Tensor::zeros({spec.num_classes});
    return p;
}

CnnParams zeros_like(const CnnParams& params) {
    CnnParams out;
    for (const auto& t : params.conv_w) out.conv_w.push_back(Tensor::zeros(t.shape));
    for (const auto& t : params.conv_b) out.conv_b.push_back(Tensor::zeros(t.shape));
    out.dense1_w = Tensor::zeros(params.dense1_w.shape);
    out.dense1_b = Tensor::zeros(params.dense1_b.shape);
    out.dense2_w = Tensor::zeros(params.dense2_w.shape);
    out.dense2_b = Tensor::zeros(params.dense2_b.shape);
    return out;
}

namespace {

struct Dims {
    int h = 0, w = 0, c = 0;
};

inline std::size_t idx4(const Dims& d, int n, int y, int x, int c) {
    return ((static_cast<std::size_t>(n) * d.h + y) * d.w + x) * d.c + c;
}

// out[n,oy,ox,f] = b[f] + sum_{kh,kw,c} in[n,oy+kh,ox+kw,c] * w[f,kh,kw,c]
void conv_forward(const Tensor& in, const Dims& din, const Tensor& w, const Tensor& b,
                  Tensor& out, const Dims& dout, int batch, int threads) {
    const int filters = dout.c;
    parallel_for(0, batch, threads, [&](long n) {
        for (int oy = 0; oy < dout.h; ++oy) {
            for (int ox = 0; ox < dout.w; ++ox) {
                for (int f = 0; f < filters; ++f) {
                    double acc = b.v[f];
                    const double* wf = w.v.data() + static_cast<std::size_t>(f) * 9 * din.c;
                    for (int kh = 0; kh < 3; ++kh) {
                        for (int kw = 0; kw < 3; ++kw) {
                            const double* src = in.v.data() + idx4(din, static_cast<int>(n), oy + kh, ox + kw, 0);
                            const double* wk = wf + (kh * 3 + kw) * din.c;
                            for (int c = 0; c < din.c; ++c) acc += src[c] * wk[c];
                        }
                    }
                    out.v[idx4(dout, static_cast<int>(n), oy, ox, f)] = acc;
                }
            }
        }
    });
}

void relu_in_place(Tensor& t, int threads) {
    parallel_for(0, static_cast<long>(t.v.size()), threads <= 1 ? 1 : threads, [&](long i) {
        if (t.v[i] < 0.0) t.v[i] = 0.0;
    });
}

// 2x2 stride-2 max pool, floor on odd dims; first maximum wins on ties.
void pool_forward(const Tensor& in, const Dims& din, Tensor& out, const Dims& dout,
                  std::vector<long>& argmax, int batch, int threads) {
    argmax.assign(static_cast<std::size_t>(batch) * dout.h * dout.w * dout.c, 0);
    parallel_for(0, batch, threads, [&](long n) {
        for (int oy = 0; oy < dout.h; ++oy) {
            for (int ox = 0; ox < dout.w; ++ox) {
                for (int c = 0; c < dout.c; ++c) {
                    long best_idx = -1;
                    double best = 0.0;
                    for (int dy = 0; dy < 2; ++dy) {
                        for (int dx = 0; dx < 2; ++dx) {
                            const std::size_t i =
                                idx4(din, static_cast<int>(n), 2 * oy + dy, 2 * ox + dx, c);
                            const double v = in.v[i];
                            if (best_idx < 0 || v > best) {
                                best = v;
                                best_idx = static_cast<long>(i);
                            }
                        }
                    }
                    const std::size_t o = idx4(dout, static_cast<int>(n), oy, ox, c);
                    out.v[o] = best;
                    argmax[o] = best_idx;
                }
            }
        }
    });
}

void check_finite(const Tensor& t, const char* what) {
    for (double v : t.v)
        if (!std::isfinite(v)) throw Error(std::string("non-finite value in ") + what);
}

}  // namespace

Grid softmax_rows(const Grid& logits) {
    Grid probs = Grid::zeros(logits.rows, logits.cols);
    for (int r = 0; r < logits.rows; ++r) {
        double max_z = logits.at(r, 0);
        for (int c = 1; c < logits.cols; ++c) max_z = std::max(max_z, logits.at(r, c));
        double sum = 0.0;
        for (int c = 0; c < logits.cols; ++c) {
            const double e = std::exp(logits.at(r, c) - max_z);
            probs.at(r, c) = e;
            sum += e;
        }
        for (int c = 0; c < logits.cols; ++c) probs.at(r, c) /= sum;
    }
    return probs;
}

Grid one_hot(const std::vector<int>& labels, int n_classes) {
    Grid y = Grid::zeros(static_cast<int>(labels.size()), n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes) throw Error("label out of range for one-hot");
        y.at(static_cast<int>(i), labels[i]) = 1.0;
    }
    return y;
}

double cross_entropy(const Grid& probs, const Grid& onehot) {
    if (probs.rows != onehot.rows || probs.cols != onehot.cols)
        throw Error("cross_entropy shape mismatch");
    if (probs.rows == 0) throw Error("cross_entropy on empty batch");
    double total = 0.0;
    for (int r = 0; r < probs.rows; ++r) {
        for (int c = 0; c < probs.cols; ++c) {
            const double y = onehot.at(r, c);
            if (y != 0.0) total -= y * std::log(std::max(probs.at(r, c), 1e-12));
        }
    }
    return total / probs.rows;
}

Grid cnn_forward(const CnnSpec& spec, const CnnParams& params,
                 const std::vector<const RasterImage*>& batch, BatchActivations* cache,
                 int threads) {
    if (batch.empty()) throw Error("cnn_forward on empty batch");
    const int n = static_cast<int>(batch.size());
    for (const RasterImage* img : batch) {
        if (!img) throw Error("null image in batch");
        if (img->height != spec.input_height || img->width != spec.input_width ||
            img->channels != spec.input_channels)
            throw Error("cnn input shape mismatch");
        if (img->range != PixelRange::Unit) throw Error("cnn inputs must be in [0,1]");
        for (double p : img->pixels)
            if (!(p >= 0.0 && p <= 1.0)) throw Error("cnn input value outside [0,1]");
    }
    const auto shapes = spec.stage_shapes();

    BatchActivations local;
    BatchActivations& acts = cache ? *cache : local;
    acts = BatchActivations{};
    acts.batch = n;

    Dims din{spec.input_height, spec.input_width, spec.input_channels};
    acts.input = Tensor::zeros({n, din.h, din.w, din.c});
    const std::size_t per_image = batch[0]->pixels.size();
    for (int i = 0; i < n; ++i)
        std::copy(batch[i]->pixels.begin(), batch[i]->pixels.end(),
                  acts.input.v.begin() + static_cast<std::size_t>(i) * per_image);

    const Tensor* stage_in = &acts.input;
    acts.stages.resize(spec.conv_blocks.size());
    for (std::size_t s = 0; s < spec.conv_blocks.size(); ++s) {
        StageCache& stage = acts.stages[s];
        const Dims dconv{shapes[s].conv_h, shapes[s].conv_w, shapes[s].c};
        stage.relu_out = Tensor::zeros({n, dconv.h, dconv.w, dconv.c});
        conv_forward(*stage_in, din, params.conv_w[s], params.conv_b[s], stage.relu_out, dconv, n,
                     threads);
        relu_in_place(stage.relu_out, threads);
        stage.has_pool = spec.conv_blocks[s].pool_after;
        if (stage.has_pool) {
            const Dims dpool{shapes[s].h, shapes[s].w, shapes[s].c};
            stage.pooled = Tensor::zeros({n, dpool.h, dpool.w, dpool.c});
            pool_forward(stage.relu_out, dconv, stage.pooled, dpool, stage.pool_src, n, threads);
            stage_in = &stage.pooled;
            din = dpool;
        } else {
            stage_in = &stage.relu_out;
            din = dconv;
        }
    }

    const long flat = spec.flatten_dim();
    const int units = spec.dense_units;
    acts.dense1_relu = Tensor::zeros({n, units});
    parallel_for(0, n, threads, [&](long i) {
        const double* in = stage_in->v.data() + static_cast<std::size_t>(i) * flat;
        double* out = acts.dense1_relu.v.data() + static_cast<std::size_t>(i) * units;
        for (int j = 0; j < units; ++j) {
            const double* w = params.dense1_w.v.data() + static_cast<std::size_t>(j) * flat;
            double acc = params.dense1_b.v[j];
            for (long k = 0; k < flat; ++k) acc += w[k] * in[k];
            out[j] = acc > 0.0 ? acc : 0.0;
        }
    });

    acts.logits = Grid::zeros(n, spec.num_classes);
    parallel_for(0, n, threads, [&](long i) {
        const double* in = acts.dense1_relu.v.data() + static_cast<std::size_t>(i) * units;
        for (int j = 0; j < spec.num_classes; ++j) {
            const double* w = params.dense2_w.v.data() + static_cast<std::size_t>(j) * units;
            double acc = params.dense2_b.v[j];
            for (int k = 0; k < units; ++k) acc += w[k] * in[k];
            acts.logits.at(static_cast<int>(i), j) = acc;
        }
    });

    acts.probs = softmax_rows(acts.logits);
    acts.valid = true;
    return acts.probs;
}

CnnParams cnn_backward(const CnnSpec& spec, const CnnParams& params, const BatchActivations& cache,
                       const Grid& onehot, int threads) {
    if (!cache.valid) throw Error("cnn_backward: missing forward cache");
    const int n = cache.batch;
    if (onehot.rows != n || onehot.cols != spec.num_classes ||
        cache.stages.size() != spec.conv_blocks.size() ||
        cache.probs.cols != spec.num_classes)
        throw Error("cnn_backward: stale forward cache for this spec/batch");
    const auto shapes = spec.stage_shapes();

    CnnParams grads = zeros_like(params);

    // softmax + cross-entropy: dL/dz = (p - y)/N
    Grid dlogits = Grid::zeros(n, spec.num_classes);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < spec.num_classes; ++c)
            dlogits.at(r, c) = (cache.probs.at(r, c) - onehot.at(r, c)) / n;

    const int units = spec.dense_units;
    const long flat = spec.flatten_dim();

    // dense2
    parallel_for(0, spec.num_classes, threads, [&](long j) {
        double* wrow = grads.dense2_w.v.data() + static_cast<std::size_t>(j) * units;
        double db = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = dlogits.at(i, static_cast<int>(j));
            db += d;
            const double* in = cache.dense1_relu.v.data() + static_cast<std::size_t>(i) * units;
            for (int k = 0; k < units; ++k) wrow[k] += d * in[k];
        }
        grads.dense2_b.v[j] = db;
    });

    Tensor d_dense1 = Tensor::zeros({n, units});
    parallel_for(0, n, threads, [&](long i) {
        double* out = d_dense1.v.data() + static_cast<std::size_t>(i) * units;
        for (int j = 0; j < spec.num_classes; ++j) {
            const double d = dlogits.at(static_cast<int>(i), j);
            const double* w = params.dense2_w.v.data() + static_cast<std::size_t>(j) * units;
            for (int k = 0; k < units; ++k) out[k] += d * w[k];
        }
        // ReLU mask of the dense hidden layer
        const double* act = cache.dense1_relu.v.data() + static_cast<std::size_t>(i) * units;
        for (int k = 0; k < units; ++k)
            if (act[k] <= 0.0) out[k] = 0.0;
    });

    // dense1
    const Tensor& flat_in = cache.stages.empty()
                                ? cache.input
                                : (cache.stages.back().has_pool ? cache.stages.back().pooled
                                                                : cache.stages.back().relu_out);
    parallel_for(0, units, threads, [&](long j) {
        double* wrow = grads.dense1_w.v.data() + static_cast<std::size_t>(j) * flat;
        double db = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = d_dense1.v[static_cast<std::size_t>(i) * units + j];
            if (d == 0.0) continue;
            db += d;
            const double* in = flat_in.v.data() + static_cast<std::size_t>(i) * flat;
            for (long k = 0; k < flat; ++k) wrow[k] += d * in[k];
        }
        grads.dense1_b.v[j] = db;
    });

    Tensor d_stage = Tensor::zeros({n, static_cast<int>(flat)});
    parallel_for(0, n, threads, [&](long i) {
        double* out = d_stage.v.data() + static_cast<std::size_t>(i) * flat;
        for (int j = 0; j < units; ++j) {
            const double d = d_dense1.v[static_cast<std::size_t>(i) * units + j];
            if (d == 0.0) continue;
            const double* w = params.dense1_w.v.data() + static_cast<std::size_t>(j) * flat;
            for (long k = 0; k < flat; ++k) out[k] += d * w[k];
        }
    });

    // conv blocks, last to first
    for (int s = static_cast<int>(spec.conv_blocks.size()) - 1; s >= 0; --s) {
        const StageCache& stage = cache.stages[s];
        const Dims dconv{shapes[s].conv_h, shapes[s].conv_w, shapes[s].c};
        const Dims dout{shapes[s].h, shapes[s].w, shapes[s].c};

        // gradient at the stage output (after pool when present)
        Tensor d_conv = Tensor::zeros({n, dconv.h, dconv.w, dconv.c});
        if (stage.has_pool) {
            const std::size_t pooled_count = static_cast<std::size_t>(n) * dout.h * dout.w * dout.c;
            for (std::size_t i = 0; i < pooled_count; ++i)
                d_conv.v[static_cast<std::size_t>(stage.pool_src[i])] += d_stage.v[i];
        } else {
            d_conv.v = d_stage.v;
        }
        // ReLU mask
        parallel_for(0, n, threads, [&](long i) {
            const std::size_t base = static_cast<std::size_t>(i) * dconv.h * dconv.w * dconv.c;
            const std::size_t count = static_cast<std::size_t>(dconv.h) * dconv.w * dconv.c;
            for (std::size_t k = 0; k < count; ++k)
                if (stage.relu_out.v[base + k] <= 0.0) d_conv.v[base + k] = 0.0;
        });

        const Tensor& in = s == 0 ? cache.input
                                  : (cache.stages[s - 1].has_pool ? cache.stages[s - 1].pooled
                                                                  : cache.stages[s - 1].relu_out);
        const Dims din{in.shape[1], in.shape[2], in.shape[3]};

        // weight and bias gradients, parallel over filters
        parallel_for(0, dconv.c, threads, [&](long f) {
            double* wf = grads.conv_w[s].v.data() + static_cast<std::size_t>(f) * 9 * din.c;
            double db = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int oy = 0; oy < dconv.h; ++oy) {
                    for (int ox = 0; ox < dconv.w; ++ox) {
                        const double d = d_conv.v[idx4(dconv, i, oy, ox, static_cast<int>(f))];
                        if (d == 0.0) continue;
                        db += d;
                        for (int kh = 0; kh < 3; ++kh) {
                            for (int kw = 0; kw < 3; ++kw) {
                                const double* src = in.v.data() + idx4(din, i, oy + kh, ox + kw, 0);
                                double* wk = wf + (kh * 3 + kw) * din.c;
                                for (int c = 0; c < din.c; ++c) wk[c] += d * src[c];
                            }
                        }
                    }
                }
            }
            grads.conv_b[s].v[f] = db;
        });

        // gradient wrt the stage input, parallel over samples; the image
        // gradient (s == 0) is never consumed
        if (s > 0) {
            Tensor d_in = Tensor::zeros({n, din.h, din.w, din.c});
            parallel_for(0, n, threads, [&](long i) {
                for (int oy = 0; oy < dconv.h; ++oy) {
                    for (int ox = 0; ox < dconv.w; ++ox) {
                        for (int f = 0; f < dconv.c; ++f) {
                            const double d =
                                d_conv.v[idx4(dconv, static_cast<int>(i), oy, ox, f)];
                            if (d == 0.0) continue;
                            const double* wf =
                                params.conv_w[s].v.data() + static_cast<std::size_t>(f) * 9 * din.c;
                            for (int kh = 0; kh < 3; ++kh) {
                                for (int kw = 0; kw < 3; ++kw) {
                                    double* dst = d_in.v.data() +
                                                  idx4(din, static_cast<int>(i), oy + kh, ox + kw, 0);
                                    const double* wk = wf + (kh * 3 + kw) * din.c;
                                    for (int c = 0; c < din.c; ++c) dst[c] += d * wk[c];
                                }
                            }
                        }
                    }
                }
            });
            d_stage = std::move(d_in);
        }
    }

    return grads;
}

AdamState make_adam_state(const CnnParams& params) {
    AdamState state;
    state.m = zeros_like(params);
    state.v = zeros_like(params);
    state.t = 0;
    return state;
}

void adam_step(CnnParams& params, const CnnParams& grads, AdamState& state,
               const AdamConfig& config) {
    for (const Tensor* g : grads.tensors()) check_finite(*g, "gradients (adam_step aborted)");

    state.t += 1;  // incremented before bias correction
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));

    auto ps = params.tensors();
    auto gs = grads.tensors();
    auto ms = state.m.tensors();
    auto vs = state.v.tensors();
    for (std::size_t t = 0; t < ps.size(); ++t) {
        if (ps[t]->v.size() != gs[t]->v.size()) throw Error("adam_step: gradient shape mismatch");
        double* p = ps[t]->v.data();
        const double* g = gs[t]->v.data();
        double* m = ms[t]->v.data();
        double* v = vs[t]->v.data();
        const std::size_t count = ps[t]->v.size();
        for (std::size_t i = 0; i < count; ++i) {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
        }
    }
}

CnnTrainResult train_cnn(const CnnSpec& spec, CnnParams& params,
                         const std::vector<RasterImage>& images, const std::vector<int>& labels,
                         const CnnTrainOptions& options) {
    spec.validate();
    if (images.empty()) throw Error("train_cnn: empty training split");
    if (images.size() != labels.size()) throw Error("train_cnn: label count mismatch");
    if (options.batch_size < 1 || options.epochs < 1) throw ConfigError("invalid cnn train options");

    const int n = static_cast<int>(images.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 gen(options.seed);
    AdamState adam = make_adam_state(params);

    CnnTrainResult result;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        deterministic_shuffle(order, gen);
        for (int start = 0; start < n; start += options.batch_size) {
            const int end = std::min(n, start + options.batch_size);
            std::vector<const RasterImage*> batch;
            std::vector<int> batch_labels;
            batch.reserve(end - start);
            for (int i = start; i < end; ++i) {
                batch.push_back(&images[order[i]]);
                batch_labels.push_back(labels[order[i]]);
            }
            BatchActivations cache;
            const Grid probs = cnn_forward(spec, params, batch, &cache, options.threads);
            const Grid y = one_hot(batch_labels, spec.num_classes);
            result.loss_history.push_back(cross_entropy(probs, y));
            const CnnParams grads = cnn_backward(spec, params, cache, y, options.threads);
            adam_step(params, grads, adam, options.adam);
            if (options.record_trajectory) result.trajectory.push_back(params);
        }
    }
    return result;
}

std::vector<int> predict_cnn(const CnnSpec& spec, const CnnParams& params,
                             const std::vector<RasterImage>& images, int threads) {
    std::vector<int> out;
    out.reserve(images.size());
    const int chunk = 16;
    for (std::size_t start = 0; start < images.size(); start += chunk) {
        const std::size_t end = std::min(images.size(), start + chunk);
        std::vector<const RasterImage*> batch;
        for (std::size_t i = start; i < end; ++i) batch.push_back(&images[i]);
        const Grid probs = cnn_forward(spec, params, batch, nullptr, threads);
        for (int r = 0; r < probs.rows; ++r) {
            int best = 0;
            for (int c = 1; c < probs.cols; ++c)
                if (probs.at(r, c) > probs.at(r, best)) best = c;  // ties keep the lowest index
            out.push_back(best);
        }
    }
    return out;
}

}  // namespace camid
