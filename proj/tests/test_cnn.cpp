#include <doctest.h>

#include <cmath>

#include "camid/cnn.hpp"
#include "camid/rng.hpp"
#include "oracles.hpp"

using namespace camid;

namespace {

// three 2-filter convs, no pooling: every parameter tensor, 8x8 input
CnnSpec reduced_spec_nopool() {
    CnnSpec spec;
    spec.input_height = 8;
    spec.input_width = 8;
    spec.input_channels = 1;
    spec.conv_blocks = {{2, false}, {2, false}, {2, false}};
    spec.dense_units = 4;
    spec.num_classes = 2;
    return spec;
}

// two convs with one pool: exercises max-pool gradient routing, 8x8 input
CnnSpec reduced_spec_pool() {
    CnnSpec spec;
    spec.input_height = 8;
    spec.input_width = 8;
    spec.input_channels = 1;
    spec.conv_blocks = {{2, true}, {2, false}};
    spec.dense_units = 4;
    spec.num_classes = 2;
    return spec;
}

std::vector<const RasterImage*> view(const std::vector<RasterImage>& images) {
    std::vector<const RasterImage*> out;
    for (const auto& img : images) out.push_back(&img);
    return out;
}

}  // namespace

TEST_CASE("default architecture shape audit for 128x128x3 input") {
    const CnnSpec spec = default_cnn_spec();
    const auto shapes = spec.stage_shapes();
    REQUIRE(shapes.size() == 3);
    CHECK(shapes[0].conv_h == 126);
    CHECK(shapes[0].conv_w == 126);
    CHECK(shapes[0].c == 32);
    CHECK(shapes[0].h == 63);
    CHECK(shapes[0].w == 63);
    CHECK(shapes[1].conv_h == 61);
    CHECK(shapes[1].c == 64);
    CHECK(shapes[1].h == 30);  // floor(61/2)
    CHECK(shapes[2].conv_h == 28);
    CHECK(shapes[2].c == 128);
    CHECK(shapes[2].h == 28);  // no pool after the last conv
    CHECK(spec.flatten_dim() == 100352);
    CHECK(spec.dense_units == 64);
    CHECK(spec.num_classes == 4);
}

TEST_CASE("forward activations have the audited shapes") {
    const CnnSpec spec = default_cnn_spec();
    const CnnParams params = glorot_init(spec, 1);
    std::mt19937_64 gen(2);
    const auto images = oracles::random_unit_images(gen, 1, 128, 128, 3);
    BatchActivations cache;
    const Grid probs = cnn_forward(spec, params, view(images), &cache, 2);
    CHECK(probs.rows == 1);
    CHECK(probs.cols == 4);
    REQUIRE(cache.stages.size() == 3);
    CHECK(cache.stages[0].relu_out.shape == std::vector<int>{1, 126, 126, 32});
    CHECK(cache.stages[0].pooled.shape == std::vector<int>{1, 63, 63, 32});
    CHECK(cache.stages[1].relu_out.shape == std::vector<int>{1, 61, 61, 64});
    CHECK(cache.stages[1].pooled.shape == std::vector<int>{1, 30, 30, 64});
    CHECK(cache.stages[2].relu_out.shape == std::vector<int>{1, 28, 28, 128});
    CHECK(cache.dense1_relu.shape == std::vector<int>{1, 64});
    double sum = 0.0;
    for (int c = 0; c < 4; ++c) sum += probs.at(0, c);
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("zeroed output layer yields uniform probabilities") {
    const CnnSpec spec = reduced_spec_nopool();
    CnnParams params = glorot_init(spec, 3);
    std::fill(params.dense2_w.v.begin(), params.dense2_w.v.end(), 0.0);
    std::fill(params.dense2_b.v.begin(), params.dense2_b.v.end(), 0.0);
    std::mt19937_64 gen(4);
    const auto images = oracles::random_unit_images(gen, 3, 8, 8, 1);
    const Grid probs = cnn_forward(spec, params, view(images), nullptr, 1);
    for (int r = 0; r < probs.rows; ++r)
        for (int c = 0; c < probs.cols; ++c)
            CHECK(probs.at(r, c) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("logit biases ln(1..4) produce probabilities (.1,.2,.3,.4)") {
    CnnSpec spec = reduced_spec_nopool();
    spec.num_classes = 4;
    CnnParams params = glorot_init(spec, 5);
    std::fill(params.dense2_w.v.begin(), params.dense2_w.v.end(), 0.0);
    params.dense2_b.v = {std::log(1.0), std::log(2.0), std::log(3.0), std::log(4.0)};
    std::mt19937_64 gen(6);
    const auto images = oracles::random_unit_images(gen, 1, 8, 8, 1);
    const Grid probs = cnn_forward(spec, params, view(images), nullptr, 1);
    CHECK(probs.at(0, 0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(probs.at(0, 1) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(probs.at(0, 2) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(probs.at(0, 3) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("softmax rows: sums, positivity, shift invariance") {
    std::mt19937_64 gen(7);
    Grid logits = Grid::zeros(6, 4);
    for (double& v : logits.v) v = uniform_range(gen, -30.0, 30.0);
    const Grid p = softmax_rows(logits);
    Grid shifted = logits;
    for (int r = 0; r < shifted.rows; ++r)
        for (int c = 0; c < shifted.cols; ++c) shifted.at(r, c) += 7.25;
    const Grid q = softmax_rows(shifted);
    for (int r = 0; r < p.rows; ++r) {
        double sum = 0.0;
        for (int c = 0; c < p.cols; ++c) {
            CHECK(p.at(r, c) > 0.0);
            CHECK(std::abs(p.at(r, c) - q.at(r, c)) < 1e-12);
            sum += p.at(r, c);
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("cross_entropy closed forms") {
    SUBCASE("uniform probabilities against any one-hot row: ln 4") {
        Grid p = Grid::zeros(1, 4);
        for (double& v : p.v) v = 0.25;
        const Grid y = one_hot({2}, 4);
        CHECK(cross_entropy(p, y) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    }

    SUBCASE("perfect prediction: exactly zero") {
        const Grid y = one_hot({1}, 3);
        CHECK(cross_entropy(y, y) == 0.0);
    }

    SUBCASE("batch loss is the row mean") {
        Grid p = Grid::zeros(2, 2);
        p.at(0, 0) = 0.9; p.at(0, 1) = 0.1;
        p.at(1, 0) = 0.3; p.at(1, 1) = 0.7;
        const Grid y = one_hot({0, 1}, 2);
        const double a = -std::log(0.9), b = -std::log(0.7);
        CHECK(cross_entropy(p, y) == doctest::Approx((a + b) / 2.0).epsilon(1e-14));
    }

    SUBCASE("clamp stops -inf on confident mispredictions") {
        Grid p = Grid::zeros(1, 2);
        p.at(0, 0) = 1.0;  // true class has probability 0
        const Grid y = one_hot({1}, 2);
        CHECK(cross_entropy(p, y) == doctest::Approx(-std::log(1e-12)));
    }
}

TEST_CASE("combined softmax/cross-entropy gradient lands in the output bias") {
    // batch of one, zeroed output layer: dL/db2 == p - y == (-0.75, .25, .25, .25)
    CnnSpec spec = reduced_spec_nopool();
    spec.num_classes = 4;
    CnnParams params = glorot_init(spec, 9);
    std::fill(params.dense2_w.v.begin(), params.dense2_w.v.end(), 0.0);
    std::fill(params.dense2_b.v.begin(), params.dense2_b.v.end(), 0.0);
    std::mt19937_64 gen(10);
    const auto images = oracles::random_unit_images(gen, 1, 8, 8, 1);
    BatchActivations cache;
    cnn_forward(spec, params, view(images), &cache, 1);
    const Grid y = one_hot({0}, 4);
    const CnnParams grads = cnn_backward(spec, params, cache, y, 1);
    CHECK(grads.dense2_b.v[0] == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(grads.dense2_b.v[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(grads.dense2_b.v[2] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(grads.dense2_b.v[3] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
    std::mt19937_64 gen(2025);

    SUBCASE("8x8 input, 2/2/2 filters, no pooling") {
        const CnnSpec spec = reduced_spec_nopool();
        const CnnParams params = glorot_init(spec, 11);
        const auto images = oracles::random_unit_images(gen, 2, 8, 8, 1);
        const auto check = oracles::finite_difference_check(spec, params, images, {0, 1}, 1e-3);
        INFO("worst tensor: ", check.worst_tensor);
        CHECK(check.max_tensor_rel_error < 1e-4);
    }

    SUBCASE("8x8 input with max pooling") {
        const CnnSpec spec = reduced_spec_pool();
        const CnnParams params = glorot_init(spec, 12);
        const auto images = oracles::random_unit_images(gen, 2, 8, 8, 1);
        const auto check = oracles::finite_difference_check(spec, params, images, {1, 0}, 1e-3);
        INFO("worst tensor: ", check.worst_tensor);
        CHECK(check.max_tensor_rel_error < 1e-4);
    }
}

TEST_CASE("zero input: first conv weight gradients vanish, bias gradients do not") {
    const CnnSpec spec = reduced_spec_pool();
    CnnParams params = glorot_init(spec, 13);
    for (auto& b : params.conv_b) std::fill(b.v.begin(), b.v.end(), 0.5);  // keep ReLU open

    std::vector<RasterImage> images{RasterImage::make(8, 8, 1, PixelRange::Unit, 0.0)};
    BatchActivations cache;
    cnn_forward(spec, params, view(images), &cache, 1);
    const CnnParams grads = cnn_backward(spec, params, cache, one_hot({1}, 2), 1);

    for (double g : grads.conv_w[0].v) CHECK(g == 0.0);
    double bias_norm = 0.0;
    for (double g : grads.conv_b[0].v) bias_norm += std::abs(g);
    CHECK(bias_norm > 0.0);
}

TEST_CASE("adam_step closed forms") {
    // one-entry parameter tensors keep the algebra visible
    CnnSpec spec = reduced_spec_nopool();
    CnnParams params = glorot_init(spec, 14);
    AdamState state = make_adam_state(params);
    AdamConfig config;  // lr 1e-3, eps 1e-7

    CnnParams grads = zeros_like(params);
    const double g = 0.37;
    grads.dense2_b.v[0] = g;
    const double before = params.dense2_b.v[0];
    const double untouched = params.dense1_b.v[0];

    adam_step(params, grads, state, config);
    const double step1 = before - params.dense2_b.v[0];
    CHECK(step1 == doctest::Approx(config.lr * g / (g + config.eps)).epsilon(1e-12));
    CHECK(params.dense1_b.v[0] == untouched);  // zero gradient, zero moments -> unchanged

    // second step with the same gradient: m_hat = g, v_hat = g^2 again
    const double mid = params.dense2_b.v[0];
    adam_step(params, grads, state, config);
    const double step2 = mid - params.dense2_b.v[0];
    CHECK(step2 == doctest::Approx(config.lr * g / (g + config.eps)).epsilon(1e-12));
    CHECK(state.t == 2);

    grads.dense2_b.v[0] = std::nan("");
    CHECK_THROWS_WITH_AS(adam_step(params, grads, state, config), doctest::Contains("non-finite"),
                         Error);
}

TEST_CASE("training loop step count and determinism") {
    const CnnSpec spec = reduced_spec_pool();
    std::mt19937_64 gen(15);
    const auto images = oracles::random_unit_images(gen, 40, 8, 8, 1);
    std::vector<int> labels(40);
    for (int i = 0; i < 40; ++i) labels[i] = i % 2;

    CnnTrainOptions options;
    options.seed = 99;

    SUBCASE("40 train images, batch 8, 5 epochs -> 25 optimizer steps") {
        CnnParams params = glorot_init(spec, 16);
        const CnnTrainResult result = train_cnn(spec, params, images, labels, options);
        CHECK(result.loss_history.size() == 25);
    }

    SUBCASE("identical seeds give bitwise-identical parameters and losses") {
        CnnParams a = glorot_init(spec, 16);
        CnnParams b = glorot_init(spec, 16);
        CnnTrainOptions recording = options;
        recording.record_trajectory = true;
        const CnnTrainResult ra = train_cnn(spec, a, images, labels, recording);
        const CnnTrainResult rb = train_cnn(spec, b, images, labels, recording);
        CHECK(ra.loss_history == rb.loss_history);
        REQUIRE(ra.trajectory.size() == rb.trajectory.size());
        for (std::size_t s = 0; s < ra.trajectory.size(); ++s) {
            const auto ta = ra.trajectory[s].tensors();
            const auto tb = rb.trajectory[s].tensors();
            for (std::size_t t = 0; t < ta.size(); ++t) CHECK(ta[t]->v == tb[t]->v);
        }
    }

    SUBCASE("thread count does not change the result") {
        CnnParams a = glorot_init(spec, 16);
        CnnParams b = glorot_init(spec, 16);
        CnnTrainOptions two = options;
        two.threads = 2;
        const CnnTrainResult ra = train_cnn(spec, a, images, labels, options);
        const CnnTrainResult rb = train_cnn(spec, b, images, labels, two);
        CHECK(ra.loss_history == rb.loss_history);
        const auto ta = a.tensors();
        const auto tb = b.tensors();
        for (std::size_t t = 0; t < ta.size(); ++t) CHECK(ta[t]->v == tb[t]->v);
    }

    SUBCASE("empty split is rejected") {
        CnnParams params = glorot_init(spec, 16);
        CHECK_THROWS_AS(train_cnn(spec, params, {}, {}, options), Error);
    }
}

TEST_CASE("a trivially separable brightness task trains to >= 0.95 accuracy") {
    CnnSpec spec;
    spec.input_height = 16;
    spec.input_width = 16;
    spec.input_channels = 3;
    spec.conv_blocks = {{4, true}};
    spec.dense_units = 8;
    spec.num_classes = 2;

    std::mt19937_64 gen(17);
    std::vector<RasterImage> images;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
        const bool bright = i % 2 == 1;
        RasterImage img = RasterImage::make(16, 16, 3, PixelRange::Unit);
        for (double& p : img.pixels)
            p = bright ? uniform_range(gen, 0.8, 1.0) : uniform_range(gen, 0.0, 0.2);
        images.push_back(std::move(img));
        labels.push_back(bright ? 1 : 0);
    }

    CnnParams params = glorot_init(spec, 18);
    CnnTrainOptions options;  // 5 epochs, batch 8
    options.seed = 7;
    train_cnn(spec, params, images, labels, options);
    const std::vector<int> pred = predict_cnn(spec, params, images, 1);
    int hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (pred[i] == labels[i]) ++hits;
    CHECK(static_cast<double>(hits) / labels.size() >= 0.95);
}

TEST_CASE("loss strictly decreases over the first 10 steps on a fixed batch") {
    const CnnSpec spec = reduced_spec_pool();
    CnnParams params = glorot_init(spec, 19);
    std::mt19937_64 gen(20);
    const auto images = oracles::random_unit_images(gen, 4, 8, 8, 1);
    const std::vector<int> labels{0, 1, 0, 1};
    const auto batch = view(images);
    const Grid y = one_hot(labels, 2);

    AdamState state = make_adam_state(params);
    AdamConfig config;  // lr 1e-3
    double previous = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 10; ++step) {
        BatchActivations cache;
        const Grid probs = cnn_forward(spec, params, batch, &cache, 1);
        const double loss = cross_entropy(probs, y);
        CHECK(loss < previous);
        previous = loss;
        const CnnParams grads = cnn_backward(spec, params, cache, y, 1);
        adam_step(params, grads, state, config);
    }
}

TEST_CASE("predict_cnn argmax and tie rules") {
    CnnSpec spec = reduced_spec_nopool();
    spec.num_classes = 4;
    CnnParams params = glorot_init(spec, 21);
    std::mt19937_64 gen(22);
    const auto images = oracles::random_unit_images(gen, 5, 8, 8, 1);

    SUBCASE("prediction equals the argmax of the logits") {
        BatchActivations cache;
        cnn_forward(spec, params, view(images), &cache, 1);
        const std::vector<int> pred = predict_cnn(spec, params, images, 1);
        for (int r = 0; r < 5; ++r) {
            int best = 0;
            for (int c = 1; c < 4; ++c)
                if (cache.logits.at(r, c) > cache.logits.at(r, best)) best = c;
            CHECK(pred[r] == best);
        }
    }

    SUBCASE("uniform probabilities predict class 0") {
        std::fill(params.dense2_w.v.begin(), params.dense2_w.v.end(), 0.0);
        std::fill(params.dense2_b.v.begin(), params.dense2_b.v.end(), 0.0);
        for (int p : predict_cnn(spec, params, images, 1)) CHECK(p == 0);
    }
}

TEST_CASE("forward/backward input validation") {
    const CnnSpec spec = reduced_spec_nopool();
    const CnnParams params = glorot_init(spec, 23);

    std::vector<RasterImage> wrong{RasterImage::make(9, 8, 1, PixelRange::Unit)};
    CHECK_THROWS_AS(cnn_forward(spec, params, view(wrong), nullptr, 1), Error);

    std::vector<RasterImage> out_of_range{RasterImage::make(8, 8, 1, PixelRange::Unit)};
    out_of_range[0].pixels[3] = 1.5;
    CHECK_THROWS_AS(cnn_forward(spec, params, view(out_of_range), nullptr, 1), Error);

    BatchActivations cache;  // never filled
    CHECK_THROWS_WITH_AS(cnn_backward(spec, params, cache, one_hot({0}, 2), 1),
                         doctest::Contains("missing"), Error);

    std::mt19937_64 gen(24);
    const auto images = oracles::random_unit_images(gen, 2, 8, 8, 1);
    cnn_forward(spec, params, view(images), &cache, 1);
    CHECK_THROWS_WITH_AS(cnn_backward(spec, params, cache, one_hot({0}, 2), 1),
                         doctest::Contains("stale"), Error);  // batch size mismatch
}

TEST_CASE("glorot init is seeded and zero-biased") {
    const CnnSpec spec = reduced_spec_nopool();
    const CnnParams a = glorot_init(spec, 42);
    const CnnParams b = glorot_init(spec, 42);
    const CnnParams c = glorot_init(spec, 43);
    CHECK(a.conv_w[0].v == b.conv_w[0].v);
    CHECK(a.dense1_w.v == b.dense1_w.v);
    CHECK(a.conv_w[0].v != c.conv_w[0].v);
    for (double v : a.conv_b[0].v) CHECK(v == 0.0);
    for (double v : a.dense1_b.v) CHECK(v == 0.0);
    // Glorot-uniform bound for the first conv: sqrt(6 / (9*1 + 9*2))
    const double limit = std::sqrt(6.0 / 27.0);
    for (double v : a.conv_w[0].v) CHECK(std::abs(v) <= limit);
}

TEST_CASE("spec validation rejects collapsing stacks") {
    CnnSpec spec;
    spec.input_height = 8;
    spec.input_width = 8;
    spec.input_channels = 1;
    spec.conv_blocks = {{2, true}, {2, true}, {2, false}};  // second pool would see 1x1
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}
