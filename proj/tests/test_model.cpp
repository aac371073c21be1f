#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "gradcheck.hpp"
#include "sysdse/data.hpp"
#include "sysdse/model.hpp"

using namespace sysdse;

namespace {

ModelSpec small_spec(std::size_t classes = 3, std::uint32_t vocab = 20, bool baseline = false) {
    ModelSpec s;
    s.encoder.names = {"x", "y"};
    s.encoder.features = {FeatureEncoding::offset(0, vocab), FeatureEncoding::offset(0, vocab)};
    s.embedding_dim = 4;
    s.hidden_units = 32;
    s.num_classes = classes;
    s.baseline_mode = baseline;
    return s;
}

/// 500 points on a 20x20 grid; the class is a band of x.
Dataset separable_fixture() {
    Dataset ds;
    ds.columns = {"x", "y"};
    Rng rng(123);
    for (int i = 0; i < 500; ++i) {
        const auto x = rng.uniform_int(0, 19);
        const auto y = rng.uniform_int(0, 19);
        ds.records.push_back({{x, y}, static_cast<LabelId>(x < 7 ? 0 : x < 14 ? 1 : 2)});
    }
    return ds;
}

std::vector<std::int64_t> random_row(Rng& rng, std::uint32_t vocab = 20) {
    return {rng.uniform_int(0, vocab - 1), rng.uniform_int(0, vocab - 1)};
}

}  // namespace

TEST_CASE("initialization") {
    const auto spec = small_spec();
    const auto a = init_model(spec, 5);
    const auto b = init_model(spec, 5);
    CHECK(checkpoint_bytes(a) == checkpoint_bytes(b));
    CHECK(checkpoint_bytes(a) != checkpoint_bytes(init_model(spec, 6)));

    for (double v : a.params.hidden_b) CHECK(v == 0.0);
    for (double v : a.params.output_b) CHECK(v == 0.0);
    const double bound = std::sqrt(6.0 / static_cast<double>(spec.input_dim() + spec.hidden_units));
    for (double v : a.params.hidden_w) CHECK(std::abs(v) <= bound);
    for (const auto& e : a.params.embeddings) {
        for (double v : e) CHECK(std::abs(v) <= 0.05);
    }
    CHECK(a.params.hidden_w.size() == spec.hidden_units * spec.input_dim());
    CHECK(a.params.output_w.size() == spec.num_classes * spec.hidden_units);

    auto bad = spec;
    bad.num_classes = 1;
    CHECK_THROWS_AS(init_model(bad, 0), ParameterError);
}

TEST_CASE("forward is a distribution") {
    auto model = init_model(small_spec(7), 1);
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        const auto p = forward(model, prepare_input(model, random_row(rng)));
        REQUIRE(p.size() == 7);
        CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-9);
        for (double v : p) CHECK(v > 0.0);
    }
    std::fill(model.params.output_w.begin(), model.params.output_w.end(), 0.0);
    const auto p = forward(model, prepare_input(model, random_row(rng)));
    for (double v : p) CHECK(v == doctest::Approx(1.0 / 7).epsilon(1e-12));

    CHECK_THROWS_AS(forward(model, ModelInput{{0, 20}, {}}), EncodingError);
    CHECK_THROWS_AS(prepare_input(model, std::vector<std::int64_t>{0, 20}), EncodingError);
}

TEST_CASE("forward matches a hand computation") {
    ModelSpec s;
    s.encoder.names = {"a", "b"};
    s.encoder.features = {FeatureEncoding::offset(0, 2), FeatureEncoding::offset(0, 2)};
    s.embedding_dim = 1;
    s.hidden_units = 2;
    s.num_classes = 2;
    auto m = init_model(s, 0);
    m.params.embeddings = {{0.1, -0.2}, {0.3, 0.05}};
    m.params.hidden_w = {0.5, -0.1, 0.2, 0.4};
    m.params.hidden_b = {0.01, -0.02};
    m.params.output_w = {0.3, -0.7, -0.2, 0.9};
    m.params.output_b = {0.05, -0.05};

    // x = (-0.2, 0.3); h = relu(-0.12, 0.06) = (0, 0.06); z = (0.008, 0.004)
    const auto p = forward(m, ModelInput{{1, 0}, {}});
    const double e0 = std::exp(0.008), e1 = std::exp(0.004);
    CHECK(std::abs(p[0] - e0 / (e0 + e1)) < 1e-12);
    CHECK(std::abs(p[1] - e1 / (e0 + e1)) < 1e-12);
}

TEST_CASE("loss at uniform output") {
    auto model = init_model(small_spec(5), 3);
    std::fill(model.params.output_w.begin(), model.params.output_w.end(), 0.0);
    Rng rng(4);
    std::vector<Example> batch;
    for (int i = 0; i < 10; ++i) batch.push_back({prepare_input(model, random_row(rng)), static_cast<LabelId>(i % 5)});
    CHECK(std::abs(loss_and_grad(model, batch).loss - std::log(5.0)) < 1e-9);
    CHECK_THROWS_AS(loss_and_grad(model, std::span<const Example>{}), ShapeError);
}

TEST_CASE("gradients match finite differences") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto fx = gradcheck::random_fixture(seed);
        const auto r = gradcheck::check(fx);
        INFO("seed " << seed << " worst tensor " << r.worst_tensor);
        CHECK(r.checked > 0);
        CHECK(r.worst < 1e-4);
    }
}

TEST_CASE("untouched embedding rows get exactly zero gradient") {
    const auto model = init_model(small_spec(), 8);
    const std::vector<Example> batch{{ModelInput{{3, 5}, {}}, 1}, {ModelInput{{3, 9}, {}}, 2}};
    const auto g = loss_and_grad(model, batch).grads;
    const std::size_t d = model.spec.embedding_dim;
    for (std::uint32_t row = 0; row < 20; ++row) {
        double mag0 = 0, mag1 = 0;
        for (std::size_t j = 0; j < d; ++j) {
            mag0 += std::abs(g.embeddings[0][row * d + j]);
            mag1 += std::abs(g.embeddings[1][row * d + j]);
        }
        CHECK((mag0 == 0.0) == (row != 3));
        CHECK((mag1 == 0.0) == (row != 5 && row != 9));
    }
}

TEST_CASE("identity embeddings reduce to the baseline path") {
    // Baseline: z = (v - mean) / scale. Embedding model with dim 1 whose
    // table rows hold exactly those standardized values.
    auto base_spec = small_spec(4, 6, true);
    auto emb_spec = small_spec(4, 6, false);
    emb_spec.embedding_dim = 1;
    auto base = init_model(base_spec, 11);
    base.input_mean = {2.5, 1.0};
    base.input_scale = {1.5, 2.0};
    auto emb = init_model(emb_spec, 12);
    emb.params.hidden_w = base.params.hidden_w;
    emb.params.hidden_b = base.params.hidden_b;
    emb.params.output_w = base.params.output_w;
    emb.params.output_b = base.params.output_b;
    for (std::size_t f = 0; f < 2; ++f) {
        for (std::size_t v = 0; v < 6; ++v) {
            emb.params.embeddings[f][v] = (static_cast<double>(v) - base.input_mean[f]) / base.input_scale[f];
        }
    }
    Rng rng(13);
    for (int i = 0; i < 50; ++i) {
        const auto raw = random_row(rng, 6);
        CHECK(forward(base, prepare_input(base, raw)) == forward(emb, prepare_input(emb, raw)));
    }
}

TEST_CASE("predict is argmax of forward") {
    auto model = init_model(small_spec(6), 21);
    Rng rng(22);
    for (int i = 0; i < 100; ++i) {
        const auto raw = random_row(rng);
        const auto p = forward(model, prepare_input(model, raw));
        const auto best = static_cast<LabelId>(std::max_element(p.begin(), p.end()) - p.begin());
        CHECK(predict(model, raw) == best);
    }
    std::fill(model.params.output_w.begin(), model.params.output_w.end(), 0.0);
    std::fill(model.params.output_b.begin(), model.params.output_b.end(), 0.0);
    CHECK(predict(model, random_row(rng)) == 0);
    model.params.output_b[4] = 1.0;
    CHECK(predict(model, random_row(rng)) == 4);
}

TEST_CASE("training fits a separable fixture") {
    const auto ds = separable_fixture();
    auto model = init_model(small_spec(3), 31);
    TrainConfig cfg;
    cfg.batch_size = 32;
    cfg.seed = 31;
    std::size_t calls = 0;
    const auto report = train(model, ds, cfg, [&](const EpochStats&) { ++calls; });
    CHECK(calls == 15);
    REQUIRE(report.epochs.size() == 15);
    CHECK(report.train_count == 450);
    CHECK(report.val_count == 50);
    CHECK(report.epochs.back().train_accuracy >= 0.99);
    for (const auto& e : report.epochs) {
        CHECK(std::isfinite(e.train_loss));
        CHECK(e.train_loss >= 0.0);
        CHECK(e.val_accuracy >= 0.0);
        CHECK(e.val_accuracy <= 1.0);
    }
    std::size_t agree = 0;
    for (const auto& r : ds.records) agree += predict(model, r.features) == r.label ? 1 : 0;
    CHECK(agree == ds.records.size());

    auto again = init_model(small_spec(3), 31);
    train(again, ds, cfg);
    CHECK(checkpoint_bytes(again) == checkpoint_bytes(model));
}

TEST_CASE("initial loss is near ln(classes)") {
    const AnyTable table = default_table(1);
    const auto ds = generate_dataset(table, 600, 41);
    ModelSpec spec;
    spec.encoder = default_encoder(table);
    spec.num_classes = table_size(table);
    auto model = init_model(spec, 41);
    TrainConfig cfg;
    cfg.epochs = 1;
    const auto report = train(model, ds, cfg);
    const double ln_c = std::log(static_cast<double>(spec.num_classes));
    CHECK(std::abs(report.initial_loss - ln_c) < 0.05 * ln_c);
}

TEST_CASE("baseline training standardizes on the training split") {
    const auto ds = separable_fixture();
    auto model = init_model(small_spec(3, 20, true), 51);
    TrainConfig cfg;
    cfg.batch_size = 32;
    cfg.epochs = 3;
    train(model, ds, cfg);
    CHECK(std::abs(model.input_mean[0] - 9.5) < 1.0);
    CHECK(model.input_scale[0] > 4.0);
    CHECK(model.input_scale[0] < 7.0);
}

TEST_CASE("training rejects mismatched data") {
    auto ds = separable_fixture();
    auto model = init_model(small_spec(2), 1);
    CHECK_THROWS_AS(train(model, ds, {}), ShapeError);
    auto m3 = init_model(small_spec(3), 1);
    ds.columns = {"a", "b"};
    CHECK_THROWS_AS(train(m3, ds, {}), ShapeError);
    TrainConfig bad;
    bad.validation_fraction = 1.0;
    CHECK_THROWS_AS(train(m3, separable_fixture(), bad), ParameterError);
}

TEST_CASE("checkpoint round trip") {
    for (bool baseline : {false, true}) {
        auto model = init_model(small_spec(5, 20, baseline), 61);
        if (baseline) {
            model.input_mean = {3.0, 4.0};
            model.input_scale = {2.0, 0.5};
        }
        model.label_space = {{"case", 1}, {"params", {{"min_exp", 4}, {"max_mac_exp", 18}}}};
        const auto path = std::filesystem::temp_directory_path() / "sysdse_test_model.bin";
        save_checkpoint(model, path);
        const auto back = load_checkpoint(path);
        CHECK(back.label_space == model.label_space);
        CHECK(checkpoint_bytes(back) == checkpoint_bytes(model));
        Rng rng(62);
        for (int i = 0; i < 100; ++i) {
            const auto raw = random_row(rng);
            CHECK(forward(back, prepare_input(back, raw)) == forward(model, prepare_input(model, raw)));
        }
        std::filesystem::remove(path);
    }

    ModelSpec big = small_spec(1000);
    const auto m = checkpoint_from_bytes(checkpoint_bytes(init_model(big, 1)));
    CHECK(forward(m, ModelInput{{0, 0}, {}}).size() == 1000);
}

TEST_CASE("damaged checkpoints are rejected") {
    const std::string bytes = checkpoint_bytes(init_model(small_spec(), 71));
    CHECK_THROWS_AS(checkpoint_from_bytes(bytes.substr(0, bytes.size() - 1)), CheckpointError);
    CHECK_THROWS_AS(checkpoint_from_bytes(bytes.substr(0, 20)), CheckpointError);
    CHECK_THROWS_AS(checkpoint_from_bytes(bytes + "x"), CheckpointError);

    const auto nl = bytes.find('\n');
    auto header = nlohmann::json::parse(bytes.substr(0, nl));
    auto versioned = header;
    versioned["version"] = kCheckpointVersion + 1;
    CHECK_THROWS_AS(checkpoint_from_bytes(versioned.dump() + bytes.substr(nl)), CheckpointError);
    auto reshaped = header;
    reshaped["spec"]["hidden_units"] = 31;
    CHECK_THROWS_AS(checkpoint_from_bytes(reshaped.dump() + bytes.substr(nl)), CheckpointError);

    CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.bin"), IoError);
}
