#include <cmath>
#include <string>

#include "epkit/pipeline.hpp"
#include "epkit/synth.hpp"
#include "helpers.hpp"

using namespace epkit;

namespace {

constexpr double kFs = 19200.0;

SynthRecording recording(const EpKernelSpec& spec, double response_gain = 1.0) {
  NoiseSpec noise{3.0, 40.0, 50.0, 0.2, 1500.0, 4};
  const StimTrain train(spec.kind, 9.0, 1.0, regular_onsets(3840, 30, 9.0, kFs), {1, -1}, {}, kFs);
  return synth_recording(spec, train, noise, kFs, 4.0, {SynthChannel{"ch1", response_gain, 1.0, {}}});
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config json round trip") {
    PipelineConfig c;
    c.amplitude_threshold_uv = 80.0;
    c.gate_mode = GateMode::n1_amplitude;
    c.metrics.invert = true;
    c.tf_centers_ms = {15.0, 20.0};
    c.stft.nfft = 1024;
    c.output_dir = "out/x";
    const std::string text = config_to_json(c);
    const auto back = config_from_json(text);
    CHECK(config_to_json(back) == text);
    CHECK(back.amplitude_threshold_uv == 80.0);
    CHECK(back.gate_mode == GateMode::n1_amplitude);
    CHECK(back.metrics.invert);
    CHECK(back.stft.nfft == 1024);
    CHECK(config_to_json(config_from_json(config_to_json(PipelineConfig{}))) == config_to_json(PipelineConfig{}));
  }

  TEST_CASE("partial config overrides the base") {
    PipelineConfig base;
    base.amplitude_threshold_uv = 70.0;
    const auto c = config_from_json(R"({"n1_window_ms": [7, 30], "band_pass": {"high_hz": 900}})", base);
    CHECK(c.amplitude_threshold_uv == 70.0);
    CHECK(c.metrics.n1_window_lo_ms == 7.0);
    CHECK(c.onsets.n1_window_hi_ms == 30.0);
    CHECK(c.preprocess.filter.high_hz == 900.0);
    CHECK(c.preprocess.filter.low_hz == 1.0);
  }

  TEST_CASE("config errors") {
    CHECK_EPKIT_ERROR(config_from_json("{"), ErrorCode::ConfigError);
    CHECK_EPKIT_ERROR(config_from_json(R"({"threshold": 5})"), ErrorCode::ConfigError);
    CHECK_EPKIT_ERROR(config_from_json(R"({"band_pass": {"cutoff": 5}})"), ErrorCode::ConfigError);
    CHECK_EPKIT_ERROR(config_from_json(R"({"amplitude_threshold_uv": "high"})"), ErrorCode::ConfigError);
    CHECK_EPKIT_ERROR(config_from_json(R"({"gate_mode": "loud"})"), ErrorCode::ConfigError);
    CHECK_EPKIT_ERROR(config_from_json(R"({"n1_window_ms": [30, 8]})"), ErrorCode::ConfigError);
    CHECK_EPKIT_ERROR(config_from_json(R"({"slope_window_ms": [50, 140]})"), ErrorCode::ConfigError);
    CHECK_EPKIT_ERROR(config_from_json(R"({"epoch_window_ms": [-2, 105]})"), ErrorCode::ConfigError);
    CHECK_EPKIT_ERROR(config_from_json(R"({"tf_centers_ms": [100]})"), ErrorCode::ConfigError);
    CHECK_EPKIT_ERROR(config_from_json(R"({"stft": {"baseline_centers_ms": [-25, 0]}})"), ErrorCode::ConfigError);
    CHECK_EPKIT_ERROR(load_config(testutil::scratch("pipeline") / "absent.json"), ErrorCode::MissingFile);
  }

  TEST_CASE("pipeline on a synthetic recording") {
    const auto rec = recording(EpKernelSpec::dcr_preset());
    const auto run = run_pipeline(rec.session, "ch1");
    REQUIRE(run.trains.size() == 1);
    const auto& t = run.trains[0];
    CHECK(t.epochs.size() == 30);
    CHECK(t.gate.accept);
    REQUIRE(t.stability);
    CHECK(t.stability->stable);
    REQUIRE(t.metrics);
    CHECK(*t.metrics->t_zc1 == doctest::Approx(*rec.truth.t_zc1).epsilon(0.3 / *rec.truth.t_zc1));
    CHECK(t.metrics->n1_maxamp == doctest::Approx(rec.truth.n1_maxamp).epsilon(0.05));
    CHECK(run.preprocessed.session.processing == std::vector<std::string>{"excise", "line50", "bandpass"});
  }

  TEST_CASE("weak responses are gated out") {
    const auto rec = recording(EpKernelSpec::dcr_preset(), 0.3);
    const auto run = run_pipeline(rec.session, "ch1");
    CHECK_FALSE(run.trains[0].gate.accept);
    CHECK_FALSE(run.trains[0].metrics.has_value());
    CHECK(run.trains[0].note == "rejected by amplitude gate");
    CHECK_EPKIT_ERROR(analyze_train(run.preprocessed.session, 3, "ch1"), ErrorCode::InvalidSpec);
  }
}
