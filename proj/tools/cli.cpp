#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "epkit/conduction.hpp"
#include "epkit/error.hpp"
#include "epkit/pipeline.hpp"
#include "epkit/report_io.hpp"
#include "epkit/session_io.hpp"
#include "epkit/stats.hpp"
#include "epkit/synth.hpp"

namespace epkit::cli {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kCommands = {"simulate", "preprocess", "epochs", "metrics", "tfr", "velocity", "compare"};

// Flags that override individual pipeline settings.
struct Overrides {
  std::string config_path;
  std::optional<double> extra_ms, line_hz, low_hz, high_hz;
  std::optional<int> filter_order;
  bool no_line{false}, no_bandpass{false};
  std::optional<double> t_min, t_max, threshold_uv, n1_from, n1_to;
  std::optional<std::string> gate;
  bool invert{false}, no_smooth{false};
};

void add_config_option(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config_path, "JSON pipeline config (flags override it)");
}

void add_preprocess_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--extra-ms", o.extra_ms, "excision margin after each pulse");
  cmd.add_option("--line-hz", o.line_hz, "mains frequency");
  cmd.add_flag("--no-line", o.no_line, "skip mains template subtraction");
  cmd.add_option("--low-hz", o.low_hz, "band-pass low edge");
  cmd.add_option("--high-hz", o.high_hz, "band-pass high edge");
  cmd.add_option("--filter-order", o.filter_order, "band-pass order");
  cmd.add_flag("--no-bandpass", o.no_bandpass, "skip band-pass filtering");
}

void add_analysis_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--t-min", o.t_min, "epoch start, ms");
  cmd.add_option("--t-max", o.t_max, "epoch end, ms");
  cmd.add_option("--threshold-uv", o.threshold_uv, "amplitude gate");
  cmd.add_option("--gate", o.gate, "any-deflection or n1-amplitude")
      ->check(CLI::IsMember({"any-deflection", "n1-amplitude"}));
  cmd.add_option("--n1-from", o.n1_from, "N1 search start, ms");
  cmd.add_option("--n1-to", o.n1_to, "N1 search end, ms");
  cmd.add_flag("--invert", o.invert, "flip responses whose N1 window is dominated by a positive peak");
  cmd.add_flag("--no-smooth", o.no_smooth, "measure on the unsmoothed average");
}

PipelineConfig make_config(const Overrides& o) {
  PipelineConfig c;
  if (const char* env = std::getenv("EPKIT_OUT_DIR"); env != nullptr && *env != '\0') c.output_dir = env;
  if (!o.config_path.empty()) c = load_config(o.config_path, c);
  auto& p = c.preprocess;
  if (o.extra_ms) p.extra_ms = *o.extra_ms;
  if (o.line_hz) p.line_hz = *o.line_hz;
  if (o.no_line) p.remove_line_noise = false;
  if (o.low_hz) p.filter.low_hz = *o.low_hz;
  if (o.high_hz) p.filter.high_hz = *o.high_hz;
  if (o.filter_order) p.filter.order = *o.filter_order;
  if (o.no_bandpass) p.band_pass = false;
  if (o.t_min) c.epoch_window.t_min_ms = *o.t_min;
  if (o.t_max) c.epoch_window.t_max_ms = *o.t_max;
  if (o.threshold_uv) c.amplitude_threshold_uv = *o.threshold_uv;
  if (o.gate) c.gate_mode = *o.gate == "n1-amplitude" ? GateMode::n1_amplitude : GateMode::any_deflection;
  if (o.n1_from) c.metrics.n1_window_lo_ms = c.onsets.n1_window_lo_ms = *o.n1_from;
  if (o.n1_to) c.metrics.n1_window_hi_ms = c.onsets.n1_window_hi_ms = *o.n1_to;
  if (o.invert) c.metrics.invert = true;
  if (o.no_smooth) c.metrics.smooth = false;
  c.validate();
  return c;
}

fs::path output_path(const std::string& flag, const PipelineConfig& c, const std::string& default_name) {
  return flag.empty() ? fs::path(c.output_dir) / default_name : fs::path(flag);
}

Point3 parse_point(const std::vector<double>& v) {
  if (v.size() != 3) throw Error(ErrorCode::ConfigError, "a position needs three coordinates");
  return {v[0], v[1], v[2]};
}

void warn_if_raw(const Session& s, std::ostream& err) {
  if (s.processing.empty()) err << "warning: session has not been preprocessed\n";
}

Session maybe_preprocess(Session s, bool run, const PipelineConfig& c, std::ostream& err) {
  if (run) {
    auto r = preprocess_session(s, c.preprocess);
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
    return std::move(r.session);
  }
  warn_if_raw(s, err);
  return s;
}

std::vector<std::size_t> selected_trains(const Session& s, const std::optional<std::size_t>& train) {
  if (train) {
    if (*train >= s.trains.size()) throw Error(ErrorCode::InvalidSpec, "session has no train " + std::to_string(*train));
    return {*train};
  }
  std::vector<std::size_t> all(s.trains.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

void report_written(std::ostream& out, const fs::path& p) { out << "wrote " << p.string() << "\n"; }

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string preset{"dcr"};
  double delay_ms{0.0};
  std::size_t pulses{30};
  double f_des{9.0};
  double fs{19200.0};
  double pulse_width_ms{1.0};
  std::uint64_t seed{0};
  double white_sigma{20.0};
  double line_amp{50.0};
  double line_phase{0.0};
  double artifact_amp{500.0};
  std::size_t channels{4};
  std::string responder;
  double lead_s{0.5};
  double tail_s{0.5};
  std::vector<int> polarity{1, -1};
  std::vector<double> site{0.0, 0.0, 0.0};
  std::string patient{"synthetic"};
  std::string out;
};

int run_simulate(const SimulateArgs& a, const Overrides& o, std::ostream& out) {
  const PipelineConfig c = make_config(o);
  EpKernelSpec spec = a.preset == "acep" ? EpKernelSpec::acep_preset() : EpKernelSpec::dcr_preset();
  spec.conduction_delay_ms = a.delay_ms;
  if (a.pulses == 0) throw Error(ErrorCode::ConfigError, "--pulses must be positive");
  if (a.channels == 0) throw Error(ErrorCode::ConfigError, "--channels must be positive");

  std::vector<SynthChannel> layout;
  std::optional<std::size_t> responder;
  for (std::size_t i = 0; i < a.channels; ++i) {
    SynthChannel ch;
    ch.id = "ch" + std::to_string(i + 1);
    ch.line_gain = 1.0 - 0.6 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(a.channels, 2) - 1);
    ch.position = Point3{10.0 * static_cast<double>(i), 0.0, 0.0};
    if (ch.id == a.responder) responder = i;
    layout.push_back(ch);
  }
  if (!a.responder.empty() && !responder) throw Error(ErrorCode::ConfigError, "unknown responder " + a.responder);
  if (responder) {
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const auto d = static_cast<double>(i > *responder ? i - *responder : *responder - i);
      layout[i].response_gain = 1.0 / (1.0 + d);
    }
  }

  const auto first = static_cast<std::size_t>(std::llround(a.lead_s * a.fs));
  const StimTrain train(spec.kind, a.f_des, a.pulse_width_ms, regular_onsets(first, a.pulses, a.f_des, a.fs),
                        a.polarity, parse_point(a.site), a.fs);
  const double duration = a.lead_s + static_cast<double>(a.pulses - 1) / a.f_des + a.tail_s;
  NoiseSpec noise{a.white_sigma, a.line_amp, 50.0, a.line_phase, a.artifact_amp, a.seed};
  SynthRecording rec = synth_recording(spec, train, noise, a.fs, duration, layout);
  rec.session.patient_label = a.patient;

  const fs::path dir = output_path(a.out, c, "session");
  report_written(out, save_session(rec.session, dir));
  write_text_file(dir / "truth.json", truth_json(rec));
  report_written(out, dir / "truth.json");
  return ExitCode::ok;
}

// ---- preprocess -----------------------------------------------------------

std::string templates_text(const PreprocessResult& r) {
  std::ostringstream s;
  s << "# reference_channel: " << r.reference_channel << "\n";
  s << "channel\tperiods_used\tresampled\tpattern_uv\n";
  for (const auto& t : r.templates) {
    s << t.channel << "\t" << t.periods_used << "\t" << (t.resampled ? "true" : "false") << "\t";
    for (std::size_t i = 0; i < t.pattern.size(); ++i) s << (i ? " " : "") << format_number(t.pattern[i]);
    s << "\n";
  }
  return s.str();
}

int run_preprocess(const std::string& session_path, const std::string& out_flag, const Overrides& o,
                   std::ostream& out, std::ostream& err) {
  const PipelineConfig c = make_config(o);
  const Session s = load_session(session_path);
  const PreprocessResult r = preprocess_session(s, c.preprocess);
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  const fs::path dir = output_path(out_flag, c, "preprocessed");
  report_written(out, save_session(r.session, dir));
  if (!r.templates.empty()) {
    write_text_file(dir / "line_templates.tsv", templates_text(r));
    report_written(out, dir / "line_templates.tsv");
  }
  return ExitCode::ok;
}

// ---- epochs ---------------------------------------------------------------

struct AnalysisArgs {
  std::string session;
  std::string evoked;
  std::string channel;
  std::optional<std::size_t> train;
  std::string out;
  std::string per_pulse;
  std::string patient;
  bool preprocess{false};
};

int run_epochs(const AnalysisArgs& a, const Overrides& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig c = make_config(o);
  const Session s = maybe_preprocess(load_session(a.session), a.preprocess, c, err);
  const fs::path dir = output_path(a.out, c, "epochs");
  std::ostringstream summary;
  summary << "train\tkind\tn_epochs\tdropped\tgate_uv\taccepted\tsimilarity\tstable\tnote\n";
  for (std::size_t t : selected_trains(s, a.train)) {
    const TrainAnalysis r = analyze_train(s, t, a.channel, c);
    const fs::path file = dir / ("evoked_train" + std::to_string(t) + ".txt");
    write_text_file(file, evoked_text(r.evoked));
    report_written(out, file);
    summary << t << "\t" << to_string(r.epochs.kind) << "\t" << r.epochs.size() << "\t" << r.epochs.dropped << "\t"
            << format_number(r.gate.measured_uv) << "\t" << (r.gate.accept ? "true" : "false") << "\t"
            << (r.stability ? format_number(r.stability->similarity) : "NA") << "\t"
            << (r.stability ? (r.stability->stable ? "true" : "false") : "NA") << "\t"
            << (r.note.empty() ? "-" : r.note) << "\n";
  }
  write_text_file(dir / "epochs.tsv", summary.str());
  report_written(out, dir / "epochs.tsv");
  return ExitCode::ok;
}

// ---- metrics --------------------------------------------------------------

int run_metrics(const AnalysisArgs& a, const Overrides& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig c = make_config(o);
  std::vector<MetricsRow> rows;
  std::ostringstream pulses;
  pulses << "train\tpulse\tonset_ms\n";

  if (!a.evoked.empty()) {
    const EvokedPotential ep = parse_evoked(read_text_file(a.evoked));
    const GateResult gate = amplitude_gate(ep, c.amplitude_threshold_uv, c.gate_mode);
    if (gate.accept) {
      rows.push_back({a.patient, ep.channel, ep.kind, 0, ep.n_averaged, compute_metrics(ep, c.metrics)});
    } else {
      err << "warning: response rejected by amplitude gate\n";
    }
  } else {
    if (a.session.empty() || a.channel.empty()) {
      throw Error(ErrorCode::ConfigError, "metrics needs --evoked, or --session with --channel");
    }
    const Session s = maybe_preprocess(load_session(a.session), a.preprocess, c, err);
    const std::string patient = a.patient.empty() ? s.patient_label : a.patient;
    for (std::size_t t : selected_trains(s, a.train)) {
      const TrainAnalysis r = analyze_train(s, t, a.channel, c);
      if (!r.metrics) {
        err << "warning: train " << t << ": " << r.note << "\n";
        continue;
      }
      rows.push_back({patient, a.channel, r.epochs.kind, t, r.evoked.n_averaged, *r.metrics});
      if (!a.per_pulse.empty()) {
        const TrainOnsets on = per_train_onsets(r.epochs, c.onsets);
        for (std::size_t p = 0; p < on.onsets_ms.size(); ++p) {
          pulses << t << "\t" << p << "\t" << format_number(on.onsets_ms[p]) << "\n";
        }
        if (on.missing) err << "warning: train " << t << ": " << on.missing << " pulses without an onset\n";
      }
    }
  }
  if (rows.empty()) err << "warning: no response passed the gate\n";
  const fs::path file = output_path(a.out, c, "metrics.tsv");
  write_text_file(file, metrics_table_text(rows));
  report_written(out, file);
  if (!a.per_pulse.empty()) {
    write_text_file(a.per_pulse, pulses.str());
    report_written(out, a.per_pulse);
  }
  return ExitCode::ok;
}

// ---- tfr ------------------------------------------------------------------

struct TfrArgs {
  AnalysisArgs base;
  bool allow_dirty{false};
  bool subtract_evoked{false};
  std::optional<std::size_t> nfft;
  std::optional<double> window_ms, step_ms;
};

int run_tfr(const TfrArgs& a, const Overrides& o, std::ostream& out, std::ostream& err) {
  PipelineConfig c = make_config(o);
  if (a.nfft) c.stft.nfft = *a.nfft;
  if (a.window_ms) c.stft.window_ms = *a.window_ms;
  if (a.step_ms) c.stft.step_ms = *a.step_ms;
  if (a.subtract_evoked) c.stft.subtract_evoked = true;
  c.validate();
  const Session s = maybe_preprocess(load_session(a.base.session), a.base.preprocess, c, err);
  const bool cleaned = std::any_of(s.processing.begin(), s.processing.end(),
                                   [](const std::string& step) { return step.rfind("line", 0) == 0; });
  if (!cleaned && !a.allow_dirty) {
    throw Error(ErrorCode::ConfigError,
                "session has no mains cleaning step; preprocess it first or pass --allow-dirty");
  }
  const auto trains = selected_trains(s, a.base.train);
  for (std::size_t t : trains) {
    const EpochSet set = extract_epochs(s.buffer, s.trains[t], a.base.channel, c.epoch_window, c.preprocess.extra_ms);
    const TimeFrequencyMap map = stft_power_db(set, c.stft);
    const std::string name = "tfr_train" + std::to_string(t) + ".txt";
    fs::path file = fs::path(c.output_dir) / name;
    if (!a.base.out.empty()) file = trains.size() == 1 ? fs::path(a.base.out) : fs::path(a.base.out) / name;
    write_text_file(file, tf_map_text(map));
    report_written(out, file);
    out << "train " << t << " gamma_db\t" << format_number(gamma_band_summary(map, c.tf_centers_ms, c.gamma_hz))
        << "\n";
  }
  return ExitCode::ok;
}

// ---- velocity -------------------------------------------------------------

struct VelocityArgs {
  std::string dcr, acep;
  std::optional<double> distance_mm;
  std::string dcr_session, acep_session;
  std::string out;
};

double site_distance(const std::string& dcr_session, const std::string& acep_session) {
  const Session a = load_session(dcr_session);
  const Session b = load_session(acep_session);
  if (a.trains.empty() || b.trains.empty()) throw Error(ErrorCode::InvalidManifest, "session has no train");
  return euclidean_distance(a.trains.front().site(), b.trains.front().site());
}

int run_velocity(const VelocityArgs& a, const Overrides& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig c = make_config(o);
  double distance = 0.0;
  if (a.distance_mm) {
    distance = *a.distance_mm;
  } else if (!a.dcr_session.empty() && !a.acep_session.empty()) {
    distance = site_distance(a.dcr_session, a.acep_session);
  } else {
    throw Error(ErrorCode::ConfigError, "velocity needs --distance-mm or both --dcr-session and --acep-session");
  }
  const auto dcr = parse_metrics_table(read_text_file(a.dcr));
  const auto acep = parse_metrics_table(read_text_file(a.acep));
  if (dcr.size() != acep.size()) throw Error(ErrorCode::LengthMismatch, "DCR and ACEP tables differ in length");
  std::vector<ConductionEstimate> estimates;
  for (std::size_t i = 0; i < dcr.size(); ++i) {
    if (!dcr[i].metrics.t_zc1 || !acep[i].metrics.t_zc1) {
      err << "warning: row " << i << " lacks an onset; skipped\n";
      continue;
    }
    const double delay = onset_delay(dcr[i].metrics, acep[i].metrics);
    estimates.push_back(make_estimate(distance, delay, dcr[i].patient,
                                      dcr[i].channel + "#" + std::to_string(dcr[i].train),
                                      acep[i].channel + "#" + std::to_string(acep[i].train)));
  }
  const fs::path file = output_path(a.out, c, "velocity.txt");
  write_text_file(file, velocity_report_text(estimates));
  report_written(out, file);
  return ExitCode::ok;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::string a, b;
  std::string field{"t_zc1_ms"};
  std::string test{"paired-t"};
  std::string tails{"two"};
  std::string alternative{"less"};
  std::string out;
};

std::vector<double> present(const std::vector<std::optional<double>>& v) {
  std::vector<double> out;
  for (const auto& x : v) {
    if (x) out.push_back(*x);
  }
  return out;
}

int run_compare(const CompareArgs& a, const Overrides& o, std::ostream& out) {
  const PipelineConfig c = make_config(o);
  const Alternative alt = a.tails == "two" ? Alternative::two_sided
                                           : (a.alternative == "greater" ? Alternative::greater : Alternative::less);
  const auto rows_a = parse_metrics_table(read_text_file(a.a));
  const auto col_a = metrics_column(rows_a, a.field);
  std::vector<std::optional<double>> col_b;
  const bool two_sample = a.test == "paired-t" || a.test == "rank-sum";
  if (two_sample) {
    if (a.b.empty()) throw Error(ErrorCode::ConfigError, a.test + " needs --b");
    const auto rows_b = parse_metrics_table(read_text_file(a.b));
    col_b = metrics_column(rows_b, a.field);
  }

  TestResult r;
  if (a.test == "paired-t") {
    if (col_a.size() != col_b.size()) throw Error(ErrorCode::LengthMismatch, "paired tables differ in length");
    std::vector<double> xa, xb;
    for (std::size_t i = 0; i < col_a.size(); ++i) {
      if (col_a[i] && col_b[i]) xa.push_back(*col_a[i]), xb.push_back(*col_b[i]);
    }
    r = t_test(xa, xb, TMode::paired, alt);
  } else if (a.test == "one-sample-t") {
    r = one_sample_t(present(col_a), alt);
  } else if (a.test == "rank-sum") {
    r = rank_sum(present(col_a), present(col_b), alt);
  } else {
    if (a.tails != "two") throw Error(ErrorCode::ConfigError, "shapiro-wilk has no one-tailed form");
    r = shapiro_wilk(present(col_a));
  }
  const std::string text = test_result_text(r, a.field);
  const fs::path file = output_path(a.out, c, "compare.txt");
  write_text_file(file, text);
  out << text;
  report_written(out, file);
  return ExitCode::ok;
}

int exit_for(ErrorCode code) {
  switch (category_of(code)) {
    case ErrorCategory::usage: return ExitCode::usage;
    case ErrorCategory::numeric: return ExitCode::numeric;
    case ErrorCategory::data: return ExitCode::data;
  }
  return ExitCode::data;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (!args.empty() && !args.front().starts_with("-") &&
      std::find(kCommands.begin(), kCommands.end(), args.front()) == kCommands.end()) {
    err << "error: " << Error(ErrorCode::UnknownCommand, "'" + args.front() + "' is not an epkit command").what()
        << "\n";
    return ExitCode::usage;
  }

  CLI::App app{"Evoked-potential analysis toolkit"};
  app.name("epkit");
  app.require_subcommand(1);

  Overrides ov;
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "write a synthetic session and its ground truth");
  simulate->add_option("--preset", sim.preset, "kernel preset")->check(CLI::IsMember({"dcr", "acep"}));
  simulate->add_option("--delay-ms", sim.delay_ms, "conduction delay added to the kernel");
  simulate->add_option("--pulses", sim.pulses, "pulse count");
  simulate->add_option("--f-des", sim.f_des, "stimulation frequency, Hz");
  simulate->add_option("--fs", sim.fs, "sampling rate, Hz");
  simulate->add_option("--pulse-width-ms", sim.pulse_width_ms, "biphasic pulse duration");
  simulate->add_option("--seed", sim.seed, "noise seed");
  simulate->add_option("--white-sigma", sim.white_sigma, "white noise sd, uV");
  simulate->add_option("--line-amp", sim.line_amp, "50 Hz amplitude, uV");
  simulate->add_option("--line-phase", sim.line_phase, "50 Hz phase at sample 0, rad");
  simulate->add_option("--artifact-amp", sim.artifact_amp, "stimulation artifact height, uV");
  simulate->add_option("--channels", sim.channels, "channel count");
  simulate->add_option("--responder", sim.responder, "channel with the full response; others decay with index");
  simulate->add_option("--lead-s", sim.lead_s, "recording before the first pulse, s");
  simulate->add_option("--tail-s", sim.tail_s, "recording after the last pulse, s");
  simulate->add_option("--polarity", sim.polarity, "polarity pattern, cycled")->delimiter(',');
  simulate->add_option("--site", sim.site, "stimulation site x,y,z mm")->delimiter(',')->expected(3);
  simulate->add_option("--patient", sim.patient, "patient label");
  simulate->add_option("--out", sim.out, "output directory");
  add_config_option(*simulate, ov);

  std::string pre_session, pre_out;
  auto* preprocess = app.add_subcommand("preprocess", "excise artifacts, remove mains noise, band-pass");
  preprocess->add_option("--session", pre_session, "session directory or manifest")->required();
  preprocess->add_option("--out", pre_out, "output directory");
  add_config_option(*preprocess, ov);
  add_preprocess_options(*preprocess, ov);

  AnalysisArgs ep_args;
  auto* epochs = app.add_subcommand("epochs", "cut, average and gate the responses of each train");
  epochs->add_option("--session", ep_args.session, "session directory or manifest")->required();
  epochs->add_option("--channel", ep_args.channel, "recording channel")->required();
  epochs->add_option("--train", ep_args.train, "train index (default: all)");
  epochs->add_option("--out", ep_args.out, "output directory");
  epochs->add_flag("--preprocess", ep_args.preprocess, "preprocess the session first");
  add_config_option(*epochs, ov);
  add_preprocess_options(*epochs, ov);
  add_analysis_options(*epochs, ov);

  AnalysisArgs m_args;
  auto* metrics = app.add_subcommand("metrics", "waveform metrics of every accepted response");
  auto* m_session = metrics->add_option("--session", m_args.session, "session directory or manifest");
  metrics->add_option("--evoked", m_args.evoked, "averaged response file instead of a session")->excludes(m_session);
  metrics->add_option("--channel", m_args.channel, "recording channel");
  metrics->add_option("--train", m_args.train, "train index (default: all)");
  metrics->add_option("--out", m_args.out, "metrics table path");
  metrics->add_option("--per-pulse", m_args.per_pulse, "also write per-pulse onsets here");
  metrics->add_option("--patient", m_args.patient, "patient label for the rows");
  metrics->add_flag("--preprocess", m_args.preprocess, "preprocess the session first");
  add_config_option(*metrics, ov);
  add_preprocess_options(*metrics, ov);
  add_analysis_options(*metrics, ov);

  TfrArgs tf_args;
  auto* tfr = app.add_subcommand("tfr", "baseline-normalised time-frequency power");
  tfr->add_option("--session", tf_args.base.session, "session directory or manifest")->required();
  tfr->add_option("--channel", tf_args.base.channel, "recording channel")->required();
  tfr->add_option("--train", tf_args.base.train, "train index (default: all)");
  tfr->add_option("--out", tf_args.base.out, "map path (a directory when several trains are written)");
  tfr->add_flag("--preprocess", tf_args.base.preprocess, "preprocess the session first");
  tfr->add_flag("--allow-dirty", tf_args.allow_dirty, "accept a session without mains cleaning");
  tfr->add_flag("--subtract-evoked", tf_args.subtract_evoked, "remove the average before the transform");
  tfr->add_option("--nfft", tf_args.nfft, "transform length in samples");
  tfr->add_option("--window-ms", tf_args.window_ms, "analysis window");
  tfr->add_option("--step-ms", tf_args.step_ms, "window step");
  add_config_option(*tfr, ov);
  add_preprocess_options(*tfr, ov);
  add_analysis_options(*tfr, ov);

  VelocityArgs v_args;
  auto* velocity = app.add_subcommand("velocity", "conduction velocity from paired DCR/ACEP onsets");
  velocity->add_option("--dcr", v_args.dcr, "DCR metrics table")->required();
  velocity->add_option("--acep", v_args.acep, "ACEP metrics table")->required();
  velocity->add_option("--distance-mm", v_args.distance_mm, "distance between the stimulation sites");
  velocity->add_option("--dcr-session", v_args.dcr_session, "session giving the DCR site");
  velocity->add_option("--acep-session", v_args.acep_session, "session giving the ACEP site");
  velocity->add_option("--out", v_args.out, "report path");
  add_config_option(*velocity, ov);

  CompareArgs c_args;
  auto* compare = app.add_subcommand("compare", "statistical test on one metrics column");
  compare->add_option("--a", c_args.a, "first metrics table")->required();
  compare->add_option("--b", c_args.b, "second metrics table");
  compare->add_option("--field", c_args.field, "column to test");
  compare->add_option("--test", c_args.test, "test")
      ->check(CLI::IsMember({"paired-t", "one-sample-t", "rank-sum", "shapiro-wilk"}));
  compare->add_option("--tails", c_args.tails, "one or two")->check(CLI::IsMember({"one", "two"}));
  compare->add_option("--alternative", c_args.alternative, "direction of a one-tailed test (a vs b)")
      ->check(CLI::IsMember({"less", "greater"}));
  compare->add_option("--out", c_args.out, "result path");
  add_config_option(*compare, ov);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == static_cast<int>(CLI::ExitCodes::Success) ? ExitCode::ok : ExitCode::usage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim, ov, out);
    if (preprocess->parsed()) return run_preprocess(pre_session, pre_out, ov, out, err);
    if (epochs->parsed()) return run_epochs(ep_args, ov, out, err);
    if (metrics->parsed()) return run_metrics(m_args, ov, out, err);
    if (tfr->parsed()) return run_tfr(tf_args, ov, out, err);
    if (velocity->parsed()) return run_velocity(v_args, ov, out, err);
    if (compare->parsed()) return run_compare(c_args, ov, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::data;
  }
  return ExitCode::usage;
}

}  // namespace epkit::cli
