#include "nino/pipeline.hpp"

#include <cmath>
#include <fstream>

#include <spdlog/spdlog.h>

#include "nino/checkpoint.hpp"
#include "nino/error.hpp"
#include "nino/evaluation.hpp"
#include "nino/forecast.hpp"
#include "nino/grid_csv.hpp"
#include "nino/heatmap.hpp"
#include "nino/rng.hpp"

namespace nino {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  try {
    if (j.contains("sst")) c.sst = j.at("sst").get<std::string>();
    if (j.contains("ohc")) c.ohc = j.at("ohc").get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      c.bounds = GeoBounds(b.at("lat_min"), b.at("lat_max"), b.at("lon_min"), b.at("lon_max"));
    }
    if (j.contains("base_period") && !j.at("base_period").is_null()) {
      c.base_period = Period::parse(j.at("base_period").get<std::string>());
    }
    c.window = j.value("window", c.window);
    c.horizon = j.value("horizon", c.horizon);
    c.stride = j.value("stride", c.stride);
    if (j.contains("convlstm")) {
      const auto& m = j.at("convlstm");
      if (m.contains("hidden")) c.convlstm.hidden = m.at("hidden").get<std::array<std::size_t, 2>>();
      c.convlstm.kernel = m.value("kernel", c.convlstm.kernel);
      c.convlstm.dropout = m.value("dropout", c.convlstm.dropout);
    }
    if (j.contains("cnn")) {
      const auto& m = j.at("cnn");
      if (m.contains("channels")) c.cnn.channels = m.at("channels").get<std::vector<std::size_t>>();
      c.cnn.kernel = m.value("kernel", c.cnn.kernel);
      c.cnn.hidden = m.value("hidden", c.cnn.hidden);
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      c.train.epochs = t.value("epochs", c.train.epochs);
      c.train.lr = t.value("lr", c.train.lr);
      c.train.batch = t.value("batch", c.train.batch);
      c.train.split = t.value("split", c.train.split);
    }
    c.n_steps = j.value("n_steps", c.n_steps);
    c.threshold = j.value("threshold", c.threshold);
    c.seed = j.value("seed", c.seed);
    if (j.contains("synth")) c.synth = synth_spec_from_json(j.at("synth"));
    if (j.contains("render")) {
      const auto& r = j.at("render");
      if (r.contains("input")) c.render.input = r.at("input").get<std::string>();
      c.render.min = r.value("min", c.render.min);
      c.render.max = r.value("max", c.render.max);
      c.render.cell_px = r.value("cell_px", c.render.cell_px);
      c.render.png = r.value("png", c.render.png);
    }
    if (j.contains("anchor") && !j.at("anchor").is_null()) c.anchor = TimeStamp::parse(j.at("anchor").get<std::string>());
    c.self_test = j.value("self_test", c.self_test);
  } catch (const json::exception& e) {
    fail(ErrorKind::BadConfig, std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::FileNotFound, "config not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::BadConfig, path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

json to_json(const RunConfig& c) {
  json j{{"sst", c.sst.string()},
         {"ohc", c.ohc.string()},
         {"output_dir", c.output_dir.string()},
         {"bounds", {{"lat_min", c.bounds.lat_min}, {"lat_max", c.bounds.lat_max},
                     {"lon_min", c.bounds.lon_min}, {"lon_max", c.bounds.lon_max}}},
         {"base_period", c.base_period ? json(c.base_period->str()) : json(nullptr)},
         {"window", c.window},
         {"horizon", c.horizon},
         {"stride", c.stride},
         {"convlstm", {{"hidden", c.convlstm.hidden}, {"kernel", c.convlstm.kernel}, {"dropout", c.convlstm.dropout}}},
         {"cnn", {{"channels", c.cnn.channels}, {"kernel", c.cnn.kernel}, {"hidden", c.cnn.hidden}}},
         {"train", {{"epochs", c.train.epochs}, {"lr", c.train.lr}, {"batch", c.train.batch}, {"split", c.train.split}}},
         {"n_steps", c.n_steps},
         {"threshold", c.threshold},
         {"seed", c.seed},
         {"synth", to_json(c.synth)},
         {"render", {{"input", c.render.input.string()}, {"min", c.render.min}, {"max", c.render.max},
                     {"cell_px", c.render.cell_px}, {"png", c.render.png}}},
         {"anchor", c.anchor ? json(c.anchor->str()) : json(nullptr)},
         {"self_test", c.self_test}};
  return j;
}

void finalize(RunConfig& c) {
  c.train.seed = c.seed;
  c.synth.seed = c.seed;
  if (!(c.threshold > 0.0)) fail(ErrorKind::BadConfig, "threshold must be positive");
  if (c.window == 0) fail(ErrorKind::BadConfig, "window must be positive");
  if (c.horizon != kQuarterSpan) {
    fail(ErrorKind::BadConfig, "horizon must be " + std::to_string(kQuarterSpan) + " months to form five quarters");
  }
  if (c.stride == 0) fail(ErrorKind::BadConfig, "stride must be positive");
  if (c.n_steps == 0) fail(ErrorKind::BadConfig, "n_steps must be positive");
  if (c.train.batch == 0) fail(ErrorKind::BadConfig, "batch must be positive");
  if (!(c.train.lr >= 0.0)) fail(ErrorKind::BadConfig, "lr must be non-negative");
  if (!(c.convlstm.dropout >= 0.0 && c.convlstm.dropout < 1.0)) fail(ErrorKind::BadRate, "dropout must lie in [0, 1)");
  if (c.cnn.channels.empty()) fail(ErrorKind::BadConfig, "cnn needs at least one conv layer");
  if (c.render.cell_px == 0) fail(ErrorKind::BadConfig, "render.cell_px must be positive");
}

// ---------------------------------------------------------------------------
// Data

namespace {

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) fail(ErrorKind::BadConfig, std::string(what) + " path is not set");
  if (!fs::exists(p)) fail(ErrorKind::FileNotFound, std::string(what) + " not found: " + p.string());
}

fs::path ensure_output_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create " + cfg.output_dir.string() + ": " + ec.message());
  return cfg.output_dir;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void echo_config(const RunConfig& cfg) { write_json(to_json(cfg), cfg.output_dir / "run_config.json"); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out.precision(17);
  return out;
}

Period base_period_for(const RunConfig& cfg, const SpatioTemporalGrid& sst) {
  return cfg.base_period ? *cfg.base_period : complete_years(sst);
}

void write_quarter_rows(const QuarterMatrix& m, const fs::path& path) { write_quarter_csv(m, path); }

}  // namespace

Dataset prepare(const RunConfig& cfg) {
  require_file(cfg.sst, "SST input");
  if (!cfg.ohc.empty()) require_file(cfg.ohc, "OHC input");

  Dataset d;
  auto sst = read_grid_csv(cfg.sst);
  if (!cfg.ohc.empty()) {
    auto [a, b] = align(sst, read_grid_csv(cfg.ohc));
    d.sst = std::move(a);
    d.ohc = std::move(b);
  } else {
    d.sst = std::move(sst);
  }
  d.clim = compute_climatology(d.sst, base_period_for(cfg, d.sst));
  d.anomalies = anomaly_fields(d.sst, d.clim);
  d.regional = regional_anomaly(d.sst, d.clim, cfg.bounds);

  const std::size_t n = window_count(d.sst.steps(), cfg.window, cfg.horizon, cfg.stride);
  if (n == 0) fail(ErrorKind::TooShort, "input too short for one " + std::to_string(cfg.window + cfg.horizon) + "-month sample");
  d.split = chronological_split(n, cfg.train.split);

  // Scaling sees only the months touched by training samples.
  const std::size_t fit_months = (d.split.n_train - 1) * cfg.stride + cfg.window + cfg.horizon;
  d.sst_norm = fit_minmax(d.sst, 0, fit_months);
  d.sst_scaled = normalize_grid(d.sst, d.sst_norm).grid;
  if (d.ohc) {
    d.ohc_norm = fit_minmax(*d.ohc, 0, fit_months);
    d.ohc_scaled = normalize_grid(*d.ohc, *d.ohc_norm).grid;
  }
  d.windows = build_windows(d.sst_scaled, d.ohc_scaled ? &*d.ohc_scaled : nullptr, cfg.window, cfg.horizon, cfg.stride);
  d.cnn_samples = build_cnn_samples(d.anomalies, d.regional, cfg.window, cfg.stride);
  spdlog::info("{} samples ({} train, {} test) on a {}x{} grid, {}..{}", n, d.split.n_train, d.split.n_test,
               d.sst.axes().n_lat(), d.sst.axes().n_lon(), d.sst.start().str(), d.sst.end().str());
  return d;
}

ConvLstmXt make_convlstm(const RunConfig& cfg, const Dataset& data) {
  ConvLstmXtConfig m;
  m.in_channels = data.ohc ? 2 : 1;
  m.hidden = cfg.convlstm.hidden;
  m.kernel = cfg.convlstm.kernel;
  m.horizon = cfg.horizon;
  m.n_lat = data.sst.axes().n_lat();
  m.n_lon = data.sst.axes().n_lon();
  m.dropout = cfg.convlstm.dropout;
  return ConvLstmXt(m, hash_key({cfg.seed, 1}));
}

CnnForecaster make_cnn(const RunConfig& cfg, const Dataset& data) {
  CnnForecasterConfig m;
  m.window = cfg.window;
  m.n_lat = data.sst.axes().n_lat();
  m.n_lon = data.sst.axes().n_lon();
  m.conv.clear();
  for (std::size_t ch : cfg.cnn.channels) m.conv.push_back({ch, cfg.cnn.kernel, Activation::Relu});
  m.head_hidden = cfg.cnn.hidden;
  return CnnForecaster(m, hash_key({cfg.seed, 2}));
}

AnchorForecasts forecast_anchors(const RunConfig& cfg, const Dataset& data, ConvLstmXt& lstm, CnnForecaster& cnn) {
  const std::size_t n = data.windows.size();
  if (n < cfg.n_steps) {
    fail(ErrorKind::TooShort, "need " + std::to_string(cfg.n_steps) + " forecast anchors, input yields " + std::to_string(n));
  }
  AnchorForecasts f;
  const std::size_t first = n - cfg.n_steps;
  const TimeStamp start = data.windows[first].anchor;
  f.observed.start = f.convlstm.start = f.cnn.start = f.ensemble.start = start;
  for (std::size_t s = first; s < n; ++s) {
    const auto& w = data.windows[s];
    const Quarters lq = predict_quarter_anomalies(lstm.predict(w.inputs), w.anchor, data.sst.axes(), data.sst_norm,
                                                  data.clim, cfg.bounds);
    const Quarters cq = cnn.predict(data.cnn_samples[s].inputs);
    f.observed.rows.push_back(data.cnn_samples[s].targets);
    f.convlstm.rows.push_back(lq);
    f.cnn.rows.push_back(cq);
    f.ensemble.rows.push_back(ensemble(cq, lq));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_oni(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.sst, "SST input");
  const auto sst = read_grid_csv(cfg.sst);
  const auto clim = compute_climatology(sst, base_period_for(cfg, sst));
  const auto anomaly = regional_anomaly(sst, clim, cfg.bounds);
  const auto index = oni(anomaly);
  const auto quarters = quarter_matrix(anomaly, anomaly.size() - (kQuarterSpan - 1));

  const auto dir = ensure_output_dir(cfg);
  echo_config(cfg);
  write_series_csv(anomaly, dir / "anomaly.csv");
  write_series_csv(index, dir / "oni.csv");
  write_quarter_rows(quarters, dir / "quarters.csv");
  auto ev = open_out(dir / "events.csv");
  ev << "t,event\n";
  std::size_t events = 0;
  for (std::size_t t = 0; t < quarters.n_steps(); ++t) {
    const bool e = classify_event(quarters.rows[t], cfg.threshold);
    events += e ? 1 : 0;
    ev << quarters.time_at(t).str() << ',' << (e ? 1 : 0) << '\n';
  }
  double peak = index.values.front();
  for (double v : index.values) peak = std::max(peak, v);
  out << "months " << anomaly.size() << " (" << anomaly.start.str() << ".." << anomaly.time_at(anomaly.size() - 1).str()
      << "), base period " << clim.base_period.str() << "\n"
      << "peak ONI " << peak << "\n"
      << "event rows " << events << " of " << quarters.n_steps() << " at threshold " << cfg.threshold << "\n";
}

void cmd_synth(const RunConfig& cfg, std::ostream& out) {
  const auto s = generate(cfg.synth);
  const auto dir = ensure_output_dir(cfg);
  echo_config(cfg);
  write_grid_csv(s.sst, dir / "sst.csv");
  write_grid_csv(s.ohc, dir / "ohc.csv");
  write_series_csv(s.truth.anomaly, dir / "truth_anomaly.csv");
  write_series_csv(oracle_oni(s.truth), dir / "truth_oni.csv");
  write_json(to_json(cfg.synth), dir / "synth_spec.json");
  std::size_t positives = 0;
  for (bool e : s.truth.event_rows) positives += e ? 1 : 0;
  out << "synthetic " << s.sst.steps() << " months on " << s.sst.axes().n_lat() << "x" << s.sst.axes().n_lon()
      << " cells, " << cfg.synth.events.size() << " planted events, " << positives << " positive quarter rows\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
  const auto data = prepare(cfg);
  auto lstm = make_convlstm(cfg, data);
  auto cnn = make_cnn(cfg, data);
  const std::span<const WindowSample> windows(data.windows);
  const std::span<const CnnSample> cnn_samples(data.cnn_samples);
  const auto n_train = data.split.n_train;

  spdlog::info("training ConvLSTM-XT ({} parameters)", lstm.parameters().element_count());
  const auto lstm_report = train(lstm, windows.first(n_train), windows.subspan(n_train), cfg.train);
  spdlog::info("training CNN ({} parameters)", cnn.parameters().element_count());
  const auto cnn_report = train(cnn, cnn_samples.first(n_train), cnn_samples.subspan(n_train), cfg.train);

  const auto dir = ensure_output_dir(cfg);
  echo_config(cfg);
  save_checkpoint(lstm.parameters(), dir / "convlstm.ckpt");
  write_manifest(lstm.parameters(), dir / "convlstm.manifest.json");
  write_loss_curve(lstm_report, dir / "convlstm_loss.csv");
  save_checkpoint(cnn.parameters(), dir / "cnn.ckpt");
  write_manifest(cnn.parameters(), dir / "cnn.manifest.json");
  write_loss_curve(cnn_report, dir / "cnn_loss.csv");
  save_normalization(data.sst_norm, dir / "norm_sst.json");
  if (data.ohc_norm) save_normalization(*data.ohc_norm, dir / "norm_ohc.json");

  auto summary = [&out](const char* name, const TrainReport& r) {
    out << name << ": " << r.curve.size() - 1 << " epochs, " << r.optimizer_steps << " steps, train mse "
        << r.curve.front().train_mse << " -> " << r.curve.back().train_mse;
    if (!std::isnan(r.curve.back().test_mse)) out << ", test mse " << r.curve.front().test_mse << " -> " << r.curve.back().test_mse;
    out << "\n";
  };
  summary("convlstm", lstm_report);
  summary("cnn", cnn_report);
}

namespace {

struct LoadedModels {
  ConvLstmXt lstm;
  CnnForecaster cnn;
};

LoadedModels load_models(const RunConfig& cfg, const Dataset& data) {
  LoadedModels m{make_convlstm(cfg, data), make_cnn(cfg, data)};
  load_checkpoint(m.lstm.parameters(), cfg.output_dir / "convlstm.ckpt");
  load_checkpoint(m.cnn.parameters(), cfg.output_dir / "cnn.ckpt");
  // Checkpoints carry the scaling they were trained with.
  const auto saved = load_normalization(cfg.output_dir / "norm_sst.json");
  if (saved.min != data.sst_norm.min || saved.max != data.sst_norm.max) {
    fail(ErrorKind::BadConfig, "SST scaling differs from training; retrain on this input");
  }
  return m;
}

Tensor frame_stack(const Dataset& d, std::size_t offset, std::size_t window) {
  const std::size_t channels = d.ohc_scaled ? 2 : 1;
  const std::size_t cells = d.sst.cells();
  Tensor t({window, channels, d.sst.axes().n_lat(), d.sst.axes().n_lon()});
  for (std::size_t w = 0; w < window; ++w) {
    const auto s = d.sst_scaled.field(offset + w);
    std::copy(s.begin(), s.end(), t.data().begin() + static_cast<std::ptrdiff_t>((w * channels) * cells));
    if (d.ohc_scaled) {
      const auto o = d.ohc_scaled->field(offset + w);
      std::copy(o.begin(), o.end(), t.data().begin() + static_cast<std::ptrdiff_t>((w * channels + 1) * cells));
    }
  }
  return t;
}

}  // namespace

void cmd_predict(const RunConfig& cfg, std::ostream& out) {
  const auto data = prepare(cfg);
  auto models = load_models(cfg, data);

  // Default origin: the month after the last input month.
  const TimeStamp first = cfg.anchor ? *cfg.anchor : data.sst.end().next();
  const long offset = months_between(data.sst.start(), first) - static_cast<long>(cfg.window);
  if (offset < 0 || static_cast<std::size_t>(offset) + cfg.window > data.sst.steps()) {
    fail(ErrorKind::OutOfRange, "no complete " + std::to_string(cfg.window) + "-month input window before " + first.str());
  }
  const auto o = static_cast<std::size_t>(offset);
  const Tensor pred = models.lstm.predict(frame_stack(data, o, cfg.window));
  const auto grid = prediction_grid(pred, first, data.sst.axes(), data.sst_norm);
  const Quarters lq = predict_quarter_anomalies(pred, first, data.sst.axes(), data.sst_norm, data.clim, cfg.bounds);

  std::vector<double> frames(data.anomalies.values().begin() + static_cast<std::ptrdiff_t>(o * data.sst.cells()),
                             data.anomalies.values().begin() + static_cast<std::ptrdiff_t>((o + cfg.window) * data.sst.cells()));
  const Quarters cq = models.cnn.predict(Tensor({cfg.window, data.sst.axes().n_lat(), data.sst.axes().n_lon()}, std::move(frames)));
  const Quarters eq = ensemble(cq, lq);

  const auto dir = ensure_output_dir(cfg);
  echo_config(cfg);
  write_grid_csv(grid, dir / "prediction_sst.csv");
  write_grid_csv(anomaly_fields(grid, data.clim), dir / "prediction_anomaly.csv");
  auto q = open_out(dir / "prediction_quarters.csv");
  q << "model,first_month,q0,q1,q2,q3,q4,event\n";
  auto row = [&](const char* name, const Quarters& v) {
    q << name << ',' << first.str();
    for (double x : v) q << ',' << x;
    q << ',' << (classify_event(v, cfg.threshold) ? 1 : 0) << '\n';
    out << name << ":";
    for (double x : v) out << ' ' << x;
    out << (classify_event(v, cfg.threshold) ? "  El Nino" : "") << '\n';
  };
  out << "forecast " << first.str() << ".." << first.plus_months(static_cast<long>(cfg.horizon) - 1).str()
      << " quarterly anomalies (degC)\n";
  row("convlstm", lq);
  row("cnn", cq);
  row("ensemble", eq);
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const auto data = prepare(cfg);
  AnchorForecasts f;
  if (cfg.self_test) {
    const std::size_t n = data.cnn_samples.size();
    if (n < cfg.n_steps) fail(ErrorKind::TooShort, "need " + std::to_string(cfg.n_steps) + " anchors, input yields " + std::to_string(n));
    f.observed.start = data.cnn_samples[n - cfg.n_steps].anchor;
    for (std::size_t s = n - cfg.n_steps; s < n; ++s) f.observed.rows.push_back(data.cnn_samples[s].targets);
    f.convlstm = f.cnn = f.ensemble = f.observed;
  } else {
    auto models = load_models(cfg, data);
    f = forecast_anchors(cfg, data, models.lstm, models.cnn);
  }
  const auto report = run_all_configs(f.observed, f.ensemble, cfg.threshold);

  const auto dir = ensure_output_dir(cfg);
  echo_config(cfg);
  write_quarter_csv(f.observed, dir / "observed_quarters.csv");
  write_quarter_csv(f.ensemble, dir / "forecast_quarters.csv");
  write_quarter_csv(f.convlstm, dir / "forecast_quarters_convlstm.csv");
  write_quarter_csv(f.cnn, dir / "forecast_quarters_cnn.csv");
  write_report_csv(report, dir / "eval_report.csv");
  write_report_json(report, dir / "eval_report.json");
  out << "anchors " << f.observed.time_at(0).str() << ".." << f.observed.time_at(f.observed.n_steps() - 1).str()
      << (cfg.self_test ? " (self-test)" : "") << "\n"
      << format_report(report);
}

namespace {

SpatioTemporalGrid mean_over(const SpatioTemporalGrid& g, std::size_t first, std::size_t count) {
  const std::size_t cells = g.cells();
  std::vector<double> v(cells, kMissing);
  for (std::size_t c = 0; c < cells; ++c) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t t = first; t < first + count; ++t) {
      const double x = g.field(t)[c];
      if (is_missing(x)) continue;
      s += x;
      ++n;
    }
    if (n > 0) v[c] = s / static_cast<double>(n);
  }
  return SpatioTemporalGrid(g.variable(), g.axes(), g.time_at(first), 1, std::move(v), g.units());
}

}  // namespace

void cmd_render(const RunConfig& cfg, std::ostream& out) {
  const fs::path input = cfg.render.input.empty() ? cfg.output_dir / "prediction_anomaly.csv" : cfg.render.input;
  require_file(input, "render input");
  const auto g = read_grid_csv(input);
  const ColorScale scale{cfg.render.min, cfg.render.max};
  colormap(0.0, scale);  // validates the scale before anything is written

  const auto dir = ensure_output_dir(cfg) / "render";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create " + dir.string());
  echo_config(cfg);

  std::size_t images = 0;
  auto emit = [&](const SpatioTemporalGrid& one, const std::string& stem) {
    const auto img = render_heatmap(one.field(0), one.axes().n_lat(), one.axes().n_lon(), scale, cfg.render.cell_px);
    write_ppm(img, dir / (stem + ".ppm"));
    if (cfg.render.png) write_png(img, dir / (stem + ".png"));
    ++images;
  };
  for (std::size_t t = 0; t < g.steps(); ++t) emit(g.slice_time(t, 1), "month_" + g.time_at(t).str());
  for (std::size_t t = 0; t + 3 <= g.steps(); ++t) {
    emit(mean_over(g, t, 3), "period_" + g.time_at(t).str() + "_" + g.time_at(t + 2).str());
  }
  emit(mean_over(g, 0, g.steps()), "average_" + g.start().str() + "_" + g.end().str());
  out << images << " images in " << dir.string() << "\n";
}

}  // namespace nino
