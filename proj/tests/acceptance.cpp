// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero if
// any fails. Usage: acceptance [scratch-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <spdlog/spdlog.h>

#include "gradcheck.hpp"
#include "nino/checkpoint.hpp"
#include "nino/climatology.hpp"
#include "nino/cnn.hpp"
#include "nino/convlstm.hpp"
#include "nino/evaluation.hpp"
#include "nino/grid_csv.hpp"
#include "nino/heatmap.hpp"
#include "nino/pipeline.hpp"
#include "nino/synthetic.hpp"

using namespace nino;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch;

// --- ONI oracle --------------------------------------------------------------

Outcome oni_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t months = 0, cells = 0;
  const std::vector<std::vector<PlantedEvent>> scenarios{
      {},
      {{40, 12, 2.0}},
      {{10, 14, 1.2}, {95, 10, 2.5}, {180, 18, 0.8}},
  };
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    SynthSpec spec;  // 240 months on 5x26 cells
    spec.events = scenarios[k];
    spec.seasonal_amplitude = 1.0 + 0.5 * static_cast<double>(k);
    spec.seed = 100 + k;
    const auto out = generate(spec);
    // Through the canonical CSV, as the CLI would see it.
    const auto path = scratch / ("oni_" + std::to_string(k) + ".csv");
    write_grid_csv(out.sst, path);
    const auto sst = read_grid_csv(path);
    const auto anomaly = regional_anomaly(sst, compute_climatology(sst, complete_years(sst)), GeoBounds::nino34());
    const auto got = oni(anomaly);
    const auto want = oracle_oni(out.truth);
    if (got.size() != want.size() || got.start != want.start) return {false, "series length or start differs"};
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got.values[i] - want.values[i]));
    months = sst.steps();
    cells = sst.cells();
  }
  const double secs = seconds_since(t0);
  const bool pass = worst < 1e-9 && months >= 240 && cells >= 130 && secs < 5.0;
  return {pass, fmt("max |diff| %.3g over %zu months x %zu cells, %.2f s", worst, months, cells, secs)};
}

// --- shift invariance --------------------------------------------------------

Outcome shift_invariance() {
  SynthSpec spec;
  spec.noise_sigma = 0.4;
  spec.events = {{50, 12, 1.5}};
  const auto sst = generate(spec).sst;
  const auto bounds = GeoBounds::nino34();
  const auto base = regional_anomaly(sst, compute_climatology(sst, complete_years(sst)), bounds);
  double worst = 0.0;
  for (double shift : {-10.0, 0.001, 3.7, 25.0}) {
    std::vector<double> v(sst.values().begin(), sst.values().end());
    for (auto& x : v) x += shift;
    const auto s = sst.with_values(std::move(v));
    const auto a = regional_anomaly(s, compute_climatology(s, complete_years(s)), bounds);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - base.values[i]));
  }
  return {worst < 1e-9, fmt("max |diff| %.3g over 4 shifts", worst)};
}

// --- gradients ---------------------------------------------------------------

Outcome gradient_suite() {
  using nino::testing::check_gradients;
  using nino::testing::project;
  using nino::testing::random_tensor;
  const auto t0 = Clock::now();
  Rng rng(2024);
  ParameterSet ps;
  const auto a = ps.add("a", random_tensor(rng, {2, 4, 4}, 1.0, 0.05));
  const auto b = ps.add("b", random_tensor(rng, {2, 4, 4}, 1.0, 0.05));
  const auto k = ps.add("k", random_tensor(rng, {3, 2, 3, 3}, 0.5));
  const auto kb = ps.add("kb", random_tensor(rng, {3}, 0.5));
  const auto w = ps.add("w", random_tensor(rng, {5, 32}, 0.5));
  const auto wb = ps.add("wb", random_tensor(rng, {5}, 0.5));
  auto A = [&](Tape& t) { return t.parameter(ps[a]); };
  auto B = [&](Tape& t) { return t.parameter(ps[b]); };

  const std::vector<std::pair<std::string, std::function<Var(Tape&)>>> ops{
      {"add", [&](Tape& t) { return project(add(A(t), B(t))); }},
      {"hadamard", [&](Tape& t) { return project(hadamard(A(t), B(t))); }},
      {"scale", [&](Tape& t) { return project(scale(A(t), 1.7)); }},
      {"sigmoid", [&](Tape& t) { return project(sigmoid(A(t))); }},
      {"tanh", [&](Tape& t) { return project(nino::tanh(A(t))); }},
      {"relu", [&](Tape& t) { return project(relu(A(t))); }},
      {"conv2d", [&](Tape& t) { return project(conv2d(A(t), t.parameter(ps[k]), t.parameter(ps[kb]))); }},
      {"dense", [&](Tape& t) { return project(dense(flatten(A(t)), t.parameter(ps[w]), t.parameter(ps[wb]))); }},
      {"reshape", [&](Tape& t) { return project(hadamard(reshape(A(t), {4, 8}), reshape(B(t), {4, 8}))); }},
      {"dropout", [&](Tape& t) { return project(dropout(A(t), 0.3, Mode::Train, 5)); }},
      {"mse", [&](Tape& t) { return mse(A(t), B(t)); }},
  };
  double op_worst = 0.0;
  std::string op_name;
  for (const auto& [name, build] : ops) {
    const auto r = check_gradients(ps, build);
    if (r.max_rel_error > op_worst) {
      op_worst = r.max_rel_error;
      op_name = name + ":" + r.worst;
    }
  }

  // Toy models: 4x4 grid, 2 hidden channels, k = 3, 3 time steps.
  ConvLstmXtConfig lc;
  lc.hidden = {2, 2};
  lc.horizon = 2;
  lc.n_lat = 4;
  lc.n_lon = 4;
  ConvLstmXt lstm(lc, 11);
  WindowSample ws{random_tensor(rng, {3, 2, 4, 4}), random_tensor(rng, {2, 4, 4}), 0, TimeStamp(2000, 1)};
  const auto lr = check_gradients(lstm.parameters(), [&](Tape& t) { return lstm.loss(t, ws, Mode::Train, 3); });

  CnnForecasterConfig cc;
  cc.window = 3;
  cc.n_lat = 4;
  cc.n_lon = 4;
  cc.conv = {{2, 3, Activation::Relu}, {2, 3, Activation::Relu}};
  cc.head_hidden = 4;
  CnnForecaster cnn(cc, 12);
  CnnSample cs{random_tensor(rng, {3, 4, 4}), {0.3, -0.2, 0.9, 0.1, 0.5}, 0, TimeStamp(2000, 1)};
  const auto cr = check_gradients(cnn.parameters(), [&](Tape& t) { return cnn.loss(t, cs, Mode::Train, 0); });

  const double secs = seconds_since(t0);
  const double model_worst = std::max(lr.max_rel_error, cr.max_rel_error);
  const bool pass = op_worst < 1e-4 && model_worst < 1e-3 && secs < 60.0;
  return {pass, fmt("ops max rel %.2g (%s), convlstm %.2g, cnn %.2g, %zu+%zu params, %.1f s", op_worst, op_name.c_str(),
                    lr.max_rel_error, cr.max_rel_error, lr.checked, cr.checked, secs)};
}

// --- classification ----------------------------------------------------------

Outcome exhaustive_classification() {
  std::vector<Quarters> pred, truth;
  auto row = [](unsigned bits) {
    Quarters q;
    for (std::size_t i = 0; i < 5; ++i) q[i] = (bits >> i) & 1u ? 0.6 : 0.4;
    return q;
  };
  for (unsigned p = 0; p < 32; ++p) {
    for (unsigned t = 0; t < 32; ++t) {
      pred.push_back(row(p));
      truth.push_back(row(t));
    }
  }
  ConfusionMatrix want;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = std::all_of(pred[i].begin(), pred[i].end(), [](double x) { return x >= 0.5; });
    const bool t = std::all_of(truth[i].begin(), truth[i].end(), [](double x) { return x >= 0.5; });
    (p ? (t ? want.tp : want.fp) : (t ? want.fn : want.tn)) += 1;
  }
  const auto got = evaluate_config(QuarterMatrix{TimeStamp(2000, 1), pred}, QuarterMatrix{TimeStamp(2000, 1), truth}, 0.5);
  return {got == want, fmt("1024 rows: tp %zu tn %zu fp %zu fn %zu", got.tp, got.tn, got.fp, got.fn)};
}

Outcome display_rounding() {
  const auto a = format_percent(accuracy({10, 38, 2, 3}));
  const auto b = format_percent(accuracy({6, 38, 5, 4}));
  return {a == "90.57" && b == "83.02", "48/53 -> " + a + ", 44/53 -> " + b};
}

Outcome config0_baseline() {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(80);
    QuarterMatrix obs{TimeStamp(2000, 1), {}}, fc{TimeStamp(2000, 1), {}};
    for (std::size_t i = 0; i < n; ++i) {
      Quarters o, f;
      for (auto& x : o) x = rng.uniform(-2, 3);
      for (auto& x : f) x = rng.uniform(-2, 3);
      obs.rows.push_back(o);
      fc.rows.push_back(f);
    }
    const auto rep = run_all_configs(obs, fc, rng.uniform(0.1, 1.5));
    if (format_percent(rep.configs[0].accuracy) != "100.00") return {false, fmt("trial %d: %.2f", trial, rep.configs[0].accuracy)};
  }
  return {true, "200 random observed/forecast pairs, configuration 0 always 100.00"};
}

// --- end to end --------------------------------------------------------------

RunConfig e2e_config(const fs::path& dir) {
  RunConfig c;
  c.output_dir = dir;
  c.sst = dir / "sst.csv";
  c.ohc = dir / "ohc.csv";
  // 20 years on a 4-degree grid over the Nino 3.4 box.
  c.synth.axes = GridAxes(GridAxes::uniform(-4, 4, 3), GridAxes::uniform(-170, 4, 13));
  c.synth.months = 240;
  c.synth.noise_sigma = 0.2;
  c.synth.events = {{30, 14, 1.5}, {100, 12, 2.0}, {190, 16, 1.8}};
  c.seed = 42;
  finalize(c);  // 50 epochs, lr 0.001, batch 32, 80/20 split, 53 anchors
  return c;
}

std::string e2e_fingerprint(const fs::path& dir) {
  std::string all;
  for (const char* f : {"sst.csv", "ohc.csv", "convlstm.ckpt", "cnn.ckpt", "convlstm_loss.csv", "cnn_loss.csv",
                        "norm_sst.json", "norm_ohc.json", "observed_quarters.csv", "forecast_quarters.csv",
                        "eval_report.csv", "eval_report.json"}) {
    all += std::string(f) + '\0' + slurp(dir / f) + '\0';
  }
  return all;
}

Outcome end_to_end() {
  const auto t0 = Clock::now();
  std::string prints[2];
  EvalReport report;
  for (int run = 0; run < 2; ++run) {
    const auto dir = scratch / ("e2e_" + std::to_string(run));
    fs::remove_all(dir);
    const auto cfg = e2e_config(dir);
    std::ostringstream log;
    cmd_synth(cfg, log);
    cmd_train(cfg, log);
    cmd_evaluate(cfg, log);
    if (run == 0) std::fputs(log.str().c_str(), stderr);
    prints[run] = e2e_fingerprint(dir);

    const auto data = prepare(cfg);
    auto lstm = make_convlstm(cfg, data);
    auto cnn = make_cnn(cfg, data);
    load_checkpoint(lstm.parameters(), dir / "convlstm.ckpt");
    load_checkpoint(cnn.parameters(), dir / "cnn.ckpt");
    const auto f = forecast_anchors(cfg, data, lstm, cnn);
    report = run_all_configs(f.observed, f.ensemble, cfg.threshold);
  }
  const double secs = seconds_since(t0);
  const double c1 = report.configs[1].accuracy, c5 = report.configs[5].accuracy;
  const bool same = prints[0] == prints[1];
  const bool pass = c1 >= c5 && c1 >= 80.0 && report.n_steps >= 50 && secs < 600.0 && same &&
                    format_percent(report.configs[0].accuracy) == "100.00";
  return {pass, fmt("config1 %s%% config5 %s%% over %zu anchors, repeat %s, %.0f s for two runs",
                    format_percent(c1).c_str(), format_percent(c5).c_str(), report.n_steps,
                    same ? "byte-identical" : "DIFFERS", secs)};
}

// --- overfit -----------------------------------------------------------------

Outcome overfit() {
  SynthSpec spec;
  spec.axes = GridAxes(GridAxes::uniform(-4, 4, 3), GridAxes::uniform(-170, 4, 13));
  spec.months = 60;
  spec.noise_sigma = 0.2;
  spec.events = {{20, 14, 1.5}};
  const auto s = generate(spec);
  const auto sst_norm = fit_minmax(s.sst);
  const auto ohc_norm = fit_minmax(s.ohc);
  const auto sst = normalize_grid(s.sst, sst_norm).grid;
  const auto ohc = normalize_grid(s.ohc, ohc_norm).grid;
  auto windows = build_windows(sst, &ohc, 12, 7, 4);
  windows.resize(8);

  const auto clim = compute_climatology(s.sst, complete_years(s.sst));
  auto cnn_set = build_cnn_samples(anomaly_fields(s.sst, clim), regional_anomaly(s.sst, clim, GeoBounds::nino34()), 12, 4);
  cnn_set.resize(8);

  TrainConfig cfg;
  cfg.epochs = 200;
  ConvLstmXtConfig lc;
  lc.n_lat = 3;
  lc.n_lon = 13;
  ConvLstmXt lstm(lc, 1);
  const auto lr = train(lstm, std::span<const WindowSample>(windows), std::span<const WindowSample>(), cfg);
  CnnForecasterConfig cc;
  cc.n_lat = 3;
  cc.n_lon = 13;
  CnnForecaster cnn(cc, 2);
  const auto cr = train(cnn, std::span<const CnnSample>(cnn_set), std::span<const CnnSample>(), cfg);

  const double lratio = lr.curve.back().train_mse / lr.curve.front().train_mse;
  const double cratio = cr.curve.back().train_mse / cr.curve.front().train_mse;
  return {lratio <= 0.1 && cratio <= 0.1,
          fmt("final/initial MSE after 200 epochs: convlstm %.3f, cnn %.3f", lratio, cratio)};
}

// --- heatmap -----------------------------------------------------------------

Outcome golden_heatmap() {
  const auto dir = scratch / "render";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const GridAxes axes(GridAxes::uniform(-4, 2, 5), GridAxes::uniform(-170, 2, 26));
  const SpatioTemporalGrid zero(Variable::SST, axes, TimeStamp(2023, 3), 7, std::vector<double>(7 * 130, 0.0));
  write_grid_csv(zero, dir / "zero.csv");
  RunConfig cfg;
  cfg.output_dir = dir;
  cfg.render.input = dir / "zero.csv";
  cfg.render.png = true;
  finalize(cfg);
  std::ostringstream log;

  std::vector<std::string> first;
  std::size_t images = 0;
  bool white = true;
  for (int run = 0; run < 2; ++run) {
    cmd_render(cfg, log);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir / "render")) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<std::string> bytes;
    for (const auto& f : files) bytes.push_back(slurp(f));
    if (run == 0) {
      first = bytes;
      images = static_cast<std::size_t>(std::count_if(files.begin(), files.end(), [](auto& p) { return p.extension() == ".ppm"; }));
      for (std::size_t i = 0; i < files.size(); ++i) {
        if (files[i].extension() != ".ppm") continue;
        const std::string& b = bytes[i];
        const auto header_end = b.find("255\n") + 4;
        for (std::size_t p = header_end; p < b.size(); ++p) white = white && static_cast<unsigned char>(b[p]) == 255;
      }
    } else if (bytes != first) {
      return {false, "re-render differs"};
    }
  }
  const std::vector<double> ends{-3.0, 3.0};
  const auto golden = encode_ppm(render_heatmap(ends, 1, 2, ColorScale{-3, 3}, 1));
  const std::string want = std::string("P6\n2 1\n255\n") + std::string{char(48), char(0), char(96), char(200), char(0), char(0)};
  const bool pass = white && images == 13 && golden == want;
  return {pass, fmt("%zu images all midpoint white: %s, byte-stable, 2-cell golden PPM %s", images, white ? "yes" : "no",
                    golden == want ? "matches" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "nino_acceptance";
  fs::create_directories(scratch);
  spdlog::set_level(spdlog::level::warn);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oni-oracle", oni_oracle},
      {"shift-invariance", shift_invariance},
      {"gradient-suite", gradient_suite},
      {"exhaustive-classification", exhaustive_classification},
      {"display-rounding", display_rounding},
      {"config0-baseline", config0_baseline},
      {"end-to-end-synthetic", end_to_end},
      {"overfit-smoke", overfit},
      {"golden-heatmap", golden_heatmap},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s  %-26s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
