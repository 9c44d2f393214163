// nino: command-line entry point.
//
//   nino <oni|synth|train|predict|evaluate|render> [--config run.json] [overrides]
//
// Flags win over the config file. NINO_LOG_LEVEL sets verbosity (trace..off).

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "nino/error.hpp"
#include "nino/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string sst, ohc, output_dir, base_period, anchor, render_input;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs, batch, n_steps, window, stride;
  std::optional<double> lr, threshold;
  bool self_test = false;
  bool png = false;
};

nino::RunConfig resolve(const Overrides& o) {
  nino::RunConfig c = o.config.empty() ? nino::RunConfig{} : nino::load_run_config(o.config);
  if (!o.sst.empty()) c.sst = o.sst;
  if (!o.ohc.empty()) c.ohc = o.ohc;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (!o.base_period.empty()) c.base_period = nino::Period::parse(o.base_period);
  if (!o.anchor.empty()) c.anchor = nino::TimeStamp::parse(o.anchor);
  if (!o.render_input.empty()) c.render.input = o.render_input;
  if (o.seed) c.seed = *o.seed;
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.batch) c.train.batch = *o.batch;
  if (o.lr) c.train.lr = *o.lr;
  if (o.n_steps) c.n_steps = *o.n_steps;
  if (o.window) c.window = *o.window;
  if (o.stride) c.stride = *o.stride;
  if (o.threshold) c.threshold = *o.threshold;
  if (o.self_test) c.self_test = true;
  if (o.png) c.render.png = true;
  nino::finalize(c);
  return c;
}

void set_log_level() {
  const char* env = std::getenv("NINO_LOG_LEVEL");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");
}

}  // namespace

int main(int argc, char** argv) {
  set_log_level();
  CLI::App app{"El Nino index and forecasting toolkit"};
  app.require_subcommand(1);
  Overrides o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("-c,--config", o.config, "run config JSON");
    sub->add_option("--sst", o.sst, "SST grid CSV");
    sub->add_option("--ohc", o.ohc, "OHC grid CSV");
    sub->add_option("-o,--output-dir", o.output_dir, "output directory");
    sub->add_option("--base-period", o.base_period, "climatology base YYYY-MM:YYYY-MM");
    sub->add_option("--seed", o.seed, "seed for init, shuffling, dropout and synthesis");
    sub->add_option("--threshold", o.threshold, "event threshold (degC)");
  };
  auto training = [&o](CLI::App* sub) {
    sub->add_option("--epochs", o.epochs);
    sub->add_option("--batch", o.batch);
    sub->add_option("--lr", o.lr);
    sub->add_option("--window", o.window);
    sub->add_option("--stride", o.stride);
    sub->add_option("--n-steps", o.n_steps, "evaluation anchors");
  };

  auto* oni = app.add_subcommand("oni", "regional anomaly, ONI, quarters and event flags");
  auto* synth = app.add_subcommand("synth", "write a synthetic SST/OHC scenario");
  auto* train = app.add_subcommand("train", "train ConvLSTM-XT and the CNN forecaster");
  auto* predict = app.add_subcommand("predict", "forecast the next seven months");
  auto* evaluate = app.add_subcommand("evaluate", "blended-configuration accuracy table");
  auto* render = app.add_subcommand("render", "heatmaps of a grid CSV");
  for (auto* s : {oni, synth, train, predict, evaluate, render}) common(s);
  for (auto* s : {train, predict, evaluate}) training(s);
  predict->add_option("--anchor", o.anchor, "first forecast month YYYY-MM");
  evaluate->add_flag("--self-test", o.self_test, "use observed quarters as the forecast");
  render->add_option("--input", o.render_input, "grid CSV to render");
  render->add_flag("--png", o.png, "also write PNG files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(nino::ErrorFamily::Config);
  }

  try {
    const auto cfg = resolve(o);
    if (oni->parsed()) nino::cmd_oni(cfg, std::cout);
    if (synth->parsed()) nino::cmd_synth(cfg, std::cout);
    if (train->parsed()) nino::cmd_train(cfg, std::cout);
    if (predict->parsed()) nino::cmd_predict(cfg, std::cout);
    if (evaluate->parsed()) nino::cmd_evaluate(cfg, std::cout);
    if (render->parsed()) nino::cmd_render(cfg, std::cout);
  } catch (const nino::Error& e) {
    spdlog::error("{}: {}", nino::to_string(e.kind()), e.what());
    return static_cast<int>(nino::family_of(e.kind()));
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
