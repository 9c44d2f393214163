#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "nino/climatology.hpp"
#include "nino/cnn.hpp"
#include "nino/convlstm.hpp"
#include "nino/grid.hpp"
#include "nino/preprocess.hpp"
#include "nino/synthetic.hpp"
#include "nino/training.hpp"

namespace nino {

struct ConvLstmSettings {
  std::array<std::size_t, 2> hidden{8, 4};
  std::size_t kernel = 3;
  double dropout = 0.3;
};

struct CnnSettings {
  std::vector<std::size_t> channels{8, 8};
  std::size_t kernel = 3;
  std::size_t hidden = 32;
};

struct RenderSettings {
  std::filesystem::path input;  // empty: <output_dir>/prediction_anomaly.csv
  double min = -3.0;
  double max = 3.0;
  std::size_t cell_px = 8;
  bool png = false;
};

/// Everything a command needs. Loaded from JSON; CLI flags override fields afterwards.
struct RunConfig {
  std::filesystem::path sst;
  std::filesystem::path ohc;  // optional: SST-only models when empty
  std::filesystem::path output_dir = "nino_out";
  GeoBounds bounds = GeoBounds::nino34();
  std::optional<Period> base_period;  // default: all complete years of the SST input
  std::size_t window = kDefaultWindow;
  std::size_t horizon = kDefaultHorizon;
  std::size_t stride = 1;
  ConvLstmSettings convlstm;
  CnnSettings cnn;
  TrainConfig train;
  std::size_t n_steps = 53;
  double threshold = kEventThreshold;
  std::uint64_t seed = 42;
  SynthSpec synth;
  RenderSettings render;
  std::optional<TimeStamp> anchor;  // predict: first forecast month
  bool self_test = false;           // evaluate: feed observed quarters back as the forecast
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);
/// Pushes the global seed into the training and synthesis seeds and checks ranges.
void finalize(RunConfig& cfg);

/// Aligned inputs, climatology and the supervised samples shared by train,
/// predict and evaluate.
struct Dataset {
  SpatioTemporalGrid sst;
  std::optional<SpatioTemporalGrid> ohc;
  ClimatologyTable clim;
  SpatioTemporalGrid anomalies;   // per-cell SST anomaly fields, degC
  AnomalySeries regional;
  NormalizationParams sst_norm;
  std::optional<NormalizationParams> ohc_norm;
  SpatioTemporalGrid sst_scaled;  // normalized with sst_norm
  std::optional<SpatioTemporalGrid> ohc_scaled;
  std::vector<WindowSample> windows;
  std::vector<CnnSample> cnn_samples;  // same offsets as `windows`
  Split split;
};

Dataset prepare(const RunConfig& cfg);

ConvLstmXt make_convlstm(const RunConfig& cfg, const Dataset& data);
CnnForecaster make_cnn(const RunConfig& cfg, const Dataset& data);

/// Observed and forecast quarter rows at the last n_steps anchors.
struct AnchorForecasts {
  QuarterMatrix observed;
  QuarterMatrix convlstm;
  QuarterMatrix cnn;
  QuarterMatrix ensemble;
};

AnchorForecasts forecast_anchors(const RunConfig& cfg, const Dataset& data, ConvLstmXt& lstm, CnnForecaster& cnn);

void cmd_oni(const RunConfig& cfg, std::ostream& out);
void cmd_synth(const RunConfig& cfg, std::ostream& out);
void cmd_train(const RunConfig& cfg, std::ostream& out);
void cmd_predict(const RunConfig& cfg, std::ostream& out);
void cmd_evaluate(const RunConfig& cfg, std::ostream& out);
void cmd_render(const RunConfig& cfg, std::ostream& out);

}  // namespace nino
