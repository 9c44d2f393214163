#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "nino/climatology.hpp"
#include "nino/grid.hpp"

namespace nino {

struct PlantedEvent {
  std::size_t start = 0;     // month index
  std::size_t duration = 1;  // months
  double peak = 1.0;         // degC
};

struct SynthSpec {
  GridAxes axes{GridAxes::uniform(-4, 2, 5), GridAxes::uniform(-170, 2, 26)};
  TimeStamp start{2000, 1};
  std::size_t months = 240;
  double base_temp = 27.0;
  double zonal_gradient = 0.02;  // degC per degree of longitude, constant in time
  double seasonal_amplitude = 1.0;
  double noise_sigma = 0.0;
  std::vector<PlantedEvent> events;
  long ohc_lag = 6;  // OHC bumps lead SST bumps by this many months
  double ohc_base = 100.0;
  double ohc_gain = 10.0;
  std::uint64_t seed = 42;
};

/// Closed-form expectations for the noise-free part of a scenario.
struct GroundTruth {
  Period base_period;           // climatology base: all complete years
  std::vector<double> signal;   // planted bump per month (degC)
  AnomalySeries anomaly;        // signal minus its own per-calendar-month base mean
  OniSeries oni;
  std::vector<bool> event_rows; // classify_event per quarter-matrix row
};

struct SynthOutput {
  SpatioTemporalGrid sst;
  SpatioTemporalGrid ohc;
  GroundTruth truth;
};

/// Raised-cosine hump: `peak` at month start + duration/2, positive inside
/// [start, start + duration), zero elsewhere.
double event_bump(const PlantedEvent& e, long month_index);

/// SST(t, cell) = base + zonal gradient + seasonal * sin(2 pi month / 12) + bumps + noise.
/// Noise is keyed on (seed, variable, t, lat, lon) so generation order is irrelevant.
SynthOutput generate(const SynthSpec& spec);

/// ONI from the analytic anomaly by a separate scalar running-mean routine.
OniSeries oracle_oni(const GroundTruth& truth);

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthSpec& spec);

}  // namespace nino
