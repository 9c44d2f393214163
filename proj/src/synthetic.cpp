#include "nino/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "nino/error.hpp"
#include "nino/rng.hpp"

namespace nino {

namespace {

void validate(const SynthSpec& spec) {
  if (spec.months == 0) fail(ErrorKind::BadSpec, "months must be >= 1");
  if (spec.axes.empty()) fail(ErrorKind::BadSpec, "grid has no cells");
  if (!(spec.noise_sigma >= 0.0)) fail(ErrorKind::BadSpec, "noise_sigma must be >= 0");
  for (const auto& e : spec.events) {
    if (e.duration < 1) fail(ErrorKind::BadSpec, "event duration must be >= 1");
    if (e.start + e.duration > spec.months) fail(ErrorKind::BadSpec, "event window extends past the scenario");
  }
}

double signal_at(const SynthSpec& spec, long t) {
  double s = 0.0;
  for (const auto& e : spec.events) s += event_bump(e, t);
  return s;
}

// Mean of each consecutive `width`-long window; written independently of oni().
std::vector<double> running_mean(const std::vector<double>& x, std::size_t width) {
  std::vector<double> out;
  for (std::size_t end = width; end <= x.size(); ++end) {
    double sum = 0.0;
    for (std::size_t k = end - width; k < end; ++k) sum += x[k];
    out.push_back(sum / static_cast<double>(width));
  }
  return out;
}

}  // namespace

double event_bump(const PlantedEvent& e, long month_index) {
  const long offset = month_index - static_cast<long>(e.start);
  if (offset < 0 || offset >= static_cast<long>(e.duration)) return 0.0;
  const double center = static_cast<double>(e.duration / 2);
  const double half_width = (static_cast<double>(e.duration) + 1.0) / 2.0;
  return e.peak * 0.5 * (1.0 + std::cos(std::numbers::pi * (static_cast<double>(offset) - center) / half_width));
}

SynthOutput generate(const SynthSpec& spec) {
  validate(spec);
  const auto& axes = spec.axes;
  const std::size_t cells = axes.cells();
  std::vector<double> sst(spec.months * cells);
  std::vector<double> ohc(spec.months * cells);
  const double lon0 = axes.lons().front();

  for (std::size_t t = 0; t < spec.months; ++t) {
    const int month = spec.start.plus_months(static_cast<long>(t)).month;
    const double seasonal = spec.seasonal_amplitude * std::sin(2.0 * std::numbers::pi * month / 12.0);
    const double bump = signal_at(spec, static_cast<long>(t));
    const double lead = signal_at(spec, static_cast<long>(t) + spec.ohc_lag);
    for (std::size_t i = 0; i < axes.n_lat(); ++i) {
      for (std::size_t j = 0; j < axes.n_lon(); ++j) {
        const std::size_t c = i * axes.n_lon() + j;
        double sst_noise = 0.0;
        double ohc_noise = 0.0;
        if (spec.noise_sigma > 0.0) {
          sst_noise = spec.noise_sigma * Rng(hash_key({spec.seed, 0u, t, i, j})).normal();
          ohc_noise = spec.noise_sigma * spec.ohc_gain * Rng(hash_key({spec.seed, 1u, t, i, j})).normal();
        }
        const double base = spec.base_temp + spec.zonal_gradient * (axes.lons()[j] - lon0);
        sst[t * cells + c] = base + seasonal + bump + sst_noise;
        ohc[t * cells + c] = spec.ohc_base + spec.ohc_gain * lead + ohc_noise;
      }
    }
  }

  SynthOutput out{SpatioTemporalGrid(Variable::SST, axes, spec.start, spec.months, std::move(sst)),
                  SpatioTemporalGrid(Variable::OHC, axes, spec.start, spec.months, std::move(ohc)),
                  {}};

  GroundTruth& truth = out.truth;
  truth.base_period = complete_years(out.sst);
  truth.signal.resize(spec.months);
  for (std::size_t t = 0; t < spec.months; ++t) truth.signal[t] = signal_at(spec, static_cast<long>(t));

  // Climatology of the signal alone: the seasonal cycle and zonal gradient are
  // identical every year and cancel exactly.
  std::array<double, 12> month_sum{};
  std::array<int, 12> month_n{};
  const auto base_first = static_cast<std::size_t>(months_between(spec.start, truth.base_period.first));
  const auto base_last = static_cast<std::size_t>(months_between(spec.start, truth.base_period.last));
  for (std::size_t t = base_first; t <= base_last; ++t) {
    const int m = spec.start.plus_months(static_cast<long>(t)).month - 1;
    month_sum[m] += truth.signal[t];
    ++month_n[m];
  }
  truth.anomaly.start = spec.start;
  for (std::size_t t = 0; t < spec.months; ++t) {
    const int m = spec.start.plus_months(static_cast<long>(t)).month - 1;
    truth.anomaly.values.push_back(truth.signal[t] - month_sum[m] / month_n[m]);
  }
  truth.oni = oracle_oni(truth);
  for (std::size_t t = 0; t + kQuarterSpan <= spec.months; ++t) {
    bool all = true;
    for (std::size_t i = 0; i < kQuarters; ++i) {
      const double q = (truth.anomaly.values[t + i] + truth.anomaly.values[t + i + 1] + truth.anomaly.values[t + i + 2]) / 3.0;
      all = all && q >= kEventThreshold;
    }
    truth.event_rows.push_back(all);
  }
  return out;
}

OniSeries oracle_oni(const GroundTruth& truth) {
  if (truth.anomaly.values.size() < 3) return {truth.anomaly.start, {}};
  return {truth.anomaly.start.plus_months(2), running_mean(truth.anomaly.values, 3)};
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  SynthSpec s;
  try {
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      s.axes = GridAxes(GridAxes::uniform(g.at("lat_first"), g.at("lat_step"), g.at("n_lat")),
                        GridAxes::uniform(g.at("lon_first"), g.at("lon_step"), g.at("n_lon")));
    }
    if (j.contains("start")) s.start = TimeStamp::parse(j.at("start").get<std::string>());
    s.months = j.value("months", s.months);
    s.base_temp = j.value("base_temp", s.base_temp);
    s.zonal_gradient = j.value("zonal_gradient", s.zonal_gradient);
    s.seasonal_amplitude = j.value("seasonal_amplitude", s.seasonal_amplitude);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.ohc_lag = j.value("ohc_lag", s.ohc_lag);
    s.ohc_base = j.value("ohc_base", s.ohc_base);
    s.ohc_gain = j.value("ohc_gain", s.ohc_gain);
    s.seed = j.value("seed", s.seed);
    if (j.contains("events")) {
      for (const auto& e : j.at("events")) {
        s.events.push_back({e.at("start").get<std::size_t>(), e.at("duration").get<std::size_t>(), e.at("peak").get<double>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::BadSpec, std::string("synthetic spec: ") + e.what());
  }
  validate(s);
  return s;
}

nlohmann::json to_json(const SynthSpec& s) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : s.events) events.push_back({{"start", e.start}, {"duration", e.duration}, {"peak", e.peak}});
  return {{"grid",
           {{"lat_first", s.axes.lats().front()},
            {"lat_step", s.axes.lat_step()},
            {"n_lat", s.axes.n_lat()},
            {"lon_first", s.axes.lons().front()},
            {"lon_step", s.axes.lon_step()},
            {"n_lon", s.axes.n_lon()}}},
          {"start", s.start.str()},
          {"months", s.months},
          {"base_temp", s.base_temp},
          {"zonal_gradient", s.zonal_gradient},
          {"seasonal_amplitude", s.seasonal_amplitude},
          {"noise_sigma", s.noise_sigma},
          {"events", events},
          {"ohc_lag", s.ohc_lag},
          {"ohc_base", s.ohc_base},
          {"ohc_gain", s.ohc_gain},
          {"seed", s.seed}};
}

}  // namespace nino
