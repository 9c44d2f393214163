#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "helpers.hpp"
#include "nino/checkpoint.hpp"
#include "nino/error.hpp"
#include "nino/pipeline.hpp"

using namespace nino;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int run_nino(const std::string& args) {
  const std::string cmd = std::string(NINO_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Small, fast scenario: 6 years on a 3x4 grid inside the Nino 3.4 box.
RunConfig small_config(const fs::path& dir, std::vector<PlantedEvent> events) {
  RunConfig c;
  c.output_dir = dir;
  c.sst = dir / "sst.csv";
  c.ohc = dir / "ohc.csv";
  c.synth.axes = GridAxes(GridAxes::uniform(-4, 4, 3), GridAxes::uniform(-160, 4, 4));
  c.synth.months = 72;
  c.synth.noise_sigma = 0.1;
  c.synth.events = std::move(events);
  c.convlstm.hidden = {2, 2};
  c.cnn.channels = {2};
  c.cnn.hidden = 4;
  c.train.epochs = 1;
  c.n_steps = 20;
  finalize(c);
  return c;
}

std::vector<int> event_flags(const fs::path& events_csv) {
  std::vector<int> flags;
  const auto lines = lines_of(events_csv);
  for (std::size_t i = 1; i < lines.size(); ++i) flags.push_back(lines[i].back() - '0');
  return flags;
}

}  // namespace

TEST_CASE("oni command") {
  std::ostringstream log;
  SUBCASE("no events: no flags") {
    const auto dir = nino::testing::scratch_dir("cli_oni_none");
    const auto cfg = small_config(dir, {});
    cmd_synth(cfg, log);
    cmd_oni(cfg, log);
    for (int f : event_flags(dir / "events.csv")) CHECK(f == 0);
    CHECK(lines_of(dir / "oni.csv").size() == 1 + 70);
    CHECK(lines_of(dir / "quarters.csv").size() == 1 + 66);
    CHECK(fs::exists(dir / "anomaly.csv"));
    CHECK(fs::exists(dir / "run_config.json"));
  }
  SUBCASE("strong event: flags over its rows") {
    const auto dir = nino::testing::scratch_dir("cli_oni_event");
    auto cfg = small_config(dir, {{24, 16, 2.5}});
    cfg.synth.noise_sigma = 0.0;
    cmd_synth(cfg, log);
    cmd_oni(cfg, log);
    const auto flags = event_flags(dir / "events.csv");
    const auto rows = lines_of(dir / "quarters.csv");
    int positives = 0;
    for (std::size_t t = 0; t < flags.size(); ++t) {
      positives += flags[t];
      // A flagged row's seven months must lie inside the planted event.
      if (flags[t]) CHECK((t >= 24 && t + 7 <= 40));
    }
    CHECK(positives > 0);
    CHECK(flags[28] == 1);
  }
}

TEST_CASE("missing input: FileNotFound exit code and no outputs") {
  const auto dir = nino::testing::scratch_dir("cli_missing");
  const auto out = dir / "out";
  CHECK(run_nino("oni --sst " + (dir / "nope.csv").string() + " -o " + out.string()) ==
        static_cast<int>(ErrorFamily::FileNotFound));
  CHECK_FALSE(fs::exists(out));
  CHECK(run_nino("oni -c " + (dir / "nope.json").string()) == static_cast<int>(ErrorFamily::FileNotFound));
  CHECK(run_nino("oni --threshold -1 --sst x") == static_cast<int>(ErrorFamily::Config));
  CHECK(run_nino("frobnicate") == static_cast<int>(ErrorFamily::Config));

  std::ofstream(dir / "bad.csv") << "lat,lon\n";
  CHECK(run_nino("oni --sst " + (dir / "bad.csv").string() + " -o " + out.string()) == static_cast<int>(ErrorFamily::Data));
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("binary runs synth then oni") {
  const auto dir = nino::testing::scratch_dir("cli_bin");
  nlohmann::json j{{"output_dir", dir.string()}, {"sst", (dir / "sst.csv").string()}, {"synth", {{"months", 48}}}};
  std::ofstream(dir / "run.json") << j.dump();
  CHECK(run_nino("synth -c " + (dir / "run.json").string()) == 0);
  CHECK(run_nino("oni -c " + (dir / "run.json").string() + " --seed 7") == 0);
  CHECK(fs::exists(dir / "events.csv"));
  const auto echoed = nlohmann::json::parse(slurp(dir / "run_config.json"));
  CHECK(echoed["seed"] == 7);
}

TEST_CASE("train, predict, evaluate, render") {
  const auto dir = nino::testing::scratch_dir("cli_models");
  std::ostringstream log;
  auto cfg = small_config(dir, {{30, 14, 1.8}});
  cmd_synth(cfg, log);

  SUBCASE("zero epochs leave the initialization") {
    cfg.train.epochs = 0;
    cmd_train(cfg, log);
    const auto data = prepare(cfg);
    const auto init = make_convlstm(cfg, data);
    const auto saved = read_checkpoint(dir / "convlstm.ckpt");
    REQUIRE(saved.size() == init.parameters().size());
    for (std::size_t i = 0; i < saved.size(); ++i) CHECK(saved[i].value == init.parameters()[i].value);
    CHECK(lines_of(dir / "convlstm_loss.csv").size() == 2);
  }
  SUBCASE("same seed, same bytes") {
    cmd_train(cfg, log);
    const auto a = slurp(dir / "convlstm.ckpt");
    const auto b = slurp(dir / "cnn.ckpt");
    cmd_train(cfg, log);
    CHECK(slurp(dir / "convlstm.ckpt") == a);
    CHECK(slurp(dir / "cnn.ckpt") == b);
    CHECK(fs::exists(dir / "convlstm.manifest.json"));
    CHECK(fs::exists(dir / "norm_sst.json"));
    CHECK(fs::exists(dir / "norm_ohc.json"));

    cmd_evaluate(cfg, log);
    const auto report = lines_of(dir / "eval_report.csv");
    CHECK(report.size() == 7);
    CHECK(report[1].substr(report[1].size() - 6) == "100.00");

    cmd_predict(cfg, log);
    CHECK(lines_of(dir / "prediction_quarters.csv").size() == 4);
    CHECK(lines_of(dir / "prediction_sst.csv").size() == 1 + 7 * 12);

    cmd_render(cfg, log);
    std::size_t ppm = 0;
    for (const auto& e : fs::directory_iterator(dir / "render")) ppm += e.path().extension() == ".ppm" ? 1 : 0;
    CHECK(ppm == 13);
    const auto first = slurp(dir / "render" / "average_2006-01_2006-07.ppm");
    cmd_render(cfg, log);
    CHECK(slurp(dir / "render" / "average_2006-01_2006-07.ppm") == first);
  }
  SUBCASE("self-test") {
    cfg.self_test = true;
    cmd_evaluate(cfg, log);
    const auto j = nlohmann::json::parse(slurp(dir / "eval_report.json"));
    CHECK(j["configurations"].size() == 6);
    for (const auto& c : j["configurations"]) CHECK(c["accuracy"] == 100.0);
  }
  SUBCASE("too few anchors") {
    cfg.n_steps = 500;
    cfg.self_test = true;
    CHECK_THROWS_AS(cmd_evaluate(cfg, log), Error);
  }
}

TEST_CASE("config json round trip") {
  RunConfig c;
  c.sst = "a.csv";
  c.base_period = Period::parse("2001-01:2010-12");
  c.convlstm.hidden = {6, 3};
  c.train.epochs = 7;
  c.render.png = true;
  c.anchor = TimeStamp(2023, 3);
  const auto back = run_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"window", "twelve"}}), Error);
  RunConfig bad;
  bad.horizon = 6;
  CHECK_THROWS_AS(finalize(bad), Error);
}
