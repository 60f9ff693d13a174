#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rlvr/error.hpp"
#include "rlvr/harness.hpp"
#include "rlvr/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void init_logging() {
  auto logger = spdlog::stderr_color_mt("rlvr");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("RLVR_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

int report(const std::string& kind, const std::string& message, std::optional<std::size_t> line = std::nullopt) {
  json record = {{"error", kind}, {"message", message}};
  if (line) record["line"] = *line;
  std::cerr << record.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Multi-task RLVR toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate spatial QA items from scene/video annotations");
  std::string scenes, videos, categories = "all", synth_out;
  rlvr::SynthConfig synth_config;
  synth->add_option("--scenes", scenes, "Scene annotation JSONL")->required();
  synth->add_option("--videos", videos, "Video annotation JSONL");
  synth->add_option("--categories", categories, "Comma-separated categories, or all/image/video");
  synth->add_option("--out", synth_out, "QA item JSONL")->required();
  synth->add_option("--seed", synth_config.seed);
  synth->add_option("--tie-ratio", synth_config.tie_ratio);
  synth->add_option("--min-pixel-area", synth_config.min_pixel_area);
  synth->add_option("--max-per-category", synth_config.max_items_per_category);

  // score-difficulty
  auto* score = app.add_subcommand("score-difficulty", "Difficulty = 1 - accuracy over n recorded responses");
  std::string score_data, score_responses, score_out;
  int score_n = 10;
  bool keep_all = false;
  score->add_option("--data", score_data, "Prompt or QA JSONL")->required();
  score->add_option("--responses", score_responses, "Recorded responses JSONL")->required();
  score->add_option("--n", score_n)->check(CLI::PositiveNumber);
  score->add_option("--out", score_out)->required();
  score->add_flag("--keep-all", keep_all, "Keep 0%/100% items and input order");

  // curate
  auto* curate = app.add_subcommand("curate", "Cold-start chain selection from recorded transcripts");
  std::string curate_prompts, transcripts, curate_out;
  int k = 8, threshold = 4, max_in_flight = 4;
  double temperature = 1.0;
  curate->add_option("--prompts", curate_prompts)->required();
  curate->add_option("--transcripts", transcripts, "Recorded chains and judge scores JSONL")->required();
  curate->add_option("--k", k)->check(CLI::PositiveNumber);
  curate->add_option("--threshold", threshold)->check(CLI::Range(1, 5));
  curate->add_option("--temperature", temperature);
  curate->add_option("--max-in-flight", max_in_flight)->check(CLI::PositiveNumber);
  curate->add_option("--out", curate_out)->required();

  // train
  auto* train = app.add_subcommand("train", "GRPO training over the policy sandbox");
  std::string config_path, train_out;
  bool resume = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_steps;
  train->add_option("--config", config_path)->required();
  train->add_option("--out", train_out, "Output directory")->required();
  train->add_option("--seed", seed, "Overrides config seed");
  train->add_option("--max-steps", max_steps, "Overrides config max_steps");
  train->add_flag("--resume", resume, "Continue from the checkpoint in --out");

  // verify
  auto* verify = app.add_subcommand("verify", "Score predictions against ground truths");
  std::string pred, gt, verify_out;
  verify->add_option("--pred", pred)->required();
  verify->add_option("--gt", gt)->required();
  verify->add_option("--out", verify_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      std::optional<fs::path> video_path;
      if (!videos.empty()) video_path = videos;
      auto items = rlvr::synthesize_files(scenes, video_path, rlvr::parse_categories(categories), synth_config);
      std::vector<json> out;
      for (const auto& item : items) out.push_back(rlvr::io::to_json(item));
      rlvr::io::write_jsonl(synth_out, out);
      spdlog::info("wrote {} QA items to {}", out.size(), synth_out);
    } else if (*score) {
      auto scored = rlvr::score_difficulty_files(score_data, score_responses, score_n, keep_all);
      std::vector<json> out;
      for (const auto& s : scored) {
        json j = rlvr::io::to_json(s.record);
        j["accuracy"] = s.accuracy;
        out.push_back(std::move(j));
      }
      rlvr::io::write_jsonl(score_out, out);
      spdlog::info("wrote {} scored prompts to {}", out.size(), score_out);
    } else if (*curate) {
      auto selected = rlvr::curate_files(curate_prompts, transcripts, k, threshold, temperature, max_in_flight);
      std::vector<json> out;
      for (const auto& r : selected) out.push_back(rlvr::io::to_json(r));
      rlvr::io::write_jsonl(curate_out, out);
      spdlog::info("selected {} chains into {}", out.size(), curate_out);
    } else if (*train) {
      auto config = rlvr::load_experiment_config(config_path);
      if (seed) config.seed = *seed;
      if (max_steps) config.max_steps = *max_steps;
      auto summary = rlvr::run_training(config, train_out, resume);
      spdlog::info("trained {} steps (config {})", summary.steps, summary.config_hash);
    } else if (*verify) {
      auto results = rlvr::verify_predictions(pred, gt);
      rlvr::io::write_jsonl(verify_out, results);
      spdlog::info("verified {} predictions", results.size());
    }
  } catch (const rlvr::SchemaError& e) {
    return report(e.kind(), e.what(), e.line());
  } catch (const rlvr::Error& e) {
    return report(e.kind(), e.what());
  } catch (const std::exception& e) {
    return report("InternalError", e.what());
  }
  return 0;
}
