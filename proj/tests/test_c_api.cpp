#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "interformer/c_api.h"

namespace {

using nlohmann::json;

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "if_capi_test";
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

const char* kTinySynth =
    R"({"classes":["push","still"],"samples_per_class":3,"joint_count":5,
        "t_min":6,"t_max":8,"seed":11})";
const char* kTinyModel =
    R"({"joint_count":5,"n_layers":1,"temporal_heads":3,"ffn_hidden":8})";

}  // namespace

TEST_CASE("version string is present") {
  CHECK(std::string(if_version()).find("interformer") != std::string::npos);
}

TEST_CASE("dataset synthesize, save, load, summarize") {
  TempDir dir;
  if_dataset* dataset = nullptr;
  REQUIRE(if_dataset_synthesize(kTinySynth, &dataset) == IF_OK);
  CHECK(if_dataset_size(dataset) == 6);

  char* summary_text = nullptr;
  REQUIRE(if_dataset_summary_json(dataset, &summary_text) == IF_OK);
  const json summary = json::parse(summary_text);
  if_string_free(summary_text);
  CHECK(summary.at("samples") == 6);
  CHECK(summary.at("classes").at("push") == 3);

  const std::string path = dir.file("ds.json");
  REQUIRE(if_dataset_save(dataset, path.c_str()) == IF_OK);
  if_dataset* loaded = nullptr;
  REQUIRE(if_dataset_load(path.c_str(), &loaded) == IF_OK);
  CHECK(if_dataset_size(loaded) == 6);
  if_dataset_free(loaded);
  if_dataset_free(dataset);
}

TEST_CASE("error paths set codes and messages") {
  if_dataset* dataset = nullptr;
  CHECK(if_dataset_synthesize(R"({"bogus":1})", &dataset) == IF_ERR_INVALID_ARGUMENT);
  CHECK(std::string(if_last_error()).find("bogus") != std::string::npos);

  CHECK(if_dataset_load("/nonexistent/nowhere.json", &dataset) == IF_ERR_IO);
  CHECK(std::string(if_last_error()).find("nowhere") != std::string::npos);

  CHECK(if_dataset_synthesize(R"({"samples_per_class":0})", &dataset) ==
        IF_ERR_INVALID_ARGUMENT);

  if_model* model = nullptr;
  CHECK(if_model_create(R"({"joint_count":5,"temporal_heads":4})", 1, &model) ==
        IF_ERR_INVALID_ARGUMENT);
  CHECK(if_model_create("{not json", 1, &model) == IF_ERR_INVALID_ARGUMENT);
  CHECK(if_model_load("/nonexistent/model.ckpt", &model) == IF_ERR_IO);
}

TEST_CASE("model create, train, save, resume-load, generate, evaluate") {
  TempDir dir;
  if_dataset* dataset = nullptr;
  REQUIRE(if_dataset_synthesize(kTinySynth, &dataset) == IF_OK);

  if_model* model = nullptr;
  REQUIRE(if_model_create(kTinyModel, 5, &model) == IF_OK);

  char* config_text = nullptr;
  REQUIRE(if_model_config_json(model, &config_text) == IF_OK);
  CHECK(json::parse(config_text).at("joint_count") == 5);
  if_string_free(config_text);

  const std::string log_path = dir.file("log.csv");
  REQUIRE(if_train(model, dataset, R"({"steps":6,"batch_size":3,"seed":2})",
                   log_path.c_str()) == IF_OK);
  CHECK(std::filesystem::exists(log_path));

  const std::string ckpt = dir.file("model.ckpt");
  REQUIRE(if_model_save(model, ckpt.c_str()) == IF_OK);
  CHECK(std::filesystem::exists(ckpt));
  CHECK(std::filesystem::exists(ckpt + ".json"));

  // Reload: optimizer state comes back, so further training continues the run.
  if_model* reloaded = nullptr;
  REQUIRE(if_model_load(ckpt.c_str(), &reloaded) == IF_OK);
  REQUIRE(if_train(reloaded, dataset, R"({"steps":8,"batch_size":3,"seed":2})", nullptr) ==
          IF_OK);

  const std::string gen_path = dir.file("gen.json");
  const std::string csv_path = dir.file("gen.csv");
  REQUIRE(if_generate_to_file(reloaded, dataset, 0, R"({"seed":3})", 0, gen_path.c_str(),
                              csv_path.c_str()) == IF_OK);
  CHECK(std::filesystem::exists(gen_path));
  CHECK(std::filesystem::exists(csv_path));

  REQUIRE(if_generate_to_file(reloaded, dataset, 0, R"({"chunk_len":4})", 1, gen_path.c_str(),
                              nullptr) == IF_OK);

  CHECK(if_generate_to_file(reloaded, dataset, 99, "{}", 0, gen_path.c_str(), nullptr) ==
        IF_ERR_INVALID_ARGUMENT);

  const std::string prefix = dir.file("gen_s");
  REQUIRE(if_generate_diverse_to_files(reloaded, dataset, 0, R"({"noise_sd":0.3,"seed":7})", 3,
                                       prefix.c_str()) == IF_OK);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::filesystem::exists(prefix + std::to_string(i) + ".json"));
  }

  if_classifier* classifier = nullptr;
  double holdout = -1.0;
  REQUIRE(if_classifier_train(dataset,
                              R"({"hidden":12,"layers":1,"steps":40,"seed":3})", &classifier,
                              &holdout) == IF_OK);
  CHECK(holdout >= 0.0);

  const std::string cls_path = dir.file("classifier.ckpt");
  REQUIRE(if_classifier_save(classifier, cls_path.c_str()) == IF_OK);
  if_classifier* classifier2 = nullptr;
  REQUIRE(if_classifier_load(cls_path.c_str(), &classifier2) == IF_OK);

  char* report_json = nullptr;
  char* report_table = nullptr;
  REQUIRE(if_evaluate(reloaded, classifier2, dataset, "{}", &report_json, &report_table) ==
          IF_OK);
  const json report = json::parse(report_json);
  CHECK(report.contains("model"));
  CHECK(report.contains("zero_velocity"));
  CHECK(std::string(report_table).find("interformer") != std::string::npos);
  if_string_free(report_json);
  if_string_free(report_table);

  if_classifier_free(classifier);
  if_classifier_free(classifier2);
  if_model_free(model);
  if_model_free(reloaded);
  if_dataset_free(dataset);
}
