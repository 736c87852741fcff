// Copyright 2026 The deskasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "deskasr/deskasr.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void Spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Takes ownership of a string returned through the API.
std::string Take(char* s) {
  std::string out = s == nullptr ? "" : s;
  dasr_string_free(s);
  return out;
}

class CapiTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new std::string(
        (fs::temp_directory_path() / "deskasr_capi_test").string());
    fs::remove_all(*root_);
    fs::create_directories(*root_);
    ASSERT_EQ(dasr_synth((*root_ + "/data").c_str(), 4, 3, 0.0), DASR_OK)
        << dasr_last_error();
    Spit(*root_ + "/run.yaml",
         "model: aed\n"
         "preset: tiny\n"
         "seed: 5\n"
         "data:\n"
         "  train_manifest: data/manifest.tsv\n"
         "  output_dir: out\n"
         "training:\n"
         "  max_steps: 4\n"
         "  eval_every: 0\n");
    char* ckpt = nullptr;
    dasr_train_options opts;
    dasr_train_options_init(&opts);
    ASSERT_EQ(dasr_train((*root_ + "/run.yaml").c_str(), &opts, &ckpt),
              DASR_OK)
        << dasr_last_error();
    ckpt_ = new std::string(Take(ckpt));
  }
  static void TearDownTestSuite() {
    delete root_;
    delete ckpt_;
  }

  static std::string* root_;
  static std::string* ckpt_;
};

std::string* CapiTest::root_ = nullptr;
std::string* CapiTest::ckpt_ = nullptr;

TEST_F(CapiTest, TrainWritesCheckpointRelativeToConfig) {
  EXPECT_EQ(fs::path(*ckpt_).filename(), "final.dasr");
  EXPECT_TRUE(fs::exists(*ckpt_));
  EXPECT_TRUE(fs::exists(fs::path(*ckpt_).parent_path() / "train_log.tsv"));
}

TEST_F(CapiTest, LoadTranscribeAndProbe) {
  dasr_model* m = nullptr;
  ASSERT_EQ(dasr_model_load(ckpt_->c_str(), &m), DASR_OK) << dasr_last_error();
  dasr_decode_options d;
  dasr_decode_options_init(&d);
  char* a = nullptr;
  char* b = nullptr;
  const std::string wav = *root_ + "/data/wav/synth00000.wav";
  ASSERT_EQ(dasr_model_transcribe_file(m, wav.c_str(), &d, &a), DASR_OK);
  ASSERT_EQ(dasr_model_transcribe_file(m, wav.c_str(), &d, &b), DASR_OK);
  EXPECT_EQ(Take(a), Take(b));

  std::vector<float> silence(8000, 0.0f);
  char* t = nullptr;
  EXPECT_EQ(dasr_model_transcribe_pcm(m, silence.data(), silence.size(), 16000,
                                      &d, &t),
            DASR_OK);
  Take(t);
  EXPECT_EQ(dasr_model_transcribe_pcm(m, silence.data(), silence.size(), 8000,
                                      &d, &t),
            DASR_ERR_AUDIO);

  double* v1 = nullptr;
  double* v2 = nullptr;
  size_t n1 = 0, n2 = 0;
  ASSERT_EQ(dasr_model_probe(m, 9, 40, &v1, &n1), DASR_OK);
  const std::string saved = *root_ + "/copy.dasr";
  ASSERT_EQ(dasr_model_save(m, saved.c_str()), DASR_OK);
  dasr_model* m2 = nullptr;
  ASSERT_EQ(dasr_model_load(saved.c_str(), &m2), DASR_OK);
  ASSERT_EQ(dasr_model_probe(m2, 9, 40, &v2, &n2), DASR_OK);
  ASSERT_EQ(n1, n2);
  ASSERT_GT(n1, 0u);
  for (size_t i = 0; i < n1; ++i) {
    EXPECT_TRUE(std::isfinite(v1[i]));
    EXPECT_EQ(v1[i], v2[i]) << i;
  }
  dasr_buffer_free(v1);
  dasr_buffer_free(v2);
  EXPECT_EQ(dasr_model_probe(m, 9, 3, &v1, &n1), DASR_ERR_INVALID_ARGUMENT);
  dasr_model_free(m);
  dasr_model_free(m2);
}

TEST_F(CapiTest, DecodeListReportsPartialFailure) {
  dasr_model* m = nullptr;
  ASSERT_EQ(dasr_model_load(ckpt_->c_str(), &m), DASR_OK);
  Spit(*root_ + "/list.txt",
       "u1\tdata/wav/synth00001.wav\nu2\tmissing.wav\n");
  char* failures = nullptr;
  const std::string out = *root_ + "/hyp.txt";
  EXPECT_EQ(dasr_decode_list(m, (*root_ + "/list.txt").c_str(), out.c_str(),
                             nullptr, &failures),
            DASR_ERR_PARTIAL);
  const std::string f = Take(failures);
  EXPECT_EQ(f.rfind("u2\t", 0), 0u) << f;
  EXPECT_EQ(Slurp(out).rfind("u1\t", 0), 0u);

  Spit(*root_ + "/empty.txt", "");
  EXPECT_EQ(dasr_decode_list(m, (*root_ + "/empty.txt").c_str(), out.c_str(),
                             nullptr, nullptr),
            DASR_OK);
  EXPECT_EQ(Slurp(out), "");
  dasr_model_free(m);
}

TEST_F(CapiTest, InspectAndCountParams) {
  char* report = nullptr;
  ASSERT_EQ(dasr_inspect(ckpt_->c_str(), &report), DASR_OK);
  EXPECT_NE(Take(report).find("tiny"), std::string::npos);
  ASSERT_EQ(dasr_count_params((*root_ + "/run.yaml").c_str(), &report),
            DASR_OK);
  EXPECT_NE(Take(report).find("encoder"), std::string::npos);
  ASSERT_EQ(dasr_config_normalize((*root_ + "/run.yaml").c_str(), &report),
            DASR_OK);
  EXPECT_NE(Take(report).find("max_steps: 4"), std::string::npos);
}

TEST_F(CapiTest, ErrorCodesAndMessages) {
  dasr_model* m = nullptr;
  EXPECT_EQ(dasr_model_load(nullptr, &m), DASR_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(dasr_last_error()).find("checkpoint_path"),
            std::string::npos);

  Spit(*root_ + "/bad.dasr", "DASRCKPT garbage");
  EXPECT_EQ(dasr_model_load((*root_ + "/bad.dasr").c_str(), &m),
            DASR_ERR_CHECKPOINT);
  EXPECT_EQ(m, nullptr);

  Spit(*root_ + "/bad.yaml", "model: aed\ntraining:\n  warmup: 3\n");
  char* ckpt = nullptr;
  EXPECT_EQ(dasr_train((*root_ + "/bad.yaml").c_str(), nullptr, &ckpt),
            DASR_ERR_CONFIG);
  EXPECT_NE(std::string(dasr_last_error()).find("bad.yaml:3"),
            std::string::npos)
      << dasr_last_error();

  EXPECT_EQ(dasr_synth((*root_ + "/x").c_str(), 0, 1, 0.0), DASR_ERR_CONFIG);
  EXPECT_STREQ(dasr_status_name(DASR_ERR_PARTIAL), "partial failure");
  EXPECT_NE(std::string(dasr_version()), "");
}

TEST_F(CapiTest, ScoreAndTable) {
  Spit(*root_ + "/ref.txt", "a\tabcde\n");
  Spit(*root_ + "/h.txt", "a\tabce\n");
  char* report = nullptr;
  char* warnings = nullptr;
  ASSERT_EQ(dasr_score((*root_ + "/ref.txt").c_str(),
                       (*root_ + "/h.txt").c_str(), "char", nullptr, 1,
                       &report, &warnings),
            DASR_OK);
  EXPECT_NE(Take(report).find("rate=20.00\n"), std::string::npos);
  EXPECT_EQ(Take(warnings), "");
  EXPECT_EQ(dasr_score((*root_ + "/ref.txt").c_str(),
                       (*root_ + "/h.txt").c_str(), "syllable", nullptr, 1,
                       &report, nullptr),
            DASR_ERR_CONFIG);

  const std::string table =
      std::string(DESKASR_TEST_DATA_DIR) + "/public_mandarin.tsv";
  ASSERT_EQ(dasr_score_table(table.c_str(), "Paraformer-Large", 1, &report),
            DASR_OK)
      << dasr_last_error();
  const std::string t = Take(report);
  EXPECT_NE(t.find("LLM-L.average=3.05\n"), std::string::npos) << t;
  EXPECT_NE(t.find("AED-L.average=3.18\n"), std::string::npos) << t;
  EXPECT_EQ(dasr_score_table(table.c_str(), "NoSuchSystem", 1, &report),
            DASR_ERR_CONFIG);
}

}  // namespace
