#include <gtest/gtest.h>

#include <json.hpp>
#include <string>

#include "bbmlab.h"

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STRNE(bbmlab_version(), "");
  EXPECT_STREQ(bbmlab_status_string(BBMLAB_OK), "ok");
  EXPECT_STREQ(bbmlab_status_string(BBMLAB_ERR_NULL_POINTER), "null pointer");
}

TEST(CApi, NullPointersAreReported) {
  EXPECT_EQ(bbmlab_config_create(nullptr, nullptr), BBMLAB_ERR_NULL_POINTER);
  EXPECT_NE(std::string(bbmlab_last_error()), "");
  EXPECT_EQ(bbmlab_run(nullptr, nullptr), BBMLAB_ERR_NULL_POINTER);
  EXPECT_EQ(bbmlab_explore_tree(2, 0, 5, 10, 100, 1, 1, nullptr), BBMLAB_ERR_NULL_POINTER);
  bbmlab_config_destroy(nullptr);
  bbmlab_result_destroy(nullptr);
}

TEST(CApi, ConfigLifecycle) {
  bbmlab_config* c = nullptr;
  EXPECT_EQ(bbmlab_config_create("nonsense", &c), BBMLAB_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(c, nullptr);
  ASSERT_EQ(bbmlab_config_create("sim-n", &c), BBMLAB_OK);
  EXPECT_EQ(bbmlab_config_set(c, "barrier_b", "14"), BBMLAB_OK);
  EXPECT_EQ(bbmlab_config_set(c, "bogus", "1"), BBMLAB_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(bbmlab_config_set(c, "samples", "{not json"), BBMLAB_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(bbmlab_config_load_toml(c, "/nonexistent/file.toml"), BBMLAB_ERR_IO);
  const char* json = nullptr;
  ASSERT_EQ(bbmlab_config_json(c, &json), BBMLAB_OK);
  const auto j = nlohmann::json::parse(json);
  EXPECT_EQ(j["barrier_b"], 14);
  bbmlab_config_destroy(c);
}

TEST(CApi, ExploreTreeAndIdentities) {
  bbmlab_count a{}, b{};
  ASSERT_EQ(bbmlab_explore_tree(2.0, 1.0, 6.0, 1000, 1000000, 3, 4, &a), BBMLAB_OK);
  ASSERT_EQ(bbmlab_explore_tree(2.0, 1.0, 6.0, 1000, 1000000, 3, 4, &b), BBMLAB_OK);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.work, b.work);
  EXPECT_EQ(bbmlab_explore_tree(1.0, 1.0, 6.0, 1000, 1000000, 3, 4, &a), BBMLAB_ERR_INVALID_ARGUMENT);
  double m[3];
  ASSERT_EQ(bbmlab_boundary_identities(m), BBMLAB_OK);
  EXPECT_NEAR(m[0], 1.0, 1e-10);
  EXPECT_NEAR(m[1], 0.0, 1e-10);
  EXPECT_NEAR(m[2], 1.0, 1e-10);
}

TEST(CApi, VerifySingleCriterionWithCallback) {
  int calls = 0;
  auto cb = [](const char* text, void* user) {
    ++*static_cast<int*>(user);
    EXPECT_TRUE(nlohmann::json::parse(text).contains("passed"));
  };
  bbmlab_result* r = nullptr;
  ASSERT_EQ(bbmlab_verify("quick", R"({"only":[1]})", cb, &calls, &r), BBMLAB_OK);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(bbmlab_result_exit_code(r), 0);
  bbmlab_result_destroy(r);
  EXPECT_EQ(bbmlab_verify("quick", R"({"colour":1})", nullptr, nullptr, &r), BBMLAB_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(bbmlab_report("/nonexistent/dir", "/tmp"), BBMLAB_ERR_IO);
}
