#include <gtest/gtest.h>

#include "support.hpp"

using namespace gestgen;

TEST(KeyValueConfig, SectionsCommentsAndRanges) {
  const auto kv = KeyValueConfig::parse(
      "# top\n"
      "[a]\n"
      "x = 1.5   # trailing\n"
      "\n"
      "[b]\n"
      "r = [ -2, 3.25 ]\n"
      "n = 7\n");
  EXPECT_EQ(kv.get_double("a.x", 0), 1.5);
  EXPECT_EQ(kv.get_range("b.r", {0, 0}), std::make_pair(-2.0, 3.25));
  EXPECT_EQ(kv.get_uint("b.n", 0), 7u);
  EXPECT_EQ(kv.get_double("a.missing", 9.0), 9.0);
  EXPECT_TRUE(kv.has("a.x"));
  EXPECT_FALSE(kv.has("x"));
}

TEST(KeyValueConfig, Errors) {
  EXPECT_THROW(KeyValueConfig::parse("[a\n"), ParseError);
  EXPECT_THROW(KeyValueConfig::parse("novalue\n"), ParseError);
  EXPECT_THROW(KeyValueConfig::parse("a = 1\na = 2\n"), ParseError);
  const auto kv = KeyValueConfig::parse("x = abc\nn = -1\nr = 1, 2\n");
  EXPECT_THROW(kv.get_double("x", 0), ConfigError);
  EXPECT_THROW(kv.get_uint("n", 0), ConfigError);
  EXPECT_THROW(kv.get_range("r", {0, 0}), ConfigError);
  EXPECT_THROW(kv.require_known({"x", "n"}), ConfigError);
}

TEST(RetargetConfig, BundledFileEqualsBuiltInDefaults) {
  const auto cfg = load_retarget_config(std::string(GESTGEN_SOURCE_DIR) + "/config/pepper.toml");
  const RetargetConfig def;
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    EXPECT_EQ(cfg.limits.range[i].min, def.limits.range[i].min) << kChannelNames[i];
    EXPECT_EQ(cfg.limits.range[i].max, def.limits.range[i].max) << kChannelNames[i];
  }
  EXPECT_EQ(cfg.limits.k1, 1.0);
  EXPECT_EQ(cfg.limits.k2, 0.2);
  EXPECT_EQ(cfg.limits.max_wrist_yaw, def.limits.max_wrist_yaw);
  EXPECT_EQ(cfg.glove_window, 20);
  EXPECT_EQ(cfg.glove_normalizer, 200.0);
  EXPECT_EQ(cfg.palm_up_elbow_yaw, def.palm_up_elbow_yaw);
  EXPECT_EQ(cfg.seed, 0u);
  EXPECT_EQ(cfg.calibration_frames, 10u);
}

TEST(RetargetConfig, OverridesAndDerivedNormalizer) {
  const auto cfg = parse_retarget_config(KeyValueConfig::parse(
      "[gains]\nk1 = 0.5\n[glove]\nwindow = 30\n[limits]\nhead_yaw = [-1, 1]\n"));
  EXPECT_EQ(cfg.limits.k1, 0.5);
  EXPECT_EQ(cfg.limits.k2, 0.2);
  EXPECT_EQ(cfg.glove_normalizer, 450.0);
  EXPECT_EQ(cfg.limits[Channel::kHeadYaw].min, -1.0);
  EXPECT_EQ(cfg.limits[Channel::kHeadYaw].max, 1.0);
}

TEST(RetargetConfig, RejectsBadValues) {
  auto parse = [](const std::string& s) { return parse_retarget_config(KeyValueConfig::parse(s)); };
  EXPECT_THROW(parse("[limits]\nhead_yaw = [1, -1]\n"), ConfigError);
  EXPECT_THROW(parse("[glove]\nnormalizer = 0\n"), ConfigError);
  EXPECT_THROW(parse("[glove]\nwindow = 0\n"), ConfigError);
  EXPECT_THROW(parse("[gains]\nk3 = 1\n"), ConfigError);
  EXPECT_THROW(parse("[limits]\nl_hand = [0, 1]\n"), ConfigError);
  EXPECT_THROW(load_retarget_config("/nonexistent/limits.toml"), IoError);
}

TEST(JointLimits, ClampAndContains) {
  const auto lim = JointLimits::pepper();
  EXPECT_EQ(lim.clamp(Channel::kHeadPitch, 5.0), 0.6371);
  EXPECT_EQ(lim.clamp(Channel::kLElbowRoll, 0.0), -0.0087);
  const RobotPose rest = rest_pose(lim);
  EXPECT_TRUE(lim.contains(rest));
  EXPECT_EQ(rest[Channel::kLShoulderRoll], 0.0087);
  EXPECT_EQ(rest[Channel::kRShoulderRoll], -0.0087);
  EXPECT_EQ(rest[Channel::kHeadYaw], 0.0);
  RobotPose bad = rest;
  bad[Channel::kRHandOpen] = 1.5;
  EXPECT_FALSE(lim.contains(bad));
}

TEST(Channels, OrderIsHeadThenLeftThenRight) {
  EXPECT_EQ(kChannelNames[0], "head_yaw");
  EXPECT_EQ(kChannelNames[1], "head_pitch");
  EXPECT_EQ(index(arm_channel(Side::kLeft, ArmJoint::kShoulderPitch)), 2u);
  EXPECT_EQ(index(arm_channel(Side::kLeft, ArmJoint::kHandOpen)), 7u);
  EXPECT_EQ(index(arm_channel(Side::kRight, ArmJoint::kShoulderPitch)), 8u);
  EXPECT_EQ(index(arm_channel(Side::kRight, ArmJoint::kHandOpen)), 13u);
  EXPECT_EQ(kChannelNames[index(arm_channel(Side::kRight, ArmJoint::kElbowRoll))], "r_elbow_roll");
}
