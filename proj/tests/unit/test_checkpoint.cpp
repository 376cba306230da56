#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "spikerl/checkpoint.hpp"

using namespace spikerl;

TEST(Checkpoint, GlmRoundTrip) {
  PolicyShape s;
  s.n_in = 5;
  s.horizon = 6;
  s.tau_s = 3;
  s.k_s = 2;
  s.basis = BasisMode::RaisedCosine;
  Rng rng(1);
  GlmPolicy p = GlmPolicy::randomly_initialized(s, rng);
  p.biases()[1] = 1.0 / 3.0;
  std::stringstream io;
  save_checkpoint(io, p);
  EXPECT_EQ(io.str().rfind(kGlmMagic, 0), 0u);
  const GlmPolicy q = load_glm_checkpoint(io);
  EXPECT_EQ(q, p);
  EXPECT_EQ(q.shape().tau_s, 3);
  EXPECT_EQ(q.shape().basis, BasisMode::RaisedCosine);
}

TEST(Checkpoint, AnnAndIfRoundTrip) {
  DensePolicyNet net(4, 4, OutputMode::Relu);
  Rng rng(2);
  for (double& w : net.weights()) w = rng.uniform(-1, 1);
  net.biases()[0] = 0.1;
  std::stringstream io;
  save_checkpoint(io, net);
  EXPECT_EQ(load_ann_checkpoint(io), net);

  IfSnn snn{2, 4, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}, {0, 0.01, 0, 0}, {1, 1, 1, 2}};
  std::stringstream io2;
  save_checkpoint(io2, snn);
  const IfSnn back = load_if_checkpoint(io2);
  EXPECT_EQ(back.weights, snn.weights);
  EXPECT_EQ(back.bias_currents, snn.bias_currents);
  EXPECT_EQ(back.thresholds, snn.thresholds);
}

TEST(Checkpoint, FilesAndKinds) {
  const auto dir = std::filesystem::temp_directory_path() / "spikerl_checkpoint_test";
  std::filesystem::create_directories(dir);
  DensePolicyNet net(3, 4, OutputMode::Softmax);
  save_checkpoint_file(dir / "ann.txt", net);
  EXPECT_EQ(peek_checkpoint_kind(dir / "ann.txt"), kAnnMagic);
  EXPECT_EQ(load_ann_checkpoint_file(dir / "ann.txt"), net);
  EXPECT_THROW(load_glm_checkpoint_file(dir / "ann.txt"), CheckpointError);
  EXPECT_THROW(load_glm_checkpoint_file(dir / "missing.txt"), CheckpointError);
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, RejectsDamage) {
  std::stringstream io;
  save_checkpoint(io, GlmPolicy(PolicyShape{}));
  std::string text = io.str();
  std::stringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(load_glm_checkpoint(truncated), CheckpointError);
  std::stringstream extra(text + "1.0\n");
  EXPECT_THROW(load_glm_checkpoint(extra), CheckpointError);
  std::stringstream wrong("SPIKERL-GLM-v9\n");
  EXPECT_THROW(load_glm_checkpoint(wrong), CheckpointError);
}
