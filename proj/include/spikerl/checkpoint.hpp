#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string_view>

#include "spikerl/baselines.hpp"
#include "spikerl/glm_policy.hpp"

// Plain-text model checkpoints. The first line is a magic/version string,
// followed by "key value" header lines, then the parameter blocks. Weight
// blocks are written row-major over (input i, output j[, basis k]).
namespace spikerl {

inline constexpr std::string_view kGlmMagic = "SPIKERL-GLM-v1";
inline constexpr std::string_view kAnnMagic = "SPIKERL-ANN-v1";
inline constexpr std::string_view kIfMagic = "SPIKERL-IF-v1";

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void save_checkpoint(std::ostream& out, const GlmPolicy& policy);
void save_checkpoint(std::ostream& out, const DensePolicyNet& net);
void save_checkpoint(std::ostream& out, const IfSnn& snn);

GlmPolicy load_glm_checkpoint(std::istream& in);
DensePolicyNet load_ann_checkpoint(std::istream& in);
IfSnn load_if_checkpoint(std::istream& in);

// Reads the magic line of a checkpoint file.
std::string peek_checkpoint_kind(const std::filesystem::path& path);

template <class Model>
void save_checkpoint_file(const std::filesystem::path& path, const Model& model);

GlmPolicy load_glm_checkpoint_file(const std::filesystem::path& path);
DensePolicyNet load_ann_checkpoint_file(const std::filesystem::path& path);
IfSnn load_if_checkpoint_file(const std::filesystem::path& path);

}  // namespace spikerl
