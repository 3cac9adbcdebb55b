#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "segforge/image.hpp"

namespace segforge {

// Eight defect classes (labels 1..8) plus background label 0.
inline constexpr int kNumDefectClasses = 8;

using Dataset = std::vector<Sample>;

// Pairing on disk: <stem>.png with <stem>_mask.png. An optional manifest
// (newline-delimited ids) restricts and orders the load; otherwise ids are
// sorted lexicographically. Every mask label must be <= num_classes.
Dataset load_dataset(const std::filesystem::path& root,
                     int num_classes = kNumDefectClasses,
                     const std::filesystem::path& manifest = {});

// Writes <id>.png and <id>_mask.png under root.
void save_sample(const std::filesystem::path& root, const Sample& sample);
void save_dataset(const std::filesystem::path& root, const Dataset& dataset);

// Per-label sample presence counts: a sample counts toward label c iff any
// pixel of its mask equals c. Background (0) is excluded.
struct ClassDistribution {
  std::map<int, std::size_t> counts;

  std::size_t total() const;
  std::size_t count(int label) const;
  double proportion(int label) const;  // counts[label] / total
};

ClassDistribution class_distribution(const Dataset& dataset);

struct SplitFractions {
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
};

struct DatasetSplit {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Disjoint, exhaustive, deterministic per seed. Shares are floored and the
// remainder goes to train.
DatasetSplit split_dataset(const Dataset& dataset, SplitFractions fractions,
                           std::uint64_t seed);

// Class importance weights, normalized so the maximum is 1.0.
struct CIWTable {
  std::map<int, double> weights;
};

CIWTable normalize_ciw(const std::map<int, double>& raw);

// The culvert/sewer defect weight set used for FWIoU.
const CIWTable& default_ciw();
const std::map<int, std::string>& defect_class_names();

}  // namespace segforge
