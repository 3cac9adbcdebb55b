#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "segforge/dataset.hpp"
#include "segforge/poisson.hpp"

namespace segforge {

// Random transform ranges applied to a defect source before injection
// (the DLI recipe: horizontal flip, translation, rotation, scaling).
struct DefectTransformRanges {
  double p_hflip = 0.5;
  double max_rotate_deg = 15.0;
  double max_translate_frac = 0.10;  // of the shorter side
  double scale_lo = 0.9;
  double scale_hi = 1.1;
};

struct InjectionConfig {
  double p_poisson = 0.5;  // probability of Poisson blending vs cut-paste
  std::map<int, DefectTransformRanges> per_class_transforms;
  int mask_dilation_kernel = 3;  // odd, Poisson path mask max-pooling
  PoissonOptions solver;

  const DefectTransformRanges& ranges_for(int cls) const;
  void validate() const;
};

// Per-label presence counts over the batch (a sample counts toward label c
// iff its mask contains c).
ClassDistribution count_batch_classes(const std::vector<Sample>& batch);

// Lowest-numbered label among those attaining the minimum count.
int select_minority_class(const ClassDistribution& dist,
                          const std::vector<int>& eligible_classes);

// Random crops whose masks are entirely background. Up to `attempts` tries
// per source sample, first hit kept (at most one patch per sample).
std::vector<Sample> harvest_defect_free(const Dataset& dataset,
                                        const std::vector<int>& sizes,
                                        int attempts, std::uint64_t seed);

// Pixels where defect.mask != 0 come from defect.image, the rest from
// target; output mask is defect.mask.
Sample cut_paste(const Sample& defect, const ImageBuffer& target);

// Seamless blend of the defect region into target; output mask is the
// max-pool dilation of defect.mask. Border-touching mask pixels (no solvable
// boundary) are copied directly.
Sample poisson_clone(const Sample& defect, const ImageBuffer& target,
                     const InjectionConfig& config);

MaskBuffer maxpool_dilate(const MaskBuffer& mask, int kernel);

struct InjectionRecord {
  std::size_t batch_index = 0;
  std::string sample_id;
  int cls = 0;
  std::string method;  // "poisson" | "cut_paste"
};

struct InjectResult {
  std::vector<Sample> batch;
  std::vector<InjectionRecord> records;
  std::vector<std::string> warnings;
};

// Replaces every defect-free sample in the batch with an injected one.
// Each injection targets the current minority class, where a class's running
// count is its mask presence in the batch plus one per injection of that
// class already performed here (injected defects weigh double in later
// argmin steps). Classes without any source sample whose labels are a subset
// of {0, class} are skipped with a warning.
InjectResult inject_batch(const std::vector<Sample>& batch,
                          const Dataset& source_dataset,
                          const InjectionConfig& config, std::uint64_t seed,
                          std::size_t batch_index = 0);

void write_injection_report(std::ostream& out,
                            const std::vector<InjectionRecord>& records);

}  // namespace segforge
