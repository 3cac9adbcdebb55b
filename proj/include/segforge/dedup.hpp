#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "segforge/dataset.hpp"

namespace segforge {

// 64-bit difference hash: 8x9 grayscale box-filter downsample, one bit per
// horizontal neighbor comparison. Integer arithmetic throughout so the same
// pixels hash identically on every platform.
struct HashDigest {
  std::uint64_t bits = 0;

  friend bool operator==(HashDigest a, HashDigest b) {
    return a.bits == b.bits;
  }
};

HashDigest hash_image(const ImageBuffer& image);

// popcount(d1 XOR d2), in [0, 64].
int hamming(HashDigest a, HashDigest b);

struct RemovalRecord {
  std::string id;
  std::string nearest_id;  // offending test (or retained train) sample
  int distance = 0;
};

struct DedupResult {
  Dataset filtered_train;
  std::vector<RemovalRecord> removed;
};

// Drops every train sample whose minimum Hamming distance to any test sample
// is <= threshold. With intra_train, train samples too close to an earlier
// retained train sample are dropped as well (first in id order wins). The
// test set is never modified.
DedupResult dedup_filter(const Dataset& train, const Dataset& test,
                         int threshold, bool intra_train = false);

// CSV: id,nearest_test_id,distance
void write_removal_report(std::ostream& out,
                          const std::vector<RemovalRecord>& removed);

}  // namespace segforge
