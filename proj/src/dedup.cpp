#include "segforge/dedup.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "segforge/errors.hpp"

namespace segforge {

namespace {

constexpr int kGridRows = 8;
constexpr int kGridCols = 9;

// Mean gray value of the grid cell covering [y0,y1) x [x0,x1), exact
// integer arithmetic (rounded).
std::uint32_t cell_mean(const ImageBuffer& gray, int y0, int y1, int x0,
                        int x1) {
  std::uint64_t sum = 0;
  std::uint64_t count = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      sum += gray.at(y, x, 0);
      ++count;
    }
  }
  return static_cast<std::uint32_t>((sum + count / 2) / count);
}

}  // namespace

HashDigest hash_image(const ImageBuffer& image) {
  if (!image.valid()) throw DataError("hash_image: invalid image");
  const ImageBuffer gray = to_grayscale(image);

  // Cell boundaries split the image proportionally; degenerate dimensions
  // fall back to single-pixel cells so every cell is non-empty.
  std::uint32_t cells[kGridRows][kGridCols];
  for (int r = 0; r < kGridRows; ++r) {
    int y0 = r * gray.height / kGridRows;
    int y1 = (r + 1) * gray.height / kGridRows;
    y0 = std::min(y0, gray.height - 1);
    if (y1 <= y0) y1 = y0 + 1;
    for (int c = 0; c < kGridCols; ++c) {
      int x0 = c * gray.width / kGridCols;
      int x1 = (c + 1) * gray.width / kGridCols;
      x0 = std::min(x0, gray.width - 1);
      if (x1 <= x0) x1 = x0 + 1;
      cells[r][c] = cell_mean(gray, y0, y1, x0, x1);
    }
  }

  HashDigest digest;
  int bit = 0;
  for (int r = 0; r < kGridRows; ++r) {
    for (int c = 0; c + 1 < kGridCols; ++c) {
      if (cells[r][c] < cells[r][c + 1]) {
        digest.bits |= std::uint64_t{1} << bit;
      }
      ++bit;
    }
  }
  return digest;
}

int hamming(HashDigest a, HashDigest b) {
  return std::popcount(a.bits ^ b.bits);
}

DedupResult dedup_filter(const Dataset& train, const Dataset& test,
                         int threshold, bool intra_train) {
  if (threshold < 0 || threshold > 64) {
    throw DataError("dedup_filter: threshold must be in [0, 64]");
  }

  std::vector<HashDigest> test_digests;
  test_digests.reserve(test.size());
  for (const Sample& s : test) test_digests.push_back(hash_image(s.image));

  DedupResult result;
  std::vector<HashDigest> retained_digests;
  for (const Sample& s : train) {
    const HashDigest digest = hash_image(s.image);

    int best = std::numeric_limits<int>::max();
    std::string best_id;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const int d = hamming(digest, test_digests[i]);
      if (d < best) {
        best = d;
        best_id = test[i].id;
      }
    }
    if (intra_train) {
      for (std::size_t i = 0; i < result.filtered_train.size(); ++i) {
        const int d = hamming(digest, retained_digests[i]);
        if (d < best) {
          best = d;
          best_id = result.filtered_train[i].id;
        }
      }
    }

    if (best <= threshold && best != std::numeric_limits<int>::max()) {
      result.removed.push_back({s.id, best_id, best});
    } else {
      result.filtered_train.push_back(s);
      retained_digests.push_back(digest);
    }
  }
  return result;
}

void write_removal_report(std::ostream& out,
                          const std::vector<RemovalRecord>& removed) {
  out << "id,nearest_test_id,distance\n";
  for (const RemovalRecord& r : removed) {
    out << r.id << ',' << r.nearest_id << ',' << r.distance << '\n';
  }
}

}  // namespace segforge
