#include "segforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "segforge/errors.hpp"
#include "segforge/png_io.hpp"
#include "segforge/rng.hpp"

namespace segforge {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::string> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

Sample load_pair(const std::filesystem::path& root, const std::string& id,
                 int num_classes) {
  const auto image_path = root / (id + ".png");
  const auto mask_path = root / (id + "_mask.png");
  if (!std::filesystem::exists(mask_path)) {
    throw DataError("missing mask for image '" + id + "'");
  }
  Sample sample;
  sample.id = id;
  sample.image = read_png(image_path);
  sample.mask = read_mask_png(mask_path);
  if (!sample.dims_match()) {
    throw DataError("dimension mismatch between image and mask for '" + id +
                    "'");
  }
  const int max_label = sample.mask.max_label();
  if (max_label > num_classes) {
    throw DataError("label out of range in '" + id + "': " +
                    std::to_string(max_label) + " > " +
                    std::to_string(num_classes));
  }
  return sample;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& root, int num_classes,
                     const std::filesystem::path& manifest) {
  if (!std::filesystem::is_directory(root)) {
    throw IoError("dataset root is not a directory: " + root.string());
  }
  std::vector<std::string> ids;
  if (!manifest.empty()) {
    ids = read_manifest(manifest);
  } else {
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (!ends_with(name, ".png") || ends_with(name, "_mask.png")) continue;
      ids.push_back(name.substr(0, name.size() - 4));
    }
    std::sort(ids.begin(), ids.end());
  }
  Dataset dataset;
  dataset.reserve(ids.size());
  for (const auto& id : ids) {
    dataset.push_back(load_pair(root, id, num_classes));
  }
  return dataset;
}

void save_sample(const std::filesystem::path& root, const Sample& sample) {
  std::filesystem::create_directories(root);
  write_png(root / (sample.id + ".png"), sample.image);
  write_mask_png(root / (sample.id + "_mask.png"), sample.mask);
}

void save_dataset(const std::filesystem::path& root, const Dataset& dataset) {
  for (const Sample& sample : dataset) save_sample(root, sample);
}

std::size_t ClassDistribution::total() const {
  std::size_t sum = 0;
  for (const auto& [label, count] : counts) sum += count;
  return sum;
}

std::size_t ClassDistribution::count(int label) const {
  auto it = counts.find(label);
  return it == counts.end() ? 0 : it->second;
}

double ClassDistribution::proportion(int label) const {
  const std::size_t sum = total();
  if (sum == 0) return 0.0;
  return static_cast<double>(count(label)) / static_cast<double>(sum);
}

ClassDistribution class_distribution(const Dataset& dataset) {
  ClassDistribution dist;
  for (const Sample& sample : dataset) {
    for (int label : sample.mask.label_set()) {
      if (label == 0) continue;
      ++dist.counts[label];
    }
  }
  return dist;
}

DatasetSplit split_dataset(const Dataset& dataset, SplitFractions fractions,
                           std::uint64_t seed) {
  if (dataset.empty()) throw DataError("split_dataset: empty dataset");
  if (fractions.train <= 0 || fractions.val <= 0 || fractions.test <= 0) {
    throw DataError("split_dataset: fractions must be positive");
  }
  const double sum = fractions.train + fractions.val + fractions.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DataError("split_dataset: fractions must sum to 1");
  }

  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(mix_seed(seed, "split_dataset"));
  for (std::size_t i = n; i > 1; --i) {  // Fisher-Yates
    const std::size_t j = rng.next_below(i);
    std::swap(order[i - 1], order[j]);
  }

  // Floor each share (with a tiny guard against FP droop); remainder -> train.
  auto share = [n](double f) {
    return static_cast<std::size_t>(
        std::floor(f * static_cast<double>(n) + 1e-9));
  };
  const std::size_t n_val = share(fractions.val);
  const std::size_t n_test = share(fractions.test);
  std::size_t n_train = share(fractions.train);
  n_train += n - (n_train + n_val + n_test);

  DatasetSplit split;
  split.train.reserve(n_train);
  split.val.reserve(n_val);
  split.test.reserve(n_test);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = dataset[order[i]];
    if (i < n_train) {
      split.train.push_back(s);
    } else if (i < n_train + n_val) {
      split.val.push_back(s);
    } else {
      split.test.push_back(s);
    }
  }
  return split;
}

CIWTable normalize_ciw(const std::map<int, double>& raw) {
  if (raw.empty()) throw DataError("normalize_ciw: empty weight table");
  double max_weight = 0.0;
  for (const auto& [label, weight] : raw) {
    if (weight <= 0.0) {
      throw DataError("normalize_ciw: non-positive weight for label " +
                      std::to_string(label));
    }
    max_weight = std::max(max_weight, weight);
  }
  CIWTable table;
  for (const auto& [label, weight] : raw) {
    table.weights[label] = weight / max_weight;
  }
  return table;
}

const CIWTable& default_ciw() {
  static const CIWTable table = normalize_ciw({{1, 1.0000},
                                               {2, 1.0000},
                                               {3, 1.0000},
                                               {4, 0.1622},
                                               {5, 0.7100},
                                               {6, 0.3518},
                                               {7, 0.6419},
                                               {8, 0.5419}});
  return table;
}

const std::map<int, std::string>& defect_class_names() {
  static const std::map<int, std::string> names = {
      {0, "Background"},  {1, "Cracks"},        {2, "Holes"},
      {3, "Roots"},       {4, "Deformation"},   {5, "Fracture"},
      {6, "Erosion"},     {7, "JointProblems"}, {8, "LooseGasket"}};
  return names;
}

}  // namespace segforge
