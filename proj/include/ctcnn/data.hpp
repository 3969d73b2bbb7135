#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctcnn/tensor.hpp"

namespace ctcnn {

// Class names in code-point order; the position is the label id.
struct ClassIndex {
  std::vector<std::string> names;

  std::size_t size() const { return names.size(); }
  // IndexError if the name is unknown.
  std::size_t id_of(const std::string& name) const;
};

struct DatasetEntry {
  std::filesystem::path path;
  std::size_t label = 0;

  bool operator==(const DatasetEntry&) const = default;
};

struct DatasetListing {
  ClassIndex classes;
  std::vector<DatasetEntry> entries;  // class order, then file name order
  std::vector<std::string> warnings;  // e.g. classes without files
};

inline constexpr const char* kImageExtensions[] = {".png", ".jpg", ".jpeg", ".ctt"};

// root/<class>/<file>.{png,jpg,jpeg,ctt}. DatasetError if root is missing or
// has fewer than two class directories; empty classes only produce a warning.
// A root holding only train/test/valid folders is pooled into one listing,
// with class folder names cut at the first '_'.
DatasetListing scan_dataset(const std::filesystem::path& root);

struct DatasetSplit {
  std::vector<DatasetEntry> train;
  std::vector<DatasetEntry> val;
  std::uint64_t seed = 0;
};

// Seeded shuffle of the listing, then floor(ratio * N) entries to train and
// the rest to val. ConfigError unless 0 < ratio < 1 and N >= 2.
DatasetSplit split_dataset(const std::vector<DatasetEntry>& entries, double ratio,
                           std::uint64_t seed);

struct Sample {
  Tensor image;  // size x size x 3 in [0, 1]
  std::size_t label = 0;
  std::filesystem::path source;
};

std::vector<Sample> load_samples(const std::vector<DatasetEntry>& entries, std::size_t size);

// Sample indices 0..count-1 reshuffled per (seed, epoch) and cut into
// batch_size chunks; the last batch may be short.
std::vector<std::vector<std::size_t>> make_batches(std::size_t count, std::size_t batch_size,
                                                   std::uint64_t seed, std::size_t epoch);

// Class directories written by synth_dataset.
inline constexpr const char* kSynthClasses[] = {"adenocarcinoma", "large.cell.carcinoma", "normal",
                                                "squamous.cell.carcinoma"};

// Four-class CTT1 dataset of size x size x 3 images: a bright blob in a
// class-specific quadrant over seeded noise. Returns the number of files.
std::size_t synth_dataset(const std::filesystem::path& out_dir, std::size_t per_class,
                          std::uint64_t seed, std::size_t size = 64);

}  // namespace ctcnn
