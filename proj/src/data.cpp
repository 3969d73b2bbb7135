#include "ctcnn/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <system_error>

#include "ctcnn/ctt.hpp"
#include "ctcnn/error.hpp"
#include "ctcnn/image.hpp"
#include "ctcnn/random.hpp"

namespace fs = std::filesystem;

namespace ctcnn {

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::any_of(std::begin(kImageExtensions), std::end(kImageExtensions),
                     [&](const char* e) { return ext == e; });
}

// Byte-wise comparison of UTF-8 strings is code-point order.
bool code_point_less(const std::string& a, const std::string& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](char x, char y) {
                                        return static_cast<unsigned char>(x) <
                                               static_cast<unsigned char>(y);
                                      });
}

}  // namespace

std::size_t ClassIndex::id_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw IndexError("unknown class '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

namespace {

bool is_split_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return name == "train" || name == "test" || name == "valid" || name == "validation" || name == "val";
}

std::vector<std::string> subdirectories(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end(), code_point_less);
  return out;
}

}  // namespace

DatasetListing scan_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DatasetError("dataset root is not a directory: " + root.string());

  // Class name -> directories holding its files. A root made only of
  // train/test/valid folders is pooled; class folder names there are cut at
  // the first '_' ("adenocarcinoma_left.lower.lobe_T2_N0_M0_Ib").
  std::vector<std::pair<std::string, std::vector<fs::path>>> classes;
  auto add_dir = [&](const std::string& name, const fs::path& dir) {
    auto it = std::find_if(classes.begin(), classes.end(), [&](const auto& c) { return c.first == name; });
    if (it == classes.end()) {
      classes.push_back({name, {dir}});
    } else {
      it->second.push_back(dir);
    }
  };

  const auto top = subdirectories(root);
  const bool pooled = !top.empty() && std::all_of(top.begin(), top.end(), is_split_name);
  for (const auto& name : top) {
    if (!pooled) {
      add_dir(name, root / name);
      continue;
    }
    for (const auto& cls : subdirectories(root / name)) add_dir(cls.substr(0, cls.find('_')), root / name / cls);
  }
  if (classes.empty()) throw DatasetError("dataset root has no class directories: " + root.string());
  if (classes.size() < 2) {
    throw DatasetError("dataset needs at least 2 classes, found 1 in " + root.string());
  }
  std::sort(classes.begin(), classes.end(),
            [](const auto& a, const auto& b) { return code_point_less(a.first, b.first); });

  DatasetListing out;
  for (std::size_t label = 0; label < classes.size(); ++label) {
    const auto& [name, dirs] = classes[label];
    out.classes.names.push_back(name);
    std::vector<fs::path> files;
    for (const auto& dir : dirs) {
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return code_point_less(a.string(), b.string()); });
    if (files.empty()) out.warnings.push_back("class '" + name + "' has no image files");
    for (const auto& p : files) {
      if (!std::ifstream(p, std::ios::binary)) throw DatasetError("unreadable file: " + p.string());
      out.entries.push_back({p, label});
    }
  }
  return out;
}

DatasetSplit split_dataset(const std::vector<DatasetEntry>& entries, double ratio,
                           std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split ratio must lie in (0, 1), got " + std::to_string(ratio));
  }
  if (entries.size() < 2) throw ConfigError("cannot split fewer than 2 entries");

  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::derive(seed, 1);
  rng.shuffle(order);

  // The epsilon keeps products such as 0.29 * 100 = 28.999999999999996 on the
  // intended side of the floor.
  const auto n_train = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(entries.size()) + 1e-9));
  DatasetSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_train ? split.train : split.val).push_back(entries[order[i]]);
  return split;
}

std::vector<Sample> load_samples(const std::vector<DatasetEntry>& entries, std::size_t size) {
  std::vector<Sample> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back({load_image(e.path, size), e.label, e.path});
  return out;
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t count, std::size_t batch_size,
                                                   std::uint64_t seed, std::size_t epoch) {
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::derive(seed, (std::uint64_t{1} << 32) + epoch);
  rng.shuffle(order);

  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < count; start += batch_size) {
    const std::size_t end = std::min(count, start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

std::size_t synth_dataset(const fs::path& out_dir, std::size_t per_class, std::uint64_t seed,
                          std::size_t size) {
  if (per_class == 0) throw ConfigError("synth: per-class count must be at least 1");
  if (size < 8) throw ConfigError("synth: image size must be at least 8");

  const double extent = static_cast<double>(size);
  const double sigma = extent / 10.0;
  const double jitter = extent / 16.0;
  std::size_t written = 0;
  for (std::size_t c = 0; c < std::size(kSynthClasses); ++c) {
    const fs::path dir = out_dir / kSynthClasses[c];
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw FilesystemError("cannot create directory " + dir.string());

    const double base_row = ((c / 2) * 0.5 + 0.25) * extent;
    const double base_col = ((c % 2) * 0.5 + 0.25) * extent;
    for (std::size_t n = 0; n < per_class; ++n) {
      Rng rng = Rng::derive(seed, c * 1000003 + n);
      const double row0 = base_row + rng.uniform(-jitter, jitter);
      const double col0 = base_col + rng.uniform(-jitter, jitter);
      Tensor img({size, size, 3});
      for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
          const double dr = static_cast<double>(i) - row0, dc = static_cast<double>(j) - col0;
          const double blob = 0.7 * std::exp(-(dr * dr + dc * dc) / (2 * sigma * sigma));
          for (std::size_t k = 0; k < 3; ++k) {
            const double v = 0.15 + blob + rng.uniform(-0.1, 0.1);
            img.at(i, j, k) = static_cast<float>(std::clamp(v, 0.0, 1.0));
          }
        }
      }
      char name[32];
      std::snprintf(name, sizeof name, "sample_%04zu.ctt", n);
      write_ctt(dir / name, img);
      ++written;
    }
  }
  return written;
}

}  // namespace ctcnn
