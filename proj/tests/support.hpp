#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "legmove.hpp"

namespace legmove::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("legmove_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& name = "") const { return name.empty() ? path_.string() : (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void spit(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

// Records over a small generic schema f0..f{d-1} (kind Real, no laterality).
inline Dataset make_dataset(const std::vector<std::vector<double>>& x, const std::vector<Label>& y,
                            AgeBand band = AgeBand::Unbanded) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < (x.empty() ? 0 : x[0].size()); ++j) names.push_back("f" + std::to_string(j));
  std::vector<SampleRecord> records;
  for (std::size_t i = 0; i < x.size(); ++i) {
    SampleRecord r;
    char id[16];
    std::snprintf(id, sizeof id, "S%03zu", i);
    r.infant_id = id;
    r.age_months = band == AgeBand::SixToTwelve ? 8.0 : 3.0;
    r.label = y[i];
    r.features = x[i];
    records.push_back(std::move(r));
  }
  return Dataset(FeatureSchema::from_names(std::move(names)), std::move(records), band);
}

inline TrainingSet make_training_set(const std::vector<std::vector<double>>& x, const std::vector<Label>& y,
                                     std::vector<double> w = {}) {
  TrainingSet t;
  t.x = Matrix(x.size(), x.empty() ? 0 : x[0].size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x[i].size(); ++j) t.x(i, j) = x[i][j];
  t.y = y;
  t.w = w.empty() ? std::vector<double>(x.size(), 1.0) : std::move(w);
  return t;
}

// Gaussian blobs: class AR centred at -shift, TD at +shift in every dimension.
inline Dataset blobs(std::size_t n_td, std::size_t n_ar, std::size_t dims, double shift, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> x;
  std::vector<Label> y;
  for (std::size_t i = 0; i < n_td + n_ar; ++i) {
    const bool ar = i >= n_td;
    std::vector<double> row(dims);
    for (auto& v : row) v = rng.normal(ar ? -shift : shift, 1.0);
    x.push_back(row);
    y.push_back(ar ? Label::AR : Label::TD);
  }
  return make_dataset(x, y);
}

inline ConfusionMatrix confusion(std::size_t td_correct, std::size_t td_wrong, std::size_t ar_correct,
                                 std::size_t ar_wrong) {
  return ConfusionMatrix{td_correct, td_wrong, ar_correct, ar_wrong};
}

}  // namespace legmove::testing
