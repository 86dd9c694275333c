#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "npmix/kernels.hpp"
#include "npmix/sample.hpp"

namespace npmix::testing {

// Gaussian AR(1) rows (rho = 0.5) with monotone dropout: after each time a
// row leaves with probability `drop`. Every dropout time in 1..d is forced
// to occur at least once.
ObservedSample random_monotone_sample(std::size_t n, std::size_t d, std::uint64_t seed,
                                      double drop = 0.3);

// Independent cellwise missingness with probability `missing`; the complete
// pattern 1_d is forced to occur at least twice.
ObservedSample random_nonmonotone_sample(std::size_t n, std::size_t d, std::uint64_t seed,
                                         double missing = 0.3);

// d = 2 correlated Gaussian data with patterns 11, 10, 01, 00 present.
ObservedSample four_pattern_sample(std::size_t n, std::uint64_t seed);

BandwidthVector gaussian_kernels(std::vector<double> h);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace npmix::testing
