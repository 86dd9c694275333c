#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <unistd.h>

namespace npmix::testing {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> ar1_row(std::size_t d, std::mt19937_64& gen) {
  std::normal_distribution<double> z;
  std::vector<double> x(d);
  double e = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    e = j == 0 ? z(gen) : 0.5 * e + std::sqrt(0.75) * z(gen);
    x[j] = static_cast<double>(j) + e;
  }
  return x;
}

}  // namespace

ObservedSample random_monotone_sample(std::size_t n, std::size_t d, std::uint64_t seed,
                                      double drop) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = ar1_row(d, gen);
    std::size_t T = 1;
    if (i < d) {
      T = i + 1;
    } else {
      while (T < d && u(gen) >= drop) ++T;
    }
    for (std::size_t j = T; j < d; ++j) x[j] = kNaN;
    values.insert(values.end(), x.begin(), x.end());
  }
  return ObservedSample::continuous(d, std::move(values));
}

ObservedSample random_nonmonotone_sample(std::size_t n, std::size_t d, std::uint64_t seed,
                                         double missing) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = ar1_row(d, gen);
    if (i >= 2) {
      for (auto& v : x) {
        if (u(gen) < missing) v = kNaN;
      }
    }
    values.insert(values.end(), x.begin(), x.end());
  }
  return ObservedSample::continuous(d, std::move(values));
}

ObservedSample four_pattern_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = z(gen);
    const double x2 = 1.0 + 0.8 * x1 + 0.6 * z(gen);
    constexpr double forced[] = {0.1, 0.6, 0.8, 0.95};
    const double p = i < 4 ? forced[i] : u(gen);
    // 55% complete, 20% pattern 10, 15% pattern 01, 10% pattern 00
    if (p < 0.55) {
      values.insert(values.end(), {x1, x2});
    } else if (p < 0.75) {
      values.insert(values.end(), {x1, kNaN});
    } else if (p < 0.90) {
      values.insert(values.end(), {kNaN, x2});
    } else {
      values.insert(values.end(), {kNaN, kNaN});
    }
  }
  return ObservedSample::continuous(2, std::move(values));
}

BandwidthVector gaussian_kernels(std::vector<double> h) {
  BandwidthVector k;
  for (double v : h) k.push_back(KernelSpec::gaussian(v));
  return k;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("npmix-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace npmix::testing
