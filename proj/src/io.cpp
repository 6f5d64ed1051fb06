#include "folbm/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <vector>

namespace folbm::io {

std::string format_decimal17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(v))));
  const int decimals = std::max(0, 16 - exponent);
  // decimals can reach ~330 for denormal-scale values
  std::array<char, 400> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed,
                                 decimals);
  return std::string(buf.data(), res.ptr);
}

void write_paths_csv(std::ostream& out, const sde::PathEnsemble& ensemble,
                     const FoliatedModel& model) {
  out << "path_id,step,t";
  for (int d = 0; d < ensemble.dim; ++d) out << ",x" << (d + 1);
  out << '\n';
  for (int path = 0; path < ensemble.n_paths; ++path) {
    for (int k = 0; k < ensemble.n_records(); ++k) {
      const Vec x = wrap_periodic(model, ensemble.state(path, k));
      out << path << ',' << ensemble.steps[k] << ',' << format_decimal17(ensemble.times[k]);
      for (int d = 0; d < ensemble.dim; ++d) out << ',' << format_decimal17(x(d));
      out << '\n';
    }
  }
}

void write_density_csv(std::ostream& out, const harmonic::DensityProfile& profile) {
  out << "x,h\n";
  for (std::size_t j = 0; j < profile.grid.size(); ++j) {
    out << format_decimal17(profile.grid[j]) << ',' << format_decimal17(profile.values[j])
        << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const harmonic::OccupationHistogram& histogram) {
  const std::size_t n = histogram.bins.size();
  if (n == 2) {
    out << "bin_x,bin_y,count\n";
  } else {
    for (std::size_t d = 0; d < n; ++d) out << "bin_" << (d + 1) << ',';
    out << "count\n";
  }
  std::vector<int> idx(n, 0);
  for (std::size_t c = 0; c < histogram.counts.size(); ++c) {
    std::size_t r = c;
    for (std::size_t d = n; d-- > 0;) {
      idx[d] = static_cast<int>(r % histogram.bins[d]);
      r /= histogram.bins[d];
    }
    for (std::size_t d = 0; d < n; ++d) out << idx[d] << ',';
    out << histogram.counts[c] << '\n';
  }
}

}  // namespace folbm::io
