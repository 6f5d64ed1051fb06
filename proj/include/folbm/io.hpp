#pragma once

// CSV and text serialization. Numbers are written in plain decimal notation
// with 17 significant digits, which round-trips every double; column order
// and headers are fixed.

#include "folbm/harmonic.hpp"
#include "folbm/model.hpp"
#include "folbm/sde.hpp"

#include <iosfwd>
#include <string>

namespace folbm::io {

[[nodiscard]] std::string format_decimal17(double v);

/// path_id,step,t,x1..xn with periodic coordinates wrapped into [0, 2pi).
void write_paths_csv(std::ostream& out, const sde::PathEnsemble& ensemble,
                     const FoliatedModel& model);

/// x,h
void write_density_csv(std::ostream& out, const harmonic::DensityProfile& profile);

/// bin_x,bin_y,count for planar histograms; bin_1..bin_n,count otherwise.
void write_histogram_csv(std::ostream& out, const harmonic::OccupationHistogram& histogram);

}  // namespace folbm::io
