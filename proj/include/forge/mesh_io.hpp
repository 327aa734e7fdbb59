#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "forge/immersion.hpp"

namespace forge {

/// CSV with header u1..uk,x1,y1,..,xn,yn (plus Hx1,Hy1,.. when requested),
/// %.17g floats, LF line endings. Grid is cell-centred over the chart domain.
/// Mean curvature columns need every grid point at least 2h inside the domain.
void export_mesh(const Chart& chart, std::span<const std::size_t> grid, const std::filesystem::path& file,
                 bool with_mean_curvature = false, const JetOptions& jet_options = {});

/// Writes rows of equal-length numeric vectors under the given header.
void write_csv(const std::filesystem::path& file, std::span<const std::string> header,
               std::span<const std::vector<double>> rows);

std::string format_double(double v);

}  // namespace forge
