#include "forge/mesh_io.hpp"

#include <cstdio>
#include <fstream>

#include "forge/errors.hpp"
#include "forge/kernels.hpp"
#include "forge/sampling.hpp"

namespace forge {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& file, std::span<const std::string> header,
               std::span<const std::vector<double>> rows) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + file.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw InputError("write_csv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  if (!out) throw InputError("I/O failure writing " + file.string());
}

void export_mesh(const Chart& chart, std::span<const std::size_t> grid, const std::filesystem::path& file,
                 bool with_mean_curvature, const JetOptions& jet_options) {
  const auto points = grid_domain(chart.domain(), grid);
  const std::size_t k = chart.dim_domain();
  const std::size_t n = chart.dim_ambient();

  std::vector<std::string> header;
  for (std::size_t i = 1; i <= k; ++i) header.push_back("u" + std::to_string(i));
  for (std::size_t j = 1; j <= n; ++j) {
    header.push_back("x" + std::to_string(j));
    header.push_back("y" + std::to_string(j));
  }
  if (with_mean_curvature) {
    for (std::size_t j = 1; j <= n; ++j) {
      header.push_back("Hx" + std::to_string(j));
      header.push_back("Hy" + std::to_string(j));
    }
  }

  const auto rows = map_indices<std::vector<double>>(points.size(), [&](std::size_t i) {
    std::vector<double> row(points[i].begin(), points[i].end());
    const ComplexVector z = chart(points[i]);
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      row.push_back(z[j].real());
      row.push_back(z[j].imag());
    }
    if (with_mean_curvature) {
      const ComplexVector h = geometry_at(jet(chart, points[i], jet_options)).mean_curvature;
      for (Eigen::Index j = 0; j < h.size(); ++j) {
        row.push_back(h[j].real());
        row.push_back(h[j].imag());
      }
    }
    return row;
  });
  write_csv(file, header, rows);
}

}  // namespace forge
