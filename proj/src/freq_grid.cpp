#include "mlfir/freq_grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace mlfir {

namespace {

std::vector<GridPoint> merge_points(const FilterSpec& spec, std::vector<double> omegas_pi) {
  std::sort(omegas_pi.begin(), omegas_pi.end());
  omegas_pi.erase(std::unique(omegas_pi.begin(), omegas_pi.end()), omegas_pi.end());
  std::vector<GridPoint> points;
  points.reserve(omegas_pi.size());
  for (double w : omegas_pi) points.push_back(point_for(spec, w));
  return points;
}

std::vector<double> band_edges(const FilterSpec& spec) {
  std::vector<double> edges;
  for (const Band& b : spec.bands) {
    edges.push_back(b.from_pi);
    edges.push_back(b.to_pi);
  }
  return edges;
}

}  // namespace

GridPoint point_for(const FilterSpec& spec, double omega_pi) {
  GridPoint p{omega_pi, 0.0, 0.0, -1};
  for (std::size_t i = 0; i < spec.bands.size(); ++i) {
    const Band& b = spec.bands[i];
    if (!b.contains(omega_pi)) continue;
    if (p.band < 0) {
      p.band = static_cast<int>(i);
      p.lower = b.lower;
      p.upper = b.upper;
    } else {
      p.lower = std::max(p.lower, b.lower);
      p.upper = std::min(p.upper, b.upper);
    }
  }
  if (p.band < 0) {
    std::ostringstream msg;
    msg << "frequency " << omega_pi << "*pi lies outside every band";
    throw SpecError(msg.str());
  }
  return p;
}

FrequencyGrid FrequencyGrid::from_frequencies(const FilterSpec& spec, std::vector<double> omegas_pi) {
  FrequencyGrid grid;
  grid.points_ = merge_points(spec, std::move(omegas_pi));
  return grid;
}

bool FrequencyGrid::contains(double omega_pi) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), omega_pi,
                             [](const GridPoint& p, double w) { return p.omega_pi < w; });
  return it != points_.end() && it->omega_pi == omega_pi;
}

std::string FrequencyGrid::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "omega_over_pi,lower,upper,band\n";
  for (const GridPoint& p : points_)
    out << p.omega_pi << ',' << p.lower << ',' << p.upper << ',' << p.band << '\n';
  return out.str();
}

FrequencyGrid uniform_grid(const FilterSpec& spec, std::size_t size) {
  if (size < spec.bands.size())
    throw SpecError("grid size " + std::to_string(size) + " is smaller than the number of bands");
  double total_width = 0.0;
  for (const Band& b : spec.bands) total_width += b.width();

  std::vector<double> omegas;
  omegas.reserve(size + 2 * spec.bands.size());
  for (const Band& b : spec.bands) {
    if (b.width() <= 0.0 || total_width <= 0.0) {
      omegas.push_back(b.from_pi);
      continue;
    }
    const auto share = static_cast<std::size_t>(std::llround(static_cast<double>(size) * b.width() / total_width));
    const std::size_t n = std::max<std::size_t>(2, share);
    const double step = b.width() / static_cast<double>(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) omegas.push_back(b.from_pi + static_cast<double>(k) * step);
    omegas.push_back(b.to_pi);
  }
  return FrequencyGrid::from_frequencies(spec, std::move(omegas));
}

AfpGrid afp_grid(const FilterSpec& spec, std::size_t target, int candidate_factor, bool force_edges) {
  if (target < 1) throw SpecError("AFP target must be positive");
  if (candidate_factor < 1) throw SpecError("AFP candidate factor must be positive");

  const FrequencyGrid candidates = uniform_grid(spec, target * static_cast<std::size_t>(candidate_factor));
  const auto n = static_cast<Eigen::Index>(candidates.size());
  const auto t = static_cast<Eigen::Index>(target);

  auto fallback = [&] { return AfpGrid{uniform_grid(spec, std::max(target, spec.bands.size())), true}; };
  if (n < t) return fallback();

  // Columns are candidate points; pivoting picks the columns that greedily
  // maximize the spanned volume.
  Eigen::MatrixXd vt(t, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double omega = candidates[static_cast<std::size_t>(i)].omega();
    for (Eigen::Index m = 0; m < t; ++m) vt(m, i) = basis_eval(spec.type, static_cast<int>(m), omega);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vt);
  if (qr.rank() < t) return fallback();

  std::vector<double> selected;
  selected.reserve(target + 2 * spec.bands.size());
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index k = 0; k < t; ++k) selected.push_back(candidates[static_cast<std::size_t>(perm[k])].omega_pi);
  if (force_edges) {
    for (double e : band_edges(spec)) selected.push_back(e);
  }
  return AfpGrid{FrequencyGrid::from_frequencies(spec, std::move(selected)), false};
}

FrequencyGrid refine(const FrequencyGrid& grid, const FilterSpec& spec, std::span<const NewPoint> additions) {
  std::vector<double> omegas;
  omegas.reserve(grid.size() + additions.size());
  for (const GridPoint& p : grid.points()) omegas.push_back(p.omega_pi);
  for (const NewPoint& np : additions) {
    if (np.band < 0 || static_cast<std::size_t>(np.band) >= spec.bands.size() ||
        !spec.bands[static_cast<std::size_t>(np.band)].contains(np.omega_pi)) {
      std::ostringstream msg;
      msg << "refinement point " << np.omega_pi << "*pi is not inside band " << np.band;
      throw SpecError(msg.str());
    }
    omegas.push_back(np.omega_pi);
  }
  return FrequencyGrid::from_frequencies(spec, std::move(omegas));
}

}  // namespace mlfir
