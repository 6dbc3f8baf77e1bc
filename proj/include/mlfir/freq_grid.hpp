#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mlfir/filter_spec.hpp"

namespace mlfir {

struct GridPoint {
  double omega_pi = 0.0;  // frequency as a fraction of pi
  double lower = 0.0;
  double upper = 0.0;
  int band = 0;

  double omega() const { return omega_pi * std::numbers::pi; }
  bool operator==(const GridPoint&) const = default;
};

/// Sorted, duplicate-free set of design frequencies with their response bounds.
/// A point shared by two adjacent bands carries the intersection of their bounds.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;

  /// Builds a grid from arbitrary in-band frequencies (fractions of pi).
  /// Throws SpecError for a frequency outside every band.
  static FrequencyGrid from_frequencies(const FilterSpec& spec, std::vector<double> omegas_pi);

  std::span<const GridPoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const GridPoint& operator[](std::size_t i) const { return points_[i]; }
  bool contains(double omega_pi) const;

  bool operator==(const FrequencyGrid&) const = default;

  std::string to_csv() const;

 private:
  std::vector<GridPoint> points_;
};

/// Bounds that apply at a frequency: the intersection over all bands
/// containing it. Throws SpecError when no band contains it.
GridPoint point_for(const FilterSpec& spec, double omega_pi);

/// Equispaced points per band, allotted proportionally to band width.
/// Both edges of every band are always present. Throws SpecError when size is
/// smaller than the number of bands.
FrequencyGrid uniform_grid(const FilterSpec& spec, std::size_t size);

struct AfpGrid {
  FrequencyGrid grid;
  bool fell_back = false;  // rank-deficient candidate matrix, uniform grid used instead
};

/// Approximate Fekete points: greedy volume-maximizing selection of `target`
/// points from a uniform candidate grid of candidate_factor * target points,
/// realized by column-pivoted QR on the transposed basis matrix. The basis is
/// the filter type's own trigonometric family, extended to `target` terms.
AfpGrid afp_grid(const FilterSpec& spec, std::size_t target, int candidate_factor = 16,
                 bool force_edges = true);

struct NewPoint {
  double omega_pi = 0.0;
  int band = 0;
};

/// Returns a new grid with the given points merged in. Points already present
/// are ignored. Throws SpecError for a point outside its band.
FrequencyGrid refine(const FrequencyGrid& grid, const FilterSpec& spec, std::span<const NewPoint> additions);

}  // namespace mlfir
