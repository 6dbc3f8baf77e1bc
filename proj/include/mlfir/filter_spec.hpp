#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mlfir {

/// Raised for malformed or inconsistent filter specifications.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The four linear-phase symmetry/parity classes.
enum class FilterType { I, II, III, IV };

std::string_view to_string(FilterType type);
FilterType parse_filter_type(std::string_view text);

/// A frequency band with constant lower/upper bounds on the zero-phase response.
/// Edges are fractions of pi; they are multiplied by pi only when a
/// trigonometric function is evaluated.
struct Band {
  double from_pi = 0.0;
  double to_pi = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double omega_pi) const { return omega_pi >= from_pi && omega_pi <= to_pi; }
  double width() const { return to_pi - from_pi; }
};

struct GainMode {
  enum class Kind { Fixed, Variable };

  Kind kind = Kind::Fixed;
  double lo = 1.0;
  double hi = 1.0;

  static GainMode fixed(double value = 1.0) { return {Kind::Fixed, value, value}; }
  static GainMode variable(double lo = 2.0 / 3.0, double hi = 4.0 / 3.0) {
    return {Kind::Variable, lo, hi};
  }

  bool is_fixed() const { return kind == Kind::Fixed; }
  double value() const { return lo; }
  bool contains(double g) const { return g >= lo && g <= hi; }
};

/// Largest supported effective word length; node values and shifted
/// intermediates must fit in 64-bit integers.
inline constexpr int kMaxWordLength = 24;

struct FilterSpec {
  std::vector<Band> bands;
  int order = 0;  // N
  FilterType type = FilterType::I;
  int wordlength = 8;  // B, sign bit excluded
  GainMode gain = GainMode::variable();
  // Error allowance: bounds are widened by this much while designing, and the
  // result is reported against the original bounds.
  double allow_error = 0.0;

  /// Number of independent coefficients M.
  int coefficient_count() const;
  /// Largest admissible coefficient magnitude, 2^B - 1.
  std::int64_t max_magnitude() const { return (std::int64_t{1} << wordlength) - 1; }
  /// 2^B, the integer scaling of the coefficients.
  double scale() const { return static_cast<double>(std::int64_t{1} << wordlength); }

  /// Copy with every band widened by allow_error and the allowance cleared.
  FilterSpec widened() const;

  /// Throws SpecError on any violated invariant.
  void check() const;
};

int coefficient_count(FilterType type, int order);

/// Trigonometric basis c_m(omega) of the zero-phase response.
/// Throws std::out_of_range when m is negative.
double basis_eval(FilterType type, int m, double omega);

/// Integer-scaled zero-phase response sum_m h_m c_m(omega).
double zero_phase_response(std::span<const std::int64_t> coefficients, FilterType type,
                           double omega);

/// Structural (tap-summation) adders for a coefficient zero pattern.
int structural_adder_count(FilterType type, int order, const std::vector<bool>& zero_flags);
int structural_adder_count(FilterType type, int order, std::span<const std::int64_t> coefficients);

/// Published coefficient lists run from the outermost tap to the center tap;
/// the basis index runs the other way.
std::vector<std::int64_t> from_printed_order(std::span<const std::int64_t> printed);
std::vector<std::int64_t> to_printed_order(std::span<const std::int64_t> coefficients);

FilterSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const FilterSpec& spec);
FilterSpec load_spec_file(const std::string& path);

}  // namespace mlfir
