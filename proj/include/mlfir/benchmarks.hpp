#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlfir/filter_spec.hpp"

namespace mlfir {

/// A named reference specification: bands only. Order, type, word length and
/// gain are chosen per run.
struct BenchmarkSpec {
  std::string name;
  std::vector<Band> bands;
  std::string provenance;
};

/// S1a, S1b, S1c, S2a, S2b, L1, L2, L3.
const std::vector<BenchmarkSpec>& benchmarks();

/// Looks up a reference specification; "redmill:P" builds the Redmill
/// low-pass for a ripple parameter of P dB. Throws SpecError when unknown.
BenchmarkSpec find_benchmark(const std::string& name);

/// delta = 10^(-p/20) on [0, 0.3] pass / [0.5, 1] stop.
BenchmarkSpec redmill(double p_db);

/// The Redmill experiment setup: type I, B = 9, G fixed at 1.
FilterSpec redmill_spec(double p_db, int order);

/// A published result row (coefficients in printed order, outer tap first).
struct PublishedRow {
  std::string name;
  std::string source;  // "ours" or a citation key
  int order = 0;
  FilterType type = FilterType::I;
  int multiplier_adders = 0;  // A_M
  int structural_adders = 0;  // A_S
  int total_adders = 0;  // A
  int depth = 0;  // AD
  double gain = 1.0;
  int wordlength = 0;
  double error = 0.0;
  std::vector<std::int64_t> printed;

  bool ours() const { return source == "ours"; }
  /// False when the printed list is short of the coefficient count.
  bool complete() const;
  /// Spec for this row with the printed gain fixed.
  FilterSpec spec() const;
  /// Like spec(), but with the order implied by the printed list length.
  FilterSpec as_printed() const;
};

const std::vector<PublishedRow>& published_rows();

/// Gain interval [2^k 2/3, 2^k 4/3] holding g.
GainMode gain_octave(double g);

}  // namespace mlfir
