#include <complex>
#include <numbers>
#include <random>

#include <doctest.h>

#include "mlfir/benchmarks.hpp"
#include "mlfir/filter_spec.hpp"

using namespace mlfir;

namespace {

// Full impulse response from the independent coefficients (index 0 = center).
std::vector<double> impulse_response(FilterType type, int order, const std::vector<std::int64_t>& h) {
  std::vector<double> taps(static_cast<std::size_t>(order) + 1, 0.0);
  const int M = static_cast<int>(h.size());
  for (int m = 0; m < M; ++m) {
    const double v = static_cast<double>(h[static_cast<std::size_t>(m)]);
    switch (type) {
      case FilterType::I:
        taps[static_cast<std::size_t>(order / 2 - m)] = v;
        taps[static_cast<std::size_t>(order / 2 + m)] = v;
        break;
      case FilterType::II:
        taps[static_cast<std::size_t>((order - 1) / 2 - m)] = v;
        taps[static_cast<std::size_t>((order + 1) / 2 + m)] = v;
        break;
      case FilterType::III:
        taps[static_cast<std::size_t>(order / 2 - (m + 1))] = v;
        taps[static_cast<std::size_t>(order / 2 + m + 1)] = -v;
        break;
      case FilterType::IV:
        taps[static_cast<std::size_t>((order - 1) / 2 - m)] = v;
        taps[static_cast<std::size_t>((order + 1) / 2 + m)] = -v;
        break;
    }
  }
  return taps;
}

// Zero-phase response through the complex DTFT: H(w) e^{jwN/2} is real for
// symmetric filters and purely imaginary for antisymmetric ones.
double dtft_zero_phase(FilterType type, const std::vector<double>& taps, double omega) {
  using namespace std::complex_literals;
  std::complex<double> H = 0.0;
  for (std::size_t n = 0; n < taps.size(); ++n) H += taps[n] * std::exp(-1i * omega * static_cast<double>(n));
  const double order = static_cast<double>(taps.size() - 1);
  const std::complex<double> rotated = H * std::exp(1i * omega * order / 2.0);
  return (type == FilterType::I || type == FilterType::II) ? rotated.real() : rotated.imag();
}

}  // namespace

TEST_CASE("coefficient counts per type") {
  CHECK(coefficient_count(FilterType::I, 24) == 13);
  CHECK(coefficient_count(FilterType::II, 23) == 12);
  CHECK(coefficient_count(FilterType::III, 24) == 12);
  CHECK(coefficient_count(FilterType::IV, 23) == 12);
  CHECK(coefficient_count(FilterType::II, 35) == 18);
}

TEST_CASE("zero-phase response agrees with the complex DTFT") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coeff(-255, 255);
  const std::pair<FilterType, int> cases[] = {
      {FilterType::I, 24}, {FilterType::II, 23}, {FilterType::III, 18}, {FilterType::IV, 15}, {FilterType::I, 2}};
  for (const auto& [type, order] : cases) {
    std::vector<std::int64_t> h(static_cast<std::size_t>(coefficient_count(type, order)));
    for (auto& v : h) v = coeff(rng);
    const auto taps = impulse_response(type, order, h);
    for (int k = 0; k <= 50; ++k) {
      const double w = std::numbers::pi * k / 50.0;
      CHECK(zero_phase_response(h, type, w) == doctest::Approx(dtft_zero_phase(type, taps, w)).epsilon(1e-9));
    }
  }
}

TEST_CASE("response is linear in the coefficients") {
  const std::vector<std::int64_t> a{3, -1, 4, 1, -5};
  const std::vector<std::int64_t> b{2, 7, -1, 8, 2};
  std::vector<std::int64_t> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = 3 * a[i] - 2 * b[i];
  for (FilterType t : {FilterType::I, FilterType::II, FilterType::III, FilterType::IV}) {
    for (double w : {0.0, 0.3, 1.1, 2.9}) {
      const double lhs = zero_phase_response(c, t, w);
      const double rhs = 3 * zero_phase_response(a, t, w) - 2 * zero_phase_response(b, t, w);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("basis values") {
  CHECK(basis_eval(FilterType::I, 0, 1.234) == 1.0);
  CHECK(basis_eval(FilterType::I, 3, 0.0) == 2.0);
  CHECK(basis_eval(FilterType::II, 0, std::numbers::pi) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(basis_eval(FilterType::IV, 2, 0.0) == 0.0);
  CHECK_THROWS_AS(basis_eval(FilterType::I, -1, 0.0), std::out_of_range);
}

TEST_CASE("structural adders match the tap count of the transposed form") {
  // Tap-summation adders: one per nonzero tap past the first.
  std::mt19937 rng(11);
  std::bernoulli_distribution zero(0.3);
  const std::pair<FilterType, int> cases[] = {{FilterType::I, 24}, {FilterType::II, 23}, {FilterType::IV, 17}};
  for (const auto& [type, order] : cases) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::int64_t> h(static_cast<std::size_t>(coefficient_count(type, order)));
      for (auto& v : h) v = zero(rng) ? 0 : 1;
      h.back() = 1;
      const auto taps = impulse_response(type, order, h);
      int nonzero = 0;
      for (double t : taps) nonzero += t != 0.0;
      CHECK(structural_adder_count(type, order, std::span<const std::int64_t>(h)) == nonzero - 1);
    }
  }
}

TEST_CASE("structural adders without zeros equal the order") {
  for (FilterType t : {FilterType::I, FilterType::II, FilterType::III, FilterType::IV}) {
    const int order = (t == FilterType::I || t == FilterType::III) ? 20 : 21;
    CHECK(structural_adder_count(t, order, std::vector<bool>(static_cast<std::size_t>(coefficient_count(t, order)))) ==
          order);
  }
  // Table values: S1c type I N=24 has two zero side coefficients.
  const std::vector<std::int64_t> s1c{1, 2, 0, -4, -3, 6, 11, 0, -21, -18, 29, 96, 128};
  CHECK(structural_adder_count(FilterType::I, 24, std::span<const std::int64_t>(from_printed_order(s1c))) == 20);
}

TEST_CASE("published structural counts") {
  for (const PublishedRow& row : published_rows()) {
    CAPTURE(row.name);
    CAPTURE(row.gain);
    const auto h = from_printed_order(row.printed);
    if (!row.complete()) {
      // The one row printed with a tap missing.
      CHECK(row.name == "S2b");
      CHECK(row.source == "sy11a");
      CHECK(static_cast<int>(h.size()) + 1 == coefficient_count(row.type, row.order));
      continue;
    }
    CHECK(structural_adder_count(row.type, row.order, std::span<const std::int64_t>(h)) == row.structural_adders);
  }
}

TEST_CASE("printed order round trip") {
  const std::vector<std::int64_t> printed{1, 2, 3};
  const auto h = from_printed_order(printed);
  CHECK(h == std::vector<std::int64_t>{3, 2, 1});
  CHECK(to_printed_order(h) == printed);
}

TEST_CASE("spec JSON round trip and validation") {
  FilterSpec s;
  s.bands = find_benchmark("L3").bands;
  s.order = 35;
  s.type = FilterType::II;
  s.wordlength = 8;
  s.gain = GainMode::variable(4.0 / 3.0, 8.0 / 3.0);
  s.allow_error = 0.00213;
  const FilterSpec back = spec_from_json(spec_to_json(s));
  CHECK(back.order == 35);
  CHECK(back.type == FilterType::II);
  CHECK(back.gain.lo == s.gain.lo);
  CHECK(back.gain.hi == s.gain.hi);
  CHECK(back.allow_error == s.allow_error);
  REQUIRE(back.bands.size() == 4);
  CHECK(back.bands[3].lower == -0.0316);

  auto doc = spec_to_json(s);
  doc["order"] = 34;
  CHECK_THROWS_AS(spec_from_json(doc), SpecError);
  doc["order"] = 35;
  doc["bands"][0]["lower"] = 2.0;
  CHECK_THROWS_AS(spec_from_json(doc), SpecError);
  doc.erase("bands");
  CHECK_THROWS_AS(spec_from_json(doc), SpecError);
}

TEST_CASE("widened spec") {
  FilterSpec s;
  s.bands = {{0.0, 0.3, 0.99, 1.01}, {0.5, 1.0, -0.01, 0.01}};
  s.order = 10;
  s.allow_error = 0.001;
  const FilterSpec w = s.widened();
  CHECK(w.allow_error == 0.0);
  CHECK(w.bands[0].lower == doctest::Approx(0.989));
  CHECK(w.bands[1].upper == doctest::Approx(0.011));
}

TEST_CASE("benchmark library") {
  CHECK(benchmarks().size() == 8);
  const auto s1c = find_benchmark("S1c");
  CHECK(s1c.bands[0].lower == doctest::Approx(1 - 0.0157));
  CHECK(s1c.bands[1].upper == doctest::Approx(0.0066));
  const auto l1 = find_benchmark("L1");
  CHECK(l1.bands[0].to_pi == 0.74);
  CHECK(l1.bands[1].from_pi == 0.8);
  const auto r = find_benchmark("redmill:20");
  CHECK(r.bands[1].upper == doctest::Approx(0.1));
  CHECK_THROWS_AS(find_benchmark("S9"), SpecError);
  CHECK_THROWS_AS(find_benchmark("redmill:x"), SpecError);

  const GainMode oct = gain_octave(2.10468);
  CHECK(oct.lo == doctest::Approx(4.0 / 3.0));
  CHECK(oct.hi == doctest::Approx(8.0 / 3.0));
  CHECK(gain_octave(1.0).lo == doctest::Approx(2.0 / 3.0));
  CHECK(gain_octave(10.5).contains(10.5));
}
