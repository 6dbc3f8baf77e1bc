#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <doctest.h>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(MLFIR_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

double field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size()));
}

std::filesystem::path write_spec(const std::string& name, const std::string& json) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << json;
  return p;
}

const char* kSmall = R"({"type": "I", "order": 8, "wordlength": 5,
  "bands": [{"from_pi": 0, "to_pi": 0.2, "lower": 0.9, "upper": 1.1},
            {"from_pi": 0.55, "to_pi": 1, "lower": -0.08, "upper": 0.08}]})";

}  // namespace

TEST_CASE("cli mcm") {
  const Run r = cli("mcm 7 23");
  CHECK(r.code == 0);
  CHECK(r.out.find("adders: 2") != std::string::npos);
  CHECK(cli("mcm 1").out.find("adders: 0") != std::string::npos);
  CHECK(cli("mcm --format dot 3").out.find("digraph") != std::string::npos);
}

TEST_CASE("cli validate reports published errors") {
  const Run r = cli(
      "validate --benchmark S1c --coeffs \"2 2 -2 -5 0 10 8 -12 -26 0 68 128\" --type II --order 23 "
      "--wordlength 8 --gain fixed:1.34717");
  CHECK(r.code == 3);
  CHECK(field(r.out, "max_violation: ") == doctest::Approx(0.00118).epsilon(0.1));
  const Run ok = cli(
      "validate --benchmark S1c --coeffs \"1 2 0 -4 -3 6 11 0 -21 -18 29 96 128\" --type I --order 24 "
      "--wordlength 8 --gain fixed:1.25615");
  CHECK(ok.code == 0);
  CHECK(field(ok.out, "max_violation: ") == 0.0);
}

TEST_CASE("cli usage errors") {
  CHECK(cli("design --benchmark NOPE --order 10").code == 1);
  CHECK(cli("validate --benchmark S1c --order 23 --type II --coeffs \"1 2\"").code == 1);
  const auto spec = write_spec("mlfir_cli_small.json", kSmall);
  CHECK(cli("design " + spec.string() + " --benchmark S1c --order 24").code == 1);
  CHECK(cli("design " + spec.string() + " --gain bogus").code == 1);
  CHECK(cli("design " + spec.string() + " --method ilp1 --ad 3").code == 1);
  CHECK(cli("frobnicate").code == 1);
}

TEST_CASE("cli design writes a bundle and sweep agrees with it") {
  const auto spec = write_spec("mlfir_cli_small.json", kSmall);
  const auto dir = std::filesystem::temp_directory_path() / "mlfir_cli_bundle";
  std::filesystem::remove_all(dir);
  const Run d = cli("design " + spec.string() + " --method ilp2 --ad 2 --out " + dir.string());
  REQUIRE(d.code == 0);
  CHECK(std::filesystem::exists(dir / "solution.json"));
  const int a = static_cast<int>(field(d.out, "  A: "));

  const Run s = cli("sweep --specs " + spec.string() + " --orders 8 --methods ilp2,ilp1 --ads 2 --jobs 2");
  REQUIRE(s.code == 0);
  std::istringstream lines(s.out);
  std::string header, row2, row1;
  std::getline(lines, header);
  std::getline(lines, row2);
  std::getline(lines, row1);
  CHECK(header == "name,N,type,B,method,AD,A_M,A_S,A,G,error,status,seconds");
  CHECK(row2.rfind("mlfir_cli_small,8,I,5,ilp2,2,", 0) == 0);
  // Column 9 is A.
  auto column = [](const std::string& row, int k) {
    std::istringstream in(row);
    std::string cell;
    for (int i = 0; i <= k; ++i) std::getline(in, cell, ',');
    return cell;
  };
  CHECK(std::stoi(column(row2, 8)) == a);
  CHECK(column(row2, 11) == "optimal");
  CHECK(std::stoi(column(row1, 8)) <= a);
  std::filesystem::remove_all(dir);
}
