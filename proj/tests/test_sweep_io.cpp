#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cqed/errors.hpp"
#include "cqed/sweep_io.hpp"

using namespace cqed;
namespace fs = std::filesystem;

namespace {

SweepResult two_by_two() {
  SweepResult r;
  r.experiment = "demo";
  r.axes = {{"x", {0.0, 1.0}}, {"y", {-1.0, 2.5}}};
  r.columns = {"a", "b"};
  r.values = {{0.1, 1.0 / 3.0}, {1e-300, -2.0}, {std::nan(""), 4.0}, {5.0, 6.0}};
  r.errors = {"", "", "low_overlap", ""};
  return r;
}

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / ("cqed_io_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("grid rows in axis order", "[io][csv]") {
  const auto text = format_sweep_csv(two_by_two());
  const auto rows = parse_csv(text);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"x", "y", "a", "b", "error"});
  CHECK(rows[1][0] == "0");
  CHECK(rows[1][1] == "-1");
  CHECK(rows[2][1] == "2.5");
  CHECK(rows[3][0] == "1");
  CHECK(rows[3][2] == "NaN");
  CHECK(rows[3][4] == "low_overlap");
  CHECK(text.find("\r\n") != std::string::npos);
}

TEST_CASE("csv round trip is exact", "[io][csv][property]") {
  std::mt19937_64 rng(GENERATE(take(10, random(0ull, 1ull << 40))));
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  SweepResult r;
  r.experiment = "random";
  r.axes = {{"p", linspace(0.0, 1.0, 3)}, {"q", {u(rng), 1e9}}, {"r", {std::exp(u(rng) / 100)}}};
  r.columns = {"v1", "v 2", "v,3"};
  for (std::size_t i = 0; i < r.cell_count(); ++i) {
    r.values.push_back({u(rng), std::pow(10.0, u(rng) / 10.0), i % 4 == 0 ? std::nan("") : -u(rng)});
    r.errors.push_back(i % 4 == 0 ? "phase_unwrap;low_overlap" : "");
  }
  const auto back = parse_sweep_csv(format_sweep_csv(r), 3);
  CHECK(back.axes == r.axes);
  CHECK(back.columns == r.columns);
  CHECK(back.errors == r.errors);
  for (std::size_t i = 0; i < r.cell_count(); ++i)
    for (std::size_t j = 0; j < r.columns.size(); ++j) {
      if (std::isnan(r.values[i][j]))
        CHECK(std::isnan(back.values[i][j]));
      else
        CHECK(back.values[i][j] == r.values[i][j]);
    }
}

TEST_CASE("quoting follows RFC 4180", "[io][csv]") {
  const auto rows = parse_csv("a,\"b,c\",\"say \"\"hi\"\"\"\r\n\"multi\r\nline\",,x\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "say \"hi\""});
  CHECK(rows[1] == std::vector<std::string>{"multi\r\nline", "", "x"});
  CHECK(parse_csv("a,b\nc,d\n").size() == 2);
}

TEST_CASE("malformed csv", "[io][csv][errors]") {
  CHECK_THROWS_AS(parse_csv("a,\"open\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,b\"c\n"), ParseError);
  CHECK_THROWS_AS(parse_sweep_csv("", 1), ParseError);
  CHECK_THROWS_AS(parse_sweep_csv("x,a\r\n0,1\r\n", 1), ParseError);
  CHECK_THROWS_AS(parse_sweep_csv("x,a,error\r\n0,zz,\r\n", 1), ParseError);
  CHECK_THROWS_AS(parse_sweep_csv("x,a,error\r\n0,1\r\n", 1), ParseError);
  CHECK_THROWS_AS(parse_sweep_csv("x,a,error\r\n0,1,\r\n", 3), ParseError);
  // rows out of grid order
  CHECK_THROWS_AS(parse_sweep_csv("x,y,a,error\r\n0,0,1,\r\n1,0,1,\r\n0,1,1,\r\n1,1,1,\r\n", 2), ParseError);
}

TEST_CASE("sha256 known answers", "[io]") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("files are written atomically and read back via the sidecar", "[io]") {
  const auto dir = scratch_dir();
  const auto csv = (dir / "demo.csv").string();
  const auto r = two_by_two();
  write_sweep_csv(r, csv);
  CHECK(slurp(csv) == format_sweep_csv(r));
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");

  CHECK(sidecar_path(csv) == (dir / "demo.meta.json").string());
  CHECK(sidecar_path("out/run") == "out/run.meta.json");
  CHECK_THROWS_AS(read_sweep_csv(csv), ParseError);

  const auto side = sweep_sidecar(r, {{"command", "demo"}});
  CHECK(side["axes"][1]["name"] == "y");
  CHECK(side["axes"][1]["count"] == 2);
  CHECK(side["manifest"]["command"] == "demo");
  write_file_atomic(sidecar_path(csv), side.dump(2));
  const auto back = read_sweep_csv(csv);
  CHECK(back.axes == r.axes);
  CHECK(back.errors == r.errors);

  CHECK_THROWS_AS(write_file_atomic((dir / "missing" / "x.csv").string(), "x"), IoError);
  CHECK_THROWS_AS(read_sweep_csv((dir / "nope.csv").string(), 1), IoError);
  fs::remove_all(dir);
}

TEST_CASE("incomplete results are refused", "[io][errors]") {
  auto r = two_by_two();
  r.values.pop_back();
  r.errors.pop_back();
  CHECK_THROWS_AS(format_sweep_csv(r), DimensionError);
}

TEST_CASE("timestamps are ISO 8601 UTC", "[io]") {
  const auto s = utc_timestamp();
  REQUIRE(s.size() == 20);
  CHECK(s[4] == '-');
  CHECK(s[10] == 'T');
  CHECK(s.back() == 'Z');
}
