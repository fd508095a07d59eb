#include <doctest.h>

#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "natcap/errors.hpp"
#include "natcap/io.hpp"

using namespace natcap;

TEST_CASE("CSV reader handles quoting and CRLF")
{
  std::istringstream in("a,b,c\r\n1,\"x,y\",\"say \"\"hi\"\"\"\r\n2,,\"multi\nline\"\n");
  const auto t = io::read_csv(in);
  REQUIRE(t.header == std::vector<std::string>{ "a", "b", "c" });
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x,y");
  CHECK(t.rows[0][2] == "say \"hi\"");
  CHECK(t.rows[1][1].empty());
  CHECK(t.rows[1][2] == "multi\nline");
  CHECK(t.column("c") == 2);
  CHECK_THROWS_AS(t.column("d"), ParseError);
}

TEST_CASE("CSV writer quotes only when needed and reads back")
{
  std::ostringstream out;
  io::CsvWriter w(out);
  w.row({ "plain", "with,comma", "with \"quote\"" });
  w.field(1.5).field(3).field("x").end_row();
  CHECK(out.str() == "plain,\"with,comma\",\"with \"\"quote\"\"\"\n1.5,3,x\n");
  std::istringstream in(out.str());
  const auto t = io::read_csv(in);
  CHECK(t.header[2] == "with \"quote\"");
  CHECK(t.rows[0][0] == "1.5");
}

TEST_CASE("format_double is shortest round-trip")
{
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(2.0) == "2");
  CHECK(io::format_double(-0.375) == "-0.375");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) / (1 + i);
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  CHECK_THROWS_AS(io::parse_double("1.5x", 7), ParseError);
  CHECK_THROWS_AS(io::parse_int("", 7), ParseError);
  CHECK(io::parse_int("-12") == -12);
}

TEST_CASE("sha256 of known content")
{
  const auto dir = std::filesystem::temp_directory_path() / "natcap_test_io";
  std::filesystem::create_directories(dir);
  io::write_text_file(dir / "abc.txt", "abc");
  CHECK(io::sha256_file(dir / "abc.txt") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  io::write_text_file(dir / "empty.txt", "");
  CHECK(io::sha256_file(dir / "empty.txt") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::read_text_file(dir / "abc.txt") == "abc");
  std::filesystem::remove_all(dir);
}
