#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "core/artifacts.hpp"
#include "core/config.hpp"
#include "doctest.h"

using namespace hjbtk;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path test_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "hjbtk_artifact_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("ini parsing handles sections, comments and whitespace") {
  const std::string text =
      "# leading comment\n"
      "[alpha]\n"
      "  key = value with spaces  \n"
      "; another comment\n"
      "\n"
      "num=3.5\n"
      "[beta]\n"
      "\tflag = true\n";
  const ConfigMap cfg = ConfigMap::parse(text);
  CHECK(cfg.has("alpha", "key"));
  CHECK(cfg.get_string("alpha", "key", "") == "value with spaces");
  CHECK(cfg.get_double("alpha", "num", 0.0) == 3.5);
  CHECK(cfg.get_bool("beta", "flag", false));
  CHECK_FALSE(cfg.has("alpha", "missing"));
  CHECK(cfg.get_string("gamma", "key", "fallback") == "fallback");
}

TEST_CASE("parse errors carry line numbers") {
  const std::string bad_header = "[alpha]\nkey = 1\n[broken\n";
  std::string msg = error_message([&] { ConfigMap::parse(bad_header); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("section header") != std::string::npos);

  msg = error_message([&] { ConfigMap::parse("[a]\njust some words\n"); });
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("key = value") != std::string::npos);

  msg = error_message([&] { ConfigMap::parse("[a]\n= 5\n"); });
  CHECK(msg.find("empty key") != std::string::npos);
}

TEST_CASE("typed getters convert and diagnose with section and key") {
  ConfigMap cfg = ConfigMap::parse(
      "[num]\n"
      "good = 2.5e-3\n"
      "bad = 12x\n"
      "word = pony\n"
      "int = -42\n"
      "u = 18446744073709551615\n"
      "list = 1, 2.5 , -3e2\n"
      "names = one, two ,three\n"
      "[flags]\n"
      "t1 = true\nt2 = 1\nt3 = yes\nt4 = on\n"
      "f1 = false\nf2 = 0\nf3 = no\nf4 = off\n"
      "weird = maybe\n");
  CHECK(cfg.get_double("num", "good", 0.0) == 2.5e-3);
  CHECK(cfg.get_int("num", "int", 0) == -42);
  CHECK(cfg.get_u64("num", "u", 0) == 18446744073709551615ULL);
  CHECK(cfg.get_doubles("num", "list", {}) == std::vector<double>{1.0, 2.5, -300.0});
  CHECK(cfg.get_strings("num", "names", {}) ==
        std::vector<std::string>{"one", "two", "three"});
  for (const char* k : {"t1", "t2", "t3", "t4"}) CHECK(cfg.get_bool("flags", k, false));
  for (const char* k : {"f1", "f2", "f3", "f4"}) CHECK_FALSE(cfg.get_bool("flags", k, true));

  std::string msg = error_message([&] { cfg.require_double("num", "bad"); });
  CHECK(msg.find("[num] bad") != std::string::npos);
  msg = error_message([&] { cfg.require_double("num", "word"); });
  CHECK(msg.find("not a number") != std::string::npos);
  msg = error_message([&] { cfg.get_bool("flags", "weird", true); });
  CHECK(msg.find("[flags] weird") != std::string::npos);
  msg = error_message([&] { cfg.require_string("num", "absent"); });
  CHECK(msg.find("required key is missing") != std::string::npos);
  CHECK(msg.find("[num] absent") != std::string::npos);

  // Fallbacks only apply when the key is missing, not when it is malformed.
  CHECK(cfg.get_double("num", "nothing", 7.5) == 7.5);
  CHECK_THROWS_AS(cfg.get_double("num", "bad", 7.5), Error);
}

TEST_CASE("canonical form sorts and the hash ignores order") {
  const ConfigMap a = ConfigMap::parse("[b]\nz = 2\ny = 1\n\n[a]\nk = v\n");
  const ConfigMap b = ConfigMap::parse("[a]\nk = v\n[b]\ny = 1\nz = 2\n");
  CHECK(a.canonical() == "[a]\nk = v\n[b]\ny = 1\nz = 2\n");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());

  ConfigMap c = b;
  c.set("b", "y", "99");
  CHECK(c.hash() != b.hash());

  // Sections without keys do not contribute.
  const ConfigMap d = ConfigMap::parse("[empty]\n[a]\nk = v\n[b]\ny = 1\nz = 2\n");
  CHECK(d.hash() == a.hash());
}

TEST_CASE("fnv1a64 and hex64 match the published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(255) == "00000000000000ff");
  CHECK(hex64(0xcbf29ce484222325ULL) == "cbf29ce484222325");
}

TEST_CASE("json output is ordered with 17-digit numbers") {
  Json j = Json::object();
  j["pi"] = Json(0.1);
  j["flag"] = Json(true);
  j["name"] = Json("x\"y");
  j["items"].push_back(Json(1));
  j["items"].push_back(Json(2.5));
  j["inner"]["k"] = Json("v");
  j["none"];
  const std::string expected =
      "{\n"
      "  \"pi\": 0.10000000000000001,\n"
      "  \"flag\": true,\n"
      "  \"name\": \"x\\\"y\",\n"
      "  \"items\": [\n"
      "    1,\n"
      "    2.5\n"
      "  ],\n"
      "  \"inner\": {\n"
      "    \"k\": \"v\"\n"
      "  },\n"
      "  \"none\": null\n"
      "}\n";
  CHECK(j.dump() == expected);
}

TEST_CASE("17-digit formatting round-trips and quotes non-finite values") {
  CHECK(format_double_17(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double_17(0.1)) == 0.1);
  CHECK(std::stod(format_double_17(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double_17(2.0) == "2");
  CHECK(format_double_17(std::numeric_limits<double>::infinity()) == "\"inf\"");
  CHECK(format_double_17(-std::numeric_limits<double>::infinity()) == "\"-inf\"");
  CHECK(format_double_17(std::numeric_limits<double>::quiet_NaN()) == "\"nan\"");
}

TEST_CASE("csv files carry full precision") {
  const auto path = test_dir() / "table.csv";
  write_csv(path.string(), {"a", "b"}, {{0.1, 2.0}, {0.5, 1e30}});
  CHECK(slurp(path) == "a,b\n0.10000000000000001,2\n0.5,1e+30\n");
}

TEST_CASE("svg charts are self-contained polyline plots") {
  const auto path = test_dir() / "chart.svg";
  SvgSeries s1{"first", {{1.0, 2.0}, {2.0, 3.0}, {3.0, 2.5}}};
  SvgSeries s2{"second",
               {{1.0, 1.0},
                {2.0, std::numeric_limits<double>::quiet_NaN()},
                {3.0, 1.5}}};
  write_svg_chart(path.string(), "demo title", "steps", "error", {s1, s2});
  const std::string svg = slurp(path);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("demo title") != std::string::npos);
  CHECK(svg.find("steps") != std::string::npos);
  CHECK(svg.find("error") != std::string::npos);
  CHECK(svg.find("first") != std::string::npos);
  CHECK(svg.find("second") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);  // non-finite points are dropped
}

TEST_CASE("text writer creates parents and surfaces io failures") {
  const auto nested = test_dir() / "deep" / "path" / "file.txt";
  write_text_file(nested.string(), "payload");
  CHECK(slurp(nested) == "payload");
  try {
    write_text_file("", "x");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::io);
  }
}

TEST_CASE("config files load from disk") {
  const auto path = test_dir() / "cfg.ini";
  write_text_file(path.string(), "[s]\nk = 3\n");
  const ConfigMap cfg = ConfigMap::load_file(path.string());
  CHECK(cfg.get_int("s", "k", 0) == 3);
  CHECK_THROWS_AS(ConfigMap::load_file((test_dir() / "missing.ini").string()), Error);
}
