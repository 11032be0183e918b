#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

using namespace que;
using namespace que::cli;
namespace fs = std::filesystem;

namespace {

ParseOutcome parse(std::vector<std::string> args) {
  args.insert(args.begin(), "que");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return parse_command_line(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("complex parsing") {
  CHECK(parse_complex("-1") == std::complex<double>(-1, 0));
  CHECK(parse_complex("i") == std::complex<double>(0, 1));
  CHECK(parse_complex("-i") == std::complex<double>(0, -1));
  CHECK(parse_complex("-2.5i") == std::complex<double>(0, -2.5));
  CHECK(parse_complex("1+2i") == std::complex<double>(1, 2));
  CHECK(parse_complex("3-0.5i") == std::complex<double>(3, -0.5));
  CHECK(parse_complex("1e-3+1e+2i") == std::complex<double>(1e-3, 1e2));
  CHECK_THROWS_AS(parse_complex(""), Error);
  CHECK_THROWS_AS(parse_complex("1+x"), Error);
  CHECK_THROWS_AS(parse_complex("abc"), Error);
}

TEST_CASE("formatting and CSV") {
  CHECK(fmt(0.1) == "0.10000000000000001");
  CHECK(fmt(1.0) == "1");
  CsvTable t("demo/1", {"a", "b"});
  t.add_row({"1", "2"});
  CHECK(t.render("ff", 3) == "# schema=demo/1,config_hash=ff,seed=3\na,b\n1,2\n");
  CHECK_THROWS_AS(t.add_row({"1"}), Error);
}

TEST_CASE("command-line parsing") {
  const auto ok = parse({"certify", "--model", "gasket", "--level", "2", "--z", "-1,1+2i", "--out", "x"});
  REQUIRE(ok.config.has_value());
  CHECK(ok.config->model == ModelKind::Gasket);
  CHECK(ok.config->parsed_z().size() == 2);
  CHECK(ok.config->cache == fs::path("x") / "cache");
  CHECK(ok.config->center == 128);

  CHECK_FALSE(parse({"certify", "--bogus"}).config.has_value());
  CHECK(parse({"certify", "--bogus"}).exit_code == 1);
  CHECK(parse({"explode"}).exit_code == 1);
  CHECK(parse({"certify", "--model", "carpet"}).exit_code == 1);
}

TEST_CASE("config hash covers results, not paths") {
  RunConfig a;
  a.command = "certify";
  RunConfig b = a;
  b.out = "elsewhere";
  b.cache = "cache-elsewhere";
  CHECK(a.hash() == b.hash());
  b.seed = 2;
  CHECK(a.hash() != b.hash());
  RunConfig c = a;
  c.level = 2;
  CHECK(a.hash() != c.hash());
}

TEST_CASE("commands are deterministic and map errors to exit codes") {
  const fs::path root = fs::temp_directory_path() / "que-cli-test";
  fs::remove_all(root);
  RunConfig cfg;
  cfg.command = "certify";
  cfg.level = 1;
  cfg.fine = 3;
  cfg.spot_checks = 10;
  std::ostringstream log;
  std::string first;
  for (const char* run : {"a", "b"}) {
    cfg.out = root / run;
    cfg.cache = root / run / "cache";
    REQUIRE(run_command(cfg, log) == kOk);
  }
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    CHECK(read_text(entry.path()) == read_text(root / "b" / entry.path().filename()));
  }

  cfg.level = 7;
  cfg.fine = 9;
  int code = 0;
  try {
    code = run_command(cfg, log);
  } catch (const Error& e) {
    code = exit_code_for(e);
  }
  CHECK(code == kUsage);
  CHECK(exit_code_for(Error(ErrorKind::Numerical, "x")) == kNumerical);
  fs::remove_all(root);
}
