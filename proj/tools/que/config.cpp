#include "config.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "output.hpp"
#include "que/errors.hpp"
#include "que/serialize.hpp"

namespace que::cli {

std::vector<int> RunConfig::level_list() const { return levels.empty() ? std::vector<int>{level} : levels; }

std::vector<std::complex<double>> RunConfig::parsed_z() const {
  std::vector<std::complex<double>> out;
  for (const auto& s : z_points) out.push_back(parse_complex(s));
  return out;
}

std::string RunConfig::hash() const {
  std::ostringstream s;
  s << "command=" << command << ";model=" << to_string(model) << ";level=" << level << ";fine=" << fine << ";levels=";
  for (int l : levels) s << l << ' ';
  s << ";k=" << k << ";reference=" << reference << ";z=";
  for (const auto& z : z_points) s << z << ' ';
  s << ";times=";
  for (double t : times) s << fmt(t) << ' ';
  s << ";theta=" << fmt(theta) << ";chain=";
  for (int c : chain) s << c << ' ';
  s << ";grid=" << grid << ";center=" << center << ";radii=";
  for (double r : radii) s << fmt(r) << ' ';
  s << ";alpha=" << fmt(alpha) << ";spot_checks=" << spot_checks << ";seed=" << seed;
  return hex64(fnv1a(s.str()));
}

std::complex<double> parse_complex(const std::string& text) {
  auto bad = [&] { fail(ErrorKind::Validation, "cannot parse complex number '" + text + "'"); };
  auto number = [&](const std::string& s, double unit) {
    if (s.empty() || s == "+") return unit;
    if (s == "-") return -unit;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      bad();
    }
    if (used != s.size()) bad();
    return v;
  };
  if (text.empty()) bad();
  if (text.back() != 'i') return {number(text, 0.0), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t p = body.size(); p-- > 1;) {
    if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, number(body, 1.0)};
  return {number(body.substr(0, split), 0.0), number(body.substr(split), 1.0)};
}

ParseOutcome parse_command_line(int argc, char** argv) {
  RunConfig cfg;
  std::string model = "interval";
  std::string cache;

  CLI::App app{"que: quasi-unitary equivalence certificates for self-similar energy forms"};
  app.set_config("--config", "", "INI file of key = value settings; flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("command", cfg.command, "build|certify|spectrum|converge|compare|compose|obstacle|report")
      ->required()
      ->check(CLI::IsMember({"build", "certify", "spectrum", "converge", "compare", "compose", "obstacle", "report"}));
  app.add_option("--model", model, "interval|gasket")->check(CLI::IsMember({"interval", "gasket"}));
  app.add_option("--level", cfg.level, "coarse level m")->check(CLI::NonNegativeNumber);
  app.add_option("--fine", cfg.fine, "fine level M (default m+5 interval, m+3 gasket, capped)");
  app.add_option("--levels", cfg.levels, "list of coarse levels")->delimiter(',');
  app.add_option("--k", cfg.k, "eigenvalue index")->check(CLI::NonNegativeNumber);
  app.add_option("--reference", cfg.reference, "analytic|finest")->check(CLI::IsMember({"analytic", "finest"}));
  app.add_option("--z", cfg.z_points, "resolvent points, e.g. -1,i,1+2i")->delimiter(',');
  app.add_option("--times", cfg.times, "heat times")->delimiter(',');
  app.add_option("--theta", cfg.theta, "heat sector angle in (0, pi/2)");
  app.add_option("--chain", cfg.chain, "three levels a,b,c for the composition")->delimiter(',');
  app.add_option("--grid", cfg.grid, "obstacle circle grid size N");
  app.add_option("--center", cfg.center, "obstacle center grid index");
  app.add_option("--radii", cfg.radii, "obstacle radii in grid spacings")->delimiter(',');
  app.add_option("--alpha", cfg.alpha, "obstacle separation exponent");
  app.add_option("--spot-checks", cfg.spot_checks, "random closeness spot checks per pair")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", cfg.seed, "seed for random spot checks");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--cache", cache, "cache directory (default $QUE_CACHE_DIR or <out>/cache)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    ParseOutcome o;
    o.exit_code = app.exit(e) == 0 ? 0 : 1;
    return o;
  }
  cfg.model = parse_model(model);
  if (!cache.empty()) {
    cfg.cache = cache;
  } else if (const char* env = std::getenv("QUE_CACHE_DIR"); env && *env) {
    cfg.cache = env;
  } else {
    cfg.cache = cfg.out / "cache";
  }
  if (cfg.center < 0) cfg.center = cfg.grid / 2;
  ParseOutcome o;
  o.config = std::move(cfg);
  return o;
}

}  // namespace que::cli
