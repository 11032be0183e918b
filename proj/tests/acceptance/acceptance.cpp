// Runs the acceptance criteria end to end and prints one PASS/FAIL line per criterion.
//
// Usage: que_acceptance [--known-red N,...] [--only N,...]
// Exit status is 0 when every criterion passes or fails only where listed as known red.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "que/certifier.hpp"
#include "que/forms.hpp"
#include "que/obstacle.hpp"
#include "que/spectral.hpp"

#ifndef QUE_CLI_PATH
#error "QUE_CLI_PATH must point at the que executable"
#endif

using namespace que;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Certified {
  IdentificationPair pair;
  QueCertificate cert;
};

// Pairs are shared between criteria; building them dominates the runtime.
class Store {
 public:
  const Certified& get(ModelKind kind, int m, int big) {
    const auto key = std::make_tuple(static_cast<int>(kind), m, big);
    auto it = items_.find(key);
    if (it == items_.end()) {
      Certified c{build_identification(FractalModel::of(kind), m, big), {}};
      c.cert = certify(c.pair);
      it = items_.emplace(key, std::move(c)).first;
    }
    return it->second;
  }

  const std::vector<const Certified*>& headline() {
    if (headline_.empty()) {
      for (int m = 1; m <= 6; ++m) headline_.push_back(&get(ModelKind::Interval, m, std::min(m + 5, 8)));
      for (int m = 1; m <= 4; ++m) headline_.push_back(&get(ModelKind::Gasket, m, m + 3));
    }
    return headline_;
  }

  std::vector<const Certified*> all() const {
    std::vector<const Certified*> out;
    for (const auto& [k, v] : items_) out.push_back(&v);
    return out;
  }

 private:
  std::map<std::tuple<int, int, int>, Certified> items_;
  std::vector<const Certified*> headline_;
};

Store store;

Outcome criterion1() {
  Outcome o;
  double worst = 0.0;
  for (int m = 0; m <= 7; ++m) worst = std::max(worst, schur_compatibility_residual(FractalModel::interval(), m));
  for (int m = 0; m <= 5; ++m) worst = std::max(worst, schur_compatibility_residual(FractalModel::gasket(), m));
  o.detail << "max residual " << g(worst);
  o.require(worst <= 1e-12, "residual > 1e-12");
  return o;
}

Outcome headline(ModelKind kind) {
  Outcome o;
  std::vector<QueCertificate> certs;
  for (const auto* c : store.headline()) {
    if (c->cert.model != kind) continue;
    certs.push_back(c->cert);
    const double bound = FractalModel::of(kind).theoretical_delta(c->cert.coarse_level);
    o.detail << "m=" << c->cert.coarse_level << ":" << g(c->cert.delta_total) << "<=" << g(bound) << " ";
    o.require(c->cert.delta_total <= bound, "delta above bound at m=" + std::to_string(c->cert.coarse_level));
  }
  const auto verdict = gnrs_verdict(certs);
  o.detail << "log" << verdict.log_base << "-slope " << g(verdict.slope_in_base);
  if (kind == ModelKind::Interval) {
    o.require(verdict.slope_in_base >= -1.3 && verdict.slope_in_base <= -0.7, "slope outside [-1.3,-0.7]");
  } else {
    o.require(verdict.slope_in_base <= -0.35, "slope above -0.35");
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  store.headline();
  store.get(ModelKind::Interval, 2, 4);
  store.get(ModelKind::Interval, 4, 8);
  store.get(ModelKind::Interval, 3, 8);
  double worst_d = 0.0;
  double worst_spot = 0.0;
  const auto all = store.all();
  for (const auto* c : all) {
    worst_d = std::max(worst_d, c->cert.delta_d);
    worst_spot = std::max(worst_spot, closeness_spot_check(c->pair, 1, 100));
  }
  o.detail << all.size() << " pairs, max delta_d " << g(worst_d) << ", max spot " << g(worst_spot);
  o.require(worst_d <= 1e-11, "delta_d > 1e-11");
  o.require(worst_spot <= 1e-11, "spot check > 1e-11");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const int levels[] = {3, 4, 5, 6, 7};
  const auto t = convergence_table(FractalModel::interval(), levels, 1, Reference::Analytic);
  double worst_ratio = 0.0;
  for (const auto& r : t.rows) {
    const double env = 8.2 * std::pow(4.0, -r.level);
    worst_ratio = std::max(worst_ratio, r.error / env);
    o.require(r.error <= env, "envelope at m=" + std::to_string(r.level));
  }
  const auto d1 = eigensolve(assemble(build_level(FractalModel::interval(), 1)));
  o.detail << "max error/envelope " << g(worst_ratio) << ", level-1 eigenvalues " << g(d1.eigenvalues(1)) << ", "
           << g(d1.eigenvalues(2));
  o.require(std::abs(d1.eigenvalues(1) - 8.0) <= 1e-10, "lambda_1 != 8");
  o.require(std::abs(d1.eigenvalues(2) - 16.0) <= 1e-10, "lambda_2 != 16");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const std::complex<double> zs[] = {{-1, 0}, {-2, 0}, {0, 1}, {1, 2}};
  double worst = 0.0;
  int checks = 0;
  for (const auto* c : store.headline()) {
    const auto sp = spectral_pair(c->pair);
    for (auto z : zs) {
      const auto r = resolvent_comparison(sp, c->cert, z);
      if (z == std::complex<double>(-1, 0)) o.require(std::abs(r.bound - 4.0 * c->cert.delta_total) < 1e-12, "C(-1) != 4");
      worst = std::max(worst, r.norm / r.bound);
      o.require(r.ok, "bound at m=" + std::to_string(c->cert.coarse_level));
      ++checks;
    }
  }
  o.detail << checks << " checks, max norm/bound " << g(worst);
  return o;
}

Outcome criterion7() {
  Outcome o;
  const double times[] = {0.5, 1.0, 2.0};
  double worst = 0.0;
  double markov = 0.0;
  for (const auto* c : store.headline()) {
    const auto sp = spectral_pair(c->pair);
    for (double t : times) {
      const auto h = heat_comparison(sp, c->cert, t, kDefaultSectorAngle);
      worst = std::max(worst, h.norm / h.bound);
      o.require(h.ok, "heat bound at m=" + std::to_string(c->cert.coarse_level));
      for (const auto& d : {sp.coarse, sp.fine}) {
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d->size());
        markov = std::max(markov, (d->heat(t) * ones - ones).cwiseAbs().maxCoeff());
      }
    }
  }
  o.detail << "max norm/bound " << g(worst) << ", Markov defect " << g(markov);
  o.require(markov <= 1e-10, "heat semigroup does not preserve constants");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto& c = store.get(ModelKind::Interval, 3, 8);
  const auto sp = spectral_pair(c.pair);
  for (Eigen::Index k : {0, 1}) {
    const auto [a, b] = isolating_window(sp, k);
    const auto r = projection_comparison(sp, c.cert, a, b);
    o.detail << "k=" << k << " (" << g(a) << "," << g(b) << "): " << g(r.commutator.norm) << "<=" << g(r.commutator.bound)
             << ", " << g(r.sandwich.norm) << "<=" << g(r.sandwich.bound) << " ";
    o.require(r.commutator.ok, "commutator k=" + std::to_string(k));
    o.require(r.sandwich.ok, "sandwich k=" + std::to_string(k));
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto& ab = store.get(ModelKind::Interval, 2, 4);
  const auto& bc = store.get(ModelKind::Interval, 4, 8);
  const auto r = compose(ab.pair, ab.cert, bc.pair, bc.cert);
  const double hat = delta_hat_from_delta(r.certified.delta_total);
  o.detail << "form: " << g(hat) << "<=" << g(r.theoretical_bound);
  o.require(hat <= r.theoretical_bound, "form-level transitivity");
  o.require(r.hypotheses.embed_energy_bounded && r.hypotheses.sample_energy_bounded, "hypotheses");

  const auto op_ab = operator_level_certificate(ab.pair, ab.cert);
  const auto op_bc = operator_level_certificate(bc.pair, bc.cert);
  const auto op_ac = operator_level_certificate(r.composed, r.certified);
  const double bound = operator_transitivity_bound(op_ab.delta_operator, op_bc.delta_operator);
  o.detail << ", operator: " << g(op_ac.delta_operator) << "<=" << g(bound);
  o.require(op_ac.delta_operator <= bound, "operator-level transitivity");
  return o;
}

Outcome criterion10() {
  Outcome o;
  for (int n : {64, 256}) {
    const int c[] = {n / 2};
    const double ell = elliptic_regularity_constant(build_obstacle_model(n, c, 4.0 / n, 0.5));
    o.detail << "C_ell(N=" << n << ")=" << g(ell) << " ";
    o.require(std::abs(ell - 1.0) <= 1e-10, "C_ell.reg != 1");
  }
  const int n = 256;
  const double radii[] = {4.0 / n, 8.0 / n, 16.0 / n};
  const auto rows = obstacle_sweep(n, n / 2, radii, 0.5);
  std::vector<double> eps;
  std::vector<double> deltas;
  double cmin = rows.front().cert.c_ext;
  double cmax = cmin;
  for (const auto& r : rows) {
    eps.push_back(r.eps);
    deltas.push_back(r.cert.delta);
    cmin = std::min(cmin, r.cert.c_ext);
    cmax = std::max(cmax, r.cert.c_ext);
    o.require(r.cert.closeness <= r.cert.closeness_bound, "closeness bound");
  }
  const double mid = 0.5 * (cmin + cmax);
  const double spread = (cmax - cmin) / (2.0 * mid);
  o.detail << "C_ext in [" << g(cmin) << "," << g(cmax) << "] (+-" << g(100 * spread) << "%) ";
  o.require(spread <= 0.10, "C_ext not stable within +-10%");
  const double slope = log_log_slope(eps, deltas);
  o.detail << "delta-eps slope " << g(slope) << " (1D analogue)";
  o.require(std::abs(slope - 0.5) <= 0.15, "slope outside 0.5+-0.15");
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + QUE_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> outputs(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir);
    if (*rel.begin() == "cache") continue;
    const auto ext = e.path().extension();
    if (ext != ".csv" && ext != ".json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[rel.string()] = s.str();
  }
  return files;
}

Outcome criterion11() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "que-acceptance-determinism";
  fs::remove_all(root);
  const char* commands[] = {"build", "certify", "spectrum", "converge", "compare", "compose", "obstacle", "report"};
  std::map<std::string, std::string> runs[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path out = root / (run == 0 ? "a" : "b");
    for (const char* c : commands) {
      // Each run gets its own cache so the second run cannot reuse the first one's results.
      const int code = run_cli(std::string(c) + " --out \"" + out.string() + "\"");
      o.require(code == 0, std::string(c) + " exited " + std::to_string(code));
    }
    runs[run] = outputs(out);
  }
  std::size_t differing = 0;
  for (const auto& [name, bytes] : runs[0]) {
    auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != bytes) {
      ++differing;
      o.require(false, "differs: " + name);
    }
  }
  o.require(runs[0].size() == runs[1].size(), "different file sets");
  o.require(!runs[0].empty(), "no outputs");
  o.detail << runs[0].size() << " CSV/JSON files compared, " << differing << " differ";
  fs::remove_all(root);
  return o;
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_red;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--known-red" && i + 1 < argc) {
      known_red = parse_list(argv[++i]);
    } else if (a == "--only" && i + 1 < argc) {
      only = parse_list(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--known-red N,...] [--only N,...]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"compatibility exactness", criterion1},
      {"delta-close exactness", criterion2},
      {"interval headline bound", [] { return headline(ModelKind::Interval); }},
      {"gasket headline bound", [] { return headline(ModelKind::Gasket); }},
      {"interval eigenvalue convergence", criterion5},
      {"resolvent bound", criterion6},
      {"heat bound", criterion7},
      {"projection bound", criterion8},
      {"transitivity", criterion9},
      {"obstacle demo", criterion10},
      {"determinism", criterion11},
  };

  int unexpected = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool red = known_red.count(id) > 0;
    if (!o.pass && !red) ++unexpected;
    std::printf("criterion %2d %s (%s, %.1fs)%s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), secs,
                !o.pass && red ? " [known red]" : "", o.detail.str().c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("acceptance: %d unexpected failure(s), %.1fs total\n", unexpected, total);
  return unexpected == 0 ? 0 : 1;
}
