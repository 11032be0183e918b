#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "output.hpp"
#include "que/certifier.hpp"
#include "que/errors.hpp"
#include "que/obstacle.hpp"
#include "que/serialize.hpp"
#include "que/spectral.hpp"

namespace que::cli {

namespace {

using nlohmann::json;

constexpr double kExactTolerance = 1e-11;

const char* kProxyNote =
    "The limit operator on K is not available in finite arithmetic. Bounds are checked against a fine level M "
    "standing in for the continuum, and statements about the limit follow through the transitivity bound.";

struct Context {
  const RunConfig& cfg;
  std::ostream& log;
  std::string hash;
  Provenance prov;

  std::filesystem::path out(const std::string& name) const { return cfg.out / name; }
  void write_csv(const std::string& name, const CsvTable& t) const {
    write_text(out(name), t.render(hash, cfg.seed));
    log << "wrote " << out(name).string() << "\n";
  }
  void write_json(const std::string& name, const std::string& text) const {
    write_text(out(name), text + "\n");
    log << "wrote " << out(name).string() << "\n";
  }
  void write_svg(const std::string& name, const std::string& text) const {
    write_text(out(name), text);
    log << "wrote " << out(name).string() << "\n";
  }
  json provenance() const { return {{"config_hash", hash}, {"seed", cfg.seed}}; }
};

std::string model_name(ModelKind k) { return std::string(to_string(k)); }
std::string bool_str(bool b) { return b ? "true" : "false"; }

int fine_for(const RunConfig& cfg, const FractalModel& model, int m, bool single) {
  if (cfg.fine >= 0 && single) return cfg.fine;
  return default_fine_level(model, m);
}

LevelGraph cached_level(const Context& ctx, const FractalModel& model, int m) {
  const auto file = ctx.cfg.cache / ("levelgraph1-" + model_name(model.kind) + "-" + std::to_string(m) + ".json");
  if (std::filesystem::exists(file)) {
    try {
      LevelGraph g = level_graph_from_json(read_text(file));
      ctx.log << "cache hit " << file.string() << "\n";
      return g;
    } catch (const Error& e) {
      ctx.log << "warning: cache file " << file.string() << " is corrupt (" << e.what() << "); rebuilding\n";
    }
  }
  LevelGraph g = build_level(model, m);
  write_text(file, to_json(g) + "\n");
  return g;
}

int cmd_build(const Context& ctx) {
  const FractalModel model = FractalModel::of(ctx.cfg.model);
  CsvTable table("que-build/1", {"model", "level", "vertices", "edges", "total_measure"});
  for (int m : ctx.cfg.level_list()) {
    const LevelGraph g = cached_level(ctx, model, m);
    const FormPencil p = assemble(g);
    const std::string tag = model_name(model.kind) + "-" + std::to_string(m);
    ctx.write_json("levelgraph-" + tag + ".json", to_json(g, ctx.prov));
    ctx.write_json("pencil-" + tag + ".json", to_json(p, ctx.prov));
    Rational total = 0;
    for (const auto& w : g.measure) total += w;
    table.add_row({model_name(model.kind), std::to_string(m), std::to_string(g.size()), std::to_string(g.edges.size()),
                   fmt(to_double(total))});
  }
  ctx.write_csv("build-" + model_name(model.kind) + ".csv", table);
  return kOk;
}

int cmd_certify(const Context& ctx) {
  const FractalModel model = FractalModel::of(ctx.cfg.model);
  const auto levels = ctx.cfg.level_list();
  CsvTable table("que-certify/1", {"model", "m", "M", "delta_a1", "delta_a2", "delta_b1", "delta_b2", "delta_bprime",
                                   "delta_c1", "delta_c2", "delta_d", "delta_total", "paper_bound", "spot_check_max",
                                   "within_paper_bound"});
  std::vector<QueCertificate> certs;
  bool violated = false;
  for (int m : levels) {
    const int fine = fine_for(ctx.cfg, model, m, levels.size() == 1);
    const IdentificationPair pair = build_identification(model, m, fine);
    const QueCertificate c = certify(pair);
    const double spot = closeness_spot_check(pair, ctx.cfg.seed + static_cast<unsigned>(m), ctx.cfg.spot_checks);
    const bool within = c.delta_total <= c.paper_bound;
    violated = violated || !within || c.delta_d > kExactTolerance || spot > kExactTolerance;
    ctx.write_json("cert-" + model_name(model.kind) + "-" + std::to_string(m) + "-" + std::to_string(fine) + ".json",
                   to_json(c, ctx.prov));
    table.add_row({model_name(model.kind), std::to_string(m), std::to_string(fine), fmt(c.delta_a1), fmt(c.delta_a2),
                   fmt(c.delta_b1), fmt(c.delta_b2), fmt(c.delta_bprime), fmt(c.delta_c1), fmt(c.delta_c2),
                   fmt(c.delta_d), fmt(c.delta_total), fmt(c.paper_bound), fmt(spot), bool_str(within)});
    ctx.log << "m=" << m << " M=" << fine << " delta_total=" << fmt(c.delta_total)
            << " paper_bound=" << fmt(c.paper_bound) << "\n";
    certs.push_back(c);
  }
  ctx.write_csv("certify-" + model_name(model.kind) + ".csv", table);
  if (certs.size() >= 3) {
    const GnrsReport r = gnrs_verdict(certs);
    json doc;
    doc["schema"] = "que-gnrs/1";
    doc["model"] = model_name(r.model);
    doc["levels"] = r.levels;
    doc["deltas"] = r.deltas;
    doc["paper_bounds"] = r.paper_bounds;
    doc["within_paper_bound"] = r.within_paper_bound;
    doc["slope_ln"] = r.slope_ln;
    doc["log_base"] = r.log_base;
    doc["slope_in_base"] = r.slope_in_base;
    doc["eventually_decreasing"] = r.eventually_decreasing;
    doc["converges"] = r.converges;
    doc["verdict"] = r.verdict;
    doc["tolerance_note"] = r.tolerance_note;
    doc["provenance"] = ctx.provenance();
    ctx.write_json("gnrs-" + model_name(model.kind) + ".json", doc.dump(2));
    ctx.log << r.verdict << " (slope in base " << r.log_base << ": " << fmt(r.slope_in_base) << ")\n";
  }
  return violated ? kBoundViolation : kOk;
}

int cmd_spectrum(const Context& ctx) {
  const FractalModel model = FractalModel::of(ctx.cfg.model);
  for (int m : ctx.cfg.level_list()) {
    const FormPencil p = assemble(build_level(model, m));
    const auto d = DecompositionCache::global().get(p);
    CsvTable table("que-spectrum/1", {"model", "level", "k", "eigenvalue"});
    for (Eigen::Index k = 0; k < d->size(); ++k) {
      table.add_row({model_name(model.kind), std::to_string(m), std::to_string(k), fmt(d->eigenvalues(k))});
    }
    ctx.write_csv("spectrum-" + model_name(model.kind) + "-" + std::to_string(m) + ".csv", table);
  }
  return kOk;
}

int cmd_converge(const Context& ctx) {
  const FractalModel model = FractalModel::of(ctx.cfg.model);
  std::vector<int> levels = ctx.cfg.levels;
  if (levels.empty()) levels = model.kind == ModelKind::Interval ? std::vector<int>{3, 4, 5, 6, 7} : std::vector<int>{1, 2, 3, 4, 5};
  std::string ref = ctx.cfg.reference;
  if (ref.empty()) ref = model.kind == ModelKind::Interval ? "analytic" : "finest";
  const ConvergenceTable t =
      convergence_table(model, levels, ctx.cfg.k, ref == "analytic" ? Reference::Analytic : Reference::FinestLevel);

  CsvTable table("que-converge/1",
                 {"model", "level", "k", "eigenvalue", "reference", "error", "paper_delta", "fitted_constant"});
  PlotSeries err{"|lambda_k error|", {}, {}, false};
  PlotSeries bound{"paper delta_m", {}, {}, true};
  for (const auto& row : t.rows) {
    table.add_row({model_name(model.kind), std::to_string(row.level), std::to_string(t.k), fmt(row.eigenvalue),
                   fmt(row.reference), fmt(row.error), fmt(row.paper_delta), fmt(row.fitted_constant)});
    err.x.push_back(row.level);
    err.y.push_back(row.error);
    bound.x.push_back(row.level);
    bound.y.push_back(row.paper_delta);
  }
  const std::string tag = model_name(model.kind) + "-k" + std::to_string(t.k);
  ctx.write_csv("converge-" + tag + ".csv", table);
  PlotSpec spec{"eigenvalue error, " + model_name(model.kind) + ", k=" + std::to_string(t.k) + " (" + ref + ")",
                "level m", "error", false, true};
  ctx.write_svg("converge-" + tag + ".svg", render_svg(spec, {err, bound}, ctx.hash, ctx.cfg.seed));
  ctx.log << "log slope of error per level: " << fmt(t.log_slope) << "\n";
  return kOk;
}

int cmd_compare(const Context& ctx) {
  const FractalModel model = FractalModel::of(ctx.cfg.model);
  const int m = ctx.cfg.level;
  const int fine = fine_for(ctx.cfg, model, m, true);
  const IdentificationPair pair = build_identification(model, m, fine);
  const QueCertificate cert = certify(pair);
  const SpectralPair sp = spectral_pair(pair);

  CsvTable table("que-compare/1", {"kind", "parameter", "norm", "bound", "ok"});
  bool violated = false;
  auto row = [&](const std::string& kind, const std::string& param, const BoundCheck& b) {
    violated = violated || !b.ok;
    table.add_row({kind, param, fmt(b.norm), fmt(b.bound), bool_str(b.ok)});
  };
  const auto zs = ctx.cfg.parsed_z();
  for (std::size_t i = 0; i < zs.size(); ++i) row("resolvent", ctx.cfg.z_points[i], resolvent_comparison(sp, cert, zs[i]));
  for (double t : ctx.cfg.times) row("heat", fmt(t), heat_comparison(sp, cert, t, ctx.cfg.theta));
  for (Eigen::Index k : {Eigen::Index{0}, Eigen::Index{1}}) {
    const auto [a, b] = isolating_window(sp, k);
    const ProjectionReport r = projection_comparison(sp, cert, a, b);
    const std::string window = "(" + fmt(a) + " " + fmt(b) + ")";
    row("projection_commutator", window, r.commutator);
    row("projection_sandwich", window, r.sandwich);
  }
  ctx.write_csv("compare-" + model_name(model.kind) + "-" + std::to_string(m) + "-" + std::to_string(fine) + ".csv",
                table);
  return violated ? kBoundViolation : kOk;
}

int cmd_compose(const Context& ctx) {
  const FractalModel model = FractalModel::of(ctx.cfg.model);
  const auto& ch = ctx.cfg.chain;
  if (ch.size() != 3 || !(ch[0] < ch[1] && ch[1] < ch[2])) {
    fail(ErrorKind::Validation, "chain must list three increasing levels a,b,c");
  }
  const IdentificationPair ab = build_identification(model, ch[0], ch[1]);
  const IdentificationPair bc = build_identification(model, ch[1], ch[2]);
  const QueCertificate cab = certify(ab);
  const QueCertificate cbc = certify(bc);
  const CompositionReport r = compose(ab, cab, bc, cbc);

  const OperatorLevelReport oab = operator_level_certificate(ab, cab);
  const OperatorLevelReport obc = operator_level_certificate(bc, cbc);
  const OperatorLevelReport oac = operator_level_certificate(r.composed, r.certified);
  const double op_bound = operator_transitivity_bound(oab.delta_operator, obc.delta_operator);
  const bool op_ok = oac.delta_operator <= op_bound * (1.0 + 1e-8);

  json doc;
  doc["schema"] = "que-compose/1";
  doc["model"] = model_name(model.kind);
  doc["chain"] = ch;
  doc["delta_first"] = r.delta_first;
  doc["delta_second"] = r.delta_second;
  doc["certified_delta_composed"] = r.certified.delta_total;
  doc["theoretical_bound"] = r.theoretical_bound;
  doc["within_bound"] = r.within_bound;
  doc["hypotheses"] = {{"embed_energy_bounded", r.hypotheses.embed_energy_bounded},
                       {"sample_energy_bounded", r.hypotheses.sample_energy_bounded}};
  doc["operator_level"] = {{"delta_first", oab.delta_operator},
                           {"delta_second", obc.delta_operator},
                           {"delta_composed", oac.delta_operator},
                           {"bound", op_bound},
                           {"ok", op_ok}};
  doc["note"] = kProxyNote;
  doc["provenance"] = ctx.provenance();
  const std::string tag = model_name(model.kind) + "-" + std::to_string(ch[0]) + "-" + std::to_string(ch[1]) + "-" +
                          std::to_string(ch[2]);
  ctx.write_json("compose-" + tag + ".json", doc.dump(2));

  CsvTable table("que-compose/1", {"check", "measured", "bound", "ok"});
  table.add_row({"form_level", fmt(r.certified.delta_total), fmt(r.theoretical_bound), bool_str(r.within_bound)});
  table.add_row({"operator_level", fmt(oac.delta_operator), fmt(op_bound), bool_str(op_ok)});
  ctx.write_csv("compose-" + tag + ".csv", table);
  return (r.within_bound && op_ok) ? kOk : kBoundViolation;
}

int cmd_obstacle(const Context& ctx) {
  const int n = ctx.cfg.grid;
  std::vector<double> radii;
  for (double r : ctx.cfg.radii) radii.push_back(r / n);
  const auto rows = obstacle_sweep(n, ctx.cfg.center, radii, ctx.cfg.alpha);

  CsvTable table("que-obstacle/1",
                 {"eps", "alpha", "delta_measured", "C_ext", "C_ell_reg", "closeness_measured", "bound", "ok"});
  bool violated = false;
  PlotSeries delta{"delta", {}, {}, false};
  PlotSeries cext{"C_ext", {}, {}, false};
  PlotSeries close{"closeness", {}, {}, false};
  PlotSeries bound{"C_ext C_ell delta", {}, {}, true};
  double cmin = std::numeric_limits<double>::infinity();
  double cmax = 0.0;
  std::vector<double> eps;
  std::vector<double> deltas;
  for (const auto& r : rows) {
    const bool ok = r.cert.closeness_ok && r.cert.extension_ok && r.cert.restriction_ok;
    violated = violated || !ok;
    table.add_row({fmt(r.eps), fmt(r.alpha), fmt(r.cert.delta), fmt(r.cert.c_ext), fmt(r.cert.c_ell_reg),
                   fmt(r.cert.closeness), fmt(r.cert.closeness_bound), bool_str(ok)});
    for (auto* s : {&delta, &cext, &close, &bound}) s->x.push_back(r.eps);
    delta.y.push_back(r.cert.delta);
    cext.y.push_back(r.cert.c_ext);
    close.y.push_back(r.cert.closeness);
    bound.y.push_back(r.cert.closeness_bound);
    cmin = std::min(cmin, r.cert.c_ext);
    cmax = std::max(cmax, r.cert.c_ext);
    eps.push_back(r.eps);
    deltas.push_back(r.cert.delta);
  }
  const std::string tag = "N" + std::to_string(n);
  ctx.write_csv("obstacle-" + tag + ".csv", table);
  PlotSpec spec{"obstacle sweep on the circle, N=" + std::to_string(n), "eps", "constant", true, true};
  ctx.write_svg("obstacle-" + tag + ".svg", render_svg(spec, {delta, cext, close, bound}, ctx.hash, ctx.cfg.seed));
  if (rows.size() >= 2 && deltas.front() > 0.0) {
    ctx.log << "1D analogue: log-log slope of delta vs eps = " << fmt(log_log_slope(eps, deltas))
            << "; C_ext range [" << fmt(cmin) << ", " << fmt(cmax) << "]\n";
  }
  return violated ? kBoundViolation : kOk;
}

int cmd_report(const Context& ctx) {
  std::filesystem::create_directories(ctx.cfg.out);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(ctx.cfg.out)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.rfind("summary.", 0) == 0) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".json" || ext == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  json artifacts = json::array();
  std::ostringstream md;
  md << "# que summary\n\n";
  if (files.empty()) md << "No artifacts found.\n";
  std::size_t violations = 0;
  for (const auto& f : files) {
    json item;
    item["file"] = f.filename().string();
    const std::string text = read_text(f);
    if (f.extension() == ".json") {
      try {
        const json doc = json::parse(text);
        item["schema"] = doc.value("schema", "");
        if (item["schema"] == "que-cert/1") {
          item["delta_total"] = doc.at("delta_total");
          item["paper_bound"] = doc.at("paper_bound");
          const bool ok = doc.at("delta_total").get<double>() <= doc.at("paper_bound").get<double>();
          item["ok"] = ok;
          if (!ok) ++violations;
        }
        if (doc.contains("within_bound")) {
          item["ok"] = doc.at("within_bound");
          if (!doc.at("within_bound").get<bool>()) ++violations;
        }
      } catch (const json::exception&) {
        item["schema"] = "unreadable";
      }
    } else {
      const auto eol = text.find('\n');
      const std::string head = text.substr(0, eol);
      const auto pos = head.find("schema=");
      item["schema"] = pos == std::string::npos ? "unknown" : head.substr(pos + 7, head.find(',', pos) - pos - 7);
      const auto lines = static_cast<long>(std::count(text.begin(), text.end(), '\n'));
      item["rows"] = std::max(0L, lines - 2);
      if (text.find(",false\n") != std::string::npos) {
        item["ok"] = false;
        ++violations;
      }
    }
    md << "- `" << item["file"].get<std::string>() << "` (" << item["schema"].get<std::string>() << ")";
    if (item.contains("delta_total")) {
      md << ": delta_total " << fmt(item["delta_total"].get<double>()) << " vs bound "
         << fmt(item["paper_bound"].get<double>());
    }
    if (item.contains("ok")) md << (item["ok"].get<bool>() ? " [ok]" : " [VIOLATED]");
    md << "\n";
    artifacts.push_back(std::move(item));
  }
  md << "\n" << kProxyNote << "\n";

  json doc;
  doc["schema"] = "que-summary/1";
  doc["artifacts"] = std::move(artifacts);
  doc["violations"] = violations;
  doc["note"] = kProxyNote;
  doc["provenance"] = ctx.provenance();
  ctx.write_json("summary.json", doc.dump(2));
  write_text(ctx.out("summary.md"), "<!-- config_hash=" + ctx.hash + " seed=" + std::to_string(ctx.cfg.seed) +
                                        " -->\n" + md.str());
  ctx.log << "wrote " << ctx.out("summary.md").string() << "\n";
  return kOk;
}

}  // namespace

int exit_code_for(const Error& e) { return e.kind() == ErrorKind::Numerical ? kNumerical : kUsage; }

int run_command(const RunConfig& cfg, std::ostream& log) {
  Context ctx{cfg, log, cfg.hash(), {}};
  ctx.prov = Provenance{ctx.hash, cfg.seed};
  DecompositionCache::global().set_directory(cfg.cache / "eig");

  static const std::map<std::string, int (*)(const Context&)> table = {
      {"build", cmd_build},     {"certify", cmd_certify},   {"spectrum", cmd_spectrum}, {"converge", cmd_converge},
      {"compare", cmd_compare}, {"compose", cmd_compose},   {"obstacle", cmd_obstacle}, {"report", cmd_report},
  };
  const auto it = table.find(cfg.command);
  if (it == table.end()) fail(ErrorKind::Validation, "unknown command " + cfg.command);
  return it->second(ctx);
}

}  // namespace que::cli
