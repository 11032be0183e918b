#include "que/serialize.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "que/errors.hpp"
#include "que/spectral.hpp"

namespace que {

namespace {

using nlohmann::json;

constexpr std::array<char, 8> kEigMagic = {'Q', 'U', 'E', 'E', 'I', 'G', '0', '1'};

json rational_json(const Rational& r) { return json::array({r.numerator(), r.denominator()}); }

Rational rational_from(const json& j) {
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::Validation, "rational must be [num, den]");
  const auto den = j[1].get<std::int64_t>();
  if (den == 0) fail(ErrorKind::Validation, "zero denominator");
  return Rational(j[0].get<std::int64_t>(), den);
}

void stamp(json& doc, const std::optional<Provenance>& prov) {
  if (prov) doc["provenance"] = {{"config_hash", prov->config_hash}, {"seed", prov->seed}};
}

json parse_doc(std::string_view text, std::string_view schema) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Validation, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("schema", "") != schema) {
    fail(ErrorKind::Validation, "expected schema " + std::string(schema));
  }
  return doc;
}

template <typename Fn>
auto guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    fail(ErrorKind::Validation, std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string to_json(const LevelGraph& g, const std::optional<Provenance>& prov) {
  json doc;
  doc["schema"] = "levelgraph/1";
  doc["model"] = std::string(to_string(g.model.kind));
  doc["level"] = g.level;
  json vertices = json::array();
  for (const auto& p : g.vertices) {
    if (g.model.kind == ModelKind::Interval) {
      vertices.push_back(rational_json(p.coords[0]));
    } else {
      vertices.push_back(json::array({rational_json(p.coords[0]), rational_json(p.coords[1])}));
    }
  }
  doc["vertices"] = std::move(vertices);
  json boundary = json::array();
  for (std::size_t i = 0; i < g.boundary.size(); ++i) {
    if (g.boundary[i]) boundary.push_back(i);
  }
  doc["boundary"] = std::move(boundary);
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back({e.i, e.j, e.conductance.numerator(), e.conductance.denominator()});
  }
  doc["edges"] = std::move(edges);
  json measure = json::array();
  for (const auto& w : g.measure) measure.push_back(rational_json(w));
  doc["measure"] = std::move(measure);
  stamp(doc, prov);
  return doc.dump(2);
}

LevelGraph level_graph_from_json(std::string_view text) {
  const json doc = parse_doc(text, "levelgraph/1");
  return guarded([&] {
    const ModelKind kind = parse_model(doc.at("model").get<std::string>());
    const int level = doc.at("level").get<int>();
    LevelGraph g = build_level(FractalModel::of(kind), level);
    // The graph is re-derived; the document must agree with it entry for entry.
    const auto& vs = doc.at("vertices");
    if (vs.size() != g.vertices.size()) fail(ErrorKind::Validation, "vertex count mismatch");
    for (std::size_t i = 0; i < vs.size(); ++i) {
      ExactPoint p;
      if (kind == ModelKind::Interval) {
        p.coords[0] = rational_from(vs[i]);
      } else {
        p.coords[0] = rational_from(vs[i].at(0));
        p.coords[1] = rational_from(vs[i].at(1));
      }
      if (!(p == g.vertices[i])) fail(ErrorKind::Validation, "vertex " + std::to_string(i) + " differs");
    }
    const auto& es = doc.at("edges");
    if (es.size() != g.edges.size()) fail(ErrorKind::Validation, "edge count mismatch");
    for (std::size_t k = 0; k < es.size(); ++k) {
      const Rational c(es[k].at(2).get<std::int64_t>(), es[k].at(3).get<std::int64_t>());
      if (es[k].at(0).get<std::size_t>() != g.edges[k].i || es[k].at(1).get<std::size_t>() != g.edges[k].j ||
          c != g.edges[k].conductance) {
        fail(ErrorKind::Validation, "edge " + std::to_string(k) + " differs");
      }
    }
    const auto& ms = doc.at("measure");
    if (ms.size() != g.measure.size()) fail(ErrorKind::Validation, "measure size mismatch");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (rational_from(ms[i]) != g.measure[i]) fail(ErrorKind::Validation, "measure entry differs");
    }
    return g;
  });
}

std::string to_json(const FormPencil& p, const std::optional<Provenance>& prov) {
  json doc;
  doc["schema"] = "pencil/1";
  doc["model"] = std::string(to_string(p.model));
  doc["level"] = p.level;
  doc["size"] = p.size();
  json triplets = json::array();
  for (int k = 0; k < p.stiffness.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(p.stiffness, k); it; ++it) {
      triplets.push_back(json::array({it.row(), it.col(), it.value()}));
    }
  }
  doc["L"] = std::move(triplets);
  doc["M"] = std::vector<double>(p.mass.data(), p.mass.data() + p.mass.size());
  stamp(doc, prov);
  return doc.dump(2);
}

FormPencil pencil_from_json(std::string_view text) {
  const json doc = parse_doc(text, "pencil/1");
  return guarded([&] {
    FormPencil p;
    p.model = parse_model(doc.at("model").get<std::string>());
    p.level = doc.at("level").get<int>();
    const auto n = doc.at("size").get<Eigen::Index>();
    const auto mass = doc.at("M").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(mass.size()) != n) fail(ErrorKind::Validation, "mass size mismatch");
    p.mass = Eigen::Map<const Eigen::VectorXd>(mass.data(), n);
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& t : doc.at("L")) {
      const auto i = t.at(0).get<Eigen::Index>();
      const auto j = t.at(1).get<Eigen::Index>();
      if (i < 0 || j < 0 || i >= n || j >= n) fail(ErrorKind::Validation, "triplet index out of range");
      trip.emplace_back(i, j, t.at(2).get<double>());
    }
    p.stiffness.resize(n, n);
    p.stiffness.setFromTriplets(trip.begin(), trip.end());
    return p;
  });
}

std::string to_json(const QueCertificate& c, const std::optional<Provenance>& prov) {
  json doc;
  doc["schema"] = "que-cert/1";
  doc["model"] = std::string(to_string(c.model));
  doc["m"] = c.coarse_level;
  doc["M"] = c.fine_level;
  doc["deltas"] = {{"a1", c.delta_a1}, {"a2", c.delta_a2},         {"b1", c.delta_b1}, {"b2", c.delta_b2},
                   {"bprime", c.delta_bprime}, {"c1", c.delta_c1}, {"c2", c.delta_c2}, {"d", c.delta_d}};
  doc["delta_total"] = c.delta_total;
  doc["paper_bound"] = c.paper_bound;
  doc["energy_bound_J"] = c.energy_bound_J;
  doc["energy_bound_sample"] = c.energy_bound_sample;
  doc["hypothesis_flags"] = {{"embed_energy_bounded", c.flags.embed_energy_bounded},
                             {"sample_energy_bounded", c.flags.sample_energy_bounded}};
  stamp(doc, prov);
  return doc.dump(2);
}

QueCertificate certificate_from_json(std::string_view text) {
  const json doc = parse_doc(text, "que-cert/1");
  return guarded([&] {
    QueCertificate c;
    c.model = parse_model(doc.at("model").get<std::string>());
    c.coarse_level = doc.at("m").get<int>();
    c.fine_level = doc.at("M").get<int>();
    const auto& d = doc.at("deltas");
    c.delta_a1 = d.at("a1").get<double>();
    c.delta_a2 = d.at("a2").get<double>();
    c.delta_b1 = d.at("b1").get<double>();
    c.delta_b2 = d.at("b2").get<double>();
    c.delta_bprime = d.at("bprime").get<double>();
    c.delta_c1 = d.at("c1").get<double>();
    c.delta_c2 = d.at("c2").get<double>();
    c.delta_d = d.at("d").get<double>();
    c.delta_total = doc.at("delta_total").get<double>();
    c.paper_bound = doc.at("paper_bound").get<double>();
    c.energy_bound_J = doc.at("energy_bound_J").get<double>();
    c.energy_bound_sample = doc.at("energy_bound_sample").get<double>();
    c.flags.embed_energy_bounded = doc.at("hypothesis_flags").at("embed_energy_bounded").get<bool>();
    c.flags.sample_energy_bounded = doc.at("hypothesis_flags").at("sample_energy_bounded").get<bool>();
    return c;
  });
}

std::uint64_t pencil_fingerprint(const FormPencil& p) {
  std::uint64_t h = fnv1a(std::string(to_string(p.model)) + ":" + std::to_string(p.level));
  auto mix = [&h](const void* data, std::size_t len) {
    h = fnv1a(std::string_view(static_cast<const char*>(data), len), h);
  };
  mix(p.mass.data(), sizeof(double) * static_cast<std::size_t>(p.mass.size()));
  for (int k = 0; k < p.stiffness.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(p.stiffness, k); it; ++it) {
      const Eigen::Index ij[2] = {it.row(), it.col()};
      const double v = it.value();
      mix(ij, sizeof ij);
      mix(&v, sizeof v);
    }
  }
  return h;
}

void write_decomposition(const std::filesystem::path& file, const SpectralDecomposition& d, std::uint64_t fingerprint) {
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Configuration, "cannot write cache file " + tmp.string());
    const std::int64_t header[4] = {static_cast<std::int64_t>(d.model), d.level, d.size(), d.eigenvectors.cols()};
    out.write(kEigMagic.data(), kEigMagic.size());
    out.write(reinterpret_cast<const char*>(&fingerprint), sizeof fingerprint);
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    out.write(reinterpret_cast<const char*>(d.eigenvalues.data()), sizeof(double) * d.eigenvalues.size());
    out.write(reinterpret_cast<const char*>(d.eigenvectors.data()), sizeof(double) * d.eigenvectors.size());
    out.write(reinterpret_cast<const char*>(d.mass.data()), sizeof(double) * d.mass.size());
    if (!out) fail(ErrorKind::Configuration, "short write to cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

std::optional<SpectralDecomposition> read_decomposition(const std::filesystem::path& file, std::uint64_t fingerprint) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  std::uint64_t fp = 0;
  std::int64_t header[4] = {};
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&fp), sizeof fp);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in || magic != kEigMagic || fp != fingerprint) return std::nullopt;
  const std::int64_t rows = header[2];
  const std::int64_t cols = header[3];
  if (rows < 0 || cols < 0 || cols > rows || rows > (1 << 16)) return std::nullopt;
  SpectralDecomposition d;
  d.model = static_cast<ModelKind>(header[0]);
  d.level = static_cast<int>(header[1]);
  d.eigenvalues.resize(cols);
  d.eigenvectors.resize(rows, cols);
  d.mass.resize(rows);
  in.read(reinterpret_cast<char*>(d.eigenvalues.data()), sizeof(double) * cols);
  in.read(reinterpret_cast<char*>(d.eigenvectors.data()), sizeof(double) * rows * cols);
  in.read(reinterpret_cast<char*>(d.mass.data()), sizeof(double) * rows);
  if (!in || in.peek() != std::char_traits<char>::eof()) return std::nullopt;
  return d;
}

}  // namespace que
