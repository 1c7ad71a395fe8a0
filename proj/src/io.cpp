#include "nodalcover/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nodalcover/error.hpp"

namespace nodalcover::io {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::kInvalidInput, std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("field \"") + key + "\": " + e.what());
  }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidInput, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidInput, "cannot write " + path.string());
  out << text;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

Json to_json(const SurfaceComplex& c) {
  Json edges = Json::array();
  for (const auto& e : c.edges) edges.push_back(Json::array({e.u, e.v, e.weight}));
  Json j{{"vertices", c.vertex_count}, {"edges", edges}, {"faces", c.faces}, {"mass", c.mass}, {"infinity_edges", c.infinity_edges}};
  if (!c.coords.empty()) {
    Json coords = Json::array();
    for (const auto& p : c.coords) coords.push_back(Json::array({p[0], p[1], p[2]}));
    j["coords"] = coords;
  }
  return j;
}

SurfaceComplex complex_from_json(const Json& j) {
  if (j.is_object() && j.contains("complex")) return complex_from_json(j.at("complex"));
  if (!j.is_object()) throw Error(ErrorCode::kInvalidInput, "complex must be a JSON object");
  SurfaceComplex c;
  c.vertex_count = field<int>(j, "vertices");
  for (const auto& e : field<Json>(j, "edges")) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) throw Error(ErrorCode::kInvalidInput, "edge must be [u, v] or [u, v, weight]");
    c.edges.push_back({e[0].get<int>(), e[1].get<int>(), e.size() == 3 ? e[2].get<double>() : 1.0});
  }
  c.faces = field_or<std::vector<std::vector<int>>>(j, "faces", {});
  c.mass = field_or<std::vector<double>>(j, "mass", std::vector<double>(static_cast<std::size_t>(std::max(c.vertex_count, 0)), 1.0));
  c.infinity_edges = field_or<std::vector<int>>(j, "infinity_edges", {});
  if (j.contains("coords"))
    for (const auto& p : j.at("coords")) {
      if (!p.is_array() || p.size() < 2 || p.size() > 3) throw Error(ErrorCode::kInvalidInput, "coordinate must have 2 or 3 entries");
      c.coords.push_back({p[0].get<double>(), p[1].get<double>(), p.size() == 3 ? p[2].get<double>() : 0.0});
    }
  validate(c);
  return c;
}

Json to_json(const CoverSpec& spec, const Json& base_ref) {
  std::vector<int> tree;
  for (std::size_t e = 0; e < spec.tree.size(); ++e)
    if (spec.tree[e]) tree.push_back(static_cast<int>(e));
  Json volts = Json::object();
  for (const auto& [e, p] : spec.voltages) volts[std::to_string(e)] = p;
  return Json{{"base", base_ref}, {"degree", spec.degree}, {"tree", tree}, {"voltages", volts}};
}

CoverSpec cover_spec_from_json(const Json& j, const SurfaceComplex& base) {
  CoverSpec spec;
  spec.degree = field<int>(j, "degree");
  if (spec.degree < 1) throw Error(ErrorCode::kInvalidInput, "degree must be positive");
  if (j.contains("tree")) {
    spec.tree.assign(base.edges.size(), false);
    for (int e : field<std::vector<int>>(j, "tree")) {
      if (e < 0 || e >= base.edge_count()) throw Error(ErrorCode::kInvalidInput, "tree edge " + std::to_string(e) + " out of range");
      spec.tree[static_cast<std::size_t>(e)] = true;
    }
  } else {
    spec.tree = canonical_spanning_tree(base);
  }
  const Json voltages = field_or<Json>(j, "voltages", Json::object());
  for (const auto& [key, perm] : voltages.items()) {
    int e;
    try {
      e = std::stoi(key);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidInput, "voltage key \"" + key + "\" is not an edge id");
    }
    spec.voltages[e] = perm.get<Perm>();
  }
  validate(base, spec);
  return spec;
}

SurfaceComplex load_complex(const std::filesystem::path& path) { return complex_from_json(read_json_file(path)); }

LoadedCover load_cover(const std::filesystem::path& path) {
  Json j = read_json_file(path);
  if (j.contains("cover")) j = j.at("cover");
  LoadedCover out;
  const Json& base = field<Json>(j, "base");
  if (base.is_string()) {
    std::filesystem::path p = base.get<std::string>();
    if (p.is_relative()) p = path.parent_path() / p;
    out.base = load_complex(p);
  } else {
    out.base = complex_from_json(base);
  }
  out.spec = cover_spec_from_json(j, out.base);
  out.cover = build_cover(out.base, out.spec);
  return out;
}

Json to_json(const Presentation& p) { return Json{{"rank", p.rank}, {"relators", p.relators}}; }

Presentation presentation_from_json(const Json& j) {
  Presentation p{field<int>(j, "rank"), field_or<std::vector<Word>>(j, "relators", {})};
  validate(p);
  return p;
}

Json to_json(const CosetAction& a) { return Json{{"degree", a.degree}, {"perms", a.perms}}; }

CosetAction action_from_json(const Json& j) {
  CosetAction a{field<int>(j, "degree"), field<std::vector<Perm>>(j, "perms")};
  validate(a);
  return a;
}

Json words_to_json(const std::vector<Word>& words) { return Json(words); }

std::vector<Word> words_from_json(const Json& j) {
  const Json& w = j.is_object() ? j.at("words") : j;
  try {
    return w.get<std::vector<Word>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("words: ") + e.what());
  }
}

Json to_json(const Spectrum& s, bool with_vectors) {
  Json j{{"values", s.values},     {"clusters", s.cluster},     {"residuals", s.residuals},
         {"cluster_gap", s.cluster_gap}, {"dimension", s.dimension}, {"complete", s.complete()},
         {"iterations", s.iterations}, {"seed", s.seed},         {"tol", s.tol}};
  if (with_vectors) {
    Json cols = Json::array();
    for (Eigen::Index k = 0; k < s.vectors.cols(); ++k) {
      std::vector<double> col(s.vectors.col(k).data(), s.vectors.col(k).data() + s.vectors.rows());
      cols.push_back(col);
    }
    j["vectors"] = cols;
  }
  return j;
}

std::string spectrum_csv(const Spectrum& s) {
  std::string out = "index,eigenvalue,cluster,residual\n";
  for (int i = 0; i < s.size(); ++i)
    out += std::to_string(i) + "," + num(s.values[static_cast<std::size_t>(i)]) + "," + std::to_string(s.cluster[static_cast<std::size_t>(i)]) +
           "," + num(s.residuals[static_cast<std::size_t>(i)]) + "\n";
  return out;
}

std::string operator_triplets(const LaplaceOperator& op) {
  std::ostringstream out;
  out << "# stiffness\n" << op.stiffness.rows() << " " << op.stiffness.cols() << " " << op.stiffness.nonZeros() << "\n";
  for (int k = 0; k < op.stiffness.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op.stiffness, k); it; ++it) out << it.row() << " " << it.col() << " " << num(it.value()) << "\n";
  out << "# mass\n" << op.mass.size() << " " << op.mass.size() << " " << op.mass.size() << "\n";
  for (Eigen::Index i = 0; i < op.mass.size(); ++i) out << i << " " << i << " " << num(op.mass(i)) << "\n";
  return out.str();
}

Json to_json(const DomainTopology& t) {
  return Json{{"orientable", t.orientable}, {"genus", t.genus}, {"doors", t.doors}, {"exits", t.exits}, {"chi", t.chi}, {"mu", t.mu}};
}

Json to_json(const NodalDecomposition& d) {
  Json domains = Json::array();
  for (const auto& dom : d.domains) domains.push_back(Json{{"sign", dom.sign}, {"vertices", dom.vertices}, {"topology", to_json(dom.topology)}});
  return Json{{"count", d.count()},
              {"domains", domains},
              {"zero_set", d.zero_set},
              {"zero_threshold", d.zero_threshold},
              {"single_sign", d.single_sign}};
}

Json to_json(const CocycleSet& s) {
  Json comps = Json::array();
  for (const auto& c : s.components) comps.push_back(Json{{"vertices", c.vertices}, {"cocycle_count", c.cocycle_count}});
  Json cocycles = Json::array();
  for (const auto& w : s.cocycles)
    cocycles.push_back(Json{{"component", w.component},
                            {"coefficients", w.coefficients == Coefficients::kMod2 ? "mod2" : "integers"},
                            {"values", w.values}});
  return Json{{"components", comps}, {"cocycles", cocycles}};
}

Json to_json(const UnstableCoverPlan& plan, const Json& base_ref) {
  return Json{{"degree", plan.degree},
              {"domain", plan.domain},
              {"cocycle_index", plan.cocycle_index},
              {"cocycles_available", plan.cocycles_available},
              {"mu_used", plan.mu_used},
              {"predicted_increase", plan.predicted_increase},
              {"coefficients", plan.coefficients == Coefficients::kMod2 ? "mod2" : "integers"},
              {"cover", to_json(plan.spec, base_ref)}};
}

Json to_json(const BoundLedger& ledger) {
  Json out = Json::array();
  for (const auto& b : ledger)
    out.push_back(Json{{"name", b.name}, {"claimed", b.claimed}, {"observed", b.observed}, {"holds", b.holds}, {"tight", b.tight}});
  return out;
}

std::string ledger_csv(const BoundLedger& ledger) {
  std::string out = "name,claimed,observed,holds,tight\n";
  for (const auto& b : ledger)
    out += b.name + "," + num(b.claimed) + "," + num(b.observed) + "," + (b.holds ? "true" : "false") + "," + (b.tight ? "true" : "false") + "\n";
  return out;
}

Json to_json(const StabilityReport& r) {
  Json target = r.target.eigen_index >= 0 ? Json{{"eigen_index", r.target.eigen_index}}
                                          : Json{{"lower", r.target.lower}, {"upper", r.target.upper}};
  return Json{{"target", target},
              {"label", r.target.label()},
              {"lambda", r.lambda},
              {"margin", r.margin},
              {"base", {{"open", r.base_open}, {"closed", r.base_closed}, {"multiplicity", r.base_multiplicity}, {"seed", r.base_seed}, {"tol", r.base_tol}}},
              {"cover", {{"open", r.cover_open}, {"closed", r.cover_closed}, {"multiplicity", r.cover_multiplicity}, {"seed", r.cover_seed}, {"tol", r.cover_tol}}},
              {"gap_ratio", r.gap_ratio},
              {"verdict", to_string(r.verdict)},
              {"note", r.note},
              {"ledger", to_json(r.ledger)}};
}

Json to_json(const LiftingReport& r) {
  Json domains = Json::array();
  for (const auto& d : r.domains)
    domains.push_back(Json{{"domain", d.domain}, {"components", d.components}, {"sheet_multiplicities", d.sheet_multiplicities}, {"simply_connected", d.simply_connected}});
  return Json{{"lambda", r.lambda},
              {"base_open", r.base_open},
              {"cover_open", r.cover_open},
              {"domains", domains},
              {"test_space_dimension", r.test_space_dimension},
              {"expected_dimension", r.expected_dimension},
              {"integral_residual", r.integral_residual},
              {"integral_samples", r.integral_samples},
              {"ledger", to_json(r.ledger)}};
}

Json to_json(const SigmaEstimate& s) {
  return Json{{"generator_budget", s.generator_budget}, {"value", s.value}, {"witness", s.witness}, {"witness_generators", s.witness_generators}};
}

Json to_json(const GeneratorBoundReport& r) {
  return Json{{"min_generators", r.min_generators}, {"generator_budget", r.generator_budget}, {"sigma", r.sigma},
              {"cover_closed", r.cover_closed}, {"witness_components", r.witness_components}, {"ledger", to_json(r.ledger)}};
}

Json to_json(const TowerTrajectory& t) {
  Json levels = Json::array();
  for (const auto& l : t.levels) {
    Json e{{"level", l.level}, {"degree", l.degree}, {"vertices", l.vertices}, {"value", l.value}};
    e["stage_unstable"] = l.stage_unstable ? Json(*l.stage_unstable) : Json(nullptr);
    e["composite_unstable"] = l.composite_unstable ? Json(*l.composite_unstable) : Json(nullptr);
    levels.push_back(e);
  }
  return Json{{"index", t.index}, {"roof", t.roof}, {"margin", t.margin}, {"levels", levels}, {"entered_at", t.entered_at},
              {"nonincreasing", t.nonincreasing}, {"composition_holds", t.composition_holds}, {"ledger", to_json(t.ledger)}};
}

std::string tower_csv(const TowerTrajectory& t) {
  std::string out = "level,degree,vertices,value\n";
  for (const auto& l : t.levels) out += std::to_string(l.level) + "," + std::to_string(l.degree) + "," + std::to_string(l.vertices) + "," + num(l.value) + "\n";
  return out;
}

Json to_json(const ContainmentReport& r) {
  return Json{{"n", r.n}, {"subgroups_n", r.subgroups_n}, {"subgroups_2n", r.subgroups_2n}, {"max_containment", r.max_containment},
              {"allowed", r.allowed}, {"implied_lower_bound", r.implied_lower_bound}, {"holds", r.holds}};
}

Json to_json(const CountLedger& r) {
  return Json{{"containment", to_json(r.containment)}, {"assumption", r.assumption}, {"ledger", to_json(r.ledger)}};
}

Json to_json(const RespecRecord& r) {
  return Json{{"seed", r.seed},           {"dim_x", r.dim_x},
              {"dim_x_null", r.dim_x_null}, {"dim_px", r.dim_px},
              {"dim_neg_minus_y", r.dim_neg_minus_y}, {"dim_x_kernel_p", r.dim_x_kernel_p},
              {"px_y_residual", r.px_y_residual}, {"kernel_null_residual", r.kernel_null_residual},
              {"equality", r.equality},     {"inequality", r.inequality},
              {"pass", r.pass}};
}

std::string respec_csv(const std::vector<RespecRecord>& records) {
  std::string out = "seed,dim_x,dim_x_null,dim_px,dim_neg_minus_y,pass\n";
  for (const auto& r : records)
    out += std::to_string(r.seed) + "," + std::to_string(r.dim_x) + "," + std::to_string(r.dim_x_null) + "," + std::to_string(r.dim_px) + "," +
           std::to_string(r.dim_neg_minus_y) + "," + (r.pass ? "true" : "false") + "\n";
  return out;
}

Json to_json(const OrbitBoundRecord& r) {
  return Json{{"min_generators", r.min_generators}, {"subgroup_generators", r.subgroup_generators}, {"orbit_count", r.orbit_count}, {"bound", r.bound}, {"holds", r.holds}};
}

Json weyl_json(const std::vector<WeylPoint>& curve) {
  Json out = Json::array();
  for (const auto& p : curve)
    out.push_back(Json{{"lambda", p.lambda}, {"base", p.base}, {"cover", p.cover}, {"ratio", p.ratio}, {"certified", p.certified}});
  return out;
}

std::string weyl_csv(const std::vector<WeylPoint>& curve) {
  std::string out = "lambda,base,cover,ratio,certified\n";
  for (const auto& p : curve)
    out += num(p.lambda) + "," + std::to_string(p.base) + "," + std::to_string(p.cover) + "," + num(p.ratio) + "," + (p.certified ? "true" : "false") + "\n";
  return out;
}

}  // namespace nodalcover::io
