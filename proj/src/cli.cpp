#include "nodalcover/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "nodalcover/error.hpp"

namespace nodalcover {

using io::Json;

Json to_json(const RunConfig& cfg) {
  return Json{{"solver", {{"m", cfg.m}, {"tol", cfg.tol}, {"seed", cfg.seed}, {"max_iterations", cfg.max_iterations}}},
              {"margins", {{"count", cfg.margin}, {"cluster_relative", cfg.cluster_relative}, {"cluster_floor", cfg.cluster_floor}}},
              {"zero_eps", cfg.zero_eps},
              {"enumeration", {{"max_index", cfg.max_index}, {"degree_cap", cfg.degree_cap}}},
              {"kind", cfg.kind}};
}

void apply_config(RunConfig& cfg, const Json& j) {
  try {
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      cfg.m = s.value("m", cfg.m);
      cfg.tol = s.value("tol", cfg.tol);
      cfg.seed = s.value("seed", cfg.seed);
      cfg.max_iterations = s.value("max_iterations", cfg.max_iterations);
    }
    if (j.contains("margins")) {
      const auto& m = j.at("margins");
      cfg.margin = m.value("count", cfg.margin);
      cfg.cluster_relative = m.value("cluster_relative", cfg.cluster_relative);
      cfg.cluster_floor = m.value("cluster_floor", cfg.cluster_floor);
    }
    cfg.zero_eps = j.value("zero_eps", cfg.zero_eps);
    if (j.contains("enumeration")) {
      const auto& e = j.at("enumeration");
      cfg.max_index = e.value("max_index", cfg.max_index);
      cfg.degree_cap = e.value("degree_cap", cfg.degree_cap);
    }
    cfg.kind = j.value("kind", cfg.kind);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidParams, std::string("config: ") + e.what());
  }
}

void validate(const RunConfig& cfg) {
  if (cfg.m < 1 || cfg.max_iterations < 1) throw Error(ErrorCode::kInvalidParams, "solver count and iteration cap must be positive");
  if (!(cfg.tol > 0 && cfg.margin > 0 && cfg.cluster_relative > 0 && cfg.cluster_floor > 0 && cfg.zero_eps > 0))
    throw Error(ErrorCode::kInvalidParams, "all tolerances must be positive");
  if (cfg.max_index < 0 || cfg.degree_cap < 1) throw Error(ErrorCode::kInvalidParams, "enumeration bounds must be positive");
  if (cfg.kind != "graph" && cfg.kind != "cotangent") throw Error(ErrorCode::kInvalidParams, "kind must be graph or cotangent");
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Session {
  RunConfig cfg;
  std::string format = "json";
  std::string output;
  int jobs = 1;
  std::ostream* out = nullptr;

  Json meta() const {
    return Json{{"schema_version", io::kSchemaVersion}, {"seed", cfg.seed}, {"config_hash", io::hex64(io::fnv1a(to_json(cfg).dump()))}};
  }
  bool csv() const { return format == "csv"; }
  void json_only() const {
    if (csv()) throw UsageError("this command has no csv output");
  }
  void write(const std::string& text) const {
    if (output.empty())
      *out << text;
    else
      io::write_text_file(output, text);
  }
  void emit(Json payload) const {
    payload["meta"] = meta();
    write(payload.dump(2) + "\n");
  }
  void emit_csv(const std::string& body) const {
    const Json m = meta();
    write("# schema_version=" + std::to_string(io::kSchemaVersion) + " seed=" + std::to_string(cfg.seed) +
          " config_hash=" + m["config_hash"].get<std::string>() + "\n" + body);
  }
  LaplaceKind kind() const { return cfg.kind == "cotangent" ? LaplaceKind::kCotangent : LaplaceKind::kGraph; }
  SolverOptions solver(int count) const {
    SolverOptions o;
    o.count = count;
    o.tol = cfg.tol;
    o.seed = cfg.seed;
    o.max_iterations = cfg.max_iterations;
    o.cluster_relative = cfg.cluster_relative;
    o.cluster_floor = cfg.cluster_floor;
    return o;
  }
  /// Lowest eigenpairs, doubling the count until the spectrum reaches past lambda + 2 margin.
  Spectrum spectrum_past(const LaplaceOperator& op, double lambda, int min_count) const {
    int m = std::min(std::max(cfg.m, min_count), op.dim());
    while (true) {
      auto s = lowest_eigenpairs(op, solver(m));
      if (s.complete() || s.values.back() > lambda + 2.0 * cfg.margin) return s;
      m = std::min(2 * m, op.dim());
    }
  }
  /// Base spectrum certified past lambda_k, returning lambda_k.
  std::pair<Spectrum, double> spectrum_at_index(const LaplaceOperator& op, int k) const {
    if (k < 0 || k >= op.dim()) throw Error(ErrorCode::kIndexOutOfRange, "eigenvalue index out of range");
    auto first = lowest_eigenpairs(op, solver(std::min(std::max(cfg.m, k + 2), op.dim())));
    double lambda = first.values[static_cast<std::size_t>(k)];
    return {spectrum_past(op, lambda, first.size()), lambda};
  }
};

std::vector<int> parse_int_list(const Json& j) {
  const Json& v = j.is_object() ? j.at("vertices") : j;
  return v.get<std::vector<int>>();
}

std::string relative_to_output(const std::string& input, const std::string& output) {
  if (output.empty()) return input;
  namespace fs = std::filesystem;
  auto dir = fs::absolute(output).parent_path();
  return fs::relative(fs::absolute(input), dir).generic_string();
}

SurfaceComplex checked_base(const std::string& base_path, const io::LoadedCover& lc) {
  if (base_path.empty()) return lc.base;
  auto base = io::load_complex(base_path);
  if (base.vertex_count != lc.base.vertex_count || base.edge_count() != lc.base.edge_count())
    throw Error(ErrorCode::kInvalidInput, "base complex does not match the cover's base");
  return base;
}

Presentation pick_presentation(int free_rank, int genus, const std::string& file) {
  int chosen = (free_rank > 0) + (genus > 0) + !file.empty();
  if (chosen != 1) throw UsageError("choose exactly one of --free, --surface, --presentation");
  if (free_rank > 0) return free_group(free_rank);
  if (genus > 0) return surface_group(genus);
  return io::presentation_from_json(io::read_json_file(file));
}

int exit_for(const BoundLedger& ledger) { return all_hold(ledger) ? kExitOk : kExitBoundViolated; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Session session;
  session.out = &out;
  std::string config_path;
  std::function<int()> action;

  CLI::App app{"Spectral instability under finite covers of discrete surfaces", "nodalcover"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nodalcover 0.1.0");
  app.add_option("--config", config_path, "JSON config file (default from $NODALCOVER_CONFIG)");
  app.add_option("--format", session.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("-o,--output", session.output, "Write output to this file");
  app.add_option("--jobs", session.jobs, "Parallel jobs")->check(CLI::PositiveNumber);
  auto* o_m = app.add_option("--m", session.cfg.m, "Number of eigenpairs");
  auto* o_tol = app.add_option("--tol", session.cfg.tol, "Residual tolerance");
  auto* o_seed = app.add_option("--seed", session.cfg.seed, "Random seed");
  auto* o_iter = app.add_option("--max-iter", session.cfg.max_iterations, "Solver iteration cap");
  auto* o_margin = app.add_option("--margin", session.cfg.margin, "Counting margin");
  auto* o_eps = app.add_option("--zero-eps", session.cfg.zero_eps, "Relative nodal zero threshold");
  auto* o_kind = app.add_option("--kind-laplace", session.cfg.kind, "graph or cotangent");
  auto* o_cap = app.add_option("--degree-cap", session.cfg.degree_cap, "Degree cap for generator searches");
  auto* o_maxidx = app.add_option("--max-index", session.cfg.max_index, "Enumeration index bound override");
  std::vector<CLI::Option*> overrides{o_m, o_tol, o_seed, o_iter, o_margin, o_eps, o_kind, o_cap, o_maxidx};

  auto sub = [](CLI::App* parent, const std::string& name, const std::string& help) {
    auto* s = parent->add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  // surface
  auto* surface = sub(&app, "surface", "Build and inspect complexes");
  surface->require_subcommand(1);
  std::string kind_name;
  std::vector<int> params;
  auto* make = sub(surface, "make", "Emit a preset complex");
  make->add_option("--kind", kind_name, "cycle, path, grid_torus, genus_g_polygon, annulus, moebius")->required();
  make->add_option("--params", params, "Preset parameters")->delimiter(',')->required();
  make->callback([&] {
    action = [&] {
      auto kind = parse_preset_kind(kind_name);
      if (!kind) throw UsageError("unknown preset kind " + kind_name);
      session.json_only();
      session.emit(io::to_json(build_preset(*kind, params)));
      return kExitOk;
    };
  });
  std::string input;
  auto* info = sub(surface, "info", "Topological invariants of a complex");
  info->add_option("--input", input, "Complex JSON")->required();
  info->callback([&] {
    action = [&] {
      session.json_only();
      auto c = io::load_complex(input);
      auto h = homology_h1(c);
      std::vector<std::string> torsion;
      for (const auto& t : h.torsion) torsion.push_back(t.str());
      std::string orient = c.orientation == Orientability::kOrientable ? "orientable"
                           : c.orientation == Orientability::kNonOrientable ? "non-orientable" : "graph";
      session.emit(Json{{"vertices", c.vertex_count}, {"edges", c.edge_count()}, {"faces", c.face_count()},
                        {"euler_characteristic", euler_characteristic(c)}, {"orientation", orient},
                        {"components", connected_components(c).size()}, {"h1", {{"rank", h.rank}, {"torsion", torsion}}}});
      return kExitOk;
    };
  });

  // cover
  auto* cover = sub(&app, "cover", "Build covers and lift subsets");
  cover->require_subcommand(1);
  std::string cover_path, subset_path, base_path;
  std::vector<int> vertices;
  auto* cbuild = sub(cover, "build", "Build the total complex of a cover");
  cbuild->add_option("--cover", cover_path, "Cover JSON")->required();
  cbuild->callback([&] {
    action = [&] {
      session.json_only();
      auto lc = io::load_cover(cover_path);
      session.emit(Json{{"complex", io::to_json(lc.cover.total)}, {"degree", lc.cover.degree}, {"connected", lc.cover.connected},
                        {"monodromy", io::to_json(lc.cover.monodromy)}});
      return kExitOk;
    };
  });
  auto* ccomp = sub(cover, "components", "Components of the preimage of a subset");
  ccomp->add_option("--cover", cover_path, "Cover JSON")->required();
  ccomp->add_option("--subset", subset_path, "Subset JSON (array or {\"vertices\": [...]})");
  ccomp->add_option("--vertices", vertices, "Subset vertices")->delimiter(',');
  ccomp->callback([&] {
    action = [&] {
      session.json_only();
      auto lc = io::load_cover(cover_path);
      std::vector<int> sub_vertices = subset_path.empty() ? vertices : parse_int_list(io::read_json_file(subset_path));
      if (sub_vertices.empty()) throw UsageError("give --subset or --vertices");
      std::sort(sub_vertices.begin(), sub_vertices.end());
      auto comps = preimage_components(lc.cover, sub_vertices);
      Json payload{{"subset", sub_vertices}, {"components", comps}, {"count", comps.size()}};
      if (induced_components(lc.base, sub_vertices).size() != 1) {
        session.emit(payload);
        return kExitOk;
      }
      auto words = subdomain_group(lc.base, lc.spec.tree, sub_vertices, sub_vertices.front());
      auto orbs = orbits(lc.cover.monodromy, words);
      payload["orbit_count"] = orbs.size();
      payload["subgroup_words"] = io::words_to_json(words);
      session.emit(payload);
      return comps.size() == orbs.size() ? kExitOk : kExitBoundViolated;
    };
  });

  // group
  auto* group = sub(&app, "group", "Presentations and coset actions");
  group->require_subcommand(1);
  int free_rank = 0, genus = 0, index = 0;
  std::string presentation_path, action_path, words_path;
  std::vector<int> orders;
  auto* genum = sub(group, "enum", "Transitive actions of a given index");
  genum->add_option("--index", index, "Index n")->required()->check(CLI::PositiveNumber);
  genum->add_option("--free", free_rank, "Free group of this rank");
  genum->add_option("--surface", genus, "Surface group of this genus");
  genum->add_option("--presentation", presentation_path, "Presentation JSON");
  genum->callback([&] {
    action = [&] {
      auto p = pick_presentation(free_rank, genus, presentation_path);
      auto actions = enumerate_index_n(p, index, session.cfg.max_index);
      if (session.csv()) {
        session.emit_csv("index,count\n" + std::to_string(index) + "," + std::to_string(actions.size()) + "\n");
        return kExitOk;
      }
      Json list = Json::array();
      for (const auto& a : actions) list.push_back(io::to_json(a));
      session.emit(Json{{"presentation", io::to_json(p)}, {"index", index}, {"count", actions.size()}, {"actions", list}});
      return kExitOk;
    };
  });
  auto* gorb = sub(group, "orbits", "Orbits of a subgroup on the cosets");
  gorb->add_option("--action", action_path, "CosetAction JSON")->required();
  gorb->add_option("--words", words_path, "Subgroup generators as words (JSON)")->required();
  gorb->callback([&] {
    action = [&] {
      session.json_only();
      auto a = io::action_from_json(io::read_json_file(action_path));
      auto words = io::words_from_json(io::read_json_file(words_path));
      auto orbs = orbits(a, words);
      Json payload{{"orbits", orbs}, {"count", orbs.size()}};
      if (a.degree <= session.cfg.degree_cap && is_transitive(a)) {
        auto rec = orbit_lower_bound_check(a, words, session.cfg.degree_cap);
        payload["bound"] = io::to_json(rec);
        session.emit(payload);
        return rec.holds ? kExitOk : kExitBoundViolated;
      }
      session.emit(payload);
      return kExitOk;
    };
  });
  auto* gmu = sub(group, "mu", "Minimal generator count of a finite abelian group");
  gmu->add_option("--orders", orders, "Cyclic factor orders")->delimiter(',')->required();
  gmu->callback([&] {
    action = [&] {
      session.json_only();
      AbelianInvariants inv;
      for (int k : orders) {
        if (k < 1) throw Error(ErrorCode::kInvalidParams, "orders must be positive");
        if (k > 1) inv.torsion.push_back(BigInt(k));
      }
      Json payload{{"orders", orders}, {"mu", abelian_mu(inv)}};
      long long order = 1;
      for (int k : orders) order *= k;
      if (order <= session.cfg.degree_cap) payload["min_generators_coset"] = min_generators_coset(regular_abelian_action(orders), session.cfg.degree_cap);
      session.emit(payload);
      return kExitOk;
    };
  });

  // spec
  auto* spec = sub(&app, "spec", "Laplace spectra");
  spec->require_subcommand(1);
  bool dense = false, with_vectors = false;
  std::string operator_path;
  auto* compute = sub(spec, "compute", "Lowest eigenpairs of a complex");
  compute->add_option("--input", input, "Complex JSON")->required();
  compute->add_flag("--dense", dense, "Use the dense solver");
  compute->add_flag("--vectors", with_vectors, "Include eigenvectors in JSON");
  compute->add_option("--export-operator", operator_path, "Write the operator as coordinate triplets");
  compute->callback([&] {
    action = [&] {
      auto c = io::load_complex(input);
      auto op = assemble(c, session.kind());
      if (!operator_path.empty()) io::write_text_file(operator_path, io::operator_triplets(op));
      auto opt = session.solver(std::min(session.cfg.m, op.dim()));
      auto s = dense ? dense_eigenpairs(op, opt) : lowest_eigenpairs(op, opt);
      if (session.csv())
        session.emit_csv(io::spectrum_csv(s));
      else
        session.emit(Json{{"spectrum", io::to_json(s, with_vectors)}, {"kind", session.cfg.kind}});
      return kExitOk;
    };
  });

  // nodal
  auto* nodal = sub(&app, "nodal", "Nodal domains and unstable cover plans");
  nodal->require_subcommand(1);
  int eigen = 1, domain = 0, degree = 2;
  std::string vector_path;
  auto* analyze = sub(nodal, "analyze", "Nodal decomposition of an eigenvector");
  analyze->add_option("--input", input, "Complex JSON")->required();
  analyze->add_option("--eigen", eigen, "Eigenvalue index (canonical cluster representative)");
  analyze->add_option("--vector", vector_path, "Explicit vector (JSON array) instead of an eigenvector");
  analyze->callback([&] {
    action = [&] {
      session.json_only();
      auto c = io::load_complex(input);
      Json payload;
      Eigen::VectorXd phi;
      if (!vector_path.empty()) {
        auto v = io::read_json_file(vector_path).get<std::vector<double>>();
        phi = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      } else {
        auto [s, lambda] = session.spectrum_at_index(assemble(c, session.kind()), eigen);
        int cluster = s.cluster[static_cast<std::size_t>(eigen)];
        phi = canonical_cluster_vector(s, cluster, session.cfg.seed);
        payload["lambda"] = lambda;
        payload["cluster"] = cluster;
        payload["multiplicity"] = s.cluster_members(cluster).size();
      }
      auto d = nodal_decomposition(c, phi, session.cfg.zero_eps);
      payload["decomposition"] = io::to_json(d);
      if (d.count() >= 2 && !d.single_sign) {
        auto b = nodal_count_bound_data(c, d);
        payload["count_bound"] = Json{{"domain_count", b.domain_count}, {"surface_chi", b.surface_chi}, {"best_domain", b.best_domain},
                                      {"best_chi", b.best_chi}, {"lower_holds", b.lower_holds}, {"upper_holds", b.upper_holds},
                                      {"closed", b.closed}, {"surface_generators", b.surface_generators},
                                      {"coset_generator_bound", b.coset_generator_bound}};
        Json cocycles = Json::array();
        for (int u = 0; u < d.count(); ++u) cocycles.push_back(io::to_json(intersection_cocycles(c, d, u)));
        payload["intersection_cocycles"] = cocycles;
      }
      session.emit(payload);
      return kExitOk;
    };
  });
  auto* plan = sub(nodal, "plan", "Cyclic cover predicted to be unstable");
  plan->add_option("--input", input, "Complex JSON")->required();
  plan->add_option("--eigen", eigen, "Eigenvalue index");
  plan->add_option("--domain", domain, "Nodal domain index");
  plan->add_option("--degree", degree, "Cover degree")->check(CLI::PositiveNumber);
  plan->callback([&] {
    action = [&] {
      session.json_only();
      auto c = io::load_complex(input);
      auto [s, lambda] = session.spectrum_at_index(assemble(c, session.kind()), eigen);
      auto phi = canonical_cluster_vector(s, s.cluster[static_cast<std::size_t>(eigen)], session.cfg.seed);
      auto d = nodal_decomposition(c, phi, session.cfg.zero_eps);
      auto p = unstable_cover_plan(c, d, domain, degree);
      Json payload = io::to_json(p, relative_to_output(input, session.output));
      payload["lambda"] = lambda;
      payload["base_open"] = count_below(s, lambda, CountMode::kOpen, session.cfg.margin);
      payload["cover_open_lower_bound"] = payload["base_open"].get<int>() + p.predicted_increase;
      session.emit(payload);
      return kExitOk;
    };
  });

  // stab
  auto* stab = sub(&app, "stab", "Stability experiments");
  stab->require_subcommand(1);
  std::string target = "lambda1";
  std::vector<double> interval, grid;
  auto* verdict = sub(stab, "verdict", "Stability verdict of a cover");
  verdict->add_option("--cover", cover_path, "Cover JSON")->required();
  verdict->add_option("--base", base_path, "Base complex (must match the cover's base)");
  verdict->add_option("--target", target, "lambdaK");
  verdict->add_option("--interval", interval, "Closed interval a,b")->delimiter(',')->expected(2);
  verdict->callback([&] {
    action = [&] {
      session.json_only();
      auto lc = io::load_cover(cover_path);
      if (!lc.cover.connected) throw Error(ErrorCode::kDisconnectedInput, "cover is not connected");
      auto base = checked_base(base_path, lc);
      auto bop = assemble(base, session.kind()), cop = assemble(lc.cover.total, session.kind());
      Target t;
      Spectrum bs;
      double lambda;
      if (!interval.empty()) {
        t = Target::interval(interval[0], interval[1]);
        lambda = interval[1];
        bs = session.spectrum_past(bop, lambda, 1);
      } else {
        if (target.rfind("lambda", 0) != 0) throw UsageError("target must look like lambda1");
        int k = std::stoi(target.substr(6));
        t = Target::eigenvalue(k);
        std::tie(bs, lambda) = session.spectrum_at_index(bop, k);
      }
      auto cs = session.spectrum_past(cop, lambda, 1);
      auto r = stability_verdict(bs, cs, t, session.cfg.margin);
      session.emit(io::to_json(r));
      if (r.verdict == Verdict::kAmbiguous) return static_cast<int>(kExitAmbiguous);
      return exit_for(r.ledger);
    };
  });
  auto* numberg = sub(stab, "numberg", "Nodal lifting bound");
  numberg->add_option("--cover", cover_path, "Cover JSON")->required();
  numberg->add_option("--base", base_path, "Base complex (must match the cover's base)");
  numberg->add_option("--eigen", eigen, "Eigenvalue index");
  numberg->callback([&] {
    action = [&] {
      auto lc = io::load_cover(cover_path);
      auto base = checked_base(base_path, lc);
      auto [bs, lambda] = session.spectrum_at_index(assemble(base, session.kind()), eigen);
      auto cs = session.spectrum_past(assemble(lc.cover.total, session.kind()), lambda, 1);
      auto phi = canonical_cluster_vector(bs, bs.cluster[static_cast<std::size_t>(eigen)], session.cfg.seed);
      auto r = numberg_check(base, lc.cover, bs, cs, phi, lambda, session.cfg.margin, session.cfg.zero_eps, session.cfg.seed);
      if (session.csv())
        session.emit_csv(io::ledger_csv(r.ledger));
      else
        session.emit(io::to_json(r));
      return exit_for(r.ledger);
    };
  });
  std::vector<int> cut;
  int height = 0, level_index = 1;
  double roof = 0.0, roof_margin = 1e-8;
  auto* tower = sub(stab, "tower", "Eigenvalue trajectory along a doubling tower");
  tower->add_option("--input", input, "Base complex JSON")->required();
  tower->add_option("--cut", cut, "Base edges carrying the doubling cocycle")->delimiter(',')->required();
  tower->add_option("--height", height, "Number of doublings")->required();
  tower->add_option("--index", level_index, "Eigenvalue index l");
  tower->add_option("--roof", roof, "Roof value");
  tower->add_option("--roof-margin", roof_margin, "Margin above the roof");
  tower->callback([&] {
    action = [&] {
      auto t = doubling_tower(io::load_complex(input), cut, height);
      auto traj = tower_experiment(t, level_index, roof, roof_margin, session.solver(session.cfg.m));
      if (session.csv())
        session.emit_csv(io::tower_csv(traj));
      else
        session.emit(io::to_json(traj));
      return exit_for(traj.ledger);
    };
  });
  auto* count = sub(stab, "count", "Counting unstable covers of index 2n");
  count->add_option("--index", index, "Index n")->required()->check(CLI::PositiveNumber);
  count->add_option("--free", free_rank, "Free group of this rank");
  count->add_option("--surface", genus, "Surface group of this genus");
  count->add_option("--presentation", presentation_path, "Presentation JSON");
  count->callback([&] {
    action = [&] {
      auto r = count_experiment(pick_presentation(free_rank, genus, presentation_path), index);
      if (session.csv())
        session.emit_csv(io::ledger_csv(r.ledger));
      else
        session.emit(io::to_json(r));
      return exit_for(r.ledger);
    };
  });
  int random_count = 0, dim = 50;
  auto* respec = sub(stab, "respec", "Linear algebra lemma on random and trivial instances");
  respec->add_option("--random", random_count, "Number of random instances");
  respec->add_option("--dim", dim, "Dimension of random instances");
  respec->callback([&] {
    action = [&] {
      std::vector<RespecInstance> instances = trivial_respec_instances();
      const std::size_t trivial = instances.size();
      instances.resize(trivial + static_cast<std::size_t>(std::max(random_count, 0)));
      std::vector<RespecRecord> records(instances.size());
      std::vector<std::string> failures(instances.size());
      auto work = [&](std::size_t i) {
        try {
          if (i >= trivial) instances[i] = random_respec_instance(dim, session.cfg.seed + (i - trivial));
          records[i] = respec_check(instances[i]);
        } catch (const std::exception& e) {
          failures[i] = e.what();
        }
      };
      std::vector<std::thread> pool;
      const std::size_t workers = static_cast<std::size_t>(std::max(session.jobs, 1));
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < instances.size(); i += workers) work(i);
        });
      for (auto& th : pool) th.join();
      for (std::size_t i = 0; i < failures.size(); ++i)
        if (!failures[i].empty()) throw Error(ErrorCode::kRankAmbiguous, "instance " + std::to_string(i) + ": " + failures[i]);
      bool pass = std::all_of(records.begin(), records.end(), [](const RespecRecord& r) { return r.pass; });
      if (session.csv()) {
        session.emit_csv(io::respec_csv(records));
      } else {
        Json list = Json::array();
        for (const auto& r : records) list.push_back(io::to_json(r));
        session.emit(Json{{"trivial", trivial}, {"random", random_count}, {"dim", dim}, {"records", list}, {"pass", pass}});
      }
      return pass ? kExitOk : kExitBoundViolated;
    };
  });
  int steps = 20;
  auto* weyl = sub(stab, "weyl", "Ratio of counting functions");
  weyl->add_option("--cover", cover_path, "Cover JSON")->required();
  weyl->add_option("--base", base_path, "Base complex (must match the cover's base)");
  weyl->add_option("--grid", grid, "Explicit lambda grid")->delimiter(',');
  weyl->add_option("--steps", steps, "Uniform grid size up to the top of the cover spectrum")->check(CLI::PositiveNumber);
  weyl->callback([&] {
    action = [&] {
      auto lc = io::load_cover(cover_path);
      auto base = checked_base(base_path, lc);
      auto bop = assemble(base, session.kind()), cop = assemble(lc.cover.total, session.kind());
      auto bs = dense_eigenpairs(bop, session.solver(bop.dim()));
      auto cs = dense_eigenpairs(cop, session.solver(cop.dim()));
      std::vector<double> points = grid;
      if (points.empty())
        for (int i = 1; i <= steps; ++i) points.push_back(cs.values.back() * i / steps);
      auto curve = weyl_ratio(bs, cs, points, session.cfg.margin);
      if (session.csv())
        session.emit_csv(io::weyl_csv(curve));
      else
        session.emit(Json{{"curve", io::weyl_json(curve)}, {"degree", lc.cover.degree}});
      return kExitOk;
    };
  });

  // run
  std::vector<std::string> job_files;
  auto* run = sub(&app, "run", "Run job files in parallel");
  run->add_option("jobs", job_files, "Job JSON files {\"args\": [...], \"output\": path}")->required();
  run->callback([&] {
    action = [&] {
      session.json_only();
      std::vector<int> codes(job_files.size(), 0);
      std::vector<std::string> messages(job_files.size());
      std::mutex lock;
      auto work = [&](std::size_t i) {
        std::ostringstream jout, jerr;
        int code;
        try {
          Json job = io::read_json_file(job_files[i]);
          auto jargs = job.at("args").get<std::vector<std::string>>();
          if (job.contains("output")) {
            jargs.push_back("--output");
            jargs.push_back(job.at("output").get<std::string>());
          }
          code = run_cli(jargs, jout, jerr);
        } catch (const std::exception& e) {
          jerr << e.what();
          code = kExitUsage;
        }
        std::lock_guard<std::mutex> g(lock);
        codes[i] = code;
        messages[i] = jerr.str();
      };
      std::vector<std::thread> pool;
      const std::size_t workers = static_cast<std::size_t>(std::max(session.jobs, 1));
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < job_files.size(); i += workers) work(i);
        });
      for (auto& th : pool) th.join();
      Json list = Json::array();
      int worst = 0;
      for (std::size_t i = 0; i < job_files.size(); ++i) {
        list.push_back(Json{{"job", job_files[i]}, {"exit", codes[i]}, {"message", messages[i]}});
        worst = std::max(worst, codes[i]);
      }
      session.emit(Json{{"jobs", list}});
      return worst;
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cli_values = session.cfg;
    RunConfig cfg;
    std::string path = config_path;
    if (path.empty())
      if (const char* env = std::getenv(kConfigEnv)) path = env;
    if (!path.empty()) apply_config(cfg, io::read_json_file(path));
    // Explicit flags override the config file.
    if (o_m->count()) cfg.m = cli_values.m;
    if (o_tol->count()) cfg.tol = cli_values.tol;
    if (o_seed->count()) cfg.seed = cli_values.seed;
    if (o_iter->count()) cfg.max_iterations = cli_values.max_iterations;
    if (o_margin->count()) cfg.margin = cli_values.margin;
    if (o_eps->count()) cfg.zero_eps = cli_values.zero_eps;
    if (o_kind->count()) cfg.kind = cli_values.kind;
    if (o_cap->count()) cfg.degree_cap = cli_values.degree_cap;
    if (o_maxidx->count()) cfg.max_index = cli_values.max_index;
    validate(cfg);
    session.cfg = cfg;
    if (!action) throw UsageError("no command given");
    return action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kAmbiguousCount:
      case ErrorCode::kRankAmbiguous: return kExitAmbiguous;
      case ErrorCode::kBoundViolated: return kExitBoundViolated;
      default: return kExitUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace nodalcover
