#include "holofg/runner.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "holofg/hash.hpp"
#include "holofg/heat.hpp"
#include "holofg/integrator.hpp"
#include "holofg/parallel.hpp"
#include "holofg/propagator.hpp"
#include "holofg/pv_corpus.hpp"
#include "holofg/transport.hpp"

namespace holofg {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---- schema helpers --------------------------------------------------------

const json& object_at(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  return j;
}

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  object_at(j, where);
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
T value_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <class T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + std::string(key) + "'");
  return value_or<T>(j, key, T{}, where);
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::string hex64(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

std::string csv_number(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

struct Context {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  RunOverrides overrides;
  std::uint64_t config_hash = 0;
};

Lattice parse_lattice(const json& j, const std::string& where) {
  allow_keys(j, {"n", "basis", "scale"}, where);
  int n = required<int>(j, "n", where);
  if (n < 1 || n > kMaxDim) throw ConfigError(where + ".n out of range");
  Lattice lat = Lattice::square(n);
  if (j.contains("basis")) {
    auto rows = value_or<std::vector<std::vector<double>>>(j, "basis", {}, where);
    if (static_cast<int>(rows.size()) != 2 * n) throw ConfigError(where + ".basis needs 2n rows");
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != 2 * n) throw ConfigError(where + ".basis rows need 2n entries");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    try {
      lat = Lattice(n, flat);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ".basis: " + e.what());
    }
  }
  double scale = value_or<double>(j, "scale", 1.0, where);
  if (!(scale > 0)) throw ConfigError(where + ".scale must be positive");
  return scale == 1.0 ? lat : lat.scaled(scale);
}

json lattice_json(const Lattice& lat) {
  return {{"n", lat.n()}, {"covolume", lat.covolume()}, {"hash", hex64(lat.hash())}};
}

// ---- heat ------------------------------------------------------------------

RunOutput run_heat(const json& cfg, const Context& ctx) {
  const std::string where = "heat";
  allow_keys(cfg, {"lattice", "t", "pairs", "points", "tolerance"}, where);
  Lattice lat = parse_lattice(cfg.contains("lattice") ? cfg.at("lattice") : json{{"n", 1}}, where + ".lattice");
  auto ts = value_or<std::vector<double>>(cfg, "t", {0.05, 0.2, 1.0, 5.0}, where);
  double tol = value_or<double>(cfg, "tolerance", 1e-11, where);
  for (double t : ts)
    if (!(t > 0)) throw ConfigError(where + ".t values must be positive");
  int d = lat.real_dim();
  std::vector<std::pair<RVec, RVec>> pairs;
  if (cfg.contains("points")) {
    auto pts = value_or<std::vector<std::vector<std::vector<double>>>>(cfg, "points", {}, where);
    for (const auto& p : pts) {
      if (p.size() != 2 || static_cast<int>(p[0].size()) != d || static_cast<int>(p[1].size()) != d)
        throw ConfigError(where + ".points entries are [z, w] with 2n reals each");
      pairs.push_back({Eigen::Map<const Eigen::VectorXd>(p[0].data(), d), Eigen::Map<const Eigen::VectorXd>(p[1].data(), d)});
    }
  } else {
    int count = value_or<int>(cfg, "pairs", 20, where);
    if (count < 1) throw ConfigError(where + ".pairs must be positive");
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < count; ++k) {
      RVec a(d), b(d);
      for (int i = 0; i < d; ++i) a[i] = u(rng);
      for (int i = 0; i < d; ++i) b[i] = u(rng);
      pairs.push_back({lat.from_coefficients(a), lat.from_coefficients(b)});
    }
  }
  HeatKernel heat(lat);
  struct Row {
    CertifiedValue image, spectral;
  };
  std::vector<Row> rows(ts.size() * pairs.size());
  parallel_for(rows.size(), ctx.threads, [&](std::size_t idx) {
    double t = ts[idx / pairs.size()];
    const auto& [z, w] = pairs[idx % pairs.size()];
    RVec x = z - w;
    rows[idx] = {heat.scalar(x, t, HeatMethod::Image), heat.scalar(x, t, HeatMethod::Spectral)};
  });
  RunOutput out;
  std::ostringstream csv;
  csv << "t,pair,image_re,image_im,spectral_re,spectral_im,abs_diff\n";
  json table = json::array();
  double worst = 0;
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    double t = ts[idx / pairs.size()];
    const Row& r = rows[idx];
    double diff = std::abs(r.image.value - r.spectral.value);
    worst = std::max(worst, diff);
    table.push_back({{"t", t},
                     {"pair", idx % pairs.size()},
                     {"image", complex_json(r.image.value)},
                     {"spectral", complex_json(r.spectral.value)},
                     {"abs_diff", diff}});
    csv << csv_number(t) << ',' << idx % pairs.size() << ',' << csv_number(r.image.value.real()) << ','
        << csv_number(r.image.value.imag()) << ',' << csv_number(r.spectral.value.real()) << ','
        << csv_number(r.spectral.value.imag()) << ',' << csv_number(diff) << '\n';
  }
  bool ok = worst <= tol;
  json j = {{"lattice", lattice_json(lat)}, {"rows", table}, {"max_abs_diff", worst}, {"tolerance", tol}, {"ok", ok}};
  out.json = j.dump(2);
  out.csv = csv.str();
  out.exit_code = ok ? 0 : 1;
  if (!ok) out.log.push_back("image and spectral sums disagree by " + csv_number(worst));
  return out;
}

// ---- prop ------------------------------------------------------------------

constexpr char kCacheMagic[8] = {'H', 'F', 'G', 'P', 'C', 'A', 'C', 'H'};
constexpr std::uint32_t kCacheVersion = 1;

template <class T>
void put_le(std::string& buf, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  buf.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw std::runtime_error("truncated cache file");
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, buf.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

std::optional<std::vector<cplx>> read_cache(const fs::path& path, std::uint64_t key, std::uint32_t n, std::uint64_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 8 || std::memcmp(buf.data(), kCacheMagic, 8) != 0) return std::nullopt;
  std::size_t pos = 8;
  try {
    if (get_le<std::uint32_t>(buf, pos) != kCacheVersion) return std::nullopt;
    if (get_le<std::uint32_t>(buf, pos) != n) return std::nullopt;
    if (get_le<std::uint64_t>(buf, pos) != count) return std::nullopt;
    if (get_le<std::uint64_t>(buf, pos) != key) return std::nullopt;
    std::vector<cplx> values(count * n);
    for (auto& v : values) {
      double re = get_le<double>(buf, pos);
      double im = get_le<double>(buf, pos);
      v = {re, im};
    }
    return values;
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
}

void write_cache(const fs::path& path, std::uint64_t key, std::uint32_t n, std::uint64_t count, const std::vector<cplx>& values) {
  std::string buf(kCacheMagic, 8);
  put_le(buf, kCacheVersion);
  put_le(buf, n);
  put_le(buf, count);
  put_le(buf, key);
  for (const cplx& v : values) {
    put_le(buf, v.real());
    put_le(buf, v.imag());
  }
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary);
    o.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!o) throw std::runtime_error("cannot write cache file " + tmp.string());
  }
  fs::rename(tmp, path);
}

RunOutput run_prop(const json& cfg, const Context& ctx) {
  const std::string where = "prop";
  allow_keys(cfg, {"lattice", "grid", "split_L", "tol"}, where);
  Lattice lat = parse_lattice(cfg.contains("lattice") ? cfg.at("lattice") : json{{"n", 1}}, where + ".lattice");
  int grid = value_or<int>(cfg, "grid", 8, where);
  PropagatorOptions po;
  po.split_L = value_or<double>(cfg, "split_L", po.split_L, where);
  po.tol = value_or<double>(cfg, "tol", po.tol, where);
  int d = lat.real_dim(), n = lat.n();
  std::uint64_t count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::uint64_t>(grid);
  if (grid < 1 || count > (1u << 20)) throw ConfigError(where + ".grid out of range");

  // Cell-centred grid: the origin (the only lattice point) is never sampled.
  std::vector<RVec> points(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    RVec c(d);
    std::uint64_t rest = idx;
    for (int i = 0; i < d; ++i) {
      c[i] = (static_cast<double>(rest % grid) + 0.5) / grid - 0.5;
      rest /= grid;
    }
    points[idx] = lat.from_coefficients(c);
  }
  Fnv1a key;
  key.add(lat.hash());
  key.add(po.split_L);
  key.add(po.tol);
  key.add(static_cast<std::int64_t>(grid));
  fs::path cache_file;
  std::optional<std::vector<cplx>> values;
  if (!ctx.overrides.cache_dir.empty()) {
    cache_file = fs::path(ctx.overrides.cache_dir) / ("prop-" + hex64(key.value()) + ".bin");
    values = read_cache(cache_file, key.value(), n, count);
  }
  RunOutput out;
  if (values) {
    out.log.push_back("loaded " + cache_file.string());
  } else {
    Propagator prop(lat, po);
    std::vector<cplx> v(count * n);
    parallel_for(count, ctx.threads, [&](std::size_t idx) {
      auto k = prop.components(points[idx]);
      for (int i = 0; i < n; ++i) v[idx * n + i] = k[i];
    });
    values = std::move(v);
    if (!cache_file.empty()) {
      write_cache(cache_file, key.value(), n, count, *values);
      out.log.push_back("wrote " + cache_file.string());
    }
  }
  std::ostringstream csv;
  csv << "index";
  for (int i = 0; i < d; ++i) csv << ",x" << i;
  for (int i = 0; i < n; ++i) csv << ",K" << i << "_re,K" << i << "_im";
  csv << '\n';
  Fnv1a check;
  double max_abs = 0;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    csv << idx;
    for (int i = 0; i < d; ++i) csv << ',' << csv_number(points[idx][i]);
    for (int i = 0; i < n; ++i) {
      cplx k = (*values)[idx * n + i];
      csv << ',' << csv_number(k.real()) << ',' << csv_number(k.imag());
      check.add(k.real());
      check.add(k.imag());
      max_abs = std::max(max_abs, std::abs(k));
    }
    csv << '\n';
  }
  json j = {{"lattice", lattice_json(lat)},
            {"grid", grid},
            {"samples", count},
            {"split_L", po.split_L},
            {"tol", po.tol},
            {"cache_key", hex64(key.value())},
            {"checksum", hex64(check.value())},
            {"max_abs_component", max_abs}};
  out.json = j.dump(2);
  out.csv = csv.str();
  return out;
}

// ---- pv --------------------------------------------------------------------

RunOutput run_pv(const json& cfg, const Context& ctx) {
  const std::string where = "pv";
  allow_keys(cfg, {"corpus", "tolerance", "cross_tolerance", "angular_nodes", "panel_nodes", "independence"}, where);
  std::string corpus = value_or<std::string>(cfg, "corpus", "pv_corpus.json", where);
  fs::path path = fs::path(corpus).is_absolute() ? fs::path(corpus) : fs::path(ctx.overrides.base_dir) / corpus;
  if (!fs::exists(path)) throw ConfigError(where + ".corpus: missing input " + path.string());
  double tol = value_or<double>(cfg, "tolerance", 1e-8, where);
  double cross = value_or<double>(cfg, "cross_tolerance", 1e-7, where);
  bool independence = value_or<bool>(cfg, "independence", false, where);
  PVOptions opt;
  opt.angular_nodes = value_or<int>(cfg, "angular_nodes", opt.angular_nodes, where);
  opt.panel_nodes = value_or<int>(cfg, "panel_nodes", opt.panel_nodes, where);
  opt.threads = ctx.threads;
  std::vector<PVCorpusCase> cases;
  try {
    cases = load_pv_corpus(path.string());
  } catch (const std::runtime_error& e) {
    throw ConfigError(where + ".corpus: " + e.what());
  }
  RunOutput out;
  json rows = json::array();
  std::ostringstream csv;
  csv << "name,direct_re,direct_im,desing_re,desing_im,expected_re,expected_im,abs_error\n";
  bool all_ok = true;
  for (const auto& c : cases) {
    std::vector<int> ones(c.integrand.m, 1);
    PVResult direct = pv_direct(c.integrand, {ones, {}, {}, "j=1"}, opt);
    PVResult desing = pv_desingularized(c.integrand, opt);
    double gap = std::abs(direct.value - desing.value);
    double err = c.expected ? std::max(std::abs(direct.value - *c.expected), std::abs(desing.value - *c.expected)) : gap;
    bool ok = direct.converged && desing.converged && gap <= cross && (!c.expected || err <= tol);
    json row = {{"name", c.name},
                {"direct", complex_json(direct.value)},
                {"direct_error", direct.error},
                {"desingularized", complex_json(desing.value)},
                {"desingularized_error", desing.error},
                {"path_gap", gap},
                {"ok", ok}};
    if (c.expected) row["expected"] = complex_json(*c.expected);
    if (independence) {
      std::vector<PVDomain> domains = {{ones, {}, {}, "j=1"}, {std::vector<int>(c.integrand.m, 2), {}, {}, "j=2"},
                                       {ones, [](std::span<const cplx> z) { return cplx(2.0) + z[0]; }, {}, "f=2+z1"}};
      IndependenceReport rep = independence_check(c.integrand, domains, 1e-6, opt);
      row["independence_max_discrepancy"] = rep.max_discrepancy;
      row["independence_agree"] = rep.agree;
      ok = ok && rep.agree;
      row["ok"] = ok;
    }
    if (!ok) out.log.push_back("pv case '" + c.name + "' flagged");
    all_ok = all_ok && ok;
    rows.push_back(row);
    cplx e = c.expected.value_or(cplx(NAN, NAN));
    csv << c.name << ',' << csv_number(direct.value.real()) << ',' << csv_number(direct.value.imag()) << ','
        << csv_number(desing.value.real()) << ',' << csv_number(desing.value.imag()) << ',' << csv_number(e.real()) << ','
        << csv_number(e.imag()) << ',' << csv_number(err) << '\n';
  }
  json j = {{"corpus", fs::path(corpus).filename().string()}, {"cases", rows}, {"tolerance", tol}, {"ok", all_ok}};
  out.json = j.dump(2);
  out.csv = csv.str();
  out.exit_code = all_ok ? 0 : 1;
  return out;
}

// ---- graph-int -------------------------------------------------------------

GraphAssignment parse_graph(const json& g, int n, const std::string& where) {
  allow_keys(g, {"vertices", "edges", "densities"}, where);
  GraphAssignment a;
  a.graph.num_vertices = required<int>(g, "vertices", where);
  if (a.graph.num_vertices < 1) throw ConfigError(where + ".vertices must be positive");
  for (const auto& e : value_or<std::vector<std::array<int, 2>>>(g, "edges", {}, where)) a.graph.edges.push_back({e[0], e[1]});
  for (const Edge& e : a.graph.edges)
    if (e.tail < 0 || e.head < 0 || e.tail >= a.graph.num_vertices || e.head >= a.graph.num_vertices)
      throw ConfigError(where + ".edges: vertex index out of range");
  a.slot_map = GraphAssignment::default_slot_map(a.graph);
  if (g.contains("densities")) {
    const json& ds = g.at("densities");
    if (!ds.is_array() || static_cast<int>(ds.size()) != a.graph.num_vertices)
      throw ConfigError(where + ".densities needs one entry per vertex");
    for (std::size_t v = 0; v < ds.size(); ++v) {
      std::string w = where + ".densities[" + std::to_string(v) + "]";
      allow_keys(ds[v], {"slots", "coefficient"}, w);
      LagrangianDensity dens;
      dens.slots = value_or<std::vector<MultiIndex>>(ds[v], "slots", {}, w);
      auto c = value_or<std::array<double, 2>>(ds[v], "coefficient", {1.0, 0.0}, w);
      dens.coefficient.constant = {c[0], c[1]};
      a.densities.push_back(dens);
    }
  } else {
    for (int v = 0; v < a.graph.num_vertices; ++v)
      a.densities.push_back({std::vector<MultiIndex>(a.graph.degree(v), MultiIndex(n, 0)), {}});
  }
  return a;
}

json result_json(const GraphIntegralResult& r) {
  json per = json::array();
  for (const auto& e : r.per_eps) {
    json x = {{"eps", e.eps}, {"value", complex_json(e.value)}, {"stat_error", e.stat_error}, {"samples", e.samples}};
    if (!e.warning.empty()) x["warning"] = e.warning;
    per.push_back(x);
  }
  json models = json::array();
  for (const auto& m : r.models) models.push_back({{"name", m.name}, {"c0", complex_json(m.c0)}, {"residual", m.residual}});
  return {{"value", complex_json(r.value)},
          {"stat_error", r.stat_error},
          {"systematic", r.systematic},
          {"cauchy", r.cauchy},
          {"models", models},
          {"per_eps", per},
          {"message", r.message},
          {"integrand_hash", hex64(r.integrand_hash)},
          {"lattice_hash", hex64(r.lattice_hash)},
          {"fake_distance_hash", hex64(r.fd_hash)},
          {"strategy", r.strategy},
          {"seed", r.seed}};
}

RunOutput run_graph_int(const json& cfg, const Context& ctx) {
  const std::string where = "graph-int";
  allow_keys(cfg, {"lattice", "graph", "propagator", "fake_distances", "schedule", "strategy", "invariance"}, where);
  Lattice lat = parse_lattice(cfg.contains("lattice") ? cfg.at("lattice") : json{{"n", 2}}, where + ".lattice");
  if (!cfg.contains("graph")) throw ConfigError(where + ": missing 'graph'");
  GraphAssignment a = parse_graph(cfg.at("graph"), lat.n(), where + ".graph");

  PropagatorOptions po;
  if (cfg.contains("propagator")) {
    const json& p = cfg.at("propagator");
    allow_keys(p, {"split_L", "tol", "max_deriv"}, where + ".propagator");
    po.split_L = value_or<double>(p, "split_L", po.split_L, where + ".propagator");
    po.tol = value_or<double>(p, "tol", 1e-10, where + ".propagator");
    po.max_deriv = value_or<int>(p, "max_deriv", po.max_deriv, where + ".propagator");
  } else {
    po.tol = 1e-10;
  }

  std::vector<FakeDistance> fds;
  json fd_list = cfg.contains("fake_distances") ? cfg.at("fake_distances") : json::array({json::object()});
  if (!fd_list.is_array() || fd_list.empty()) throw ConfigError(where + ".fake_distances must be a nonempty array");
  for (std::size_t i = 0; i < fd_list.size(); ++i) {
    std::string w = where + ".fake_distances[" + std::to_string(i) + "]";
    allow_keys(fd_list[i], {"r0", "r1", "plateau", "bump"}, w);
    FakeDistanceParams fp;
    fp.r0 = value_or<double>(fd_list[i], "r0", fp.r0, w);
    fp.r1 = value_or<double>(fd_list[i], "r1", fp.r1, w);
    fp.plateau = value_or<double>(fd_list[i], "plateau", fp.plateau, w);
    fp.bump_amplitude = value_or<double>(fd_list[i], "bump", fp.bump_amplitude, w);
    try {
      fds.emplace_back(lat, fp);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(w + ": " + e.what());
    }
  }

  CutoffSchedule sched;
  if (cfg.contains("schedule")) {
    const json& s = cfg.at("schedule");
    allow_keys(s, {"first", "ratio", "count"}, where + ".schedule");
    sched.first = value_or<double>(s, "first", sched.first, where + ".schedule");
    sched.ratio = value_or<double>(s, "ratio", sched.ratio, where + ".schedule");
    sched.count = value_or<int>(s, "count", sched.count, where + ".schedule");
  }
  try {
    sched.values();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ".schedule: " + e.what());
  }

  IntegrationStrategy st;
  st.seed = ctx.seed;
  st.threads = ctx.threads;
  if (cfg.contains("strategy")) {
    const json& s = cfg.at("strategy");
    std::string w = where + ".strategy";
    allow_keys(s, {"backend", "samples", "chunk", "quadrature_order", "pin_vertex", "tree_mixture", "angular_copies"}, w);
    std::string backend = value_or<std::string>(s, "backend", "monte-carlo", w);
    if (backend == "monte-carlo")
      st.backend = Backend::MonteCarlo;
    else if (backend == "quadrature")
      st.backend = Backend::Quadrature;
    else
      throw ConfigError(w + ".backend must be 'monte-carlo' or 'quadrature'");
    st.samples = value_or<std::uint64_t>(s, "samples", st.samples, w);
    st.chunk = value_or<std::uint64_t>(s, "chunk", st.chunk, w);
    st.quadrature_order = value_or<int>(s, "quadrature_order", st.quadrature_order, w);
    st.pin_vertex = value_or<bool>(s, "pin_vertex", st.pin_vertex, w);
    st.tree_mixture = value_or<double>(s, "tree_mixture", st.tree_mixture, w);
    st.angular_copies = value_or<int>(s, "angular_copies", st.angular_copies, w);
  }
  bool invariance = value_or<bool>(cfg, "invariance", fds.size() > 1, where);

  Propagator prop(lat, po);
  std::unique_ptr<GraphIntegrand> gi;
  try {
    gi = std::make_unique<GraphIntegrand>(a, prop);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ".graph: " + e.what());
  }
  ConfigIntegrand f = ConfigIntegrand::from_graph(*gi);

  RunOutput out;
  json j = {{"lattice", lattice_json(lat)},
            {"vertices", a.graph.num_vertices},
            {"edges", a.graph.edges.size()},
            {"integrand_hash", hex64(f.hash)}};
  std::ostringstream csv;
  csv << "fake_distance,eps,re,im,stat_err,wall_time\n";
  auto emit_csv = [&](std::size_t fd, const GraphIntegralResult& r) {
    for (const auto& e : r.per_eps)
      csv << fd << ',' << csv_number(e.eps) << ',' << csv_number(e.value.real()) << ',' << csv_number(e.value.imag()) << ','
          << csv_number(e.stat_error) << ',' << csv_number(e.wall_time) << '\n';
  };

  if (gi->verdict() == TypeVerdict::ZeroByType) {
    std::string note = "type veto: |E|(n-1) = " + std::to_string(a.graph.edges.size() * (lat.n() - 1)) +
                       " differs from n|V| = " + std::to_string(lat.n() * a.graph.num_vertices) + ", integral is 0";
    j["verdict"] = "zero-by-type";
    j["value"] = complex_json(0.0);
    j["note"] = note;
    out.log.push_back(note);
    GraphIntegralResult r = graph_integral(f, fds[0], sched, st);
    emit_csv(0, r);
    out.json = j.dump(2);
    out.csv = csv.str();
    return out;
  }
  j["verdict"] = "admissible";
  bool ok = true;
  json per = json::array();
  if (invariance) {
    InvarianceReport rep = invariance_suite(f, fds, sched, st);
    for (std::size_t i = 0; i < rep.per_fd.size(); ++i) {
      per.push_back(result_json(rep.per_fd[i]));
      emit_csv(i, rep.per_fd[i]);
    }
    j["invariance"] = {{"max_fd_discrepancy", rep.max_fd_discrepancy},
                       {"fd_agree", rep.fd_agree},
                       {"pinned", complex_json(rep.pinned.value)},
                       {"unpinned", complex_json(rep.unpinned.value)},
                       {"pin_agree", rep.pin_agree},
                       {"ok", rep.ok},
                       {"message", rep.message}};
    ok = rep.ok;
    for (const auto& r : rep.per_fd) ok = ok && r.cauchy;
    j["value"] = complex_json(rep.per_fd[0].value);
  } else {
    for (std::size_t i = 0; i < fds.size(); ++i) {
      GraphIntegralResult r = graph_integral(f, fds[i], sched, st);
      per.push_back(result_json(r));
      emit_csv(i, r);
      ok = ok && r.cauchy;
    }
    j["value"] = per[0]["value"];
  }
  j["results"] = per;
  j["ok"] = ok;
  if (!ok) out.log.push_back("graph integral flagged: Cauchy or invariance check failed");
  out.exit_code = ok ? 0 : 1;
  out.json = j.dump(2);
  out.csv = csv.str();
  return out;
}

// ---- jets ------------------------------------------------------------------

QComplex parse_rational(const json& v, const std::string& where) {
  try {
    if (v.is_string()) return QComplex::parse(v.get<std::string>());
    if (v.is_number_integer()) return QComplex(mpq_class(v.get<long>()));
    if (v.is_number()) return QComplex(mpq_class(v.get<double>()));
  } catch (const std::invalid_argument&) {
  }
  throw ConfigError(where + ": expected an integer, a number or a \"p/q\" string");
}

RunOutput run_jets(const json& cfg, const Context& ctx) {
  const std::string where = "jets";
  allow_keys(cfg, {"n", "order", "K", "potential"}, where);
  int n = value_or<int>(cfg, "n", 2, where);
  int order = value_or<int>(cfg, "order", 6, where);
  int K = value_or<int>(cfg, "K", 2, where);
  if (n < 1 || n > 3) throw ConfigError(where + ".n out of range");
  if (order < 2 || order > 12) throw ConfigError(where + ".order out of range");
  if (K < 0 || order - 2 * K < 2) throw ConfigError(where + ".K needs order - 2K >= 2");

  // Potential 1/2 |z|^2 plus the listed terms [re, im, [a], [b]] for
  // (re + i im) z^a zbar^b; the caller supplies conjugate pairs.
  Jet phi(2 * n, order + 2);
  for (int i = 0; i < n; ++i) {
    Exponent e(2 * n, 0);
    e[i] = e[n + i] = 1;
    phi.accumulate(e, QComplex(mpq_class(1, 2)));
  }
  if (cfg.contains("potential")) {
    const json& terms = cfg.at("potential");
    if (!terms.is_array()) throw ConfigError(where + ".potential must be an array");
    for (std::size_t t = 0; t < terms.size(); ++t) {
      std::string w = where + ".potential[" + std::to_string(t) + "]";
      const json& term = terms[t];
      if (!term.is_array() || term.size() != 4) throw ConfigError(w + ": expected [re, im, [a], [b]]");
      QComplex c = parse_rational(term[0], w) + parse_rational(term[1], w) * kQI;
      auto a = term[2].get<std::vector<int>>(), b = term[3].get<std::vector<int>>();
      if (static_cast<int>(a.size()) != n || static_cast<int>(b.size()) != n) throw ConfigError(w + ": exponents need n entries");
      Exponent e(a);
      e.insert(e.end(), b.begin(), b.end());
      if (degree(e) > order + 2) throw ConfigError(w + ": degree exceeds order + 2");
      phi.accumulate(e, c);
    }
  }
  if (!(conjugate(phi, n) == phi)) throw ConfigError(where + ".potential must be real (list conjugate pairs)");
  MetricJet g = MetricJet::from_potential(n, phi);
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ".potential: " + e.what());
  }

  RunOutput out;
  json checks = json::object();
  double normal = kahler_normal_residual(g);
  checks["kahler_normal_residual"] = normal;
  Jet rho2;
  if (normal == 0) {
    rho2 = eikonal_solve(g, order);
    checks["eikonal_residual"] = eikonal_residual(g, rho2);
    out.files.push_back({"jets_rho2.txt", to_text(rho2)});
  }
  MatrixJet h = g.g;
  for (Jet& x : h.entries) x *= QComplex(2);
  FrameGauge fg = normal_frame_gauge({n, h});
  checks["frame_gauge_residual"] = fg.residual;

  ModelData md = ModelData::from_metric(g);
  HeatCoefficientJet u = model_transport_solve(md, K);
  checks["transport_residual"] = transport_residual(md, u);
  checks["heat_residual"] = heat_residual_check(u, md);
  std::ostringstream coeffs;
  for (std::size_t k = 0; k < u.v.size(); ++k) coeffs << "# v" << k << '\n' << to_text(u.v[k]);
  out.files.push_back({"jets_transport.txt", coeffs.str()});

  std::mt19937_64 rng(ctx.seed);
  double comm = 0;
  int sect_order = std::min(order, 4);
  for (int trial = 0; trial < 4; ++trial) {
    RescalableExpression s(n, sect_order);
    for (int t = 0; t < 5; ++t) {
      ExprMonomial mono{Exponent(4 * n, 0), 0, static_cast<std::uint32_t>(rng() % (1u << (2 * n)))};
      int deg = static_cast<int>(rng() % (sect_order + 1));
      for (int k = 0; k < deg; ++k) mono.e[rng() % (2 * n)] += 1;
      s.accumulate(mono, QComplex(static_cast<long>(rng() % 7) - 3));
    }
    CommutatorReport rep = model_commutators(md, s);
    comm = std::max({comm, rep.holomorphic, rep.antiholomorphic, rep.laplacian});
  }
  checks["commutator_residual"] = comm;
  int min_weight = kZeroFiltration;
  for (const auto& [w, part] : getzler_decomposition(u))
    if (!part.is_zero()) min_weight = std::min(min_weight, w);
  json j = {{"n", n}, {"order", order}, {"K", K}, {"checks", checks}, {"getzler_min_weight", min_weight}};
  if (normal == 0) j["rho2_terms"] = rho2.terms().size();

  bool ok = true;
  std::ostringstream csv;
  csv << "check,value\n";
  for (const auto& [name, v] : checks.items()) {
    csv << name << ',' << csv_number(v.get<double>()) << '\n';
    if (v.get<double>() != 0) {
      ok = false;
      out.log.push_back("jets check " + name + " is nonzero");
    }
  }
  j["ok"] = ok;
  out.json = j.dump(2);
  out.csv = csv.str();
  out.exit_code = ok ? 0 : 1;
  return out;
}

}  // namespace

std::vector<std::string> run_commands() { return {"heat", "prop", "pv", "graph-int", "jets"}; }

std::uint64_t config_hash(const std::string& config_text) {
  json j;
  try {
    j = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Fnv1a h;
  h.add(j.dump());
  return h.value();
}

RunOutput run_config(const std::string& config_text, const RunOverrides& overrides) {
  std::uint64_t hash = config_hash(config_text);
  json cfg = json::parse(config_text);
  allow_keys(cfg, {"schema_version", "command", "seed", "threads", "heat", "prop", "pv", "graph-int", "jets"}, "config");
  int version = required<int>(cfg, "schema_version", "config");
  if (version != kSchemaVersion) throw ConfigError("config: unsupported schema_version " + std::to_string(version));
  std::string command = required<std::string>(cfg, "command", "config");
  if (!overrides.command.empty() && overrides.command != command)
    throw ConfigError("config: command '" + command + "' does not match requested '" + overrides.command + "'");
  auto cmds = run_commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end()) throw ConfigError("config: unknown command '" + command + "'");
  for (const auto& c : cmds)
    if (c != command && cfg.contains(c)) throw ConfigError("config: block '" + c + "' does not belong to command '" + command + "'");

  Context ctx;
  ctx.overrides = overrides;
  ctx.config_hash = hash;
  ctx.seed = overrides.seed.value_or(value_or<std::uint64_t>(cfg, "seed", 1, "config"));
  ctx.threads = overrides.threads.value_or(value_or<unsigned>(cfg, "threads", 1, "config"));
  json block = cfg.contains(command) ? cfg.at(command) : json::object();

  RunOutput out;
  if (command == "heat")
    out = run_heat(block, ctx);
  else if (command == "prop")
    out = run_prop(block, ctx);
  else if (command == "pv")
    out = run_pv(block, ctx);
  else if (command == "graph-int")
    out = run_graph_int(block, ctx);
  else
    out = run_jets(block, ctx);
  out.command = command;

  json wrapped = json::parse(out.json);
  wrapped["command"] = command;
  wrapped["schema_version"] = kSchemaVersion;
  wrapped["config_hash"] = hex64(hash);
  wrapped["seed"] = ctx.seed;
  wrapped["exit_code"] = out.exit_code;
  out.json = wrapped.dump(2) + "\n";
  return out;
}

}  // namespace holofg
