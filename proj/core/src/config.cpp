#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "crackcell/config.hpp"
#include "crackcell/error.hpp"
#include "crackcell/model.hpp"
#include "crackcell/runtime.hpp"

namespace crackcell {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Tracks which keys a block consumed so finish() can name stray ones by
// their full path.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw Error("config: '" + path_ + "' must be an object");
  }

  std::string key_path(const char* key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* sub(const char* key) {
    consumed_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void get(const char* key, T& out, const char* type_name) {
    consumed_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw Error("config: '" + key_path(key) + "' must be a " + type_name);
    }
  }

  void number(const char* key, double& out) { get(key, out, "number"); }
  void integer(const char* key, int& out) {
    consumed_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!it->is_number_integer())
      throw Error("config: '" + key_path(key) + "' must be an integer");
    out = it->get<int>();
  }
  void boolean(const char* key, bool& out) { get(key, out, "boolean"); }
  void text(const char* key, std::string& out) { get(key, out, "string"); }
  void opt_number(const char* key, std::optional<double>& out) {
    double v = 0.0;
    const bool present = has(key);
    number(key, v);
    if (present) out = v;
  }

  void vec3(const char* key, Eigen::Vector3d& out) {
    consumed_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!it->is_array() || it->size() != 3)
      throw Error("config: '" + key_path(key) +
                  "' must be an array of 3 numbers");
    for (int a = 0; a < 3; ++a) {
      if (!(*it)[a].is_number())
        throw Error("config: '" + key_path(key) +
                    "' must be an array of 3 numbers");
      out[a] = (*it)[a].get<double>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!consumed_.count(it.key()))
        throw Error("config: unknown key '" + key_path(it.key().c_str()) +
                    "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> consumed_;
};

std::string resolve(const std::string& anchor_dir, const std::string& path) {
  if (path.empty() || anchor_dir.empty()) return path;
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(anchor_dir) / p).string();
}

bool is_box_face(const std::string& region) {
  return region.size() == 2 && (region[0] == 'x' || region[0] == 'y' ||
                                region[0] == 'z') &&
         (region[1] == '-' || region[1] == '+');
}

void parse_schedule(const json& j, const std::string& path,
                    ScheduleConfig& out) {
  ObjectReader r(j, path);
  r.number("u_large", out.u_large);
  r.number("u_med", out.u_med);
  r.number("u_small", out.u_small);
  r.number("onset_switch", out.onset_switch);
  r.number("smin_switch", out.smin_switch);
  r.number("target", out.target);
  r.number("stop_force_fraction", out.stop_force_fraction);
  r.finish();
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw Error("config: '" + key + "' " + what);
}

void require_file(const std::string& path, const std::string& key) {
  if (!fs::exists(path))
    throw Error("config: '" + key + "': file '" + path + "' does not exist");
}

}  // namespace

RunConfig parse_run_config(const std::string& text,
                           const std::string& anchor_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }

  RunConfig c;
  ObjectReader root(j, "");
  root.text("image", c.image);
  root.text("output_dir", c.output_dir);
  c.image = resolve(anchor_dir, c.image);
  c.output_dir = resolve(anchor_dir, c.output_dir);

  if (const json* d = root.sub("discretization")) {
    ObjectReader r(*d, "discretization");
    r.number("h", c.disc.h);
    r.integer("p", c.disc.p);
    r.integer("depth", c.disc.depth);
    r.text("basis", c.disc.basis);
    r.finish();
  }
  if (const json* m = root.sub("material")) {
    ObjectReader r(*m, "material");
    r.number("E0", c.material.E0);
    r.number("Gc0", c.material.Gc0);
    r.number("beta", c.material.beta);
    r.number("nu", c.material.nu);
    r.number("eta", c.material.eta);
    r.number("alpha_fcm", c.material.alpha_fcm);
    r.opt_number("hu_slope", c.material.hu_slope);
    r.opt_number("hu_intercept", c.material.hu_intercept);
    r.finish();
  }
  if (const json* s = root.sub("solver")) {
    ObjectReader r(*s, "solver");
    r.number("eps_stag", c.solver.eps_stag);
    r.integer("n_stag", c.solver.n_stag);
    r.number("l0", c.solver.l0);
    if (const json* sch = r.sub("schedule"))
      parse_schedule(*sch, "solver.schedule", c.solver.schedule);
    r.finish();
  }
  if (const json* b = root.sub("bcs")) {
    if (!b->is_array()) throw Error("config: 'bcs' must be an array");
    for (std::size_t i = 0; i < b->size(); ++i) {
      const std::string path = "bcs[" + std::to_string(i) + "]";
      ObjectReader r((*b)[i], path);
      BcConfig bc;
      r.text("region", bc.region);
      r.text("kind", bc.kind);
      r.integer("component", bc.component);
      r.boolean("driven", bc.driven);
      r.number("value", bc.value);
      r.number("penalty_scale", bc.penalty_scale);
      r.text("label", bc.label);
      r.finish();
      if (!is_box_face(bc.region))
        bc.region = resolve(anchor_dir, bc.region);
      c.bcs.push_back(std::move(bc));
    }
  }
  if (const json* p = root.sub("postproc")) {
    ObjectReader r(*p, "postproc");
    if (const json* probes = r.sub("probes")) {
      if (!probes->is_array())
        throw Error("config: 'postproc.probes' must be an array");
      for (std::size_t i = 0; i < probes->size(); ++i) {
        const std::string path = "postproc.probes[" + std::to_string(i) + "]";
        ObjectReader pr((*probes)[i], path);
        ProbeConfig probe;
        pr.vec3("center", probe.center);
        pr.number("radius", probe.radius);
        pr.finish();
        c.post.probes.push_back(probe);
      }
    }
    if (const json* iso = r.sub("iso")) {
      ObjectReader ir(*iso, "postproc.iso");
      ir.number("s_low", c.post.iso.s_low);
      ir.number("s_high", c.post.iso.s_high);
      ir.number("warp", c.post.iso.warp);
      ir.integer("samples_per_cell", c.post.iso.samples_per_cell);
      ir.finish();
    }
    r.boolean("vtk", c.post.vtk);
    r.finish();
  }
  if (const json* s = root.sub("sweep")) {
    ObjectReader r(*s, "sweep");
    SweepConfig sweep;
    r.text("parameter", sweep.parameter);
    if (const json* vals = r.sub("values")) {
      if (!vals->is_array() )
        throw Error("config: 'sweep.values' must be an array of numbers");
      for (const auto& v : *vals) {
        if (!v.is_number())
          throw Error("config: 'sweep.values' must be an array of numbers");
        sweep.values.push_back(v.get<double>());
      }
    }
    r.text("reference_csv", sweep.reference_csv);
    r.text("metric", sweep.metric);
    r.finish();
    sweep.reference_csv = resolve(anchor_dir, sweep.reference_csv);
    c.sweep = std::move(sweep);
  }
  if (const json* m = root.sub("measured")) {
    ObjectReader r(*m, "measured");
    MeasuredConfig meas;
    r.text("values_csv", meas.values_csv);
    r.text("points_csv", meas.points_csv);
    r.finish();
    meas.values_csv = resolve(anchor_dir, meas.values_csv);
    meas.points_csv = resolve(anchor_dir, meas.points_csv);
    c.measured = std::move(meas);
  }
  root.finish();
  validate_run_config(c, false);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "' for reading");
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig c =
      parse_run_config(text.str(), fs::path(path).parent_path().string());
  validate_run_config(c, true);
  return c;
}

std::string serialize_run_config(const RunConfig& c) {
  json j;
  j["image"] = c.image;
  j["output_dir"] = c.output_dir;
  j["discretization"] = {{"h", c.disc.h},
                         {"p", c.disc.p},
                         {"depth", c.disc.depth},
                         {"basis", c.disc.basis}};
  json m = {{"E0", c.material.E0},       {"Gc0", c.material.Gc0},
            {"beta", c.material.beta},   {"nu", c.material.nu},
            {"eta", c.material.eta},     {"alpha_fcm", c.material.alpha_fcm}};
  if (c.material.hu_slope) m["hu_slope"] = *c.material.hu_slope;
  if (c.material.hu_intercept) m["hu_intercept"] = *c.material.hu_intercept;
  j["material"] = std::move(m);
  j["solver"] = {
      {"eps_stag", c.solver.eps_stag},
      {"n_stag", c.solver.n_stag},
      {"l0", c.solver.l0},
      {"schedule",
       {{"u_large", c.solver.schedule.u_large},
        {"u_med", c.solver.schedule.u_med},
        {"u_small", c.solver.schedule.u_small},
        {"onset_switch", c.solver.schedule.onset_switch},
        {"smin_switch", c.solver.schedule.smin_switch},
        {"target", c.solver.schedule.target},
        {"stop_force_fraction", c.solver.schedule.stop_force_fraction}}}};
  j["bcs"] = json::array();
  for (const auto& bc : c.bcs)
    j["bcs"].push_back({{"region", bc.region},
                        {"kind", bc.kind},
                        {"component", bc.component},
                        {"driven", bc.driven},
                        {"value", bc.value},
                        {"penalty_scale", bc.penalty_scale},
                        {"label", bc.label}});
  json probes = json::array();
  for (const auto& p : c.post.probes)
    probes.push_back(
        {{"center", {p.center[0], p.center[1], p.center[2]}},
         {"radius", p.radius}});
  j["postproc"] = {{"probes", std::move(probes)},
                   {"iso",
                    {{"s_low", c.post.iso.s_low},
                     {"s_high", c.post.iso.s_high},
                     {"warp", c.post.iso.warp},
                     {"samples_per_cell", c.post.iso.samples_per_cell}}},
                   {"vtk", c.post.vtk}};
  if (c.sweep)
    j["sweep"] = {{"parameter", c.sweep->parameter},
                  {"values", c.sweep->values},
                  {"reference_csv", c.sweep->reference_csv},
                  {"metric", c.sweep->metric}};
  if (c.measured)
    j["measured"] = {{"values_csv", c.measured->values_csv},
                     {"points_csv", c.measured->points_csv}};
  return j.dump(2) + "\n";
}

void validate_run_config(const RunConfig& c, bool check_paths) {
  require(!c.image.empty(), "image", "is required");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");

  require(c.disc.h > 0.0, "discretization.h", "must be positive");
  require(c.disc.p >= 1, "discretization.p", "must be at least 1");
  require(c.disc.depth >= 0, "discretization.depth", "must be non-negative");
  require(c.disc.basis == "bspline" || c.disc.basis == "integrated_legendre",
          "discretization.basis", "must be bspline|integrated_legendre");

  require(c.material.E0 > 0.0, "material.E0", "must be positive");
  require(c.material.Gc0 > 0.0, "material.Gc0", "must be positive");
  require(c.material.beta >= 0.0, "material.beta", "must be non-negative");
  require(c.material.nu > -1.0 && c.material.nu < 0.5, "material.nu",
          "must lie in (-1, 0.5)");
  require(c.material.eta > 0.0 && c.material.eta < 1.0, "material.eta",
          "must lie in (0, 1)");
  require(c.material.alpha_fcm > 0.0 && c.material.alpha_fcm <= 1.0,
          "material.alpha_fcm", "must lie in (0, 1]");

  require(c.solver.eps_stag > 0.0, "solver.eps_stag", "must be positive");
  require(c.solver.n_stag >= 1, "solver.n_stag", "must be at least 1");
  require(c.solver.l0 >= c.disc.h, "solver.l0",
          "must be at least the cell size h (length scale unresolvable)");
  const ScheduleConfig& s = c.solver.schedule;
  require(s.u_small > 0.0 && s.u_med >= s.u_small && s.u_large >= s.u_med,
          "solver.schedule", "needs u_large >= u_med >= u_small > 0");
  require(s.target != 0.0, "solver.schedule.target", "must be nonzero");
  require(s.onset_switch > 0.0, "solver.schedule.onset_switch",
          "must be positive");
  require(s.smin_switch > 0.0 && s.smin_switch <= 1.0,
          "solver.schedule.smin_switch", "must lie in (0, 1]");
  require(s.stop_force_fraction > 0.0 && s.stop_force_fraction <= 1.0,
          "solver.schedule.stop_force_fraction", "must lie in (0, 1]");

  require(!c.bcs.empty(), "bcs", "must contain at least one condition");
  int driven = 0;
  for (std::size_t i = 0; i < c.bcs.size(); ++i) {
    const BcConfig& bc = c.bcs[i];
    const std::string key = "bcs[" + std::to_string(i) + "]";
    require(bc.kind == "fixed" || bc.kind == "prescribed", key + ".kind",
            "must be fixed|prescribed");
    require(bc.component >= 0 && bc.component <= 2, key + ".component",
            "must be 0, 1 or 2");
    require(bc.penalty_scale > 0.0, key + ".penalty_scale",
            "must be positive");
    require(!bc.region.empty(), key + ".region", "is required");
    if (bc.driven) {
      ++driven;
      require(bc.kind == "prescribed", key + ".driven",
              "requires kind=prescribed");
    }
    if (!is_box_face(bc.region) && check_paths)
      require_file(bc.region, key + ".region");
  }
  require(driven == 1, "bcs", "needs exactly one driven condition");

  for (std::size_t i = 0; i < c.post.probes.size(); ++i)
    require(c.post.probes[i].radius >= 0.0,
            "postproc.probes[" + std::to_string(i) + "].radius",
            "must be non-negative");
  require(c.post.iso.s_low >= 0.0 && c.post.iso.s_low < c.post.iso.s_high &&
              c.post.iso.s_high <= 1.0,
          "postproc.iso", "needs 0 <= s_low < s_high <= 1");
  require(c.post.iso.samples_per_cell >= 0, "postproc.iso.samples_per_cell",
          "must be non-negative");

  if (c.sweep) {
    require(c.sweep->parameter == "l0" || c.sweep->parameter == "beta" ||
                c.sweep->parameter == "Gc0",
            "sweep.parameter", "must be l0|beta|Gc0");
    require(!c.sweep->values.empty(), "sweep.values", "must not be empty");
    for (double v : c.sweep->values)
      require(v > 0.0, "sweep.values", "must all be positive");
    if (c.sweep->parameter == "l0")
      for (double v : c.sweep->values)
        require(v >= c.disc.h, "sweep.values",
                "must all be at least the cell size h");
    require(c.sweep->metric == "failure_load" ||
                c.sweep->metric == "curve_rmse",
            "sweep.metric", "must be failure_load|curve_rmse");
    require(!c.sweep->reference_csv.empty(), "sweep.reference_csv",
            "is required");
    if (check_paths) require_file(c.sweep->reference_csv, "sweep.reference_csv");
  }
  if (c.measured) {
    require(!c.measured->values_csv.empty(), "measured.values_csv",
            "is required");
    require(!c.measured->points_csv.empty(), "measured.points_csv",
            "is required");
    if (check_paths) {
      require_file(c.measured->values_csv, "measured.values_csv");
      require_file(c.measured->points_csv, "measured.points_csv");
    }
  }

  if (check_paths) require_file(c.image, "image");
}

std::uint64_t config_hash(const RunConfig& config) {
  return fnv1a64(serialize_run_config(config));
}

}  // namespace crackcell
