// Command-line front end: every subcommand writes its artifacts plus a
// manifest.json into --out-dir.

#include <CLI11.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <random>
#include <sstream>

#include "csync/breaking.hpp"
#include "csync/cases.hpp"
#include "csync/coloring.hpp"
#include "csync/dynamics.hpp"
#include "csync/lattice.hpp"
#include "csync/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace csync;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string input;
  std::string case_name;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::optional<double> dt, horizon;
  double tol = 0.1;
  std::string param;
  std::optional<double> from, to;
  std::optional<int> points;
  std::string partition = "minimal";
  std::string lattice;
  int base = 0;
  int threads = 0;
  int bisection = 6;
  int lag_points = 16;
  int record_every = 10;
  double perturb = 0.0;
  bool dynamics = false;
  std::vector<std::string> set;
};

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Collects artifacts for the manifest.
class Run {
 public:
  Run(std::string subcommand, const Options& o) : subcommand_(std::move(subcommand)), o_(o) {
    fs::create_directories(o.out_dir);
  }

  fs::path path(const std::string& name) {
    outputs_.push_back(name);
    return fs::path(o_.out_dir) / name;
  }

  void write_json(const std::string& name, const json& doc) {
    std::ofstream out(path(name));
    out << doc.dump(2) << '\n';
  }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream out(path(name));
    out << text;
  }

  void write_matrix(const std::string& name, const Matrix& m, const std::string& row_label) {
    std::ostringstream s;
    s << row_label;
    for (int c = 0; c < m.cols(); ++c) s << ",c" << c + 1;
    s << '\n';
    for (int r = 0; r < m.rows(); ++r) {
      s << r + 1;
      for (int c = 0; c < m.cols(); ++c) s << ',' << num(m(r, c));
      s << '\n';
    }
    write_text(name, s.str());
  }

  void finish(const json& parameters) {
    json manifest{{"tool", "csync"},
                  {"version", kVersion},
                  {"subcommand", subcommand_},
                  {"input", o_.case_name.empty() ? o_.input : "case:" + o_.case_name},
                  {"seed", o_.seed},
                  {"parameters", parameters}};
    outputs_.push_back("manifest.json");
    manifest["outputs"] = outputs_;
    std::ofstream out(fs::path(o_.out_dir) / "manifest.json");
    out << manifest.dump(2) << '\n';
  }

 private:
  std::string subcommand_;
  const Options& o_;
  std::vector<std::string> outputs_;
};

CaseConfig load(const Options& o) {
  if (!o.case_name.empty() && !o.input.empty()) throw std::invalid_argument("give either an input file or --case");
  CaseConfig c;
  if (!o.case_name.empty()) {
    c = fixture(o.case_name);
  } else if (!o.input.empty()) {
    if (!fs::exists(o.input)) throw std::invalid_argument("no such file: " + o.input);
    c = load_case(o.input);
  } else {
    throw std::invalid_argument("no input: pass a network file or --case NAME");
  }
  for (const auto& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    c.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  if (o.dt) c.dt = *o.dt;
  if (o.horizon) c.horizon = *o.horizon;
  return c;
}

Partition select_partition(const CaseConfig& c, const std::string& which) {
  if (which == "minimal") return minimal_balanced_coloring(c.network);
  if (auto it = c.partitions.find(which); it != c.partitions.end()) return it->second;
  // Comma separated 1-based cluster labels, one per node.
  std::vector<int> labels;
  std::stringstream ss(which);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      labels.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("unknown partition '" + which + "'");
    }
  }
  if (static_cast<int>(labels.size()) != c.network.size()) {
    throw std::invalid_argument("partition '" + which + "' does not label every node");
  }
  return Partition::from_labels(labels);
}

json clusters_json(const Partition& p) {
  json out = json::array();
  for (const auto& cl : p.clusters()) {
    json c = json::array();
    for (int i : cl) c.push_back(i + 1);
    out.push_back(c);
  }
  return out;
}

json labels_json(const Partition& p) {
  json out = json::array();
  for (int l : p.assignment()) out.push_back(l + 1);
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

PartitionLattice read_lattice(const std::string& file, int n) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("no such file: " + file);
  const json doc = json::parse(in);
  if (doc.at("n").get<int>() != n) throw std::invalid_argument(file + " was written for a different network size");
  PartitionLattice lat;
  for (const auto& p : doc.at("partitions")) {
    std::vector<int> labels;
    for (const auto& l : p.at("labels")) labels.push_back(l.get<int>());
    lat.partitions.push_back(Partition::from_labels(labels));
  }
  for (const auto& e : doc.at("edges")) lat.refinement_edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  return lat;
}

PartitionLattice lattice_for(const CaseConfig& c, const Options& o, std::string* note) {
  if (!o.lattice.empty()) return read_lattice(o.lattice, c.network.size());
  LatticeOptions lo;
  lo.threads = 1;
  return analysis_lattice(c.network, lo, note);
}

// Lattice plus the transform relative to the requested base.
struct Analysis {
  PartitionLattice lattice;
  TransformResult transform;
  std::string note;
};

Analysis analyse(const CaseConfig& c, const Options& o) {
  Analysis a;
  a.lattice = lattice_for(c, o, &a.note);
  Partition base = a.lattice.minimal();
  if (!o.lattice.empty()) {
    if (o.base < 0 || o.base >= a.lattice.size()) throw std::invalid_argument("--base is outside the lattice");
    base = a.lattice.partitions[o.base];
  } else if (o.partition != "minimal") {
    base = select_partition(c, o.partition);
  }
  a.transform = irreducible_transform(c.network, a.lattice, base);
  return a;
}

json classification_json(const Classification& cl) {
  json out = json::object();
  auto names = [](const std::vector<int>& qs) {
    json a = json::array();
    for (int q : qs) a.push_back("C" + std::to_string(q + 1));
    return a;
  };
  for (int q = 0; q < cl.cluster_count(); ++q) {
    out["C" + std::to_string(q + 1)] = {{"verdict", to_string(cl.verdict(q))},
                                        {"one_way_on", names(cl.one_way_on(q))},
                                        {"intertwined_with", names(cl.intertwined_with(q))}};
  }
  return out;
}

std::string verdict_line(const Classification& cl, int q) {
  std::string line = "C" + std::to_string(q + 1) + " " + to_string(cl.verdict(q));
  const auto list = [](const std::vector<int>& qs) {
    std::string s;
    for (int p : qs) s += (s.empty() ? "" : ",") + std::string("C") + std::to_string(p + 1);
    return s;
  };
  if (!cl.intertwined_with(q).empty()) line += " with " + list(cl.intertwined_with(q));
  if (!cl.one_way_on(q).empty()) line += (cl.intertwined_with(q).empty() ? " on " : "; one-way on ") + list(cl.one_way_on(q));
  return line;
}

MleOptions mle_options(const CaseConfig& c, const Options& o) {
  MleOptions m;
  m.dt = c.dt;
  m.horizon = c.horizon;
  m.seed = o.seed;
  return m;
}

json block_json(const StabilityBlock& b) {
  json rows = json::array(), clusters = json::array();
  for (int r : b.rows) rows.push_back(r + 1);
  for (int q : b.clusters) clusters.push_back(q + 1);
  return {{"rows", rows}, {"clusters", clusters}};
}

// ---- subcommands -----------------------------------------------------------

void cmd_color(const Options& o) {
  const CaseConfig c = load(o);
  Run run("color", o);
  const Partition p = select_partition(c, o.partition);
  const QuotientNetwork q = quotient(c.network, p);
  json layers = json::array();
  for (std::size_t k = 0; k < q.R.size(); ++k) {
    layers.push_back({{"R", matrix_json(q.R[k])}, {"sigma", q.sigma[k]}, {"delay", q.delay[k]}});
    run.write_matrix("quotient_layer" + std::to_string(k + 1) + ".csv", q.R[k], "cluster");
  }
  std::ostringstream csv;
  csv << "node,cluster\n";
  for (int i = 0; i < p.size(); ++i) csv << i + 1 << ',' << p.cluster_of(i) + 1 << '\n';
  run.write_text("coloring.csv", csv.str());
  run.write_json("coloring.json", {{"clusters", clusters_json(p)},
                                   {"labels", labels_json(p)},
                                   {"quotient", {{"cluster_type", q.cluster_type}, {"layers", layers}}}});
  run.finish({{"partition", o.partition}});
  std::cout << p.cluster_count() << " clusters: " << p.to_string() << '\n';
}

void cmd_quotient(const Options& o) {
  const CaseConfig c = load(o);
  Run run("quotient", o);
  const Partition p = select_partition(c, o.partition);
  const QuotientNetwork q = quotient(c.network, p);
  Network qn = quotient_network(q, c.network);
  json doc = to_json(qn);
  doc["partition"] = clusters_json(p);
  run.write_json("quotient.json", doc);
  run.finish({{"partition", o.partition}});
  std::cout << "quotient with " << q.partition.cluster_count() << " nodes written\n";
}

void cmd_partitions(const Options& o) {
  const CaseConfig c = load(o);
  Run run("partitions", o);
  std::string note;
  LatticeOptions lo;
  lo.threads = 1;
  const PartitionLattice lat = analysis_lattice(c.network, lo, &note);
  json parts = json::array();
  for (int j = 0; j < lat.size(); ++j) {
    parts.push_back({{"index", j}, {"clusters", clusters_json(lat.partitions[j])}, {"labels", labels_json(lat.partitions[j])}});
  }
  json edges = json::array();
  for (auto [i, j] : lat.refinement_edges) edges.push_back({i, j});
  run.write_json("partitions.json", {{"n", c.network.size()},
                                     {"complete", note.empty()},
                                     {"note", note},
                                     {"partitions", parts},
                                     {"edges", edges}});
  run.finish(json::object());
  std::cout << lat.size() << " balanced partitions" << (note.empty() ? "" : " (" + note + ")") << '\n';
}

void cmd_breakings(const Options& o) {
  const CaseConfig c = load(o);
  Run run("breakings", o);
  std::string note;
  const PartitionLattice lat = lattice_for(c, o, &note);
  const Partition base = o.partition == "minimal" ? lat.minimal() : select_partition(c, o.partition);
  const auto vectors = breaking_vectors(lat, base);
  std::ostringstream csv;
  csv << "cluster,partition,pattern,local,index\n";
  json rows = json::array();
  for (const auto& v : vectors) {
    csv << 'C' << v.cluster + 1 << ',' << v.partition << ',' << v.pattern << ',' << v.local << ',' << v.index << '\n';
    rows.push_back({{"cluster", v.cluster + 1}, {"partition", v.partition}, {"pattern", v.pattern}, {"local", v.local},
                    {"index", v.index}});
    std::cout << 'C' << v.cluster + 1 << "  P" << v.partition << "  " << v.pattern << "  n=" << v.index << '\n';
  }
  run.write_text("breakings.csv", csv.str());
  run.write_json("breakings.json", {{"base", clusters_json(base)}, {"note", note}, {"vectors", rows}});
  run.finish({{"partition", o.partition}});
}

json transform_json(const Analysis& a) {
  const TransformResult& tr = a.transform;
  json rows = json::array();
  for (int r = 0; r < tr.size(); ++r) {
    rows.push_back({{"row", r + 1}, {"cluster", tr.row_cluster[r] + 1},
                    {"kind", r < tr.parallel_rows ? "parallel" : "transverse"}});
  }
  json blocks = json::array();
  for (const auto& b : tr.blocks) {
    json groups = json::array();
    for (const auto& g : b.groups) {
      json gr = json::array();
      for (int r : g) gr.push_back(r + 1);
      groups.push_back(gr);
    }
    json clusters = json::array();
    for (int q : b.clusters) clusters.push_back(q + 1);
    blocks.push_back({{"groups", groups}, {"clusters", clusters}, {"upper_triangular", b.upper_triangular}});
  }
  return {{"partition", clusters_json(tr.partition)},
          {"rows", rows},
          {"blocks", blocks},
          {"classification", classification_json(tr.classification)},
          {"warnings", tr.warnings},
          {"lattice_note", a.note}};
}

void cmd_transform(const Options& o) {
  const CaseConfig c = load(o);
  Run run("transform", o);
  const Analysis a = analyse(c, o);
  run.write_matrix("T.csv", a.transform.T, "row");
  for (std::size_t k = 0; k < a.transform.B.size(); ++k) {
    run.write_matrix("B_layer" + std::to_string(k + 1) + ".csv", a.transform.B[k], "row");
  }
  run.write_json("transform.json", transform_json(a));
  run.finish({{"partition", o.partition}, {"lattice", o.lattice}, {"base", o.base}});
  for (const auto& w : a.transform.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << a.transform.blocks.size() << " transverse blocks\n";
}

void cmd_classify(const Options& o) {
  const CaseConfig c = load(o);
  Run run("classify", o);
  const Analysis a = analyse(c, o);
  run.write_json("classification.json", classification_json(a.transform.classification));
  run.finish({{"partition", o.partition}, {"lattice", o.lattice}, {"base", o.base}});
  for (int q = 0; q < a.transform.classification.cluster_count(); ++q) {
    std::cout << verdict_line(a.transform.classification, q) << '\n';
  }
}

void cmd_simulate(const Options& o) {
  const CaseConfig c = load(o);
  Run run("simulate", o);
  const ModelSet models = bind_models(c.network, c.params);
  const Partition p = select_partition(c, o.partition);
  const int n = c.network.state_dim;
  Vector x0 = lift(p, sample_cluster_states(c.network, models, p, o.seed), n);
  if (o.perturb > 0.0) {
    std::mt19937_64 rng(o.seed + 1);
    std::normal_distribution<double> noise(0.0, o.perturb);
    for (int i = 0; i < x0.size(); ++i) x0[i] += noise(rng);
  }
  SimulationOptions so;
  so.dt = c.dt;
  so.horizon = c.horizon;
  so.record_every = o.record_every;
  const Trajectory traj = simulate(c.network, models, x0, so);
  std::ostringstream csv;
  csv << "time";
  for (int i = 0; i < traj.nodes; ++i)
    for (int k = 0; k < n; ++k) csv << ",n" << i + 1 << '_' << k + 1;
  csv << '\n';
  for (int s = 0; s < traj.samples(); ++s) {
    csv << num(traj.times[s]);
    for (int j = 0; j < traj.states.cols(); ++j) csv << ',' << num(traj.states(s, j));
    csv << '\n';
  }
  run.write_text("trace.csv", csv.str());
  const auto groups = coincident_groups(traj, o.tol, 0.9 * c.horizon);
  json g = json::array();
  for (const auto& grp : groups) {
    json a = json::array();
    for (int i : grp) a.push_back(i + 1);
    g.push_back(a);
  }
  run.write_json("simulate.json", {{"dt", traj.dt}, {"horizon", c.horizon}, {"groups", g},
                                   {"spread", cluster_spread(traj, p, 0.9 * c.horizon)}});
  run.finish({{"partition", o.partition}, {"dt", c.dt}, {"horizon", c.horizon}, {"perturb", o.perturb},
              {"tol", o.tol}, {"record_every", o.record_every}});
  std::cout << groups.size() << " coincident groups over the last 10% of the run\n";
}

void cmd_mle(const Options& o) {
  const CaseConfig c = load(o);
  Run run("mle", o);
  const Analysis a = analyse(c, o);
  const ModelSet models = bind_models(c.network, c.params);
  const MleOptions mo = mle_options(c, o);
  const Vector s0 = sample_cluster_states(c.network, models, a.transform.partition, o.seed);
  const auto blocks = stability_blocks(a.transform);
  const auto results = block_mles(a.transform, c.network, models, s0, mo, 1);
  std::ostringstream csv;
  csv << "block,mle,drift,converged\n";
  json out = json::array();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    csv << b + 1 << ',' << num(results[b].value) << ',' << num(results[b].drift) << ',' << results[b].converged << '\n';
    json entry = block_json(blocks[b]);
    entry["mle"] = results[b].value;
    entry["drift"] = results[b].drift;
    entry["converged"] = results[b].converged;
    out.push_back(entry);
    std::cout << "block " << b + 1 << ": " << num(results[b].value) << (results[b].converged ? "" : " (not converged)")
              << '\n';
  }
  run.write_text("mle.csv", csv.str());
  run.write_json("mle.json", {{"blocks", out}, {"dt", results.empty() ? mo.dt : results[0].dt}, {"horizon", mo.horizon}});
  run.finish({{"partition", o.partition}, {"dt", mo.dt}, {"horizon", mo.horizon}});
}

SweepSpec sweep_spec(const CaseConfig& c, const Options& o) {
  SweepSpec spec;
  spec.param = o.param.empty() ? c.sweep_param : o.param;
  if (spec.param.empty()) throw std::invalid_argument("no sweep parameter: pass --param");
  if (o.from || o.to || o.points) {
    if (!o.from || !o.to || !o.points) throw std::invalid_argument("--from, --to and --points go together");
    spec.grid = linspace(*o.from, *o.to, *o.points);
  } else if (spec.param == c.sweep_param) {
    spec.grid = c.grid;
  } else {
    throw std::invalid_argument("no grid for '" + spec.param + "': pass --from/--to/--points");
  }
  spec.bisection_steps = o.bisection;
  return spec;
}

json write_sweep(Run& run, const StabilityReport& rep, int cluster_count) {
  std::ostringstream csv, per_cluster;
  csv << rep.param << ",block,clusters,mle,drift,converged\n";
  per_cluster << rep.param;
  for (int q = 0; q < cluster_count; ++q) per_cluster << ",C" << q + 1;
  per_cluster << '\n';
  for (std::size_t p = 0; p < rep.points.size(); ++p) {
    const auto& pt = rep.points[p];
    for (std::size_t b = 0; b < pt.blocks.size(); ++b) {
      std::string cl;
      for (int q : rep.blocks[b].clusters) cl += (cl.empty() ? "C" : " C") + std::to_string(q + 1);
      csv << num(pt.value) << ',' << b + 1 << ',' << cl << ',' << num(pt.blocks[b].value) << ','
          << num(pt.blocks[b].drift) << ',' << pt.blocks[b].converged << '\n';
    }
    per_cluster << num(pt.value);
    for (double v : rep.cluster_mle(static_cast<int>(p), cluster_count)) per_cluster << ',' << num(v);
    per_cluster << '\n';
  }
  run.write_text("sweep.csv", csv.str());
  run.write_text("sweep_clusters.csv", per_cluster.str());
  json blocks = json::array();
  for (const auto& b : rep.blocks) blocks.push_back(block_json(b));
  json points = json::array();
  for (const auto& pt : rep.points) points.push_back({{"value", pt.value}, {"max_mle", pt.max_mle()}});
  json doc{{"param", rep.param}, {"blocks", blocks}, {"points", points},
           {"threshold", rep.threshold ? json(*rep.threshold) : json(nullptr)},
           {"dt", rep.options.dt}, {"horizon", rep.options.horizon}};
  run.write_json("sweep.json", doc);
  return doc;
}

void cmd_sweep(const Options& o) {
  const CaseConfig c = load(o);
  Run run("sweep", o);
  const Analysis a = analyse(c, o);
  const ModelSet models = bind_models(c.network, c.params);
  const SweepSpec spec = sweep_spec(c, o);
  const Vector s0 = sample_cluster_states(c.network, models, a.transform.partition, o.seed);
  const StabilityReport rep = sweep(a.transform, c.network, c.params, s0, spec, mle_options(c, o), o.threads);
  write_sweep(run, rep, a.transform.partition.cluster_count());
  run.finish({{"partition", o.partition}, {"param", spec.param}, {"from", spec.grid.front()}, {"to", spec.grid.back()},
              {"points", spec.grid.size()}, {"bisection", spec.bisection_steps}, {"dt", c.dt}, {"horizon", c.horizon}});
  for (const auto& pt : rep.points) std::cout << spec.param << '=' << num(pt.value) << "  max MLE " << num(pt.max_mle()) << '\n';
  if (rep.threshold) std::cout << "sign change at " << spec.param << " = " << num(*rep.threshold) << '\n';
}

json run_basin(Run& run, const CaseConfig& c, const Options& o, const Partition& p, const std::vector<double>& delays) {
  const QuotientNetwork q = quotient(c.network, p);
  const Network qn = quotient_network(q, c.network);
  const ModelSet models = bind_models(qn, c.params);
  SimulationOptions so;
  so.dt = c.dt;
  so.horizon = c.horizon;
  const BasinMap map = basin_map(qn, models, delays, o.lag_points, so, o.tol, o.threads);
  std::ostringstream csv;
  csv << "delay,initial_lag,final_lag,label\n";
  json counts = json::array();
  for (std::size_t d = 0; d < map.delays.size(); ++d) {
    int anti = 0, in = 0;
    for (std::size_t k = 0; k < map.initial_lags.size(); ++k) {
      csv << num(map.delays[d]) << ',' << num(map.initial_lags[k]) << ',' << num(map.final_lags[d][k]) << ','
          << to_string(map.labels[d][k]) << '\n';
      anti += map.labels[d][k] == BasinLabel::kAntiPhase;
      in += map.labels[d][k] == BasinLabel::kInPhase;
    }
    counts.push_back({{"delay", map.delays[d]}, {"anti_phase", anti}, {"in_phase", in}});
  }
  run.write_text("basin.csv", csv.str());
  json doc{{"partition", clusters_json(p)}, {"lag_points", o.lag_points}, {"tolerance", o.tol}, {"counts", counts}};
  run.write_json("basin.json", doc);
  return doc;
}

void cmd_basin(const Options& o) {
  const CaseConfig c = load(o);
  Run run("basin", o);
  const Partition p = select_partition(c, o.partition);
  std::vector<double> delays = c.grid;
  if (o.from || o.to || o.points) {
    if (!o.from || !o.to || !o.points) throw std::invalid_argument("--from, --to and --points go together");
    delays = linspace(*o.from, *o.to, *o.points);
  }
  if (delays.empty()) throw std::invalid_argument("no delay grid: pass --from/--to/--points");
  const json doc = run_basin(run, c, o, p, delays);
  run.finish({{"partition", o.partition}, {"delays", delays}, {"lag_points", o.lag_points}, {"tol", o.tol},
              {"dt", c.dt}, {"horizon", c.horizon}});
  for (const auto& cnt : doc["counts"]) {
    std::cout << "delay " << num(cnt["delay"].get<double>()) << ": " << cnt["anti_phase"].get<int>() << '/'
              << o.lag_points << " anti-phase\n";
  }
}

void cmd_case(const Options& o) {
  const CaseConfig c = load(o);
  Run run("case", o);
  Analysis a = analyse(c, o);
  const TransformResult& tr = a.transform;
  json summary{{"name", c.name},
               {"clusters", tr.partition.cluster_count()},
               {"lattice_size", a.lattice.size()},
               {"lattice_complete", a.note.empty()},
               {"blocks", tr.blocks.size()},
               {"classification", classification_json(tr.classification)},
               {"expected", c.expected}};
  run.write_matrix("T.csv", tr.T, "row");
  run.write_json("transform.json", transform_json(a));
  std::cout << c.name << ": " << tr.partition.cluster_count() << " clusters " << tr.partition.to_string() << ", "
            << tr.blocks.size() << " transverse blocks\n";
  for (int q = 0; q < tr.classification.cluster_count(); ++q) std::cout << "  " << verdict_line(tr.classification, q) << '\n';

  if (o.dynamics && !c.sweep_param.empty()) {
    const ModelSet models = bind_models(c.network, c.params);
    const SweepSpec spec = sweep_spec(c, o);
    const Vector s0 = sample_cluster_states(c.network, models, tr.partition, o.seed);
    const StabilityReport rep = sweep(tr, c.network, c.params, s0, spec, mle_options(c, o), o.threads);
    summary["sweep"] = write_sweep(run, rep, tr.partition.cluster_count());
    if (rep.threshold) std::cout << "  sign change at " << spec.param << " = " << num(*rep.threshold) << '\n';
    if (auto it = c.partitions.find("two_cluster"); it != c.partitions.end()) {
      summary["basin"] = run_basin(run, c, o, it->second, c.grid);
    }
    if (c.network.state_dim == 1 && spec.param == "delay") {
      SimulationOptions so;
      so.dt = c.dt;
      so.horizon = c.horizon;
      const PhaseLagCurve curve = phase_lag_curve(c.network, models, spec.grid, so, o.seed, o.threads);
      std::ostringstream csv;
      csv << "delay";
      for (int i = 0; i < c.network.size(); ++i) csv << ",lag" << i + 1;
      csv << ",locked\n";
      for (std::size_t d = 0; d < curve.delays.size(); ++d) {
        csv << num(curve.delays[d]);
        for (int i = 0; i < c.network.size(); ++i) csv << ',' << num(curve.lags(d, i));
        csv << ',' << curve.locked[d] << '\n';
      }
      run.write_text("phase_lags.csv", csv.str());
      json fits = json::array();
      for (const auto& f : curve.fits) fits.push_back({{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}});
      summary["phase_lag_fits"] = fits;
    }
  }
  run.write_json("case.json", summary);
  run.finish({{"case", c.name}, {"dynamics", o.dynamics}, {"dt", c.dt}, {"horizon", c.horizon}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster synchronization analysis for directed, weighted, delayed multilayer networks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("input,--input", o.input, "Network file (JSON)");
    sub->add_option("--case", o.case_name, "Shipped fixture name instead of an input file");
    sub->add_option("--out-dir", o.out_dir, "Directory for artifacts")->capture_default_str();
    sub->add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
    sub->add_option("--set", o.set, "Model parameter override key=value (repeatable)");
  };
  const auto numerics = [&](CLI::App* sub) {
    sub->add_option("--dt", o.dt, "Requested integration step (reduced to fit the delays)");
    sub->add_option("--horizon", o.horizon, "Integration horizon");
  };
  const auto partition = [&](CLI::App* sub) {
    sub->add_option("--partition", o.partition,
                    "'minimal', a partition named by the case, or comma separated node labels")
        ->capture_default_str();
  };
  const auto lattice = [&](CLI::App* sub) {
    sub->add_option("--lattice", o.lattice, "Lattice written by the partitions subcommand");
    sub->add_option("--base", o.base, "Index of the base partition within --lattice")->capture_default_str();
  };
  const auto range = [&](CLI::App* sub) {
    sub->add_option("--from", o.from, "First grid value");
    sub->add_option("--to", o.to, "Last grid value");
    sub->add_option("--points", o.points, "Grid size")->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "Worker threads (0: all cores)")->capture_default_str();
  };

  std::map<std::string, std::function<void(const Options&)>> handlers;
  const auto add = [&](const std::string& name, const std::string& help, std::function<void(const Options&)> fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    handlers[name] = std::move(fn);
    return sub;
  };

  partition(add("color", "Minimal balanced coloring (or a given partition) and its quotient", cmd_color));
  partition(add("quotient", "Quotient network of a partition as a network file", cmd_quotient));
  add("partitions", "Lattice of balanced partitions", cmd_partitions);
  {
    auto* sub = add("breakings", "Breaking vectors and intertwining indices", cmd_breakings);
    partition(sub);
    sub->add_option("--lattice", o.lattice, "Lattice written by the partitions subcommand");
  }
  for (auto [name, help, fn] : {std::tuple{"transform", "Irreducible transform T, matrices B and blocks", cmd_transform},
                                std::tuple{"classify", "Dependency verdict per cluster", cmd_classify}}) {
    auto* sub = add(name, help, fn);
    partition(sub);
    lattice(sub);
  }
  {
    auto* sub = add("simulate", "Full-network time trace from the partition's synchrony subspace", cmd_simulate);
    partition(sub);
    numerics(sub);
    sub->add_option("--perturb", o.perturb, "Standard deviation of the initial kick off the subspace");
    sub->add_option("--tol", o.tol, "Coincidence tolerance for grouping nodes")->capture_default_str();
    sub->add_option("--record-every", o.record_every, "Record every k-th step")->capture_default_str();
  }
  {
    auto* sub = add("mle", "Transverse Lyapunov exponent of every stability block", cmd_mle);
    partition(sub);
    lattice(sub);
    numerics(sub);
  }
  {
    auto* sub = add("sweep", "Block exponents over a parameter grid", cmd_sweep);
    partition(sub);
    lattice(sub);
    numerics(sub);
    range(sub);
    sub->add_option("--param", o.param, "sigma<k>, delay<k> or delay");
    sub->add_option("--bisection", o.bisection, "Bisection steps on the first sign change")->capture_default_str();
  }
  {
    auto* sub = add("basin", "In-phase / anti-phase basin over delay for a two-cluster phase quotient", cmd_basin);
    partition(sub);
    numerics(sub);
    range(sub);
    sub->add_option("--lag-points", o.lag_points, "Initial lags per delay")->capture_default_str();
    sub->add_option("--tol", o.tol, "Tolerance on the final lag")->capture_default_str();
  }
  {
    auto* sub = add("case", "Full analysis of a fixture", cmd_case);
    partition(sub);
    numerics(sub);
    range(sub);
    sub->add_flag("--dynamics", o.dynamics, "Also run the sweep, basin map and phase lags");
    sub->add_option("--lag-points", o.lag_points, "Initial lags per delay")->capture_default_str();
    sub->add_option("--tol", o.tol, "Tolerance on the final lag")->capture_default_str();
  }

  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto& [name, fn] : handlers) {
      if (app.got_subcommand(name)) fn(o);
    }
  } catch (const NetworkError& e) {
    std::cerr << "csync: " << (e.location().empty() ? "" : e.location() + ": ") << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "csync: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
