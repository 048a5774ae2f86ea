#include "fdne/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fdne/errors.hpp"

namespace fdne {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  if (s.empty()) return kNan;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("CSV: bad float field '" + std::string(s) + "'");
  }
  return v;
}

std::string sanitize_message(std::string msg) {
  for (char& c : msg) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return msg;
}

struct SweepPoint {
  std::int64_t n = 0;
  int k = 0;
  NetworkClassSpec class_spec;
};

std::vector<SweepPoint> resolve_points(const ExperimentConfig& config) {
  std::vector<SweepPoint> points;
  auto class_for = [&](int k) {
    const double m = 0.5 * std::log(static_cast<double>(k));
    if (config.kind == DivergenceKind::SqHellinger) {
      return NetworkClassSpec::truncated_star(m, 1.0 / std::log(static_cast<double>(k)));
    }
    return NetworkClassSpec::star(m);
  };
  if (config.sweep.axis == SweepSpec::Axis::Ns) {
    if (config.sweep.ns.empty()) throw ConfigError("sweep: need a non-empty n list");
    for (const auto n : config.sweep.ns) {
      const Schedule s = schedule(config.kind, n, config.schedule_mode);
      points.push_back({n, s.k, class_for(s.k)});
    }
  } else {
    if (config.sweep.ks.empty()) throw ConfigError("sweep: need a non-empty k list");
    if (config.sweep.fixed_n < 1) throw ConfigError("sweep: k sweeps need a fixed n >= 1");
    for (const auto k : config.sweep.ks) {
      if (k < 2) throw ConfigError("sweep: explicit k values must be >= 2");
      points.push_back({config.sweep.fixed_n, k, class_for(k)});
    }
  }
  return points;
}

void validate(const ExperimentConfig& config) {
  if (!config.pair) throw ConfigError("experiment: missing distribution pair");
  if (config.replicas < 1) throw ConfigError("experiment: replicas must be >= 1");
  if (config.epochs < 1) throw ConfigError("experiment: epochs must be >= 1");
  if (!(config.batch_rule > 0)) throw ConfigError("experiment: batch_rule must be positive");
  if (!(config.lr_initial > 0) || !(config.lr_late > 0)) {
    throw ConfigError("experiment: learning rates must be positive");
  }
}

// --- strict JSON helpers ----------------------------------------------------

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return it.key() == a; }) == allowed.end()) {
      throw ConfigError("config: unknown field '" + it.key() + "' in " + where);
    }
  }
}

Marginal1D marginal_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: marginal must be an object");
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform") {
    reject_unknown(j, {"type", "lo", "hi"}, "uniform marginal");
    return Marginal1D::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  }
  if (type == "truncgauss") {
    reject_unknown(j, {"type", "mu", "sigma", "lo", "hi"}, "truncgauss marginal");
    return Marginal1D::trunc_gauss(j.at("mu").get<double>(), j.at("sigma").get<double>(),
                                   j.at("lo").get<double>(), j.at("hi").get<double>());
  }
  throw ConfigError("config: unknown marginal type '" + type +
                    "' (expected uniform | truncgauss)");
}

ProductDistribution distribution_from_json(const nlohmann::json& arr, int dims) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != dims) {
    throw ConfigError("config: each marginal list must have exactly 'dims' entries");
  }
  std::vector<Marginal1D> ms;
  ms.reserve(arr.size());
  for (const auto& j : arr) ms.push_back(marginal_from_json(j));
  return ProductDistribution(std::move(ms));
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& config, int workers,
                                      const std::vector<RunRecord>& already_done) {
  validate(config);
  const auto points = resolve_points(config);
  const GroundTruthReport gt = ground_truth(config.kind, *config.pair);

  std::set<std::tuple<std::int64_t, int, std::uint64_t>> done;
  for (const auto& r : already_done) done.insert({r.n, r.k, r.seed});

  struct Task {
    std::size_t point_index;
    int replica;
  };
  std::vector<Task> tasks;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    for (int r = 0; r < config.replicas; ++r) {
      if (done.count({points[pi].n, points[pi].k, static_cast<std::uint64_t>(r)}) == 0) {
        tasks.push_back({pi, r});
      }
    }
  }

  std::vector<RunRecord> records(tasks.size());
  auto run_task = [&](std::size_t ti) {
    const Task& task = tasks[ti];
    const SweepPoint& pt = points[task.point_index];
    RunRecord rec;
    rec.name = config.name;
    rec.kind = config.kind;
    rec.n = pt.n;
    rec.k = pt.k;
    rec.seed = static_cast<std::uint64_t>(task.replica);
    rec.ground_truth = gt.value;
    try {
      TrainConfig tc;
      tc.kind = config.kind;
      tc.class_spec = pt.class_spec;
      tc.k = pt.k;
      tc.n = static_cast<int>(pt.n);
      tc.epochs = config.epochs;
      tc.batch_size =
          std::max(1, static_cast<int>(std::lround(static_cast<double>(pt.n) * config.batch_rule)));
      tc.lr_initial = config.lr_initial;
      tc.lr_late = config.lr_late;
      tc.lr_switch_epoch = config.lr_switch_epoch;
      tc.seed = config.master_seed;
      tc.stream = rec.seed;
      tc.step_hook = config.train_hook;
      const TrainResult tr = train(tc, *config.pair);
      rec.estimate = tr.estimate;
      rec.abs_error = std::fabs(tr.estimate - gt.value);
      rec.wall_time_s = tr.wall_time_s;
    } catch (const std::exception& e) {
      rec.estimate = kNan;
      rec.abs_error = kNan;
      rec.wall_time_s = kNan;
      rec.error_msg = sanitize_message(e.what());
    }
    records[ti] = std::move(rec);
  };

  int thread_count = workers > 0 ? workers
                                 : static_cast<int>(std::thread::hardware_concurrency());
  thread_count = std::max(1, std::min<int>(thread_count, static_cast<int>(tasks.size())));
  if (thread_count <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
          run_task(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Merge resumed rows and enforce (sweep point, replica) file order.
  std::vector<RunRecord> all = records;
  for (const auto& r : already_done) all.push_back(r);
  std::map<std::pair<std::int64_t, int>, std::size_t> point_order;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    point_order.emplace(std::make_pair(points[pi].n, points[pi].k), pi);
  }
  std::stable_sort(all.begin(), all.end(), [&](const RunRecord& a, const RunRecord& b) {
    const auto pa = point_order.find({a.n, a.k});
    const auto pb = point_order.find({b.n, b.k});
    const std::size_t ia = pa == point_order.end() ? points.size() : pa->second;
    const std::size_t ib = pb == point_order.end() ? points.size() : pb->second;
    return std::tie(ia, a.seed) < std::tie(ib, b.seed);
  });
  return all;
}

std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw ConfigError("aggregate: no records");
  std::vector<SummaryRow> rows;
  std::map<std::pair<std::int64_t, int>, std::size_t> index;
  std::map<std::size_t, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    if (r.failed()) continue;
    auto [it, inserted] = index.emplace(std::make_pair(r.n, r.k), index.size());
    groups[it->second].push_back(&r);
  }
  for (const auto& [gi, members] : groups) {
    SummaryRow row;
    row.n = members.front()->n;
    row.k = members.front()->k;
    row.count = static_cast<int>(members.size());
    row.ground_truth = members.front()->ground_truth;
    double sum = 0, sum_err = 0;
    for (const auto* r : members) {
      sum += r->estimate;
      sum_err += r->abs_error;
    }
    row.mean_estimate = sum / row.count;
    row.mean_abs_error = sum_err / row.count;
    if (row.count > 1) {
      double ss = 0;
      for (const auto* r : members) {
        const double dev = r->estimate - row.mean_estimate;
        ss += dev * dev;
      }
      row.std_estimate = std::sqrt(ss / (row.count - 1));
    }
    rows.push_back(row);
  }
  return rows;
}

RateFit fit_rate(const std::vector<SummaryRow>& summaries) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : summaries) {
    if (!(s.mean_abs_error > 0)) {
      throw DegenerateFit("fit_rate: zero or negative mean error at a sweep point");
    }
    pts.emplace_back(std::log(static_cast<double>(s.n)), std::log(s.mean_abs_error));
  }
  if (pts.size() < 2) throw DegenerateFit("fit_rate: need at least two sweep points");

  const double n = static_cast<double>(pts.size());
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0) throw DegenerateFit("fit_rate: all sweep points share one n");

  RateFit fit;
  fit.points_used = static_cast<int>(pts.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (const auto& [x, y] : pts) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0 ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
  return fit;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "name,kind,n,k,seed,estimate,ground_truth,abs_error,wall_time_s,error_msg\n";
  for (const auto& r : records) {
    out << r.name << ',' << to_string(r.kind) << ',' << r.n << ',' << r.k << ',' << r.seed
        << ',';
    if (r.failed()) {
      out << ',' << format_double(r.ground_truth) << ",,," << r.error_msg << '\n';
    } else {
      out << format_double(r.estimate) << ',' << format_double(r.ground_truth) << ','
          << format_double(r.abs_error) << ',' << format_double(r.wall_time_s) << ",\n";
    }
  }
  return out.str();
}

void emit_csv_records(const std::vector<RunRecord>& records,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out << records_to_csv(records);
  if (!out.flush()) throw ConfigError("write failed for '" + path.string() + "'");
}

std::vector<RunRecord> parse_csv_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("CSV '" + path.string() + "' is empty");
  if (line != "name,kind,n,k,seed,estimate,ground_truth,abs_error,wall_time_s,error_msg") {
    throw ConfigError("CSV '" + path.string() + "' has an unexpected header");
  }
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.emplace_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 10) {
      throw ConfigError("CSV '" + path.string() + "': malformed row '" + line + "'");
    }
    RunRecord r;
    r.name = fields[0];
    r.kind = divergence_from_string(fields[1]);
    r.n = std::stoll(fields[2]);
    r.k = std::stoi(fields[3]);
    r.seed = std::stoull(fields[4]);
    r.estimate = parse_double(fields[5]);
    r.ground_truth = parse_double(fields[6]);
    r.abs_error = parse_double(fields[7]);
    r.wall_time_s = parse_double(fields[8]);
    r.error_msg = fields[9];
    records.push_back(std::move(r));
  }
  return records;
}

void emit_csv_summaries(const std::vector<SummaryRow>& summaries,
                        const std::filesystem::path& path) {
  {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    out << "n,k,count,mean_estimate,std_estimate,mean_abs_error,ground_truth\n";
    for (const auto& s : summaries) {
      out << s.n << ',' << s.k << ',' << s.count << ',' << format_double(s.mean_estimate)
          << ',' << format_double(s.std_estimate) << ',' << format_double(s.mean_abs_error)
          << ',' << format_double(s.ground_truth) << '\n';
    }
    if (!out.flush()) throw ConfigError("write failed for '" + path.string() + "'");
  }
  const std::filesystem::path script = path.string() + ".gp";
  std::ofstream gp(script);
  if (!gp) throw ConfigError("cannot open '" + script.string() + "' for writing");
  gp << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set xlabel 'n'\n"
     << "set ylabel 'mean abs error'\n"
     << "plot '" << path.filename().string()
     << "' every ::1 using 1:6 with linespoints title 'mean abs error', \\\n"
     << "     '' every ::1 using 1:4:5 with yerrorbars title 'estimate'\n";
  if (!gp.flush()) throw ConfigError("write failed for '" + script.string() + "'");
}

std::vector<SummaryRow> parse_csv_summaries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("CSV '" + path.string() + "' is empty");
  if (line != "n,k,count,mean_estimate,std_estimate,mean_abs_error,ground_truth") {
    throw ConfigError("CSV '" + path.string() + "' has an unexpected header");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.emplace_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 7) {
      throw ConfigError("CSV '" + path.string() + "': malformed row '" + line + "'");
    }
    SummaryRow s;
    s.n = std::stoll(fields[0]);
    s.k = std::stoi(fields[1]);
    s.count = std::stoi(fields[2]);
    s.mean_estimate = parse_double(fields[3]);
    s.std_estimate = parse_double(fields[4]);
    s.mean_abs_error = parse_double(fields[5]);
    s.ground_truth = parse_double(fields[6]);
    rows.push_back(s);
  }
  return rows;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: bad JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(j,
                 {"name", "kind", "pair", "sweep", "schedule_mode", "replicas", "master_seed",
                  "train"},
                 "top-level config");
  ExperimentConfig c;
  try {
    if (j.contains("name")) c.name = j.at("name").get<std::string>();
    c.kind = divergence_from_string(j.at("kind").get<std::string>());

    const auto& pair = j.at("pair");
    reject_unknown(pair, {"dims", "marginals"}, "pair");
    const int dims = pair.at("dims").get<int>();
    const auto& marginals = pair.at("marginals");
    if (!marginals.is_array() || marginals.size() != 2) {
      throw ConfigError("config: pair.marginals must be [P marginals, Q marginals]");
    }
    c.pair.emplace(distribution_from_json(marginals[0], dims),
                   distribution_from_json(marginals[1], dims));

    const auto& sweep = j.at("sweep");
    if (sweep.contains("ns")) {
      reject_unknown(sweep, {"ns"}, "sweep");
      c.sweep.axis = SweepSpec::Axis::Ns;
      c.sweep.ns = sweep.at("ns").get<std::vector<std::int64_t>>();
    } else if (sweep.contains("ks")) {
      reject_unknown(sweep, {"ks", "n"}, "sweep");
      c.sweep.axis = SweepSpec::Axis::Ks;
      c.sweep.ks = sweep.at("ks").get<std::vector<int>>();
      c.sweep.fixed_n = sweep.at("n").get<std::int64_t>();
    } else {
      throw ConfigError("config: sweep needs either 'ns' or 'ks' (+ 'n')");
    }

    if (j.contains("schedule_mode")) {
      c.schedule_mode = schedule_mode_from_string(j.at("schedule_mode").get<std::string>());
    }
    if (j.contains("replicas")) c.replicas = j.at("replicas").get<int>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();

    if (j.contains("train")) {
      const auto& t = j.at("train");
      reject_unknown(t, {"epochs", "lr_initial", "lr_late", "lr_switch_epoch", "batch_rule"},
                     "train");
      if (t.contains("epochs")) c.epochs = t.at("epochs").get<int>();
      if (t.contains("lr_initial")) c.lr_initial = t.at("lr_initial").get<double>();
      if (t.contains("lr_late")) c.lr_late = t.at("lr_late").get<double>();
      if (t.contains("lr_switch_epoch")) c.lr_switch_epoch = t.at("lr_switch_epoch").get<int>();
      if (t.contains("batch_rule")) c.batch_rule = t.at("batch_rule").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: missing or mistyped field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string train_result_to_json(const TrainResult& result) {
  nlohmann::json j;
  j["estimate"] = result.estimate;
  j["wall_time_s"] = result.wall_time_s;
  j["trajectory"] = result.trajectory;
  j["checkpoint"] = nlohmann::json::parse(checkpoint_to_json(result.params, result.bounds));
  return j.dump(2);
}

}  // namespace fdne
