#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dfl/core.hpp"
#include "dfl/datagen.hpp"
#include "dfl/dataset.hpp"
#include "dfl/grid_shortest_path.hpp"
#include "dfl/knapsack.hpp"
#include "dfl/losses.hpp"
#include "dfl/metrics.hpp"
#include "dfl/predictor.hpp"
#include "dfl/train.hpp"
#include "dfl/tsp.hpp"
#include "dfl/worker_pool.hpp"

// Experiment harness: declarative configs, seeded repetitions, CSV results.
namespace dfl::harness {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kResultsSchemaVersion = 1;

enum class Problem { ShortestPath, Knapsack, Tsp };

inline const char* to_string(Problem p) {
  switch (p) {
    case Problem::ShortestPath: return "shortest_path";
    case Problem::Knapsack: return "knapsack";
    case Problem::Tsp: return "tsp";
  }
  return "?";
}

// One entry of the method roster.
struct MethodSpec {
  std::string name;  // config token, e.g. "spo+-rel"
  enum class Kind { LeastSquares, Knn, Trained } kind = Kind::Trained;
  TrainMethod train = TrainMethod::SpoPlus;
  bool relaxed = false;
  bool l1 = false;
  bool l2 = false;
};

inline std::optional<MethodSpec> parse_method(const std::string& token) {
  using K = MethodSpec::Kind;
  if (token == "2s-lr") return MethodSpec{token, K::LeastSquares};
  if (token == "2s-knn") return MethodSpec{token, K::Knn};
  if (token == "2s-lr-sgd") return MethodSpec{token, K::Trained, TrainMethod::TwoStageMse};
  if (token == "dpo") return MethodSpec{token, K::Trained, TrainMethod::Dpo};
  static const std::map<std::string, TrainMethod> bases{
      {"spo+", TrainMethod::SpoPlus}, {"dbb", TrainMethod::Dbb}, {"pfyl", TrainMethod::Pfyl}};
  for (const auto& [base, m] : bases) {
    if (token == base) return MethodSpec{token, K::Trained, m};
    if (token == base + "-rel") return MethodSpec{token, K::Trained, m, true};
    if (token == base + "-l1") return MethodSpec{token, K::Trained, m, false, true};
    if (token == base + "-l2") return MethodSpec{token, K::Trained, m, false, false, true};
  }
  return std::nullopt;
}

struct ExperimentConfig {
  Problem problem = Problem::ShortestPath;
  std::size_t grid_height = 5, grid_width = 5;
  std::size_t items = 32, resources = 2;
  double capacity = 20.0;
  std::size_t nodes = 10;
  TspFormulation tsp_relaxation = TspFormulation::GG;

  std::size_t n_train = 1000, n_test = 1000, features = 5;
  int deg = 1;
  double noise = 0.0;

  std::vector<MethodSpec> methods;
  double lambda = losses::kDefaultLambda;
  std::size_t samples = 1;
  double sigma = 1.0;
  bool unscaled_jacobian = false;
  losses::DownstreamKind downstream = losses::DownstreamKind::Regret;
  double phi1 = 1.0, phi2 = 1.0;
  double learning_rate = 0.01, momentum = 0.9;
  std::size_t batch_size = 32, epochs = 20;
  std::size_t knn_k = 5;

  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool unambiguous = false;
  std::size_t timing_epochs = 20;

  // Canonical echo; excludes `workers`, which never affects results.
  std::string canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "schema_version = " << kConfigSchemaVersion << '\n' << "problem = " << to_string(problem) << '\n';
    switch (problem) {
      case Problem::ShortestPath: os << "grid = " << grid_height << 'x' << grid_width << '\n'; break;
      case Problem::Knapsack:
        os << "items = " << items << "\nresources = " << resources << "\ncapacity = " << capacity << '\n';
        break;
      case Problem::Tsp:
        os << "nodes = " << nodes << "\ntsp_relaxation = "
           << (tsp_relaxation == TspFormulation::GG ? "gg" : "mtz") << '\n';
        break;
    }
    os << "n_train = " << n_train << "\nn_test = " << n_test << "\nfeatures = " << features
       << "\ndeg = " << deg << "\nnoise = " << noise << "\nmethods = ";
    for (std::size_t i = 0; i < methods.size(); ++i) os << (i ? ", " : "") << methods[i].name;
    const char* ds = downstream == losses::DownstreamKind::Regret    ? "regret"
                     : downstream == losses::DownstreamKind::Hamming ? "hamming"
                                                                      : "squared";
    os << "\nlambda = " << lambda << "\nsamples = " << samples << "\nsigma = " << sigma
       << "\nunscaled_jacobian = " << (unscaled_jacobian ? "true" : "false") << "\ndownstream = " << ds
       << "\nphi1 = " << phi1 << "\nphi2 = " << phi2 << "\nlr = " << learning_rate
       << "\nmomentum = " << momentum << "\nbatch = " << batch_size << "\nepochs = " << epochs
       << "\nknn_k = " << knn_k << "\nrepetitions = " << repetitions << "\nseed = " << seed
       << "\nunambiguous = " << (unambiguous ? "true" : "false")
       << "\ntiming_epochs = " << timing_epochs << '\n';
    return os.str();
  }

  std::string fingerprint() const {
    const std::string c = canonical();
    Fnv1a h;
    h.update(c.data(), c.size());
    return hex64(h.digest());
  }
};

struct ValidationResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

// Static checks over a parsed config; every violation is listed.
inline std::vector<std::string> check_config(const ExperimentConfig& c) {
  std::vector<std::string> err;
  auto need = [&](bool cond, const std::string& msg) {
    if (!cond) err.push_back(msg);
  };
  switch (c.problem) {
    case Problem::ShortestPath:
      need(c.grid_height >= 2 && c.grid_width >= 2, "grid must be at least 2x2");
      break;
    case Problem::Knapsack:
      need(c.items >= 1, "items must be >= 1");
      need(c.resources >= 1, "resources must be >= 1");
      need(c.capacity > 0.0, "capacity must be positive");
      break;
    case Problem::Tsp:
      need(c.nodes >= 3, "nodes must be >= 3");
      need(c.nodes <= kHeldKarpMaxNodes,
           "nodes must be <= " + std::to_string(kHeldKarpMaxNodes) + " for the exact TSP solver");
      break;
  }
  need(c.n_train >= 1, "n_train must be >= 1");
  need(c.n_test >= 1, "n_test must be >= 1");
  need(c.features >= 1, "features must be >= 1");
  need(c.deg >= 1, "deg must be >= 1");
  need(c.noise >= 0.0 && c.noise < 1.0, "noise must lie in [0, 1)");
  need(!c.methods.empty(), "methods must list at least one method");
  need(c.learning_rate > 0.0, "lr must be positive");
  need(c.momentum >= 0.0 && c.momentum < 1.0, "momentum must lie in [0, 1)");
  need(c.batch_size >= 1, "batch must be >= 1");
  need(c.epochs >= 1, "epochs must be >= 1");
  need(c.repetitions >= 1, "repetitions must be >= 1");
  need(c.workers >= 1, "workers must be >= 1");
  need(c.timing_epochs >= 1, "timing_epochs must be >= 1");
  for (const auto& m : c.methods) {
    if (m.kind == MethodSpec::Kind::Knn)
      need(c.knn_k >= 1 && c.knn_k <= c.n_train, "knn_k must lie in [1, n_train]");
    if (m.kind != MethodSpec::Kind::Trained) continue;
    if (m.train == TrainMethod::Dbb) need(c.lambda > 0.0, "lambda must be positive");
    if (m.train == TrainMethod::Dpo || m.train == TrainMethod::Pfyl) {
      need(c.samples >= 1, "samples must be >= 1");
      need(c.sigma > 0.0, "sigma must be positive");
    }
    if (m.train == TrainMethod::Dpo && c.downstream == losses::DownstreamKind::Hamming)
      err.push_back("dpo: Hamming loss needs binary decisions but DPO outputs fractional ones");
    if (m.relaxed && c.downstream == losses::DownstreamKind::Hamming && m.train == TrainMethod::Dbb)
      err.push_back(m.name + ": Hamming loss needs binary decisions but the relaxation is fractional");
    if (m.l1) need(c.phi1 > 0.0, m.name + ": phi1 must be positive");
    if (m.l2) need(c.phi2 > 0.0, m.name + ": phi2 must be positive");
    if (m.relaxed) {
      if (c.problem == Problem::ShortestPath)
        err.push_back(m.name +
                      ": shortest_path has no distinct relaxation (the grid flow LP is totally "
                      "unimodular, so its LP optimum is already integral)");
      if (c.problem == Problem::Tsp && c.nodes > kTspLpMaxNodes)
        err.push_back(m.name + ": TSP relaxations support at most " +
                      std::to_string(kTspLpMaxNodes) + " nodes");
    }
  }
  return err;
}

// Parses "key = value" lines ('#' starts a comment).
inline ValidationResult parse_config(const std::string& text) {
  ValidationResult out;
  ExperimentConfig c;
  auto& err = out.errors;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      err.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    if (kv.count(key)) err.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto num = [&](const std::string& key, auto& dst) {
    auto v = take(key);
    if (!v) return;
    try {
      std::size_t used = 0;
      using T = std::decay_t<decltype(dst)>;
      if constexpr (std::is_same_v<T, double>) {
        dst = std::stod(*v, &used);
      } else if constexpr (std::is_same_v<T, int>) {
        dst = std::stoi(*v, &used);
      } else {
        if (!v->empty() && (*v)[0] == '-') throw std::invalid_argument("negative");
        dst = static_cast<T>(std::stoull(*v, &used));
      }
      if (used != v->size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      err.push_back(key + ": invalid number '" + *v + "'");
    }
  };
  auto flag = [&](const std::string& key, bool& dst) {
    auto v = take(key);
    if (!v) return;
    if (*v == "true" || *v == "1") dst = true;
    else if (*v == "false" || *v == "0") dst = false;
    else err.push_back(key + ": expected true or false");
  };

  if (auto v = take("schema_version")) {
    if (*v != std::to_string(kConfigSchemaVersion))
      err.push_back("schema_version: unsupported version '" + *v + "'");
  } else {
    err.push_back("schema_version: missing");
  }
  if (auto v = take("problem")) {
    if (*v == "shortest_path") c.problem = Problem::ShortestPath;
    else if (*v == "knapsack") c.problem = Problem::Knapsack;
    else if (*v == "tsp") c.problem = Problem::Tsp;
    else err.push_back("problem: unknown problem '" + *v + "'");
  } else {
    err.push_back("problem: missing");
  }
  if (auto v = take("grid")) {
    const auto x = v->find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument("no x");
      c.grid_height = std::stoul(v->substr(0, x));
      c.grid_width = std::stoul(v->substr(x + 1));
    } catch (const std::exception&) {
      err.push_back("grid: expected HxW, got '" + *v + "'");
    }
  }
  num("items", c.items);
  num("resources", c.resources);
  num("capacity", c.capacity);
  num("nodes", c.nodes);
  if (auto v = take("tsp_relaxation")) {
    if (*v == "gg") c.tsp_relaxation = TspFormulation::GG;
    else if (*v == "mtz") c.tsp_relaxation = TspFormulation::MTZ;
    else err.push_back("tsp_relaxation: expected gg or mtz");
  }
  num("n_train", c.n_train);
  num("n_test", c.n_test);
  num("features", c.features);
  num("deg", c.deg);
  num("noise", c.noise);
  if (auto v = take("methods")) {
    std::istringstream ms(*v);
    std::string tok;
    while (std::getline(ms, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      if (auto m = parse_method(tok)) c.methods.push_back(*m);
      else err.push_back("methods: unknown method '" + tok + "'");
    }
  }
  num("lambda", c.lambda);
  num("samples", c.samples);
  num("sigma", c.sigma);
  flag("unscaled_jacobian", c.unscaled_jacobian);
  if (auto v = take("downstream")) {
    if (*v == "regret") c.downstream = losses::DownstreamKind::Regret;
    else if (*v == "hamming") c.downstream = losses::DownstreamKind::Hamming;
    else if (*v == "squared") c.downstream = losses::DownstreamKind::SquaredError;
    else err.push_back("downstream: expected regret, hamming or squared");
  }
  num("phi1", c.phi1);
  num("phi2", c.phi2);
  num("lr", c.learning_rate);
  num("momentum", c.momentum);
  num("batch", c.batch_size);
  num("epochs", c.epochs);
  num("knn_k", c.knn_k);
  num("repetitions", c.repetitions);
  num("seed", c.seed);
  num("workers", c.workers);
  flag("unambiguous", c.unambiguous);
  num("timing_epochs", c.timing_epochs);
  for (const auto& [k, v] : kv) err.push_back(k + ": unknown key");

  if (err.empty()) {
    auto more = check_config(c);
    err.insert(err.end(), more.begin(), more.end());
  }
  if (err.empty()) out.config = c;
  return out;
}

inline ValidationResult validate_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) return {std::nullopt, {"cannot read " + path}};
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------- execution

// The problem instance and data of one repetition.
struct RepetitionData {
  std::unique_ptr<Oracle> oracle;
  Matrix train_x, train_c, test_x, test_c;
};

inline std::uint64_t repetition_seed(std::uint64_t base, std::size_t r) {
  return derive_seed(base, {stream_tag::repetition, r});
}

inline RepetitionData make_repetition(const ExperimentConfig& c, std::uint64_t seed) {
  datagen::GenSpec g{c.n_train + c.n_test, c.features, c.deg, c.noise, seed};
  datagen::GeneratedData data;
  RepetitionData rep;
  switch (c.problem) {
    case Problem::ShortestPath: {
      const GridSpec grid{c.grid_height, c.grid_width};
      data = datagen::gen_shortest_path(g, grid);
      rep.oracle = std::make_unique<GridShortestPath>(grid);
      break;
    }
    case Problem::Knapsack: {
      data = datagen::gen_knapsack(g, c.items, c.resources);
      rep.oracle = std::make_unique<Knapsack>(
          KnapsackSpec{data.weights, Vec(c.resources, c.capacity)});
      break;
    }
    case Problem::Tsp:
      data = datagen::gen_tsp(g, c.nodes);
      rep.oracle = std::make_unique<Tsp>(TspSpec{c.nodes, c.tsp_relaxation});
      break;
  }
  auto split = [](const Matrix& m, std::size_t from, std::size_t count) {
    Matrix out(count, m.cols());
    std::copy(m.data().begin() + static_cast<std::ptrdiff_t>(from * m.cols()),
              m.data().begin() + static_cast<std::ptrdiff_t>((from + count) * m.cols()),
              out.data().begin());
    return out;
  };
  rep.train_x = split(data.features, 0, c.n_train);
  rep.train_c = split(data.costs, 0, c.n_train);
  rep.test_x = split(data.features, c.n_train, c.n_test);
  rep.test_c = split(data.costs, c.n_train, c.n_test);
  return rep;
}

inline TrainConfig train_config_for(const ExperimentConfig& c, const MethodSpec& m, std::uint64_t seed) {
  TrainConfig t;
  t.method = m.train;
  t.epochs = c.epochs;
  t.batch_size = c.batch_size;
  t.learning_rate = c.learning_rate;
  t.momentum = c.momentum;
  t.lambda = c.lambda;
  t.perturbation = {c.samples, c.sigma, c.unscaled_jacobian};
  t.downstream = c.downstream;
  t.regularization = {m.l1 ? c.phi1 : 0.0, m.l2 ? c.phi2 : 0.0};
  t.seed = derive_seed(seed, {stream_tag::train_data});
  return t;
}

struct ResultRow {
  std::string config_id;
  std::string problem;
  std::string method;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::size_t n_train = 0, n_test = 0, features = 0;
  int deg = 0;
  double noise = 0.0;
  EvaluationReport report;
  double train_seconds_per_epoch = 0.0;
  double total_seconds = 0.0;
  std::string error;  // non-empty when the repetition failed for this method
};

// Fixed, versioned column set. Timing columns are last.
inline std::string csv_header() {
  return "schema,config_id,problem,method,rep,seed,n_train,n_test,features,deg,noise,"
         "normalized_regret,normalized_unambiguous_regret,unambiguous_fallbacks,mse,"
         "solution_accuracy,status,train_seconds_per_epoch,total_seconds";
}

inline constexpr std::size_t kTimingColumns = 2;

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_row(const ResultRow& r) {
  std::ostringstream os;
  os << kResultsSchemaVersion << ',' << r.config_id << ',' << r.problem << ',' << r.method << ','
     << r.rep << ',' << r.seed << ',' << r.n_train << ',' << r.n_test << ',' << r.features << ','
     << r.deg << ',' << fmt(r.noise) << ',';
  if (r.error.empty()) {
    os << fmt(r.report.normalized_regret) << ','
       << (r.report.normalized_unambiguous_regret ? fmt(*r.report.normalized_unambiguous_regret) : "")
       << ',' << r.report.unambiguous_fallbacks << ',' << fmt(r.report.mse) << ','
       << (r.report.solution_accuracy ? fmt(*r.report.solution_accuracy) : "") << ",ok,";
  } else {
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    os << ",,,,,error: " << msg << ',';
  }
  os << fmt(r.train_seconds_per_epoch) << ',' << fmt(r.total_seconds);
  return os.str();
}

struct RunOptions {
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;  // results.csv and run_info.txt
};

struct RunResult {
  std::vector<ResultRow> rows;
  bool ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.error.empty(); });
  }
};

inline constexpr const char* kBaselineNote =
    "two-stage baselines: 2s-lr (least squares), 2s-knn (k-nearest neighbours); "
    "no AutoML baseline";

// Trains and evaluates one method on prepared datasets.
inline ResultRow run_method(const ExperimentConfig& c, const MethodSpec& m, const Oracle& oracle,
                            const DecisionDataset& train_ds, const DecisionDataset& test_ds,
                            WorkerPool& eval_pool, std::size_t workers, std::uint64_t seed) {
  ResultRow row;
  row.method = m.name;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  switch (m.kind) {
    case MethodSpec::Kind::LeastSquares: {
      const auto model = fit_least_squares(train_ds.features, train_ds.costs);
      row.train_seconds_per_epoch = elapsed();
      row.report = evaluate(model, eval_pool, test_ds, c.unambiguous);
      break;
    }
    case MethodSpec::Kind::Knn: {
      const KnnPredictor model(train_ds.features, train_ds.costs, c.knn_k);
      row.train_seconds_per_epoch = elapsed();
      row.report = evaluate(model, eval_pool, test_ds, c.unambiguous);
      break;
    }
    case MethodSpec::Kind::Trained: {
      std::unique_ptr<Oracle> train_oracle = oracle.clone();
      if (m.relaxed) train_oracle = std::make_unique<RelaxedOracle>(std::move(train_oracle));
      WorkerPool train_pool(*train_oracle, workers);
      const auto init = LinearPredictor::init(train_ds.cost_dim(), train_ds.feature_dim(),
                                              derive_seed(seed, {stream_tag::model_init}));
      const auto result = train(init, train_ds, train_config_for(c, m, seed), train_pool);
      double total = 0.0;
      for (const auto& e : result.trace) total += e.seconds;
      row.train_seconds_per_epoch = total / static_cast<double>(result.trace.size());
      row.report = evaluate(result.model, eval_pool, test_ds, c.unambiguous);
      break;
    }
  }
  row.total_seconds = elapsed();
  return row;
}

// Runs every repetition and method. Rows are returned in (rep, method) order
// and, when out_dir is set, written to results.csv.
inline RunResult run(ExperimentConfig c, const RunOptions& opt = {}) {
  if (opt.workers) c.workers = *opt.workers;
  if (opt.seed) c.seed = *opt.seed;
  if (auto errs = check_config(c); !errs.empty()) throw Error(ErrorKind::InvalidArgument, errs.front());
  const std::string config_id = c.fingerprint();

  RunResult result;
  for (std::size_t r = 0; r < c.repetitions; ++r) {
    const std::uint64_t seed = repetition_seed(c.seed, r);
    auto fill = [&](ResultRow& row) {
      row.config_id = config_id;
      row.problem = to_string(c.problem);
      row.rep = r;
      row.seed = seed;
      row.n_train = c.n_train;
      row.n_test = c.n_test;
      row.features = c.features;
      row.deg = c.deg;
      row.noise = c.noise;
    };
    try {
      RepetitionData data = make_repetition(c, seed);
      WorkerPool eval_pool(*data.oracle, c.workers);
      const auto train_ds = build_dataset(eval_pool, data.train_x, data.train_c, seed);
      const auto test_ds = build_dataset(eval_pool, data.test_x, data.test_c, seed);
      for (const auto& m : c.methods) {
        ResultRow row;
        try {
          row = run_method(c, m, *data.oracle, train_ds, test_ds, eval_pool, c.workers, seed);
        } catch (const Error& e) {
          row.method = m.name;
          row.error = e.what();
        }
        fill(row);
        result.rows.push_back(std::move(row));
      }
    } catch (const Error& e) {
      for (const auto& m : c.methods) {
        ResultRow row;
        row.method = m.name;
        row.error = e.what();
        fill(row);
        result.rows.push_back(std::move(row));
      }
    }
  }

  if (opt.out_dir) {
    std::filesystem::create_directories(*opt.out_dir);
    std::ofstream csv(*opt.out_dir / "results.csv", std::ios::trunc);
    if (!csv) throw Error(ErrorKind::Io, "cannot write results.csv");
    csv << csv_header() << '\n';
    for (const auto& row : result.rows) csv << csv_row(row) << '\n';
    std::ofstream info(*opt.out_dir / "run_info.txt", std::ios::trunc);
    info << "# " << kBaselineNote << "\nconfig_id = " << config_id << "\nworkers = " << c.workers
         << '\n' << c.canonical();
  }
  return result;
}

struct TimingRow {
  std::string method;
  std::size_t workers = 1;
  std::size_t epochs = 0;
  double mean_epoch_seconds = 0.0;
  double sd_epoch_seconds = 0.0;
};

// Per-epoch training time of each trained method for worker counts {1,2,4,8},
// on the first repetition's data.
inline std::vector<TimingRow> timing_report(ExperimentConfig c,
                                            std::vector<std::size_t> worker_counts = {1, 2, 4, 8}) {
  if (auto errs = check_config(c); !errs.empty()) throw Error(ErrorKind::InvalidArgument, errs.front());
  const std::uint64_t seed = repetition_seed(c.seed, 0);
  RepetitionData data = make_repetition(c, seed);
  const auto train_ds = build_dataset(*data.oracle, data.train_x, data.train_c, c.workers, seed);
  std::vector<TimingRow> rows;
  for (const auto& m : c.methods) {
    if (m.kind != MethodSpec::Kind::Trained) continue;
    for (std::size_t w : worker_counts) {
      std::unique_ptr<Oracle> o = data.oracle->clone();
      if (m.relaxed) o = std::make_unique<RelaxedOracle>(std::move(o));
      WorkerPool pool(*o, w);
      auto tc = train_config_for(c, m, seed);
      tc.epochs = c.timing_epochs;
      const auto init = LinearPredictor::init(train_ds.cost_dim(), train_ds.feature_dim(), seed);
      const auto res = train(init, train_ds, tc, pool);
      TimingRow row{m.name, w, res.trace.size()};
      for (const auto& e : res.trace) row.mean_epoch_seconds += e.seconds;
      row.mean_epoch_seconds /= static_cast<double>(res.trace.size());
      for (const auto& e : res.trace)
        row.sd_epoch_seconds += (e.seconds - row.mean_epoch_seconds) * (e.seconds - row.mean_epoch_seconds);
      row.sd_epoch_seconds = res.trace.size() > 1
                                 ? std::sqrt(row.sd_epoch_seconds / static_cast<double>(res.trace.size() - 1))
                                 : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::string timing_csv(const std::vector<TimingRow>& rows) {
  std::ostringstream os;
  os << "method,workers,epochs,mean_epoch_seconds,sd_epoch_seconds\n";
  for (const auto& r : rows)
    os << r.method << ',' << r.workers << ',' << r.epochs << ',' << fmt(r.mean_epoch_seconds) << ','
       << fmt(r.sd_epoch_seconds) << '\n';
  return os.str();
}

}  // namespace dfl::harness
