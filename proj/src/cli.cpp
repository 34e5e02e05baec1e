// Copyright 2026 The softlabel authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "softlabel/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "softlabel/bounds.hpp"
#include "softlabel/dynamics.hpp"
#include "softlabel/errors.hpp"
#include "softlabel/ermsim.hpp"
#include "softlabel/indicators.hpp"
#include "softlabel/io.hpp"
#include "softlabel/noise.hpp"
#include "softlabel/pll.hpp"
#include "softlabel/teacher.hpp"

namespace softlabel::cli {

namespace {

using nlohmann::json;

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  f << text;
}

void save_run_config(const std::string& path, const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--save-config") {
      ++i;  // drop flag and its value
      continue;
    }
    kept.push_back(args[i]);
  }
  write_text(path, json{{"argv", kept}}.dump(2) + "\n");
}

struct CommonOpts {
  uint64_t seed = 0;
  int threads = 1;
  std::string save_config;
  std::string log_level = "info";
};

void add_common(CLI::App* cmd, CommonOpts& common) {
  cmd->add_option("--seed", common.seed, "Root seed; all randomness flows from it");
  cmd->add_option("--threads", common.threads, "Worker cap (results are thread-count invariant)")
      ->check(CLI::Range(1, 256));
  cmd->add_option("--save-config", common.save_config,
                  "Write the resolved run configuration (replayable via `repro`)");
  cmd->add_option("--log-level", common.log_level, "debug|info|warn|error");
}

// --- analyze ----------------------------------------------------------------

struct AnalyzeOpts {
  std::string in;
  std::string format = "auto";
  int k = 1;
  std::string semantics = "topk";
  bool candidates = false;
  bool normalize = false;
  std::string out_path;
  std::string output_format = "json";
};

int run_analyze(const AnalyzeOpts& opt, std::ostream& out, std::ostream& err) {
  SoftDataset ds;
  if (opt.candidates) {
    const auto cand = pll::load_candidates(opt.in);
    ds = pll::candidates_to_dataset(cand.examples, cand.c);
  } else {
    const FileFormat fmt = opt.format == "auto"
                               ? format_from_path(opt.in)
                               : (opt.format == "csv" ? FileFormat::Csv : FileFormat::Jsonl);
    ds = load_dataset(opt.in, fmt, opt.normalize);
  }
  const auto sem = opt.candidates ? indicators::Semantics::Support
                                  : indicators::semantics_from_string(opt.semantics);
  const auto rep = indicators::analyze(ds, opt.k, sem);
  for (int label : rep.excluded_labels)
    err << "warning: label " << label
        << " never observed as non-truth; excluded from the gamma max\n";
  const std::string text = opt.output_format == "csv" ? rep.to_csv() : rep.to_json() + "\n";
  if (opt.out_path.empty())
    out << text;
  else
    write_text(opt.out_path, text);
  return 0;
}

// --- bound ------------------------------------------------------------------

struct BoundOpts {
  bounds::BoundParams params;
  std::string variant = "derivation";
  long n = 0;
};

int run_bound(const BoundOpts& opt, std::ostream& out, std::ostream& err) {
  json j{{"delta", opt.params.delta_u},
         {"gamma", opt.params.gamma_a},
         {"eps", opt.params.eps},
         {"conf", opt.params.conf},
         {"dh", opt.params.d_h},
         {"labels", opt.params.labels},
         {"theta", bounds::theta(opt.params.delta_u, opt.params.gamma_a)}};
  std::optional<bounds::SampleComplexity> sc;
  try {
    sc = bounds::sample_complexity(opt.params);
  } catch (const ParameterError& e) {
    if (opt.n <= 0) throw;  // n0 was the whole point of the query
    err << "warning: " << e.what() << "\n";
  }
  if (sc) {
    j["n0"] = sc->n0;
    j["effective_n0"] = sc->effective_n0;
    j["rate"] = sc->rate;
    j["vacuous"] = false;
  } else {
    j["n0"] = nullptr;
    j["effective_n0"] = nullptr;
    j["vacuous"] = true;
  }
  if (opt.n > 0) {
    const auto v = bounds::variant_from_string(opt.variant);
    const auto b = bounds::failure_prob_bound(opt.n, opt.params, v);
    j["n"] = opt.n;
    j["bound_variant"] = opt.variant;
    j["log_bound"] = b.log_bound;
    j["bound_vacuous"] = b.vacuous;
  }
  out << j.dump(2) << "\n";
  return 0;
}

// --- noise ------------------------------------------------------------------

struct NoiseOpts {
  std::string kind = "gaussian";
  double scale = 1.0;
  int classes = 10;
  int k = 1;
  std::string method = "mc";
  long samples = 1000000;
};

int run_noise(const NoiseOpts& opt, const CommonOpts& common, std::ostream& out) {
  noise::NoiseModel model{noise::NoiseModel::kind_from_string(opt.kind), opt.scale};
  const auto method =
      opt.method == "quad" ? noise::DeltaMethod::Quadrature : noise::DeltaMethod::MonteCarlo;
  const auto est = noise::delta_additive_noise(model, opt.classes, opt.k, method, opt.samples,
                                               SplitRng(common.seed, 0), common.threads);
  json j{{"kind", opt.kind},
         {"scale", opt.scale},
         {"classes", opt.classes},
         {"k", opt.k},
         {"method", opt.method},
         {"delta", est.delta},
         {"gamma", est.gamma},
         {"stderr", est.std_error},
         {"converged", est.converged}};
  if (method == noise::DeltaMethod::MonteCarlo) j["samples"] = est.samples;
  if (est.degenerate_k) j["note"] = "k = c: the top set always contains the truth";
  if (opt.k <= opt.classes - 1)
    j["paper_literal"] = noise::delta_paper_literal(model, opt.classes, opt.k);
  out << j.dump(2) << "\n";
  return est.converged ? 0 : 2;
}

// --- pll --------------------------------------------------------------------

struct PllOpts {
  double eta = 0.0;
  double mu = 0.0;
  int classes = 10;
  long n = 0;
  std::string out_path;
};

int run_pll_generate(const PllOpts& opt, const CommonOpts& common) {
  if (opt.out_path.empty()) throw ParameterError("pll: generate mode requires --out");
  pll::PLLSpec spec{opt.eta, opt.mu, opt.classes};
  SplitRng root(common.seed, 0);
  SplitRng label_rng = root.substream(0);
  std::vector<int> labels(static_cast<size_t>(opt.n));
  for (auto& y : labels)
    y = static_cast<int>(label_rng.uniform_below(static_cast<uint64_t>(opt.classes)));
  pll::CandidateDataset ds;
  ds.c = opt.classes;
  ds.examples = pll::generate_candidates(labels, spec, root.substream(1));
  pll::save_candidates(ds, opt.out_path);
  return 0;
}

int run_pll_verify(const PllOpts& opt, const CommonOpts& common, std::ostream& out,
                   std::ostream& err) {
  const auto rep =
      pll::verify_corollary1({opt.eta, opt.mu, opt.classes}, opt.n, {common.seed, 0});
  if (rep.degenerate_redraw_regime)
    err << "warning: degenerate redraw regime; gamma_hat = eta is not expected to hold\n";
  out << rep.to_json() << "\n";
  return 0;
}

// --- dynamics ---------------------------------------------------------------

struct DynamicsOpts {
  std::string family = "linear";
  std::string params;
  std::string table_path;
  dynamics::DynamicsConfig cfg;
  std::string traj_out;
};

dynamics::AccuracyFunction load_accuracy(const DynamicsOpts& opt) {
  if (opt.family == "table") {
    if (opt.table_path.empty()) throw ParameterError("dynamics: table family needs --table");
    std::ifstream f(opt.table_path);
    if (!f) throw ParseError("cannot open '" + opt.table_path + "'");
    std::vector<std::vector<double>> grid;
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      grid.push_back(parse_number_list(line));
    }
    return dynamics::AccuracyFunction::table(std::move(grid));
  }
  return dynamics::AccuracyFunction::from_params(opt.family, parse_number_list(opt.params));
}

int run_dynamics(const DynamicsOpts& opt, std::ostream& out) {
  const auto rho = load_accuracy(opt);
  const auto traj = dynamics::iterate(rho, opt.cfg);
  const auto lip = dynamics::lipschitz_estimate(rho, 101, opt.cfg.c);
  if (!opt.traj_out.empty()) write_text(opt.traj_out, traj.to_csv());
  json j{{"rho_final", traj.rho.back()},
         {"iterations", traj.rho.size() - 1},
         {"converged", traj.converged},
         {"damped", traj.damped},
         {"k_l", lip.k_l},
         {"composite_factor", lip.composite},
         {"certified", lip.certified}};
  out << j.dump(2) << "\n";
  return traj.converged ? 0 : 2;
}

// --- teacher ----------------------------------------------------------------

struct TeacherOpts {
  std::string alphas = "0,0,0";
  int k = 4;
  int r = 3;
  int classes = 10;
  int features = 10;
  int n_per_class = 100;
  double blob_sep = 3.0;
  double sigma = 1.0;
  int epochs = 100;
  double lr = 0.5;
  std::string out_path;
};

int run_teacher_train(const TeacherOpts& opt, const CommonOpts& common, std::ostream& out) {
  const auto a = parse_number_list(opt.alphas);
  if (a.size() != 3) throw ParameterError("teacher: --alphas expects a1,a2,a3");
  teacher::TeacherLossConfig cfg{a[0], a[1], a[2], opt.k, opt.r};
  teacher::BlobSpec blobs{opt.classes, opt.features, opt.n_per_class, opt.blob_sep, opt.sigma};
  SplitRng root(common.seed, 0);
  const auto data = teacher::make_blobs(blobs, root.substream(0));
  const auto run = teacher::train_tiny_teacher(data, cfg, opt.epochs, opt.lr, root.substream(1));
  if (!opt.out_path.empty()) save_dataset(run.outputs, opt.out_path, FileFormat::Jsonl);
  json j = json::parse(run.report.to_json());
  j["final_loss"] = run.final_loss;
  out << j.dump(2) << "\n";
  return 0;
}

struct CorruptOpts {
  double target_delta = 0.0;
  double target_gamma = -1.0;  // < 0 means symmetric construction
  int classes = 10;
  int k = 4;
  long n = 0;
  std::string out_path;
};

int run_teacher_corrupt(const CorruptOpts& opt, const CommonOpts& common, std::ostream& out) {
  std::vector<int> labels(static_cast<size_t>(opt.n));
  for (long i = 0; i < opt.n; ++i) labels[static_cast<size_t>(i)] = static_cast<int>(i % opt.classes);
  std::optional<double> gamma;
  if (opt.target_gamma >= 0.0) gamma = opt.target_gamma;
  const auto ds = teacher::make_biased_soft_labels(labels, opt.classes, opt.k, opt.target_delta,
                                                   gamma, SplitRng(common.seed, 0));
  if (!opt.out_path.empty()) save_dataset(ds, opt.out_path, FileFormat::Jsonl);
  const auto rep = indicators::analyze(ds, opt.k, indicators::Semantics::TopK);
  out << rep.to_json() << "\n";
  return 0;
}

// --- simulate ---------------------------------------------------------------

struct SimulateOpts {
  std::string cls = "intervals";
  int pool_size = 20;
  int classes = 10;
  int thresholds = 2;
  long target = 0;
  std::string label_mech = "pll";
  std::string mech_params;
  std::string noise_kind = "gaussian";
  int k = 4;
  std::string n_list = "100";
  double eps = 0.5;
  double conf = 0.05;
  int trials = 200;
  int d_h = 0;
};

int run_simulate(const SimulateOpts& opt, const CommonOpts& common, std::ostream& out) {
  std::vector<double> pool(static_cast<size_t>(opt.pool_size));
  for (int i = 0; i < opt.pool_size; ++i) pool[static_cast<size_t>(i)] = i;
  ermsim::HypothesisClass cls;
  if (opt.cls == "intervals")
    cls = ermsim::HypothesisClass::intervals(pool, opt.thresholds, opt.classes);
  else if (opt.cls == "table")
    cls = ermsim::HypothesisClass::all_functions(pool, opt.classes);
  else if (opt.cls == "constants")
    cls = ermsim::HypothesisClass::constants(pool, opt.classes);
  else
    throw ParameterError("simulate: unknown class '" + opt.cls + "'");

  const auto mp = parse_number_list(opt.mech_params);
  auto need = [&](size_t n) {
    if (mp.size() < n)
      throw ParameterError("simulate: --mech-params needs " + std::to_string(n) + " values");
  };
  ermsim::LabelMech mech;
  if (opt.label_mech == "corruptor") {
    need(1);
    ermsim::CorruptorMech m{mp[0], std::nullopt, opt.k};
    if (mp.size() > 1) m.gamma = mp[1];
    mech = m;
  } else if (opt.label_mech == "pll") {
    need(2);
    mech = ermsim::PllMech{mp[0], mp[1]};
  } else if (opt.label_mech == "noise") {
    need(1);
    mech = ermsim::NoiseMech{{noise::NoiseModel::kind_from_string(opt.noise_kind), mp[0]}, opt.k};
  } else if (opt.label_mech == "adversarial") {
    need(2);
    ermsim::AdversarialMech m{mp[0], mp[1], 0};
    if (mp.size() > 2) m.decoy = static_cast<int>(mp[2]);
    mech = m;
  } else {
    throw ParameterError("simulate: unknown label mechanism '" + opt.label_mech + "'");
  }

  ermsim::ExperimentSpec spec;
  spec.target = opt.target;
  spec.mech = mech;
  for (double n : parse_number_list(opt.n_list)) spec.n_list.push_back(static_cast<long>(n));
  spec.eps = opt.eps;
  spec.conf = opt.conf;
  spec.trials = opt.trials;
  spec.seed = {common.seed, 0};
  spec.d_h = opt.d_h;
  const auto rep = ermsim::learnability_experiment(cls, spec);
  out << rep.to_csv();
  return 0;
}

// --- repro ------------------------------------------------------------------

int run_repro(const std::string& config_path, std::ostream& out, std::ostream& err) {
  std::ifstream f(config_path);
  if (!f) throw ParseError("cannot open '" + config_path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("bad run config: ") + e.what());
  }
  const auto argv = j.at("argv").get<std::vector<std::string>>();
  return dispatch(argv, out, err);
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"softlabel: indicators, bounds and simulations for biased soft labels"};
  app.require_subcommand(1);
  CommonOpts common;
  if (const char* env = std::getenv("SOFTLABEL_LOG")) common.log_level = env;

  auto* analyze = app.add_subcommand("analyze", "Indicator report for a dataset");
  AnalyzeOpts an;
  analyze->add_option("--in", an.in, "Input dataset")->required();
  analyze->add_option("--format", an.format, "auto|jsonl|csv");
  analyze->add_option("--k", an.k, "Top-k cardinality");
  analyze->add_option("--semantics", an.semantics, "topk|support");
  analyze->add_flag("--candidates", an.candidates, "Input is candidate-set JSONL");
  analyze->add_flag("--normalize", an.normalize, "Rescale rows by their sum at load");
  analyze->add_option("--out", an.out_path, "Write the report here instead of stdout");
  analyze->add_option("--output-format", an.output_format, "json|csv");
  add_common(analyze, common);

  auto* bound = app.add_subcommand("bound", "theta, failure bound and sample complexity");
  BoundOpts bo;
  bound->add_option("--delta", bo.params.delta_u, "Unreliability degree")->required();
  bound->add_option("--gamma", bo.params.gamma_a, "Ambiguity degree")->required();
  bound->add_option("--eps", bo.params.eps, "Target error")->required();
  bound->add_option("--conf", bo.params.conf, "Failure probability budget")->required();
  bound->add_option("--dh", bo.params.d_h, "Natarajan dimension")->required();
  bound->add_option("--labels", bo.params.labels, "Label cardinality constant L");
  bound->add_option("--variant", bo.variant, "statement|derivation");
  bound->add_option("--n", bo.n, "Also evaluate the log bound at this n");
  add_common(bound, common);

  auto* noise_cmd = app.add_subcommand("noise", "Additive-noise Delta/gamma");
  NoiseOpts no;
  noise_cmd->add_option("--kind", no.kind, "gaussian|laplace");
  noise_cmd->add_option("--scale", no.scale, "Noise scale")->required();
  noise_cmd->add_option("--classes", no.classes, "Class count")->required();
  noise_cmd->add_option("--k", no.k, "Top-k cardinality")->required();
  noise_cmd->add_option("--method", no.method, "mc|quad");
  noise_cmd->add_option("--samples", no.samples, "Monte Carlo budget");
  add_common(noise_cmd, common);

  auto* pll_cmd = app.add_subcommand("pll", "Candidate-set generation and verification");
  PllOpts po;
  pll_cmd->add_option("--eta", po.eta, "Partial rate")->required();
  pll_cmd->add_option("--mu", po.mu, "Unreliable rate")->required();
  pll_cmd->add_option("--classes", po.classes, "Class count")->required();
  pll_cmd->add_option("--n", po.n, "Example count")->required();
  pll_cmd->add_option("--out", po.out_path, "Output candidate JSONL (generate mode)");
  auto* pll_verify = pll_cmd->add_subcommand("verify", "Compare measured rates to (mu, eta)");
  pll_cmd->fallthrough();
  add_common(pll_cmd, common);

  auto* dyn = app.add_subcommand("dynamics", "Accuracy recurrence and fixed point");
  DynamicsOpts dy;
  dyn->add_option("--family", dy.family, "constant|linear|logistic|table");
  dyn->add_option("--params", dy.params, "Comma-separated family parameters");
  dyn->add_option("--table", dy.table_path, "CSV grid for the table family");
  dyn->add_option("--classes", dy.cfg.c, "Class count")->required();
  dyn->add_option("--k", dy.cfg.k, "Top-k cardinality")->required();
  dyn->add_option("--rho0", dy.cfg.rho0, "Initial accuracy");
  dyn->add_option("--tol", dy.cfg.tol, "Convergence tolerance");
  dyn->add_option("--max-iter", dy.cfg.max_iter, "Iteration cap");
  dyn->add_option("--traj-out", dy.traj_out, "Write the trajectory CSV here");
  add_common(dyn, common);

  auto* teach = app.add_subcommand("teacher", "Customized-loss teacher on synthetic blobs");
  TeacherOpts to;
  teach->add_option("--alphas", to.alphas, "a1,a2,a3 tradeoff weights");
  teach->add_option("--k", to.k, "Top-k cardinality");
  teach->add_option("--r", to.r, "Random target labels per example");
  teach->add_option("--classes", to.classes, "Class count");
  teach->add_option("--features", to.features, "Feature dimension");
  teach->add_option("--n-per-class", to.n_per_class, "Examples per class");
  teach->add_option("--blob-sep", to.blob_sep, "Blob mean separation");
  teach->add_option("--sigma", to.sigma, "Blob standard deviation");
  teach->add_option("--epochs", to.epochs, "Training epochs");
  teach->add_option("--lr", to.lr, "Learning rate");
  teach->add_option("--out", to.out_path, "Write teacher soft labels here (JSONL)");
  auto* corrupt = teach->add_subcommand("corrupt", "Constructive corruptor with target (Delta, gamma)");
  CorruptOpts co;
  corrupt->add_option("--target-delta", co.target_delta, "Target Delta")->required();
  corrupt->add_option("--target-gamma", co.target_gamma,
                      "Target gamma (omit for the symmetric construction)");
  corrupt->add_option("--classes", co.classes, "Class count");
  corrupt->add_option("--k", co.k, "Top-k cardinality");
  corrupt->add_option("--n", co.n, "Example count")->required();
  corrupt->add_option("--out", co.out_path, "Write the dataset here (JSONL)");
  teach->fallthrough();
  add_common(teach, common);

  auto* sim = app.add_subcommand("simulate", "ERM learnability experiment");
  SimulateOpts so;
  sim->add_option("--class", so.cls, "table|intervals|constants");
  sim->add_option("--pool-size", so.pool_size, "Instance pool size");
  sim->add_option("--classes", so.classes, "Class count");
  sim->add_option("--thresholds", so.thresholds, "Interval cut points");
  sim->add_option("--target", so.target, "Index of the ground-truth hypothesis");
  sim->add_option("--label-mech", so.label_mech, "corruptor|pll|noise|adversarial");
  sim->add_option("--mech-params", so.mech_params, "Mechanism parameters (comma list)");
  sim->add_option("--noise-kind", so.noise_kind, "gaussian|laplace (noise mechanism)");
  sim->add_option("--k", so.k, "Top-k cardinality (corruptor/noise)");
  sim->add_option("--n-list", so.n_list, "Training sizes to sweep");
  sim->add_option("--eps", so.eps, "Error threshold");
  sim->add_option("--conf", so.conf, "Failure budget for n0");
  sim->add_option("--trials", so.trials, "Trials per n");
  sim->add_option("--dh", so.d_h, "Natarajan dimension override (0 = brute force)");
  add_common(sim, common);

  auto* repro = app.add_subcommand("repro", "Replay a saved run configuration");
  std::string repro_config;
  repro->add_option("--config", repro_config, "Run configuration JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    err << app.help();
    return 1;
  }

  try {
    if (!common.save_config.empty()) save_run_config(common.save_config, args);
    if (app.got_subcommand(analyze)) return run_analyze(an, out, err);
    if (app.got_subcommand(bound)) return run_bound(bo, out, err);
    if (app.got_subcommand(noise_cmd)) return run_noise(no, common, out);
    if (app.got_subcommand(pll_cmd))
      return pll_cmd->got_subcommand(pll_verify) ? run_pll_verify(po, common, out, err)
                                                 : run_pll_generate(po, common);
    if (app.got_subcommand(dyn)) return run_dynamics(dy, out);
    if (app.got_subcommand(teach))
      return teach->got_subcommand(corrupt) ? run_teacher_corrupt(co, common, out)
                                            : run_teacher_train(to, common, out);
    if (app.got_subcommand(sim)) return run_simulate(so, common, out);
    if (app.got_subcommand(repro)) return run_repro(repro_config, out, err);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace softlabel::cli
