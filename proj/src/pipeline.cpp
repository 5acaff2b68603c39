#include "star_swipt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <omp.h>

#include "CLI11.hpp"

namespace star_swipt {

void PipelineConfig::validate() const {
  scenario.validate();
  if (n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
  if (max_outer < 1) throw ConfigError("max_outer must be >= 1");
  if (!(delta_outer > 0.0)) throw ConfigError("delta_outer must be > 0");
  if (!(precoder.delta_i > 0.0)) throw ConfigError("delta_i must be > 0");
  if (!(precoder.delta_e > 0.0)) throw ConfigError("delta_e must be > 0");
  if (precoder.n_max < 1) throw ConfigError("n_max must be >= 1");
  if (precoder.m_max < 1) throw ConfigError("m_max must be >= 1");
  if (!(ris.delta_p > 0.0 && ris.delta_p < 1.0)) throw ConfigError("delta_p must lie in (0, 1)");
  if (!(ris.step0 > 0.0 && ris.step0 <= 1.0)) throw ConfigError("delta0 must lie in (0, 1]");
}

bool apply_pipeline_key(PipelineConfig& cfg, const KeyValue& kv) {
  using Setter = std::function<void(PipelineConfig&, const KeyValue&)>;
  static const std::map<std::string, Setter> setters = {
      {"n_realizations", [](auto& c, auto& v) { c.n_realizations = parse_int(v); }},
      {"max_outer", [](auto& c, auto& v) { c.max_outer = parse_int(v); }},
      {"delta_outer", [](auto& c, auto& v) { c.delta_outer = parse_double(v); }},
      {"delta_i", [](auto& c, auto& v) { c.precoder.delta_i = parse_double(v); }},
      {"delta_e", [](auto& c, auto& v) { c.precoder.delta_e = parse_double(v); }},
      {"delta_p", [](auto& c, auto& v) { c.ris.delta_p = parse_double(v); }},
      {"n_max", [](auto& c, auto& v) { c.precoder.n_max = parse_int(v); }},
      {"m_max", [](auto& c, auto& v) { c.precoder.m_max = parse_int(v); }},
      {"delta0", [](auto& c, auto& v) { c.ris.step0 = parse_double(v); }},
  };
  const auto it = setters.find(kv.key);
  if (it != setters.end()) {
    it->second(cfg, kv);
    return true;
  }
  return apply_scenario_key(cfg.scenario, kv);
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  PipelineConfig cfg;
  for (const auto& kv : read_key_values(path)) {
    try {
      if (!apply_pipeline_key(cfg, kv)) {
        throw ConfigError("unknown key '" + kv.key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(kv.line) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig with_value(const PipelineConfig& cfg, const std::string& key, double value) {
  PipelineConfig out = cfg;
  std::ostringstream os;
  os.precision(17);
  os << value;
  if (!apply_pipeline_key(out, KeyValue{key, os.str(), 0})) throw ConfigError("unknown key '" + key + "'");
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Design {
  PrecoderSet pre;
  RISProfile ris;
  RateReport report;
};

// Exact evaluation with the closed-form worst case; no sampling.
RateReport evaluate(const PrecoderSet& pre, const RISProfile& ris, const ChannelSet& ch) {
  return worst_case_secrecy(pre, ris, ch, 0, 0);
}

bool certified(const PrecoderSet& pre, const RISProfile& ris, const ChannelSet& ch, const ScenarioConfig& sc,
               std::uint64_t seed) {
  return oracle::certify_design(pre, ris, ch, sc, oracle::kCertifySamples, seed).pass();
}

double wrap_phase(double phase) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double w = std::fmod(std::fmod(phase, two_pi) + two_pi, two_pi);
  return w >= two_pi ? 0.0 : w;
}

// Start profile for draws where the uniform one admits no feasible precoder.
// Transmission phases steer a shared beam onto its weakest IR and reflection
// phases steer the strongest worst-case energy beam onto one UER, each by
// alternating between beam and phases. Amplitudes stay at one half.
RISProfile aligned_profile(const ChannelSet& ch) {
  const int N = ch.n_tx(), M = ch.n_ris();
  RISProfile ris = RISProfile::uniform(M);
  auto top = [N](const CMat& Q) {
    const Eigen::SelfAdjointEigenSolver<CMat> es(Q);
    return std::pair<double, CVec>{es.eigenvalues()[N - 1], es.eigenvectors().col(N - 1)};
  };

  double best_min = -1.0;
  RISProfile cur = ris;
  for (int it = 0; it < 20; ++it) {
    const CMat T = cur.u_t().asDiagonal() * ch.H;
    std::vector<CRow> h;
    CMat Q = CMat::Zero(N, N);
    for (int k = 0; k < ch.n_ir(); ++k) {
      h.push_back(ch.g_t[k].adjoint() * T);
      Q += h.back().adjoint() * h.back() / std::max(h.back().squaredNorm(), 1e-300);
    }
    const CVec w = top(Q).second;
    int weak = 0;
    double weak_gain = std::numeric_limits<double>::infinity();
    for (int k = 0; k < ch.n_ir(); ++k) {
      const double g = std::norm((h[k] * w)(0));
      if (g < weak_gain) {
        weak_gain = g;
        weak = k;
      }
    }
    if (weak_gain > best_min) {
      best_min = weak_gain;
      ris.theta_t = cur.theta_t;
    }
    const CVec hw = ch.H * w;
    for (int m = 0; m < M; ++m) cur.theta_t[m] = wrap_phase(std::arg(ch.g_t[weak][m]) - std::arg(hw[m]));
  }

  double best_energy = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < ch.n_uer(); ++j) {
    cur = RISProfile::uniform(M);
    for (int it = 0; it < 20; ++it) {
      const CMat B = cur.u_r().asDiagonal() * ch.H;
      CMat Q = CMat::Zero(N, N);
      for (int jj = 0; jj < ch.n_uer(); ++jj) {
        const CRow c = ch.g_r_hat[jj].adjoint() * B;
        Q += c.adjoint() * c - robust_mu(ch.g_r_hat[jj], ch.nu) * B.adjoint() * B;
      }
      const auto [value, w] = top(Q);
      if (value > best_energy) {
        best_energy = value;
        ris.theta_r = cur.theta_r;
      }
      const CVec hw = ch.H * w;
      for (int m = 0; m < M; ++m) cur.theta_r[m] = wrap_phase(std::arg(ch.g_r_hat[j][m]) - std::arg(hw[m]));
    }
  }
  return ris;
}

bool nondecreasing(const std::vector<double>& h, double tol) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i] < h[i - 1] - tol) return false;
  }
  return true;
}

}  // namespace

AlternateResult alternate(const ChannelSet& ch, const PipelineConfig& cfg, int realization, double sweep_value) {
  const ScenarioConfig& sc = cfg.scenario;
  AlternateResult res;
  const std::uint64_t cert_seed = derive_seed(sc.seed, 2);
  const RISProfile uniform = RISProfile::uniform(ch.n_ris());

  Design kept;
  bool have = false;
  double prev = 0.0;
  OuterRecord last;

  for (int t = 1; t <= cfg.max_outer; ++t) {
    const auto t0 = Clock::now();
    OuterRecord rec;
    rec.sweep_value = sweep_value;
    rec.realization = realization;
    rec.outer_iter = t;
    try {
      // Without a kept design, restoration starts at the uniform profile and
      // falls back to the aligned one.
      std::vector<RISProfile> starts;
      if (have) {
        starts.push_back(kept.ris);
      } else {
        starts.push_back(uniform);
        starts.push_back(aligned_profile(ch));
      }
      RISProfile ris;
      RestorationResult fr;
      for (const RISProfile& s : starts) {
        ris = s;
        const PrecoderSubproblemState start =
            have ? PrecoderSubproblemState::from_design(kept.pre, ch, ris)
                 : PrecoderSubproblemState::from_design(
                       random_precoders(ch, sc.pt_linear(), derive_seed(sc.seed, 1)), ch, ris);
        fr = fipsa(ch, ris, sc, start, cfg.precoder);
        for (const auto& row : fr.trace) {
          res.restoration_trace.push_back(row);
          res.restoration_trace_outer.push_back(t);
        }
        if (fr.state.feasible) break;
      }

      if (fr.state.feasible) {
        const SpcaResult sr = spca_precoders(ch, ris, sc, fr.state, cfg.precoder);
        for (const auto& row : sr.trace) {
          res.precoder_trace.push_back(row);
          res.precoder_trace_outer.push_back(t);
        }
        rec.spca_iterations = static_cast<int>(sr.trace.size());
        if (!nondecreasing(sr.state.history, 1e-6)) res.spca_monotone = false;
        if (t == 1) {
          res.first_spca_converged = sr.outcome == PrecoderOutcome::converged;
          res.first_spca_history = sr.state.history;
        }
        // the restoration point is a fallback when the precoder run failed
        const PrecoderSet& cand = sr.ok() ? sr.state.pre : fr.state.pre;
        const RateReport rep = evaluate(cand, ris, ch);
        if ((!have || rep.r_sec >= kept.report.r_sec) && certified(cand, ris, ch, sc, cert_seed)) {
          kept = {cand, ris, rep};
          have = true;
        }
      }

      if (have) {
        const RisResult rr = sequential_rank_one(ch, kept.pre, sc, kept.ris, cfg.ris);
        for (const auto& row : rr.trace) {
          res.ris_trace.push_back(row);
          res.ris_trace_outer.push_back(t);
        }
        rec.ris_iterations = static_cast<int>(rr.trace.size());
        res.ris_iterations += rec.ris_iterations;
        if (rr.solved) {
          ++res.ris_runs;
          rec.eps_ratio = std::min(rank_ratio(rr.V_t), rank_ratio(rr.V_r));
          if (rr.rank_complete) ++res.ris_rank_complete;
          if (rr.matrix_sum_rate > 0.0) {
            res.worst_extraction_loss = std::max(
                res.worst_extraction_loss, (rr.matrix_sum_rate - rr.profile_sum_rate) / rr.matrix_sum_rate);
          }
          const RateReport rep = evaluate(kept.pre, rr.profile, ch);
          if (rep.r_sec >= kept.report.r_sec && certified(kept.pre, rr.profile, ch, sc, cert_seed)) {
            kept.ris = rr.profile;
            kept.report = rep;
            rec.ris_accepted = true;
          }
        }
      }
    } catch (const std::exception& e) {
      res.failed = true;
      res.error = "outer iteration " + std::to_string(t) + ": " + e.what();
    }
    res.outer_iterations = t;
    rec.feasible = have && !res.failed;
    if (rec.feasible) {
      rec.r_sec = kept.report.r_sec;
      rec.sum_rate = kept.report.sum_rate;
      rec.energy_worst = kept.report.energy_worst;
    }
    rec.wall_ms = ms_since(t0);
    res.records.push_back(rec);
    last = rec;
    if (res.failed || !have) break;
    if (t > 1 && std::abs(rec.r_sec - prev) < cfg.delta_outer) {
      res.converged = true;
      break;
    }
    prev = rec.r_sec;
  }

  while (static_cast<int>(res.records.size()) < cfg.max_outer) {
    OuterRecord pad = last;
    pad.outer_iter = static_cast<int>(res.records.size()) + 1;
    pad.wall_ms = 0.0;
    pad.spca_iterations = 0;
    pad.ris_iterations = 0;
    pad.ris_accepted = false;
    pad.padded = true;
    res.records.push_back(pad);
  }

  res.feasible = have && !res.failed;
  if (have) {
    res.pre = kept.pre;
    res.ris = kept.ris;
    res.report = worst_case_secrecy(kept.pre, kept.ris, ch, oracle::kCertifySamples, derive_seed(sc.seed, 3));
  }
  return res;
}

int worker_threads() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("STAR_SWIPT_THREADS"); env && *env) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (*end != '\0' || cap < 1) throw ConfigError(std::string("STAR_SWIPT_THREADS must be a positive integer, got '") + env + "'");
    n = static_cast<int>(std::min<long>(n, cap));
  }
  return std::max(1, n);
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  if (v.size() < 2) return {m, 0.0};
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / static_cast<double>(v.size() - 1))};
}

ExperimentResult run_experiment(const PipelineConfig& cfg, const SweepSpec& sweep) {
  std::vector<double> values = sweep.key.empty() ? std::vector<double>{0.0} : sweep.values;
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<PipelineConfig> points;
  for (double v : values) {
    PipelineConfig p = sweep.key.empty() ? cfg : with_value(cfg, sweep.key, v);
    p.validate();
    points.push_back(std::move(p));
  }

  const int n_real = cfg.n_realizations;
  const long n_jobs = static_cast<long>(points.size()) * n_real;
  ExperimentResult out;
  out.runs.resize(n_jobs);
  const int threads = worker_threads();
  if (threads > 1) omp_set_max_active_levels(1);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long job = 0; job < n_jobs; ++job) {
    const int point = static_cast<int>(job / n_real);
    const int r = static_cast<int>(job % n_real);
    PipelineConfig pc = points[point];
    pc.scenario.seed = cfg.scenario.seed + static_cast<std::uint64_t>(r);
    AlternateResult& run = out.runs[job];
    try {
      run = alternate(synthesize_channels(pc.scenario), pc, r, values[point]);
    } catch (const std::exception& e) {
      run = AlternateResult{};
      run.failed = true;
      run.error = e.what();
    }
    if (run.records.empty()) {
      // the channel draw itself failed
      for (int t = 1; t <= pc.max_outer; ++t) {
        OuterRecord rec;
        rec.sweep_value = values[point];
        rec.realization = r;
        rec.outer_iter = t;
        rec.padded = t > 1;
        run.records.push_back(rec);
      }
    }
  }

  for (std::size_t p = 0; p < points.size(); ++p) {
    PointSummary s;
    s.sweep_value = values[p];
    s.realizations = n_real;
    std::vector<double> r_sec, sum_rate, energy, outer, ris_it;
    for (int r = 0; r < n_real; ++r) {
      const AlternateResult& run = out.runs[p * n_real + r];
      out.records.insert(out.records.end(), run.records.begin(), run.records.end());
      if (run.failed) ++s.failed;
      if (run.feasible) ++s.feasible;
      const OuterRecord& final = run.records.back();
      r_sec.push_back(final.r_sec);
      sum_rate.push_back(final.sum_rate);
      energy.push_back(final.energy_worst);
      outer.push_back(run.outer_iterations);
      ris_it.push_back(run.ris_iterations);
    }
    std::tie(s.mean_r_sec, s.std_r_sec) = mean_std(r_sec);
    std::tie(s.mean_sum_rate, s.std_sum_rate) = mean_std(sum_rate);
    s.mean_energy = mean_std(energy).first;
    s.mean_outer = mean_std(outer).first;
    s.mean_ris_iterations = mean_std(ris_it).first;
    out.failures += s.failed;
    out.points.push_back(s);
  }
  return out;
}

std::string records_header() {
  return "sweep_value,realization,outer_iter,r_sec,sum_rate,energy_worst,feasible,eps_ratio,wall_ms";
}

void write_records(std::ostream& os, const std::vector<OuterRecord>& records) {
  os << records_header() << "\n";
  for (const auto& r : records) {
    os << format_double(r.sweep_value) << "," << r.realization << "," << r.outer_iter << ","
       << format_double(r.r_sec) << "," << format_double(r.sum_rate) << "," << format_double(r.energy_worst) << ","
       << (r.feasible ? 1 : 0) << "," << format_double(r.eps_ratio) << "," << format_double(r.wall_ms) << "\n";
  }
}

std::string summary_header() {
  return "sweep_value,realizations,feasible,failed,mean_r_sec,std_r_sec,mean_sum_rate,std_sum_rate,"
         "mean_energy_worst,mean_outer_iterations,mean_ris_iterations";
}

void write_summary(std::ostream& os, const std::vector<PointSummary>& points) {
  os << summary_header() << "\n";
  for (const auto& p : points) {
    os << format_double(p.sweep_value) << "," << p.realizations << "," << p.feasible << "," << p.failed << ","
       << format_double(p.mean_r_sec) << "," << format_double(p.std_r_sec) << "," << format_double(p.mean_sum_rate)
       << "," << format_double(p.std_sum_rate) << "," << format_double(p.mean_energy) << ","
       << format_double(p.mean_outer) << "," << format_double(p.mean_ris_iterations) << "\n";
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

void write_plot(const std::filesystem::path& dir, const std::string& stem, const std::vector<double>& x,
                const std::vector<std::vector<double>>& samples) {
  if (x.size() != samples.size()) throw DimensionError("write_plot: x and samples differ in length");
  std::ofstream mean = open_out(dir / (stem + ".dat"));
  std::ofstream stdv = open_out(dir / (stem + "_std.dat"));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto [m, s] = mean_std(samples[i]);
    mean << format_double(x[i]) << " " << format_double(m) << "\n";
    stdv << format_double(x[i]) << " " << format_double(s) << "\n";
  }
}

void write_experiment(const std::filesystem::path& dir, const ExperimentResult& res, const PipelineConfig& cfg) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os = open_out(dir / "records.csv");
    write_records(os, res.records);
  }
  {
    std::ofstream os = open_out(dir / "summary.csv");
    write_summary(os, res.points);
  }
  {
    std::ofstream os = open_out(dir / "reports.csv");
    os << "sweep_value,realization,status," << rate_report_header(cfg.scenario.n_ir, cfg.scenario.n_uer) << "\n";
    const int n_real = cfg.n_realizations;
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
      const AlternateResult& run = res.runs[i];
      if (!run.feasible) continue;
      os << format_double(res.points[i / n_real].sweep_value) << "," << (i % n_real) << ",feasible,"
         << to_csv_row(run.report) << "\n";
    }
  }
  {
    std::ofstream os = open_out(dir / "failures.txt");
    for (const auto& run : res.runs) {
      if (run.failed) os << "realization " << run.records.front().realization << ": " << run.error << "\n";
    }
  }

  // final values against the sweep value
  const int n_real = cfg.n_realizations;
  std::vector<double> x;
  std::vector<std::vector<double>> r_sec, sum_rate, energy;
  for (std::size_t p = 0; p < res.points.size(); ++p) {
    x.push_back(res.points[p].sweep_value);
    r_sec.emplace_back();
    sum_rate.emplace_back();
    energy.emplace_back();
    for (int r = 0; r < n_real; ++r) {
      const OuterRecord& final = res.runs[p * n_real + r].records.back();
      r_sec.back().push_back(final.r_sec);
      sum_rate.back().push_back(final.sum_rate);
      energy.back().push_back(final.energy_worst);
    }
  }
  write_plot(dir, "r_sec", x, r_sec);
  write_plot(dir, "sum_rate", x, sum_rate);
  write_plot(dir, "energy_worst", x, energy);
}

namespace {

// values[i] padded with its last entry to `len`
std::vector<std::vector<double>> by_iteration(const std::vector<std::vector<double>>& runs) {
  std::size_t len = 0;
  for (const auto& r : runs) len = std::max(len, r.size());
  std::vector<std::vector<double>> out(len);
  for (const auto& r : runs) {
    if (r.empty()) continue;
    for (std::size_t i = 0; i < len; ++i) out[i].push_back(r[std::min(i, r.size() - 1)]);
  }
  return out;
}

std::vector<double> iota_x(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i + 1);
  return x;
}

}  // namespace

void write_convergence(const std::filesystem::path& dir, const ExperimentResult& res) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os = open_out(dir / "spca_trace.csv");
    os << "realization,outer_iter," << precoder_trace_header() << "\n";
    for (const auto& run : res.runs) {
      std::ostringstream rows;
      write_precoder_trace(rows, run.precoder_trace);
      std::istringstream in(rows.str());
      std::string line;
      std::getline(in, line);  // header
      for (std::size_t i = 0; std::getline(in, line); ++i) {
        os << run.records.front().realization << "," << run.precoder_trace_outer[i] << "," << line << "\n";
      }
    }
  }
  {
    std::ofstream os = open_out(dir / "restoration_trace.csv");
    os << "realization,outer_iter," << precoder_trace_header() << "\n";
    for (const auto& run : res.runs) {
      std::ostringstream rows;
      write_precoder_trace(rows, run.restoration_trace);
      std::istringstream in(rows.str());
      std::string line;
      std::getline(in, line);
      for (std::size_t i = 0; std::getline(in, line); ++i) {
        os << run.records.front().realization << "," << run.restoration_trace_outer[i] << "," << line << "\n";
      }
    }
  }
  {
    std::ofstream os = open_out(dir / "ris_trace.csv");
    os << "realization,outer_iter," << ris_trace_header() << "\n";
    for (const auto& run : res.runs) {
      std::ostringstream rows;
      write_ris_trace(rows, run.ris_trace);
      std::istringstream in(rows.str());
      std::string line;
      std::getline(in, line);
      for (std::size_t i = 0; std::getline(in, line); ++i) {
        os << run.records.front().realization << "," << run.ris_trace_outer[i] << "," << line << "\n";
      }
    }
  }
  {
    std::ofstream os = open_out(dir / "records.csv");
    write_records(os, res.records);
  }

  std::vector<std::vector<double>> spca, ris, outer;
  for (const auto& run : res.runs) {
    spca.push_back(run.first_spca_history);
    std::vector<double> obj;
    for (std::size_t i = 0; i < run.ris_trace.size() && run.ris_trace_outer[i] == 1; ++i) {
      obj.push_back(run.ris_trace[i].objective);
    }
    ris.push_back(obj);
    std::vector<double> r;
    for (const auto& rec : run.records) r.push_back(rec.r_sec);
    outer.push_back(r);
  }
  const auto spca_it = by_iteration(spca);
  const auto ris_it = by_iteration(ris);
  const auto outer_it = by_iteration(outer);
  write_plot(dir, "spca_r_sec", iota_x(spca_it.size()), spca_it);
  write_plot(dir, "ris_objective", iota_x(ris_it.size()), ris_it);
  write_plot(dir, "outer_r_sec", iota_x(outer_it.size()), outer_it);
}

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailedRun = 1;
constexpr int kExitConfig = 2;

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    KeyValue kv{"--values", item, 0};
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    kv.value = first == std::string::npos ? "" : item.substr(first, last - first + 1);
    out.push_back(parse_double(kv));
  }
  if (out.empty()) throw ConfigError("--values needs at least one number");
  return out;
}

void print_summary(const ExperimentResult& res, const std::string& key) {
  std::cout << (key.empty() ? "point" : key) << "  realizations  feasible  failed  mean_r_sec  std_r_sec  mean_sum_rate\n";
  for (const auto& p : res.points) {
    std::cout << format_double(p.sweep_value) << "  " << p.realizations << "  " << p.feasible << "  " << p.failed
              << "  " << format_double(p.mean_r_sec) << "  " << format_double(p.std_r_sec) << "  "
              << format_double(p.mean_sum_rate) << "\n";
  }
}

struct ValidateRow {
  std::string check;
  std::string detail;
  bool pass = false;
};

int run_validate(bool quick, const std::filesystem::path& out) {
  std::vector<ValidateRow> rows;

  const oracle::AuditReport audit = oracle::surrogate_audit(oracle::kAuditSamples, 1);
  for (const auto& o : audit.operators) {
    std::ostringstream d;
    d << "violations=" << o.violations << " tangency=" << format_double(o.tangency_residual);
    rows.push_back({"audit." + o.name, d.str(), o.pass()});
  }

  PipelineConfig cfg;
  cfg.scenario.n_tx = 2;
  cfg.scenario.n_ris = 2;
  cfg.scenario.n_ir = 1;
  cfg.scenario.n_uer = 1;
  cfg.n_realizations = quick ? 10 : 100;
  const ExperimentResult res = run_experiment(cfg, {});
  for (int r = 0; r < cfg.n_realizations; ++r) {
    ScenarioConfig sc = cfg.scenario;
    sc.seed += static_cast<std::uint64_t>(r);
    const ChannelSet ch = synthesize_channels(sc);
    const AlternateResult& run = res.runs[r];
    const oracle::GridResult grid = oracle::grid_search_tiny(ch, sc);
    const std::string tag = "[" + std::to_string(r) + "]";
    if (run.failed) {
      rows.push_back({"pipeline" + tag, run.error, false});
      continue;
    }
    if (run.feasible) {
      const auto cert = oracle::certify_design(run.pre, run.ris, ch, sc);
      rows.push_back({"certify" + tag, cert.pass() ? "all constraints met" : cert.failures(), cert.pass()});
      const auto sampled = oracle::sampled_evaluation(run.pre, run.ris, ch, oracle::kCertifySamples, 7);
      const bool sound = sampled.r_sec >= run.report.r_sec - 1e-3;
      rows.push_back({"soundness" + tag,
                      "sampled=" + format_double(sampled.r_sec) + " reported=" + format_double(run.report.r_sec),
                      sound});
    }
    const double ours = run.feasible ? run.report.r_sec : 0.0;
    const double best = grid.found ? grid.r_sec : 0.0;
    rows.push_back({"grid" + tag, "pipeline=" + format_double(ours) + " grid=" + format_double(best),
                    ours >= 0.9 * best});
  }

  std::filesystem::create_directories(out);
  std::ofstream csv = open_out(out / "validate.csv");
  csv << "check,pass,detail\n";
  bool all = true;
  for (const auto& row : rows) {
    std::cout << (row.pass ? "PASS  " : "FAIL  ") << row.check << "  " << row.detail << "\n";
    csv << row.check << "," << (row.pass ? 1 : 0) << "," << row.detail << "\n";
    all = all && row.pass;
  }
  std::cout << (all ? "validate: all checks passed\n" : "validate: some checks failed\n");
  return all ? kExitOk : kExitFailedRun;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"STAR-RIS SWIPT secrecy-rate optimizer and Monte-Carlo harness"};
  app.require_subcommand(1);

  std::string config, out, param, values;
  std::uint64_t seed = 0;
  bool quick = false;
  std::string dump;

  auto* sim = app.add_subcommand("simulate", "run the realizations of one configuration");
  sim->add_option("--config", config, "config file")->required();
  sim->add_option("--seed", seed, "base seed")->required();
  sim->add_option("--out", out, "output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "run every realization at each value of one key");
  sweep->add_option("--config", config, "config file")->required();
  sweep->add_option("--param", param, "key to sweep")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--out", out, "output directory")->required();

  auto* conv = app.add_subcommand("convergence", "per-iteration traces");
  conv->add_option("--config", config, "config file")->required();
  conv->add_option("--out", out, "output directory")->required();

  auto* val = app.add_subcommand("validate", "oracle checks on tiny instances");
  val->add_flag("--quick", quick, "10 instances instead of 100");
  val->add_option("--out", out, "directory for validate.csv")->default_val(".");

  auto* dumpcmd = app.add_subcommand("dump", "write the first precoder and RIS programs as text");
  dumpcmd->add_option("--config", config, "config file")->required();
  dumpcmd->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*val) return run_validate(quick, out);

    PipelineConfig cfg = load_pipeline_config(config);
    if (*dumpcmd) {
      std::filesystem::create_directories(out);
      const ChannelSet ch = synthesize_channels(cfg.scenario);
      const RISProfile ris = RISProfile::uniform(ch.n_ris());
      const PrecoderSet pre = random_precoders(ch, cfg.scenario.pt_linear(), derive_seed(cfg.scenario.seed, 1));
      const auto pstate = PrecoderSubproblemState::from_design(pre, ch, ris);
      std::ofstream p = open_out(std::filesystem::path(out) / "precoder_program.txt");
      build_precoder_program(pstate, ch, ris, cfg.scenario, PrecoderMode::restoration, cfg.precoder).prog.dump(p);
      const EffectiveVectors ev = effective_vectors(ch, pre);
      std::ofstream r = open_out(std::filesystem::path(out) / "ris_program.txt");
      build_ris_program(RISSubproblemState::from_profile(ris, ev), ev, pre.alpha, cfg.scenario).prog.dump(r);
      return kExitOk;
    }

    SweepSpec points;
    if (*sim) cfg.scenario.seed = seed;
    if (*sweep) {
      points.key = param;
      points.values = parse_values(values);
      with_value(cfg, param, points.values.front());
    }
    const ExperimentResult res = run_experiment(cfg, points);
    write_experiment(out, res, cfg);
    if (*conv) write_convergence(out, res);
    print_summary(res, points.key);
    if (res.failures > 0) {
      std::cerr << res.failures << " realization(s) failed; see " << (std::filesystem::path(out) / "failures.txt")
                << "\n";
      return kExitFailedRun;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailedRun;
  }
}

}  // namespace star_swipt
