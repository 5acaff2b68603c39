// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "star_swipt/oracle.hpp"
#include "star_swipt/pipeline.hpp"

using namespace star_swipt;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr int kRealizations = 20;
constexpr double kMonotoneTol = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  std::printf("criterion %2d  %-4s  %-28s %s\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

PipelineConfig base_config() {
  PipelineConfig cfg;
  cfg.n_realizations = kRealizations;
  cfg.scenario.seed = 1;
  return cfg;
}

struct Point {
  PipelineConfig cfg;
  ExperimentResult res;
  double seconds = 0.0;

  double mean_final(double OuterRecord::*field) const {
    double s = 0.0;
    for (const auto& run : res.runs) s += run.records.back().*field;
    return s / static_cast<double>(res.runs.size());
  }
};

Point run_point(const PipelineConfig& cfg) {
  const auto t0 = Clock::now();
  Point p{cfg, run_experiment(cfg, {}), 0.0};
  p.seconds = seconds_since(t0);
  return p;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << format_double(v[i]);
  return os.str();
}

// Every final design of every run: certification and sampled soundness.
struct DesignAudit {
  int designs = 0;
  int certified = 0;
  int sound = 0;
  std::string first_failure;

  void add(const Point& p) {
    for (std::size_t r = 0; r < p.res.runs.size(); ++r) {
      const AlternateResult& run = p.res.runs[r];
      if (!run.feasible) continue;
      ScenarioConfig sc = p.cfg.scenario;
      sc.seed += r;
      const ChannelSet ch = synthesize_channels(sc);
      ++designs;
      const auto cert = oracle::certify_design(run.pre, run.ris, ch, sc, oracle::kCertifySamples, 11);
      if (cert.pass()) {
        ++certified;
      } else if (first_failure.empty()) {
        first_failure = "seed " + std::to_string(sc.seed) + ": " + cert.failures();
      }
      const auto e = oracle::sampled_evaluation(run.pre, run.ris, ch, oracle::kCertifySamples, 13);
      bool ok = true;
      for (double s : e.secrecy) ok = ok && s >= run.report.r_sec - 1e-3;
      sound += ok;
    }
  }
};

}  // namespace

int main() {
  const auto start = Clock::now();

  // 1. surrogate audit
  {
    const oracle::AuditReport audit = oracle::surrogate_audit(oracle::kAuditSamples, 2024);
    std::ostringstream d;
    int viol = 0;
    double tang = 0.0;
    for (const auto& o : audit.operators) {
      viol += o.violations;
      tang = std::max(tang, o.tangency_residual);
    }
    const double secs = audit.wall_ms / 1000.0;
    d << audit.operators.size() << " operators, violations=" << viol << " max tangency=" << format_double(tang)
      << " time=" << format_double(secs) << "s";
    report(1, "surrogate audit",
           {audit.operators.size() == 7 && audit.pass(1e-9) && secs < 10.0, d.str()});
  }

  // transmit-power sweep at the default geometry
  const std::vector<double> powers{15, 20, 25, 30};
  std::vector<Point> by_power;
  double power_seconds = 0.0;
  for (double pt : powers) {
    PipelineConfig cfg = base_config();
    cfg.scenario.pt_db = pt;
    by_power.push_back(run_point(cfg));
    power_seconds += by_power.back().seconds;
  }
  const Point& at25 = by_power[2];

  // 2. SPCA convergence and monotonicity
  {
    bool ok = power_seconds < 20 * 60;
    std::ostringstream d;
    for (const Point& p : by_power) {
      int started = 0, converged = 0, monotone = 0;
      for (const auto& run : p.res.runs) {
        if (run.first_spca_history.empty()) continue;
        ++started;
        converged += run.first_spca_converged;
        bool mono = true;
        const auto& h = run.first_spca_history;
        for (std::size_t i = 1; i < h.size(); ++i) mono = mono && h[i] >= h[i - 1] - kMonotoneTol;
        mono = mono && run.spca_monotone;
        monotone += mono;
      }
      // a realization with no feasible point never starts the precoder loop
      ok = ok && converged >= 0.9 * kRealizations && monotone == started;
      d << format_double(p.cfg.scenario.pt_db) << "dB:" << converged << "/" << kRealizations << " conv "
        << monotone << "/" << started << " mono; ";
    }
    d << "time=" << format_double(power_seconds) << "s";
    report(2, "SPCA convergence", {ok, d.str()});
  }

  // 3. power trend
  {
    std::vector<double> means;
    for (const Point& p : by_power) means.push_back(p.mean_final(&OuterRecord::r_sec));
    bool ok = true;
    for (std::size_t i = 1; i < means.size(); ++i) ok = ok && means[i] >= means[i - 1];
    report(3, "power trend", {ok, "mean r_sec at 15/20/25/30 dB: " + join(means)});
  }

  // 4. antenna trend at 25 dB
  std::vector<Point> by_antennas;
  {
    for (int nt : {2, 6}) {
      PipelineConfig cfg = base_config();
      cfg.scenario.n_tx = nt;
      by_antennas.push_back(run_point(cfg));
    }
    const double m2 = by_antennas[0].mean_final(&OuterRecord::r_sec);
    const double m4 = at25.mean_final(&OuterRecord::r_sec);
    const double m6 = by_antennas[1].mean_final(&OuterRecord::r_sec);
    report(4, "antenna trend", {m6 >= m4 && m4 >= m2, "mean r_sec at N_T=2/4/6: " + join({m2, m4, m6})});
  }

  // 5. RIS-size trend at 25 dB
  std::vector<Point> by_size;
  {
    PipelineConfig cfg = base_config();
    cfg.scenario.n_ris = 4;
    by_size.push_back(run_point(cfg));
    auto mean_ris_iterations = [](const Point& p) {
      double total = 0.0;
      int runs = 0;
      for (const auto& run : p.res.runs)
        for (const auto& rec : run.records) {
          if (rec.padded || rec.ris_iterations == 0) continue;
          total += rec.ris_iterations;
          ++runs;
        }
      return runs ? total / runs : 0.0;
    };
    const double s4 = by_size[0].mean_final(&OuterRecord::sum_rate);
    const double s10 = at25.mean_final(&OuterRecord::sum_rate);
    const double i4 = mean_ris_iterations(by_size[0]);
    const double i10 = mean_ris_iterations(at25);
    report(5, "RIS-size trend",
           {s10 > s4 && i10 >= i4, "mean sum rate M=4/10: " + join({s4, s10}) + "; mean RIS iterations per run: " +
                                       join({i4, i10})});
  }

  // 6. robustness trend at 25 dB
  std::vector<Point> by_nu;
  {
    for (double nu : {1e-3, 1e-2}) {
      PipelineConfig cfg = base_config();
      cfg.scenario.nu = nu;
      by_nu.push_back(run_point(cfg));
    }
    const std::vector<double> means{at25.mean_final(&OuterRecord::r_sec), by_nu[0].mean_final(&OuterRecord::r_sec),
                                    by_nu[1].mean_final(&OuterRecord::r_sec)};
    report(6, "robustness trend",
           {means[1] <= means[0] && means[2] <= means[1], "mean r_sec at nu=1e-4/1e-3/1e-2: " + join(means)});
  }

  // 7. rank-one quality over every RIS run at M = 10
  {
    int runs = 0, complete = 0;
    double loss = 0.0;
    for (const Point& p : by_power)
      for (const auto& run : p.res.runs) {
        runs += run.ris_runs;
        complete += run.ris_rank_complete;
        loss = std::max(loss, run.worst_extraction_loss);
      }
    std::ostringstream d;
    d << complete << "/" << runs << " runs reach the rank tolerance; worst extraction loss "
      << format_double(100.0 * loss) << "%";
    report(7, "rank-one quality", {runs > 0 && complete >= 0.9 * runs && loss <= 0.05, d.str()});
  }

  // 8 and 9 over every emitted design
  {
    DesignAudit audit;
    for (const Point& p : by_power) audit.add(p);
    for (const Point& p : by_antennas) audit.add(p);
    for (const Point& p : by_size) audit.add(p);
    for (const Point& p : by_nu) audit.add(p);
    std::ostringstream d8, d9;
    d8 << audit.certified << "/" << audit.designs << " designs certified";
    if (!audit.first_failure.empty()) d8 << "; first failure " << audit.first_failure;
    d9 << audit.sound << "/" << audit.designs << " designs keep per-IR sampled secrecy above the reported value";
    report(8, "feasibility certification", {audit.designs > 0 && audit.certified == audit.designs, d8.str()});
    report(9, "secrecy soundness", {audit.designs > 0 && audit.sound == audit.designs, d9.str()});
  }

  // 10. tiny instances against exhaustive search
  {
    const auto t0 = Clock::now();
    PipelineConfig cfg = base_config();
    cfg.n_realizations = 10;
    cfg.scenario.n_tx = 2;
    cfg.scenario.n_ris = 2;
    cfg.scenario.n_ir = 1;
    cfg.scenario.n_uer = 1;
    const ExperimentResult res = run_experiment(cfg, {});
    int matched = 0;
    std::vector<double> ratios;
    for (int r = 0; r < cfg.n_realizations; ++r) {
      ScenarioConfig sc = cfg.scenario;
      sc.seed += r;
      const oracle::GridResult grid = oracle::grid_search_tiny(synthesize_channels(sc), sc);
      const double ours = res.runs[r].feasible ? res.runs[r].report.r_sec : 0.0;
      const double best = grid.found ? grid.r_sec : 0.0;
      matched += ours >= 0.9 * best;
      ratios.push_back(best > 0.0 ? ours / best : 1.0);
    }
    const double secs = seconds_since(t0);
    report(10, "tiny-instance oracle",
           {matched == cfg.n_realizations && secs < 15 * 60,
            std::to_string(matched) + "/10 at >= 0.9 of grid best; ratios " + join(ratios) +
                "; time=" + format_double(secs) + "s"});
  }

  std::printf("acceptance: %d criteria failed, total %.0f s\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
