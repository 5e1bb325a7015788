#include "gnsstune/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include <Eigen/QR>

#include "gnsstune/parallel.hpp"

namespace gnsstune {

std::vector<Measurement> form_measurements(const std::vector<ChannelSnapshot>& channels, const EcefState& receiver,
                                           const Constellation& constellation, double t, const ClockModel& clock) {
  std::vector<Measurement> out;
  out.reserve(channels.size());
  for (const auto& ch : channels) {
    if (!ch.locked) continue;
    auto it = std::find_if(constellation.begin(), constellation.end(),
                           [&](const GpsSatellite& s) { return s.prn == ch.prn; });
    if (it == constellation.end()) continue;
    const EcefState sat = propagate_gps(*it, t);
    const Vec3 d = sat.position - receiver.position;
    const double range = d.norm();
    const double range_rate = (sat.velocity - receiver.velocity).dot(d) / range;
    Measurement m;
    m.prn = ch.prn;
    m.pseudorange = range + clock.bias(t) + ch.code_error * kChipLength;
    m.pseudorange_rate = range_rate + clock.drift_mps - ch.freq_error * kL1Wavelength;
    m.sat_state = sat;
    out.push_back(m);
  }
  return out;
}

PvtSolution solve_pvt(const std::vector<Measurement>& measurements, const std::optional<PvtSolution>& prior, double t) {
  PvtSolution sol;
  sol.t = t;
  const auto n = static_cast<Eigen::Index>(measurements.size());
  sol.n_sats = static_cast<int>(n);
  if (n < 4) return sol;

  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  if (prior && prior->valid) {
    x.head<3>() = prior->position;
    x(3) = prior->clock_bias;
  }

  Eigen::MatrixXd H(n, 4);
  Eigen::VectorXd r(n);
  bool converged = false;
  for (int iter = 0; iter < 10; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& m = measurements[static_cast<std::size_t>(i)];
      const Vec3 d = m.sat_state.position - x.head<3>();
      const double range = d.norm();
      H.row(i) << -(d / range).transpose(), 1.0;
      r(i) = m.pseudorange - (range + x(3));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(H);
    if (qr.rank() < 4) return sol;
    const Eigen::Vector4d dx = qr.solve(r);
    x += dx;
    if (!x.allFinite()) return sol;
    if (dx.head<3>().norm() < 1e-4) {
      converged = true;
      break;
    }
  }
  if (!converged) return sol;

  // Geometry at the converged position.
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& m = measurements[static_cast<std::size_t>(i)];
    const Vec3 u = (m.sat_state.position - x.head<3>()).normalized();
    H.row(i) << -u.transpose(), 1.0;
    y(i) = m.pseudorange_rate - m.sat_state.velocity.dot(u);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(H);
  if (qr.rank() < 4) return sol;
  const Eigen::Vector4d v = qr.solve(y);

  sol.position = x.head<3>();
  sol.clock_bias = x(3);
  sol.velocity = v.head<3>();
  sol.clock_drift = v(3);
  sol.valid = v.allFinite();
  return sol;
}

ScenarioEnv default_env(ScenarioTag tag) {
  ScenarioEnv env;
  env.tag = tag;
  if (tag == ScenarioTag::kLeo) {
    env.visibility.rule = VisibilityRule::kEarthLimb;
    env.cn0_dbhz = 45.0;
    // Keeps the hand-off inside the +/-250 Hz range of the bit-insensitive FLL at 1 ms.
    env.channel.init_freq_error_hz = 200.0;
  }
  return env;
}

std::vector<Pass> visibility_passes(const GroundTruth& truth, const ScenarioEnv& env) {
  const double t0 = truth.start_time();
  const double t1 = truth.end_time();
  const auto steps = static_cast<int>(std::floor((t1 - t0) / env.visibility_step_s + 1e-9));

  std::map<int, Pass> open;
  std::vector<Pass> passes;
  auto close = [&](const Pass& p) {
    if (p.end - p.start >= env.min_pass_s) passes.push_back(p);
  };
  for (int k = 0; k <= steps + 1; ++k) {
    const double t = std::min(t0 + k * env.visibility_step_s, t1);
    std::map<int, bool> seen;
    for (const auto& los : visible_sats(truth.at(t), env.constellation, env.visibility, t)) seen[los.prn] = true;
    for (auto it = open.begin(); it != open.end();) {
      if (seen.count(it->first)) {
        it->second.end = t;
        ++it;
      } else {
        close(it->second);
        it = open.erase(it);
      }
    }
    for (const auto& [prn, _] : seen) {
      if (!open.count(prn)) open[prn] = Pass{prn, t, t};
    }
    if (t >= t1) break;
  }
  for (const auto& [prn, p] : open) close(p);
  std::sort(passes.begin(), passes.end(),
            [](const Pass& a, const Pass& b) { return a.start != b.start ? a.start < b.start : a.prn < b.prn; });
  return passes;
}

namespace {

struct Snapshot {
  float code_error = 0.0F;
  float freq_error = 0.0F;
  bool present = false;
};

struct ChannelJob {
  Pass pass;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> init_seed;
  ChannelOutcome outcome;
  std::vector<Snapshot> ticks;  // indexed by PVT epoch
};

}  // namespace

ReceiverRun run_receiver(std::shared_ptr<const GroundTruth> truth, const LoopConfig& cfg, const ScenarioEnv& env,
                         std::uint64_t seed, unsigned threads) {
  const GroundTruth grid = truth->resample(env.pvt_rate_hz);
  const auto& epochs = grid.states();
  const std::size_t n_ticks = epochs.size();

  std::vector<ChannelJob> jobs;
  std::map<int, std::uint64_t> pass_count;
  for (const Pass& p : visibility_passes(*truth, env)) {
    ChannelJob job;
    job.pass = p;
    const std::uint64_t prn = static_cast<std::uint64_t>(p.prn);
    const std::uint64_t nth = pass_count[p.prn]++;
    job.seed = derive_seed(seed, {prn, nth});
    if (env.condition_seed) job.init_seed = derive_seed(*env.condition_seed, {prn, nth});
    jobs.push_back(std::move(job));
  }

  auto run_job = [&](ChannelJob& job) {
    const auto sat = std::find_if(env.constellation.begin(), env.constellation.end(),
                                  [&](const GpsSatellite& s) { return s.prn == job.pass.prn; });
    ChannelTruth ct(job.pass.prn, truth, *sat, env.cn0_dbhz, derive_seed(job.seed, {0xB175}),
                    job.pass.start + env.bit_sync_delay_s);
    ChannelOptions opt = env.channel;
    opt.start_time = job.pass.start;
    opt.end_time = job.pass.end;
    if (job.init_seed) opt.init_seed = job.init_seed;
    job.ticks.assign(n_ticks, Snapshot{});

    // Range rate uses the mean frequency error over the records since the
    // previous tick, i.e. the accumulated carrier phase over the interval.
    std::size_t k = 0;
    std::optional<EpochRecord> last;
    double freq_sum = 0.0;
    int freq_n = 0;
    auto assign_until = [&](double t_limit) {
      while (k < n_ticks && epochs[k].t < t_limit) {
        if (last && last->locked && epochs[k].t >= last->t - 1e-9) {
          const double fe = freq_n > 0 ? freq_sum / freq_n : last->freq_error;
          job.ticks[k] = {static_cast<float>(last->code_error), static_cast<float>(fe), true};
          freq_sum = 0.0;
          freq_n = 0;
        }
        ++k;
      }
    };
    job.outcome = run_channel(ct, cfg, job.seed, opt, [&](const EpochRecord& r) {
      assign_until(r.t - 1e-9);
      last = r;
      if (r.locked) {
        freq_sum += r.freq_error;
        ++freq_n;
      } else {
        freq_sum = 0.0;
        freq_n = 0;
      }
    });
    if (last) assign_until(last->t + 1e-9);
  };

  parallel_for(jobs.size(), threads, [&](std::size_t i) { run_job(jobs[i]); });

  ReceiverRun run;
  run.solutions.reserve(n_ticks);
  std::optional<PvtSolution> prior;
  std::vector<ChannelSnapshot> snaps;
  for (std::size_t k = 0; k < n_ticks; ++k) {
    snaps.clear();
    for (const auto& job : jobs) {
      const Snapshot& s = job.ticks[k];
      if (s.present) snaps.push_back({job.pass.prn, s.code_error, s.freq_error, true});
    }
    const double t = epochs[k].t;
    const auto meas = form_measurements(snaps, epochs[k], env.constellation, t, env.clock);
    PvtSolution sol = solve_pvt(meas, prior, t);
    if (sol.valid) prior = sol;
    run.solutions.push_back(sol);
  }
  for (auto& job : jobs) run.channels.push_back(std::move(job.outcome));
  return run;
}

void write_pvt_csv(std::ostream& os, const std::vector<PvtSolution>& solutions) {
  os << "t,x,y,z,vx,vy,vz,clock_bias,clock_drift,n_sats,valid\n";
  os << std::setprecision(12);
  for (const auto& s : solutions) {
    os << s.t << ',';
    if (s.valid) {
      os << s.position.x() << ',' << s.position.y() << ',' << s.position.z() << ',' << s.velocity.x() << ','
         << s.velocity.y() << ',' << s.velocity.z() << ',' << s.clock_bias << ',' << s.clock_drift;
    } else {
      os << ",,,,,,,";
    }
    os << ',' << s.n_sats << ',' << (s.valid ? 1 : 0) << '\n';
  }
}

}  // namespace gnsstune
