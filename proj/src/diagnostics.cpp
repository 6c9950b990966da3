#include "nemalab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "nemalab/spectral.hpp"

namespace nemalab {

// ---------------------------------------------------------------- traces

void NormTrace::push(double t, double value) {
  if (!std::isfinite(t) || (!t_.empty() && !(t > t_.back()))) {
    throw std::invalid_argument("NormTrace '" + name_ + "': times must increase strictly");
  }
  double acc = 0.0;
  if (!t_.empty()) acc = integral_.back() + 0.5 * (t - t_.back()) * (value + v_.back());
  t_.push_back(t);
  v_.push_back(value);
  integral_.push_back(acc);
}

double NormTrace::sup() const { return v_.empty() ? 0.0 : *std::max_element(v_.begin(), v_.end()); }

std::string traces_csv(const std::vector<const NormTrace*>& traces, bool with_integrals) {
  std::ostringstream os;
  os << std::setprecision(17) << "t";
  for (const auto* tr : traces) {
    os << ',' << tr->name();
    if (with_integrals) os << ',' << tr->name() << "_int";
  }
  os << '\n';
  if (traces.empty()) return os.str();
  const auto& t = traces.front()->times();
  for (const auto* tr : traces) {
    if (tr->times() != t) throw std::invalid_argument("traces_csv: traces have different time stamps");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << t[i];
    for (const auto* tr : traces) {
      os << ',' << tr->values()[i];
      if (with_integrals) os << ',' << tr->integrals()[i];
    }
    os << '\n';
  }
  return os.str();
}

NormTrace v_of_t(const NormTrace& u_b52) {
  NormTrace v("V");
  for (std::size_t i = 0; i < u_b52.size(); ++i) v.push(u_b52.times()[i], u_b52.integrals()[i]);
  return v;
}

double q0_threshold(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("q0_threshold: nu must be positive");
  return std::log2(3.0 / nu);
}

// -------------------------------------------------------- block recording

void BlockSeries::push(double time, BlockMasses m) {
  if (!t.empty() && !(time > t.back())) {
    throw std::invalid_argument("BlockSeries '" + name + "': times must increase strictly");
  }
  t.push_back(time);
  masses.push_back(std::move(m));
}

std::vector<double> BlockSeries::block(int q) const {
  std::vector<double> out;
  out.reserve(masses.size());
  for (const auto& m : masses) out.push_back(m.at(q));
  return out;
}

Observer block_recorder(TrajectoryBlocks& out, const DyadicPartition& partition) {
  return [&out, &partition](double t, const ReformSpectra& r) {
    out.density.push(t, block_masses(r.a, partition));
    out.velocity.push(t, block_masses(velocity_spectra(r), partition));
    out.director.push(t, block_masses(r.d, partition));
  };
}

LinearObserver linear_block_recorder(std::vector<BlockSeries>& out, const DyadicPartition& partition,
                                     const std::vector<int>& groups) {
  if (out.size() < groups.size()) out.resize(groups.size());
  return [&out, &partition, groups](double t, const std::vector<Spectrum>& fields) {
    std::size_t next = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto n = static_cast<std::size_t>(groups[g]);
      if (next + n > fields.size()) throw std::invalid_argument("linear_block_recorder: group sizes exceed field count");
      std::vector<Spectrum> part(fields.begin() + next, fields.begin() + next + n);
      out[g].push(t, block_masses(part, partition));
      next += n;
    }
  };
}

// -------------------------------------------------------------- 𝔅^s_T

namespace {

struct Instant {
  double density_sup, velocity_sup, director_sup;
  double density_l1, velocity_l1, director_l1;
};

Instant instant_norms(const TrajectoryBlocks& traj, std::size_t i, double s, int split) {
  Instant n{};
  n.density_sup = hybrid_norm(traj.density.masses[i], {s - 1.0, s, split});
  n.velocity_sup = besov_norm(traj.velocity.masses[i], s - 1.0);
  n.director_sup = hybrid_norm(traj.director.masses[i], {s - 1.0, s, split});
  n.density_l1 = hybrid_norm(traj.density.masses[i], {s + 1.0, s, split});
  n.velocity_l1 = besov_norm(traj.velocity.masses[i], s + 1.0);
  n.director_l1 = hybrid_norm(traj.director.masses[i], {s + 1.0, s + 2.0, split});
  return n;
}

void require_consistent(const TrajectoryBlocks& traj) {
  if (traj.velocity.t != traj.density.t || traj.director.t != traj.density.t) {
    throw std::invalid_argument("trajectory series have different time stamps");
  }
}

void finish(FrakBReport& r) {
  r.total = r.density_sup + r.velocity_sup + r.director_sup + r.density_l1 + r.velocity_l1 + r.director_l1;
}

}  // namespace

nlohmann::json FrakBReport::to_json() const {
  return {{"s", s},
          {"T", T},
          {"density_sup", density_sup},
          {"velocity_sup", velocity_sup},
          {"director_sup", director_sup},
          {"density_l1", density_l1},
          {"velocity_l1", velocity_l1},
          {"director_l1", director_l1},
          {"total", total}};
}

std::vector<FrakBReport> frak_b_running(const TrajectoryBlocks& traj, double s, int split) {
  require_consistent(traj);
  std::vector<FrakBReport> out;
  out.reserve(traj.size());
  FrakBReport acc;
  acc.s = s;
  Instant prev{};
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Instant now = instant_norms(traj, i, s, split);
    acc.T = traj.density.t[i];
    acc.density_sup = std::max(acc.density_sup, now.density_sup);
    acc.velocity_sup = std::max(acc.velocity_sup, now.velocity_sup);
    acc.director_sup = std::max(acc.director_sup, now.director_sup);
    if (i > 0) {
      const double h = 0.5 * (traj.density.t[i] - traj.density.t[i - 1]);
      acc.density_l1 += h * (now.density_l1 + prev.density_l1);
      acc.velocity_l1 += h * (now.velocity_l1 + prev.velocity_l1);
      acc.director_l1 += h * (now.director_l1 + prev.director_l1);
    }
    finish(acc);
    out.push_back(acc);
    prev = now;
  }
  return out;
}

FrakBReport frak_b_norm(const TrajectoryBlocks& traj, double s, int split, double max_gap) {
  if (traj.size() == 0) throw std::invalid_argument("frak_b_norm: empty trajectory");
  const auto& t = traj.density.t;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] - t[i - 1] > max_gap) {
      std::ostringstream os;
      os << "frak_b_norm: snapshot gap [" << t[i - 1] << ", " << t[i] << "] exceeds " << max_gap;
      throw std::invalid_argument(os.str());
    }
  }
  return frak_b_running(traj, s, split).back();
}

std::string frak_b_csv(const std::vector<FrakBReport>& running) {
  std::ostringstream os;
  os << std::setprecision(17)
     << "T,density_sup,velocity_sup,director_sup,density_l1,velocity_l1,director_l1,total\n";
  for (const auto& r : running) {
    os << r.T << ',' << r.density_sup << ',' << r.velocity_sup << ',' << r.director_sup << ',' << r.density_l1
       << ',' << r.velocity_l1 << ',' << r.director_l1 << ',' << r.total << '\n';
  }
  return os.str();
}

double initial_norm_sum(const TrajectoryBlocks& traj, std::size_t i, int split) {
  if (i >= traj.size()) throw std::out_of_range("initial_norm_sum: sample index");
  return hybrid_norm(traj.density.masses[i], {0.5, 1.5, split}) + besov_norm(traj.velocity.masses[i], 0.5) +
         hybrid_norm(traj.director.masses[i], {0.5, 1.5, split});
}

// ------------------------------------------------------ mixed functionals

MixedFq mixed_fq(const Spectrum& a, const Spectrum& h, int q, double tau, double nu, FqRegime regime,
                 const DyadicPartition& partition) {
  require_same_grid(a.grid(), h.grid(), "mixed_fq");
  if (!(nu > 0.0)) throw std::invalid_argument("mixed_fq: nu must be positive");
  if (regime == FqRegime::low && !(tau > 0.0 && tau <= 8.0 / 9.0)) {
    throw std::invalid_argument("mixed_fq: tau must lie in (0, 8/9]");
  }
  const auto& lat = a.grid().lattice();
  const double vol = a.grid().volume();
  double aa = 0.0, la2 = 0.0, hh = 0.0, cross = 0.0;
  if (q >= partition.q_min() && q <= partition.q_max()) {
    for (const auto& e : partition.block(q)) {
      const double w = lat.weight[e.mode] * e.weight * e.weight * vol;
      const double r = lat.xi_norm[e.mode];
      const Complex ca = a[e.mode], ch = h[e.mode];
      aa += w * std::norm(ca);
      la2 += w * r * r * std::norm(ca);
      hh += w * std::norm(ch);
      cross += w * r * (ca * std::conj(ch)).real();
    }
  }
  MixedFq out;
  out.cross = cross;
  if (regime == FqRegime::low) {
    out.f2 = aa + hh - 0.25 * tau * nu * cross;
    out.reference = aa + hh;
  } else {
    out.f2 = la2 + 3.0 / (nu * nu) * hh - 2.0 / nu * cross;
    out.reference = la2 + hh;
  }
  out.ratio = out.reference > 0.0 ? out.f2 / out.reference : 0.0;
  return out;
}

// ------------------------------------------------------------ damping fit

namespace {

RateFit least_squares(const std::vector<double>& t, const std::vector<double>& logm) {
  RateFit fit;
  fit.points = t.size();
  if (t.size() < 2) return fit;
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += logm[i];
  }
  const double tm = st / n, ym = sy / n;
  double stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (logm[i] - ym);
  }
  if (!(stt > 0.0)) return fit;
  const double slope = sty / stt;
  double ss = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = logm[i] - (ym + slope * (t[i] - tm));
    ss += e * e;
  }
  fit.rate = -slope;
  fit.residual = std::sqrt(ss / n);
  fit.valid = std::isfinite(fit.rate);
  return fit;
}

}  // namespace

RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& m, double lo, double hi) {
  if (t.size() != m.size()) throw std::invalid_argument("fit_decay_rate: size mismatch");
  if (t.size() < 3) throw std::invalid_argument("fit_decay_rate: need at least three samples");
  const double peak = *std::max_element(m.begin(), m.end());
  if (!(peak > 0.0)) return {};

  // Window relative to the peak mass; fall back to every sample above the
  // floor when the trace never decays into the window.
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] >= lo * peak && m[i] <= hi * peak) idx.push_back(i);
  }
  if (idx.size() < 3) {
    idx.clear();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] >= lo * peak && m[i] > 0.0) idx.push_back(i);
    }
  }

  std::vector<std::size_t> peaks;
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    const std::size_t i = idx[k];
    if (idx[k - 1] + 1 == i && i + 1 == idx[k + 1] && m[i] > m[i - 1] && m[i] >= m[i + 1]) peaks.push_back(i);
  }
  const auto& use = peaks.size() >= 3 ? peaks : idx;

  std::vector<double> tt, ly;
  for (auto i : use) {
    tt.push_back(t[i]);
    ly.push_back(std::log(m[i]));
  }
  return least_squares(tt, ly);
}

double acoustic_slow_rate(double r, double nu) {
  const double sigma = 0.5 * nu * r * r;
  const double disc = sigma * sigma - r * r;
  // sigma − sqrt(disc) = r²/(sigma + sqrt(disc)) avoids cancellation.
  return disc > 0.0 ? r * r / (sigma + std::sqrt(disc)) : sigma;
}

DampingReport damping_fit(const BlockSeries& rho, const BlockSeries& h, double nu, double lo, double hi) {
  if (rho.size() < 3 || h.size() < 3) throw std::invalid_argument("damping_fit: need at least three samples");
  if (rho.t != h.t) throw std::invalid_argument("damping_fit: series have different time stamps");
  DampingReport rep;
  rep.nu = nu;
  rep.q0 = q0_threshold(nu);
  const BlockMasses& first_r = rho.masses.front();
  const BlockMasses& first_h = h.masses.front();
  for (int q = first_r.q_min; q <= first_r.q_max(); ++q) {
    DampingEntry e;
    e.q = q;
    e.above_q0 = q > rep.q0;
    e.reference_rate = acoustic_slow_rate(std::ldexp(1.0, q), nu);
    const auto mr = rho.block(q), mh = h.block(q);
    const double peak_r = *std::max_element(mr.begin(), mr.end());
    const double peak_h = *std::max_element(mh.begin(), mh.end());
    e.excluded = std::max(first_r.at(q), first_h.at(q)) < 1e-12;
    if (!e.excluded) {
      if (peak_r >= 1e-12) e.rho = fit_decay_rate(rho.t, mr, lo, hi);
      if (peak_h >= 1e-12) e.h = fit_decay_rate(h.t, mh, lo, hi);
    }
    rep.blocks.push_back(e);

    rep.initial_b12 += std::pow(2.0, 0.5 * q) * (first_r.at(q) + first_h.at(q));
    if (q > rep.q0) {
      double integral = 0.0;
      for (std::size_t i = 1; i < h.t.size(); ++i) integral += 0.5 * (h.t[i] - h.t[i - 1]) * (mh[i] + mh[i - 1]);
      rep.smoothing_integral += std::pow(2.0, 2.5 * q) * integral;
    }
  }
  return rep;
}

nlohmann::json DampingReport::to_json() const {
  nlohmann::json blocks_json = nlohmann::json::array();
  for (const auto& b : blocks) {
    blocks_json.push_back({{"q", b.q},
                           {"above_q0", b.above_q0},
                           {"excluded", b.excluded},
                           {"rho_rate", b.rho.rate},
                           {"rho_residual", b.rho.residual},
                           {"rho_points", b.rho.points},
                           {"rho_valid", b.rho.valid},
                           {"h_rate", b.h.rate},
                           {"h_residual", b.h.residual},
                           {"h_valid", b.h.valid},
                           {"reference_rate", b.reference_rate}});
  }
  return {{"nu", nu},
          {"q0", q0},
          {"high_frequency_plateau", 1.0 / nu},
          {"smoothing_integral", smoothing_integral},
          {"initial_b12", initial_b12},
          {"blocks", blocks_json}};
}

std::string DampingReport::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(12) << "q,above_q0,excluded,rho_rate,rho_residual,h_rate,h_residual,reference_rate\n";
  for (const auto& b : blocks) {
    os << b.q << ',' << b.above_q0 << ',' << b.excluded << ',' << b.rho.rate << ',' << b.rho.residual << ','
       << b.h.rate << ',' << b.h.residual << ',' << b.reference_rate << '\n';
  }
  return os.str();
}

// --------------------------------------------------------- bound checks

nlohmann::json BoundVerdict::to_json() const {
  return {{"pass", pass},
          {"n0", n0},
          {"gamma", gamma},
          {"worst_ratio", worst_ratio},
          {"worst_time", worst_time},
          {"worst_functional", worst_functional}};
}

BoundVerdict theorem_bound_check(const std::vector<FrakBReport>& running, double n0, double gamma) {
  BoundVerdict v;
  v.n0 = n0;
  v.gamma = gamma;
  for (const auto& r : running) {
    if (!(r.total <= gamma * n0)) v.pass = false;
    const double ratio = n0 > 0.0 ? r.total / n0 : (r.total > 0.0 ? INFINITY : 0.0);
    if (ratio >= v.worst_ratio) {
      v.worst_ratio = ratio;
      v.worst_time = r.T;
      v.worst_functional = r.total;
    }
  }
  return v;
}

InterpolationCheck interpolation_check(const BlockSeries& f, int split) {
  InterpolationCheck c;
  double sup = 0.0, l1 = 0.0, l2sq = 0.0;
  double prev_l1 = 0.0, prev_l2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double n_sup = hybrid_norm(f.masses[i], {0.5, 1.5, split});
    const double n_l1 = hybrid_norm(f.masses[i], {2.5, 3.5, split});
    const double n_l2 = hybrid_norm(f.masses[i], {1.5, 2.5, split});
    sup = std::max(sup, n_sup);
    if (i > 0) {
      const double h = 0.5 * (f.t[i] - f.t[i - 1]);
      l1 += h * (n_l1 + prev_l1);
      l2sq += h * (n_l2 * n_l2 + prev_l2 * prev_l2);
    }
    prev_l1 = n_l1;
    prev_l2 = n_l2;
  }
  c.lhs = l2sq;
  c.rhs = sup * l1;
  c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : 0.0;
  return c;
}

namespace {

DeviationMonitors monitors(const RealField& a, const VectorField& d) {
  DeviationMonitors m;
  m.min_density = INFINITY;
  for (double v : a.values()) {
    m.max_density_deviation = std::max(m.max_density_deviation, std::abs(v));
    m.min_density = std::min(m.min_density, 1.0 + v);
  }
  m.max_director_defect = director_defect(d);
  return m;
}

}  // namespace

DeviationMonitors deviation_monitors(const LCState& s) {
  RealField a = s.rho;
  for (double& v : a.values()) v -= 1.0;
  return monitors(a, s.d);
}

DeviationMonitors deviation_monitors(const ReformSpectra& r) {
  std::vector<RealField> d;
  for (const auto& c : r.d) d.push_back(transform_inverse(c));
  return monitors(transform_inverse(r.a), VectorField(std::move(d)));
}

nlohmann::json LinearBoundReport::to_json() const {
  return {{"c_emp", c_emp}, {"worst_time", worst_time}, {"v_final", v_final}};
}

LinearBoundReport linear_bound_constant(const NormTrace& sup_part, const NormTrace& l1_part, const NormTrace& v,
                                        const NormTrace& forcing) {
  const auto& t = sup_part.times();
  if (t.empty()) throw std::invalid_argument("linear_bound_constant: empty trace");
  if (l1_part.times() != t || v.times() != t || forcing.times() != t) {
    throw std::invalid_argument("linear_bound_constant: traces have different time stamps");
  }
  LinearBoundReport rep;
  double running_sup = 0.0, weighted_forcing = 0.0;
  const double n0 = sup_part.values().front();
  for (std::size_t i = 0; i < t.size(); ++i) {
    running_sup = std::max(running_sup, sup_part.values()[i]);
    if (i > 0) {
      const double h = 0.5 * (t[i] - t[i - 1]);
      weighted_forcing += h * (std::exp(-v.values()[i]) * forcing.values()[i] +
                               std::exp(-v.values()[i - 1]) * forcing.values()[i - 1]);
    }
    const double lhs = running_sup + l1_part.integrals()[i];
    const double rhs = std::exp(v.values()[i]) * (n0 + weighted_forcing);
    const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
    if (ratio > rep.c_emp) {
      rep.c_emp = ratio;
      rep.worst_time = t[i];
    }
  }
  rep.v_final = v.values().back();
  return rep;
}

}  // namespace nemalab
