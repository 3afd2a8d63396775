#include "isrs_egn/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "isrs_egn/errors.hpp"
#include "isrs_egn/scheduler.hpp"

namespace isrs_egn {

namespace {

constexpr double kD = 16.0 / 27.0;
constexpr double kE = 16.0 / 27.0;
constexpr double kF = 32.0 / 81.0;
constexpr double kG = 16.0 / 81.0;
constexpr double kH = 16.0 / 81.0;

// CDF of the sum of two U(0,1) variables.
double triangular_cdf(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 2.0) return 1.0;
  if (t <= 1.0) return t * t / 2.0;
  const double u = 2.0 - t;
  return 1.0 - u * u / 2.0;
}

// CDF of the sum of three U(0,1) variables.
double irwin_hall3_cdf(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 3.0) return 1.0;
  if (t <= 1.0) return t * t * t / 6.0;
  if (t <= 2.0) return (-2.0 * t * t * t + 9.0 * t * t - 9.0 * t + 3.0) / 6.0;
  const double u = 3.0 - t;
  return 1.0 - u * u * u / 6.0;
}

}  // namespace

double spectral_shape(double f_hz, double r_hz) { return std::abs(f_hz) <= r_hz / 2.0 ? 1.0 / std::sqrt(r_hz) : 0.0; }

ChannelGeometry ChannelGeometry::from_config(const SystemConfig& config) {
  return {config.grid.symbol_rate_hz, config.channel_center_hz(1), 0.0};
}

int grid_points(double symbol_rate_hz, double resolution_hz) {
  const long long n = std::llround(symbol_rate_hz / resolution_hz);
  if (n < 2) {
    std::ostringstream msg;
    msg << "resolution " << resolution_hz << " Hz gives fewer than 2 grid points per channel";
    throw ConfigError(msg.str());
  }
  return static_cast<int>(n);
}

IslandQuadrature::IslandQuadrature(const Island& island, int kappa, const ChannelGeometry& geometry, const LinkFn& y,
                                   double resolution_hz)
    : island_(island),
      kappa_(kappa),
      geometry_(geometry),
      y_(y),
      r_(geometry.symbol_rate_hz),
      n_(grid_points(geometry.symbol_rate_hz, resolution_hz)),
      step_(r_ / n_) {
  const auto cells = static_cast<std::size_t>(n_) * n_ * n_;
  cube_.assign(cells, cplx{});
  filled_.assign(cells, 0);
}

cplx IslandQuadrature::y_at(int i, int j, int k) {
  const std::size_t idx = (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  if (!filled_[idx]) {
    cube_[idx] = y_(geometry_.center(island_.kappa1) + local(i), geometry_.center(island_.kappa2) + local(j),
                    geometry_.center(kappa_) + local(k));
    filled_[idx] = 1;
    ++evaluations_;
  }
  return cube_[idx];
}

double IslandQuadrature::window1(int i, double offset) const {
  const double lo = std::max(local(i) - step_ / 2.0, -r_ / 2.0 - offset);
  const double hi = std::min(local(i) + step_ / 2.0, r_ / 2.0 - offset);
  return hi > lo ? (hi - lo) / step_ : 0.0;
}

double IslandQuadrature::window2(int i, int j, int k) const {
  const double nu = nu_local(i, j, k);
  return triangular_cdf((r_ / 2.0 - nu) / step_ + 1.0) - triangular_cdf((-r_ / 2.0 - nu) / step_ + 1.0);
}

double IslandQuadrature::window3(int i, int j, int k) const {
  const double nu = nu_local(i, j, k);
  return irwin_hall3_cdf((r_ / 2.0 - nu) / step_ + 1.5) - irwin_hall3_cdf((-r_ / 2.0 - nu) / step_ + 1.5);
}

double IslandQuadrature::d() {
  double sum = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k < n_; ++k) {
        const double w = window3(i, j, k);
        if (w > 0.0) sum += w * std::norm(y_at(i, j, k));
      }
    }
  }
  return kD * r_ * r_ * step_ * step_ * step_ * sum / (r_ * r_ * r_);
}

double IslandQuadrature::e() {
  double sum = 0.0;
  for (int k = 0; k < n_; ++k) {
    for (int j = 0; j < n_; ++j) {
      const double offset = local(j) - local(k) - island_.l * geometry_.shift_hz;
      cplx b = 0.0;
      for (int i = 0; i < n_; ++i) {
        const double w = window1(i, offset);
        if (w > 0.0) b += w * y_at(i, j, k);
      }
      b *= step_ / r_;
      sum += std::norm(b) / r_;
    }
  }
  return kE * r_ * step_ * step_ * sum;
}

double IslandQuadrature::f() {
  double sum = 0.0;
  for (int k = 0; k < n_; ++k) {
    for (int i = 0; i < n_; ++i) {
      const double offset = local(i) - local(k) - island_.l * geometry_.shift_hz;
      cplx c = 0.0;
      for (int j = 0; j < n_; ++j) {
        const double w = window1(j, offset);
        if (w > 0.0) c += w * y_at(i, j, k);
      }
      c *= step_ / r_;
      sum += std::norm(c) / r_;
    }
  }
  return kF * r_ * step_ * step_ * sum;
}

cplx IslandQuadrature::g() {
  // conj_sum[s][k] = sum over i' of conj(Y(i', s - i', k)), s = i + j.
  const int sums = 2 * n_ - 1;
  std::vector<cplx> conj_sum(static_cast<std::size_t>(sums) * n_, cplx{});
  for (int s = 0; s < sums; ++s) {
    for (int k = 0; k < n_; ++k) {
      cplx acc = 0.0;
      for (int ip = std::max(0, s - n_ + 1); ip <= std::min(n_ - 1, s); ++ip) acc += std::conj(y_at(ip, s - ip, k));
      conj_sum[static_cast<std::size_t>(s) * n_ + k] = acc;
    }
  }
  cplx sum = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k < n_; ++k) {
        const double w = window3(i, j, k);
        if (w > 0.0) sum += w * y_at(i, j, k) * conj_sum[static_cast<std::size_t>(i + j) * n_ + k];
      }
    }
  }
  const double h4 = step_ * step_ * step_ * step_;
  return kG * r_ * h4 * sum / (r_ * r_ * r_);
}

double IslandQuadrature::h() {
  double sum = 0.0;
  for (int k = 0; k < n_; ++k) {
    cplx w_k = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const double w = window2(i, j, k);
        if (w > 0.0) w_k += w * y_at(i, j, k);
      }
    }
    w_k *= step_ * step_ / (r_ * std::sqrt(r_));
    sum += std::norm(w_k);
  }
  return kH * step_ * sum;
}

double IslandQuadrature::e_direct() {
  double sum = 0.0;
  for (int k = 0; k < n_; ++k) {
    for (int j = 0; j < n_; ++j) {
      const double offset = local(j) - local(k) - island_.l * geometry_.shift_hz;
      for (int i = 0; i < n_; ++i) {
        for (int ip = 0; ip < n_; ++ip) {
          const double w = window1(i, offset) * window1(ip, offset);
          if (w > 0.0) sum += w * (y_at(i, j, k) * std::conj(y_at(ip, j, k))).real() / (r_ * r_ * r_);
        }
      }
    }
  }
  return kE * r_ * step_ * step_ * step_ * step_ * sum;
}

double IslandQuadrature::f_direct() {
  double sum = 0.0;
  for (int k = 0; k < n_; ++k) {
    for (int i = 0; i < n_; ++i) {
      const double offset = local(i) - local(k) - island_.l * geometry_.shift_hz;
      for (int j = 0; j < n_; ++j) {
        for (int jp = 0; jp < n_; ++jp) {
          const double w = window1(j, offset) * window1(jp, offset);
          if (w > 0.0) sum += w * (y_at(i, j, k) * std::conj(y_at(i, jp, k))).real() / (r_ * r_ * r_);
        }
      }
    }
  }
  return kF * r_ * step_ * step_ * step_ * step_ * sum;
}

double IslandQuadrature::h_direct() {
  double sum = 0.0;
  for (int k = 0; k < n_; ++k) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        for (int ip = 0; ip < n_; ++ip) {
          for (int jp = 0; jp < n_; ++jp) {
            const double w = window2(i, j, k) * window2(ip, jp, k);
            if (w > 0.0) sum += w * (y_at(i, j, k) * std::conj(y_at(ip, jp, k))).real() / (r_ * r_ * r_);
          }
        }
      }
    }
  }
  const double h5 = step_ * step_ * step_ * step_ * step_;
  return kH * h5 * sum;
}

double d_term(const Island& island, int kappa, const SystemConfig& config, const LinkFn& y) {
  return IslandQuadrature(island, kappa, ChannelGeometry::from_config(config), y, config.numerics.resolution_hz).d();
}

double e_term(const Island& island, int kappa, const SystemConfig& config, const LinkFn& y) {
  return IslandQuadrature(island, kappa, ChannelGeometry::from_config(config), y, config.numerics.resolution_hz).e();
}

double f_term(const Island& island, int kappa, const SystemConfig& config, const LinkFn& y) {
  return IslandQuadrature(island, kappa, ChannelGeometry::from_config(config), y, config.numerics.resolution_hz).f();
}

cplx g_term(const Island& island, int kappa, const SystemConfig& config, const LinkFn& y) {
  return IslandQuadrature(island, kappa, ChannelGeometry::from_config(config), y, config.numerics.g_resolution_hz)
      .g();
}

double h_term(const Island& island, int kappa, const SystemConfig& config, const LinkFn& y) {
  return IslandQuadrature(island, kappa, ChannelGeometry::from_config(config), y, config.numerics.resolution_hz).h();
}

TermContribution& TermContribution::operator+=(const TermContribution& o) {
  d += o.d;
  e += o.e;
  f += o.f;
  g += o.g;
  h += o.h;
  return *this;
}

std::optional<double> NliReport::class_db(NliClass c) const {
  const auto idx = static_cast<std::size_t>(c);
  if (islands_by_class[idx] == 0) return std::nullopt;
  const double share = by_class[idx].total().real();
  if (!(share > 0.0) || !(sigma2_nli > 0.0)) return std::nullopt;
  return 10.0 * std::log10(eta * share / sigma2_nli);
}

TermContribution island_contribution(const Island& island, int kappa, const SystemConfig& config,
                                     const ChannelGeometry& geometry, const LinkFn& y) {
  const auto& grid = config.grid;
  const auto& num = config.numerics;
  const double phi = config.modulation.phi;
  const double psi = config.modulation.psi;
  const double p = grid.power(island.kappa1) * grid.power(island.kappa2) * grid.power(island.kappa3(kappa));

  IslandQuadrature quad(island, kappa, geometry, y, num.resolution_hz);
  TermContribution c;
  c.d = p * quad.d();
  const bool gate_e = island.kappa2 - kappa + island.l == 0;
  const bool gate_f = island.kappa1 - kappa + island.l == 0;
  const bool gate_g = island.kappa1 == island.kappa2;
  if (phi != 0.0) {
    if (gate_e) c.e = p * phi * quad.e();
    if (gate_f) c.f = p * phi * quad.f();
    if (gate_g) {
      if (grid_points(geometry.symbol_rate_hz, num.g_resolution_hz) == quad.points()) {
        c.g = p * phi * quad.g();
      } else {
        c.g = p * phi * IslandQuadrature(island, kappa, geometry, y, num.g_resolution_hz).g();
      }
    }
  }
  if (psi != 0.0 && gate_g && gate_f) c.h = p * psi * quad.h();
  return c;
}

NliReport nli_variance(int kappa, const SystemConfig& config, const LinkFn& y) {
  const auto start = std::chrono::steady_clock::now();
  const int m = config.grid.m;
  if (std::abs(kappa) > m) throw ConfigError("COI index " + std::to_string(kappa) + " outside the channel grid");
  const auto islands = enumerate_islands(m, kappa);
  const ChannelGeometry geometry = ChannelGeometry::from_config(config);
  const int chunk = resolve_chunk_size(config.numerics.chunk_size, config.numerics.mu_method);

  const auto parts = parallel_map<TermContribution>(islands.size(), config.numerics.workers, chunk, [&](std::size_t i) {
    try {
      return island_contribution(islands[i], kappa, config, geometry, y);
    } catch (const IslandError&) {
      throw;
    } catch (const std::exception& e) {
      throw IslandError(islands[i], e.what());
    }
  });

  NliReport r;
  r.coi = kappa;
  r.f_center_hz = config.channel_center_hz(kappa);
  r.method = config.numerics.mu_method;
  r.islands = islands.size();
  cplx total = 0.0;
  for (std::size_t i = 0; i < islands.size(); ++i) {
    const auto cls = static_cast<std::size_t>(islands[i].nli_class);
    total += parts[i].total();
    r.by_class[cls] += parts[i];
    ++r.islands_by_class[cls];
  }
  r.sigma2_nli = total.real();
  r.imag_residue = std::abs(total.imag());
  if (!(r.sigma2_nli > 0.0) || !std::isfinite(r.sigma2_nli)) {
    std::ostringstream msg;
    msg << "NLI variance for channel " << kappa << " is not positive (" << r.sigma2_nli << ")";
    throw NumericError(msg.str());
  }
  if (r.imag_residue / r.sigma2_nli >= kMaxImagResidue) {
    std::ostringstream msg;
    msg << "NLI variance for channel " << kappa << " has imaginary residue " << r.imag_residue / r.sigma2_nli
        << " relative";
    throw NumericError(msg.str());
  }
  const double pk = config.grid.power(kappa);
  r.eta = r.sigma2_nli / (pk * pk * pk);
  r.eta_db = 10.0 * std::log10(r.eta);
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

NliReport nli_variance(int kappa, const SystemConfig& config) {
  const LinkFunction link(SpanChain::from_config(config), config.numerics);
  return nli_variance(kappa, config, [&link](double f1, double f2, double f) { return link(f1, f2, f); });
}

}  // namespace isrs_egn
