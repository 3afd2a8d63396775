#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "isrs_egn/config.hpp"
#include "isrs_egn/fwm.hpp"
#include "isrs_egn/islands.hpp"
#include "isrs_egn/link.hpp"

namespace isrs_egn {

/// Y(f1, f2, f) with absolute frequencies; LinkFunction or a test stand-in.
using LinkFn = std::function<cplx(double f1_hz, double f2_hz, double f_hz)>;

/// Rectangular unit-energy spectrum: 1/sqrt(R) on |f| <= R/2.
double spectral_shape(double f_hz, double r_hz);

/// Channel placement: centre of channel kappa is origin + kappa * shift;
/// every channel is integrated over its own [-R/2, R/2].
struct ChannelGeometry {
  double symbol_rate_hz = 0.0;
  double shift_hz = 0.0;
  double origin_hz = 0.0;

  static ChannelGeometry from_config(const SystemConfig& config);
  double center(int kappa) const { return origin_hz + kappa * shift_hz; }
};

/// Grid points per channel for a requested resolution; rejects fewer than 2.
int grid_points(double symbol_rate_hz, double resolution_hz);

/// Quadrature of the D/E/F/G/H terms for one island on a uniform bin-centre
/// grid. Y is evaluated lazily and cached for the lifetime of the object.
class IslandQuadrature {
 public:
  IslandQuadrature(const Island& island, int kappa, const ChannelGeometry& geometry, const LinkFn& y,
                   double resolution_hz);

  double d();
  double e();
  double f();
  cplx g();
  double h();

  // Direct nested sums of the factorised terms, for testing.
  double e_direct();
  double f_direct();
  double h_direct();

  int points() const { return n_; }
  std::size_t y_evaluations() const { return evaluations_; }

 private:
  cplx y_at(int i, int j, int k);
  double local(int i) const { return -r_ / 2.0 + (i + 0.5) * step_; }
  double nu_local(int i, int j, int k) const { return local(i) + local(j) - local(k) - island_.l * geometry_.shift_hz; }
  double window1(int i, double offset) const;
  double window2(int i, int j, int k) const;
  double window3(int i, int j, int k) const;

  Island island_;
  int kappa_;
  ChannelGeometry geometry_;
  const LinkFn& y_;
  double r_;
  int n_;
  double step_;
  std::vector<cplx> cube_;
  std::vector<unsigned char> filled_;
  std::size_t evaluations_ = 0;
};

// Single-term entry points; each builds its own quadrature.
double d_term(const Island& island, int kappa, const SystemConfig& config, const LinkFn& y);
double e_term(const Island& island, int kappa, const SystemConfig& config, const LinkFn& y);
double f_term(const Island& island, int kappa, const SystemConfig& config, const LinkFn& y);
cplx g_term(const Island& island, int kappa, const SystemConfig& config, const LinkFn& y);
double h_term(const Island& island, int kappa, const SystemConfig& config, const LinkFn& y);

/// Weighted per-island contribution of each term (already multiplied by the
/// three channel powers and Phi / Psi).
struct TermContribution {
  double d = 0.0;
  double e = 0.0;
  double f = 0.0;
  cplx g = 0.0;
  double h = 0.0;

  cplx total() const { return d + e + f + g + h; }
  TermContribution& operator+=(const TermContribution& o);
};

struct NliReport {
  int coi = 0;
  double f_center_hz = 0.0;
  MuMethod method = MuMethod::segment;
  double sigma2_nli = 0.0;     // W^2
  double imag_residue = 0.0;   // |Im sigma2|
  double eta = 0.0;            // sigma2 / P_kappa^3, 1/W^2
  double eta_db = 0.0;
  std::array<TermContribution, 3> by_class{};  // indexed by NliClass
  std::array<std::size_t, 3> islands_by_class{};
  std::size_t islands = 0;
  double wall_time_s = 0.0;

  /// 10 log10 of the class share of eta, or nullopt when the class is absent
  /// or its share is not positive.
  std::optional<double> class_db(NliClass c) const;
};

/// Relative imaginary residue above which a variance is rejected.
inline constexpr double kMaxImagResidue = 1e-9;

/// Contribution of one island with its Kronecker gates applied.
TermContribution island_contribution(const Island& island, int kappa, const SystemConfig& config,
                                     const ChannelGeometry& geometry, const LinkFn& y);

NliReport nli_variance(int kappa, const SystemConfig& config, const LinkFn& y);
NliReport nli_variance(int kappa, const SystemConfig& config);

}  // namespace isrs_egn
