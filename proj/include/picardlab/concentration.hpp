#pragma once

#include <vector>

#include "picardlab/harmonics.hpp"
#include "picardlab/statistics.hpp"

namespace picardlab {

/// Equatorial band |cos theta| <= delta.
struct BandSpec {
  double delta;
  explicit BandSpec(double d);
};

namespace concentration {

/// Mass of Y_{n,k} outside the band: (1/2) int_{delta < |c| <= 1} v_{n,k}^2 dc.
double band_mass(const HarmonicIndex& idx, const BandSpec& band);

/// ceil(sqrt(n(n+1)(1 - delta^2))), the lowest weight of the concentration window.
int window_edge(int n, const BandSpec& band);

struct ScanRow {
  int n = 0;
  int k_edge = 0;
  double mass_edge = 0.0;        // band_mass(n, k_edge, 2 delta)
  double mass_top = 0.0;         // band_mass(n, n, 2 delta)
  double mass_edge_turn = 0.0;   // band_mass(n, k_edge, delta), at the turning point
};

struct ConcentrationScan {
  double delta = 0.0;
  std::vector<ScanRow> rows;
  LinearFit edge_fit;  // ln mass vs ln n, masses outside the doubled band
  LinearFit top_fit;
};

/// Window set by delta, masses measured outside 2 delta. Requires delta < 1/2;
/// throws when the window is empty for some n, or a mass underflows to zero.
ConcentrationScan concentration_scan(const BandSpec& band, const std::vector<int>& n_list, int threads = 1);

/// ((1/2) int |v_{n,k}|^p dc)^{1/p}; exact quadrature for even integer p,
/// otherwise refined until stable to 1e-6 relative.
double lp_norm(const HarmonicIndex& idx, double p);

}  // namespace concentration
}  // namespace picardlab
