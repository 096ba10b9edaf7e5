#pragma once

#include <utility>
#include <vector>

#include "mbm/grid.hpp"

namespace mbm {

struct ScaleTable {
  std::vector<double> deltas;  // decreasing
  std::vector<long> counts;
};

struct DimEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double fit_r2 = 0.0;
  bool empty = false;  // level sets only: level never attained
  ScaleTable table;
};

// Box sizes 2^-coarse .. 2^-fine.
struct BoxScales {
  int coarse = 4;
  int fine = 10;
};

long box_count(const Samples& f, double a, double b, double delta);
DimEstimate est_boxdim_local(const Samples& f, double t, double rho = 0.1, const BoxScales& scales = {});

// Columns of width delta^(1/h_metric), cells of height delta.
long pbox_count(const Samples& f, double a, double b, double h_metric, double delta);
// Column widths from the window width down to `min_steps` sampling steps, `count` sizes.
DimEstimate est_pboxdim_local(const Samples& f, double t, double rho, double h_metric, int count = 8,
                              double min_steps = 4.0);

DimEstimate level_set_boxdim(const Samples& f, double level, double a, double b,
                             const BoxScales& scales = {});

double predict_boxdim_graph(double H_t, double dim_grH);
double predict_hausdim_graph(double H_t, double pdim_grH);
double predict_image_dim(double pdim_grHF);

struct Bounds {
  double lower;
  double upper;
};
Bounds parabolic_transfer_bounds(double d2, double H1, double H2);

struct FrontierDimBounds {
  double box_upper;
  double haus_upper;
};
FrontierDimBounds dim_bounds_from_frontier(double sigma_at_1, double sigma_at_inf);

// Slope of log N against -log delta with sliding 3-scale envelope.
DimEstimate fit_scale_table(const ScaleTable& table);

}  // namespace mbm
