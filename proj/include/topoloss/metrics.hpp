#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "topoloss/geo_graph.hpp"

namespace topoloss {

struct MetricConfig {
  std::uint64_t seed = 17;
  std::size_t samples = 500;
  double buffer = 5.0;        // CCQ co-occurrence distance
  double snap_radius = 15.0;  // APLS/TLTS/JCT/HM correspondence radius
  double rel_tol = 0.05;      // TLTS relative length tolerance
  double hm_radius = 15.0;    // HM marker spacing and matching radius
  double hm_budget = 8.0;     // HM travel budget, in units of hm_radius
  double densify = 50.0;      // APLS/TLTS control-point spacing; 0 disables

  void validate() const;
};

struct CcqScore {
  double correctness = 0.0;
  double completeness = 0.0;
  double quality = 0.0;
};

struct JunctionScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

struct HolesMarblesScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  double apls = 0.0;
  double tlts = 0.0;
  JunctionScore jct;
  HolesMarblesScore hm;
  CcqScore ccq;
};

double harmonic_mean(double a, double b) noexcept;

CcqScore ccq(const GeoGraph& pred, const GeoGraph& gt, std::uint32_t width, std::uint32_t height,
             double buffer);

/// Dijkstra over edge polyline lengths; nullopt when b is unreachable.
std::optional<double> shortest_path_length(const GeoGraph& graph, NodeId a, NodeId b);

/// Score of one sampled path: 1 - min(1, |L_ref - L_other| / L_ref), and 0
/// when the other path is missing.
double apls_pair_contribution(double reference_length, std::optional<double> other_length);

/// Mean path-pair score with control points drawn from `from` and matched
/// into `to`; nullopt when `from` has no connected pair of control points.
std::optional<double> apls_one_way(const GeoGraph& from, const GeoGraph& to,
                                   const MetricConfig& cfg);

/// Mean of the gt->pred and pred->gt passes.
double apls(const GeoGraph& pred, const GeoGraph& gt, const MetricConfig& cfg);

/// Fraction of gt control-point pairs whose pred path length is within
/// rel_tol of the gt length.
double tlts(const GeoGraph& pred, const GeoGraph& gt, const MetricConfig& cfg);

JunctionScore jct(const GeoGraph& pred, const GeoGraph& gt, const MetricConfig& cfg);

HolesMarblesScore holes_marbles(const GeoGraph& pred, const GeoGraph& gt, const MetricConfig& cfg);

MetricReport evaluate(const GeoGraph& pred, const GeoGraph& gt, std::uint32_t width,
                      std::uint32_t height, const MetricConfig& cfg);

}  // namespace topoloss
