// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "topoloss/annotation.hpp"
#include "topoloss/cli.hpp"
#include "topoloss/extract.hpp"
#include "topoloss/grid_io.hpp"
#include "topoloss/loss.hpp"
#include "topoloss/metrics.hpp"
#include "topoloss/oracle.hpp"
#include "topoloss/pair_weights.hpp"
#include "topoloss/synthetic.hpp"

using namespace topoloss;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kPairwiseRelTol = 1e-9;
constexpr double kOracleSeconds = 10.0;
constexpr double kGradRelTol = 1e-3;
constexpr float kGradEps = 1e-3f;
constexpr double kIdentityTol = 1e-9;
constexpr double kAplsPair = 0.9;
constexpr double kEndToEndQuality = 0.95;
constexpr double kPerfSeconds = 2.0;

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

ScalarGrid noisy(const ScalarGrid& base, std::uint64_t seed, float amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> noise(-amplitude, amplitude);
  ScalarGrid out = base;
  for (auto& v : out.values()) v += noise(rng);
  return out;
}

bool all_zero(const ScalarGrid& g) {
  return std::all_of(g.values().begin(), g.values().end(), [](float v) { return v == 0.0f; });
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

void oracle_equivalence() {
  const auto t0 = Clock::now();
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = oracle::random_instance(seed);
    const auto fast = compute_pair_weights(inst.pred, inst.labels, inst.region);
    const auto slow = oracle::bruteforce_pair_weights(inst.pred, inst.labels, inst.region);
    const auto pairs =
        oracle::bruteforce_pairwise_losses(inst.pred, inst.target, inst.labels, inst.region);
    const bool ok = fast.w == slow.w && fast.v == slow.v &&
                    rel_close(loss_dis(inst.pred, fast).value, pairs.dis, kPairwiseRelTol) &&
                    rel_close(loss_conn(inst.pred, inst.target, fast).value, pairs.conn,
                              kPairwiseRelTol);
    mismatches += !ok;
  }
  const double secs = seconds_since(t0);
  report("oracle_equivalence", mismatches == 0 && secs < kOracleSeconds,
         "200 instances, mismatches=" + std::to_string(mismatches) +
             ", seconds=" + cli::format_double(secs));
}

void gap_fixture() {
  const ScalarGrid pred(5, 1, std::vector<float>{5, 5, 3, 5, 5});
  const LabelGrid labels{Grid<std::int32_t>(5, 1, std::vector<std::int32_t>{1, 1, 0, 2, 2}), 2};
  BinaryMask region(5, 1);
  region[2] = 1;
  const auto pw = compute_pair_weights(pred, labels, region);
  const auto dis = loss_dis(pred, pw);
  const bool ok = pw.w[2] == 4 && dis.value == 36.0 && dis.grad[2] == 24.0f;
  report("fixture_1x5", ok,
         "w[2]=" + std::to_string(pw.w[2]) + ", L_dis=" + cli::format_double(dis.value) +
             ", grad[2]=" + cli::format_double(dis.grad[2]));
}

void gradient_check() {
  double worst = 0.0;
  std::size_t short_instances = 0;
  LossConfig cfg;
  cfg.alpha = 1.0f;
  cfg.window = 16;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto gt = build_ground_truth(synthetic::border_polyline(seed, 16, 16), 16, 16);
    const auto pred = noisy(gt.dist, seed, 3.0f);
    const auto rep = grad_check(pred, gt, cfg, kGradEps, 50, seed);
    worst = std::max(worst, rep.max_rel_err);
    short_instances += rep.checked != 50;
  }
  report("gradient_check", worst <= kGradRelTol && short_instances == 0,
         "20 instances x 50 pixels, max_rel_err=" + cli::format_double(worst) +
             ", instances_with_fewer_pixels=" + std::to_string(short_instances));
}

void zero_at_ground_truth() {
  int nonzero = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto gt = build_ground_truth(synthetic::road_lattice(seed, 192, 160), 192, 160);
    LossConfig cfg;
    cfg.alpha = 1.0f;
    cfg.threads = 0;
    const auto r = total_loss(gt.dist, gt, cfg);
    nonzero += !(r.total == 0.0 && all_zero(r.grad));
  }
  report("zero_at_ground_truth", nonzero == 0,
         "20 graphs, nonzero=" + std::to_string(nonzero));
}

void weight_bound() {
  std::size_t windows = 0, violations = 0;
  double worst_ratio = 0.0;
  auto sweep = [&](const ScalarGrid& pred, const LabelGrid& labels, const BinaryMask& region,
                   std::uint32_t win) {
    for (const auto& spec : tile(pred.width(), pred.height(), win)) {
      const auto pw =
          compute_pair_weights(crop(pred, spec), crop(labels, spec), crop(region, spec));
      const double n = double(spec.area());
      const auto max_w = *std::max_element(pw.w.values().begin(), pw.w.values().end());
      worst_ratio = std::max(worst_ratio, double(max_w) / (n * n / 4.0));
      violations += double(max_w) > n * n / 4.0;
      ++windows;
    }
  };
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = oracle::random_instance(seed);
    const auto side = std::max(inst.pred.width(), inst.pred.height());
    for (std::uint32_t win = 2; win <= std::max<std::uint32_t>(side, 2); ++win)
      sweep(inst.pred, inst.labels, inst.region, win);
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto gt = build_ground_truth(synthetic::border_polyline(seed, 16, 16), 16, 16);
    const auto pred = noisy(gt.dist, seed, 3.0f);
    for (std::uint32_t win : {2u, 4u, 8u, 16u}) sweep(pred, gt.labels, gt.region, win);
  }
  report("weight_bound", violations == 0,
         "windows=" + std::to_string(windows) + ", violations=" + std::to_string(violations) +
             ", max w/(N^2/4)=" + cli::format_double(worst_ratio));
}

void gap_closing() {
  constexpr std::uint32_t kSize = 128, kWin = 64;
  GeoGraph road;
  road.add_node(0, {0, 40});
  road.add_node(1, {kSize - 1, 40});
  road.add_edge(0, 1);
  const auto gt = build_ground_truth(road, kSize, kSize);

  // prediction: distance map of the centerline with three pixels missing
  auto centerline = rasterize(road, kSize, kSize);
  const std::uint32_t gap_x[] = {30, 31, 32};
  for (auto x : gap_x) centerline(x, 40) = 0;
  auto pred = distance_transform(centerline);
  for (auto& v : pred.values()) v = std::min(v, gt.dmax);

  LossConfig cfg;
  cfg.window = kWin;
  const auto pw = loss_pair_weights(pred, gt, cfg);
  const auto dis = loss_dis(pred, pw);
  const WindowSpec gap_win{0, 0, kWin, kWin};
  bool confined = true;
  std::size_t support = 0;
  for (std::uint32_t y = 0; y < kSize; ++y)
    for (std::uint32_t x = 0; x < kSize; ++x) {
      if (dis.grad(x, y) == 0.0f) continue;
      ++support;
      confined &= x < kWin && y < kWin;
    }

  ScalarGrid closed = pred;
  for (auto x : gap_x) closed(x, 40) = 0.0f;
  const auto local = compute_pair_weights(crop(closed, gap_win), crop(gt.labels, gap_win),
                                          crop(gt.region, gap_win));
  const double after = loss_dis(crop(closed, gap_win), local).value;
  report("gap_closing", dis.value > 0.0 && support > 0 && confined && after == 0.0,
         "L_dis=" + cli::format_double(dis.value) + ", support=" + std::to_string(support) +
             (confined ? " inside" : " outside") +
             " the gap window, L_dis after closing=" + cli::format_double(after));
}

void metric_identities() {
  const MetricConfig cfg;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = synthetic::road_lattice(seed, 256, 256);
    const auto r = evaluate(g, g, 256, 256, cfg);
    for (double v : {r.apls, r.tlts, r.jct.f1, r.hm.f1, r.ccq.quality})
      worst = std::max(worst, std::abs(v - 1.0));
  }
  GeoGraph line, shifted;
  line.add_node(0, {20, 50});
  line.add_node(1, {80, 50});
  line.add_edge(0, 1);
  shifted.add_node(0, {20, 56});
  shifted.add_node(1, {80, 56});
  shifted.add_edge(0, 1);
  const double shifted_q = ccq(shifted, line, 100, 100, cfg.buffer).quality;
  report("metric_identities", worst <= kIdentityTol && shifted_q == 0.0,
         "20 graphs, max |score-1|=" + cli::format_double(worst) +
             ", ccq quality at 6 px shift=" + cli::format_double(shifted_q));
}

void apls_fixture() {
  MetricConfig cfg;
  cfg.densify = 0.0;
  GeoGraph gt, pred;
  gt.add_node(0, {0, 0});
  gt.add_node(1, {100, 0});
  gt.add_edge(0, 1);
  // same endpoints, through an apex that makes the path 110 long
  pred.add_node(0, {0, 0});
  pred.add_node(1, {100, 0});
  pred.add_node(2, {50, std::sqrt(55.0 * 55.0 - 50.0 * 50.0)});
  pred.add_edge(0, 2);
  pred.add_edge(2, 1);
  const double formula = apls_pair_contribution(100.0, 110.0);
  const auto sampled = apls_one_way(gt, pred, cfg);
  const bool ok = rel_close(formula, kAplsPair, 1e-12) && sampled &&
                  rel_close(*sampled, kAplsPair, 1e-12);
  report("apls_fixture", ok,
         "contribution=" + cli::format_double(formula) +
             ", sampled=" + (sampled ? cli::format_double(*sampled) : std::string("none")));
}

void end_to_end() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("topoloss_acceptance_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  auto path = [&](const char* name) { return (dir / name).string(); };
  auto run = [](std::vector<std::string> args, std::string& out) {
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    out = o.str() + e.str();
    return code;
  };

  std::string detail;
  bool ok = false;
  try {
    save_graph(path("gt.txt"), synthetic::regular_grid(256, 256, 4));
    std::string out;
    ok = run({"gengt", "--graph", path("gt.txt"), "--width", "256", "--height", "256",
              "--out-dist", path("dist.grd")},
             out) == 0;
    const auto dist = load_grid(path("dist.grd"));
    save_grid(path("noisy.grd"), noisy(dist, 1, 4.0f));
    ok &= run({"loss", "--pred", path("noisy.grd"), "--gt-graph", path("gt.txt")}, out) == 0;
    const auto perturbed_total = key_values(out)["total"];
    ok &= run({"loss", "--pred", path("dist.grd"), "--gt-graph", path("gt.txt")}, out) == 0;
    const auto exact_total = key_values(out)["total"];
    ok &= run({"extract", "--pred", path("dist.grd"), "--out", path("pred.txt")}, out) == 0;
    ok &= run({"eval", "--pred-graph", path("pred.txt"), "--gt-graph", path("gt.txt"), "--width",
               "256", "--height", "256"},
              out) == 0;
    auto kv = key_values(out);
    const double quality = std::stod(kv["ccq_quality"]);
    ok &= exact_total == "0" && std::stod(perturbed_total) > 0.0 && quality >= kEndToEndQuality;
    detail = "loss perturbed=" + perturbed_total + " exact=" + exact_total +
             ", quality=" + kv["ccq_quality"] + ", apls=" + kv["apls"] + ", tlts=" + kv["tlts"];
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  std::filesystem::remove_all(dir);
  report("end_to_end", ok, detail);
}

void performance() {
  const auto gt = build_ground_truth(synthetic::road_lattice(11, 1024, 1024), 1024, 1024);
  const auto pred = noisy(gt.dist, 11, 6.0f);
  LossConfig cfg;
  cfg.window = 64;
  cfg.threads = 1;
  const auto t0 = Clock::now();
  const auto ref = total_loss(pred, gt, cfg);
  const double secs = seconds_since(t0);
  bool deterministic = true;
  for (unsigned t : {2u, 4u, 0u}) {
    cfg.threads = t;
    const auto r = total_loss(pred, gt, cfg);
    deterministic &= r.total == ref.total && r.grad == ref.grad;
  }
  report("performance", secs < kPerfSeconds && deterministic,
         "1024x1024 window 64 single worker seconds=" + cli::format_double(secs) +
             (deterministic ? ", identical" : ", differs") + " across worker counts");
}

}  // namespace

int main() {
  oracle_equivalence();
  gap_fixture();
  gradient_check();
  zero_at_ground_truth();
  weight_bound();
  gap_closing();
  metric_identities();
  apls_fixture();
  end_to_end();
  performance();
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
