#include "topoloss/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <random>

#include "topoloss/annotation.hpp"
#include "topoloss/error.hpp"
#include "topoloss/extract.hpp"
#include "topoloss/grid_io.hpp"
#include "topoloss/loss.hpp"
#include "topoloss/metrics.hpp"
#include "topoloss/oracle.hpp"
#include "topoloss/pair_weights.hpp"
#include "topoloss/synthetic.hpp"

namespace topoloss::cli {

namespace {

struct Check {
  std::ostream& out;
  int failures = 0;

  void operator()(bool ok, const std::string& what) {
    if (ok) return;
    ++failures;
    out << "FAIL " << what << '\n';
  }
};

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return a == b ? 0.0 : std::abs(a - b) / scale;
}

void selftest_oracle(Check& check, int seeds) {
  for (int s = 0; s < seeds; ++s) {
    const auto inst = oracle::random_instance(std::uint64_t(s));
    const auto fast = compute_pair_weights(inst.pred, inst.labels, inst.region);
    const auto slow = oracle::bruteforce_pair_weights(inst.pred, inst.labels, inst.region);
    const std::string tag = "seed " + std::to_string(s);
    check(fast.w == slow.w, tag + ": w differs from brute force");
    check(fast.v == slow.v, tag + ": v differs from brute force");
    const auto pairs = oracle::bruteforce_pairwise_losses(inst.pred, inst.target, inst.labels, inst.region);
    check(rel_diff(loss_dis(inst.pred, fast).value, pairs.dis) <= 1e-9, tag + ": dis differs from pair sum");
    check(rel_diff(loss_conn(inst.pred, inst.target, fast).value, pairs.conn) <= 1e-9,
          tag + ": conn differs from pair sum");
  }
}

void selftest_fixture(Check& check) {
  const ScalarGrid pred(5, 1, std::vector<float>{5, 5, 3, 5, 5});
  BinaryMask region(5, 1);
  region[2] = 1;
  const LabelGrid labels{Grid<std::int32_t>(5, 1, std::vector<std::int32_t>{1, 1, 0, 2, 2}), 2};
  const auto pw = compute_pair_weights(pred, labels, region);
  const auto dis = loss_dis(pred, pw);
  check(pw.w[2] == 4, "1x5 fixture: w[2] != 4");
  check(dis.value == 36.0, "1x5 fixture: dis != 36");
  check(dis.grad[2] == 24.0f, "1x5 fixture: gradient != 24");
}

void selftest_ground_truth(Check& check, int seeds) {
  for (int s = 0; s < seeds; ++s) {
    const auto graph = synthetic::road_lattice(std::uint64_t(s), 96, 96);
    const auto gt = build_ground_truth(graph, 96, 96);
    const auto r = total_loss(gt.dist, gt, LossConfig{});
    const bool flat = std::all_of(r.grad.values().begin(), r.grad.values().end(),
                                  [](float g) { return g == 0.0f; });
    check(r.total == 0.0 && flat, "lattice " + std::to_string(s) + ": loss not zero at ground truth");
    for (std::size_t i = 0; i < gt.region.size(); ++i) {
      if ((gt.labels[i] == 0) != (gt.region[i] != 0)) {
        check(false, "lattice " + std::to_string(s) + ": labels disagree with region");
        break;
      }
    }
  }
}

void selftest_gradient(Check& check, int seeds) {
  for (int s = 0; s < seeds; ++s) {
    const auto graph = synthetic::border_polyline(std::uint64_t(s), 24, 24);
    const auto gt = build_ground_truth(graph, 24, 24);
    std::mt19937_64 rng(std::uint64_t(s) + 1000);
    std::uniform_real_distribution<float> noise(-3.0f, 3.0f);
    ScalarGrid pred = gt.dist;
    for (auto& p : pred.values()) p += noise(rng);
    LossConfig cfg;
    cfg.window = 16;
    const auto rep = grad_check(pred, gt, cfg, 1e-3f, 20, std::uint64_t(s));
    check(rep.checked > 0 && rep.max_rel_err <= 1e-3,
          "gradcheck " + std::to_string(s) + ": max_rel_err " + format_double(rep.max_rel_err));
  }
}

// CLI11 expects arguments in reverse order.
void parse(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<std::string> rev(args.rbegin(), args.rend());
  app.parse(rev);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Connectivity-aware loss, graph extraction and road-network metrics", "topoloss"};
  app.require_subcommand(1);

  std::string graph_path, pred_path, gt_graph_path, pred_graph_path, out_path;
  std::string out_dist, out_region, out_labels, out_grad, json_path;
  std::uint32_t width = 0, height = 0;
  int dilate_radius = kDefaultDilateRadius;
  float dmax = kDefaultDmax;
  LossConfig loss_cfg;
  loss_cfg.threads = 0;
  bool global = false;
  float eps = 1e-3f;
  std::size_t gc_samples = 100;
  std::uint64_t seed = 17;
  float tau = kDefaultThreshold;
  double min_spur = kDefaultMinSpur;
  MetricConfig metric_cfg;
  int seeds = 200;

  auto* gengt = app.add_subcommand("gengt", "Rasterize a graph into region, labels and distance map");
  gengt->add_option("--graph", graph_path)->required();
  gengt->add_option("--width", width)->required();
  gengt->add_option("--height", height)->required();
  gengt->add_option("--dilate", dilate_radius)->capture_default_str();
  gengt->add_option("--dmax", dmax)->capture_default_str();
  gengt->add_option("--out-dist", out_dist)->required();
  gengt->add_option("--out-region", out_region);
  gengt->add_option("--out-labels", out_labels);

  auto add_loss_flags = [&](CLI::App* sub) {
    sub->add_option("--pred", pred_path)->required();
    sub->add_option("--gt-graph", gt_graph_path)->required();
    sub->add_option("--alpha", loss_cfg.alpha)->capture_default_str();
    sub->add_option("--beta", loss_cfg.beta)->capture_default_str();
    auto* win = sub->add_option("--window", loss_cfg.window)->capture_default_str();
    sub->add_flag("--global", global)->excludes(win);
    sub->add_option("--dilate", dilate_radius)->capture_default_str();
    sub->add_option("--dmax", dmax)->capture_default_str();
    sub->add_option("--threads", loss_cfg.threads, "0 = hardware count")->capture_default_str();
  };
  auto* loss = app.add_subcommand("loss", "Evaluate the loss of a prediction against a graph");
  add_loss_flags(loss);
  loss->add_option("--out-grad", out_grad);

  auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic and numeric gradients");
  add_loss_flags(gradcheck);
  gradcheck->add_option("--eps", eps)->capture_default_str();
  gradcheck->add_option("--samples", gc_samples)->capture_default_str();
  gradcheck->add_option("--seed", seed)->capture_default_str();

  auto* extract = app.add_subcommand("extract", "Extract a road graph from a predicted distance map");
  extract->add_option("--pred", pred_path)->required();
  extract->add_option("--tau", tau)->capture_default_str();
  extract->add_option("--min-spur", min_spur)->capture_default_str();
  extract->add_option("--out", out_path)->required();

  auto* eval = app.add_subcommand("eval", "Score a predicted graph against a reference graph");
  eval->add_option("--pred-graph", pred_graph_path)->required();
  eval->add_option("--gt-graph", gt_graph_path)->required();
  eval->add_option("--width", width)->required();
  eval->add_option("--height", height)->required();
  eval->add_option("--seed", metric_cfg.seed)->capture_default_str();
  eval->add_option("--samples", metric_cfg.samples)->capture_default_str();
  eval->add_option("--buffer", metric_cfg.buffer)->capture_default_str();
  eval->add_option("--snap", metric_cfg.snap_radius)->capture_default_str();
  eval->add_option("--tol", metric_cfg.rel_tol)->capture_default_str();
  eval->add_option("--hm-radius", metric_cfg.hm_radius)->capture_default_str();
  eval->add_option("--hm-budget", metric_cfg.hm_budget)->capture_default_str();
  eval->add_option("--densify", metric_cfg.densify)->capture_default_str();
  eval->add_option("--json", json_path);

  auto* selftest = app.add_subcommand("selftest", "Brute-force oracle and invariant checks");
  selftest->add_option("--seeds", seeds)->capture_default_str()->check(CLI::PositiveNumber);

  try {
    parse(app, args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*gengt) {
      const auto gt = build_ground_truth(load_graph(graph_path), width, height, dilate_radius, dmax);
      save_grid(out_dist, gt.dist);
      if (!out_region.empty()) save_mask(out_region, gt.region);
      if (!out_labels.empty()) {
        ScalarGrid ids(gt.width(), gt.height());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = float(gt.labels[i]);
        save_grid(out_labels, ids);
      }
      out << "width=" << gt.width() << "\nheight=" << gt.height()
          << "\ncomponents=" << gt.labels.count << '\n';
      return kOk;
    }

    if (*loss || *gradcheck) {
      loss_cfg.mode = global ? LossMode::global : LossMode::windowed;
      loss_cfg.dmax = dmax;
      loss_cfg.validate();
      const auto pred = load_grid(pred_path);
      for (float v : pred.values())
        if (!std::isfinite(v)) throw FormatError(pred_path + ": prediction contains non-finite values");
      const auto gt = build_ground_truth(load_graph(gt_graph_path), pred.width(), pred.height(),
                                         dilate_radius, dmax);
      if (*loss) {
        const auto r = total_loss(pred, gt, loss_cfg);
        out << "mse=" << format_double(r.mse) << "\ndis=" << format_double(r.dis)
            << "\nconn=" << format_double(r.conn) << "\ntotal=" << format_double(r.total) << '\n';
        if (!out_grad.empty()) save_grid(out_grad, r.grad);
        return kOk;
      }
      const auto rep = grad_check(pred, gt, loss_cfg, eps, gc_samples, seed);
      out << "max_rel_err=" << format_double(rep.max_rel_err) << "\nchecked=" << rep.checked
          << "\nworst_pixel=" << rep.worst_pixel << '\n';
      if (rep.checked == 0) {
        err << "no pixel is separated enough from its window's values to be checked\n";
        return kCheckFailed;
      }
      return rep.max_rel_err <= 1e-3 ? kOk : kCheckFailed;
    }

    if (*extract) {
      const auto graph = extract_graph(load_grid(pred_path), tau, min_spur);
      save_graph(out_path, graph);
      out << "nodes=" << graph.node_count() << "\nedges=" << graph.edge_count() << '\n';
      return kOk;
    }

    if (*eval) {
      metric_cfg.validate();
      const auto report = evaluate(load_graph(pred_graph_path), load_graph(gt_graph_path), width,
                                   height, metric_cfg);
      const std::vector<std::pair<std::string, double>> rows{
          {"apls", report.apls},
          {"tlts", report.tlts},
          {"jct_f1", report.jct.f1},
          {"hm_f1", report.hm.f1},
          {"ccq_quality", report.ccq.quality},
          {"jct_recall", report.jct.recall},
          {"jct_precision", report.jct.precision},
          {"hm_recall", report.hm.recall},
          {"hm_precision", report.hm.precision},
          {"ccq_correctness", report.ccq.correctness},
          {"ccq_completeness", report.ccq.completeness},
      };
      for (const auto& [k, v] : rows) out << k << '=' << format_double(v) << '\n';
      if (!json_path.empty()) {
        nlohmann::ordered_json doc = {
            {"apls", report.apls},
            {"tlts", report.tlts},
            {"jct", {{"recall", report.jct.recall}, {"precision", report.jct.precision}, {"f1", report.jct.f1}}},
            {"hm", {{"recall", report.hm.recall}, {"precision", report.hm.precision}, {"f1", report.hm.f1}}},
            {"ccq",
             {{"correctness", report.ccq.correctness},
              {"completeness", report.ccq.completeness},
              {"quality", report.ccq.quality}}},
            {"config",
             {{"seed", metric_cfg.seed},
              {"samples", metric_cfg.samples},
              {"buffer", metric_cfg.buffer},
              {"snap", metric_cfg.snap_radius},
              {"tol", metric_cfg.rel_tol},
              {"hm_radius", metric_cfg.hm_radius},
              {"hm_budget", metric_cfg.hm_budget},
              {"densify", metric_cfg.densify}}},
        };
        std::ofstream f(json_path);
        if (!f) throw IoError("cannot create " + json_path);
        f << doc.dump(2) << '\n';
        if (!f) throw IoError("write failed: " + json_path);
      }
      return kOk;
    }

    if (*selftest) {
      Check check{out};
      selftest_oracle(check, seeds);
      selftest_fixture(check);
      selftest_ground_truth(check, std::min(seeds, 5));
      selftest_gradient(check, std::min(seeds, 5));
      out << "seeds=" << seeds << "\nfailures=" << check.failures << '\n';
      return check.failures == 0 ? kOk : kCheckFailed;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidWindow& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}

}  // namespace topoloss::cli
