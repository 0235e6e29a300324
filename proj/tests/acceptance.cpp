// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "cli.hpp"
#include "oracles.hpp"
#include "sigver/ann.hpp"
#include "sigver/eval.hpp"
#include "sigver/features.hpp"
#include "sigver/preprocess.hpp"
#include "sigver/scg.hpp"

namespace fs = std::filesystem;
using namespace sigver;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::ostringstream line;
  line << (pass ? "PASS" : "FAIL") << "  " << id << ". " << name << "  (" << std::fixed;
  line.precision(2);
  line << secs << " s / " << budget_s << " s";
  if (!o.detail.empty()) line << "; " << o.detail;
  if (!in_time) line << "; over time budget";
  line << ")";
  std::cout << line.str() << std::endl;
}

// --- 1 ----------------------------------------------------------------------
Outcome otsu_oracle() {
  Rng rng(1001);
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto img = oracle::random_gray(rng, 32, 32);
    if (preprocess::otsu_threshold(img) != oracle::otsu(img)) ++bad;
  }
  return {bad == 0, std::to_string(100 - bad) + "/100 images agree"};
}

// --- 2 ----------------------------------------------------------------------
Outcome median_oracle() {
  Rng rng(1002);
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto img = oracle::random_gray(rng, 16, 16);
    if (preprocess::median_filter3(img) != oracle::median3(img)) ++bad;
  }
  return {bad == 0, std::to_string(100 - bad) + "/100 images agree"};
}

// --- 3 ----------------------------------------------------------------------
Outcome components_oracle() {
  Rng rng(1003);
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const auto img = oracle::random_binary(rng, 32, 32, 0.3);
    if (features::connected_components(features::Region(img)) != oracle::components(img)) ++bad;
  }
  return {bad == 0, std::to_string(200 - bad) + "/200 images agree"};
}

// --- 4 ----------------------------------------------------------------------
Outcome thickening_fixpoint() {
  Rng rng(1004);
  int bad = 0;
  for (int i = 0; i < 50; ++i) {
    const auto img = oracle::random_binary(rng, rng.uniform_int(8, 64), rng.uniform_int(8, 64),
                                           rng.uniform(0.02, 0.4));
    const auto t = preprocess::thicken_to_stability(img);
    bool superset = true;
    for (int r = 0; r < img.height(); ++r)
      for (int c = 0; c < img.width(); ++c)
        if (img.at(r, c) && !t.at(r, c)) superset = false;
    if (!superset || preprocess::thicken_pass(t) != t) ++bad;
  }
  return {bad == 0, std::to_string(50 - bad) + "/50 images stable and superset"};
}

// --- 5 ----------------------------------------------------------------------
Outcome gradient_check() {
  auto m = ann::init_model(3, 2024, 5, 7);
  Rng rng(1005);
  for (Eigen::Index i = 0; i < m.b1.size(); ++i) m.b1[i] = rng.normal(0, 0.5);
  for (Eigen::Index i = 0; i < m.b2.size(); ++i) m.b2[i] = rng.normal(0, 0.5);
  ann::Batch b;
  b.x = ann::Matrix(10, 5);
  for (Eigen::Index i = 0; i < b.x.size(); ++i) b.x.data()[i] = rng.normal();
  for (int i = 0; i < 10; ++i) b.y.push_back(i % 3);

  const auto analytic = ann::loss_and_gradient(m, b).grad;
  const auto p = m.flatten();
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto q = p;
    q[i] = p[i] + h;
    m.unflatten(q);
    const double fp = ann::mean_loss(m, b);
    q[i] = p[i] - h;
    m.unflatten(q);
    const double fm = ann::mean_loss(m, b);
    const double num = (fp - fm) / (2 * h);
    const double denom = std::max({std::abs(num), std::abs(analytic[i]), 1e-8});
    worst = std::max(worst, std::abs(num - analytic[i]) / denom);
  }
  std::ostringstream d;
  d << p.size() << " parameters, max relative error " << worst;
  return {worst < 1e-5, d.str()};
}

// --- 6 ----------------------------------------------------------------------
Outcome softmax_normalization() {
  Rng rng(1006);
  double worst = 0.0;
  bool nonneg = true;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> z(static_cast<std::size_t>(rng.uniform_int(2, 50)));
    const double scale = i % 4 == 0 ? 1e4 : (i % 4 == 1 ? 1.0 : (i % 4 == 2 ? 30.0 : 1000.0));
    for (auto& v : z) v = rng.uniform(-scale, scale);
    if (i % 10 == 0) z[0] = 1e4, z[1] = -1e4;
    double s = 0.0;
    for (double v : ann::softmax(z)) {
      if (!(v >= 0.0)) nonneg = false;
      s += v;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  std::ostringstream d;
  d << "max |sum - 1| = " << worst;
  return {nonneg && worst <= 1e-9, d.str()};
}

// --- 7 ----------------------------------------------------------------------
Outcome scg_convergence() {
  // Softmax regression, 4 classes x 6 features, 400 samples, L2 = 1e-3.
  const int n = 400, d = 6, k = 4;
  Rng rng(1007);
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    y.push_back(i % k);
    for (int j = 0; j < d; ++j) x.push_back(rng.normal(j == i % k ? 1.5 : 0.0, 1.0));
  }
  const double l2 = 1e-3;
  const ann::Objective f = [&](std::span<const double> w, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    double loss = 0.0;
    std::vector<double> z(k);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < k; ++c) {
        double a = w[static_cast<std::size_t>(c * (d + 1) + d)];
        for (int j = 0; j < d; ++j) a += w[static_cast<std::size_t>(c * (d + 1) + j)] * x[static_cast<std::size_t>(i * d + j)];
        z[static_cast<std::size_t>(c)] = a;
      }
      const double mx = *std::max_element(z.begin(), z.end());
      double s = 0.0;
      for (auto& v : z) s += (v = std::exp(v - mx));
      loss -= std::log(z[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])] / s);
      for (int c = 0; c < k; ++c) {
        const double r = (z[static_cast<std::size_t>(c)] / s - (c == y[static_cast<std::size_t>(i)])) / n;
        for (int j = 0; j < d; ++j) g[static_cast<std::size_t>(c * (d + 1) + j)] += r * x[static_cast<std::size_t>(i * d + j)];
        g[static_cast<std::size_t>(c * (d + 1) + d)] += r;
      }
    }
    loss /= n;
    for (std::size_t i = 0; i < w.size(); ++i) {
      loss += 0.5 * l2 * w[i] * w[i];
      g[i] += l2 * w[i];
    }
    return loss;
  };
  ann::ScgOptions opt;
  opt.max_iterations = 200;
  opt.gradient_tolerance = 1e-7;
  int first_below = -1;
  ann::scg_minimize(f, std::vector<double>(k * (d + 1), 0.0), opt,
                    [&](const ann::ScgIteration& it, std::span<const double>) {
                      if (first_below < 0 && it.grad_norm < 1e-6) first_below = it.iteration;
                      return true;
                    });
  std::ostringstream det;
  if (first_below > 0) det << "gradient norm < 1e-6 at iteration " << first_below;
  else det << "gradient norm never dropped below 1e-6";
  return {first_below > 0 && first_below <= 200, det.str()};
}

// --- 8 ----------------------------------------------------------------------
Outcome eer_calibration() {
  Rng rng(1008);
  auto trials = [&](double mg, double mf) {
    std::vector<eval::Trial> t;
    for (int i = 0; i < 10000; ++i)
      t.push_back({"a", "a", std::clamp(rng.normal(mg, 0.05), 0.0, 1.0), eval::Truth::Genuine});
    for (int i = 0; i < 10000; ++i)
      t.push_back({"a", "a", std::clamp(rng.normal(mf, 0.05), 0.0, 1.0), eval::Truth::RandomForgery});
    return t;
  };
  const auto sep = eval::far_frr(trials(0.8, 0.2));
  const auto same = eval::far_frr(trials(0.5, 0.5));
  const double e1 = eval::eer(sep), e2 = eval::eer(same), a2 = eval::roc_auc(same);
  std::ostringstream d;
  d << "separated EER " << e1 << ", identical EER " << e2 << " AUC " << a2;
  return {e1 < 0.01 && std::abs(e2 - 0.5) <= 0.03 && std::abs(a2 - 0.5) <= 0.03, d.str()};
}

// --- 9 / 10 -----------------------------------------------------------------
struct PipelineRun {
  fs::path dir;
  int code = 0;
  std::string log;
};

PipelineRun run_pipeline(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  PipelineRun pr{dir};
  const auto jobs = std::to_string(std::max(1u, std::thread::hardware_concurrency()));
  const std::vector<std::vector<std::string>> steps{
      {"sigver", "synth", "--seed", "7", "--writers", "20", "--genuine", "20", "--forged", "10", "--out",
       (dir / "corpus").string()},
      {"sigver", "extract", "--corpus", (dir / "corpus").string(), "--out", (dir / "feats.csv").string(), "--jobs",
       jobs},
      {"sigver", "train", "--features", (dir / "feats.csv").string(), "--seed", "1", "--out",
       (dir / "model.txt").string()},
      {"sigver", "eval", "--features", (dir / "feats.csv").string(), "--model", (dir / "model.txt").string(), "--out",
       (dir / "report").string()},
  };
  for (const auto& s : steps) {
    std::ostringstream out, err;
    pr.code = cli::run(s, out, err);
    if (s[1] != "synth") pr.log += out.str();
    pr.log += err.str();
    if (pr.code != 0) {
      pr.log += "step " + s[1] + " exited " + std::to_string(pr.code) + "\n";
      break;
    }
  }
  return pr;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "<missing>";
  return {std::istreambuf_iterator<char>(in), {}};
}

std::optional<double> report_value(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return std::stod(line.substr(key.size() + 1));
  return std::nullopt;
}

fs::path work_root;
PipelineRun first_run;
double first_run_secs = 0.0;

Outcome end_to_end() {
  const auto t0 = Clock::now();
  first_run = run_pipeline(work_root / "run1");
  first_run_secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (first_run.code != 0) return {false, first_run.log};
  const auto report = slurp(first_run.dir / "report" / "report.txt");
  const auto acc = report_value(report, "accuracy_rf");
  const auto rej = report_value(report, "sf_rejection_at_eer");
  if (!acc || !rej) return {false, "report lacks accuracy_rf or sf_rejection_at_eer"};
  std::ostringstream d;
  d << "accuracy_rf " << *acc << " (>= 0.90), sf_rejection_at_eer " << *rej << " (>= 0.70)";
  return {*acc >= 0.90 && *rej >= 0.70, d.str()};
}

Outcome determinism() {
  if (first_run.code != 0) return {false, "first run did not complete"};
  const auto t0 = Clock::now();
  const auto second = run_pipeline(work_root / "run2");
  const double total = first_run_secs + std::chrono::duration<double>(Clock::now() - t0).count();
  if (second.code != 0) return {false, second.log};
  std::vector<fs::path> files{"feats.csv", "model.txt"};
  for (const auto& e : fs::directory_iterator(first_run.dir / "report"))
    files.push_back(fs::path("report") / e.path().filename());
  std::sort(files.begin(), files.end());
  std::string differing;
  for (const auto& f : files)
    if (slurp(first_run.dir / f) != slurp(second.dir / f)) differing += " " + f.string();
  std::ostringstream d;
  d.precision(1);
  d << std::fixed << "both runs " << total << " s";
  if (!differing.empty()) return {false, "differs:" + differing + "; " + d.str()};
  d << ", " << files.size() << " artifacts byte-identical";
  return {total < 600.0, d.str()};
}

// --- 11 ---------------------------------------------------------------------
Outcome feature_contract() {
  std::string problems;
  for (const std::size_t n : {std::size_t{20}, std::size_t{21}}) {
    for (int block = 0; block < 16; ++block) {
      raster::BinaryImage img(256, 192);
      const int r0 = (block / 4) * 48, c0 = (block % 4) * 64;
      for (std::size_t k = 0; k < n; ++k)
        img.set(r0 + 5 + static_cast<int>(k % 7) * 5, c0 + 3 + static_cast<int>(k / 7) * 9, true);
      const auto f = features::extract(img);
      if (f.size() != 130) problems += " length";
      bool zero = true;
      for (int i = 0; i < 8; ++i) zero = zero && f[static_cast<std::size_t>(block * 8 + i)] == 0.0;
      if (zero != (n <= 20))
        problems += " block" + std::to_string(block) + "@" + std::to_string(n);
    }
  }
  // Vectors extracted from preprocessed synthetic signatures.
  const auto style = dataset::writer_style(11, 0);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto v = features::extract(
        preprocess::preprocess(dataset::render_sample(style, s, false), preprocess::PreprocessMode::Offline));
    if (v.size() != 130 || !std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }))
      problems += " synthetic";
  }
  return {problems.empty(), problems.empty() ? "20 px -> zeros, 21 px -> features in all 16 blocks" : problems};
}

}  // namespace

int main(int argc, char** argv) {
  work_root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "sigver_acceptance";
  fs::create_directories(work_root);

  criterion(1, "Otsu threshold equals exhaustive argmax", 1, otsu_oracle);
  criterion(2, "Median filter equals sort oracle", 1, median_oracle);
  criterion(3, "Connected components equal flood fill", 2, components_oracle);
  criterion(4, "Thickening fixpoint and superset", 10, thickening_fixpoint);
  criterion(5, "Gradient check 5-7-3 network", 1, gradient_check);
  criterion(6, "Softmax normalization", 1, softmax_normalization);
  criterion(7, "SCG convergence on softmax regression", 5, scg_convergence);
  criterion(8, "EER calibration", 5, eer_calibration);
  criterion(9, "End-to-end synthetic benchmark", 300, end_to_end);
  criterion(10, "Determinism of the end-to-end run", 600, determinism);
  criterion(11, "Feature-vector contract", 1, feature_contract);

  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  if (failures == 0) fs::remove_all(work_root);
  return failures == 0 ? 0 : 1;
}
