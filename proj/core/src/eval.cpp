#include "sigver/eval.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "sigver/error.hpp"
#include "sigver/numfmt.hpp"

namespace sigver::eval {

std::string_view to_string(Truth truth) noexcept {
  switch (truth) {
    case Truth::Genuine: return "genuine";
    case Truth::RandomForgery: return "random_forgery";
    case Truth::SkilledForgery: return "skilled_forgery";
  }
  return "unknown";
}

std::vector<Trial> make_trials(const ann::MlpModel& model, std::span<const TestSample> samples,
                               Protocol protocol) {
  std::vector<Trial> trials;
  const auto n_classes = static_cast<std::size_t>(model.n_classes());
  for (const auto& s : samples) {
    const bool genuine = s.label == dataset::Label::Genuine;
    if ((protocol == Protocol::Random) != genuine) continue;
    const auto own = static_cast<std::size_t>(model.class_index(s.writer));
    const auto probs = ann::forward(model, s.x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < n_classes; ++c)
      if (probs[c] > probs[best]) best = c;
    const auto& predicted = model.class_labels[best];
    if (protocol == Protocol::Skilled) {
      trials.push_back({s.writer, predicted, probs[own], Truth::SkilledForgery});
      continue;
    }
    trials.push_back({s.writer, predicted, probs[own], Truth::Genuine});
    for (std::size_t c = 0; c < n_classes; ++c)
      if (c != own) trials.push_back({model.class_labels[c], predicted, probs[c], Truth::RandomForgery});
  }
  return trials;
}

std::map<std::string, WriterAccuracy> per_writer_accuracy(const ann::MlpModel& model,
                                                          std::span<const TestSample> samples) {
  std::map<std::string, WriterAccuracy> table;
  for (const auto& s : samples) {
    if (s.label != dataset::Label::Genuine) continue;
    const int own = model.class_index(s.writer);
    auto& row = table[s.writer];
    ++row.total;
    if (ann::predict(model, s.x).class_index == own) ++row.correct;
  }
  return table;
}

double classification_accuracy(const ann::MlpModel& model, std::span<const TestSample> samples) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& [writer, row] : per_writer_accuracy(model, samples)) {
    correct += row.correct;
    total += row.total;
  }
  if (total == 0) throw Error(ErrorCode::EmptyBatch, "no genuine test samples");
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<double> default_thresholds(std::span<const Trial> trials) {
  std::vector<double> t{0.0, 1.0, std::nextafter(1.0, 2.0)};
  for (const auto& trial : trials) t.push_back(trial.score);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

ErrorCurve far_frr(std::span<const Trial> trials, std::span<const double> thresholds) {
  std::vector<double> genuine;
  std::vector<double> forgery;
  // Class mismatches are rejected at every threshold; model them as -inf.
  constexpr double kNever = -std::numeric_limits<double>::infinity();
  for (const auto& t : trials) {
    const double effective = t.predicted_writer == t.claimed_writer ? t.score : kNever;
    (t.is_forgery() ? forgery : genuine).push_back(effective);
  }
  if (genuine.empty() || forgery.empty())
    throw Error(ErrorCode::OneSidedTrials, "need both genuine and forgery trials");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw Error(ErrorCode::InvalidArgument, "thresholds must be ascending");
  std::sort(genuine.begin(), genuine.end());
  std::sort(forgery.begin(), forgery.end());

  ErrorCurve curve;
  curve.thresholds.assign(thresholds.begin(), thresholds.end());
  const auto ng = static_cast<double>(genuine.size());
  const auto nf = static_cast<double>(forgery.size());
  for (const auto t : thresholds) {
    // score >= t accepted (scores of -inf never clear any finite t).
    const auto rejected_genuine = std::lower_bound(genuine.begin(), genuine.end(), t) - genuine.begin();
    const auto rejected_forgery = std::lower_bound(forgery.begin(), forgery.end(), t) - forgery.begin();
    curve.far.push_back((nf - static_cast<double>(rejected_forgery)) / nf);
    curve.frr.push_back(static_cast<double>(rejected_genuine) / ng);
  }
  return curve;
}

ErrorCurve far_frr(std::span<const Trial> trials) {
  const auto thresholds = default_thresholds(trials);
  return far_frr(trials, thresholds);
}

EerPoint eer_point(const ErrorCurve& curve) {
  const auto n = curve.thresholds.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty error curve");
  const double d0 = curve.far[0] - curve.frr[0];
  if (d0 <= 0.0) return {(curve.far[0] + curve.frr[0]) / 2.0, curve.thresholds[0]};
  for (std::size_t k = 1; k < n; ++k) {
    const double d = curve.far[k] - curve.frr[k];
    if (d > 0.0) continue;
    const double prev = curve.far[k - 1] - curve.frr[k - 1];
    const double s = prev / (prev - d);
    const double rate = curve.far[k - 1] + s * (curve.far[k] - curve.far[k - 1]);
    const double t = curve.thresholds[k - 1] + s * (curve.thresholds[k] - curve.thresholds[k - 1]);
    return {rate, t};
  }
  // FAR stays above FRR everywhere; report the closest approach at the end.
  return {(curve.far[n - 1] + curve.frr[n - 1]) / 2.0, curve.thresholds[n - 1]};
}

double eer(const ErrorCurve& curve) { return eer_point(curve).rate; }

double roc_auc(const ErrorCurve& curve) {
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}};
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) pts.emplace_back(curve.far[k], 1.0 - curve.frr[k]);
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    area += (pts[k].first - pts[k - 1].first) * (pts[k].second + pts[k - 1].second) / 2.0;
  return std::clamp(area, 0.0, 1.0);
}

double forgery_rejection(std::span<const Trial> trials, double threshold) {
  std::size_t rejected = 0;
  std::size_t total = 0;
  for (const auto& t : trials) {
    if (!t.is_forgery()) continue;
    ++total;
    if (!t.accepted(threshold)) ++rejected;
  }
  if (total == 0) throw Error(ErrorCode::OneSidedTrials, "no forgery trials");
  return static_cast<double>(rejected) / static_cast<double>(total);
}

Pca3 pca3(std::span<const std::vector<double>> rows) {
  if (rows.size() < 4) throw Error(ErrorCode::TooFewSamples, "PCA needs at least four vectors");
  const auto dim = rows.front().size();
  if (dim < 3) throw Error(ErrorCode::DimensionMismatch, "PCA needs at least three dimensions");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (row.size() != dim) throw Error(ErrorCode::DimensionMismatch, "ragged rows");
    for (std::size_t j = 0; j < dim; ++j) x(i, static_cast<Eigen::Index>(j)) = row[j];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "eigen decomposition failed");

  // Eigenvalues come back ascending.
  const auto& values = solver.eigenvalues();
  const double total = std::max(values.sum(), 0.0);
  Pca3 out;
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(dim), 3);
  for (int k = 0; k < 3; ++k) {
    const Eigen::Index col = static_cast<Eigen::Index>(dim) - 1 - k;
    Eigen::VectorXd v = solver.eigenvectors().col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    basis.col(k) = v;
    out.components[static_cast<std::size_t>(k)].assign(v.data(), v.data() + v.size());
    out.explained[static_cast<std::size_t>(k)] = total > 0.0 ? std::max(values(col), 0.0) / total : 0.0;
  }
  const Eigen::MatrixXd proj = x * basis;
  out.projections.resize(rows.size());
  for (Eigen::Index i = 0; i < n; ++i)
    out.projections[static_cast<std::size_t>(i)] = {proj(i, 0), proj(i, 1), proj(i, 2)};
  return out;
}

Evaluation evaluate(const ann::MlpModel& model, std::span<const TestSample> samples) {
  Evaluation ev;
  auto& rep = ev.report;
  const auto random_trials = make_trials(model, samples, Protocol::Random);
  rep.accuracy_rf = classification_accuracy(model, samples);
  rep.per_writer = per_writer_accuracy(model, samples);
  ev.roc_rf = far_frr(random_trials);
  const auto rf_point = eer_point(ev.roc_rf);
  rep.eer = rf_point.rate;
  rep.eer_threshold = rf_point.threshold;
  rep.auc = roc_auc(ev.roc_rf);
  for (const auto& t : random_trials) (t.is_forgery() ? rep.random_forgery_trials : rep.genuine_trials)++;

  auto skilled = make_trials(model, samples, Protocol::Skilled);
  rep.skilled_forgery_trials = skilled.size();
  if (!skilled.empty()) {
    for (const auto& t : random_trials)
      if (!t.is_forgery()) skilled.push_back(t);
    ev.roc_sf = far_frr(skilled);
    const auto sf_point = eer_point(*ev.roc_sf);
    rep.eer_sf = sf_point.rate;
    rep.eer_sf_threshold = sf_point.threshold;
    rep.auc_sf = roc_auc(*ev.roc_sf);
    rep.sf_rejection_at_eer = forgery_rejection(skilled, sf_point.threshold);
  }
  return ev;
}

std::string format_report(const EvalReport& r) {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) { out += key + "=" + value + "\n"; };
  put("accuracy_rf", format_double(r.accuracy_rf));
  put("eer", format_double(r.eer));
  put("eer_threshold", format_double(r.eer_threshold));
  put("auc", format_double(r.auc));
  put("genuine_trials", std::to_string(r.genuine_trials));
  put("random_forgery_trials", std::to_string(r.random_forgery_trials));
  put("skilled_forgery_trials", std::to_string(r.skilled_forgery_trials));
  if (r.sf_rejection_at_eer) {
    put("eer_sf", format_double(*r.eer_sf));
    put("eer_sf_threshold", format_double(*r.eer_sf_threshold));
    put("auc_sf", format_double(*r.auc_sf));
    put("sf_rejection_at_eer", format_double(*r.sf_rejection_at_eer));
  }
  for (const auto& [writer, row] : r.per_writer)
    put("writer." + writer + ".accuracy", format_double(static_cast<double>(row.correct) / static_cast<double>(row.total)));
  return out;
}

std::string format_roc_csv(const ErrorCurve& curve) {
  std::string out = "threshold,far,frr\n";
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k)
    out += format_double(curve.thresholds[k]) + "," + format_double(curve.far[k]) + "," +
           format_double(curve.frr[k]) + "\n";
  return out;
}

std::string format_pca_csv(std::span<const TestSample> samples, const Pca3& pca) {
  std::string out = "writer,label,pc1,pc2,pc3\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& p = pca.projections[i];
    out += samples[i].writer + "," + std::string(dataset::to_string(samples[i].label)) + "," +
           format_double(p[0]) + "," + format_double(p[1]) + "," + format_double(p[2]) + "\n";
  }
  return out;
}

}  // namespace sigver::eval
