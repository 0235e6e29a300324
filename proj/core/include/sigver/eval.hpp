#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigver/ann.hpp"
#include "sigver/dataset.hpp"

namespace sigver::eval {

enum class Truth { Genuine, RandomForgery, SkilledForgery };
std::string_view to_string(Truth truth) noexcept;

/// One verification attempt: a sample presented under a claimed identity.
struct Trial {
  std::string claimed_writer;
  std::string predicted_writer;
  double score = 0.0;  // softmax probability of the claimed class
  Truth truth = Truth::Genuine;

  bool is_forgery() const noexcept { return truth != Truth::Genuine; }
  /// Accepted iff the classifier picks the claimed writer and the score clears t.
  bool accepted(double threshold) const noexcept {
    return predicted_writer == claimed_writer && score >= threshold;
  }
};

/// A test signature, already normalized with the model's statistics.
struct TestSample {
  std::string writer;
  dataset::Label label = dataset::Label::Genuine;
  std::vector<double> x;
};

enum class Protocol { Random, Skilled };

/// Random: every genuine sample yields a genuine trial for its own writer and
/// a random-forgery trial for every other writer. Skilled: every forged sample
/// yields one trial claiming its target writer. Throws UnknownWriter.
std::vector<Trial> make_trials(const ann::MlpModel& model, std::span<const TestSample> samples,
                               Protocol protocol);

/// Fraction of genuine samples classified as their own writer.
double classification_accuracy(const ann::MlpModel& model, std::span<const TestSample> samples);

struct WriterAccuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
};
std::map<std::string, WriterAccuracy> per_writer_accuracy(const ann::MlpModel& model,
                                                          std::span<const TestSample> samples);

struct ErrorCurve {
  std::vector<double> thresholds;  // ascending
  std::vector<double> far;         // non-increasing
  std::vector<double> frr;         // non-decreasing
};

/// Sorted distinct scores together with 0, 1 and the next double above 1,
/// so the curve always ends at FAR = 0, FRR = 1.
std::vector<double> default_thresholds(std::span<const Trial> trials);

/// Throws OneSidedTrials unless both genuine and forgery trials are present.
ErrorCurve far_frr(std::span<const Trial> trials, std::span<const double> thresholds);
ErrorCurve far_frr(std::span<const Trial> trials);

struct EerPoint {
  double rate = 0.0;
  double threshold = 0.0;
};

/// Linear interpolation between the thresholds bracketing FAR = FRR.
EerPoint eer_point(const ErrorCurve& curve);
double eer(const ErrorCurve& curve);

/// Trapezoidal area under TPR = 1 - FRR against FPR = FAR, anchored at (0,0)
/// and (1,1).
double roc_auc(const ErrorCurve& curve);

/// Fraction of forgery trials rejected at threshold t.
double forgery_rejection(std::span<const Trial> trials, double threshold);

struct Pca3 {
  std::vector<std::array<double, 3>> projections;
  std::array<double, 3> explained{};  // fractions of total variance
  std::array<std::vector<double>, 3> components;
};

/// Top three principal directions of the centered rows. Each direction's
/// sign is fixed so its largest-magnitude entry is positive. Throws TooFewSamples.
Pca3 pca3(std::span<const std::vector<double>> rows);

struct EvalReport {
  double accuracy_rf = 0.0;
  double eer = 0.0;  // random-forgery protocol
  double auc = 0.0;
  double eer_threshold = 0.0;
  std::optional<double> eer_sf;
  std::optional<double> auc_sf;
  std::optional<double> eer_sf_threshold;
  /// Skilled forgeries rejected at the skilled-protocol EER threshold.
  std::optional<double> sf_rejection_at_eer;
  std::size_t genuine_trials = 0;
  std::size_t random_forgery_trials = 0;
  std::size_t skilled_forgery_trials = 0;
  std::map<std::string, WriterAccuracy> per_writer;
};

struct Evaluation {
  EvalReport report;
  ErrorCurve roc_rf;
  std::optional<ErrorCurve> roc_sf;
};

/// Runs both protocols over a test set of genuine and forged samples.
Evaluation evaluate(const ann::MlpModel& model, std::span<const TestSample> samples);

/// Flat `key=value` lines.
std::string format_report(const EvalReport& report);
/// `threshold,far,frr`.
std::string format_roc_csv(const ErrorCurve& curve);
/// `writer,label,pc1,pc2,pc3`.
std::string format_pca_csv(std::span<const TestSample> samples, const Pca3& pca);

}  // namespace sigver::eval
