#include "sigver/ann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "sigver/error.hpp"
#include "sigver/numfmt.hpp"
#include "sigver/random.hpp"

namespace sigver::ann {

std::size_t MlpModel::parameter_count() const noexcept {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
}

std::vector<double> MlpModel::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  out.insert(out.end(), w1.data(), w1.data() + w1.size());
  out.insert(out.end(), b1.data(), b1.data() + b1.size());
  out.insert(out.end(), w2.data(), w2.data() + w2.size());
  out.insert(out.end(), b2.data(), b2.data() + b2.size());
  return out;
}

void MlpModel::unflatten(std::span<const double> params) {
  if (params.size() != parameter_count())
    throw Error(ErrorCode::DimensionMismatch, "parameter vector has the wrong length");
  auto it = params.begin();
  auto take = [&it](double* dst, Eigen::Index count) {
    std::copy(it, it + count, dst);
    it += count;
  };
  take(w1.data(), w1.size());
  take(b1.data(), b1.size());
  take(w2.data(), w2.size());
  take(b2.data(), b2.size());
}

int MlpModel::class_index(std::string_view label) const {
  const auto it = std::find(class_labels.begin(), class_labels.end(), label);
  if (it == class_labels.end()) throw Error(ErrorCode::UnknownWriter, "writer '" + std::string(label) + "' is not in the model");
  return static_cast<int>(it - class_labels.begin());
}

MlpModel init_model(int n_classes, std::uint64_t seed, int input_dim, int hidden) {
  if (n_classes < 2) throw Error(ErrorCode::InvalidArgument, "a classifier needs at least two classes");
  if (input_dim < 1 || hidden < 1) throw Error(ErrorCode::InvalidArgument, "layer sizes must be positive");
  MlpModel m;
  m.seed = seed;
  m.w1 = Matrix(hidden, input_dim);
  m.b1 = Vector::Zero(hidden);
  m.w2 = Matrix(n_classes, hidden);
  m.b2 = Vector::Zero(n_classes);
  Rng rng(seed);
  auto fill = [&rng](Matrix& w) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
  };
  fill(m.w1);
  fill(m.w2);
  for (int c = 0; c < n_classes; ++c) m.class_labels.push_back("class" + std::to_string(c));
  return m;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (auto& v : out) v /= total;
  return out;
}

Vector logits(const MlpModel& model, std::span<const double> x) {
  if (static_cast<Eigen::Index>(x.size()) != model.w1.cols())
    throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.size()) + " values, model expects " +
                                                  std::to_string(model.w1.cols()));
  for (const auto v : x)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "input contains a non-finite value");
  const Eigen::Map<const Vector> in(x.data(), static_cast<Eigen::Index>(x.size()));
  const Vector hidden = (model.w1 * in + model.b1).array().tanh().matrix();
  return model.w2 * hidden + model.b2;
}

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
  const Vector z = logits(model, x);
  return softmax(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
}

namespace {

void check_batch(const MlpModel& model, const Batch& batch) {
  if (batch.size() == 0) throw Error(ErrorCode::EmptyBatch, "batch is empty");
  if (batch.x.rows() != static_cast<Eigen::Index>(batch.y.size()) || batch.x.cols() != model.w1.cols())
    throw Error(ErrorCode::DimensionMismatch, "batch shape does not match the model");
  for (const auto y : batch.y)
    if (y < 0 || y >= model.n_classes()) throw Error(ErrorCode::InvalidArgument, "class index out of range");
}

struct ForwardPass {
  Matrix hidden;  // n x h, post-tanh
  Matrix probs;   // n x C
  double loss = 0.0;
};

ForwardPass run_forward(const MlpModel& model, const Batch& batch) {
  ForwardPass fp;
  fp.hidden = ((batch.x * model.w1.transpose()).rowwise() + model.b1.transpose()).array().tanh().matrix();
  fp.probs = (fp.hidden * model.w2.transpose()).rowwise() + model.b2.transpose();
  double total = 0.0;
  for (Eigen::Index i = 0; i < fp.probs.rows(); ++i) {
    auto row = fp.probs.row(i);
    const double top = row.maxCoeff();
    const double target = row(batch.y[static_cast<std::size_t>(i)]);
    row = (row.array() - top).exp().matrix();
    const double sum = row.sum();
    row /= sum;
    total += std::log(sum) + top - target;  // -log softmax(target)
  }
  fp.loss = total / static_cast<double>(batch.size());
  return fp;
}

}  // namespace

LossGradient loss_and_gradient(const MlpModel& model, const Batch& batch) {
  check_batch(model, batch);
  auto fp = run_forward(model, batch);
  const auto n = static_cast<double>(batch.size());

  Matrix dz = std::move(fp.probs);
  for (Eigen::Index i = 0; i < dz.rows(); ++i) dz(i, batch.y[static_cast<std::size_t>(i)]) -= 1.0;
  dz /= n;

  const Matrix g_w2 = dz.transpose() * fp.hidden;
  const Vector g_b2 = dz.colwise().sum().transpose();
  const Matrix dh = (dz * model.w2).cwiseProduct((1.0 - fp.hidden.array().square()).matrix());
  const Matrix g_w1 = dh.transpose() * batch.x;
  const Vector g_b1 = dh.colwise().sum().transpose();

  LossGradient out;
  out.loss = fp.loss;
  out.grad.reserve(model.parameter_count());
  out.grad.insert(out.grad.end(), g_w1.data(), g_w1.data() + g_w1.size());
  out.grad.insert(out.grad.end(), g_b1.data(), g_b1.data() + g_b1.size());
  out.grad.insert(out.grad.end(), g_w2.data(), g_w2.data() + g_w2.size());
  out.grad.insert(out.grad.end(), g_b2.data(), g_b2.data() + g_b2.size());
  return out;
}

double mean_loss(const MlpModel& model, const Batch& batch) {
  check_batch(model, batch);
  return run_forward(model, batch).loss;
}

double accuracy(const MlpModel& model, const Batch& batch) {
  check_batch(model, batch);
  const auto fp = run_forward(model, batch);
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < fp.probs.rows(); ++i) {
    Eigen::Index best = 0;
    fp.probs.row(i).maxCoeff(&best);  // first maximum on ties
    correct += best == batch.y[static_cast<std::size_t>(i)] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.size());
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::MaxEpochs: return "max_epochs";
    case StopReason::EarlyStopping: return "early_stopping";
    case StopReason::GradientTolerance: return "gradient_tolerance";
  }
  return "unknown";
}

namespace {

Batch select_rows(const Batch& batch, const std::vector<std::size_t>& rows) {
  Batch out;
  out.x = Matrix(static_cast<Eigen::Index>(rows.size()), batch.x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = batch.x.row(static_cast<Eigen::Index>(rows[i]));
    out.y.push_back(batch.y[rows[i]]);
  }
  return out;
}

void check_options(const TrainOptions& options) {
  if (!(options.val_fraction > 0.0 && options.val_fraction < 0.5))
    throw Error(ErrorCode::InvalidArgument, "val_fraction must lie in (0, 0.5)");
  if (options.sigma <= 0.0 || options.lambda_init <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "sigma and lambda_init must be positive");
  if (options.max_epochs < 0 || options.patience < 1)
    throw Error(ErrorCode::InvalidArgument, "max_epochs must be >= 0 and patience >= 1");
}

void check_classes(const Batch& train) {
  std::vector<int> classes(train.y);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw Error(ErrorCode::SingleClassData, "training data covers fewer than two classes");
}

}  // namespace

TrainResult scg_train(MlpModel model, const Batch& train, const TrainOptions& options) {
  check_options(options);
  check_classes(train);

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < train.y.size(); ++i) by_class[train.y[i]].push_back(i);

  std::vector<std::size_t> fit_rows;
  std::vector<std::size_t> val_rows;
  for (auto& [cls, rows] : by_class) {
    Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(cls)));
    for (std::size_t i = rows.size(); i > 1; --i)
      std::swap(rows[i - 1], rows[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
    std::size_t n_val = static_cast<std::size_t>(std::lround(options.val_fraction * static_cast<double>(rows.size())));
    if (rows.size() >= 2) n_val = std::clamp<std::size_t>(n_val, 1, rows.size() - 1);
    else n_val = 0;
    val_rows.insert(val_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_val));
    fit_rows.insert(fit_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_val), rows.end());
  }
  std::sort(fit_rows.begin(), fit_rows.end());
  std::sort(val_rows.begin(), val_rows.end());
  const Batch fit = select_rows(train, fit_rows);
  if (val_rows.empty()) return scg_train(std::move(model), fit, fit, options);
  return scg_train(std::move(model), fit, select_rows(train, val_rows), options);
}

TrainResult scg_train(MlpModel model, const Batch& train, const Batch& val, const TrainOptions& options) {
  check_options(options);
  check_batch(model, train);
  check_batch(model, val);
  check_classes(train);

  TrainResult result;
  auto& history = result.history;

  MlpModel scratch = model;
  const Objective objective = [&scratch, &train](std::span<const double> w, std::span<double> grad) {
    scratch.unflatten(w);
    const auto lg = loss_and_gradient(scratch, train);
    std::copy(lg.grad.begin(), lg.grad.end(), grad.begin());
    return lg.loss;
  };

  MlpModel probe = model;
  double best_val = mean_loss(model, val);
  std::vector<double> best_params = model.flatten();
  int since_best = 0;
  // Index 0 of every history series describes the initial weights.
  history.train_loss.push_back(mean_loss(model, train));
  history.val_loss.push_back(best_val);
  history.val_accuracy.push_back(accuracy(model, val));
  history.accepted.push_back(true);

  const ScgObserver observer = [&](const ScgIteration& info, std::span<const double> w) {
    probe.unflatten(w);
    const double val_loss = mean_loss(probe, val);
    history.train_loss.push_back(info.loss);
    history.val_loss.push_back(val_loss);
    history.val_accuracy.push_back(accuracy(probe, val));
    history.accepted.push_back(info.accepted);
    if (val_loss < best_val) {
      best_val = val_loss;
      best_params.assign(w.begin(), w.end());
      history.best_iteration = info.iteration;
      since_best = 0;
    } else if (++since_best >= options.patience) {
      return false;
    }
    return true;
  };

  ScgOptions scg;
  scg.max_iterations = options.max_epochs;
  scg.sigma = options.sigma;
  scg.lambda_init = options.lambda_init;
  scg.gradient_tolerance = 1e-8;
  const auto outcome = scg_minimize(objective, model.flatten(), scg, observer);

  switch (outcome.stop) {
    case ScgStop::Observer: history.stop = StopReason::EarlyStopping; break;
    case ScgStop::GradientTolerance: history.stop = StopReason::GradientTolerance; break;
    case ScgStop::MaxIterations: history.stop = StopReason::MaxEpochs; break;
  }
  model.unflatten(best_params);
  result.model = std::move(model);
  return result;
}

Prediction predict(const MlpModel& model, std::span<const double> x) {
  const auto probs = forward(model, x);
  Prediction p;
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (probs[i] > probs[static_cast<std::size_t>(p.class_index)]) p.class_index = static_cast<int>(i);
  p.score = probs[static_cast<std::size_t>(p.class_index)];
  return p;
}

// ---------------------------------------------------------------------------
// Model file

namespace {

constexpr std::string_view kMagic = "SIGVER-MODEL";
constexpr std::string_view kVersion = "v1";

void append_line(std::string& out, std::span<const double> values) {
  out += join_doubles(values);
  out += '\n';
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::string_view next(const char* what) {
    if (pos_ >= text_.size()) throw Error(ErrorCode::TruncatedData, std::string("model file ends before ") + what);
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) {
      end = text_.size();
      last_line_unterminated_ = true;
    }
    auto line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  }

  std::vector<double> numbers(const char* what, std::size_t expected) {
    const auto tokens = split_ws(next(what));
    if (tokens.size() < expected && last_line_unterminated_)
      throw Error(ErrorCode::TruncatedData, std::string("model file ends inside ") + what);
    if (tokens.size() != expected)
      throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected " + std::to_string(expected) +
                                                    " values, found " + std::to_string(tokens.size()));
    std::vector<double> out;
    out.reserve(expected);
    for (const auto t : tokens) out.push_back(parse_double(t));
    return out;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  bool last_line_unterminated_ = false;
};

}  // namespace

std::string save_model(const MlpModel& model) {
  std::string out;
  out += std::string(kMagic) + " " + std::string(kVersion) + "\n";
  out += "dims " + std::to_string(model.input_dim()) + " " + std::to_string(model.hidden_dim()) + " " +
         std::to_string(model.n_classes()) + "\n";
  for (std::size_t i = 0; i < model.class_labels.size(); ++i) {
    if (i) out += ' ';
    out += model.class_labels[i];
  }
  out += '\n';
  out += std::to_string(model.seed) + "\n";
  append_line(out, model.normalizer.mean);
  append_line(out, model.normalizer.stddev);
  for (Eigen::Index r = 0; r < model.w1.rows(); ++r)
    append_line(out, std::span<const double>(model.w1.row(r).data(), static_cast<std::size_t>(model.w1.cols())));
  append_line(out, std::span<const double>(model.b1.data(), static_cast<std::size_t>(model.b1.size())));
  for (Eigen::Index r = 0; r < model.w2.rows(); ++r)
    append_line(out, std::span<const double>(model.w2.row(r).data(), static_cast<std::size_t>(model.w2.cols())));
  append_line(out, std::span<const double>(model.b2.data(), static_cast<std::size_t>(model.b2.size())));
  return out;
}

MlpModel load_model(std::string_view text) {
  LineReader reader(text);
  const auto header = split_ws(reader.next("header"));
  if (header.empty() || header[0] != kMagic) throw Error(ErrorCode::BadMagic, "not a model file");
  if (header.size() != 2 || header[1] != kVersion)
    throw Error(ErrorCode::VersionUnsupported, "unsupported model version");

  const auto dims = split_ws(reader.next("dims"));
  if (dims.size() != 4 || dims[0] != "dims") throw Error(ErrorCode::DimensionMismatch, "malformed dims line");
  long long in = 0, hidden = 0, classes = 0;
  try {
    in = parse_int(dims[1]);
    hidden = parse_int(dims[2]);
    classes = parse_int(dims[3]);
  } catch (const Error&) {
    throw Error(ErrorCode::DimensionMismatch, "malformed dims line");
  }
  if (in < 1 || hidden < 1 || classes < 2 || in > 1 << 20 || hidden > 1 << 20 || classes > 1 << 20)
    throw Error(ErrorCode::DimensionMismatch, "implausible layer sizes");

  MlpModel m;
  for (const auto label : split_ws(reader.next("class labels"))) m.class_labels.emplace_back(label);
  if (static_cast<long long>(m.class_labels.size()) != classes)
    throw Error(ErrorCode::DimensionMismatch, "class label count does not match dims");
  const auto seed_line = split_ws(reader.next("seed"));
  if (seed_line.size() != 1) throw Error(ErrorCode::DimensionMismatch, "malformed seed line");
  m.seed = static_cast<std::uint64_t>(parse_int(seed_line[0]));

  const auto n_in = static_cast<std::size_t>(in);
  const auto n_hidden = static_cast<std::size_t>(hidden);
  const auto n_classes = static_cast<std::size_t>(classes);
  m.normalizer.mean = reader.numbers("normalizer means", n_in);
  m.normalizer.stddev = reader.numbers("normalizer stddevs", n_in);
  m.w1 = Matrix(hidden, in);
  for (Eigen::Index r = 0; r < hidden; ++r) {
    const auto row = reader.numbers("W1 row", n_in);
    std::copy(row.begin(), row.end(), m.w1.row(r).data());
  }
  const auto b1 = reader.numbers("b1", n_hidden);
  m.b1 = Eigen::Map<const Vector>(b1.data(), hidden);
  m.w2 = Matrix(classes, hidden);
  for (Eigen::Index r = 0; r < classes; ++r) {
    const auto row = reader.numbers("W2 row", n_hidden);
    std::copy(row.begin(), row.end(), m.w2.row(r).data());
  }
  const auto b2 = reader.numbers("b2", n_classes);
  m.b2 = Eigen::Map<const Vector>(b2.data(), classes);
  return m;
}

}  // namespace sigver::ann
