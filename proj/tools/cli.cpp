#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <ostream>
#include <thread>

#include "sigver/ann.hpp"
#include "sigver/dataset.hpp"
#include "sigver/error.hpp"
#include "sigver/eval.hpp"
#include "sigver/features.hpp"
#include "sigver/numfmt.hpp"
#include "sigver/preprocess.hpp"

namespace fs = std::filesystem;

namespace sigver::cli {

namespace {

struct SynthArgs {
  std::uint64_t seed = 7;
  int writers = 20;
  int genuine = 20;
  int forged = 10;
  std::string out;
};

struct ExtractArgs {
  std::string corpus;
  std::string mode = "offline";
  std::string out;
  int jobs = 1;
};

struct TrainArgs {
  std::string features;
  std::uint64_t seed = 1;
  std::string out;
  int hidden = ann::kDefaultHidden;
  int max_epochs = 500;
  int patience = 20;
};

struct EvalArgs {
  std::string features;
  std::string model;
  std::string out;
};

struct VerifyArgs {
  std::string model;
  std::string image;
  std::string claim;
  double threshold = 0.5;
  std::string mode = "offline";
};

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(ErrorCode::IOFailure, "short write to " + file.string());
}

int run_synth(const SynthArgs& a, std::ostream& out) {
  const auto manifest = dataset::generate_synthetic(a.seed, a.writers, a.genuine, a.forged, a.out);
  out << dataset::format_manifest_tsv(manifest);
  return kExitOk;
}

int run_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  auto manifest = dataset::scan_corpus(a.corpus);
  manifest.mode = preprocess::parse_mode(a.mode);
  const auto& entries = manifest.entries;

  std::vector<std::optional<dataset::FeatureRow>> rows(entries.size());
  std::vector<std::string> failures(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        const auto gray = raster::read_gray_file((manifest.root / entries[i].path).string());
        const auto canonical = preprocess::preprocess(gray, manifest.mode);
        rows[i] = dataset::FeatureRow{entries[i], features::extract(canonical)};
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    }
  };
  const int jobs = std::max(1, a.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<dataset::FeatureRow> kept;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (rows[i]) {
      kept.push_back(std::move(*rows[i]));
    } else {
      err << "warning: skipping " << entries[i].path << ": " << failures[i] << "\n";
    }
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyCorpus, "no image survived preprocessing");
  dataset::write_features(a.out, kept);
  out << "extracted " << kept.size() << " of " << entries.size() << " images -> " << a.out << "\n";
  return kExitOk;
}

ann::Batch make_batch(const std::vector<const dataset::FeatureRow*>& rows, const ann::MlpModel& model) {
  ann::Batch batch;
  batch.x = ann::Matrix(static_cast<Eigen::Index>(rows.size()), model.input_dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto x = features::apply_normalizer(model.normalizer, rows[i]->values);
    std::copy(x.begin(), x.end(), batch.x.row(static_cast<Eigen::Index>(i)).data());
    batch.y.push_back(model.class_index(rows[i]->entry.writer));
  }
  return batch;
}

std::vector<const dataset::FeatureRow*> lookup(const std::vector<dataset::FeatureRow>& rows,
                                               const std::vector<dataset::Entry>& entries) {
  std::map<std::string, const dataset::FeatureRow*> by_path;
  for (const auto& r : rows) by_path[r.entry.path] = &r;
  std::vector<const dataset::FeatureRow*> out;
  for (const auto& e : entries) out.push_back(by_path.at(e.path));
  return out;
}

int run_train(const TrainArgs& a, std::ostream& out) {
  const auto rows = dataset::read_features(a.features);
  const auto manifest = dataset::manifest_from_rows(rows);
  dataset::validate(manifest);
  const auto parts = dataset::split(manifest, a.seed);

  const auto writers = manifest.writers();
  auto model = ann::init_model(static_cast<int>(writers.size()), a.seed, features::kFeatureDim, a.hidden);
  model.class_labels = writers;

  const auto train_rows = lookup(rows, parts.train);
  std::vector<features::FeatureVector> train_vectors;
  for (const auto* r : train_rows) train_vectors.push_back(r->values);
  model.normalizer = features::fit_normalizer(train_vectors);

  ann::TrainOptions options;
  options.seed = a.seed;
  options.max_epochs = a.max_epochs;
  options.patience = a.patience;
  const auto train = make_batch(train_rows, model);
  const auto val = make_batch(lookup(rows, parts.val), model);
  auto result = ann::scg_train(std::move(model), train, val, options);

  write_text(a.out, ann::save_model(result.model));
  const auto& h = result.history;
  out << "iterations=" << h.train_loss.size() - 1 << "\n"
      << "stop=" << ann::to_string(h.stop) << "\n"
      << "best_iteration=" << h.best_iteration << "\n"
      << "train_accuracy=" << format_double(ann::accuracy(result.model, train)) << "\n"
      << "val_accuracy=" << format_double(ann::accuracy(result.model, val)) << "\n";
  return kExitOk;
}

std::vector<eval::TestSample> to_samples(const std::vector<const dataset::FeatureRow*>& rows,
                                         const ann::MlpModel& model) {
  std::vector<eval::TestSample> out;
  for (const auto* r : rows)
    out.push_back({r->entry.writer, r->entry.label, features::apply_normalizer(model.normalizer, r->values)});
  return out;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const auto rows = dataset::read_features(a.features);
  const auto model = ann::load_model(read_text(a.model));
  const auto manifest = dataset::manifest_from_rows(rows);
  const auto parts = dataset::split(manifest, model.seed);

  const auto test = to_samples(lookup(rows, parts.test), model);
  const auto evaluation = eval::evaluate(model, test);

  std::vector<const dataset::FeatureRow*> all;
  for (const auto& r : rows) all.push_back(&r);
  const auto everything = to_samples(all, model);
  std::vector<std::vector<double>> vectors;
  for (const auto& s : everything) vectors.push_back(s.x);

  fs::create_directories(a.out);
  const fs::path dir(a.out);
  const auto report = eval::format_report(evaluation.report);
  write_text(dir / "report.txt", report);
  write_text(dir / "roc.csv", eval::format_roc_csv(evaluation.roc_rf));
  if (evaluation.roc_sf) write_text(dir / "roc_sf.csv", eval::format_roc_csv(*evaluation.roc_sf));
  write_text(dir / "pca3.csv", eval::format_pca_csv(everything, eval::pca3(vectors)));
  out << report;
  return kExitOk;
}

int run_verify(const VerifyArgs& a, std::ostream& out) {
  const auto model = ann::load_model(read_text(a.model));
  const int claimed = model.class_index(a.claim);
  const auto gray = raster::read_gray_file(a.image);
  const auto canonical = preprocess::preprocess(gray, preprocess::parse_mode(a.mode));
  const auto x = features::apply_normalizer(model.normalizer, features::extract(canonical));
  const auto probs = ann::forward(model, x);
  const auto best = ann::predict(model, x);
  const double score = probs[static_cast<std::size_t>(claimed)];
  const bool accept = best.class_index == claimed && score >= a.threshold;
  out << (accept ? "ACCEPT" : "REJECT") << " score=" << format_double(score)
      << " predicted=" << model.class_labels[static_cast<std::size_t>(best.class_index)] << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Offline signature verification", "sigver"};
  app.require_subcommand(1, 1);
  const std::vector<std::string> modes{"offline", "online"};

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic signature corpus");
  synth_cmd->add_option("--seed", synth.seed, "Corpus seed");
  synth_cmd->add_option("--writers", synth.writers, "Number of writers")->check(CLI::Range(2, 100000));
  synth_cmd->add_option("--genuine", synth.genuine, "Genuine samples per writer")->check(CLI::Range(1, 100000));
  synth_cmd->add_option("--forged", synth.forged, "Forged samples per writer")->check(CLI::Range(0, 100000));
  synth_cmd->add_option("--out", synth.out, "Output corpus directory")->required();

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "Preprocess a corpus and write the feature CSV");
  extract_cmd->add_option("--corpus", extract.corpus, "Corpus root")->required();
  extract_cmd->add_option("--mode", extract.mode, "offline | online")->check(CLI::IsMember(modes));
  extract_cmd->add_option("--out", extract.out, "Feature CSV path")->required();
  extract_cmd->add_option("--jobs", extract.jobs, "Worker threads")->check(CLI::Range(1, 1024));

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the classifier on genuine samples");
  train_cmd->add_option("--features", train.features, "Feature CSV")->required();
  train_cmd->add_option("--seed", train.seed, "Split and initialization seed");
  train_cmd->add_option("--out", train.out, "Model file")->required();
  train_cmd->add_option("--hidden", train.hidden, "Hidden units")->check(CLI::Range(1, 100000));
  train_cmd->add_option("--max-epochs", train.max_epochs, "SCG iteration limit")->check(CLI::Range(0, 1000000));
  train_cmd->add_option("--patience", train.patience, "Early-stopping patience")->check(CLI::Range(1, 1000000));

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on the held-out split");
  eval_cmd->add_option("--features", ev.features, "Feature CSV")->required();
  eval_cmd->add_option("--model", ev.model, "Model file")->required();
  eval_cmd->add_option("--out", ev.out, "Report directory")->required();

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Verify one image against a claimed writer");
  verify_cmd->add_option("--model", verify.model, "Model file")->required();
  verify_cmd->add_option("--image", verify.image, "PGM image")->required();
  verify_cmd->add_option("--claim", verify.claim, "Claimed writer id")->required();
  verify_cmd->add_option("--threshold", verify.threshold, "Acceptance threshold on the claimed-class probability");
  verify_cmd->add_option("--mode", verify.mode, "offline | online")->check(CLI::IsMember(modes));

  // CLI11 consumes a reversed argument list without the program name.
  std::vector<std::string> reversed;
  for (std::size_t i = args.size(); i > 1; --i) reversed.push_back(args[i - 1]);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) return run_synth(synth, out);
    if (*extract_cmd) return run_extract(extract, out, err);
    if (*train_cmd) return run_train(train, out);
    if (*eval_cmd) return run_eval(ev, out);
    if (*verify_cmd) return run_verify(verify, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace sigver::cli
