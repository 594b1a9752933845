#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "smssvd/engine.hpp"
#include "smssvd/evaluation.hpp"
#include "smssvd/manifest.hpp"
#include "smssvd/synthetic.hpp"
#include "smssvd/tsv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace smssvd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;
constexpr int kExitEmptyResult = 4;

std::string join_args(int argc, char** argv) {
  std::ostringstream line;
  for (int i = 0; i < argc; ++i) {
    if (i) line << ' ';
    line << argv[i];
  }
  return line.str();
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json engine_config_json(const EngineConfig& cfg) {
  json j;
  j["max_components"] = cfg.max_components;
  j["min_score"] = cfg.min_score;
  j["null_samples"] = cfg.null_samples;
  j["d_max"] = cfg.d_max;
  j["keep_fraction_grid"] = cfg.keep_fraction_grid;
  j["rank_tol"] = cfg.rank_tol;
  j["seed"] = cfg.seed;
  return j;
}

void write_vector(const fs::path& path, const Vector& values) {
  std::ofstream out(path, std::ios::binary);
  for (Index i = 0; i < values.size(); ++i) out << format_double(values(i)) << '\n';
}

Vector read_vector(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    values.push_back(parse_double(line));
  }
  Vector v(static_cast<Index>(values.size()));
  for (size_t i = 0; i < values.size(); ++i) v(static_cast<Index>(i)) = values[i];
  return v;
}

std::map<std::string, std::string> read_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open labels file " + path.string());
  std::map<std::string, std::string> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(line_no, 1, "expected 'sample<TAB>label'");
    }
    labels[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return labels;
}

struct CommonFlags {
  std::uint64_t seed = 0;
  std::string out;
  bool quiet = false;
};

void add_engine_flags(CLI::App* cmd, EngineConfig& cfg, std::string& grid_text) {
  cmd->add_option("--max-components", cfg.max_components, "Component budget");
  cmd->add_option("--min-score", cfg.min_score, "Stop when no subset scores above this");
  cmd->add_option("--null-samples", cfg.null_samples, "Gaussian null draws per grid point");
  cmd->add_option("--d-max", cfg.d_max, "Largest dimension searched per iteration (0 = auto)");
  cmd->add_option("--grid", grid_text, "Comma-separated keep fractions (default: geometric)");
  cmd->add_option("--rank-tol", cfg.rank_tol, "Relative numerical rank tolerance");
}

void finish_engine_config(EngineConfig& cfg, const std::string& grid_text, std::uint64_t seed) {
  cfg.seed = seed;
  if (!grid_text.empty()) {
    for (const auto& item : split_commas(grid_text)) {
      const double f = parse_double(item);
      if (!(f > 0.0 && f <= 1.0)) throw InputError("grid fraction out of (0, 1]: " + item);
      cfg.keep_fraction_grid.push_back(f);
    }
  }
}

int run_decompose(const std::string& command_line, const std::string& input,
                  const CommonFlags& common, EngineConfig cfg, bool center_rows) {
  DataMatrix data = read_tsv_matrix(input);
  if (center_rows) {
    for (Index i = 0; i < data.values.rows(); ++i) {
      data.values.row(i).array() -= data.values.row(i).mean();
    }
  }

  const fs::path out_dir(common.out);
  fs::create_directories(out_dir);

  const Decomposition dec = decompose(data, cfg, Rng(cfg.seed));

  std::vector<std::string> component_ids;
  for (Index c = 0; c < dec.total_dim; ++c) component_ids.push_back("c" + std::to_string(c + 1));

  DataMatrix u_out{dec.concatenated_u(), data.variable_ids, component_ids};
  DataMatrix v_out{dec.concatenated_v(), data.sample_ids, component_ids};
  write_tsv_matrix(out_dir / "U.tsv", u_out);
  write_tsv_matrix(out_dir / "V.tsv", v_out);
  write_vector(out_dir / "sigma.tsv", dec.concatenated_sigma());

  json blocks = json::array();
  for (const auto& b : dec.blocks) {
    json jb;
    jb["iteration"] = b.iteration_index;
    jb["d"] = b.dim();
    jb["keep_fraction"] = b.score_record.threshold_quantile;
    std::vector<std::string> kept;
    for (Index row : b.selection.kept_indices) {
      kept.push_back(data.variable_ids[static_cast<size_t>(row)]);
    }
    jb["kept_variable_ids"] = kept;
    jb["score_record"] = {
        {"threshold_quantile", b.score_record.threshold_quantile},
        {"kept", b.score_record.kept},
        {"dim", b.score_record.dim},
        {"tau_observed", b.score_record.tau_observed},
        {"tau_null_mean", b.score_record.tau_null_mean},
        {"score", b.score_record.score},
        {"null_samples", b.score_record.null_samples},
    };
    blocks.push_back(std::move(jb));
  }
  json blocks_doc;
  blocks_doc["total_d"] = dec.total_dim;
  blocks_doc["stop_reason"] = to_string(dec.stop_reason);
  blocks_doc["blocks"] = blocks;
  {
    std::ofstream out(out_dir / "blocks.json", std::ios::binary);
    out << blocks_doc.dump(2) << '\n';
  }

  RunManifest manifest;
  manifest.command_line = command_line;
  manifest.seed = cfg.seed;
  manifest.config = engine_config_json(cfg);
  manifest.config["center_rows"] = center_rows;
  manifest.inputs[input] = file_digest(input);
  for (const char* name : {"U.tsv", "V.tsv", "sigma.tsv", "blocks.json"}) {
    manifest.outputs[name] = file_digest(out_dir / name);
  }
  manifest.timestamp_utc = current_timestamp_utc();
  write_manifest(out_dir / "manifest.json", manifest);

  if (!common.quiet) {
    for (const auto& b : dec.blocks) {
      std::cout << "block " << (b.iteration_index + 1) << ": d=" << b.dim()
                << " kept=" << b.score_record.kept << " score=" << b.score_record.score << '\n';
    }
    std::cout << "stop: " << to_string(dec.stop_reason) << ", total d=" << dec.total_dim << '\n';
  }
  return dec.blocks.empty() ? kExitEmptyResult : kExitOk;
}

int run_synth(const std::string& command_line, const CommonFlags& common,
              const std::string& preset, SyntheticSpec spec, bool has_explicit) {
  GroundTruth truth;
  json config;
  if (!preset.empty()) {
    if (has_explicit) throw InputError("--preset cannot be combined with explicit dimensions");
    BiplotMode mode;
    if (preset == "biplot-no-noise") {
      mode = BiplotMode::NoNoise;
    } else if (preset == "biplot-noise-off-support") {
      mode = BiplotMode::NoiseOffSupport;
    } else if (preset == "biplot-noise-all") {
      mode = BiplotMode::NoiseAll;
    } else {
      throw InputError("unknown preset '" + preset + "'");
    }
    truth = biplot_scenario(mode, spec.seed);
    config["preset"] = preset;
  } else {
    try {
      truth = generate(spec);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  config["n_samples"] = truth.spec.n_samples;
  config["n_variables"] = truth.spec.n_variables;
  config["support_size"] = truth.spec.support_size;
  config["n_signals"] = truth.spec.n_signals;
  config["rank_per_signal"] = truth.spec.rank_per_signal;
  config["noise_sigma"] = truth.spec.noise_sigma;
  config["disjoint_supports"] = truth.spec.disjoint_supports;

  const fs::path out_dir(common.out);
  write_ground_truth(out_dir, truth);

  RunManifest manifest;
  manifest.command_line = command_line;
  manifest.seed = truth.spec.seed;
  manifest.config = config;
  manifest.outputs["X.tsv"] = file_digest(out_dir / "X.tsv");
  for (size_t k = 1; k <= truth.signals.size(); ++k) {
    const std::string y = "Y_" + std::to_string(k) + ".tsv";
    const std::string s = "support_" + std::to_string(k) + ".txt";
    manifest.outputs[y] = file_digest(out_dir / y);
    manifest.outputs[s] = file_digest(out_dir / s);
  }
  manifest.outputs["spec.json"] = file_digest(out_dir / "spec.json");
  manifest.timestamp_utc = current_timestamp_utc();
  write_manifest(out_dir / "manifest.json", manifest);

  if (!common.quiet) {
    std::cout << "wrote " << truth.signals.size() << " signals, " << truth.spec.n_variables << "x"
              << truth.spec.n_samples << " matrix to " << out_dir.string() << '\n';
  }
  return kExitOk;
}

int run_compare(const std::string& command_line, const std::string& truth_dir,
                const CommonFlags& common, EngineConfig cfg, const std::string& methods_text) {
  if (!fs::exists(fs::path(truth_dir) / "spec.json")) {
    throw InputError("truth directory not found or missing spec.json: " + truth_dir);
  }
  const GroundTruth truth = read_ground_truth(truth_dir);

  std::vector<MethodSpec> methods;
  for (const auto& item : split_commas(methods_text)) methods.push_back(parse_method(item));
  if (methods.empty()) throw InputError("no methods given");

  SpcConfig spc_base;
  const auto rows = compare_methods(truth, methods, cfg, spc_base);

  const fs::path out_path(common.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  {
    std::ofstream out(out_path, std::ios::binary);
    out << "method\tsignal\terr\tstrength\tflagged\n";
    for (const auto& row : rows) {
      out << row.method << '\t' << row.signal << '\t' << format_double(row.err) << '\t'
          << format_double(row.strength) << '\t' << (row.flagged ? 1 : 0) << '\n';
    }
  }

  RunManifest manifest;
  manifest.command_line = command_line;
  manifest.seed = cfg.seed;
  manifest.config = engine_config_json(cfg);
  manifest.config["methods"] = methods_text;
  manifest.inputs[truth_dir + "/X.tsv"] = file_digest(fs::path(truth_dir) / "X.tsv");
  manifest.outputs[out_path.filename().string()] = file_digest(out_path);
  manifest.timestamp_utc = current_timestamp_utc();
  write_manifest(out_path.parent_path() / (out_path.stem().string() + ".manifest.json"), manifest);

  if (!common.quiet) {
    for (const auto& row : rows) {
      std::cout << row.method << " signal " << row.signal << ": err=" << row.err
                << " strength=" << row.strength << (row.flagged ? " (flagged)" : "") << '\n';
    }
  }
  return kExitOk;
}

int run_aic(const std::string& command_line, const CommonFlags& common,
            const std::string& coords_path, const std::string& decomposition_dir,
            const std::string& labels_path, int dims) {
  Matrix coords;
  std::vector<std::string> sample_ids;
  std::string input_path;
  if (!decomposition_dir.empty()) {
    const fs::path dir(decomposition_dir);
    const DataMatrix v = read_tsv_matrix(dir / "V.tsv");
    const Vector sigma = read_vector(dir / "sigma.tsv");
    if (sigma.size() != v.values.cols()) {
      throw InputError("sigma.tsv length does not match V.tsv column count");
    }
    coords = v.values * sigma.asDiagonal();  // block-ordered, sigma-scaled scores
    sample_ids = v.variable_ids;             // rows of V.tsv are samples
    input_path = (dir / "V.tsv").string();
  } else {
    const DataMatrix c = read_tsv_matrix(coords_path);
    coords = c.values;
    sample_ids = c.variable_ids;
    input_path = coords_path;
  }

  const auto label_map = read_labels(labels_path);
  std::vector<std::string> labels;
  for (const auto& id : sample_ids) {
    const auto it = label_map.find(id);
    if (it == label_map.end()) throw InputError("unknown sample ID '" + id + "' in labels file");
    labels.push_back(it->second);
  }

  if (dims < 1) throw InputError("--dims must be at least 1");
  if (dims > coords.cols()) {
    throw InputError("--dims " + std::to_string(dims) + " exceeds available columns (" +
                     std::to_string(coords.cols()) + ")");
  }

  const fs::path out_path(common.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  std::ofstream out(out_path, std::ios::binary);
  out << "m\tn_params\tloglik\tloglik_joint\taic\tregularized\n";
  for (int m = 1; m <= dims; ++m) {
    const AicResult res = aic_gmm(coords.leftCols(m), labels);
    out << m << '\t' << res.n_params << '\t' << format_double(res.loglik) << '\t'
        << format_double(res.loglik_joint) << '\t' << format_double(res.aic) << '\t'
        << (res.covariance_regularized ? 1 : 0) << '\n';
    if (!common.quiet) {
      std::cout << "m=" << m << " aic=" << res.aic << '\n';
    }
  }
  out.close();

  RunManifest manifest;
  manifest.command_line = command_line;
  manifest.seed = common.seed;
  manifest.config = {{"dims", dims}};
  manifest.inputs[input_path] = file_digest(input_path);
  manifest.inputs[labels_path] = file_digest(labels_path);
  manifest.outputs[out_path.filename().string()] = file_digest(out_path);
  manifest.timestamp_utc = current_timestamp_utc();
  write_manifest(out_path.parent_path() / (out_path.stem().string() + ".manifest.json"), manifest);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string command_line = join_args(argc, argv);

  CLI::App app{"SubMatrix Selection SVD: adaptive low-rank signal decomposition"};
  app.require_subcommand(1);

  CommonFlags common;

  auto* decompose = app.add_subcommand("decompose", "Decompose a TSV matrix into signal blocks");
  std::string input;
  EngineConfig engine_cfg;
  std::string grid_text;
  bool center_rows = false;
  decompose->add_option("input", input, "Input matrix (TSV)")->required();
  decompose->add_option("--out", common.out, "Output directory")->required();
  decompose->add_option("--seed", common.seed, "Random seed");
  decompose->add_flag("--quiet", common.quiet, "Suppress progress output");
  decompose->add_flag("--center-rows", center_rows, "Subtract row means before decomposing");
  add_engine_flags(decompose, engine_cfg, grid_text);

  auto* synth = app.add_subcommand("synth", "Generate planted-signal ground truth");
  std::string preset;
  SyntheticSpec synth_spec;
  synth->add_option("--out", common.out, "Output directory")->required();
  synth->add_option("--seed", common.seed, "Random seed");
  synth->add_flag("--quiet", common.quiet, "Suppress progress output");
  synth->add_option("--preset", preset,
                    "biplot-no-noise | biplot-noise-off-support | biplot-noise-all");
  auto* optN = synth->add_option("--N", synth_spec.n_samples, "Samples");
  auto* optP = synth->add_option("--P", synth_spec.n_variables, "Variables");
  auto* optL = synth->add_option("--L", synth_spec.support_size, "Support size per signal");
  auto* optK = synth->add_option("--K", synth_spec.n_signals, "Number of signals");
  auto* optd = synth->add_option("--d", synth_spec.rank_per_signal, "Rank per signal");
  auto* optsig = synth->add_option("--sigma", synth_spec.noise_sigma, "Noise standard deviation");
  bool overlap = false;
  synth->add_flag("--overlap", overlap, "Allow overlapping supports");

  auto* compare = app.add_subcommand("compare", "Score methods against a ground-truth directory");
  std::string truth_dir;
  std::string methods_text = "svd,smssvd,spc:c=r0.04,spc:c=r0.12,spc:c=r0.36";
  EngineConfig compare_cfg;
  std::string compare_grid_text;
  compare->add_option("truth", truth_dir, "Ground-truth directory from synth")->required();
  compare->add_option("--out", common.out, "Output table (TSV)")->required();
  compare->add_option("--seed", common.seed, "Random seed");
  compare->add_flag("--quiet", common.quiet, "Suppress output");
  compare->add_option("--methods", methods_text, "Comma list: svd,smssvd,spc:c=<v>,spc:c=r<f>");
  add_engine_flags(compare, compare_cfg, compare_grid_text);

  auto* aic = app.add_subcommand("aic", "Gaussian-mixture AIC of a labeled representation");
  std::string coords_path;
  std::string decomposition_dir;
  std::string labels_path;
  int dims = 1;
  aic->add_option("coords", coords_path, "Sample coordinates (TSV, rows = samples)");
  aic->add_option("--decomposition", decomposition_dir, "Decomposition directory (uses sigma-scaled V)");
  aic->add_option("--labels", labels_path, "Labels file: sample<TAB>label per line")->required();
  aic->add_option("--dims", dims, "Score m = 1..dims leading dimensions")->required();
  aic->add_option("--out", common.out, "Output table (TSV)")->required();
  aic->add_option("--seed", common.seed, "Recorded in the manifest");
  aic->add_flag("--quiet", common.quiet, "Suppress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (decompose->parsed()) {
      finish_engine_config(engine_cfg, grid_text, common.seed);
      return run_decompose(command_line, input, common, engine_cfg, center_rows);
    }
    if (synth->parsed()) {
      synth_spec.seed = common.seed;
      synth_spec.disjoint_supports = !overlap;
      const bool has_explicit =
          optN->count() || optP->count() || optL->count() || optK->count() || optd->count() ||
          optsig->count();
      return run_synth(command_line, common, preset, synth_spec, has_explicit && !preset.empty());
    }
    if (compare->parsed()) {
      finish_engine_config(compare_cfg, compare_grid_text, common.seed);
      return run_compare(command_line, truth_dir, common, compare_cfg, methods_text);
    }
    if (aic->parsed()) {
      if (coords_path.empty() == decomposition_dir.empty()) {
        throw InputError("give either a coords file or --decomposition, not both");
      }
      return run_aic(command_line, common, coords_path, decomposition_dir, labels_path, dims);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumericalError;
  }
  return kExitOk;
}
