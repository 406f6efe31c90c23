#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "distlqr/commands.hpp"
#include "distlqr/errors.hpp"

namespace {

using distlqr::json;

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--preset", opts.preset, "built-in preset: example1, example2, example3");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "Monte Carlo seed override")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--threads", opts.threads, "worker threads for sampling");
}

distlqr::RunConfig load_config(const CommonOpts& opts) {
  json doc;
  bool have = false;
  if (!opts.preset.empty()) {
    doc = distlqr::preset_config(opts.preset);
    have = true;
  }
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in)
      throw distlqr::Error(distlqr::ErrorCode::IoError, "cannot read " + opts.config_path);
    json file_doc;
    try {
      in >> file_doc;
    } catch (const json::parse_error& e) {
      throw distlqr::Error(distlqr::ErrorCode::ConfigError,
                           std::string("config is not valid JSON: ") + e.what());
    }
    doc = have ? distlqr::merge_config(doc, file_doc) : file_doc;
    have = true;
  }
  if (!have)
    throw distlqr::Error(distlqr::ErrorCode::ConfigError, "pass --config and/or --preset");
  if (opts.seed_set) doc["mc"]["seed"] = opts.seed;
  if (opts.threads > 0) doc["threads"] = opts.threads;
  return distlqr::parse_config(doc);
}

int exit_code_for(distlqr::ErrorCode code) {
  switch (code) {
    case distlqr::ErrorCode::ConfigError: return 2;
    case distlqr::ErrorCode::IoError: return 4;
    default: return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distribution of the truncated random return of a discounted LQR problem"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto* analyze = app.add_subcommand(
      "analyze", "dominance ratios, eigenvalues of the return form, certificate bounds");
  auto* pdf = app.add_subcommand("pdf", "series density vs Monte Carlo histogram (Gaussian)");
  auto* logconcavity =
      app.add_subcommand("logconcavity", "log-CDF curvature reports per noise model");
  auto* sample = app.add_subcommand("sample", "raw return samples");
  auto* decay = app.add_subcommand("decay", "KS distance to a long-horizon reference");
  for (auto* cmd : {analyze, pdf, logconcavity, sample, decay}) add_common(cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    const distlqr::RunConfig cfg = load_config(opts);
    distlqr::CommandResult result;
    if (analyze->parsed()) result = distlqr::cmd_analyze(cfg, opts.out_dir);
    if (pdf->parsed()) result = distlqr::cmd_pdf(cfg, opts.out_dir);
    if (logconcavity->parsed()) result = distlqr::cmd_logconcavity(cfg, opts.out_dir);
    if (sample->parsed()) result = distlqr::cmd_sample(cfg, opts.out_dir);
    if (decay->parsed()) result = distlqr::cmd_decay(cfg, opts.out_dir);
    for (const auto& path : result.files) std::cout << path << "\n";
    return 0;
  } catch (const distlqr::Error& e) {
    json err;
    err["error"] = {{"code", distlqr::error_code_name(e.code())}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    json err;
    err["error"] = {{"code", "Internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  }
}
