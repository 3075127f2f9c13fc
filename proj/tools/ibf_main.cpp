#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ibf/harness.hpp"

namespace {

ibf::Bytes parse_hex(std::string text, const std::string& what) {
  if (text.rfind("0x", 0) == 0 || text.rfind("0X", 0) == 0) text.erase(0, 2);
  if (text.empty() || text.size() % 2 != 0)
    throw std::invalid_argument(what + ": hex string must have a positive, even length");
  auto nibble = [&what](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw std::invalid_argument(what + ": invalid hex character");
  };
  ibf::Bytes out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2)
    out.push_back(static_cast<std::uint8_t>(nibble(text[i]) << 4 | nibble(text[i + 1])));
  return out;
}

void ensure_parent_dir(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

void print_rows(const std::vector<ibf::ReportRow>& rows) {
  std::printf("%-14s %5s %5s %3s %3s %3s %-16s %-20s %12s %12s %7s\n", "experiment", "m", "n", "k", "d",
              "r", "variant", "metric", "mean", "stddev", "trials");
  for (const auto& row : rows)
    std::printf("%-14s %5u %5llu %3u %3u %3u %-16s %-20s %12.6g %12.6g %7zu\n", row.experiment.c_str(),
                row.m, static_cast<unsigned long long>(row.n), row.k, row.d, row.r, row.variant.c_str(),
                row.metric.c_str(), row.mean, row.stddev, row.trials);
}

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  bool seed_set = false;
  bool jobs_set = false;
  bool out_set = false;
};

int run_one_experiment(const std::string& experiment, const CommonOpts& opts, bool print) {
  ibf::ExperimentConfig cfg = ibf::load_config(opts.config_path);
  if (cfg.experiment != experiment)
    throw std::invalid_argument("config declares experiment '" + cfg.experiment + "' but subcommand is '" +
                                experiment + "'");
  if (opts.out_set) cfg.out_path = opts.out_path;
  if (opts.seed_set) cfg.seed = opts.seed;
  if (opts.jobs_set) cfg.jobs = opts.jobs;
  if (!cfg.out_path.empty()) ensure_parent_dir(cfg.out_path);

  const auto rows = ibf::run_experiment(cfg);
  if (print) print_rows(rows);
  if (!cfg.out_path.empty()) std::fprintf(stderr, "wrote %s (%zu rows)\n", cfg.out_path.c_str(), rows.size());
  return 0;
}

int run_tables(const std::string& config_dir, const std::string& out_dir, const CommonOpts& opts) {
  const std::vector<std::string> bundled{"table1_std.cfg", "table1_choices.cfg", "deletability.cfg",
                                         "secure_eval.cfg", "hash_compare.cfg"};
  for (const auto& name : bundled) {
    const std::string path = config_dir + "/" + name;
    ibf::ExperimentConfig cfg = ibf::load_config(path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.jobs_set) cfg.jobs = opts.jobs;
    if (!out_dir.empty()) {
      const std::string base = cfg.out_path.empty()
                                   ? std::filesystem::path(name).replace_extension(".csv").string()
                                   : std::filesystem::path(cfg.out_path).filename().string();
      cfg.out_path = out_dir + "/" + base;
    }
    if (!cfg.out_path.empty()) ensure_parent_dir(cfg.out_path);
    std::fprintf(stderr, "running %s ...\n", path.c_str());
    const auto rows = ibf::run_experiment(cfg);
    if (cfg.out_path.empty())
      print_rows(rows);
    else
      std::fprintf(stderr, "wrote %s (%zu rows)\n", cfg.out_path.c_str(), rows.size());
  }
  return 0;
}

struct VerifyOpts {
  std::string filter_path;
  std::string trace_path;
  std::uint32_t rotation = 0;
  std::string secret_seed_hex;
  std::uint64_t epoch = 0;
  bool epoch_set = false;
  std::uint64_t epoch_seconds = 60;
  std::uint64_t start_epoch = 0;
};

int run_verify(const VerifyOpts& opts) {
  std::ifstream filter_in(opts.filter_path, std::ios::binary);
  if (!filter_in) throw std::runtime_error("cannot open filter envelope: " + opts.filter_path);
  ibf::Bytes wire((std::istreambuf_iterator<char>(filter_in)), std::istreambuf_iterator<char>());
  const ibf::Envelope envelope = ibf::decode_envelope(wire);
  const auto m = static_cast<std::uint32_t>(envelope.params.m_prime());
  ibf::BloomFilter filter(m);
  filter.bits() = envelope.filter;

  ibf::SecretSchedule schedule;
  const bool keyed = !opts.secret_seed_hex.empty();
  if (keyed) {
    if (!opts.epoch_set) throw std::invalid_argument("keyed verification needs --epoch");
    schedule.seed = parse_hex(opts.secret_seed_hex, "--secret-seed-hex");
    schedule.epoch_seconds = opts.epoch_seconds;
    schedule.start_epoch = opts.start_epoch;
  }

  std::ifstream trace(opts.trace_path);
  if (!trace) throw std::runtime_error("cannot open trace: " + opts.trace_path);
  std::string line;
  std::size_t line_number = 0, packets = 0, checks = 0, accepted = 0;
  while (std::getline(trace, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream in(line);
    std::string id_hex;
    if (!(in >> id_hex)) continue;
    const ibf::Bytes id_bytes = parse_hex(id_hex, "trace line " + std::to_string(line_number));
    if (id_bytes.size() * 8 != m)
      throw std::invalid_argument("trace line " + std::to_string(line_number) + ": packet id has " +
                                  std::to_string(id_bytes.size() * 8) + " bits, filter has " +
                                  std::to_string(m));
    const ibf::PacketId I = ibf::BitVec::from_bytes(m, id_bytes);
    std::vector<ibf::Bytes> elements;
    std::string token;
    while (in >> token) elements.push_back(ibf::Bytes(token.begin(), token.end()));
    if (elements.empty())
      throw std::invalid_argument("trace line " + std::to_string(line_number) + ": no elements after packet id");

    const std::vector<bool> ok =
        keyed ? ibf::verify_elements_keyed(filter, elements, I, schedule, opts.epoch, opts.rotation,
                                           envelope.params.k)
              : ibf::verify_elements(filter, elements, I, opts.rotation, envelope.params.k);
    ++packets;
    std::printf("packet %zu %s\n", packets, id_hex.c_str());
    for (std::size_t i = 0; i < elements.size(); ++i) {
      const std::string name(elements[i].begin(), elements[i].end());
      std::printf("  %s: %s\n", name.c_str(), ok[i] ? "accept" : "reject");
      ++checks;
      if (ok[i]) ++accepted;
    }
  }
  if (packets == 0) throw std::invalid_argument("trace contains no packets: " + opts.trace_path);
  std::printf("accepted %zu of %zu element checks across %zu packets\n", accepted, checks, packets);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"in-packet Bloom filter experiment harness"};
  app.require_subcommand(1);

  CommonOpts common;
  const std::vector<std::string> experiments{"fpr-sweep", "etag-sweep", "deletability", "secure-eval",
                                             "hash-compare"};
  std::vector<CLI::App*> exp_subs;
  for (const auto& name : experiments) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment grid");
    sub->add_option("--config", common.config_path, "experiment config file")->required();
    sub->add_option("--out", common.out_path, "CSV output path (overrides config)");
    sub->add_option("--seed", common.seed, "master seed (overrides config)");
    sub->add_option("--jobs", common.jobs, "worker threads (overrides config)");
    exp_subs.push_back(sub);
  }

  std::string config_dir = "configs";
  std::string out_dir;
  CLI::App* tables = app.add_subcommand("tables", "regenerate the bundled table and figure CSVs");
  tables->add_option("--config-dir", config_dir, "directory holding the bundled configs");
  tables->add_option("--out-dir", out_dir, "redirect all CSV outputs into this directory");
  tables->add_option("--seed", common.seed, "master seed (overrides configs)");
  tables->add_option("--jobs", common.jobs, "worker threads (overrides configs)");

  VerifyOpts vopts;
  CLI::App* verify = app.add_subcommand("verify", "check a packet trace against a filter envelope");
  verify->add_option("--filter", vopts.filter_path, "binary filter envelope file")->required();
  verify->add_option("--trace", vopts.trace_path, "trace file: one 'packet-id-hex element...' per line")
      ->required();
  verify->add_option("--rotation", vopts.rotation, "per-candidate rotation amount (default 0)");
  verify->add_option("--secret-seed-hex", vopts.secret_seed_hex, "shared secret seed for keyed verification");
  CLI::Option* epoch_opt = verify->add_option("--epoch", vopts.epoch, "verifier epoch for keyed verification");
  verify->add_option("--epoch-seconds", vopts.epoch_seconds, "epoch length in seconds (default 60)");
  verify->add_option("--start-epoch", vopts.start_epoch, "first valid epoch (default 0)");

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < exp_subs.size(); ++i)
      if (exp_subs[i]->parsed()) {
        common.out_set = exp_subs[i]->count("--out") > 0;
        common.seed_set = exp_subs[i]->count("--seed") > 0;
        common.jobs_set = exp_subs[i]->count("--jobs") > 0;
        return run_one_experiment(experiments[i], common, true);
      }
    if (tables->parsed()) {
      common.seed_set = tables->count("--seed") > 0;
      common.jobs_set = tables->count("--jobs") > 0;
      return run_tables(config_dir, out_dir, common);
    }
    if (verify->parsed()) {
      vopts.epoch_set = epoch_opt->count() > 0;
      return run_verify(vopts);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
