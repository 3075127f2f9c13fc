#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ibf/datasets.hpp"
#include "ibf/deletable.hpp"
#include "ibf/estimates.hpp"
#include "ibf/etags.hpp"
#include "ibf/filter.hpp"
#include "ibf/naming.hpp"
#include "ibf/params.hpp"
#include "ibf/rng.hpp"
#include "ibf/secure.hpp"

namespace ibf {

struct ExperimentConfig {
  std::string experiment;
  std::vector<std::uint32_t> m_list{256};
  std::vector<std::uint64_t> n_list{24};
  std::vector<std::uint32_t> k_list{5};
  std::string k_mode = "uniform";  // uniform | distributed (k_j = k + j*k_spread/d)
  std::uint32_t k_spread = 4;
  std::vector<std::uint32_t> d_list{1};
  std::vector<std::uint32_t> r_list{0};
  std::size_t trials = 100;
  std::size_t test_size = 10000;
  std::size_t training_size = 10000;
  std::uint64_t seed = 1;
  std::string source = "labels";  // labels | ip | dictionary
  std::string source_path;
  std::size_t label_bits = 256;
  std::vector<std::string> policies{"fpa"};   // etag-sweep / deletability variants
  std::vector<std::string> suites{"double_sha1md5"};  // hash-compare variants
  std::uint32_t secure_rotation = 0;
  std::string out_path;
  std::size_t jobs = 1;
};

struct ReportRow {
  std::string experiment;
  std::uint32_t m = 0;
  std::uint64_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t d = 1;
  std::uint32_t r = 0;
  std::string variant;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t trials = 0;
};

// ---------------------------------------------------------------------------
// Config parsing: flat "key = value" lines, '#' comments, comma lists.

namespace detail {

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim_copy(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
inline T parse_number(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  T value{};
  try {
    if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t>)
      value = static_cast<T>(std::stoull(text, &used));
    else if constexpr (std::is_same_v<T, std::uint32_t>)
      value = static_cast<T>(std::stoul(text, &used));
    else
      value = static_cast<T>(std::stod(text, &used));
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + text);
  }
  if (used != text.size()) throw std::invalid_argument("config: trailing characters in '" + key + "': " + text);
  return value;
}

template <typename T>
inline std::vector<T> parse_number_list(const std::string& value, const std::string& key) {
  std::vector<T> out;
  for (const auto& item : split_list(value)) out.push_back(parse_number<T>(item, key));
  if (out.empty()) throw std::invalid_argument("config: empty list for '" + key + "'");
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim_copy(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_number) + ": expected key = value");
    const std::string key = detail::trim_copy(line.substr(0, eq));
    const std::string value = detail::trim_copy(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(line_number) + ": empty key or value");

    if (key == "experiment") cfg.experiment = value;
    else if (key == "m") cfg.m_list = detail::parse_number_list<std::uint32_t>(value, key);
    else if (key == "n") cfg.n_list = detail::parse_number_list<std::uint64_t>(value, key);
    else if (key == "k") cfg.k_list = detail::parse_number_list<std::uint32_t>(value, key);
    else if (key == "k_mode") cfg.k_mode = value;
    else if (key == "k_spread") cfg.k_spread = detail::parse_number<std::uint32_t>(value, key);
    else if (key == "d") cfg.d_list = detail::parse_number_list<std::uint32_t>(value, key);
    else if (key == "r") cfg.r_list = detail::parse_number_list<std::uint32_t>(value, key);
    else if (key == "trials") cfg.trials = detail::parse_number<std::size_t>(value, key);
    else if (key == "test_size") cfg.test_size = detail::parse_number<std::size_t>(value, key);
    else if (key == "training_size") cfg.training_size = detail::parse_number<std::size_t>(value, key);
    else if (key == "seed") cfg.seed = detail::parse_number<std::uint64_t>(value, key);
    else if (key == "source") cfg.source = value;
    else if (key == "source_path") cfg.source_path = value;
    else if (key == "label_bits") cfg.label_bits = detail::parse_number<std::size_t>(value, key);
    else if (key == "policy") cfg.policies = detail::split_list(value);
    else if (key == "suite") cfg.suites = detail::split_list(value);
    else if (key == "secure_rotation") cfg.secure_rotation = detail::parse_number<std::uint32_t>(value, key);
    else if (key == "out") cfg.out_path = value;
    else if (key == "jobs") cfg.jobs = detail::parse_number<std::size_t>(value, key);
    else throw std::invalid_argument("config line " + std::to_string(line_number) + ": unknown key '" + key + "'");
  }
  if (cfg.experiment.empty()) throw std::invalid_argument("config: missing 'experiment'");
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// CSV output.

inline void emit_csv(const std::vector<ReportRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot write " + path);
  out << "experiment,m,n,k,d,r,variant,metric,mean,stddev,trials\n";
  char buf[64];
  for (const auto& row : rows) {
    out << row.experiment << ',' << row.m << ',' << row.n << ',' << row.k << ',' << row.d << ',' << row.r
        << ',' << row.variant << ',' << row.metric << ',';
    std::snprintf(buf, sizeof buf, "%.10g", row.mean);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.10g", row.stddev);
    out << buf << ',' << row.trials << '\n';
  }
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

// ---------------------------------------------------------------------------
// Element provisioning.

namespace detail {

// Finite universes (ip, dictionary) are loaded once; the labels mode
// generates fresh blobs per request.
struct ElementUniverse {
  bool finite = false;
  std::size_t label_bytes = 32;
  std::vector<Bytes> items;
};

inline ElementUniverse make_universe(const ExperimentConfig& cfg) {
  ElementUniverse u;
  if (cfg.source == "labels") {
    if (cfg.label_bits == 0 || cfg.label_bits % 8 != 0)
      throw std::invalid_argument("config: label_bits must be a positive multiple of 8");
    u.label_bytes = cfg.label_bits / 8;
  } else if (cfg.source == "ip") {
    std::vector<IpPrefix> prefixes;
    if (cfg.source_path.empty())
      prefixes = {parse_ip_prefix("10.0.0.0/16"), parse_ip_prefix("192.168.0.0/16")};
    else
      prefixes = load_ip_prefixes(cfg.source_path);
    u.items = expand_ip_prefixes(prefixes);
    u.finite = true;
  } else if (cfg.source == "dictionary") {
    if (cfg.source_path.empty()) throw std::invalid_argument("config: dictionary source requires source_path");
    u.items = load_dictionary(cfg.source_path);
    u.finite = true;
  } else {
    throw std::invalid_argument("config: unknown source '" + cfg.source + "'");
  }
  return u;
}

inline Bytes random_blob(Rng& rng, std::size_t nbytes) {
  Bytes out(nbytes);
  for (std::size_t i = 0; i < nbytes; i += 8) {
    const std::uint64_t w = rng();
    for (std::size_t j = 0; j < 8 && i + j < nbytes; ++j) out[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
  }
  return out;
}

// Draws `count` distinct elements; for finite universes the exclude set (and
// anything drawn here, which is appended to it) stays disjoint from later
// draws that receive the same set.
inline std::vector<Bytes> draw_elements(const ElementUniverse& u, Rng& rng, std::size_t count,
                                        std::unordered_set<std::size_t>* exclude = nullptr) {
  std::vector<Bytes> out;
  out.reserve(count);
  if (!u.finite) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(random_blob(rng, u.label_bytes));
    return out;
  }
  const std::size_t reserved = exclude == nullptr ? 0 : exclude->size();
  if (count + reserved > u.items.size() / 2 && count + reserved >= u.items.size())
    throw std::invalid_argument("draw_elements: sample larger than universe");
  std::unordered_set<std::size_t> local;
  std::unordered_set<std::size_t>* used = exclude == nullptr ? &local : exclude;
  while (out.size() < count) {
    const std::size_t idx = static_cast<std::size_t>(rng.below(u.items.size()));
    if (!used->insert(idx).second) continue;
    out.push_back(u.items[idx]);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment drivers.

namespace detail {

struct GridPoint {
  std::uint32_t m = 0;
  std::uint64_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t d = 1;
  std::uint32_t r = 0;
  std::string variant;
};

inline std::string point_label(const std::string& experiment, const GridPoint& p) {
  std::ostringstream s;
  s << experiment << ";m=" << p.m << ";n=" << p.n << ";k=" << p.k << ";d=" << p.d << ";r=" << p.r
    << ";variant=" << p.variant;
  return s.str();
}

inline ReportRow base_row(const std::string& experiment, const GridPoint& p) {
  ReportRow row;
  row.experiment = experiment;
  row.m = p.m;
  row.n = p.n;
  row.k = p.k;
  row.d = p.d;
  row.r = p.r;
  row.variant = p.variant;
  return row;
}

// Runs `trials` independent tasks on `jobs` threads; slot-indexed results
// keep aggregation order identical to the serial run.
template <typename TrialFn>
inline std::vector<std::vector<std::pair<std::string, double>>> run_trials(std::size_t trials, std::size_t jobs,
                                                                           const TrialFn& fn) {
  std::vector<std::vector<std::pair<std::string, double>>> slots(trials);
  if (jobs <= 1) {
    for (std::size_t t = 0; t < trials; ++t) slots[t] = fn(t);
    return slots;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        slots[t] = fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count = std::min(jobs, trials);
  pool.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return slots;
}

inline void append_metric_rows(std::vector<ReportRow>& rows, const std::string& experiment, const GridPoint& p,
                               const std::vector<std::vector<std::pair<std::string, double>>>& slots) {
  std::map<std::string, std::vector<double>> series;
  for (const auto& slot : slots)
    for (const auto& [metric, value] : slot) series[metric].push_back(value);
  for (const auto& [metric, values] : series) {
    ReportRow row = base_row(experiment, p);
    row.metric = metric;
    const MeanSd ms = mean_sd(values);
    row.mean = ms.mean;
    row.stddev = ms.sd;
    row.trials = values.size();
    rows.push_back(row);
  }
}

inline void append_model_row(std::vector<ReportRow>& rows, const std::string& experiment, const GridPoint& p,
                             const std::string& metric, double value) {
  ReportRow row = base_row(experiment, p);
  row.metric = metric;
  row.mean = value;
  row.trials = 0;
  rows.push_back(row);
}

inline Footprint suite_footprint(const std::string& suite, const Bytes& element, std::uint32_t k,
                                 std::uint32_t m) {
  if (suite == "double_sha1md5") return double_hash_indices(element, k, m);
  if (suite == "crc32_seg_dh") return segment_double_hash_indices(element, k, m, HashSuite{HashAlgo::CRC32});
  if (suite.rfind("windows_", 0) == 0)
    return segmented_indices(element, k, m, HashSuite{algo_from_name(suite.substr(8))});
  throw std::invalid_argument("unknown hash suite variant: " + suite);
}

inline std::vector<std::uint32_t> point_k_list(const ExperimentConfig& cfg, const GridPoint& p) {
  if (cfg.k_mode == "uniform") return uniform_k_list(p.k, p.d);
  if (cfg.k_mode == "distributed") return distributed_k_list(p.k, cfg.k_spread, p.d);
  throw std::invalid_argument("config: unknown k_mode '" + cfg.k_mode + "'");
}

inline void sort_and_append(std::vector<ReportRow>& rows, std::vector<ReportRow>& point_rows) {
  std::sort(point_rows.begin(), point_rows.end(),
            [](const ReportRow& a, const ReportRow& b) { return a.metric < b.metric; });
  for (auto& row : point_rows) rows.push_back(std::move(row));
}

inline void run_fpr_sweep_point(const ExperimentConfig& cfg, const ElementUniverse& universe,
                                const GridPoint& p, std::vector<ReportRow>& rows) {
  const FilterParams params{p.m, p.k, 1, 0};
  params.validate();
  const std::string label = point_label(cfg.experiment, p);
  const auto slots = run_trials(cfg.trials, cfg.jobs, [&](std::size_t t) {
    Rng rng(derive_seed(cfg.seed, label + ";trial=" + std::to_string(t)));
    std::unordered_set<std::size_t> used;
    const auto elements = draw_elements(universe, rng, p.n, &used);
    const auto queries = draw_elements(universe, rng, cfg.test_size, &used);
    BloomFilter filter(p.m);
    for (const auto& e : elements) filter.insert(double_hash_indices(e, p.k, p.m));
    std::size_t positives = 0;
    for (const auto& q : queries)
      if (filter.query(double_hash_indices(q, p.k, p.m))) ++positives;
    const double rate = static_cast<double>(positives) / static_cast<double>(queries.size());
    const double fill = filter.fill_factor();
    return std::vector<std::pair<std::string, double>>{
        {"fill", fill}, {"fpa", fpa_estimate(fill, p.k)}, {"fpr", rate}};
  });
  std::vector<ReportRow> point_rows;
  append_metric_rows(point_rows, cfg.experiment, p, slots);
  append_model_row(point_rows, cfg.experiment, p, "fpb_model", fpb_estimate(p.m, p.n, p.k));
  sort_and_append(rows, point_rows);
}

inline SelectionPolicy make_policy(const std::string& name, const std::vector<ETagSet>& training) {
  SelectionPolicy policy;
  if (name == "fpa") {
    policy.kind = SelectionPolicy::Kind::Fpa;
  } else if (name == "fpr") {
    policy.kind = SelectionPolicy::Kind::Fpr;
    policy.training = &training;
  } else if (name == "avoidance") {
    policy.kind = SelectionPolicy::Kind::Avoidance;
    policy.forbidden = &training;
  } else {
    throw std::invalid_argument("unknown selection policy: " + name);
  }
  return policy;
}

inline void run_etag_sweep_point(const ExperimentConfig& cfg, const ElementUniverse& universe,
                                 const GridPoint& p, std::vector<ReportRow>& rows) {
  FilterParams params{p.m, p.k, p.d, 0};
  params.validate();
  const auto k_list = point_k_list(cfg, p);
  const std::string label = point_label(cfg.experiment, p);

  // Training and test pools are built once per grid point and shared across
  // trials; construction elements always avoid them.
  Rng pool_rng(derive_seed(cfg.seed, label + ";pools"));
  std::unordered_set<std::size_t> reserved;
  const bool needs_training = p.variant != "fpa";
  std::vector<ETagSet> training;
  if (needs_training) {
    for (const auto& e : draw_elements(universe, pool_rng, cfg.training_size, &reserved))
      training.push_back(generate_etags(e, params, k_list));
  }
  std::vector<ETagSet> tests;
  for (const auto& e : draw_elements(universe, pool_rng, cfg.test_size, &reserved))
    tests.push_back(generate_etags(e, params, k_list));
  const SelectionPolicy policy = make_policy(p.variant, training);

  const auto slots = run_trials(cfg.trials, cfg.jobs, [&](std::size_t t) {
    Rng rng(derive_seed(cfg.seed, label + ";trial=" + std::to_string(t)));
    auto used = reserved;
    std::vector<ETagSet> etags;
    for (const auto& e : draw_elements(universe, rng, p.n, &used))
      etags.push_back(generate_etags(e, params, k_list));
    const CandidateSet cands = build_candidates(etags, params);
    const std::uint32_t chosen = select(cands, policy);

    std::size_t hit_sel = 0, hit_zero = 0;
    for (const auto& q : tests) {
      if (cands.filters[chosen].query(q.candidates[chosen])) ++hit_sel;
      if (cands.filters[0].query(q.candidates[0])) ++hit_zero;
    }
    const double denom = static_cast<double>(tests.size());
    return std::vector<std::pair<std::string, double>>{
        {"chosen_index", static_cast<double>(chosen)},
        {"fill_selected", cands.filters[chosen].fill_factor()},
        {"fpr_candidate0", static_cast<double>(hit_zero) / denom},
        {"fpr_selected", static_cast<double>(hit_sel) / denom}};
  });
  std::vector<ReportRow> point_rows;
  append_metric_rows(point_rows, cfg.experiment, p, slots);
  append_model_row(point_rows, cfg.experiment, p, "predicted_fp_model",
                   predicted_fp_after_choice(params.m_prime(), p.n, p.k, p.d));
  sort_and_append(rows, point_rows);
}

inline void run_deletability_point(const ExperimentConfig& cfg, const ElementUniverse& universe,
                                   const GridPoint& p, std::vector<ReportRow>& rows) {
  FilterParams params{p.m, p.k, p.d, p.r};
  params.validate();
  if (p.r < 1) throw std::invalid_argument("deletability: r must be >= 1");
  const auto k_list = point_k_list(cfg, p);
  const std::string label = point_label(cfg.experiment, p);

  Rng pool_rng(derive_seed(cfg.seed, label + ";pools"));
  std::unordered_set<std::size_t> reserved;
  std::vector<ETagSet> tests;
  for (const auto& e : draw_elements(universe, pool_rng, cfg.test_size, &reserved))
    tests.push_back(generate_etags(e, params, k_list));

  const auto slots = run_trials(cfg.trials, cfg.jobs, [&](std::size_t t) {
    Rng rng(derive_seed(cfg.seed, label + ";trial=" + std::to_string(t)));
    auto used = reserved;
    std::vector<ETagSet> etags;
    for (const auto& e : draw_elements(universe, rng, p.n, &used))
      etags.push_back(generate_etags(e, params, k_list));
    auto cands = build_deletable_candidates(etags, params);

    std::uint32_t chosen = 0;
    if (p.variant == "bits") chosen = select_deletable(cands, etags, DeletabilityGoal::Bits);
    else if (p.variant == "elements") chosen = select_deletable(cands, etags, DeletabilityGoal::Elements);
    else if (p.variant != "none") throw std::invalid_argument("unknown deletability policy: " + p.variant);

    DeletableFilter& filter = cands[chosen];
    std::vector<Footprint> inserted;
    inserted.reserve(etags.size());
    for (const auto& e : etags) inserted.push_back(e.candidates[chosen]);

    const auto [elem_frac, bit_frac] = deletable_fraction(filter, inserted);
    std::size_t before = 0, after = 0;
    for (const auto& q : tests)
      if (filter.query(q.candidates[chosen])) ++before;
    for (const auto& f : inserted) filter.delete_element(f);
    for (const auto& q : tests)
      if (filter.query(q.candidates[chosen])) ++after;
    const double denom = static_cast<double>(tests.size());
    return std::vector<std::pair<std::string, double>>{
        {"bit_fraction", bit_frac},
        {"element_fraction", elem_frac},
        {"fpr_after_delete", static_cast<double>(after) / denom},
        {"fpr_before_delete", static_cast<double>(before) / denom}};
  });
  std::vector<ReportRow> point_rows;
  append_metric_rows(point_rows, cfg.experiment, p, slots);
  append_model_row(point_rows, cfg.experiment, p, "pdr_model",
                   deletability_probability(p.m - params.log2_d(), p.n, p.k, p.r));
  sort_and_append(rows, point_rows);
}

inline void run_secure_eval_point(const ExperimentConfig& cfg, const ElementUniverse& universe,
                                  const GridPoint& p, std::vector<ReportRow>& rows) {
  const FilterParams params{p.m, p.k, 1, 0};
  params.validate();
  if (!std::has_single_bit(p.m)) throw std::invalid_argument("secure-eval: m must be a power of two");
  const std::string label = point_label(cfg.experiment, p);

  // One fixed element set per grid point; each trial is a packet with its
  // own random PacketId.
  Rng elem_rng(derive_seed(cfg.seed, label + ";elements"));
  const auto elements = draw_elements(universe, elem_rng, p.n, nullptr);
  std::vector<ElementNameK> names;
  names.reserve(elements.size());
  for (const auto& e : elements) names.push_back(element_name_k(e, p.m));

  BloomFilter plain(p.m);
  for (const auto& e : elements) plain.insert(double_hash_indices(e, p.k, p.m));

  std::vector<SecureBuild> builds;
  builds.reserve(cfg.trials);
  std::size_t density_ok = 0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng rng(derive_seed(cfg.seed, label + ";packet=" + std::to_string(t)));
    builds.push_back(build_secure_filter(names, random_packet_id(rng, p.m), cfg.secure_rotation, p.m, p.k));
    if (density_check(builds.back().filter, p.k, static_cast<std::uint32_t>(p.n))) ++density_ok;
  }
  const RandomnessReport rep = randomness_report(builds, plain, static_cast<std::uint32_t>(p.n), p.k);

  Rng flip_rng(derive_seed(cfg.seed, label + ";avalanche"));
  const std::size_t flips = 10000;
  std::size_t changed = 0;
  for (std::size_t t = 0; t < flips; ++t) {
    const PacketId I = random_packet_id(flip_rng, p.m);
    PacketId I2 = I;
    const std::size_t bit = static_cast<std::size_t>(flip_rng.below(p.m));
    if (I2.test(bit)) I2.reset(bit); else I2.set(bit);
    const std::size_t who = static_cast<std::size_t>(flip_rng.below(names.size()));
    if (secure_indices(names[who], I, cfg.secure_rotation, p.m, p.k) !=
        secure_indices(names[who], I2, cfg.secure_rotation, p.m, p.k))
      ++changed;
  }

  std::vector<ReportRow> point_rows;
  const auto push = [&](const std::string& metric, double mean, double sd, std::size_t count) {
    ReportRow row = base_row(cfg.experiment, p);
    row.metric = metric;
    row.mean = mean;
    row.stddev = sd;
    row.trials = count;
    point_rows.push_back(row);
  };
  push("avalanche_fraction", static_cast<double>(changed) / static_cast<double>(flips), 0.0, flips);
  push("bits_set", rep.bits_set_mean, 0.0, builds.size());
  push("bits_set_model",
       static_cast<double>(p.m) *
           (1.0 - std::pow(1.0 - 1.0 / static_cast<double>(p.m), static_cast<double>(p.k) * p.n)),
       0.0, 0);
  push("correlation_factor", rep.correlation_factor, 0.0, builds.size());
  push("density_ok_fraction", static_cast<double>(density_ok) / static_cast<double>(builds.size()), 0.0,
       builds.size());
  push("hamming_filter", rep.hamming_filter_mean, rep.hamming_filter_stddev, builds.size());
  push("hamming_mixed", rep.hamming_mixed_mean, rep.hamming_mixed_stddev, builds.size());
  sort_and_append(rows, point_rows);
}

inline void run_hash_compare_point(const ExperimentConfig& cfg, const ElementUniverse& universe,
                                   const GridPoint& p, std::vector<ReportRow>& rows) {
  const FilterParams params{p.m, p.k, 1, 0};
  params.validate();
  const std::string label = point_label(cfg.experiment, p);
  const auto slots = run_trials(cfg.trials, cfg.jobs, [&](std::size_t t) {
    Rng rng(derive_seed(cfg.seed, label + ";trial=" + std::to_string(t)));
    std::unordered_set<std::size_t> used;
    const auto elements = draw_elements(universe, rng, p.n, &used);
    const auto queries = draw_elements(universe, rng, cfg.test_size, &used);
    BloomFilter filter(p.m);
    for (const auto& e : elements) filter.insert(suite_footprint(p.variant, e, p.k, p.m));
    std::size_t positives = 0;
    for (const auto& q : queries)
      if (filter.query(suite_footprint(p.variant, q, p.k, p.m))) ++positives;
    return std::vector<std::pair<std::string, double>>{
        {"fill", filter.fill_factor()},
        {"fpr", static_cast<double>(positives) / static_cast<double>(queries.size())}};
  });
  std::vector<ReportRow> point_rows;
  append_metric_rows(point_rows, cfg.experiment, p, slots);
  sort_and_append(rows, point_rows);
}

inline void dispatch_point(const ExperimentConfig& cfg, const ElementUniverse& universe, const GridPoint& p,
                           std::vector<ReportRow>& rows) {
  if (cfg.experiment == "fpr-sweep") run_fpr_sweep_point(cfg, universe, p, rows);
  else if (cfg.experiment == "etag-sweep") run_etag_sweep_point(cfg, universe, p, rows);
  else if (cfg.experiment == "deletability") run_deletability_point(cfg, universe, p, rows);
  else if (cfg.experiment == "secure-eval") run_secure_eval_point(cfg, universe, p, rows);
  else run_hash_compare_point(cfg, universe, p, rows);
}

}  // namespace detail

inline std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
  const std::vector<std::string> known{"fpr-sweep", "etag-sweep", "deletability", "secure-eval", "hash-compare"};
  if (std::find(known.begin(), known.end(), cfg.experiment) == known.end())
    throw std::invalid_argument("run_experiment: unknown experiment '" + cfg.experiment + "'");
  if (cfg.test_size < 1) throw std::invalid_argument("run_experiment: test_size must be >= 1");

  const detail::ElementUniverse universe = detail::make_universe(cfg);
  std::vector<ReportRow> rows;

  const bool etag = cfg.experiment == "etag-sweep";
  const bool deletability = cfg.experiment == "deletability";
  const bool secure = cfg.experiment == "secure-eval";
  const bool hash_compare = cfg.experiment == "hash-compare";

  std::vector<std::string> variants;
  if (etag || deletability) variants = cfg.policies;
  else if (hash_compare) variants = cfg.suites;
  else variants = {"std"};
  if (variants.empty()) throw std::invalid_argument("run_experiment: no variants configured");

  for (const auto m : cfg.m_list)
    for (const auto n : cfg.n_list)
      for (const auto k : cfg.k_list)
        for (const auto d : cfg.d_list)
          for (const auto r : cfg.r_list)
            for (const auto& variant : variants) {
              detail::GridPoint p{m, n, k, etag || deletability || secure ? d : 1,
                                  deletability ? r : 0, variant};
              if (secure) p.d = 1;  // rotation comes from cfg.secure_rotation, header carries no candidates
              try {
                detail::dispatch_point(cfg, universe, p, rows);
              } catch (const std::invalid_argument&) {
                ReportRow row = detail::base_row(cfg.experiment, p);
                row.metric = "invalid_params";
                rows.push_back(row);
              } catch (const std::length_error&) {
                ReportRow row = detail::base_row(cfg.experiment, p);
                row.metric = "invalid_params";
                rows.push_back(row);
              }
            }

  if (!cfg.out_path.empty()) emit_csv(rows, cfg.out_path);
  return rows;
}

}  // namespace ibf
