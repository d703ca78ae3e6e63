#include "perslay/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace perslay {

std::vector<PointKind> RunConfig::active_kinds() const {
  if (!kinds.empty()) return kinds;
  if (is_graph()) return {std::begin(kExtendedKinds), std::end(kExtendedKinds)};
  return {std::begin(kOrdinaryKinds), std::end(kOrdinaryKinds)};
}

ChannelSpec RunConfig::channel_for(PointKind k) const {
  const auto it = channel_overrides.find(k);
  return it == channel_overrides.end() ? channel : it->second;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

std::size_t to_count(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
  return std::stoull(s);
}

std::string shortest(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

PointKind to_kind(const std::string& s) {
  const auto k = parse_kind(s);
  if (!k) throw std::invalid_argument("unknown diagram kind '" + s + "'");
  return *k;
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "dataset") {
    c.dataset = value;
  } else if (key == "source") {
    if (value != "graph" && value != "orbit") throw std::invalid_argument("source must be graph or orbit");
    c.source = value;
  } else if (key == "data_dir") {
    c.data_dir = value;
  } else if (key == "hks") {
    c.hks_times.clear();
    for (auto tok : split_list(value)) {
      if (tok.rfind("hks", 0) == 0) tok = tok.substr(3);
      const double t = to_double(tok);
      if (!(t >= 0.0)) throw std::invalid_argument("hks times must be non-negative");
      c.hks_times.push_back(t);
    }
    if (c.hks_times.empty()) throw std::invalid_argument("hks needs at least one time");
  } else if (key == "kinds") {
    c.kinds.clear();
    for (const auto& tok : split_list(value)) c.kinds.push_back(to_kind(tok));
  } else if (key == "channel") {
    c.channel = parse_channel_spec(value);
  } else if (key.rfind("channel.", 0) == 0) {
    c.channel_overrides[to_kind(key.substr(8))] = parse_channel_spec(value);
  } else if (key == "prom") {
    if (value == "none") c.prom.reset();
    else c.prom = to_count(value.rfind("prom(", 0) == 0 && value.back() == ')' ? value.substr(5, value.size() - 6) : value);
  } else if (key == "optimizer") {
    const std::size_t batch = c.optimizer.batch_size;
    c.optimizer = parse_adam(value);
    c.optimizer.batch_size = batch;
  } else if (key == "batch") {
    c.optimizer.batch_size = to_count(value);
    if (c.optimizer.batch_size == 0) throw std::invalid_argument("batch must be positive");
  } else if (key == "eigenvalues") {
    c.eigenvalues = to_count(value);
  } else if (key == "standardize") {
    c.standardize = parse_standardization(value);
  } else if (key == "normalize_quantile") {
    c.normalize_quantile = to_double(value);
    if (!(c.normalize_quantile > 0.0 && c.normalize_quantile <= 1.0))
      throw std::invalid_argument("normalize_quantile must be in (0,1]");
  } else if (key == "protocol") {
    if (value != "kfold" && value != "holdout") throw std::invalid_argument("protocol must be kfold or holdout");
    c.protocol = value;
  } else if (key == "repeats") {
    c.repeats = to_count(value);
  } else if (key == "folds") {
    c.folds = to_count(value);
  } else if (key == "train_fraction") {
    c.train_fraction = to_double(value);
    if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) throw std::invalid_argument("train_fraction must be in (0,1)");
  } else if (key == "orbit_per_class") {
    c.orbit_per_class = to_count(value);
  } else if (key == "orbit_points") {
    c.orbit_points = to_count(value);
  } else if (key == "seed") {
    c.seed = to_count(value);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "cache_dir") {
    c.cache_dir = value;
  } else if (key == "threads") {
    c.threads = to_count(value);
  } else {
    throw std::invalid_argument("unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string::npos) throw std::invalid_argument("expected 'key = value'");
      apply(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_run_config(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream out;
  out << "dataset = " << c.dataset << "\nsource = " << c.source << "\ndata_dir = " << c.data_dir << "\nhks = ";
  for (std::size_t i = 0; i < c.hks_times.size(); ++i) out << (i ? ", " : "") << shortest(c.hks_times[i]);
  if (!c.kinds.empty()) {
    out << "\nkinds = ";
    for (std::size_t i = 0; i < c.kinds.size(); ++i) out << (i ? ", " : "") << to_string(c.kinds[i]);
  }
  out << "\nchannel = " << c.channel.to_string();
  for (const auto& [k, spec] : c.channel_overrides) out << "\nchannel." << to_string(k) << " = " << spec.to_string();
  out << "\nprom = " << (c.prom ? std::to_string(*c.prom) : "none");
  out << "\noptimizer = " << to_string(c.optimizer) << "\nbatch = " << c.optimizer.batch_size;
  out << "\neigenvalues = " << c.eigenvalues << "\nstandardize = " << standardization_name(c.standardize)
      << "\nnormalize_quantile = " << shortest(c.normalize_quantile);
  out << "\nprotocol = " << c.protocol << "\nrepeats = " << c.repeats << "\nfolds = " << c.folds
      << "\ntrain_fraction = " << shortest(c.train_fraction);
  out << "\norbit_per_class = " << c.orbit_per_class << "\norbit_points = " << c.orbit_points;
  out << "\nseed = " << c.seed << "\noutput_dir = " << c.output_dir << "\ncache_dir = " << c.cache_dir
      << "\nthreads = " << c.threads << "\n";
  return out.str();
}

}  // namespace perslay
