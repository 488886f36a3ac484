#include "tsou/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tsou/errors.hpp"

namespace tsou {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw InputError("invalid value '" + text + "' for config key '" + key + "'");
  }
  return value;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InputError(origin + ":" + std::to_string(number) + ": empty key");
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw InputError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_config(const std::map<std::string, std::string>& values, ExperimentConfig& cfg) {
  for (const auto& [key, value] : values) {
    if (key == "process") {
      cfg.process = parse_process(value);
    } else if (key == "method") {
      cfg.method = parse_method(value);
    } else if (key == "alpha") {
      cfg.alpha = parse_value<double>(key, value);
    } else if (key == "beta") {
      cfg.beta = parse_value<double>(key, value);
    } else if (key == "c") {
      cfg.c = parse_value<double>(key, value);
    } else if (key == "b") {
      cfg.b = parse_value<double>(key, value);
    } else if (key == "T") {
      cfg.T = parse_value<double>(key, value);
    } else if (key == "x0") {
      cfg.x0 = parse_value<double>(key, value);
    } else if (key == "dt") {
      cfg.dt = parse_value<double>(key, value);
    } else if (key == "steps") {
      cfg.steps = parse_value<int>(key, value);
    } else if (key == "paths") {
      cfg.paths = parse_value<long>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_value<std::uint64_t>(key, value);
    } else if (key == "target-g") {
      cfg.target_G = parse_value<double>(key, value);
    } else if (key == "batches") {
      cfg.batches = parse_value<int>(key, value);
    } else if (key == "workers") {
      cfg.workers = parse_value<int>(key, value);
    } else if (key == "out") {
      cfg.output = value;
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }
}

}  // namespace tsou
