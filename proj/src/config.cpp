#include "socolab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace socolab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  std::ostringstream os;
  os << "config line " << line << ": " << what;
  throw ConfigError(os.str());
}

TomlValue parse_scalar(const std::string& tok, int line) {
  TomlValue v;
  v.line = line;
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    v.kind = TomlValue::Kind::string;
    v.str = tok.substr(1, tok.size() - 2);
    return v;
  }
  if (tok == "true" || tok == "false") {
    v.kind = TomlValue::Kind::boolean;
    v.boolean = tok == "true";
    return v;
  }
  try {
    std::size_t used = 0;
    v.number = std::stod(tok, &used);
    if (used != tok.size()) fail(line, "malformed number '" + tok + "'");
    v.kind = TomlValue::Kind::number;
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(line, "cannot parse value '" + tok + "'");
  }
}

std::vector<std::string> split_array_items(const std::string& body, int line) {
  std::vector<std::string> items;
  std::string cur;
  bool in_string = false;
  for (char c : body) {
    if (c == '"') in_string = !in_string;
    if (c == ',' && !in_string) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) items.push_back(trim(cur));
  if (in_string) fail(line, "unterminated string in array");
  return items;
}

std::string strip_comment(const std::string& line) {
  std::string out;
  bool in_string = false;
  for (char c : line) {
    if (c == '"') in_string = !in_string;
    if (c == '#' && !in_string) break;
    out += c;
  }
  return out;
}

}  // namespace

TomlTable parse_toml(const std::string& text) {
  TomlTable table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(lineno, "empty section name");
      table[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (val.empty()) fail(lineno, "empty value for '" + key + "'");
    if (section.empty()) fail(lineno, "key '" + key + "' outside any section");

    TomlValue v;
    if (val.front() == '[') {
      if (val.back() != ']') fail(lineno, "unterminated array");
      const auto items = split_array_items(val.substr(1, val.size() - 2), lineno);
      v.line = lineno;
      bool strings = !items.empty() && items.front().front() == '"';
      v.kind = strings ? TomlValue::Kind::string_array
                       : TomlValue::Kind::number_array;
      for (const auto& item : items) {
        TomlValue s = parse_scalar(item, lineno);
        if (strings) {
          if (s.kind != TomlValue::Kind::string)
            fail(lineno, "mixed array element types");
          v.strings.push_back(s.str);
        } else {
          if (s.kind != TomlValue::Kind::number)
            fail(lineno, "mixed array element types");
          v.numbers.push_back(s.number);
        }
      }
    } else {
      v = parse_scalar(val, lineno);
    }
    table[section][key] = v;
  }
  return table;
}

namespace {

class TableReader {
 public:
  TableReader(const TomlTable& t, std::string section)
      : table_(t), section_(std::move(section)) {}

  bool has(const std::string& key) const {
    auto sec = table_.find(section_);
    return sec != table_.end() && sec->second.count(key) > 0;
  }

  const TomlValue& get(const std::string& key) const {
    auto sec = table_.find(section_);
    if (sec == table_.end())
      throw ConfigError("config: missing [" + section_ + "] section");
    auto it = sec->second.find(key);
    if (it == sec->second.end())
      throw ConfigError("config: missing key '" + key + "' in [" + section_ +
                        "]");
    return it->second;
  }

  double number(const std::string& key) const {
    const TomlValue& v = get(key);
    if (v.kind != TomlValue::Kind::number)
      fail(v.line, "'" + key + "' must be a number");
    return v.number;
  }
  double number_or(const std::string& key, double dflt) const {
    return has(key) ? number(key) : dflt;
  }
  int integer(const std::string& key) const {
    const double x = number(key);
    if (x != std::floor(x)) fail(get(key).line, "'" + key + "' must be an integer");
    return static_cast<int>(x);
  }
  std::string str(const std::string& key) const {
    const TomlValue& v = get(key);
    if (v.kind != TomlValue::Kind::string)
      fail(v.line, "'" + key + "' must be a string");
    return v.str;
  }
  std::string str_or(const std::string& key, const std::string& dflt) const {
    return has(key) ? str(key) : dflt;
  }
  std::vector<double> numbers(const std::string& key) const {
    const TomlValue& v = get(key);
    if (v.kind == TomlValue::Kind::number) return {v.number};
    if (v.kind != TomlValue::Kind::number_array)
      fail(v.line, "'" + key + "' must be a number array");
    return v.numbers;
  }
  std::vector<std::string> strings(const std::string& key) const {
    const TomlValue& v = get(key);
    if (v.kind == TomlValue::Kind::string) return {v.str};
    if (v.kind != TomlValue::Kind::string_array)
      fail(v.line, "'" + key + "' must be a string array");
    return v.strings;
  }

 private:
  const TomlTable& table_;
  std::string section_;
};

std::string fmt_num(double x) {
  char buf[64];
  if (x == std::floor(x) && std::abs(x) < 1e15)
    std::snprintf(buf, sizeof(buf), "%.0f", x);
  else
    std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  const TomlTable table = parse_toml(text);
  ExperimentConfig cfg;

  TableReader env(table, "environment");
  cfg.env.d = env.integer("d");
  cfg.env.r = env.integer("r");
  if (env.has("eigenvalues"))
    cfg.env.eigenvalues = env.numbers("eigenvalues");
  else if (env.has("sigma_a"))
    cfg.env.eigenvalues = {env.number("sigma_a")};
  else
    throw ConfigError("config: [environment] needs eigenvalues or sigma_a");
  cfg.env.process = process_kind_from_string(
      env.str_or("process", "iid_gaussian"));
  cfg.env.sigma_v = env.number("sigma_v");
  cfg.env.alpha = env.number_or("alpha", 1.0);

  TableReader fb(table, "feedback");
  cfg.env.eta_bar = fb.number("eta_bar");

  TableReader ag(table, "agents");
  for (const std::string& name : ag.strings("names")) {
    try {
      cfg.agents.push_back(agent_kind_from_string(name));
    } catch (const std::invalid_argument& e) {
      fail(ag.get("names").line, e.what());
    }
  }
  cfg.params.c1 = ag.number_or("c1", 3.0);
  cfg.params.xi = ag.number_or("xi", 1e-6);
  cfg.params.sigma_floor = ag.has("sigma_floor")
                               ? ag.number("sigma_floor")
                               : *std::min_element(cfg.env.eigenvalues.begin(),
                                                   cfg.env.eigenvalues.end());
  cfg.params.rank_hint =
      ag.has("rank_hint") ? ag.integer("rank_hint") : cfg.env.r;

  TableReader run(table, "run");
  if (run.has("T_list")) {
    for (double t : run.numbers("T_list"))
      cfg.T_list.push_back(static_cast<int>(t));
  } else {
    cfg.T_list.push_back(run.integer("T"));
  }
  cfg.runs = run.integer("runs");
  const double seed = run.number("master_seed");
  if (seed < 0) fail(run.get("master_seed").line, "master_seed must be >= 0");
  cfg.master_seed = static_cast<std::uint64_t>(seed);
  if (run.has("c1_grid")) cfg.c1_grid = run.numbers("c1_grid");

  if (table.count("output")) {
    TableReader out(table, "output");
    cfg.output_directory = out.str_or("directory", "out");
    if (out.has("formats")) cfg.formats = out.strings("formats");
  }

  // Validation beyond parsing.
  if (cfg.env.d < 1) throw ConfigError("config: d must be >= 1");
  if (cfg.env.r < 1 || cfg.env.r > cfg.env.d)
    throw ConfigError("config: need 1 <= r <= d");
  for (double ev : cfg.env.eigenvalues)
    if (ev <= 0.0) throw ConfigError("config: eigenvalues must be positive");
  if (cfg.env.sigma_v < 0.0) throw ConfigError("config: sigma_v must be >= 0");
  if (cfg.env.eta_bar < 0.0) throw ConfigError("config: eta_bar must be >= 0");
  if (cfg.agents.empty()) throw ConfigError("config: agents list is empty");
  if (cfg.runs < 1) throw ConfigError("config: runs must be >= 1");
  for (int T : cfg.T_list)
    if (T < 1) throw ConfigError("config: T must be >= 1");
  for (const std::string& f : cfg.formats)
    if (f != "csv" && f != "svg")
      throw ConfigError("config: unknown output format '" + f + "'");

  const bool has_explorer =
      std::any_of(cfg.agents.begin(), cfg.agents.end(), [](AgentKind k) {
        return k == AgentKind::scale || k == AgentKind::hyscale;
      });
  if (has_explorer) {
    std::vector<double> cs = cfg.c1_grid.empty()
                                 ? std::vector<double>{cfg.params.c1}
                                 : cfg.c1_grid;
    for (double c : cs) {
      if (c <= 0.0) throw ConfigError("config: c1 values must be positive");
      const double m = std::llround(c * cfg.params.rank_hint * cfg.env.d);
      for (int T : cfg.T_list)
        if (m >= T) {
          std::ostringstream os;
          os << "config: c1=" << c << " gives m=" << m
             << " exploration rounds, but T=" << T
             << " leaves no exploitation rounds";
          throw ConfigError(os.str());
        }
    }
  }
  return cfg;
}

std::string ExperimentConfig::to_toml() const {
  std::ostringstream os;
  os << "[environment]\n";
  os << "d = " << env.d << "\n";
  os << "r = " << env.r << "\n";
  os << "eigenvalues = [";
  for (std::size_t i = 0; i < env.eigenvalues.size(); ++i)
    os << (i ? ", " : "") << fmt_num(env.eigenvalues[i]);
  os << "]\n";
  os << "process = \"" << to_string(env.process) << "\"\n";
  os << "sigma_v = " << fmt_num(env.sigma_v) << "\n";
  os << "alpha = " << fmt_num(env.alpha) << "\n";
  os << "\n[feedback]\n";
  os << "eta_bar = " << fmt_num(env.eta_bar) << "\n";
  os << "\n[agents]\n";
  os << "names = [";
  for (std::size_t i = 0; i < agents.size(); ++i)
    os << (i ? ", " : "") << '"' << to_string(agents[i]) << '"';
  os << "]\n";
  os << "c1 = " << fmt_num(params.c1) << "\n";
  os << "xi = " << fmt_num(params.xi) << "\n";
  os << "sigma_floor = " << fmt_num(params.sigma_floor) << "\n";
  os << "rank_hint = " << params.rank_hint << "\n";
  os << "\n[run]\n";
  if (T_list.size() == 1) {
    os << "T = " << T_list[0] << "\n";
  } else {
    os << "T_list = [";
    for (std::size_t i = 0; i < T_list.size(); ++i)
      os << (i ? ", " : "") << T_list[i];
    os << "]\n";
  }
  os << "runs = " << runs << "\n";
  os << "master_seed = " << master_seed << "\n";
  if (!c1_grid.empty()) {
    os << "c1_grid = [";
    for (std::size_t i = 0; i < c1_grid.size(); ++i)
      os << (i ? ", " : "") << fmt_num(c1_grid[i]);
    os << "]\n";
  }
  os << "\n[output]\n";
  os << "directory = \"" << output_directory << "\"\n";
  os << "formats = [";
  for (std::size_t i = 0; i < formats.size(); ++i)
    os << (i ? ", " : "") << '"' << formats[i] << '"';
  os << "]\n";
  return os.str();
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();

  // A manifest embeds the resolved config; accept it directly.
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      const auto j = nlohmann::json::parse(text);
      if (!j.contains("resolved_config"))
        throw ConfigError("config: manifest lacks resolved_config");
      text = j["resolved_config"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: bad manifest JSON: ") + e.what());
    }
  }
  return parse_config(text);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg.to_toml())));
  return buf;
}

}  // namespace socolab
